#include "ppride/tos/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>
#include <system_error>

#include "ppride/tos/protocol.hpp"

namespace ppride::tos {

namespace {

[[noreturn]] void throw_errno(const char* what) {
  throw std::system_error(errno, std::generic_category(), what);
}

/// False on orderly shutdown before the first byte.
bool read_exact(int fd, std::uint8_t* buf, std::size_t n) {
  std::size_t got = 0;
  while (got < n) {
    const auto r = ::recv(fd, buf + got, n - got, 0);
    if (r == 0) {
      if (got == 0) return false;
      throw DecodeError("connection closed mid-frame");
    }
    if (r < 0) {
      if (errno == EINTR) continue;
      throw_errno("recv");
    }
    got += static_cast<std::size_t>(r);
  }
  return true;
}

void write_all(int fd, const Bytes& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const auto r = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (r < 0) {
      if (errno == EINTR) continue;
      throw_errno("send");
    }
    sent += static_cast<std::size_t>(r);
  }
}

/// Reads one whole frame, prefix included; empty on a clean close.
Bytes read_frame(int fd) {
  Bytes frame(4);
  if (!read_exact(fd, frame.data(), 4)) return {};
  const auto body = frame_body_length(std::span<const std::uint8_t, 4>(frame.data(), 4));
  if (body < kHeaderSize || body > kMaxFrame) throw DecodeError("bad frame length " + std::to_string(body));
  frame.resize(4 + body);
  if (!read_exact(fd, frame.data() + 4, body)) throw DecodeError("connection closed mid-frame");
  return frame;
}

}  // namespace

Envelope LoopbackTransport::call(const Envelope& request) {
  const auto out = encode_frame(request);
  sent_ += out.size();
  ++calls_;
  const auto back = encode_frame(handler_(decode_frame(out)));
  received_ += back.size();
  return decode_frame(back);
}

TcpTransport::TcpTransport(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const auto service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
    throw std::runtime_error("cannot resolve " + host + ": " + ::gai_strerror(rc));
  }
  for (auto* p = res; p; p = p->ai_next) {
    fd_ = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
    if (fd_ < 0) continue;
    if (::connect(fd_, p->ai_addr, p->ai_addrlen) == 0) break;
    ::close(fd_);
    fd_ = -1;
  }
  ::freeaddrinfo(res);
  if (fd_ < 0) throw std::runtime_error("cannot connect to " + host + ":" + service);
  int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

TcpTransport::~TcpTransport() {
  if (fd_ >= 0) ::close(fd_);
}

Envelope TcpTransport::call(const Envelope& request) {
  std::lock_guard lock(mutex_);
  write_all(fd_, encode_frame(request));
  const auto frame = read_frame(fd_);
  if (frame.empty()) throw std::runtime_error("server closed the connection");
  return decode_frame(frame);
}

TcpServer::TcpServer(Handler handler, std::string bind_address, std::uint16_t port)
    : handler_(std::move(handler)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw_errno("socket");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, bind_address.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw std::invalid_argument("bad IPv4 bind address " + bind_address);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 ||
      ::listen(listen_fd_, 64) < 0) {
    const int e = errno;
    ::close(listen_fd_);
    throw std::system_error(e, std::generic_category(), "bind/listen");
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
}

TcpServer::~TcpServer() { stop(); }

void TcpServer::stop() {
  if (!running_.exchange(false)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  if (acceptor_.joinable()) acceptor_.join();
  std::list<Connection> conns;
  {
    std::lock_guard lock(mutex_);
    for (auto& c : connections_) {
      if (c.fd >= 0) ::shutdown(c.fd, SHUT_RDWR);
    }
    conns.swap(connections_);
  }
  for (auto& c : conns) {
    if (c.worker.joinable()) c.worker.join();
  }
}

void TcpServer::accept_loop() {
  while (running_) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      break;
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    std::lock_guard lock(mutex_);
    if (!running_) {
      ::close(fd);
      break;
    }
    // reap workers that have finished
    for (auto it = connections_.begin(); it != connections_.end();) {
      if (it->fd < 0) {
        it->worker.join();  // already past its last lock release
        it = connections_.erase(it);
      } else {
        ++it;
      }
    }
    connections_.push_back(Connection{fd, std::thread([this, fd] { serve(fd); })});
  }
}

void TcpServer::serve(int fd) {
  try {
    for (;;) {
      Bytes frame;
      try {
        frame = read_frame(fd);
      } catch (const DecodeError& e) {
        write_all(fd, encode_frame(make_error(ErrorCode::BadFrame, e.what(), 0)));
        break;
      }
      if (frame.empty()) break;
      Envelope reply;
      try {
        reply = handler_(decode_frame(frame));
      } catch (const DecodeError& e) {
        write_all(fd, encode_frame(make_error(ErrorCode::BadFrame, e.what(), 0)));
        break;
      }
      write_all(fd, encode_frame(reply));
    }
  } catch (const std::exception&) {
    // peer went away; nothing to report to
  }
  // closed under the lock so stop() never shuts down a reused descriptor
  std::lock_guard lock(mutex_);
  for (auto& c : connections_) {
    if (c.fd == fd) c.fd = -1;
  }
  ::close(fd);
}

}  // namespace ppride::tos
