#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <list>
#include <mutex>
#include <string>
#include <thread>

#include "ppride/tos/wire.hpp"

namespace ppride::tos {

using Handler = std::function<Envelope(const Envelope&)>;

/// One request, one response.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual Envelope call(const Envelope& request) = 0;
};

/// In-process transport that still encodes and decodes every frame, so byte
/// counts match what a socket would carry.
class LoopbackTransport : public Transport {
 public:
  explicit LoopbackTransport(Handler handler) : handler_(std::move(handler)) {}

  Envelope call(const Envelope& request) override;

  std::uint64_t bytes_sent() const { return sent_; }
  std::uint64_t bytes_received() const { return received_; }
  std::uint64_t calls() const { return calls_; }

 private:
  Handler handler_;
  std::atomic<std::uint64_t> sent_{0}, received_{0}, calls_{0};
};

/// Blocking client over one TCP connection. Calls are serialized.
class TcpTransport : public Transport {
 public:
  TcpTransport(const std::string& host, std::uint16_t port);
  ~TcpTransport() override;
  TcpTransport(const TcpTransport&) = delete;
  TcpTransport& operator=(const TcpTransport&) = delete;

  Envelope call(const Envelope& request) override;

 private:
  std::mutex mutex_;
  int fd_ = -1;
};

/// Thread-per-connection frame server. A malformed frame gets a BadFrame
/// error and the connection is closed.
class TcpServer {
 public:
  TcpServer(Handler handler, std::string bind_address = "127.0.0.1", std::uint16_t port = 0);
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  /// Bound port; useful when constructed with port 0.
  std::uint16_t port() const { return port_; }
  void stop();

 private:
  struct Connection {
    int fd;
    std::thread worker;
  };

  void accept_loop();
  void serve(int fd);

  Handler handler_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::thread acceptor_;
  std::mutex mutex_;
  std::list<Connection> connections_;
};

}  // namespace ppride::tos
