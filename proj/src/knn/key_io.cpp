#include "ppride/knn/key_io.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "ppride/knn/matrix.hpp"

namespace ppride::knn {

namespace {

constexpr char kMasterMagic[4] = {'K', 'N', 'M', '1'};

void put_matrix(ByteWriter& out, const Eigen::MatrixXd& a) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.put(a(i, j));
  }
}

Eigen::MatrixXd get_matrix(ByteReader& in, std::size_t dim) {
  if (in.remaining() / sizeof(double) / dim < dim) throw DecodeError("truncated matrix");
  Eigen::MatrixXd a(dim, dim);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = in.get<double>();
  }
  return a;
}

BitVector get_bits(ByteReader& in, std::size_t dim) {
  auto raw = in.get_bytes(dim);
  BitVector bits(raw.begin(), raw.end());
  for (auto b : bits) {
    if (b > 1) throw DecodeError("split vector entry is not 0/1");
  }
  return bits;
}

Eigen::MatrixXd inverse_of(const Eigen::MatrixXd& a) {
  return Eigen::PartialPivLU<Eigen::MatrixXd>(a).inverse();
}

template <Scheme S>
void put_master(ByteWriter& out, const MasterKey<S>& key) {
  out.put_bytes(key.split);
  for (const auto& a : key.outer) put_matrix(out, a);
  for (const auto& a : key.inner) put_matrix(out, a);
}

template <Scheme S>
MasterKey<S> get_master(ByteReader& in, std::size_t dim) {
  MasterKey<S> key;
  key.split = get_bits(in, dim);
  for (std::size_t i = 0; i < 2; ++i) {
    key.outer[i] = get_matrix(in, dim);
    key.outer_inv[i] = inverse_of(key.outer[i]);
  }
  for (std::size_t i = 0; i < 8; ++i) {
    key.inner[i] = get_matrix(in, dim);
    key.inner_inv[i] = inverse_of(key.inner[i]);
  }
  return key;
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, const Bytes& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void expect_magic(ByteReader& in, const char (&magic)[4]) {
  auto m = in.get_bytes(4);
  if (std::memcmp(m.data(), magic, 4) != 0) throw DecodeError("bad key file magic");
}

}  // namespace

void write_user_keys(ByteWriter& out, const UserKeySet& keys) {
  out.put_bytes(std::span(reinterpret_cast<const std::uint8_t*>(kKeyFileMagic), 4));
  out.put(static_cast<std::uint8_t>(keys.role()));
  out.put(static_cast<std::uint32_t>(keys.dim()));
  out.put(static_cast<std::uint32_t>(UserKeySet::kParts));
  out.put(keys.fingerprint());
  out.put_bytes(keys.split());
  for (const auto& p : keys.parts()) put_matrix(out, p);
}

UserKeySet read_user_keys(ByteReader& in) {
  expect_magic(in, kKeyFileMagic);
  const Role role = role_from_byte(in.get<std::uint8_t>());
  const auto dim = in.get<std::uint32_t>();
  const auto count = in.get<std::uint32_t>();
  if (count != UserKeySet::kParts) throw DecodeError("key file must hold exactly 8 parts");
  if (dim == 0) throw DecodeError("key file dimension is zero");
  const auto fingerprint = in.get<std::uint64_t>();
  BitVector split = get_bits(in, dim);
  UserKeySet::Parts parts;
  for (auto& p : parts) p = get_matrix(in, dim);
  return UserKeySet(role, std::move(parts), std::move(split), fingerprint);
}

void save_user_keys(const std::filesystem::path& path, const UserKeySet& keys) {
  ByteWriter out;
  write_user_keys(out, keys);
  write_file(path, out.bytes());
}

UserKeySet load_user_keys(const std::filesystem::path& path) {
  const Bytes bytes = read_file(path);
  ByteReader in(bytes);
  auto keys = read_user_keys(in);
  in.expect_done();
  return keys;
}

void save_master_keys(const std::filesystem::path& path, const MasterKeys& keys) {
  ByteWriter out;
  out.put_bytes(std::span(reinterpret_cast<const std::uint8_t*>(kMasterMagic), 4));
  out.put(static_cast<std::uint32_t>(keys.nrs.dim()));
  out.put(static_cast<std::uint32_t>(keys.trs.dim()));
  put_master(out, keys.nrs);
  put_master(out, keys.trs);
  for (const auto* a : {&keys.tos.x, &keys.tos.y, &keys.tos.w, &keys.tos.z}) put_matrix(out, *a);
  write_file(path, out.bytes());
}

MasterKeys load_master_keys(const std::filesystem::path& path) {
  const Bytes bytes = read_file(path);
  ByteReader in(bytes);
  expect_magic(in, kMasterMagic);
  const auto m = in.get<std::uint32_t>();
  const auto n = in.get<std::uint32_t>();
  if (m == 0 || n == 0) throw DecodeError("master key file dimension is zero");
  MasterKeys keys;
  keys.nrs = get_master<Scheme::Nrs>(in, m);
  keys.trs = get_master<Scheme::Trs>(in, n);
  auto& t = keys.tos;
  t.x = get_matrix(in, m);
  t.y = get_matrix(in, m);
  t.w = get_matrix(in, n);
  t.z = get_matrix(in, n);
  t.x_inv = inverse_of(t.x);
  t.y_inv = inverse_of(t.y);
  t.w_inv = inverse_of(t.w);
  t.z_inv = inverse_of(t.z);
  in.expect_done();
  return keys;
}

}  // namespace ppride::knn
