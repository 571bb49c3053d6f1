#pragma once

#include <filesystem>
#include <iosfwd>

#include "ppride/common/bytes.hpp"
#include "ppride/knn/keys.hpp"

namespace ppride::knn {

// User key file layout, all little-endian:
//   "KNN1" | role u8 | dim u32 | part count u32 (= 8) | fingerprint u64
//   | split vector (dim bytes, 0/1) | 8 x (dim x dim f64, row-major)
inline constexpr char kKeyFileMagic[4] = {'K', 'N', 'N', '1'};

void write_user_keys(ByteWriter& out, const UserKeySet& keys);
UserKeySet read_user_keys(ByteReader& in);

void save_user_keys(const std::filesystem::path& path, const UserKeySet& keys);
UserKeySet load_user_keys(const std::filesystem::path& path);

// Authority file: "KNM1" | m u32 | n u32 | then for NRS and TRS masters:
// split bytes, M1, M2, N1..N8 (f64 row-major), then X, Y, W, Z.
// Inverses are recomputed on load.
void save_master_keys(const std::filesystem::path& path, const MasterKeys& keys);
MasterKeys load_master_keys(const std::filesystem::path& path);

}  // namespace ppride::knn
