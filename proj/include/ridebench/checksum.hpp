#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace ridebench {

// FNV-1a 64-bit. Used for artifact manifests and for the parameter-state
// audits in the runner (leak detection), not for security.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  return fnv1a64(s.data(), s.size());
}

inline std::uint64_t fnv1a64(const std::vector<double>& v,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  return fnv1a64(v.data(), v.size() * sizeof(double), h);
}

std::uint64_t fnv1a64_file(const std::string& path);

std::string checksum_hex(std::uint64_t h);

}  // namespace ridebench
