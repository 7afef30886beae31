#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pgb {

using NodeId = std::int32_t;

// Input or configuration rejected before any work happened (CLI exit 1).
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Problem size exceeds a solver guard (CLI exit 2).
class guard_error : public std::runtime_error {
 public:
  explicit guard_error(const std::string& msg) : std::runtime_error(msg) {}
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stable label-keyed sub-seed so pipeline stages draw from independent
// streams and inserting a stage never shifts another stage's randomness.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
  for (unsigned char c : label) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return splitmix64(master ^ h);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64(seed ^ splitmix64(salt));
}

}  // namespace pgb
