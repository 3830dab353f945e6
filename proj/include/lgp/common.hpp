#pragma once

// Shared basics: integer ids, error types, seeding helpers, FNV-1a hashing.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lgp {

using SiteId = int32_t;
inline constexpr SiteId kNoSite = -1;

// Players are seats, numbered from 1. 0 means "nobody" (empty / draw).
using Player = int;

// A caller broke an API contract (e.g. asked for moves in a terminal state).
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

// Bad game description, bad configuration, unsupported combination.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File I/O or serialization failure (missing file, corrupt checkpoint, ...).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 64-bit FNV-1a. Used for layout fingerprints and checkpoint integrity.
inline uint64_t fnv1a64(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t fnv1a64(const std::string& s, uint64_t h = 0xcbf29ce484222325ull) {
  return fnv1a64(s.data(), s.size(), h);
}

// Deterministic seed derivation: fold extra words into a base seed so that
// (game, ply), (worker, counter) etc. get independent, reproducible streams.
inline uint64_t mix_seed(uint64_t a, uint64_t b) {
  uint64_t x = a + 0x9e3779b97f4a7c15ull + (b << 6) + (b >> 2);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

inline uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c) {
  return mix_seed(mix_seed(a, b), c);
}

}  // namespace lgp
