#pragma once

// Deterministic randomness helpers. std::mt19937_64 is fully specified by the
// standard, so raw draws are identical on every platform; the standard
// *distributions* are not, so all mappings from raw draws to values live here.

#include <cstdint>
#include <random>

namespace ifslab {

/// splitmix64 step; used to derive independent substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// k-th derived seed of a master seed (k = 0, 1, ...), stateless.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t k) {
  std::uint64_t s = master ^ (0x9e3779b97f4a7c15ULL * (k + 1));
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  return a ^ (b << 1);
}

/// Uniform double in [0, 1) with 53 random bits; portable and exact.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform_in(std::mt19937_64& gen, double lo, double hi) {
  return lo + uniform01(gen) * (hi - lo);
}

/// Uniform integer in [0, n); n > 0. Multiply-shift, bias < 2^-53, portable.
inline std::size_t uniform_index(std::mt19937_64& gen, std::size_t n) {
  return static_cast<std::size_t>(uniform01(gen) * static_cast<double>(n)) % n;
}

/// FNV-1a 64-bit hash of a byte string; used for config hashes and goldens.
inline std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace ifslab
