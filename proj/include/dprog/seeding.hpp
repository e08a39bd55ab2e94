#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dprog {

/// 64-bit FNV-1a over the bytes of `label`.
constexpr std::uint64_t fnv1a64(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Per-consumer stream seed: mix64(master ^ mix64(fnv1a64(label))).
/// Labels look like "sim/blue/low" or "hmc/pink/M40"; streams for different
/// labels are independent of each other and of how many labels exist.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
  return mix64(master ^ mix64(fnv1a64(label)));
}

using Rng = std::mt19937_64;

}  // namespace dprog
