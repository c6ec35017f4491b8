#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace winsim {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from a base seed and a tuple of
/// indices (trial, frame, purpose, ...). Order of the indices matters.
constexpr std::uint64_t derive_seed(std::uint64_t base,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t s = mix64(base);
  for (std::uint64_t v : path) s = mix64(s ^ mix64(v + 0x632be59bd9b4e019ULL));
  return s;
}

}  // namespace winsim
