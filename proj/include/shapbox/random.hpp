#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "shapbox/error.hpp"

namespace shapbox {

/// Uniform draw from [0, bound) by rejection, spelled out here so results
/// depend only on the mt19937_64 stream and never on a standard library's
/// unspecified distribution internals.
inline std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw Error("draw_below requires a positive bound");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  while (true) {
    const std::uint64_t raw = rng();
    if (raw < limit) return raw % bound;
  }
}

/// Deterministic Fisher-Yates shuffle driven by draw_below.
template <class T>
void deterministic_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i)
    std::swap(items[i - 1], items[draw_below(rng, i)]);
}

/// The first `count` entries of a shuffled [0, n) index range: a uniform
/// sample without replacement, in draw order.
inline std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count,
                                                           std::mt19937_64& rng) {
  if (count > n) throw Error("sample_without_replacement: count exceeds population");
  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  // Partial Fisher-Yates: position i receives a uniform choice from [i, n).
  for (std::size_t i = 0; i < count; ++i)
    std::swap(indices[i], indices[i + draw_below(rng, n - i)]);
  indices.resize(count);
  return indices;
}

}  // namespace shapbox
