#pragma once

#include <random>
#include <vector>

#include "tmf/imaging.hpp"

namespace tmf::test {

inline std::vector<Sample> random_samples(std::mt19937& rng, std::size_t n, int bits) {
  std::uniform_int_distribution<int> dist(0, (1 << bits) - 1);
  std::vector<Sample> v(n);
  for (auto& x : v) x = static_cast<Sample>(dist(rng));
  return v;
}

/// Samples drawn from a handful of values so duplicates are common.
inline std::vector<Sample> clumped_samples(std::mt19937& rng, std::size_t n, int bits) {
  const auto palette = random_samples(rng, 3, bits);
  std::uniform_int_distribution<std::size_t> pick(0, palette.size() - 1);
  std::vector<Sample> v(n);
  for (auto& x : v) x = palette[pick(rng)];
  return v;
}

inline Image random_image(std::mt19937& rng, int w, int h, int bits = 8) {
  Image img(w, h, bits);
  img.pixels = random_samples(rng, img.pixels.size(), bits);
  return img;
}

}  // namespace tmf::test
