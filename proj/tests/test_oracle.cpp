#include <doctest.h>

#include <algorithm>
#include <random>

#include "support.hpp"
#include "tmf/oracle.hpp"

using namespace tmf;
using oracle::select_desc;

TEST_CASE("select_desc examples") {
  CHECK(select_desc(std::vector<Sample>{5}, 1) == 5);
  CHECK(select_desc(std::vector<Sample>{7, 7, 3}, 2) == 7);
  CHECK(select_desc(std::vector<Sample>{3, 1, 4, 1, 5, 9, 2, 6, 5}, 5) == 4);
  CHECK_THROWS_AS(select_desc(std::vector<Sample>{1, 2}, 3), ConfigError);
  CHECK_THROWS_AS(select_desc(std::vector<Sample>{1, 2}, 0), ConfigError);
}

TEST_CASE("select_desc properties") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 40)(rng);
    auto data = test::clumped_samples(rng, n, 8);
    CHECK(select_desc(data, 1) == *std::max_element(data.begin(), data.end()));
    CHECK(select_desc(data, static_cast<int>(n)) == *std::min_element(data.begin(), data.end()));
    for (int m = 1; m < static_cast<int>(n); ++m) CHECK(select_desc(data, m) >= select_desc(data, m + 1));
    const int m = std::uniform_int_distribution<int>(1, static_cast<int>(n))(rng);
    const Sample before = select_desc(data, m);
    std::shuffle(data.begin(), data.end(), rng);
    CHECK(select_desc(data, m) == before);
  }
}

TEST_CASE("oracle filter on degenerate images") {
  Image flat(8, 6, 8, 99);
  CHECK(oracle::filter_image_oracle(flat, WindowShape::rect(3, 3), 5, Border::Clamp) == flat);

  Image row(7, 1, 8);
  row.pixels = {4, 9, 1, 7, 7, 2, 8};
  const Image one = oracle::filter_image_oracle(row, WindowShape::rect(7, 1), 3, Border::ValidOnly);
  CHECK(one.width == 1);
  CHECK(one.height == 1);
  CHECK(one.pixels[0] == select_desc(row.pixels, 3));
}
