#include <doctest.h>

#include <random>

#include "support.hpp"
#include "tmf/multichannel.hpp"
#include "tmf/oracle.hpp"

using namespace tmf;

TEST_CASE("encode3 counts asserted inputs") {
  CHECK(encode3(false, false, false) == 0);
  CHECK(encode3(true, false, true) == 2);
  CHECK(encode3(true, true, true) == 3);
}

TEST_CASE("mc_incgen examples") {
  const std::vector<Sample> full(9, 255);
  auto inc = mc_incgen(full, {0, 0}, 8);
  CHECK(inc.inc3 == 9);
  CHECK(inc.inc2 == 9);
  CHECK(inc.inc1 == 9);

  const std::vector<Sample> mixed = {0, 64, 128, 192, 0, 0, 0, 0, 0};
  inc = mc_incgen(mixed, {0, 0}, 8);
  CHECK(inc.inc3 == 1);
  CHECK(inc.inc2 == 2);
  CHECK(inc.inc1 == 3);

  const std::vector<Sample> three = {100, 150, 200};
  inc = mc_incgen(three, {128, 2}, 8);
  CHECK(inc.inc3 == 1);
  CHECK(inc.inc2 == 1);
  CHECK(inc.inc1 == 2);
}

TEST_CASE("encoder/adder structure equals direct popcount, exhaustively for small K") {
  // 4-bit samples, all columns for K <= 4; every prefix of stage 0 and 1
  for (int k = 1; k <= 4; ++k) {
    const int total = 1 << (4 * k);
    std::vector<Sample> col(static_cast<std::size_t>(k));
    for (int code = 0; code < total; ++code) {
      for (int i = 0; i < k; ++i) col[static_cast<std::size_t>(i)] = static_cast<Sample>((code >> (4 * i)) & 15);
      for (std::uint32_t prefix = 0; prefix < 16; prefix += 4) {
        for (const PartialMedian pm : {PartialMedian{0, 0}, PartialMedian{prefix, 2}}) {
          const auto a = mc_incgen(col, pm, 4);
          const auto b = popcount_incgen(col, pm, 4);
          CHECK(a.inc3 == b.inc3);
          CHECK(a.inc2 == b.inc2);
          CHECK(a.inc1 == b.inc1);
          CHECK(a.inc1 >= a.inc2);
          CHECK(a.inc2 >= a.inc3);
        }
      }
    }
  }
  std::mt19937 rng(7);
  for (int k = 5; k <= 9; ++k) {
    for (int trial = 0; trial < 2000; ++trial) {
      const auto col = test::random_samples(rng, static_cast<std::size_t>(k), 8);
      const PartialMedian pm{static_cast<std::uint32_t>(std::uniform_int_distribution<int>(0, 3)(rng) * 64), 2};
      const auto a = mc_incgen(col, pm, 8);
      const auto b = popcount_incgen(col, pm, 8);
      CHECK(a.inc3 == b.inc3);
      CHECK(a.inc2 == b.inc2);
      CHECK(a.inc1 == b.inc1);
    }
  }
}

TEST_CASE("9x11 windows with M=31 and M=50") {
  std::mt19937 rng(11);
  McParams p;
  p.channels = 9;
  p.columns = 11;
  const auto data = test::random_samples(rng, 99 * 3, 8);
  for (int m : {31, 50}) {
    p.rank = m;
    const auto got = run_columns(p, data);
    REQUIRE(got.size() == 3);
    for (std::size_t w = 0; w < 3; ++w) {
      CHECK(got[w] == oracle::select_desc(std::span(data).subspan(w * 99, 99), m));
    }
  }
}

TEST_CASE("windows are order-independent: flattening through the core engine agrees") {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const int k = std::uniform_int_distribution<int>(1, 9)(rng);
    const int cw = std::uniform_int_distribution<int>(1, 12)(rng);
    const int n = k * cw;
    const int m = std::uniform_int_distribution<int>(1, n)(rng);
    McParams mp;
    mp.channels = k;
    mp.columns = cw;
    mp.rank = m;
    mp.counter_bits = std::max(8, required_counter_bits(n, m));
    const auto data = test::random_samples(rng, static_cast<std::size_t>(n * 2), 8);
    FilterParams fp;
    fp.set_size = n;
    fp.rank = m;
    fp.counter_bits = mp.counter_bits;
    CHECK(run_columns(mp, data) == run_stream(fp, data));
  }
}

TEST_CASE("K=1 multi-channel engine is cycle-for-cycle identical to the core engine") {
  std::mt19937 rng(13);
  McParams mp;
  mp.channels = 1;
  mp.columns = 25;
  mp.rank = 13;
  FilterParams fp;
  fp.set_size = 25;
  fp.rank = 13;
  McEngine mc(mp);
  Engine core(fp);
  const auto data = test::random_samples(rng, 25 * 6, 8);
  for (std::size_t i = 0; i < data.size() + 200; ++i) {
    const bool in = i < data.size();
    const Sample x = in ? data[i] : 0;
    const bool first = in && i % 25 == 0;
    const Sample col[1] = {x};
    const auto a = mc.clock(col, first);
    const auto b = core.clock(x, first);
    REQUIRE(a.dv == b.dv);
    REQUIRE(a.dout[0] == b.dout);
    REQUIRE(a.dout_first == b.dout_first);
    if (a.dv) REQUIRE(a.result == b.result);
  }
  CHECK(mc.comparisons() == core.comparisons());
}

TEST_CASE("multi-channel throughput: one result per window of columns") {
  std::mt19937 rng(14);
  McParams p;
  p.channels = 9;
  p.columns = 9;
  p.rank = 41;
  McEngine e(p);
  const auto data = test::random_samples(rng, 81 * 5, 8);
  std::vector<std::uint64_t> pulses;
  std::vector<Sample> col(9);
  for (std::size_t c = 0; c < 45 + static_cast<std::size_t>(e.drain_cycles()); ++c) {
    std::fill(col.begin(), col.end(), 0);
    if (c < 45) std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(c * 9), 9, col.begin());
    const auto cycle = e.cycle();
    if (e.clock(col, c < 45 && c % 9 == 0).dv) pulses.push_back(cycle);
  }
  REQUIRE(pulses.size() == 5);
  for (std::size_t i = 1; i < pulses.size(); ++i) CHECK(pulses[i] - pulses[i - 1] == 9);
}

TEST_CASE("multi-channel framing and shape errors") {
  McParams p;
  p.channels = 3;
  p.columns = 4;
  p.rank = 6;
  McEngine e(p);
  const std::vector<Sample> col = {1, 2, 3};
  e.clock(col, true);
  CHECK_THROWS_AS(e.clock(col, true), FramingError);
  CHECK_THROWS_AS(e.clock(std::vector<Sample>{1, 2}, false), ConfigError);
  p.rank = 13;
  CHECK_THROWS_AS(McEngine{p}, ConfigError);
}
