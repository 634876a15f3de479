// Serial oracle vs single-thread engine vs band-parallel engine on one image.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "tmf/imaging.hpp"
#include "tmf/oracle.hpp"

namespace {

tmf::Image make_image(int width, int height) {
  std::mt19937 rng(42);
  std::uniform_int_distribution<int> dist(0, 255);
  tmf::Image img;
  img.width = width;
  img.height = height;
  img.bits = 8;
  img.pixels.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  for (auto& p : img.pixels) p = static_cast<tmf::Sample>(dist(rng));
  return img;
}

const tmf::Image& image() {
  static const tmf::Image img = make_image(256, 192);
  return img;
}

void BM_Oracle(benchmark::State& state) {
  const auto shape = tmf::WindowShape::parse("5x5");
  for (auto _ : state) {
    benchmark::DoNotOptimize(tmf::oracle::filter_image_oracle(image(), shape, 13, tmf::Border::Clamp));
  }
}

void BM_Engine(benchmark::State& state) {
  const auto shape = tmf::WindowShape::parse("5x5");
  tmf::FilterOptions o;
  o.rank = 13;
  o.engine = static_cast<tmf::EngineKind>(state.range(0));
  o.threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(tmf::filter_image(image(), shape, o));
  }
  state.counters["threads"] = static_cast<double>(o.threads);
}

void engine_args(benchmark::internal::Benchmark* b) {
  const int max_threads = omp_get_max_threads();
  for (int kind = 0; kind < 3; ++kind) {
    b->Args({kind, 1});
    if (max_threads > 1) b->Args({kind, max_threads});
  }
}

}  // namespace

BENCHMARK(BM_Oracle)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Engine)->Apply(engine_args)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
