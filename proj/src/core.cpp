#include "tmf/core.hpp"

#include <algorithm>
#include <cassert>

namespace tmf {

PartialMedian PartialMedian::extend(unsigned two_bits, int data_bits) const {
  if (bits_resolved + 2 > data_bits) {
    throw ContractError("partial median already fully resolved");
  }
  const int shift = data_bits - bits_resolved - 2;
  return {prefix | ((two_bits & 3u) << shift), bits_resolved + 2};
}

Boundaries boundaries(PartialMedian pm, int data_bits) {
  if (pm.bits_resolved > data_bits - 2) {
    throw ContractError("no boundaries for a fully resolved partial median");
  }
  const std::uint32_t quarter = 1u << (data_bits - pm.bits_resolved - 2);
  return {pm.prefix + quarter, pm.prefix + 2 * quarter, pm.prefix + 3 * quarter};
}

GeFlags incgen(Sample x, PartialMedian pm, int data_bits) {
  const Boundaries b = boundaries(pm, data_bits);
  return {x >= b.b3, x >= b.b2, x >= b.b1};
}

std::uint32_t counter_preset(int rank, int counter_bits) {
  if (counter_bits < 2 || counter_bits > 31) {
    throw ConfigError("counter width must be in [2, 31]");
  }
  const std::uint32_t half = 1u << (counter_bits - 1);
  if (rank < 1 || static_cast<std::uint32_t>(rank) > half) {
    throw ConfigError("rank " + std::to_string(rank) + " outside [1, " + std::to_string(half) + "]");
  }
  return half - static_cast<std::uint32_t>(rank);
}

unsigned refine(bool msb3, bool msb2, bool msb1) {
  if (msb3) return 3;
  if (msb2) return 2;
  if (msb1) return 1;
  return 0;
}

StageCounters::StageCounters(int counter_bits, std::uint32_t preset)
    : bits_(counter_bits),
      mask_(counter_bits >= 32 ? ~0u : (1u << counter_bits) - 1),
      preset_(preset & mask_),
      qc3_(preset_),
      qc2_(preset_),
      qc1_(preset_) {}

void StageCounters::add(Increments inc) {
  qc3_ = (qc3_ + static_cast<std::uint32_t>(inc.inc3)) & mask_;
  qc2_ = (qc2_ + static_cast<std::uint32_t>(inc.inc2)) & mask_;
  qc1_ = (qc1_ + static_cast<std::uint32_t>(inc.inc1)) & mask_;
}

Stage::Stage(const StageConfig& cfg)
    : cfg_(cfg),
      counters_(cfg.counter_bits, counter_preset(cfg.rank, cfg.counter_bits)),
      delay_line_(static_cast<std::size_t>(cfg.latency)) {
  if (cfg.positions_per_set < 1) {
    throw ConfigError("a data set needs at least one position");
  }
}

std::optional<PartialMedian> Stage::delay(std::optional<PartialMedian> in) {
  if (in) {
    // the sign bits must form a thermometer code once a set is complete
    assert(!(counters_.msb3() && !counters_.msb2()) && !(counters_.msb2() && !counters_.msb1()));
  }
  if (delay_line_.empty()) {
    return in;
  }
  std::optional<PartialMedian> out = delay_line_[delay_head_];
  delay_line_[delay_head_] = in;
  delay_head_ = (delay_head_ + 1) % delay_line_.size();
  return out;
}

DataPipe::DataPipe(int pipes, int depth, int lanes)
    : pipes_(pipes),
      depth_(depth),
      lanes_(lanes),
      words_(static_cast<std::size_t>(pipes) * depth * lanes, 0),
      flags_(static_cast<std::size_t>(pipes) * depth, 0),
      taps_(static_cast<std::size_t>(pipes + 1) * lanes, 0),
      tap_flags_(static_cast<std::size_t>(pipes + 1), 0) {
  if (pipes < 0 || depth < 1 || lanes < 1) {
    throw ConfigError("data pipe needs positive depth and lane count");
  }
}

void DataPipe::clock(std::span<const Sample> data, std::uint8_t flags) {
  assert(data.size() == static_cast<std::size_t>(lanes_));
  const auto lanes = static_cast<std::size_t>(lanes_);
  std::copy(data.begin(), data.end(), taps_.begin());
  tap_flags_[0] = flags;
  for (std::size_t k = 0; k < static_cast<std::size_t>(pipes_); ++k) {
    const std::size_t word = k * static_cast<std::size_t>(depth_) + address_;
    Sample* cell = words_.data() + word * lanes;
    Sample* in = taps_.data() + k * lanes;
    Sample* out = taps_.data() + (k + 1) * lanes;
    // read-before-write at the shared address gives a delay of exactly `depth`
    for (std::size_t i = 0; i < lanes; ++i) {
      out[i] = cell[i];
      cell[i] = in[i];
    }
    tap_flags_[k + 1] = flags_[word];
    flags_[word] = tap_flags_[k];
  }
  address_ = (address_ + 1) % static_cast<std::size_t>(depth_);
}

namespace {

std::vector<Stage> make_stages(const FilterParams& p, int positions) {
  std::vector<Stage> stages;
  stages.reserve(static_cast<std::size_t>(p.stages()));
  for (int s = 0; s < p.stages(); ++s) {
    stages.emplace_back(StageConfig{s, p.data_bits, positions, p.rank, p.counter_bits, p.pipe_latency});
  }
  return stages;
}

const FilterParams& validated(const FilterParams& p) {
  p.validate();
  return p;
}

}  // namespace

Engine::Engine(const FilterParams& params)
    : params_(validated(params)),
      stages_(make_stages(params_, params_.set_size)),
      held_(static_cast<std::size_t>(params_.stages())),
      pipe_(params_.stages(), params_.pipe_depth(), 1) {}

CycleOutput Engine::clock(Sample din, bool d1st) {
  if ((static_cast<std::uint32_t>(din) >> params_.data_bits) != 0) {
    throw ConfigError("sample " + std::to_string(din) + " does not fit in " +
                      std::to_string(params_.data_bits) + " bits");
  }
  CycleOutput out;
  out.dv = result_ready_;
  out.result = result_;
  result_ready_ = false;

  const Sample word[1] = {din};
  pipe_.clock(word, d1st ? kFirst : 0);
  if (d1st) ++in_flight_;

  const int last = params_.stages() - 1;
  // later stages first, so each stage sees its upstream register as of the previous cycle
  for (int s = last; s >= 0; --s) {
    const Sample x = pipe_.tap_data(s)[0];
    const bool first = pipe_.tap_flags(s) & kFirst;
    const PartialMedian upstream = s == 0 ? PartialMedian{} : held_[static_cast<std::size_t>(s - 1)];
    auto done = stages_[static_cast<std::size_t>(s)].clock(first, upstream, [&](PartialMedian pm) {
      comparisons_ += 3;
      const GeFlags g = incgen(x, pm, params_.data_bits);
      return Increments{g.ge3, g.ge2, g.ge1};
    });
    if (done) {
      held_[static_cast<std::size_t>(s)] = *done;
      if (s == last) {
        result_ = static_cast<Sample>(done->prefix);
        result_ready_ = true;
        --in_flight_;
      }
    }
  }

  out.dout = pipe_.tap_data(params_.stages())[0];
  out.dout_first = pipe_.tap_flags(params_.stages()) & kFirst;
  ++cycle_;
  return out;
}

void Engine::reconfigure(int set_size, int rank) {
  if (!idle()) {
    throw ConfigError("set size and rank can only change between sets, with the engine drained");
  }
  FilterParams next = params_;
  next.set_size = set_size;
  next.rank = rank;
  next.validate();
  params_ = next;
  stages_ = make_stages(params_, params_.set_size);
  std::fill(held_.begin(), held_.end(), PartialMedian{});
  pipe_ = DataPipe(params_.stages(), params_.pipe_depth(), 1);
}

std::vector<Sample> run_stream(const FilterParams& params, std::span<const Sample> data) {
  Engine engine(params);
  const auto n = static_cast<std::size_t>(params.set_size);
  if (data.size() % n != 0) {
    throw FramingError("stream length " + std::to_string(data.size()) +
                       " is not a multiple of the set size " + std::to_string(n));
  }
  std::vector<Sample> results;
  results.reserve(data.size() / n);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const CycleOutput o = engine.clock(data[i], i % n == 0);
    if (o.dv) results.push_back(o.result);
  }
  if (!data.empty()) {
    for (int i = 0; i < engine.drain_cycles(); ++i) {
      const CycleOutput o = engine.clock(0, false);
      if (o.dv) results.push_back(o.result);
    }
  }
  return results;
}

std::uint64_t comparison_count(const FilterParams& params, std::uint64_t num_sets) {
  return 3ull * static_cast<std::uint64_t>(params.set_size) *
         static_cast<std::uint64_t>(params.stages()) * num_sets;
}

}  // namespace tmf
