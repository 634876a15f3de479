#include "tmf/multichannel.hpp"

#include <string>

namespace tmf {

void McParams::validate() const {
  if (channels < 1 || columns < 1) {
    throw ConfigError("multi-channel engine needs at least one channel and one column");
  }
  if (data_bits < 2 || data_bits > kMaxDataBits || data_bits % 2 != 0) {
    throw ConfigError("data width must be even and in [2, 16], got " + std::to_string(data_bits));
  }
  if (pipe_latency < 0 || columns > pipe_capacity - pipe_latency) {
    throw ConfigError("window of " + std::to_string(columns) + " columns exceeds pipe capacity");
  }
  validate_counter_range(set_size(), rank, counter_bits);
}

unsigned encode3(bool b2, bool b1, bool b0) {
  return static_cast<unsigned>(b2) + static_cast<unsigned>(b1) + static_cast<unsigned>(b0);
}

namespace {

// Encoders per triple of comparison bits, then an adder over the 2-bit counts.
int encoded_count(std::span<const Sample> column, std::uint32_t boundary) {
  int sum = 0;
  for (std::size_t i = 0; i < column.size(); i += 3) {
    const bool b0 = column[i] >= boundary;
    const bool b1 = i + 1 < column.size() && column[i + 1] >= boundary;
    const bool b2 = i + 2 < column.size() && column[i + 2] >= boundary;
    sum += static_cast<int>(encode3(b2, b1, b0));
  }
  return sum;
}

}  // namespace

Increments mc_incgen(std::span<const Sample> column, PartialMedian pm, int data_bits) {
  const Boundaries b = boundaries(pm, data_bits);
  return {encoded_count(column, b.b3), encoded_count(column, b.b2), encoded_count(column, b.b1)};
}

Increments popcount_incgen(std::span<const Sample> column, PartialMedian pm, int data_bits) {
  const Boundaries b = boundaries(pm, data_bits);
  Increments inc;
  for (Sample x : column) {
    inc.inc3 += x >= b.b3;
    inc.inc2 += x >= b.b2;
    inc.inc1 += x >= b.b1;
  }
  return inc;
}

namespace {

const McParams& validated(const McParams& p) {
  p.validate();
  return p;
}

std::vector<Stage> make_stages(const McParams& p) {
  std::vector<Stage> stages;
  for (int s = 0; s < p.stages(); ++s) {
    stages.emplace_back(StageConfig{s, p.data_bits, p.columns, p.rank, p.counter_bits, p.pipe_latency});
  }
  return stages;
}

}  // namespace

McEngine::McEngine(const McParams& params)
    : params_(validated(params)),
      stages_(make_stages(params_)),
      held_(static_cast<std::size_t>(params_.stages())),
      pipe_(params_.stages(), params_.pipe_depth(), params_.channels) {}

McCycleOutput McEngine::clock(std::span<const Sample> column, bool d1st) {
  if (column.size() != static_cast<std::size_t>(params_.channels)) {
    throw ConfigError("column has " + std::to_string(column.size()) + " samples, engine has " +
                      std::to_string(params_.channels) + " channels");
  }
  for (Sample x : column) {
    if ((static_cast<std::uint32_t>(x) >> params_.data_bits) != 0) {
      throw ConfigError("sample " + std::to_string(x) + " does not fit in " +
                        std::to_string(params_.data_bits) + " bits");
    }
  }
  McCycleOutput out;
  out.dv = result_ready_;
  out.result = result_;
  result_ready_ = false;

  pipe_.clock(column, d1st ? kFirst : 0);

  const int last = params_.stages() - 1;
  for (int s = last; s >= 0; --s) {
    const auto data = pipe_.tap_data(s);
    const bool first = pipe_.tap_flags(s) & kFirst;
    const PartialMedian upstream = s == 0 ? PartialMedian{} : held_[static_cast<std::size_t>(s - 1)];
    auto done = stages_[static_cast<std::size_t>(s)].clock(first, upstream, [&](PartialMedian pm) {
      comparisons_ += 3ull * data.size();
      return mc_incgen(data, pm, params_.data_bits);
    });
    if (done) {
      held_[static_cast<std::size_t>(s)] = *done;
      if (s == last) {
        result_ = static_cast<Sample>(done->prefix);
        result_ready_ = true;
      }
    }
  }

  out.dout = pipe_.tap_data(params_.stages());
  out.dout_first = pipe_.tap_flags(params_.stages()) & kFirst;
  ++cycle_;
  return out;
}

std::vector<Sample> run_columns(const McParams& params, std::span<const Sample> columns) {
  McEngine engine(params);
  const auto k = static_cast<std::size_t>(params.channels);
  const auto window = k * static_cast<std::size_t>(params.columns);
  if (columns.size() % window != 0) {
    throw FramingError("column stream does not divide into whole windows");
  }
  std::vector<Sample> results;
  const std::size_t ncols = columns.size() / k;
  for (std::size_t c = 0; c < ncols; ++c) {
    const auto o = engine.clock(columns.subspan(c * k, k), c % static_cast<std::size_t>(params.columns) == 0);
    if (o.dv) results.push_back(o.result);
  }
  if (ncols > 0) {
    const std::vector<Sample> idle(k, 0);
    for (int i = 0; i < engine.drain_cycles(); ++i) {
      const auto o = engine.clock(idle, false);
      if (o.dv) results.push_back(o.result);
    }
  }
  return results;
}

}  // namespace tmf
