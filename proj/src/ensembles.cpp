#include "tmf/ensembles.hpp"

#include <bit>
#include <string>

namespace tmf {

void SlidingParams::validate() const {
  if (window < 1 || window > 31 || window % 2 == 0) {
    throw ConfigError("sliding window must be odd and in [1, 31], got " + std::to_string(window));
  }
  if (data_bits < 2 || data_bits > kMaxDataBits || data_bits % 2 != 0) {
    throw ConfigError("data width must be even and in [2, 16], got " + std::to_string(data_bits));
  }
  if (pipe_latency < 0 || window > pipe_capacity - pipe_latency) {
    throw ConfigError("window exceeds pipe capacity");
  }
  validate_counter_range(set_size(), rank, counter_bits);
}

namespace {

template <typename P>
const P& validated(const P& p) {
  p.validate();
  return p;
}

}  // namespace

SlidingEnsemble::SlidingEnsemble(const SlidingParams& params)
    : params_(validated(params)),
      held_(static_cast<std::size_t>(params_.window * params_.stages())),
      marker_history_(static_cast<std::size_t>(params_.stages()), 0),
      pipe_(params_.stages(), params_.pipe_depth(), params_.window) {
  stages_.reserve(held_.size());
  for (int j = 0; j < params_.window; ++j) {
    for (int s = 0; s < params_.stages(); ++s) {
      stages_.emplace_back(StageConfig{s, params_.data_bits, params_.window, params_.rank,
                                       params_.counter_bits, params_.pipe_latency});
    }
  }
}

const Stage& SlidingEnsemble::stage(int chain, int level) const {
  return stages_[static_cast<std::size_t>(chain * params_.stages() + level)];
}

Stage& SlidingEnsemble::stage(int chain, int level) {
  return stages_[static_cast<std::size_t>(chain * params_.stages() + level)];
}

std::optional<Sample> SlidingEnsemble::clock(std::span<const Sample> column, bool d1st) {
  const int w = params_.window;
  if (column.size() != static_cast<std::size_t>(w)) {
    throw ConfigError("column height " + std::to_string(column.size()) + " does not match window " +
                      std::to_string(w));
  }
  std::optional<Sample> out = result_;
  presenting_chain_ = result_chain_;
  result_.reset();
  result_chain_ = -1;

  pipe_.clock(column, d1st ? kFirst : 0);

  const int levels = params_.stages();
  const std::uint32_t history_mask = w >= 32 ? ~0u : (1u << w) - 1;
  for (int s = 0; s < levels; ++s) {
    auto& h = marker_history_[static_cast<std::size_t>(s)];
    h = ((h << 1) | ((pipe_.tap_flags(s) & kFirst) ? 1u : 0u)) & history_mask;
  }

  // every chain's first stage compares the same data against the full range
  std::optional<Increments> shared_first;
  const auto first_level = pipe_.tap_data(0);

  for (int j = 0; j < w; ++j) {
    for (int s = levels - 1; s >= 0; --s) {
      const bool first = (marker_history_[static_cast<std::size_t>(s)] >> j) & 1u;
      const auto idx = static_cast<std::size_t>(j * levels + s);
      const PartialMedian upstream = s == 0 ? PartialMedian{} : held_[idx - 1];
      const auto data = pipe_.tap_data(s);
      auto done = stage(j, s).clock(first, upstream, [&](PartialMedian pm) {
        if (s == 0) {
          if (!shared_first) {
            comparisons_ += 3ull * first_level.size();
            shared_first = mc_incgen(first_level, pm, params_.data_bits);
          }
          return *shared_first;
        }
        comparisons_ += 3ull * data.size();
        return mc_incgen(data, pm, params_.data_bits);
      });
      if (done) {
        held_[idx] = *done;
        if (s == levels - 1) {
          if (result_) {
            throw std::logic_error("two sliding chains matured on the same cycle");
          }
          result_ = static_cast<Sample>(done->prefix);
          result_chain_ = j;
        }
      }
    }
  }
  ++cycle_;
  return out;
}

std::vector<Sample> run_sliding(const SlidingParams& params, std::span<const Sample> columns) {
  SlidingEnsemble ensemble(params);
  const auto w = static_cast<std::size_t>(params.window);
  if (columns.size() % w != 0) {
    throw ConfigError("strip data is not a whole number of columns");
  }
  const std::size_t ncols = columns.size() / w;
  std::vector<Sample> results;
  if (ncols < w) return results;
  const std::size_t expected = ncols - w + 1;
  results.reserve(expected);
  for (std::size_t c = 0; c < ncols; ++c) {
    auto r = ensemble.clock(columns.subspan(c * w, w), c % w == 0);
    if (r && results.size() < expected) results.push_back(*r);
  }
  const std::vector<Sample> idle(w, 0);
  for (std::size_t c = ncols; results.size() < expected; ++c) {
    auto r = ensemble.clock(idle, c % w == 0);
    if (r) results.push_back(*r);
  }
  return results;
}

bool enable_schedule(int w, int phase) {
  if (w != 3 && w != 5 && w != 7 && w != 9) {
    throw ConfigError("9753 chains have 9, 7, 5 or 3 channels, got " + std::to_string(w));
  }
  if (phase < 0 || phase >= kCadence9753) {
    throw ConfigError("cadence phase must be in [0, 8], got " + std::to_string(phase));
  }
  const int centre = kCadence9753 / 2;
  return std::abs(phase - centre) <= (w - 1) / 2;
}

std::uint16_t default_enable_mask(int w) {
  std::uint16_t mask = 0;
  for (int p = 0; p < kCadence9753; ++p) {
    if (enable_schedule(w, p)) mask = static_cast<std::uint16_t>(mask | (1u << p));
  }
  return mask;
}

int Ensemble9753Params::set_size(int chain) const {
  return kWidths9753[static_cast<std::size_t>(chain)] * std::popcount(static_cast<unsigned>(mask(chain)));
}

void Ensemble9753Params::validate() const {
  if (data_bits < 2 || data_bits > kMaxDataBits || data_bits % 2 != 0) {
    throw ConfigError("data width must be even and in [2, 16], got " + std::to_string(data_bits));
  }
  if (pipe_latency < 0 || kCadence9753 > pipe_capacity - pipe_latency) {
    throw ConfigError("cadence exceeds pipe capacity");
  }
  for (int c = 0; c < 4; ++c) {
    if ((mask(c) & ~0x1FFu) != 0 || mask(c) == 0) {
      throw ConfigError("enable mask for the " + std::to_string(kWidths9753[static_cast<std::size_t>(c)]) +
                        "-channel chain must select phases within [0, 8]");
    }
    validate_counter_range(set_size(c), ranks[static_cast<std::size_t>(c)], counter_bits);
  }
}

Ensemble9753::Ensemble9753(const Ensemble9753Params& params)
    : params_(validated(params)),
      held_(static_cast<std::size_t>(4 * params_.stages())),
      pipe_(params_.stages(), params_.pipe_depth(), kCadence9753) {
  for (int c = 0; c < 4; ++c) {
    for (int s = 0; s < params_.stages(); ++s) {
      stages_.emplace_back(StageConfig{s, params_.data_bits, kCadence9753,
                                       params_.ranks[static_cast<std::size_t>(c)], params_.counter_bits,
                                       params_.pipe_latency});
    }
  }
}

namespace {

constexpr std::array<std::uint8_t, 4> kChainEnable = {0, kEn7, kEn5, kEn3};

}  // namespace

std::optional<std::array<Sample, 4>> Ensemble9753::clock(std::span<const Sample> column, bool d1st) {
  if (column.size() != static_cast<std::size_t>(kCadence9753)) {
    throw ConfigError("9753 ensemble takes 9-row columns");
  }
  auto out = result_;
  result_.reset();

  if (d1st && phase_ != 0) {
    throw FramingError("first-sample marker breaks the 9-cycle cadence at phase " + std::to_string(phase_));
  }
  input_enables_ = 0;
  const bool active = d1st || phase_ != 0;
  if (active) {
    for (int c = 1; c < 4; ++c) {
      if ((params_.mask(c) >> phase_) & 1u) input_enables_ |= kChainEnable[static_cast<std::size_t>(c)];
    }
    phase_ = (phase_ + 1) % kCadence9753;
  }
  pipe_.clock(column, static_cast<std::uint8_t>((d1st ? kFirst : 0) | input_enables_));

  const int levels = params_.stages();
  std::array<Sample, 4> finished{};
  int finished_count = 0;
  for (int c = 0; c < 4; ++c) {
    const int w = kWidths9753[static_cast<std::size_t>(c)];
    const auto top = static_cast<std::size_t>((kCadence9753 - w) / 2);
    for (int s = levels - 1; s >= 0; --s) {
      const auto flags = pipe_.tap_flags(s);
      const bool enabled = c == 0 || (flags & kChainEnable[static_cast<std::size_t>(c)]);
      const auto rows = pipe_.tap_data(s).subspan(top, static_cast<std::size_t>(w));
      const auto idx = static_cast<std::size_t>(c * levels + s);
      const PartialMedian upstream = s == 0 ? PartialMedian{} : held_[idx - 1];
      auto done = stages_[idx].clock(flags & kFirst, upstream, [&](PartialMedian pm) {
        return enabled ? mc_incgen(rows, pm, params_.data_bits) : Increments{};
      });
      if (done) {
        held_[idx] = *done;
        if (s == levels - 1) {
          finished[static_cast<std::size_t>(c)] = static_cast<Sample>(done->prefix);
          ++finished_count;
        }
      }
    }
  }
  if (finished_count == 4) {
    result_ = finished;
  } else if (finished_count != 0) {
    throw std::logic_error("9753 chains fell out of step");
  }
  ++cycle_;
  return out;
}

std::vector<std::array<Sample, 4>> run_9753(const Ensemble9753Params& params,
                                            std::span<const Sample> columns) {
  Ensemble9753 ensemble(params);
  constexpr auto rows = static_cast<std::size_t>(kCadence9753);
  if (columns.size() % (rows * rows) != 0) {
    throw FramingError("column stream does not divide into whole 9-column windows");
  }
  const std::size_t ncols = columns.size() / rows;
  std::vector<std::array<Sample, 4>> results;
  for (std::size_t c = 0; c < ncols; ++c) {
    if (auto r = ensemble.clock(columns.subspan(c * rows, rows), c % rows == 0)) results.push_back(*r);
  }
  if (ncols > 0) {
    const std::vector<Sample> idle(rows, 0);
    const int drain = ensemble.latency() - kCadence9753 + 1;
    for (int i = 0; i < drain; ++i) {
      if (auto r = ensemble.clock(idle, false)) results.push_back(*r);
    }
  }
  return results;
}

}  // namespace tmf
