#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tmf/core.hpp"
#include "tmf/multichannel.hpp"

namespace tmf {

struct SlidingParams {
  int window = 9;  // W: rows per column and columns per window
  int data_bits = 8;
  int rank = 1;
  int counter_bits = kDefaultCounterBits;
  int pipe_latency = kDefaultPipeLatency;
  int pipe_capacity = kDefaultPipeCapacity;

  int set_size() const { return window * window; }
  int stages() const { return data_bits / 2; }
  int pipe_depth() const { return window + pipe_latency; }
  void validate() const;
};

/// W chains of W-channel stages over one shared data pipe. Chain j sees the
/// first-sample marker delayed by j columns, so with a marker every W columns
/// the chains together cover a window starting at every column and one
/// result matures per clock.
///
/// The result for the window whose first column entered on cycle c is
/// presented on cycle c + latency().
class SlidingEnsemble {
 public:
  explicit SlidingEnsemble(const SlidingParams& params);

  std::optional<Sample> clock(std::span<const Sample> column, bool d1st);

  const SlidingParams& params() const { return params_; }
  int latency() const { return params_.stages() * params_.pipe_depth(); }
  std::uint64_t cycle() const { return cycle_; }
  std::uint64_t comparisons() const { return comparisons_; }
  /// Chain whose result is presented this cycle; meaningful when clock() returned a value.
  int presenting_chain() const { return presenting_chain_; }

 private:
  const Stage& stage(int chain, int level) const;
  Stage& stage(int chain, int level);

  SlidingParams params_;
  std::vector<Stage> stages_;        // [chain][level]
  std::vector<PartialMedian> held_;  // [chain][level]
  std::vector<std::uint32_t> marker_history_;  // per level, bit j = marker j cycles ago
  DataPipe pipe_;
  std::uint64_t cycle_ = 0;
  std::uint64_t comparisons_ = 0;
  std::optional<Sample> result_;
  int result_chain_ = -1;
  int presenting_chain_ = -1;
};

/// Runs the sliding ensemble over a W-row strip of `ncols` columns
/// (flattened [column][row]); returns the ncols - W + 1 window results.
std::vector<Sample> run_sliding(const SlidingParams& params, std::span<const Sample> columns);

inline constexpr int kCadence9753 = 9;
inline constexpr std::array<int, 4> kWidths9753 = {9, 7, 5, 3};

/// True iff `phase` is one of the middle `w` phases of the 9-cycle cadence.
bool enable_schedule(int w, int phase);

/// Bit p set iff the chain is enabled at phase p.
std::uint16_t default_enable_mask(int w);

struct Ensemble9753Params {
  int data_bits = 8;
  std::array<int, 4> ranks = {41, 25, 13, 5};  // for the 9, 7, 5 and 3 channel chains
  /// Phase masks for EN7, EN5 and EN3. Override for non-square windows.
  std::array<std::uint16_t, 3> enable_masks = {default_enable_mask(7), default_enable_mask(5),
                                               default_enable_mask(3)};
  int counter_bits = kDefaultCounterBits;
  int pipe_latency = kDefaultPipeLatency;
  int pipe_capacity = kDefaultPipeCapacity;

  int stages() const { return data_bits / 2; }
  int pipe_depth() const { return kCadence9753 + pipe_latency; }
  /// Samples counted by chain i: its rows times its enabled phases.
  int set_size(int chain) const;
  std::uint16_t mask(int chain) const { return chain == 0 ? 0x1FF : enable_masks[static_cast<std::size_t>(chain - 1)]; }
  void validate() const;
};

/// 9, 7, 5 and 3 channel chains over a shared 9-row data pipe. The w-channel
/// chain reads the centered w rows and accumulates only while its enable
/// signal is active, so each 9-cycle cadence yields four concentric results.
class Ensemble9753 {
 public:
  explicit Ensemble9753(const Ensemble9753Params& params);

  std::optional<std::array<Sample, 4>> clock(std::span<const Sample> column, bool d1st);

  const Ensemble9753Params& params() const { return params_; }
  int latency() const { return params_.stages() * params_.pipe_depth(); }
  std::uint64_t cycle() const { return cycle_; }
  /// EN7/EN5/EN3 generated for the column accepted by the last clock().
  std::uint8_t input_enables() const { return input_enables_; }
  /// Raw columns leaving the last pipe, aligned with results.
  std::span<const Sample> dout() const { return pipe_.tap_data(pipe_.pipes()); }

 private:
  Ensemble9753Params params_;
  std::vector<Stage> stages_;        // [chain][level]
  std::vector<PartialMedian> held_;  // [chain][level]
  DataPipe pipe_;
  int phase_ = 0;
  std::uint64_t cycle_ = 0;
  std::uint8_t input_enables_ = 0;
  std::optional<std::array<Sample, 4>> result_;
};

/// Runs back-to-back 9-column windows (flattened [column][row]) through the
/// 9753 ensemble; returns one quadruple per window.
std::vector<std::array<Sample, 4>> run_9753(const Ensemble9753Params& params,
                                            std::span<const Sample> columns);

}  // namespace tmf
