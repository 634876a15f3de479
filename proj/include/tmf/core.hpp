#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tmf/types.hpp"

namespace tmf {

/// Resolved high bits of the eventual result. Unresolved low bits are zero,
/// so the value denotes the range [prefix, prefix + span - 1].
struct PartialMedian {
  std::uint32_t prefix = 0;
  int bits_resolved = 0;

  std::uint32_t span(int data_bits) const { return 1u << (data_bits - bits_resolved); }
  std::uint32_t low() const { return prefix; }
  std::uint32_t high(int data_bits) const { return prefix + span(data_bits) - 1; }
  bool contains(std::uint32_t value, int data_bits) const {
    return value >= low() && value <= high(data_bits);
  }
  /// Appends two resolved bits (0..3) below the current prefix.
  PartialMedian extend(unsigned two_bits, int data_bits) const;

  friend bool operator==(const PartialMedian&, const PartialMedian&) = default;
};

struct Boundaries {
  std::uint32_t b1 = 0;
  std::uint32_t b2 = 0;
  std::uint32_t b3 = 0;
};

/// The three interior boundaries splitting `pm`'s range into quarters.
Boundaries boundaries(PartialMedian pm, int data_bits);

struct GeFlags {
  bool ge3 = false;
  bool ge2 = false;
  bool ge1 = false;
};

/// Compares one sample against the boundaries of `pm`. Samples outside the
/// range are compared as plain integers.
GeFlags incgen(Sample x, PartialMedian pm, int data_bits);

/// Accumulator start value 2^(C-1) - M; bit C-1 of preset + count is then (count >= M).
std::uint32_t counter_preset(int rank, int counter_bits);

/// Priority-encodes the accumulator sign bits into the next two result bits.
unsigned refine(bool msb3, bool msb2, bool msb1);

/// Per-cycle accumulator increments, one per boundary.
struct Increments {
  int inc3 = 0;
  int inc2 = 0;
  int inc1 = 0;
};

/// Three C-bit wrap-around accumulators sharing one preset.
class StageCounters {
 public:
  StageCounters(int counter_bits, std::uint32_t preset);

  void reset() { qc3_ = qc2_ = qc1_ = preset_; }
  void add(Increments inc);

  std::uint32_t qc3() const { return qc3_; }
  std::uint32_t qc2() const { return qc2_; }
  std::uint32_t qc1() const { return qc1_; }
  bool msb3() const { return (qc3_ >> (bits_ - 1)) & 1u; }
  bool msb2() const { return (qc2_ >> (bits_ - 1)) & 1u; }
  bool msb1() const { return (qc1_ >> (bits_ - 1)) & 1u; }

  /// Raw count recovered from the accumulator: (qc - preset) mod 2^C.
  std::uint32_t count3() const { return (qc3_ - preset_) & mask_; }
  std::uint32_t count2() const { return (qc2_ - preset_) & mask_; }
  std::uint32_t count1() const { return (qc1_ - preset_) & mask_; }

 private:
  int bits_;
  std::uint32_t mask_;
  std::uint32_t preset_;
  std::uint32_t qc3_;
  std::uint32_t qc2_;
  std::uint32_t qc1_;
};

struct StageConfig {
  int index = 0;              // 0-based position in the chain
  int data_bits = 8;
  int positions_per_set = 1;  // samples (or columns) per data set
  int rank = 1;
  int counter_bits = kDefaultCounterBits;
  int latency = kDefaultPipeLatency;
};

/// One 2-bit refinement stage.
///
/// A set begins on a cycle with `first` asserted; the partial median handed
/// in on that cycle is latched for the whole set. The set ends after
/// `positions_per_set` cycles, counted by the stage itself, and the refined
/// partial median leaves the stage `latency` cycles after the last sample.
class Stage {
 public:
  explicit Stage(const StageConfig& cfg);

  /// Advances one clock. `increments` is called with the latched partial
  /// median on every in-set cycle and must return that cycle's increments.
  template <typename IncrementFn>
  std::optional<PartialMedian> clock(bool first, PartialMedian upstream, IncrementFn&& increments) {
    std::optional<PartialMedian> done;
    if (first) {
      if (position_ != 0) {
        throw FramingError("first-sample marker arrived at set position " +
                           std::to_string(position_) + " of stage " + std::to_string(cfg_.index));
      }
      if (upstream.bits_resolved != 2 * cfg_.index) {
        throw ContractError("stage " + std::to_string(cfg_.index) +
                            " received a partial median with " +
                            std::to_string(upstream.bits_resolved) + " resolved bits");
      }
      pm_in_ = upstream;
      counters_.reset();
    }
    if (first || position_ != 0) {
      counters_.add(increments(pm_in_));
      ++in_set_cycles_;
      if (++position_ == cfg_.positions_per_set) {
        position_ = 0;
        done = pm_in_.extend(refine(counters_.msb3(), counters_.msb2(), counters_.msb1()),
                             cfg_.data_bits);
      }
    }
    return delay(done);
  }

  const StageCounters& counters() const { return counters_; }
  PartialMedian latched() const { return pm_in_; }
  int position() const { return position_; }
  std::uint64_t in_set_cycles() const { return in_set_cycles_; }
  const StageConfig& config() const { return cfg_; }

 private:
  std::optional<PartialMedian> delay(std::optional<PartialMedian> in);

  StageConfig cfg_;
  StageCounters counters_;
  PartialMedian pm_in_;
  int position_ = 0;
  std::uint64_t in_set_cycles_ = 0;
  std::vector<std::optional<PartialMedian>> delay_line_;
  std::size_t delay_head_ = 0;
};

/// Marker bits carried alongside the data through the pipes.
enum PipeFlag : std::uint8_t {
  kFirst = 1u << 0,
  kEn7 = 1u << 1,
  kEn5 = 1u << 2,
  kEn3 = 1u << 3,
};

/// A chain of equal-depth circular data buffers sharing one address counter.
/// Each word is `lanes` samples plus a flag byte.
///
/// After clock(), tap k holds the word leaving pipe k-1 (delayed k*depth
/// cycles); tap 0 is the word just written.
class DataPipe {
 public:
  DataPipe(int pipes, int depth, int lanes);

  void clock(std::span<const Sample> data, std::uint8_t flags);

  std::span<const Sample> tap_data(int k) const {
    return {taps_.data() + static_cast<std::size_t>(k) * lanes_, static_cast<std::size_t>(lanes_)};
  }
  std::uint8_t tap_flags(int k) const { return tap_flags_[static_cast<std::size_t>(k)]; }

  int pipes() const { return pipes_; }
  int depth() const { return depth_; }
  int lanes() const { return lanes_; }
  std::size_t address() const { return address_; }

 private:
  int pipes_;
  int depth_;
  int lanes_;
  std::size_t address_ = 0;
  std::vector<Sample> words_;      // [pipe][address][lane]
  std::vector<std::uint8_t> flags_;  // [pipe][address]
  std::vector<Sample> taps_;       // [tap][lane]
  std::vector<std::uint8_t> tap_flags_;
};

struct CycleInput {
  Sample din = 0;
  bool d1st = false;
};

struct CycleOutput {
  bool dv = false;       // a result is presented this cycle
  Sample dout = 0;       // raw data delayed through every pipe
  bool dout_first = false;
  Sample result = 0;     // meaningful only when dv
};

/// The single-channel percentile engine: B/2 stages fed through B/2 data
/// pipes of depth N + L. A set whose first sample enters on cycle t is
/// reported on cycle t + latency(), together with that first sample on dout.
class Engine {
 public:
  explicit Engine(const FilterParams& params);

  CycleOutput clock(Sample din, bool d1st);
  CycleOutput clock(CycleInput in) { return clock(in.din, in.d1st); }

  /// True when no set is in flight anywhere in the chain.
  bool idle() const { return in_flight_ == 0 && !result_ready_; }
  /// Changes N and M between sets. Only allowed while idle(); the pipes are
  /// resized to the new depth.
  void reconfigure(int set_size, int rank);

  const FilterParams& params() const { return params_; }
  std::uint64_t cycle() const { return cycle_; }
  /// Boundary comparisons performed so far (three per in-set sample per stage).
  std::uint64_t comparisons() const { return comparisons_; }
  /// Cycles from a set's first sample to its dv pulse.
  int latency() const { return params_.stages() * params_.pipe_depth(); }
  /// Idle cycles needed after the last sample of a set to see its result.
  int drain_cycles() const { return latency() - params_.set_size + 1; }

  const Stage& stage(int s) const { return stages_[static_cast<std::size_t>(s)]; }

 private:
  FilterParams params_;
  std::vector<Stage> stages_;
  std::vector<PartialMedian> held_;  // output register of each stage
  DataPipe pipe_;
  std::uint64_t cycle_ = 0;
  std::uint64_t comparisons_ = 0;
  bool result_ready_ = false;
  Sample result_ = 0;
  std::uint64_t in_flight_ = 0;
};

/// Frames `data` into back-to-back sets of N, clocks an engine, drains it and
/// returns the M-th largest of every set.
std::vector<Sample> run_stream(const FilterParams& params, std::span<const Sample> data);

/// Exact number of boundary comparisons for `num_sets` sets: 3 * N * B/2 * sets.
std::uint64_t comparison_count(const FilterParams& params, std::uint64_t num_sets);

}  // namespace tmf
