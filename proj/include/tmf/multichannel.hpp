#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tmf/core.hpp"

namespace tmf {

/// A K-channel engine consuming one K-sample column per clock; a window is
/// `columns` consecutive columns, so N = channels * columns.
struct McParams {
  int channels = 9;
  int columns = 1;
  int data_bits = 8;
  int rank = 1;
  int counter_bits = kDefaultCounterBits;
  int pipe_latency = kDefaultPipeLatency;
  int pipe_capacity = kDefaultPipeCapacity;

  int set_size() const { return channels * columns; }
  int stages() const { return data_bits / 2; }
  int pipe_depth() const { return columns + pipe_latency; }

  void validate() const;
};

/// 3-in-2-out encoder: number of asserted inputs.
unsigned encode3(bool b2, bool b1, bool b0);

/// Counts, per boundary, how many column samples reach it. Comparison bits
/// are grouped in triples (zero padded), encoded with encode3 and summed.
Increments mc_incgen(std::span<const Sample> column, PartialMedian pm, int data_bits);

/// The same counts taken by direct comparison, no encoder structure.
Increments popcount_incgen(std::span<const Sample> column, PartialMedian pm, int data_bits);

struct McCycleOutput {
  bool dv = false;
  std::span<const Sample> dout;  // K delayed channels; valid until the next clock
  bool dout_first = false;
  Sample result = 0;
};

class McEngine {
 public:
  explicit McEngine(const McParams& params);

  McCycleOutput clock(std::span<const Sample> column, bool d1st);

  const McParams& params() const { return params_; }
  std::uint64_t cycle() const { return cycle_; }
  std::uint64_t comparisons() const { return comparisons_; }
  int latency() const { return params_.stages() * params_.pipe_depth(); }
  int drain_cycles() const { return latency() - params_.columns + 1; }

 private:
  McParams params_;
  std::vector<Stage> stages_;
  std::vector<PartialMedian> held_;
  DataPipe pipe_;
  std::uint64_t cycle_ = 0;
  std::uint64_t comparisons_ = 0;
  bool result_ready_ = false;
  Sample result_ = 0;
};

/// Feeds back-to-back windows (columns flattened as [column][channel]) and
/// returns one result per window.
std::vector<Sample> run_columns(const McParams& params, std::span<const Sample> columns);

}  // namespace tmf
