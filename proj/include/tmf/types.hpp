#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tmf {

/// One B-bit data point. B never exceeds 16.
using Sample = std::uint16_t;

/// Invalid static configuration (widths, ranks, window shapes).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A first-sample marker arrived while a data set was still being consumed.
class FramingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called outside its domain (e.g. refining a fully resolved prefix).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline constexpr int kMaxDataBits = 16;
inline constexpr int kDefaultCounterBits = 8;
inline constexpr int kDefaultPipeLatency = 5;
inline constexpr int kDefaultPipeCapacity = 255;

/// Rounds a source data width up to the even width the 2-bit stages need.
int even_data_bits(int bits);

/// Smallest accumulator width that holds presets for rank `rank` of `set_size`
/// samples without wrapping past the sign bit.
int required_counter_bits(int set_size, int rank);

/// Throws ConfigError unless rank/set_size fit a `counter_bits` wide preset accumulator.
void validate_counter_range(int set_size, int rank, int counter_bits);

/// Static configuration of a single-channel engine.
struct FilterParams {
  int data_bits = 8;
  int set_size = 1;
  int rank = 1;
  int counter_bits = kDefaultCounterBits;
  int pipe_latency = kDefaultPipeLatency;
  int pipe_capacity = kDefaultPipeCapacity;

  int stages() const { return data_bits / 2; }
  /// Words each data pipe holds: one set plus the stage's internal latency.
  int pipe_depth() const { return set_size + pipe_latency; }

  void validate() const;
};

}  // namespace tmf
