#include "tmf/types.hpp"

namespace tmf {

int even_data_bits(int bits) {
  if (bits < 1 || bits > kMaxDataBits) {
    throw ConfigError("data width must be in [1, 16] bits, got " + std::to_string(bits));
  }
  return bits + (bits & 1);
}

int required_counter_bits(int set_size, int rank) {
  // need rank <= 2^(C-1) and set_size - rank <= 2^(C-1) - 1
  int bits = 2;
  while ((1L << (bits - 1)) < rank || (1L << (bits - 1)) - 1 < set_size - rank) {
    ++bits;
  }
  return bits;
}

void validate_counter_range(int set_size, int rank, int counter_bits) {
  if (counter_bits < 2 || counter_bits > 31) {
    throw ConfigError("counter width must be in [2, 31], got " + std::to_string(counter_bits));
  }
  if (rank < 1 || rank > set_size) {
    throw ConfigError("rank " + std::to_string(rank) + " outside [1, " + std::to_string(set_size) + "]");
  }
  const long half = 1L << (counter_bits - 1);
  if (rank > half) {
    throw ConfigError("rank " + std::to_string(rank) + " exceeds " + std::to_string(half) +
                      " for a " + std::to_string(counter_bits) + "-bit accumulator");
  }
  if (set_size - rank > half - 1) {
    throw ConfigError("set size " + std::to_string(set_size) + " with rank " + std::to_string(rank) +
                      " wraps a " + std::to_string(counter_bits) + "-bit accumulator; need " +
                      std::to_string(required_counter_bits(set_size, rank)) + " bits");
  }
}

void FilterParams::validate() const {
  if (data_bits < 2 || data_bits > kMaxDataBits || data_bits % 2 != 0) {
    throw ConfigError("data width must be even and in [2, 16], got " + std::to_string(data_bits));
  }
  if (set_size < 1) {
    throw ConfigError("set size must be positive");
  }
  if (pipe_latency < 0) {
    throw ConfigError("pipe latency must be non-negative");
  }
  if (set_size > pipe_capacity - pipe_latency) {
    throw ConfigError("set size " + std::to_string(set_size) + " exceeds pipe capacity " +
                      std::to_string(pipe_capacity) + " minus latency " + std::to_string(pipe_latency));
  }
  validate_counter_range(set_size, rank, counter_bits);
}

}  // namespace tmf
