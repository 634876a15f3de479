#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tmf/core.hpp"
#include "tmf/ensembles.hpp"
#include "tmf/multichannel.hpp"

namespace tmf {

/// One simulated clock as exported to CSV.
struct TraceRow {
  std::uint64_t cycle = 0;
  bool d1st = false;
  std::vector<Sample> din;
  bool dv = false;
  std::vector<Sample> dout;
  std::string result;  // blank unless dv
  std::optional<std::array<bool, 3>> enables;  // EN7, EN5, EN3
};

void write_trace_header(std::ostream& out, int channels, bool with_enables);
void write_trace_row(std::ostream& out, const TraceRow& row);

/// Back-to-back sets of N through the single-channel engine, drain included.
std::vector<TraceRow> trace_stream(const FilterParams& params, std::span<const Sample> data);

/// Back-to-back windows through a K-channel engine; `columns` is [column][channel].
std::vector<TraceRow> trace_columns(const McParams& params, std::span<const Sample> columns);

/// Back-to-back 9-column windows through the 9753 ensemble. The result field
/// holds the four results joined by ';' (9x9;7x7;5x5;3x3).
std::vector<TraceRow> trace_9753(const Ensemble9753Params& params, std::span<const Sample> columns);

}  // namespace tmf
