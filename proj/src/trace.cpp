#include "tmf/trace.hpp"

#include <ostream>

namespace tmf {

void write_trace_header(std::ostream& out, int channels, bool with_enables) {
  out << "cycle,d1st";
  for (int i = 0; i < channels; ++i) out << ",din" << i;
  out << ",dv";
  for (int i = 0; i < channels; ++i) out << ",dout" << i;
  out << ",result";
  if (with_enables) out << ",en7,en5,en3";
  out << '\n';
}

void write_trace_row(std::ostream& out, const TraceRow& row) {
  out << row.cycle << ',' << int{row.d1st};
  for (Sample v : row.din) out << ',' << v;
  out << ',' << int{row.dv};
  for (Sample v : row.dout) out << ',' << v;
  out << ',' << row.result;
  if (row.enables) {
    for (bool e : *row.enables) out << ',' << int{e};
  }
  out << '\n';
}

std::vector<TraceRow> trace_stream(const FilterParams& params, std::span<const Sample> data) {
  Engine engine(params);
  const auto n = static_cast<std::size_t>(params.set_size);
  if (data.size() % n != 0) {
    throw FramingError("stream length is not a multiple of the set size");
  }
  std::vector<TraceRow> rows;
  const std::size_t total = data.empty() ? 0 : data.size() + static_cast<std::size_t>(engine.drain_cycles());
  for (std::size_t i = 0; i < total; ++i) {
    const bool in_data = i < data.size();
    const Sample din = in_data ? data[i] : 0;
    const bool first = in_data && i % n == 0;
    const std::uint64_t cycle = engine.cycle();
    const CycleOutput o = engine.clock(din, first);
    rows.push_back({cycle, first, {din}, o.dv, {o.dout}, o.dv ? std::to_string(o.result) : "", std::nullopt});
  }
  return rows;
}

std::vector<TraceRow> trace_columns(const McParams& params, std::span<const Sample> columns) {
  McEngine engine(params);
  const auto k = static_cast<std::size_t>(params.channels);
  const std::size_t window = k * static_cast<std::size_t>(params.columns);
  if (columns.size() % window != 0) {
    throw FramingError("column stream does not divide into whole windows");
  }
  const std::size_t ncols = columns.size() / k;
  const std::size_t total = ncols == 0 ? 0 : ncols + static_cast<std::size_t>(engine.drain_cycles());
  const std::vector<Sample> idle(k, 0);
  std::vector<TraceRow> rows;
  for (std::size_t c = 0; c < total; ++c) {
    const bool in_data = c < ncols;
    const auto col = in_data ? columns.subspan(c * k, k) : std::span<const Sample>(idle);
    const bool first = in_data && c % static_cast<std::size_t>(params.columns) == 0;
    const std::uint64_t cycle = engine.cycle();
    const auto o = engine.clock(col, first);
    rows.push_back({cycle, first, {col.begin(), col.end()}, o.dv, {o.dout.begin(), o.dout.end()},
                    o.dv ? std::to_string(o.result) : "", std::nullopt});
  }
  return rows;
}

std::vector<TraceRow> trace_9753(const Ensemble9753Params& params, std::span<const Sample> columns) {
  Ensemble9753 ensemble(params);
  constexpr auto k = static_cast<std::size_t>(kCadence9753);
  if (columns.size() % (k * k) != 0) {
    throw FramingError("column stream does not divide into whole 9-column windows");
  }
  const std::size_t ncols = columns.size() / k;
  const std::size_t total =
      ncols == 0 ? 0 : ncols + static_cast<std::size_t>(ensemble.latency() - kCadence9753 + 1);
  const std::vector<Sample> idle(k, 0);
  std::vector<TraceRow> rows;
  for (std::size_t c = 0; c < total; ++c) {
    const bool in_data = c < ncols;
    const auto col = in_data ? columns.subspan(c * k, k) : std::span<const Sample>(idle);
    const bool first = in_data && c % k == 0;
    const std::uint64_t cycle = ensemble.cycle();
    const auto r = ensemble.clock(col, first);
    std::string result;
    if (r) {
      result = std::to_string((*r)[0]) + ';' + std::to_string((*r)[1]) + ';' + std::to_string((*r)[2]) + ';' +
               std::to_string((*r)[3]);
    }
    const auto en = ensemble.input_enables();
    const auto dout = ensemble.dout();
    rows.push_back({cycle, first, {col.begin(), col.end()}, r.has_value(), {dout.begin(), dout.end()}, result,
                    std::array<bool, 3>{(en & kEn7) != 0, (en & kEn5) != 0, (en & kEn3) != 0}});
  }
  return rows;
}

}  // namespace tmf
