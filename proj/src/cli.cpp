#include "tmf/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tmf/core.hpp"
#include "tmf/ensembles.hpp"
#include "tmf/imaging.hpp"
#include "tmf/multichannel.hpp"
#include "tmf/oracle.hpp"
#include "tmf/pgm.hpp"
#include "tmf/trace.hpp"

namespace tmf::cli {

namespace {

// frame rates are shown truncated to one decimal
const CLI::Range kPositive(1, 1 << 24);

double fps_shown(double fps) { return std::floor(fps * 10.0) / 10.0; }

constexpr double kDefaultClockHz = 275e6;

// Raised by --check when an engine disagrees with the oracle.
struct Mismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RankChoice {
  int rank = 0;
  double percentile = 0.0;

  int resolve(int n) const { return rank > 0 ? rank : percentile_to_rank(percentile, n); }
};

std::vector<Offset> read_offsets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open offset file '" + path + "'");
  std::vector<Offset> offsets;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    Offset o;
    if (!(ls >> o.dx)) continue;
    if (!(ls >> o.dy)) throw ConfigError("offset file line needs 'dx dy': " + line);
    offsets.push_back(o);
  }
  return offsets;
}

WindowShape parse_window(const std::string& spec) {
  if (spec.rfind("custom=", 0) == 0) return WindowShape::custom(read_offsets(spec.substr(7)));
  return WindowShape::parse(spec);
}

EngineKind parse_engine(const std::string& s) {
  if (s == "single") return EngineKind::Single;
  if (s == "multichannel") return EngineKind::MultiChannel;
  if (s == "sliding") return EngineKind::Sliding;
  throw ConfigError("unknown engine '" + s + "'");
}

Border parse_border(const std::string& s) {
  if (s == "clamp") return Border::Clamp;
  if (s == "valid") return Border::ValidOnly;
  throw ConfigError("unknown border policy '" + s + "'");
}

double cycles_per_result(EngineKind engine, const WindowShape& shape, int n) {
  switch (engine) {
    case EngineKind::Single: return n;
    case EngineKind::MultiChannel: return shape.as_rect()->width;
    case EngineKind::Sliding: return 1;
  }
  return n;
}

std::vector<Sample> read_samples(std::istream& in, int& bits) {
  std::vector<Sample> data;
  std::string token;
  std::uint32_t max_value = 0;
  while (in >> token) {
    if (!std::all_of(token.begin(), token.end(), [](unsigned char c) { return std::isdigit(c); }) ||
        token.size() > 5) {
      throw ConfigError("not an unsigned sample: '" + token + "'");
    }
    const unsigned long v = std::stoul(token);
    if (v > 65535) throw ConfigError("sample " + token + " exceeds 16 bits");
    data.push_back(static_cast<Sample>(v));
    max_value = std::max<std::uint32_t>(max_value, static_cast<std::uint32_t>(v));
  }
  if (bits == 0) {
    int needed = 1;
    while ((1u << needed) <= max_value) ++needed;
    bits = even_data_bits(needed);
  } else {
    bits = even_data_bits(bits);
    if ((max_value >> bits) != 0) throw ConfigError("sample exceeds --bits");
  }
  return data;
}

std::vector<Sample> read_samples_from(const std::string& path, std::istream& stdin_stream, int& bits) {
  if (path.empty() || path == "-") return read_samples(stdin_stream, bits);
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return read_samples(in, bits);
}

std::string sibling_path(const std::string& path, const std::string& tag) {
  const std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + "_" + tag + p.extension().string())).string();
}

struct FilterArgs {
  std::string in_path;
  std::string out_path;
  std::string window = "3x3";
  RankChoice rank;
  std::string engine = "single";
  std::string border = "clamp";
  double clock_hz = kDefaultClockHz;
  bool check = false;
  int threads = 1;
  int counter_bits = 0;
};

int cmd_filter(const FilterArgs& a, std::ostream& out) {
  const PgmFile file = read_pgm_file(a.in_path);
  const Border border = parse_border(a.border);
  const Image& img = file.image;

  if (a.engine == "9753") {
    if (a.window != "9x9") throw ConfigError("the 9753 engine uses a 9x9 window");
    const double p = a.rank.rank > 0 ? static_cast<double>(a.rank.rank) / 81.0 : a.rank.percentile;
    std::array<int, 4> ranks{};
    for (std::size_t c = 0; c < 4; ++c) {
      ranks[c] = percentile_to_rank(p, kWidths9753[c] * kWidths9753[c]);
    }
    const Filter9753Result r = filter_image_9753(img, ranks, border, a.threads);
    out << "engine=9753 windows=9x9,7x7,5x5,3x3 M=" << ranks[0] << ',' << ranks[1] << ',' << ranks[2] << ','
        << ranks[3] << " cycles=" << r.cycles << " results=" << r.results << '\n';
    out << std::fixed << std::setprecision(1)
        << "frame_rate=" << fps_shown(frame_rate(a.clock_hz, img.width, img.height, kCadence9753)) << " fps @ "
        << a.clock_hz / 1e6 << " MHz\n";
    if (a.check) {
      for (std::size_t c = 0; c < 4; ++c) {
        const int w = kWidths9753[c];
        Image ref = oracle::filter_image_oracle(img, WindowShape::rect(w, w), ranks[c], Border::Clamp);
        if (border == Border::ValidOnly) {
          Image crop(r.images[c].width, r.images[c].height, img.bits);
          for (int y = 0; y < crop.height; ++y)
            for (int x = 0; x < crop.width; ++x) crop.at(x, y) = ref.at(x + 4, y + 4);
          ref = crop;
        }
        if (ref != r.images[c]) throw Mismatch("9753 " + std::to_string(w) + "x" + std::to_string(w) +
                                               " output differs from the oracle");
      }
      out << "check=ok\n";
    }
    write_pgm_file(a.out_path, r.images[0], file.maxval, file.binary);
    for (std::size_t c = 1; c < 4; ++c) {
      const int w = kWidths9753[c];
      write_pgm_file(sibling_path(a.out_path, std::to_string(w) + "x" + std::to_string(w)), r.images[c],
                     file.maxval, file.binary);
    }
    return kExitOk;
  }

  const WindowShape shape = parse_window(a.window);
  const int n = static_cast<int>(window_offsets(shape).size());
  FilterOptions opts;
  opts.rank = a.rank.resolve(n);
  opts.engine = parse_engine(a.engine);
  opts.border = border;
  opts.threads = a.threads;
  opts.counter_bits = a.counter_bits;
  const FilterResult r = filter_image(img, shape, opts);

  const double cpr = cycles_per_result(opts.engine, shape, n);
  out << "window=" << shape.name() << " N=" << n << " M=" << opts.rank << " engine=" << to_string(opts.engine)
      << " border=" << to_string(border) << '\n';
  out << "cycles=" << r.cycles << " results=" << r.results << " bands=" << r.bands << '\n';
  out << std::fixed << std::setprecision(1) << "frame_rate=" << fps_shown(frame_rate(a.clock_hz, img.width, img.height, cpr))
      << " fps @ " << a.clock_hz / 1e6 << " MHz\n";
  if (a.check) {
    const Image ref = oracle::filter_image_oracle(img, shape, opts.rank, border);
    if (ref != r.image) throw Mismatch("filtered image differs from the oracle");
    out << "check=ok\n";
  }
  write_pgm_file(a.out_path, r.image, file.maxval, file.binary);
  return kExitOk;
}

struct RankArgs {
  std::string in_path;
  int set_size = 1;
  RankChoice rank;
  int bits = 0;
  int counter_bits = 0;
  bool check = false;
};

int cmd_rank(const RankArgs& a, std::istream& in, std::ostream& out) {
  int bits = a.bits;
  const std::vector<Sample> data = read_samples_from(a.in_path, in, bits);
  FilterParams p;
  p.data_bits = bits;
  p.set_size = a.set_size;
  p.rank = a.rank.resolve(a.set_size);
  p.counter_bits = a.counter_bits > 0 ? a.counter_bits : auto_counter_bits(p.set_size, p.rank);
  const std::vector<Sample> results = run_stream(p, data);
  const auto n = static_cast<std::size_t>(p.set_size);
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (a.check) {
      const Sample want = oracle::select_desc(std::span(data).subspan(i * n, n), p.rank);
      if (want != results[i]) {
        throw Mismatch("set " + std::to_string(i) + ": engine " + std::to_string(results[i]) + ", oracle " +
                       std::to_string(want));
      }
    }
    out << results[i] << '\n';
  }
  if (results.size() != data.size() / n) throw Mismatch("engine lost a result");
  return kExitOk;
}

struct TraceArgs {
  std::string in_path;
  std::string out_path;
  std::string mode = "single";
  int set_size = 1;
  int channels = 1;
  RankChoice rank;
  int bits = 0;
  int counter_bits = 0;
};

int cmd_trace(const TraceArgs& a, std::istream& in, std::ostream& out) {
  int bits = a.bits;
  const std::vector<Sample> data = read_samples_from(a.in_path, in, bits);
  std::vector<TraceRow> rows;
  int channels = 1;
  bool enables = false;
  if (a.mode == "single") {
    FilterParams p;
    p.data_bits = bits;
    p.set_size = a.set_size;
    p.rank = a.rank.resolve(a.set_size);
    p.counter_bits = a.counter_bits > 0 ? a.counter_bits : auto_counter_bits(p.set_size, p.rank);
    rows = trace_stream(p, data);
  } else if (a.mode == "multichannel") {
    McParams p;
    p.channels = a.channels;
    p.columns = a.set_size;
    p.data_bits = bits;
    p.rank = a.rank.resolve(p.set_size());
    p.counter_bits = a.counter_bits > 0 ? a.counter_bits : auto_counter_bits(p.set_size(), p.rank);
    channels = p.channels;
    rows = trace_columns(p, data);
  } else if (a.mode == "9753") {
    Ensemble9753Params p;
    p.data_bits = bits;
    const double pct = a.rank.rank > 0 ? static_cast<double>(a.rank.rank) / 81.0 : a.rank.percentile;
    for (std::size_t c = 0; c < 4; ++c) p.ranks[c] = percentile_to_rank(pct, p.set_size(static_cast<int>(c)));
    channels = kCadence9753;
    enables = true;
    rows = trace_9753(p, data);
  } else {
    throw ConfigError("unknown trace mode '" + a.mode + "'");
  }

  std::ofstream file;
  std::ostream* dst = &out;
  if (!a.out_path.empty() && a.out_path != "-") {
    file.open(a.out_path, std::ios::binary);
    if (!file) throw ConfigError("cannot create '" + a.out_path + "'");
    dst = &file;
  }
  write_trace_header(*dst, channels, enables);
  for (const TraceRow& row : rows) write_trace_row(*dst, row);
  return kExitOk;
}

struct BenchArgs {
  int width = 1024;
  int height = 768;
  std::vector<std::string> windows = {"3x3", "5x5", "3x5", "3x7", "diamond5", "diamond7"};
  double clock_hz = kDefaultClockHz;
  std::string engine = "single";
  bool simulate = false;
  int sim_width = 64;
  int sim_height = 48;
  int threads = 1;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  if (a.width < 1 || a.height < 1) throw ConfigError("image dimensions must be positive");
  if (a.sim_width < 1 || a.sim_height < 1) throw ConfigError("simulation image dimensions must be positive");
  const EngineKind engine = parse_engine(a.engine);

  out << "clock " << std::fixed << std::setprecision(1) << a.clock_hz / 1e6 << " MHz, image " << a.width << 'x'
      << a.height << ", engine " << to_string(engine) << '\n';
  out << std::left << std::setw(10) << "window" << std::right << std::setw(6) << "N" << std::setw(16)
      << "cycles/result" << std::setw(12) << "fps";
  if (a.simulate) out << std::setw(16) << "sim cyc/result" << std::setw(12) << "sim fps";
  out << '\n';

  std::mt19937 rng(12345);
  for (const std::string& spec : a.windows) {
    const WindowShape shape = parse_window(spec);
    const int n = static_cast<int>(window_offsets(shape).size());
    if (engine != EngineKind::Single) {
      const RectWindow* r = shape.as_rect();
      if (!r || (engine == EngineKind::Sliding && r->width != r->height)) {
        out << std::left << std::setw(10) << shape.name() << "  (not supported by this engine)\n";
        continue;
      }
    }
    const double cpr = cycles_per_result(engine, shape, n);
    out << std::left << std::setw(10) << shape.name() << std::right << std::setw(6) << n << std::setw(16)
        << std::setprecision(0) << cpr << std::setw(12) << std::setprecision(1)
        << fps_shown(frame_rate(a.clock_hz, a.width, a.height, cpr));
    if (a.simulate) {
      Image img(a.sim_width, a.sim_height, 8);
      std::uniform_int_distribution<int> dist(0, 255);
      for (Sample& p : img.pixels) p = static_cast<Sample>(dist(rng));
      FilterOptions opts;
      opts.rank = percentile_to_rank(0.5, n);
      opts.engine = engine;
      opts.threads = a.threads;
      const FilterResult r = filter_image(img, shape, opts);
      const double measured = static_cast<double>(r.cycles) / static_cast<double>(r.results);
      out << std::setw(16) << std::setprecision(3) << measured << std::setw(12) << std::setprecision(1)
          << fps_shown(frame_rate(a.clock_hz, a.width, a.height, measured));
    }
    out << '\n';
  }
  return kExitOk;
}

void add_rank_options(CLI::App* cmd, RankChoice& rank) {
  auto* r = cmd->add_option("-m,--rank", rank.rank, "rank M (1 = maximum)")->check(kPositive);
  auto* p = cmd->add_option("--percentile", rank.percentile, "percentile in (0, 1]; 0.5 = median")
                ->check(CLI::Range(0.0, 1.0));
  r->excludes(p);
  p->excludes(r);
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Streaming rank/percentile filter with cycle-accurate engine models", "tmf"};
  app.require_subcommand(1);

  FilterArgs filter;
  auto* fc = app.add_subcommand("filter", "rank-filter a PGM image");
  fc->add_option("input", filter.in_path, "input PGM (P2 or P5)")->required();
  fc->add_option("output", filter.out_path, "output PGM")->required();
  fc->add_option("--window", filter.window, "WxH, diamondD or custom=FILE");
  add_rank_options(fc, filter.rank);
  fc->add_option("--engine", filter.engine, "single|multichannel|sliding|9753");
  fc->add_option("--border", filter.border, "clamp|valid");
  fc->add_option("--clock", filter.clock_hz, "reference clock in Hz for frame-rate reporting");
  fc->add_flag("--check", filter.check, "verify against the brute-force oracle");
  fc->add_option("--threads", filter.threads, "row bands filtered in parallel")->check(kPositive);
  fc->add_option("--counter-bits", filter.counter_bits, "accumulator width (default: smallest >= 8 that fits)");

  RankArgs rank;
  auto* rc = app.add_subcommand("rank", "M-th largest of each N-sample set in a stream");
  rc->add_option("input", rank.in_path, "whitespace-separated samples (default stdin)");
  rc->add_option("-n,--set-size", rank.set_size, "samples per set")->required()->check(kPositive);
  add_rank_options(rc, rank.rank);
  rc->add_option("--bits", rank.bits, "data width (default: inferred from the largest sample)");
  rc->add_option("--counter-bits", rank.counter_bits, "accumulator width");
  rc->add_flag("--check", rank.check, "verify each result against the brute-force oracle");

  TraceArgs trace;
  auto* tc = app.add_subcommand("trace", "write a per-clock CSV trace of an engine");
  tc->add_option("input", trace.in_path, "whitespace-separated samples (default stdin)");
  tc->add_option("-o,--output", trace.out_path, "CSV path (default stdout)");
  tc->add_option("--mode", trace.mode, "single|multichannel|9753");
  tc->add_option("-n,--set-size", trace.set_size, "samples per set (columns per window in multichannel mode)")
      ->check(kPositive);
  tc->add_option("--channels", trace.channels, "channels for multichannel mode")->check(kPositive);
  add_rank_options(tc, trace.rank);
  tc->add_option("--bits", trace.bits, "data width");
  tc->add_option("--counter-bits", trace.counter_bits, "accumulator width");

  BenchArgs bench;
  auto* bc = app.add_subcommand("bench", "frame-rate table, optionally with measured cycles");
  bc->add_option("--width", bench.width, "image width for the frame-rate table");
  bc->add_option("--height", bench.height, "image height for the frame-rate table");
  bc->add_option("--window", bench.windows, "window shapes")->expected(1, -1);
  bc->add_option("--clock", bench.clock_hz, "clock in Hz");
  bc->add_option("--engine", bench.engine, "single|multichannel|sliding");
  bc->add_flag("--simulate", bench.simulate, "measure cycles per result on a scaled random image");
  bc->add_option("--sim-width", bench.sim_width, "simulated image width");
  bc->add_option("--sim-height", bench.sim_height, "simulated image height");
  bc->add_option("--threads", bench.threads, "row bands simulated in parallel")->check(kPositive);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitInvalid;
  }

  const auto needs_rank = [](const RankChoice& r) {
    if (r.rank == 0 && r.percentile == 0.0) throw ConfigError("one of --rank or --percentile is required");
  };
  try {
    if (fc->parsed()) {
      if (filter.engine != "9753") needs_rank(filter.rank);
      else if (filter.rank.rank == 0 && filter.rank.percentile == 0.0) filter.rank.percentile = 0.5;
      return cmd_filter(filter, out);
    }
    if (rc->parsed()) {
      needs_rank(rank.rank);
      return cmd_rank(rank, in, out);
    }
    if (tc->parsed()) {
      if (trace.mode != "9753") needs_rank(trace.rank);
      else if (trace.rank.rank == 0 && trace.rank.percentile == 0.0) trace.rank.percentile = 0.5;
      return cmd_trace(trace, in, out);
    }
    return cmd_bench(bench, out);
  } catch (const Mismatch& e) {
    err << "mismatch: " << e.what() << '\n';
    return kExitMismatch;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::out_of_range& e) {
    err << "error: value out of range: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::logic_error& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitMismatch;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}

}  // namespace tmf::cli
