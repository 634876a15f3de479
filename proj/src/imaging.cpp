#include "tmf/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <set>

#include "tmf/core.hpp"
#include "tmf/ensembles.hpp"
#include "tmf/multichannel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tmf {

Image::Image(int w, int h, int data_bits, Sample fill)
    : width(w), height(h), bits(data_bits), pixels(static_cast<std::size_t>(std::max(w, 0)) * std::max(h, 0), fill) {}

void Image::validate() const {
  if (width <= 0 || height <= 0) {
    throw ConfigError("image must have positive width and height");
  }
  if (bits < 1 || bits > kMaxDataBits) {
    throw ConfigError("image bit depth must be in [1, 16]");
  }
  if (pixels.size() != static_cast<std::size_t>(width) * height) {
    throw ConfigError("pixel count does not match image dimensions");
  }
  const std::uint32_t limit = 1u << bits;
  for (Sample p : pixels) {
    if (p >= limit) throw ConfigError("pixel value " + std::to_string(p) + " exceeds bit depth");
  }
}

WindowShape WindowShape::parse(const std::string& spec) {
  const auto digits = [&](const std::string& s) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
      throw ConfigError("bad window spec '" + spec + "'");
    }
    return std::stoi(s);
  };
  if (spec.rfind("diamond", 0) == 0) {
    return diamond(digits(spec.substr(7)));
  }
  const auto x = spec.find('x');
  if (x == std::string::npos) {
    throw ConfigError("bad window spec '" + spec + "', expected WxH or diamondD");
  }
  return rect(digits(spec.substr(0, x)), digits(spec.substr(x + 1)));
}

std::string WindowShape::name() const {
  struct Visitor {
    std::string operator()(const RectWindow& r) const {
      return std::to_string(r.width) + "x" + std::to_string(r.height);
    }
    std::string operator()(const DiamondWindow& d) const { return "diamond" + std::to_string(d.diameter); }
    std::string operator()(const CustomWindow& c) const {
      return "custom(" + std::to_string(c.offsets.size()) + ")";
    }
  };
  return std::visit(Visitor{}, shape_);
}

std::vector<Offset> window_offsets(const WindowShape& shape) {
  std::vector<Offset> offsets;
  if (const auto* r = std::get_if<RectWindow>(&shape.variant())) {
    if (r->width < 1 || r->height < 1) throw ConfigError("rectangle window needs positive extents");
    const int x0 = -(r->width - 1) / 2;
    const int y0 = -(r->height - 1) / 2;
    for (int dy = y0; dy < y0 + r->height; ++dy) {
      for (int dx = x0; dx < x0 + r->width; ++dx) offsets.push_back({dx, dy});
    }
  } else if (const auto* d = std::get_if<DiamondWindow>(&shape.variant())) {
    if (d->diameter < 1 || d->diameter % 2 == 0) {
      throw ConfigError("diamond diameter must be odd and positive, got " + std::to_string(d->diameter));
    }
    const int r = (d->diameter - 1) / 2;
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        if (std::abs(dx) + std::abs(dy) <= r) offsets.push_back({dx, dy});
      }
    }
  } else {
    const auto& c = std::get<CustomWindow>(shape.variant());
    if (c.offsets.empty()) throw ConfigError("custom window has no offsets");
    offsets = c.offsets;
    std::sort(offsets.begin(), offsets.end(),
              [](Offset a, Offset b) { return a.dy != b.dy ? a.dy < b.dy : a.dx < b.dx; });
    if (std::adjacent_find(offsets.begin(), offsets.end()) != offsets.end()) {
      throw ConfigError("custom window repeats an offset");
    }
  }
  return offsets;
}

Extents window_extents(std::span<const Offset> offsets) {
  Extents e{offsets.front().dx, offsets.front().dx, offsets.front().dy, offsets.front().dy};
  for (const Offset& o : offsets) {
    e.min_dx = std::min(e.min_dx, o.dx);
    e.max_dx = std::max(e.max_dx, o.dx);
    e.min_dy = std::min(e.min_dy, o.dy);
    e.max_dy = std::max(e.max_dy, o.dy);
  }
  return e;
}

std::string to_string(EngineKind kind) {
  switch (kind) {
    case EngineKind::Single: return "single";
    case EngineKind::MultiChannel: return "multichannel";
    case EngineKind::Sliding: return "sliding";
  }
  return "?";
}

std::string to_string(Border border) { return border == Border::Clamp ? "clamp" : "valid"; }

std::array<int, 2> output_size(const Image& img, const Extents& ext, Border border) {
  if (border == Border::Clamp) return {img.width, img.height};
  const int w = img.width - ext.width() + 1;
  const int h = img.height - ext.height() + 1;
  if (w < 1 || h < 1) {
    throw ConfigError("window " + std::to_string(ext.width()) + "x" + std::to_string(ext.height()) +
                      " does not fit a " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                      " image without border handling");
  }
  return {w, h};
}

StripBuffer::StripBuffer(const Image& img, int top, int rows, Border border)
    : img_(&img), top_(top), rows_(rows), border_(border) {
  if (rows < 1) throw ConfigError("strip needs at least one row");
  if (border == Border::ValidOnly && (top < 0 || top + rows > img.height)) {
    throw ConfigError("strip rows [" + std::to_string(top) + ", " + std::to_string(top + rows) +
                      ") lie outside the image");
  }
}

void StripBuffer::read(int x, std::span<Sample> column) const {
  if (border_ == Border::ValidOnly && (x < 0 || x >= img_->width)) {
    throw ConfigError("strip column " + std::to_string(x) + " lies outside the image");
  }
  const int cx = std::clamp(x, 0, img_->width - 1);
  for (int r = 0; r < rows_; ++r) {
    const int y = std::clamp(top_ + r, 0, img_->height - 1);
    column[static_cast<std::size_t>(r)] = img_->at(cx, y);
  }
}

std::vector<Sample> strip_feed(const StripBuffer& buf, int x_begin, int x_end) {
  const auto rows = static_cast<std::size_t>(buf.rows());
  std::vector<Sample> out(static_cast<std::size_t>(std::max(0, x_end - x_begin)) * rows);
  for (int x = x_begin; x < x_end; ++x) {
    buf.read(x, std::span(out).subspan(static_cast<std::size_t>(x - x_begin) * rows, rows));
  }
  return out;
}

std::vector<int> strip_tops(int image_height, int rows, Border border) {
  std::vector<int> tops;
  const int half = (rows - 1) / 2;
  if (border == Border::Clamp) {
    for (int y = 0; y < image_height; ++y) tops.push_back(y - half);
  } else {
    for (int top = 0; top + rows <= image_height; ++top) tops.push_back(top);
  }
  return tops;
}

int auto_counter_bits(int n, int rank) { return std::max(kDefaultCounterBits, required_counter_bits(n, rank)); }

namespace {

struct Band {
  int y_begin;
  int y_end;
};

std::vector<Band> make_bands(int rows, int threads) {
  const int count = std::clamp(threads, 1, rows);
  std::vector<Band> bands;
  for (int b = 0; b < count; ++b) {
    bands.push_back({rows * b / count, rows * (b + 1) / count});
  }
  return bands;
}

// Runs fn(band_index) for every band, in parallel when asked to.
template <typename Fn>
void for_each_band(std::size_t count, int threads, Fn&& fn) {
  std::exception_ptr error;
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(count); ++b) {
    try {
      fn(static_cast<std::size_t>(b));
    } catch (...) {
#pragma omp critical(tmf_band_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

struct Geometry {
  std::vector<Offset> offsets;
  Extents ext;
  int out_w;
  int out_h;
  int origin_x;  // image anchor = output coordinate + origin
  int origin_y;
};

Geometry make_geometry(const Image& img, const WindowShape& shape, Border border) {
  Geometry g;
  g.offsets = window_offsets(shape);
  g.ext = window_extents(g.offsets);
  const auto size = output_size(img, g.ext, border);
  g.out_w = size[0];
  g.out_h = size[1];
  g.origin_x = border == Border::ValidOnly ? -g.ext.min_dx : 0;
  g.origin_y = border == Border::ValidOnly ? -g.ext.min_dy : 0;
  return g;
}

struct BandOutput {
  std::vector<Sample> pixels;
  std::uint64_t cycles = 0;
  int drain = 0;
};

BandOutput run_single(const Image& img, const Geometry& g, Band band, const FilterParams& p) {
  Engine engine(p);
  BandOutput out;
  out.pixels.reserve(static_cast<std::size_t>(band.y_end - band.y_begin) * g.out_w);
  const auto sample = [&](int x, int y) {
    return img.at(std::clamp(x, 0, img.width - 1), std::clamp(y, 0, img.height - 1));
  };
  for (int oy = band.y_begin; oy < band.y_end; ++oy) {
    for (int ox = 0; ox < g.out_w; ++ox) {
      const int ax = ox + g.origin_x;
      const int ay = oy + g.origin_y;
      for (std::size_t i = 0; i < g.offsets.size(); ++i) {
        const auto o = engine.clock(sample(ax + g.offsets[i].dx, ay + g.offsets[i].dy), i == 0);
        if (o.dv) out.pixels.push_back(o.result);
      }
    }
  }
  for (int i = 0; i < engine.drain_cycles(); ++i) {
    const auto o = engine.clock(0, false);
    if (o.dv) out.pixels.push_back(o.result);
  }
  out.cycles = engine.cycle();
  out.drain = engine.drain_cycles();
  return out;
}

BandOutput run_multichannel(const Image& img, const Geometry& g, Band band, const McParams& p, Border border) {
  McEngine engine(p);
  BandOutput out;
  const auto k = static_cast<std::size_t>(p.channels);
  std::vector<Sample> column(k);
  for (int oy = band.y_begin; oy < band.y_end; ++oy) {
    const StripBuffer strip(img, oy + g.origin_y + g.ext.min_dy, p.channels, border);
    for (int ox = 0; ox < g.out_w; ++ox) {
      const int ax = ox + g.origin_x;
      for (int c = 0; c < p.columns; ++c) {
        strip.read(ax + g.ext.min_dx + c, column);
        const auto o = engine.clock(column, c == 0);
        if (o.dv) out.pixels.push_back(o.result);
      }
    }
  }
  const std::vector<Sample> idle(k, 0);
  for (int i = 0; i < engine.drain_cycles(); ++i) {
    const auto o = engine.clock(idle, false);
    if (o.dv) out.pixels.push_back(o.result);
  }
  out.cycles = engine.cycle();
  out.drain = engine.drain_cycles();
  return out;
}

// Streams the band's rows back to back through one ensemble. Each row
// contributes a segment of columns; windows straddling two segments are
// computed and dropped.
BandOutput run_sliding_band(const Image& img, const Geometry& g, Band band, const SlidingParams& p,
                            Border border) {
  SlidingEnsemble ensemble(p);
  BandOutput out;
  const int w = p.window;
  const int seg_begin = border == Border::Clamp ? g.ext.min_dx : 0;
  const int seg_len = border == Border::Clamp ? img.width + w - 1 : img.width;
  const auto rows = static_cast<std::size_t>(band.y_end - band.y_begin);
  const std::size_t total_cols = rows * static_cast<std::size_t>(seg_len);
  const std::size_t windows = total_cols - static_cast<std::size_t>(w) + 1;
  std::size_t next_window = 0;
  std::vector<Sample> column(static_cast<std::size_t>(w));
  const auto take = [&](const std::optional<Sample>& r) {
    if (!r) return;
    if (next_window < windows && static_cast<int>(next_window % seg_len) <= seg_len - w) {
      out.pixels.push_back(*r);
    }
    ++next_window;
  };
  std::size_t g_col = 0;
  for (int oy = band.y_begin; oy < band.y_end; ++oy) {
    const StripBuffer strip(img, oy + g.origin_y + g.ext.min_dy, w, border);
    for (int q = 0; q < seg_len; ++q, ++g_col) {
      strip.read(seg_begin + q, column);
      take(ensemble.clock(column, g_col % static_cast<std::size_t>(w) == 0));
    }
  }
  std::fill(column.begin(), column.end(), Sample{0});
  while (next_window < windows) {
    take(ensemble.clock(column, g_col % static_cast<std::size_t>(w) == 0));
    ++g_col;
  }
  out.cycles = ensemble.cycle();
  out.drain = ensemble.latency();
  return out;
}

}  // namespace

FilterResult filter_image(const Image& img, const WindowShape& shape, const FilterOptions& opts) {
  img.validate();
  const Geometry g = make_geometry(img, shape, opts.border);
  const int n = static_cast<int>(g.offsets.size());
  if (opts.rank < 1 || opts.rank > n) {
    throw ConfigError("rank " + std::to_string(opts.rank) + " outside [1, " + std::to_string(n) + "]");
  }
  if (opts.threads < 1) throw ConfigError("thread count must be positive");
  const int bits = even_data_bits(img.bits);
  const int counter_bits = opts.counter_bits > 0 ? opts.counter_bits : auto_counter_bits(n, opts.rank);

  const RectWindow* rect = shape.as_rect();
  FilterParams single;
  McParams mc;
  SlidingParams sliding;
  switch (opts.engine) {
    case EngineKind::Single:
      single = {bits, n, opts.rank, counter_bits, opts.pipe_latency, kDefaultPipeCapacity};
      single.validate();
      break;
    case EngineKind::MultiChannel:
      if (!rect) throw ConfigError("multi-channel engine needs a rectangular window");
      mc = {rect->height, rect->width, bits, opts.rank, counter_bits, opts.pipe_latency, kDefaultPipeCapacity};
      mc.validate();
      break;
    case EngineKind::Sliding:
      if (!rect || rect->width != rect->height) {
        throw ConfigError("sliding engine needs a square window");
      }
      sliding = {rect->width, bits, opts.rank, counter_bits, opts.pipe_latency, kDefaultPipeCapacity};
      sliding.validate();
      break;
  }

  const auto bands = make_bands(g.out_h, opts.threads);
  std::vector<BandOutput> outputs(bands.size());
  for_each_band(bands.size(), opts.threads, [&](std::size_t b) {
    switch (opts.engine) {
      case EngineKind::Single: outputs[b] = run_single(img, g, bands[b], single); break;
      case EngineKind::MultiChannel: outputs[b] = run_multichannel(img, g, bands[b], mc, opts.border); break;
      case EngineKind::Sliding: outputs[b] = run_sliding_band(img, g, bands[b], sliding, opts.border); break;
    }
  });

  FilterResult result;
  result.image = Image(g.out_w, g.out_h, img.bits);
  result.bands = static_cast<int>(bands.size());
  auto dst = result.image.pixels.begin();
  for (std::size_t b = 0; b < bands.size(); ++b) {
    const auto expected = static_cast<std::size_t>(bands[b].y_end - bands[b].y_begin) * g.out_w;
    if (outputs[b].pixels.size() != expected) {
      throw std::logic_error("engine produced " + std::to_string(outputs[b].pixels.size()) +
                             " results for a band of " + std::to_string(expected) + " pixels");
    }
    dst = std::copy(outputs[b].pixels.begin(), outputs[b].pixels.end(), dst);
    result.cycles += outputs[b].cycles;
    result.drain_cycles = outputs[b].drain;
  }
  result.results = result.image.pixels.size();
  return result;
}

Filter9753Result filter_image_9753(const Image& img, const std::array<int, 4>& ranks, Border border, int threads) {
  img.validate();
  if (threads < 1) throw ConfigError("thread count must be positive");
  const Geometry g = make_geometry(img, WindowShape::rect(9, 9), border);
  Ensemble9753Params p;
  p.data_bits = even_data_bits(img.bits);
  p.ranks = ranks;
  int counter_bits = kDefaultCounterBits;
  for (int c = 0; c < 4; ++c) {
    counter_bits = std::max(counter_bits, auto_counter_bits(p.set_size(c), ranks[static_cast<std::size_t>(c)]));
  }
  p.counter_bits = counter_bits;
  p.validate();

  const auto bands = make_bands(g.out_h, threads);
  std::vector<std::vector<std::array<Sample, 4>>> outputs(bands.size());
  std::vector<std::uint64_t> cycles(bands.size());
  for_each_band(bands.size(), threads, [&](std::size_t b) {
    Ensemble9753 ensemble(p);
    std::vector<Sample> column(kCadence9753);
    auto& out = outputs[b];
    for (int oy = bands[b].y_begin; oy < bands[b].y_end; ++oy) {
      const StripBuffer strip(img, oy + g.origin_y - 4, kCadence9753, border);
      for (int ox = 0; ox < g.out_w; ++ox) {
        const int ax = ox + g.origin_x;
        for (int c = 0; c < kCadence9753; ++c) {
          strip.read(ax - 4 + c, column);
          if (auto r = ensemble.clock(column, c == 0)) out.push_back(*r);
        }
      }
    }
    std::fill(column.begin(), column.end(), Sample{0});
    for (int i = 0; i < ensemble.latency() - kCadence9753 + 1; ++i) {
      if (auto r = ensemble.clock(column, false)) out.push_back(*r);
    }
    cycles[b] = ensemble.cycle();
  });

  Filter9753Result result;
  for (auto& im : result.images) im = Image(g.out_w, g.out_h, img.bits);
  std::size_t i = 0;
  for (std::size_t b = 0; b < bands.size(); ++b) {
    const auto expected = static_cast<std::size_t>(bands[b].y_end - bands[b].y_begin) * g.out_w;
    if (outputs[b].size() != expected) throw std::logic_error("9753 ensemble lost results");
    for (const auto& quad : outputs[b]) {
      for (std::size_t c = 0; c < 4; ++c) result.images[c].pixels[i] = quad[c];
      ++i;
    }
    result.cycles += cycles[b];
  }
  result.results = i;
  result.bands = static_cast<int>(bands.size());
  return result;
}

int percentile_to_rank(double p, int n) {
  if (!(p > 0.0 && p <= 1.0)) throw ConfigError("percentile must be in (0, 1]");
  if (n < 1) throw ConfigError("set size must be positive");
  // tolerate p*n landing a hair above an integer
  const int rank = static_cast<int>(std::ceil(p * n - 1e-9));
  return std::clamp(rank, 1, n);
}

double frame_rate(double clock_hz, int image_width, int image_height, double cycles_per_result) {
  return clock_hz / (static_cast<double>(image_width) * image_height * cycles_per_result);
}

}  // namespace tmf
