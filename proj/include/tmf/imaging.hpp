#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tmf/types.hpp"

namespace tmf {

/// Row-major grayscale image of `bits`-bit samples.
struct Image {
  int width = 0;
  int height = 0;
  int bits = 8;
  std::vector<Sample> pixels;

  Image() = default;
  Image(int w, int h, int data_bits, Sample fill = 0);

  Sample at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  Sample& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  /// Throws ConfigError on bad dimensions or out-of-width pixels.
  void validate() const;

  friend bool operator==(const Image&, const Image&) = default;
};

struct Offset {
  int dx = 0;
  int dy = 0;
  friend auto operator<=>(const Offset&, const Offset&) = default;
};

struct RectWindow {
  int width = 3;
  int height = 3;
};
struct DiamondWindow {
  int diameter = 5;
};
struct CustomWindow {
  std::vector<Offset> offsets;
};

/// Which pixels around an anchor form one data set.
class WindowShape {
 public:
  using Variant = std::variant<RectWindow, DiamondWindow, CustomWindow>;

  static WindowShape rect(int width, int height) { return WindowShape(RectWindow{width, height}); }
  static WindowShape diamond(int diameter) { return WindowShape(DiamondWindow{diameter}); }
  static WindowShape custom(std::vector<Offset> offsets) { return WindowShape(CustomWindow{std::move(offsets)}); }

  /// Parses "WxH", "diamondD" (custom offset files are read by the CLI).
  static WindowShape parse(const std::string& spec);

  const Variant& variant() const { return shape_; }
  const RectWindow* as_rect() const { return std::get_if<RectWindow>(&shape_); }
  std::string name() const;

 private:
  explicit WindowShape(Variant v) : shape_(std::move(v)) {}
  Variant shape_;
};

/// Window offsets in row-major order (by dy, then dx). Rectangles are
/// centered, with the extra row/column below/right for even extents.
std::vector<Offset> window_offsets(const WindowShape& shape);

struct Extents {
  int min_dx = 0;
  int max_dx = 0;
  int min_dy = 0;
  int max_dy = 0;
  int width() const { return max_dx - min_dx + 1; }
  int height() const { return max_dy - min_dy + 1; }
};
Extents window_extents(std::span<const Offset> offsets);

enum class Border {
  Clamp,      // replicate edge pixels; output has the input's size
  ValidOnly,  // only anchors whose whole window lies inside the image
};

enum class EngineKind { Single, MultiChannel, Sliding };

std::string to_string(EngineKind kind);
std::string to_string(Border border);

/// Output size for the given window and border policy; throws ConfigError
/// when a ValidOnly window does not fit.
std::array<int, 2> output_size(const Image& img, const Extents& ext, Border border);

/// Per-row line buffers over a horizontal strip, read one column per clock.
class StripBuffer {
 public:
  StripBuffer(const Image& img, int top, int rows, Border border);

  int rows() const { return rows_; }
  int top() const { return top_; }
  /// Writes the strip's samples at image column `x`, top row first.
  void read(int x, std::span<Sample> column) const;

 private:
  const Image* img_;
  int top_;
  int rows_;
  Border border_;
};

/// Columns x_begin .. x_end-1 of the strip, flattened [column][row].
std::vector<Sample> strip_feed(const StripBuffer& buf, int x_begin, int x_end);

/// Top row of the strip serving each output row.
std::vector<int> strip_tops(int image_height, int rows, Border border);

struct FilterOptions {
  int rank = 1;
  EngineKind engine = EngineKind::Single;
  Border border = Border::Clamp;
  int threads = 1;
  int counter_bits = 0;  // 0 = smallest width >= 8 that fits the rank
  int pipe_latency = kDefaultPipeLatency;
};

struct FilterResult {
  Image image;
  std::uint64_t cycles = 0;   // simulated clocks summed over all engines
  std::uint64_t results = 0;  // output pixels produced
  int bands = 1;              // independent engines (one per row band)
  int drain_cycles = 0;       // fixed per-band overhead beyond one result per `cycles_per_result`
};

/// Filters `img` with the chosen cycle-accurate engine. Output pixel (x, y)
/// is the rank-th largest sample of the window anchored there. Row bands are
/// processed by independent engines in parallel when threads > 1; the output
/// does not depend on the thread count.
FilterResult filter_image(const Image& img, const WindowShape& shape, const FilterOptions& opts);

struct Filter9753Result {
  std::array<Image, 4> images;  // 9x9, 7x7, 5x5, 3x3
  std::uint64_t cycles = 0;
  std::uint64_t results = 0;
  int bands = 1;
};

/// Concentric 9/7/5/3 filtering with one 9753 ensemble per row band.
Filter9753Result filter_image_9753(const Image& img, const std::array<int, 4>& ranks, Border border,
                                   int threads = 1);

/// Rank for a percentile: ceil(p * n), clamped to [1, n].
int percentile_to_rank(double p, int n);

/// Frames per second when each output pixel costs `cycles_per_result` clocks.
double frame_rate(double clock_hz, int image_width, int image_height, double cycles_per_result);

/// Smallest counter width >= 8 that holds the preset for (n, rank).
int auto_counter_bits(int n, int rank);

}  // namespace tmf
