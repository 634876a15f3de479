#include "tmf/oracle.hpp"

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

namespace tmf::oracle {

Sample select_desc(std::span<const Sample> data, int rank) {
  if (rank < 1 || static_cast<std::size_t>(rank) > data.size()) {
    throw ConfigError("rank " + std::to_string(rank) + " outside [1, " + std::to_string(data.size()) + "]");
  }
  std::vector<Sample> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  return sorted[static_cast<std::size_t>(rank - 1)];
}

Image filter_image_oracle(const Image& img, const WindowShape& shape, int rank, Border border) {
  img.validate();
  const std::vector<Offset> offsets = window_offsets(shape);
  int min_dx = offsets[0].dx, max_dx = offsets[0].dx;
  int min_dy = offsets[0].dy, max_dy = offsets[0].dy;
  for (const Offset& o : offsets) {
    min_dx = std::min(min_dx, o.dx);
    max_dx = std::max(max_dx, o.dx);
    min_dy = std::min(min_dy, o.dy);
    max_dy = std::max(max_dy, o.dy);
  }
  const int out_w = border == Border::Clamp ? img.width : img.width - (max_dx - min_dx);
  const int out_h = border == Border::Clamp ? img.height : img.height - (max_dy - min_dy);
  if (out_w < 1 || out_h < 1) throw ConfigError("window larger than image");

  Image out(out_w, out_h, img.bits);
  std::vector<Sample> window(offsets.size());
  for (int oy = 0; oy < out_h; ++oy) {
    for (int ox = 0; ox < out_w; ++ox) {
      const int ax = border == Border::Clamp ? ox : ox - min_dx;
      const int ay = border == Border::Clamp ? oy : oy - min_dy;
      for (std::size_t i = 0; i < offsets.size(); ++i) {
        int x = ax + offsets[i].dx;
        int y = ay + offsets[i].dy;
        if (x < 0) x = 0;
        if (x >= img.width) x = img.width - 1;
        if (y < 0) y = 0;
        if (y >= img.height) y = img.height - 1;
        window[i] = img.pixels[static_cast<std::size_t>(y) * img.width + x];
      }
      out.pixels[static_cast<std::size_t>(oy) * out_w + ox] = select_desc(window, rank);
    }
  }
  return out;
}

}  // namespace tmf::oracle
