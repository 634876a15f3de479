#pragma once

#include <span>

#include "tmf/imaging.hpp"

/// Brute-force references. Nothing here shares code with the engines.
namespace tmf::oracle {

/// Element M-1 of `data` sorted descending.
Sample select_desc(std::span<const Sample> data, int rank);

/// Per-pixel sort-and-pick over the gathered window.
Image filter_image_oracle(const Image& img, const WindowShape& shape, int rank, Border border);

}  // namespace tmf::oracle
