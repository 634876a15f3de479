#pragma once

#include <iosfwd>
#include <string>

#include "tmf/imaging.hpp"

namespace tmf {

/// A grayscale Netpbm image as read from disk.
struct PgmFile {
  Image image;
  int maxval = 255;
  bool binary = true;  // P5 vs P2
};

/// Smallest bit width whose range covers maxval.
int bits_for_maxval(int maxval);

/// Reads P2 or P5. Two-byte P5 samples are big-endian. Throws ConfigError on malformed input.
PgmFile read_pgm(std::istream& in);
PgmFile read_pgm_file(const std::string& path);

void write_pgm(std::ostream& out, const Image& img, int maxval, bool binary);
void write_pgm_file(const std::string& path, const Image& img, int maxval, bool binary);

}  // namespace tmf
