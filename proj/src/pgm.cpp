#include "tmf/pgm.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>

namespace tmf {

int bits_for_maxval(int maxval) {
  if (maxval < 1 || maxval > 65535) throw ConfigError("PGM maxval must be in [1, 65535]");
  int bits = 1;
  while ((1 << bits) - 1 < maxval) ++bits;
  return bits;
}

namespace {

void skip_space_and_comments(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

int read_header_int(std::istream& in, const char* what) {
  skip_space_and_comments(in);
  long value = -1;
  if (!(in >> value) || value < 0 || value > 1'000'000) {
    throw ConfigError(std::string("PGM header: bad ") + what);
  }
  return static_cast<int>(value);
}

}  // namespace

PgmFile read_pgm(std::istream& in) {
  char magic[2] = {};
  if (!in.read(magic, 2) || magic[0] != 'P' || (magic[1] != '2' && magic[1] != '5')) {
    throw ConfigError("not a PGM file (expected P2 or P5)");
  }
  PgmFile f;
  f.binary = magic[1] == '5';
  const int width = read_header_int(in, "width");
  const int height = read_header_int(in, "height");
  f.maxval = read_header_int(in, "maxval");
  const int bits = bits_for_maxval(f.maxval);
  if (width == 0 || height == 0) throw ConfigError("PGM image has zero area");
  f.image = Image(width, height, bits);

  if (f.binary) {
    if (!std::isspace(in.get())) throw ConfigError("PGM header: missing separator before raster");
    const bool wide = f.maxval > 255;
    for (Sample& p : f.image.pixels) {
      const int hi = in.get();
      const int lo = wide ? in.get() : 0;
      if (!in) throw ConfigError("PGM raster truncated");
      p = static_cast<Sample>(wide ? (hi << 8) | lo : hi);
    }
  } else {
    for (Sample& p : f.image.pixels) {
      skip_space_and_comments(in);
      long v = -1;
      if (!(in >> v) || v < 0) throw ConfigError("PGM raster: bad or missing sample");
      p = static_cast<Sample>(v);
      if (v > f.maxval) throw ConfigError("PGM sample " + std::to_string(v) + " exceeds maxval");
    }
  }
  for (Sample p : f.image.pixels) {
    if (p > f.maxval) throw ConfigError("PGM sample " + std::to_string(p) + " exceeds maxval");
  }
  return f;
}

PgmFile read_pgm_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return read_pgm(in);
}

void write_pgm(std::ostream& out, const Image& img, int maxval, bool binary) {
  out << (binary ? "P5" : "P2") << '\n' << img.width << ' ' << img.height << '\n' << maxval << '\n';
  if (binary) {
    const bool wide = maxval > 255;
    for (Sample p : img.pixels) {
      if (wide) out.put(static_cast<char>(p >> 8));
      out.put(static_cast<char>(p & 0xFF));
    }
  } else {
    // netpbm keeps plain lines under 70 characters
    std::size_t line = 0;
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        const std::string v = std::to_string(img.at(x, y));
        if (line > 0 && line + 1 + v.size() > 70) {
          out << '\n';
          line = 0;
        } else if (line > 0) {
          out << ' ';
          ++line;
        }
        out << v;
        line += v.size();
      }
      out << '\n';
      line = 0;
    }
  }
  if (!out) throw ConfigError("failed writing PGM");
}

void write_pgm_file(const std::string& path, const Image& img, int maxval, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot create '" + path + "'");
  write_pgm(out, img, maxval, binary);
}

}  // namespace tmf
