#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "support.hpp"
#include "tmf/cli.hpp"
#include "tmf/ensembles.hpp"
#include "tmf/oracle.hpp"
#include "tmf/pgm.hpp"

using namespace tmf;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult invoke(std::vector<std::string> args, const std::string& stdin_text = "") {
  args.insert(args.begin(), "tmf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(stdin_text);
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), in, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / ("tmf_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::string f;
  std::istringstream in(line);
  while (std::getline(in, f, ',')) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

TEST_CASE("PGM round trip is byte-identical") {
  std::mt19937 rng(51);
  for (bool binary : {true, false}) {
    for (int maxval : {255, 1023, 65535}) {
      Image img = test::random_image(rng, 13, 7, bits_for_maxval(maxval));
      for (auto& p : img.pixels) p = static_cast<Sample>(p % (maxval + 1));
      std::ostringstream first;
      write_pgm(first, img, maxval, binary);
      std::istringstream in(first.str());
      const PgmFile f = read_pgm(in);
      CHECK(f.image == img);
      CHECK(f.maxval == maxval);
      CHECK(f.binary == binary);
      std::ostringstream second;
      write_pgm(second, f.image, f.maxval, f.binary);
      CHECK(second.str() == first.str());
    }
  }
}

TEST_CASE("PGM reader handles comments and rejects malformed files") {
  std::istringstream ok("P2\n# comment\n3 1 # inline\n15\n1 2 15\n");
  const PgmFile f = read_pgm(ok);
  CHECK(f.image.pixels == std::vector<Sample>{1, 2, 15});
  CHECK(f.image.bits == 4);

  std::istringstream bad_magic("P6\n1 1\n255\n\0\0\0");
  CHECK_THROWS_AS(read_pgm(bad_magic), ConfigError);
  std::istringstream over("P2\n2 1\n10\n3 11\n");
  CHECK_THROWS_AS(read_pgm(over), ConfigError);
  std::istringstream truncated("P5\n4 4\n255\nab");
  CHECK_THROWS_AS(read_pgm(truncated), ConfigError);
}

TEST_CASE("rank subcommand") {
  auto r = invoke({"rank", "-n", "9", "-m", "5", "--check"}, "3 1 4 1 5 9 2 6 5");
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out == "4\n");

  std::string stream;
  for (int i = 0; i < 24; ++i) stream += std::to_string((i * 37) % 200) + " ";
  r = invoke({"rank", "-n", "3", "--percentile", "0.5", "--check"}, stream);
  CHECK(r.code == cli::kExitOk);
  CHECK(lines(r.out).size() == 8);

  r = invoke({"rank", "-n", "1", "-m", "1"}, "");
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.empty());

  r = invoke({"rank", "-n", "2", "-m", "1"}, "1 2 x");
  CHECK(r.code == cli::kExitInvalid);
  r = invoke({"rank", "-n", "2", "-m", "1"}, "1 2 3");
  CHECK(r.code == cli::kExitInvalid);
  r = invoke({"rank", "-n", "2", "-m", "3"}, "1 2");
  CHECK(r.code == cli::kExitInvalid);
  r = invoke({"rank", "-n", "2", "-m", "1", "--percentile", "0.5"}, "1 2");
  CHECK(r.code == cli::kExitInvalid);
}

TEST_CASE("rank --check over random streams never reports a mismatch") {
  std::mt19937 rng(52);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 40)(rng);
    const int m = std::uniform_int_distribution<int>(1, n)(rng);
    const auto data = test::random_samples(rng, static_cast<std::size_t>(n * 3), 10);
    std::string text;
    for (Sample v : data) text += std::to_string(v) + "\n";
    const auto r = invoke({"rank", "-n", std::to_string(n), "-m", std::to_string(m), "--check"}, text);
    CHECK(r.code == cli::kExitOk);
  }
}

TEST_CASE("trace subcommand, single mode") {
  std::string stream;
  for (int i = 0; i < 24; ++i) stream += std::to_string(i * 9) + " ";
  const auto r = invoke({"trace", "-n", "3", "-m", "2"}, stream);
  REQUIRE(r.code == cli::kExitOk);
  const auto rows = lines(r.out);
  REQUIRE(!rows.empty());
  CHECK(rows[0] == "cycle,d1st,din0,dv,dout0,result");
  std::vector<int> dv_rows;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = fields(rows[i]);
    REQUIRE(f.size() == 6);
    CHECK(f[0] == std::to_string(i - 1));
    if (f[3] == "1") {
      dv_rows.push_back(static_cast<int>(i));
      CHECK(!f[5].empty());
    } else {
      CHECK(f[5].empty());
    }
  }
  REQUIRE(dv_rows.size() == 8);
  for (std::size_t i = 1; i < dv_rows.size(); ++i) CHECK(dv_rows[i] - dv_rows[i - 1] == 3);

  const auto again = invoke({"trace", "-n", "3", "-m", "2"}, stream);
  CHECK(again.out == r.out);

  const auto one = invoke({"trace", "-n", "4", "-m", "1"}, "1 2 3 4");
  int pulses = 0;
  for (const auto& l : lines(one.out)) pulses += fields(l)[3] == "1";
  CHECK(pulses == 1);
}

TEST_CASE("trace subcommand, 9753 mode") {
  std::mt19937 rng(53);
  std::string stream;
  for (Sample v : test::random_samples(rng, 81 * 2, 8)) stream += std::to_string(v) + " ";
  const auto r = invoke({"trace", "--mode", "9753"}, stream);
  REQUIRE(r.code == cli::kExitOk);
  const auto rows = lines(r.out);
  const auto header = fields(rows[0]);
  REQUIRE(header.size() == 2 + 9 + 1 + 9 + 1 + 3);
  CHECK(header.back() == "en3");
  for (std::size_t i = 1; i <= 18; ++i) {
    const auto f = fields(rows[i]);
    const int phase = static_cast<int>((i - 1) % 9);
    CHECK(f[f.size() - 3] == (enable_schedule(7, phase) ? "1" : "0"));
    CHECK(f[f.size() - 2] == (enable_schedule(5, phase) ? "1" : "0"));
    CHECK(f[f.size() - 1] == (enable_schedule(3, phase) ? "1" : "0"));
  }
  int results = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) results += fields(rows[i])[11] == "1";
  CHECK(results == 2);
}

TEST_CASE("filter subcommand") {
  const fs::path dir = scratch_dir();
  std::mt19937 rng(54);
  const Image img = test::random_image(rng, 20, 16);
  write_pgm_file((dir / "in.pgm").string(), img, 255, true);
  const std::string in = (dir / "in.pgm").string();
  const std::string out = (dir / "out.pgm").string();

  auto r = invoke({"filter", in, out, "--window", "5x5", "--percentile", "0.5", "--check"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("N=25 M=13") != std::string::npos);
  CHECK(r.out.find("check=ok") != std::string::npos);
  CHECK(read_pgm_file(out).image == oracle::filter_image_oracle(img, WindowShape::rect(5, 5), 13, Border::Clamp));

  r = invoke({"filter", in, out, "--window", "diamond5", "--rank", "1", "--check", "--threads", "3"});
  CHECK(r.code == cli::kExitOk);
  CHECK(read_pgm_file(out).image == oracle::filter_image_oracle(img, WindowShape::diamond(5), 1, Border::Clamp));

  r = invoke({"filter", in, out, "--window", "9x9", "--engine", "sliding", "--rank", "48", "--check"});
  CHECK(r.code == cli::kExitOk);

  r = invoke({"filter", in, out, "--window", "3x5", "--engine", "multichannel", "--rank", "4", "--border",
              "valid", "--check"});
  CHECK(r.code == cli::kExitOk);
  CHECK(read_pgm_file(out).image.width == 18);

  {
    std::ofstream offs(dir / "cross.txt");
    offs << "# plus shape\n0 -1\n-1 0\n0 0\n1 0\n0 1\n";
  }
  r = invoke({"filter", in, out, "--window", "custom=" + (dir / "cross.txt").string(), "--rank", "3", "--check"});
  CHECK(r.code == cli::kExitOk);
  CHECK(read_pgm_file(out).image == oracle::filter_image_oracle(img, WindowShape::diamond(3), 3, Border::Clamp));

  r = invoke({"filter", in, out, "--window", "9x9", "--engine", "9753", "--percentile", "0.5", "--check"});
  CHECK(r.code == cli::kExitOk);
  CHECK(fs::exists(dir / "out_3x3.pgm"));
  CHECK(read_pgm_file((dir / "out_5x5.pgm").string()).image ==
        oracle::filter_image_oracle(img, WindowShape::rect(5, 5), 13, Border::Clamp));

  CHECK(invoke({"filter", in, out, "--window", "3x3", "--rank", "10"}).code == cli::kExitInvalid);
  CHECK(invoke({"filter", in, out, "--window", "triangle", "--rank", "1"}).code == cli::kExitInvalid);
  CHECK(invoke({"filter", (dir / "missing.pgm").string(), out, "--rank", "1"}).code == cli::kExitInvalid);
  fs::remove_all(dir);
}

TEST_CASE("bench subcommand") {
  auto r = invoke({"bench"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("13.9") != std::string::npos);
  CHECK(r.out.find("38.8") != std::string::npos);

  r = invoke({"bench", "--clock", "250e6", "--window", "9x9", "--engine", "sliding"});
  REQUIRE(r.code == cli::kExitOk);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 3);
  std::istringstream row(rows[2]);
  std::string name;
  int n = 0;
  int cpr = 0;
  row >> name >> n >> cpr;
  CHECK(name == "9x9");
  CHECK(n == 81);
  CHECK(cpr == 1);

  r = invoke({"bench", "--window", "3x3", "--simulate", "--sim-width", "16", "--sim-height", "8"});
  CHECK(r.code == cli::kExitOk);

  CHECK(invoke({"bench", "--width", "0"}).code == cli::kExitInvalid);
}
