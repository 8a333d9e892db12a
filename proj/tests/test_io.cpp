#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "pldeconv/error.hpp"
#include "pldeconv/io.hpp"
#include "support.hpp"

using namespace pldeconv;
namespace fs = std::filesystem;

namespace {

// Fresh directory per test case, removed afterwards.
struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("pldeconv_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& name) const { return path / name; }
};

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string float_bytes(float f, bool big_endian) {
  char b[4];
  std::memcpy(b, &f, 4);
  if (big_endian == (std::endian::native == std::endian::little)) {
    std::swap(b[0], b[3]);
    std::swap(b[1], b[2]);
  }
  return std::string(b, 4);
}

Image float_image(int h, int w, std::uint64_t seed) {
  // Values representable as float so the round trip is exact.
  Image x = testing::random_image(h, w, seed, 0, 100);
  for (double& v : x.pixels()) v = static_cast<float>(v);
  return x;
}

}  // namespace

TEST_SUITE("pfm") {
  TEST_CASE("round trip is bitwise") {
    TempDir d;
    const Image x = float_image(3, 3, 1);
    io::write_pfm(d / "a.pfm", x);
    CHECK(io::read_pfm(d / "a.pfm") == x);
    const Image y = float_image(5, 8, 2);
    io::write_pfm(d / "b.pfm", y);
    CHECK(io::read_pfm(d / "b.pfm") == y);
  }

  TEST_CASE("writer layout: little-endian token, bottom row first") {
    TempDir d;
    Image x(2, 1);
    x(0, 0) = 1.0;  // top
    x(1, 0) = 2.0;  // bottom
    io::write_pfm(d / "a.pfm", x);
    const std::string want = "Pf\n1 2\n-1.0\n" + float_bytes(2.0f, false) + float_bytes(1.0f, false);
    CHECK(read_bytes(d / "a.pfm") == want);
  }

  TEST_CASE("big-endian fixture is byte-swapped") {
    TempDir d;
    // 2x2, rows stored bottom-up: bottom row (3, 4), top row (1, 2).
    const std::string bytes = "Pf\n2 2\n1.0\n" + float_bytes(3.0f, true) + float_bytes(4.0f, true) +
                              float_bytes(1.0f, true) + float_bytes(2.0f, true);
    write_bytes(d / "be.pfm", bytes);
    const Image x = io::read_pfm(d / "be.pfm");
    CHECK(x(0, 0) == 1.0);
    CHECK(x(0, 1) == 2.0);
    CHECK(x(1, 0) == 3.0);
    CHECK(x(1, 1) == 4.0);
  }

  TEST_CASE("malformed files are rejected") {
    TempDir d;
    write_bytes(d / "w0.pfm", "Pf\n0 2\n-1.0\n");
    CHECK_THROWS_AS(io::read_pfm(d / "w0.pfm"), FormatError);
    write_bytes(d / "color.pfm", "PF\n1 1\n-1.0\n" + float_bytes(1, false));
    CHECK_THROWS_AS(io::read_pfm(d / "color.pfm"), FormatError);
    write_bytes(d / "short.pfm", "Pf\n2 2\n-1.0\n" + float_bytes(1, false));
    CHECK_THROWS_AS(io::read_pfm(d / "short.pfm"), FormatError);
    write_bytes(d / "scale.pfm", "Pf\n1 1\n0\n" + float_bytes(1, false));
    CHECK_THROWS_AS(io::read_pfm(d / "scale.pfm"), FormatError);
    write_bytes(d / "nan.pfm", "Pf\n1 1\n-1.0\n" + float_bytes(NAN, false));
    CHECK_THROWS_AS(io::read_pfm(d / "nan.pfm"), FormatError);
    CHECK_THROWS_AS(io::read_pfm(d / "missing.pfm"), FormatError);
  }
}

TEST_SUITE("pgm") {
  TEST_CASE("constant one maps to 255") {
    TempDir d;
    io::write_pgm(d / "a.pgm", Image(3, 4, 1.0));
    const std::string bytes = read_bytes(d / "a.pgm");
    CHECK(bytes == "P5\n4 3\n255\n" + std::string(12, '\xff'));
  }

  TEST_CASE("round trip within half a quantization step, 8 and 16 bit") {
    TempDir d;
    const Image x = testing::random_image(7, 9, 3);
    for (int maxval : {255, 65535}) {
      io::write_pgm(d / "a.pgm", x, 1.0, maxval);
      const Image y = io::read_pgm(d / "a.pgm");
      CHECK(testing::max_abs_diff(x, y) <= 0.5 / maxval + 1e-12);
    }
  }

  TEST_CASE("peak scaling and clipping") {
    TempDir d;
    Image x(1, 3);
    x(0, 0) = -1.0;
    x(0, 1) = 10.0;
    x(0, 2) = 40.0;
    io::write_pgm(d / "a.pgm", x, 20.0);
    const Image y = io::read_pgm(d / "a.pgm");
    CHECK(y(0, 0) == 0.0);
    CHECK(y(0, 1) == doctest::Approx(128.0 / 255));
    CHECK(y(0, 2) == 1.0);
    CHECK_THROWS_AS(io::write_pgm(d / "b.pgm", x, 0.0), DomainError);
  }

  TEST_CASE("comment lines in the header") {
    TempDir d;
    std::string bytes = "P5\n# made by hand\n2 # width\n1\n# max\n255\n";
    bytes.push_back('\x00');
    bytes.push_back('\x80');
    write_bytes(d / "c.pgm", bytes);
    const Image x = io::read_pgm(d / "c.pgm");
    REQUIRE(x.width() == 2);
    REQUIRE(x.height() == 1);
    CHECK(x(0, 0) == 0.0);
    CHECK(x(0, 1) == doctest::Approx(128.0 / 255));
  }

  TEST_CASE("16-bit samples are big-endian") {
    TempDir d;
    std::string bytes = "P5\n1 1\n65535\n";
    bytes.push_back('\x01');
    bytes.push_back('\x02');
    write_bytes(d / "a.pgm", bytes);
    CHECK(io::read_pgm(d / "a.pgm")(0, 0) == doctest::Approx(258.0 / 65535));
  }

  TEST_CASE("malformed") {
    TempDir d;
    write_bytes(d / "a.pgm", "P2\n1 1\n255\n0");
    CHECK_THROWS_AS(io::read_pgm(d / "a.pgm"), FormatError);
    write_bytes(d / "b.pgm", "P5\n2 2\n255\nab");
    CHECK_THROWS_AS(io::read_pgm(d / "b.pgm"), FormatError);
  }
}

TEST_SUITE("text formats") {
  TEST_CASE("kernel round trip") {
    TempDir d;
    io::write_kernel_text(d / "delta.txt", Kernel::delta(5));
    CHECK(io::read_kernel_text(d / "delta.txt") == Kernel::delta(5));

    const Kernel h = testing::random_kernel(6, 4);
    io::write_kernel_text(d / "h.txt", h);
    const Kernel g = io::read_kernel_text(d / "h.txt");
    CHECK(testing::max_abs_diff(g.grid(), h.grid()) <= 1e-12);
    CHECK(read_bytes(d / "h.txt").substr(0, 2) == "6\n");
  }

  TEST_CASE("kernel validation on read") {
    TempDir d;
    write_bytes(d / "a.txt", "2\n0.3 0.2\n0.2 0.2\n");
    CHECK_THROWS_AS(io::read_kernel_text(d / "a.txt"), ValidationError);
    write_bytes(d / "b.txt", "2\n0.5 -0.1\n0.3 0.3\n");
    CHECK_THROWS_AS(io::read_kernel_text(d / "b.txt"), ValidationError);
    write_bytes(d / "c.txt", "2\n0.5 0.5\n");
    CHECK_THROWS_AS(io::read_kernel_text(d / "c.txt"), FormatError);
    // Within the read tolerance: accepted and renormalized.
    write_bytes(d / "d.txt", "1\n1.0000005\n");
    CHECK(io::read_kernel_text(d / "d.txt") == Kernel::delta(1));
  }

  TEST_CASE("key points round trip") {
    TempDir d;
    const KeyPoints z({{0, 0}, {1.25, -3.5}, {0.1, 1.0 / 3}, {7, 2}});
    io::write_keypoints_json(d / "z.json", z);
    const KeyPoints w = io::read_keypoints_json(d / "z.json");
    REQUIRE(w.count() == 4);
    for (int i = 0; i < 4; ++i) {
      CHECK(std::abs(w.points()[i].x - z.points()[i].x) <= 1e-12);
      CHECK(std::abs(w.points()[i].y - z.points()[i].y) <= 1e-12);
    }
    const auto j = nlohmann::json::parse(read_bytes(d / "z.json"));
    CHECK(j.at("k") == 4);
  }

  TEST_CASE("key points validation") {
    TempDir d;
    write_bytes(d / "a.json", R"({"k": 3, "points": [[0,0],[1,1]]})");
    CHECK_THROWS_AS(io::read_keypoints_json(d / "a.json"), FormatError);
    write_bytes(d / "b.json", R"({"k": 2, "points": [[1,0],[1,1]]})");
    CHECK_THROWS_AS(io::read_keypoints_json(d / "b.json"), ValidationError);
    write_bytes(d / "c.json", "{not json");
    CHECK_THROWS_AS(io::read_keypoints_json(d / "c.json"), FormatError);
  }

  TEST_CASE("trace csv") {
    TempDir d;
    const std::vector<TraceEntry> s1{{0, 2.0, 0.05}, {1, 1.5, 0.05}};
    const std::vector<TraceEntry> s2{{0, 1.4, 2.0}};
    io::write_trace_csv(d / "t.csv", s1, s2);
    const std::string text = read_bytes(d / "t.csv");
    CHECK(text.rfind("stage,iteration,loss,step_size\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
    CHECK(text.find("\n2,0,1.399999") != std::string::npos);
  }
}

TEST_SUITE("config") {
  TEST_CASE("round trip keeps every field") {
    EstimateConfig c;
    c.render = {21, 512, Centering::None};
    c.solver.rl_iterations = 7;
    c.solver.tv_weight = 0.1;
    c.solver.boundary = Boundary::Circular;
    c.init.c0 = 0.5;
    c.stage1.step_size = 0.3;
    c.stage2.loss_mode = LossMode::GradientDomain;
    c.hqs.gamma = 1e-3;
    c.denoiser = denoisers::AnscombeGaussian{2.5};
    c.fd_eps = 0.01;
    c.skip_stage1 = true;
    const EstimateConfig d = io::config_from_json(io::config_to_json(c));
    CHECK(io::config_to_json(d) == io::config_to_json(c));
    CHECK(d.render.kernel_size == 21);
    CHECK(d.solver.tv_weight == 0.1);
    CHECK(std::get<denoisers::AnscombeGaussian>(d.denoiser).sigma == 2.5);
  }

  TEST_CASE("partial documents overlay the base") {
    const auto j = nlohmann::json::parse(R"({"solver": {"rl_iterations": 9}})");
    const EstimateConfig d = io::config_from_json(j);
    CHECK(d.solver.rl_iterations == 9);
    CHECK(d.solver.tv_weight == EstimateConfig{}.solver.tv_weight);
    CHECK(d.stage1.step_size == EstimateConfig{}.stage1.step_size);
  }

  TEST_CASE("unknown keys and bad enums are rejected") {
    CHECK_THROWS_AS(io::config_from_json(nlohmann::json::parse(R"({"solvr": {}})")), FormatError);
    CHECK_THROWS_AS(io::config_from_json(nlohmann::json::parse(R"({"solver": {"boundary": "wrap"}})")),
                    FormatError);
    CHECK_THROWS_AS(io::config_from_json(nlohmann::json::parse(R"({"solver": {"rl_iterations": "x"}})")),
                    FormatError);
  }
}

TEST_SUITE("dataset") {
  TEST_CASE("files, manifest and regeneration") {
    TempDir d;
    const io::DatasetManifest m{10, 4, 123, 0.3, RenderConfig{}};
    const auto samples = generate_kernel_dataset(m.count, m.keypoints, m.render, m.seed, m.scale);
    io::write_kernel_dataset(d / "ds", m, samples);
    for (int i = 0; i < 10; ++i) {
      CHECK(fs::exists(d / "ds" / io::kernel_filename(i)));
      const Kernel h = io::read_kernel_text(d / "ds" / io::kernel_filename(i));
      CHECK(std::abs(sum(h.grid()) - 1.0) <= 1e-9);
    }
    const std::string index = read_bytes(d / "ds" / "keypoints.jsonl");
    CHECK(std::count(index.begin(), index.end(), '\n') == 10);

    const io::DatasetManifest back =
        io::manifest_from_json(nlohmann::json::parse(read_bytes(d / "ds" / "manifest.json")));
    CHECK(back.seed == 123);
    CHECK(back.count == 10);
    const auto again = generate_kernel_dataset(back.count, back.keypoints, back.render, back.seed, back.scale);
    io::write_kernel_dataset(d / "ds2", back, again);
    for (int i = 0; i < 10; ++i) {
      CHECK(read_bytes(d / "ds" / io::kernel_filename(i)) == read_bytes(d / "ds2" / io::kernel_filename(i)));
    }
    CHECK(read_bytes(d / "ds" / "keypoints.jsonl") == read_bytes(d / "ds2" / "keypoints.jsonl"));
  }

  TEST_CASE("kernel file names") { CHECK(io::kernel_filename(7) == "kernel_000007.txt"); }
}
