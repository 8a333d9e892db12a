#include "pldeconv/io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pldeconv/error.hpp"

namespace pldeconv::io {

using nlohmann::json;

namespace {

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  return out;
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in, const fs::path& path) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  if (tok.empty()) throw FormatError(path.string() + ": truncated header");
  return tok;
}

int parse_dimension(const std::string& tok, const fs::path& path) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    throw FormatError(path.string() + ": bad dimension '" + tok + "'");
  }
  if (used != tok.size() || v < 1 || v > (1L << 24)) {
    throw FormatError(path.string() + ": bad dimension '" + tok + "'");
  }
  return static_cast<int>(v);
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

// --- PFM --------------------------------------------------------------------

Image read_pfm(const fs::path& path) {
  auto in = open_in(path);
  const std::string magic = header_token(in, path);
  if (magic != "Pf") throw FormatError(path.string() + ": not a grayscale PFM (magic '" + magic + "')");
  const int width = parse_dimension(header_token(in, path), path);
  const int height = parse_dimension(header_token(in, path), path);
  const std::string scale_tok = header_token(in, path);
  double scale = 0.0;
  try {
    scale = std::stod(scale_tok);
  } catch (const std::exception&) {
    throw FormatError(path.string() + ": bad scale token '" + scale_tok + "'");
  }
  if (scale == 0.0 || !std::isfinite(scale)) {
    throw FormatError(path.string() + ": bad scale token '" + scale_tok + "'");
  }
  const bool little = scale < 0.0;

  const std::size_t count = static_cast<std::size_t>(width) * height;
  std::vector<std::uint32_t> raw(count);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count * 4));
  if (static_cast<std::size_t>(in.gcount()) != count * 4) {
    throw FormatError(path.string() + ": truncated payload");
  }
  const bool host_little = std::endian::native == std::endian::little;
  Image x(height, width);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      std::uint32_t bits = raw[static_cast<std::size_t>(height - 1 - r) * width + c];
      if (little != host_little) bits = __builtin_bswap32(bits);
      const float f = std::bit_cast<float>(bits);
      if (!std::isfinite(f)) throw FormatError(path.string() + ": non-finite sample");
      x(r, c) = f;
    }
  }
  return x;
}

void write_pfm(const fs::path& path, const Image& x) {
  auto out = open_out(path);
  out << "Pf\n" << x.width() << ' ' << x.height() << "\n-1.0\n";
  std::vector<std::uint32_t> raw(x.size());
  const bool host_little = std::endian::native == std::endian::little;
  for (int r = 0; r < x.height(); ++r) {
    for (int c = 0; c < x.width(); ++c) {
      std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(x(r, c)));
      if (!host_little) bits = __builtin_bswap32(bits);
      raw[static_cast<std::size_t>(x.height() - 1 - r) * x.width() + c] = bits;
    }
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 4));
  if (!out) throw FormatError("failed writing " + path.string());
}

// --- PGM --------------------------------------------------------------------

void write_pgm(const fs::path& path, const Image& x, double peak, int maxval) {
  if (!(peak > 0.0)) throw DomainError("write_pgm: peak must be positive");
  if (maxval != 255 && maxval != 65535) throw DomainError("write_pgm: maxval must be 255 or 65535");
  auto out = open_out(path);
  out << "P5\n" << x.width() << ' ' << x.height() << '\n' << maxval << '\n';
  std::vector<unsigned char> bytes;
  bytes.reserve(x.size() * (maxval > 255 ? 2 : 1));
  for (double v : x.pixels()) {
    const double q = std::clamp(std::round(v / peak * maxval), 0.0, static_cast<double>(maxval));
    const auto s = static_cast<unsigned>(q);
    if (maxval > 255) bytes.push_back(static_cast<unsigned char>(s >> 8));
    bytes.push_back(static_cast<unsigned char>(s & 0xFF));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("failed writing " + path.string());
}

Image read_pgm(const fs::path& path) {
  auto in = open_in(path);
  const std::string magic = header_token(in, path);
  if (magic != "P5") throw FormatError(path.string() + ": not a binary PGM (magic '" + magic + "')");
  const int width = parse_dimension(header_token(in, path), path);
  const int height = parse_dimension(header_token(in, path), path);
  const int maxval = parse_dimension(header_token(in, path), path);
  if (maxval > 65535) throw FormatError(path.string() + ": maxval out of range");
  const int bytes_per = maxval > 255 ? 2 : 1;
  const std::size_t count = static_cast<std::size_t>(width) * height;
  std::vector<unsigned char> raw(count * bytes_per);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw FormatError(path.string() + ": truncated payload");
  }
  Image x(height, width);
  auto px = x.pixels();
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned s = bytes_per == 2 ? (raw[2 * i] << 8 | raw[2 * i + 1]) : raw[i];
    if (static_cast<int>(s) > maxval) throw FormatError(path.string() + ": sample exceeds maxval");
    px[i] = static_cast<double>(s) / maxval;
  }
  return x;
}

// --- Key points ------------------------------------------------------------------

json keypoints_to_json(const KeyPoints& z) {
  json pts = json::array();
  for (const Point2& p : z.points()) pts.push_back({p.x, p.y});
  return json{{"k", z.count()}, {"points", pts}};
}

KeyPoints keypoints_from_json(const json& j) {
  try {
    const int k = j.at("k").get<int>();
    std::vector<Point2> pts;
    for (const auto& p : j.at("points")) {
      if (!p.is_array() || p.size() != 2) throw FormatError("key point must be [x, y]");
      pts.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    if (static_cast<int>(pts.size()) != k) {
      throw FormatError("key points: k = " + std::to_string(k) + " but " +
                        std::to_string(pts.size()) + " points listed");
    }
    return KeyPoints(std::move(pts));
  } catch (const json::exception& e) {
    throw FormatError(std::string("key points JSON: ") + e.what());
  }
}

KeyPoints read_keypoints_json(const fs::path& path) {
  auto in = open_in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return keypoints_from_json(j);
}

void write_keypoints_json(const fs::path& path, const KeyPoints& z) {
  auto out = open_out(path);
  out << keypoints_to_json(z).dump() << '\n';
}

// --- Kernel text ---------------------------------------------------------------

Kernel read_kernel_text(const fs::path& path) {
  auto in = open_in(path);
  int m = 0;
  if (!(in >> m) || m < 1 || m > 4096) throw FormatError(path.string() + ": bad kernel size");
  Image g(m, m);
  for (double& v : g.pixels()) {
    if (!(in >> v)) throw FormatError(path.string() + ": truncated kernel");
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError(path.string() + ": kernel entries must be finite and nonnegative");
    }
  }
  std::string extra;
  if (in >> extra) throw FormatError(path.string() + ": trailing data after kernel");
  const double s = sum(g);
  if (std::abs(s - 1.0) > kKernelReadTolerance) {
    throw ValidationError(path.string() + ": kernel sums to " + format_double(s) + ", expected 1");
  }
  // Decimal rounding of M^2 entries can leave the sum a few ulps off.
  for (double& v : g.pixels()) v /= s;
  return Kernel(std::move(g));
}

void write_kernel_text(const fs::path& path, const Kernel& h) {
  auto out = open_out(path);
  out << h.size() << '\n';
  for (int r = 0; r < h.size(); ++r) {
    for (int c = 0; c < h.size(); ++c) {
      if (c) out << ' ';
      out << format_double(h(r, c));
    }
    out << '\n';
  }
  if (!out) throw FormatError("failed writing " + path.string());
}

// --- Trace CSV -------------------------------------------------------------------

void write_trace_csv(const fs::path& path, const std::vector<TraceEntry>& stage1,
                     const std::vector<TraceEntry>& stage2) {
  auto out = open_out(path);
  out << "stage,iteration,loss,step_size\n";
  for (const auto& e : stage1) {
    out << "1," << e.iteration << ',' << format_double(e.loss) << ',' << format_double(e.step_size)
        << '\n';
  }
  for (const auto& e : stage2) {
    out << "2," << e.iteration << ',' << format_double(e.loss) << ',' << format_double(e.step_size)
        << '\n';
  }
}

// --- Configuration -----------------------------------------------------------------

namespace {

const char* to_string(Boundary b) { return b == Boundary::Symmetric ? "symmetric" : "circular"; }
const char* to_string(LossMode m) { return m == LossMode::Intensity ? "intensity" : "gradient"; }
const char* to_string(Centering c) { return c == Centering::Centroid ? "centroid" : "none"; }

Boundary boundary_from(const std::string& s) {
  if (s == "symmetric") return Boundary::Symmetric;
  if (s == "circular") return Boundary::Circular;
  throw FormatError("unknown boundary '" + s + "'");
}

LossMode loss_from(const std::string& s) {
  if (s == "intensity") return LossMode::Intensity;
  if (s == "gradient") return LossMode::GradientDomain;
  throw FormatError("unknown loss mode '" + s + "'");
}

Centering centering_from(const std::string& s) {
  if (s == "centroid") return Centering::Centroid;
  if (s == "none") return Centering::None;
  throw FormatError("unknown centering '" + s + "'");
}

json stage_json(const StageConfig& s) {
  return {{"step_size", s.step_size},
          {"max_iters", s.max_iters},
          {"min_step", s.min_step},
          {"loss_mode", to_string(s.loss_mode)}};
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) throw FormatError(std::string(where) + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw FormatError(std::string(where) + ": unknown key '" + key + "'");
  }
}

template <typename T>
void overlay(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

void stage_overlay(const json& j, StageConfig& s, const char* where) {
  check_keys(j, {"step_size", "max_iters", "min_step", "loss_mode"}, where);
  overlay(j, "step_size", s.step_size);
  overlay(j, "max_iters", s.max_iters);
  overlay(j, "min_step", s.min_step);
  if (j.contains("loss_mode")) s.loss_mode = loss_from(j.at("loss_mode").get<std::string>());
}

}  // namespace

json config_to_json(const EstimateConfig& cfg) {
  json denoiser = std::visit(
      [](const auto& d) -> json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, denoisers::AnscombeGaussian>) {
          return {{"kind", "anscombe"}, {"sigma", d.sigma}};
        } else if constexpr (std::is_same_v<T, denoisers::Oracle>) {
          return {{"kind", "oracle"}};
        } else {
          return {{"kind", "identity"}};
        }
      },
      cfg.denoiser);
  return {
      {"render",
       {{"kernel_size", cfg.render.kernel_size},
        {"samples", cfg.render.samples},
        {"centering", to_string(cfg.render.centering)}}},
      {"solver",
       {{"rl_iterations", cfg.solver.rl_iterations},
        {"floor_eps", cfg.solver.floor_eps},
        {"tv_weight", cfg.solver.tv_weight},
        {"boundary", to_string(cfg.solver.boundary)}}},
      {"init",
       {{"c0", cfg.init.c0},
        {"c1", cfg.init.c1},
        {"sigma_b", cfg.init.sigma_b},
        {"theta_step", cfg.init.theta_step},
        {"keypoints", cfg.init.keypoints}}},
      {"stage1", stage_json(cfg.stage1)},
      {"stage2", stage_json(cfg.stage2)},
      {"hqs", {{"mu0", cfg.hqs.mu0}, {"gamma", cfg.hqs.gamma}, {"mu_growth", cfg.hqs.mu_growth}}},
      {"denoiser", denoiser},
      {"photon",
       {{"percentile", cfg.photon.percentile}, {"smoothing_radius", cfg.photon.smoothing_radius}}},
      {"fd_eps", cfg.fd_eps},
      {"skip_stage1", cfg.skip_stage1},
  };
}

EstimateConfig config_from_json(const json& j, EstimateConfig cfg) {
  try {
    check_keys(j, {"render", "solver", "init", "stage1", "stage2", "hqs", "denoiser", "photon",
                   "fd_eps", "skip_stage1"},
               "config");
    if (j.contains("render")) {
      const json& r = j.at("render");
      check_keys(r, {"kernel_size", "samples", "centering"}, "config.render");
      overlay(r, "kernel_size", cfg.render.kernel_size);
      overlay(r, "samples", cfg.render.samples);
      if (r.contains("centering")) {
        cfg.render.centering = centering_from(r.at("centering").get<std::string>());
      }
    }
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      check_keys(s, {"rl_iterations", "floor_eps", "boundary", "tv_weight"}, "config.solver");
      overlay(s, "rl_iterations", cfg.solver.rl_iterations);
      overlay(s, "floor_eps", cfg.solver.floor_eps);
      overlay(s, "tv_weight", cfg.solver.tv_weight);
      if (s.contains("boundary")) {
        cfg.solver.boundary = boundary_from(s.at("boundary").get<std::string>());
      }
    }
    if (j.contains("init")) {
      const json& i = j.at("init");
      check_keys(i, {"c0", "c1", "sigma_b", "theta_step", "keypoints"}, "config.init");
      overlay(i, "c0", cfg.init.c0);
      overlay(i, "c1", cfg.init.c1);
      overlay(i, "sigma_b", cfg.init.sigma_b);
      overlay(i, "theta_step", cfg.init.theta_step);
      overlay(i, "keypoints", cfg.init.keypoints);
    }
    if (j.contains("stage1")) stage_overlay(j.at("stage1"), cfg.stage1, "config.stage1");
    if (j.contains("stage2")) stage_overlay(j.at("stage2"), cfg.stage2, "config.stage2");
    if (j.contains("hqs")) {
      const json& h = j.at("hqs");
      check_keys(h, {"mu0", "gamma", "mu_growth"}, "config.hqs");
      overlay(h, "mu0", cfg.hqs.mu0);
      overlay(h, "gamma", cfg.hqs.gamma);
      overlay(h, "mu_growth", cfg.hqs.mu_growth);
    }
    if (j.contains("denoiser")) {
      const json& d = j.at("denoiser");
      check_keys(d, {"kind", "sigma"}, "config.denoiser");
      const std::string kind = d.at("kind").get<std::string>();
      if (kind == "anscombe") {
        denoisers::AnscombeGaussian a;
        overlay(d, "sigma", a.sigma);
        cfg.denoiser = a;
      } else if (kind == "identity") {
        cfg.denoiser = denoisers::Identity{};
      } else if (kind != "oracle") {
        throw FormatError("unknown denoiser kind '" + kind + "'");
      }
    }
    if (j.contains("photon")) {
      const json& p = j.at("photon");
      check_keys(p, {"percentile", "smoothing_radius"}, "config.photon");
      overlay(p, "percentile", cfg.photon.percentile);
      overlay(p, "smoothing_radius", cfg.photon.smoothing_radius);
    }
    overlay(j, "fd_eps", cfg.fd_eps);
    overlay(j, "skip_stage1", cfg.skip_stage1);
  } catch (const json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  return cfg;
}

// --- Dataset ---------------------------------------------------------------------

json manifest_to_json(const DatasetManifest& m) {
  return {{"count", m.count},
          {"keypoints", m.keypoints},
          {"seed", m.seed},
          {"scale", m.scale},
          {"kernel_size", m.render.kernel_size},
          {"samples", m.render.samples},
          {"centering", to_string(m.render.centering)}};
}

DatasetManifest manifest_from_json(const json& j) {
  try {
    DatasetManifest m;
    m.count = j.at("count").get<int>();
    m.keypoints = j.at("keypoints").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.scale = j.at("scale").get<double>();
    m.render.kernel_size = j.at("kernel_size").get<int>();
    m.render.samples = j.at("samples").get<int>();
    m.render.centering = centering_from(j.at("centering").get<std::string>());
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
}

std::string kernel_filename(int index) {
  std::ostringstream os;
  os << "kernel_" << std::setw(6) << std::setfill('0') << index << ".txt";
  return os.str();
}

void write_kernel_dataset(const fs::path& dir, const DatasetManifest& manifest,
                          const std::vector<KernelSample>& samples) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw FormatError("cannot create " + dir.string() + ": " + ec.message());
  auto index = open_out(dir / "keypoints.jsonl");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::string name = kernel_filename(static_cast<int>(i));
    write_kernel_text(dir / name, samples[i].kernel);
    json rec = keypoints_to_json(samples[i].keypoints);
    rec["index"] = i;
    rec["kernel"] = name;
    index << rec.dump() << '\n';
  }
  auto out = open_out(dir / "manifest.json");
  out << manifest_to_json(manifest).dump(2) << '\n';
}

}  // namespace pldeconv::io
