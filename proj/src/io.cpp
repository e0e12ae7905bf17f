#include "hopboost/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace hopboost::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'H', 'B', 'E', 'M'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 24;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorCode::kIo, "error reading '" + path + "'");
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) fail(ErrorCode::kIo, "error writing '" + path + "'");
}

template <typename T>
T load_le(const unsigned char* p) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<U>(p[i]) << (8 * i);
  return std::bit_cast<T>(v);
}

template <typename T>
void store_le(std::string& out, T value) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const U v = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(trim(std::string_view(line).substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& field, const std::string& path, std::size_t line) {
  double v = 0.0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || field.empty())
    fail(ErrorCode::kParse, "'" + path + "' line " + std::to_string(line) + ": cannot parse '" +
                                field + "' as a number");
  if (!std::isfinite(v))
    fail(ErrorCode::kNonFinite,
         "'" + path + "' line " + std::to_string(line) + ": non-finite value");
  return v;
}

std::uint64_t parse_uint(const std::string& field, const std::string& path, std::size_t line) {
  std::uint64_t v = 0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || field.empty())
    fail(ErrorCode::kParse, "'" + path + "' line " + std::to_string(line) + ": cannot parse '" +
                                field + "' as a non-negative integer");
  return v;
}

// Lines without trailing '\r' and with blank lines dropped, numbered from 1.
std::vector<std::pair<std::size_t, std::string>> lines_of(const std::string& text) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = trim(line);
    if (!t.empty()) out.emplace_back(n, t);
  }
  return out;
}

PatternMemory read_binary(const std::string& path) {
  const std::string raw = read_file(path);
  const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
  if (raw.size() < 4 || std::memcmp(raw.data(), kMagic, 4) != 0)
    fail(ErrorCode::kBadMagic, "'" + path + "' is not an HBEM embedding file (bad magic)");
  if (raw.size() < kHeaderBytes)
    fail(ErrorCode::kTruncated, "'" + path + "' has a truncated header");
  const auto version = load_le<std::uint32_t>(p + 4);
  if (version != kVersion)
    fail(ErrorCode::kBadVersion,
         "'" + path + "' has unsupported version " + std::to_string(version));
  const auto dtype = load_le<std::uint32_t>(p + 8);
  if (dtype != 1 && dtype != 2)
    fail(ErrorCode::kBadDtype, "'" + path + "' has unknown dtype " + std::to_string(dtype));
  const auto d = load_le<std::uint32_t>(p + 12);
  const auto n = load_le<std::uint64_t>(p + 16);
  if (d == 0) fail(ErrorCode::kZeroDim, "'" + path + "' declares dimension 0");
  if (n == 0) fail(ErrorCode::kData, "'" + path + "' holds no patterns");
  const std::size_t width = dtype == 1 ? 4 : 8;
  const std::size_t payload = raw.size() - kHeaderBytes;
  if (n > payload / width / d || payload != static_cast<std::size_t>(n) * d * width)
    fail(ErrorCode::kTruncated, "'" + path + "' payload has " + std::to_string(payload) +
                                    " bytes, header requires " +
                                    std::to_string(static_cast<unsigned long long>(n) * d * width));
  Eigen::MatrixXd m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
  const unsigned char* q = p + kHeaderBytes;
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint32_t k = 0; k < d; ++k) {
      const double v = dtype == 1 ? static_cast<double>(load_le<float>(q)) : load_le<double>(q);
      q += width;
      if (!std::isfinite(v))
        fail(ErrorCode::kNonFinite, "'" + path + "' pattern " + std::to_string(i) +
                                        " contains NaN or Inf");
      m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = v;
    }
  return PatternMemory::detect(std::move(m));
}

PatternMemory read_csv(const std::string& path) {
  const auto lines = lines_of(read_file(path));
  if (lines.empty() || lines[0].second.rfind("d=", 0) != 0)
    fail(ErrorCode::kParse, "'" + path + "' must start with a line 'd=<int>'");
  const std::uint64_t d = parse_uint(lines[0].second.substr(2), path, lines[0].first);
  if (d == 0) fail(ErrorCode::kZeroDim, "'" + path + "' declares dimension 0");
  const std::size_t n = lines.size() - 1;
  if (n == 0) fail(ErrorCode::kData, "'" + path + "' holds no patterns");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [lineno, text] = lines[i + 1];
    const auto fields = split(text, ',');
    if (fields.size() != d)
      fail(ErrorCode::kDimensionMismatch, "'" + path + "' line " + std::to_string(lineno) +
                                              " has " + std::to_string(fields.size()) +
                                              " values, expected " + std::to_string(d));
    for (std::size_t k = 0; k < d; ++k)
      m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
          parse_double(fields[k], path, lineno);
  }
  return PatternMemory::detect(std::move(m));
}

// Reads a two-column CSV with the given header; returns the second column
// after checking that the first counts 0, 1, 2, …
std::vector<std::string> read_indexed(const std::string& path, const char* header,
                                      std::vector<std::size_t>* linenos) {
  const auto lines = lines_of(read_file(path));
  if (lines.empty() || lines[0].second != header)
    fail(ErrorCode::kParse, "'" + path + "' must start with the header '" + header + "'");
  std::vector<std::string> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [lineno, text] = lines[i];
    const auto fields = split(text, ',');
    if (fields.size() != 2)
      fail(ErrorCode::kParse, "'" + path + "' line " + std::to_string(lineno) +
                                  " must have two fields");
    if (parse_uint(fields[0], path, lineno) != i - 1)
      fail(ErrorCode::kParse, "'" + path + "' line " + std::to_string(lineno) +
                                  " is out of sequence");
    out.push_back(fields[1]);
    linenos->push_back(lineno);
  }
  if (out.empty()) fail(ErrorCode::kData, "'" + path + "' has no rows");
  return out;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    fail(ErrorCode::kIo, "cannot create directory '" + dir + "': " + ec.message());
}

}  // namespace

EmbFormat format_from_path(const std::string& path) {
  std::string ext = fs::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".csv" ? EmbFormat::kCsv : EmbFormat::kBinary;
}

PatternMemory read_embeddings(const std::string& path, EmbFormat format) {
  return format == EmbFormat::kCsv ? read_csv(path) : read_binary(path);
}

PatternMemory read_embeddings(const std::string& path) {
  return read_embeddings(path, format_from_path(path));
}

void write_embeddings(const std::string& path, const PatternMemory& mem, EmbFormat format,
                      Dtype dtype) {
  const Eigen::MatrixXd& m = mem.data();
  std::string out;
  if (format == EmbFormat::kCsv) {
    out = "d=" + std::to_string(m.rows()) + "\n";
    for (Eigen::Index i = 0; i < m.cols(); ++i) {
      for (Eigen::Index k = 0; k < m.rows(); ++k) {
        if (k) out += ',';
        out += fmt17(m(k, i));
      }
      out += '\n';
    }
  } else {
    if (dtype != Dtype::kF32 && dtype != Dtype::kF64)
      fail(ErrorCode::kBadDtype, "unknown dtype");
    out.append(kMagic, 4);
    store_le<std::uint32_t>(out, kVersion);
    store_le<std::uint32_t>(out, static_cast<std::uint32_t>(dtype));
    store_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.rows()));
    store_le<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.cols(); ++i)
      for (Eigen::Index k = 0; k < m.rows(); ++k) {
        if (dtype == Dtype::kF32)
          store_le<float>(out, static_cast<float>(m(k, i)));
        else
          store_le<double>(out, m(k, i));
      }
  }
  write_file(path, out);
}

void write_values(const std::string& path, std::span<const double> values) {
  std::string out = "index,value\n";
  for (std::size_t i = 0; i < values.size(); ++i)
    out += std::to_string(i) + "," + fmt17(values[i]) + "\n";
  write_file(path, out);
}

std::vector<double> read_values(const std::string& path) {
  std::vector<std::size_t> linenos;
  const auto fields = read_indexed(path, "index,value", &linenos);
  std::vector<double> out(fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i)
    out[i] = parse_double(fields[i], path, linenos[i]);
  return out;
}

void write_indices(const std::string& path, std::span<const std::size_t> indices) {
  std::string out = "draw,index\n";
  for (std::size_t i = 0; i < indices.size(); ++i)
    out += std::to_string(i) + "," + std::to_string(indices[i]) + "\n";
  write_file(path, out);
}

std::vector<std::size_t> read_indices(const std::string& path) {
  std::vector<std::size_t> linenos;
  const auto fields = read_indexed(path, "draw,index", &linenos);
  std::vector<std::size_t> out(fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i)
    out[i] = static_cast<std::size_t>(parse_uint(fields[i], path, linenos[i]));
  return out;
}

std::string metrics_json(const OodMetrics& m) {
  return "{\"fpr95\":" + fmt17(m.fpr95) + ",\"auroc\":" + fmt17(m.auroc) +
         ",\"gamma\":" + fmt17(m.gamma) + "}\n";
}

void write_metrics(const std::string& path, const OodMetrics& m) {
  write_file(path, metrics_json(m));
}

OodMetrics read_metrics(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
    OodMetrics m;
    m.fpr95 = j.at("fpr95").get<double>();
    m.auroc = j.at("auroc").get<double>();
    m.gamma = j.at("gamma").get<double>();
    return m;
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, "'" + path + "': " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Configs

namespace {

double get_number(const json& v, const std::string& key) {
  if (!v.is_number()) fail(ErrorCode::kParse, "config key '" + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(ErrorCode::kRange, "config key '" + key + "' must be finite");
  return d;
}

std::uint64_t get_count(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) fail(ErrorCode::kRange, "config key '" + key + "' must be >= 0");
  fail(ErrorCode::kParse, "config key '" + key + "' must be an integer");
}

bool get_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) fail(ErrorCode::kParse, "config key '" + key + "' must be true or false");
  return v.get<bool>();
}

json parse_object(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("invalid JSON config: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::kParse, "config must be a JSON object");
  return j;
}

void check_scene(const SceneParams& s) {
  if (s.dim < 2) fail(ErrorCode::kRange, "dim must be >= 2");
  if (s.n_id < 1 || s.n_aux < 1 || s.n_per_class < 1)
    fail(ErrorCode::kRange, "pool sizes must be >= 1");
  if (!(s.concentration > 0.0)) fail(ErrorCode::kRange, "concentration must be positive");
  if (!(s.separation > 0.0)) fail(ErrorCode::kRange, "separation must be positive");
  if (!(s.spread >= 0.0)) fail(ErrorCode::kRange, "spread must be >= 0");
  if (!(s.box > 0.0)) fail(ErrorCode::kRange, "box must be positive");
  if (s.grid_points < 1) fail(ErrorCode::kRange, "grid_points must be >= 1");
  if (!(s.grid_extent > 0.0)) fail(ErrorCode::kRange, "grid_extent must be positive");
  if (s.grid_res < 2) fail(ErrorCode::kRange, "grid_res must be >= 2");
}

}  // namespace

ToyPreset apply_config(const std::string& json_text, const ToyPreset& base) {
  const json j = parse_object(json_text);
  ToyPreset p = base;
  ToyConfig& c = p.config;
  SceneParams& s = p.scene;
  for (const auto& [key, v] : j.items()) {
    if (key == "beta") c.beta = get_number(v, key);
    else if (key == "lambda") c.lambda = get_number(v, key);
    else if (key == "lr") c.lr = get_number(v, key);
    else if (key == "lr_growth") c.lr_growth = get_number(v, key);
    else if (key == "steps") c.steps = get_count(v, key);
    else if (key == "resample_every") c.resample_every = get_count(v, key);
    else if (key == "batch_n") c.batch_n = get_count(v, key);
    else if (key == "seed") c.seed = get_count(v, key);
    else if (key == "geometry") {
      if (!v.is_string()) fail(ErrorCode::kParse, "config key 'geometry' must be a string");
      c.geometry = parse_geometry(v.get<std::string>());
    } else if (key == "full_batch") c.full_batch = get_bool(v, key);
    else if (key == "snapshot_every") c.snapshot_every = get_count(v, key);
    else if (key == "enable_ce") p.enable_ce = get_bool(v, key);
    else if (key == "dim") s.dim = get_count(v, key);
    else if (key == "n_id") s.n_id = get_count(v, key);
    else if (key == "n_aux") s.n_aux = get_count(v, key);
    else if (key == "concentration") s.concentration = get_number(v, key);
    else if (key == "n_per_class") s.n_per_class = get_count(v, key);
    else if (key == "separation") s.separation = get_number(v, key);
    else if (key == "spread") s.spread = get_number(v, key);
    else if (key == "box") s.box = get_number(v, key);
    else if (key == "grid_points") s.grid_points = get_count(v, key);
    else if (key == "grid_extent") s.grid_extent = get_number(v, key);
    else if (key == "grid_res") s.grid_res = get_count(v, key);
    else fail(ErrorCode::kUnknownKey, "unknown config key '" + key + "'");
  }
  c.validate();
  check_scene(s);
  return p;
}

ToyPreset parse_config(const std::string& path, const ToyPreset& base) {
  return apply_config(read_file(path), base);
}

ToyPreset parse_config(const std::string& path) { return parse_config(path, ToyPreset{}); }

HopfieldConfig parse_hopfield_config(const std::string& json_text) {
  const json j = parse_object(json_text);
  HopfieldConfig cfg;
  for (const auto& [key, v] : j.items()) {
    if (key == "beta") cfg.beta = get_number(v, key);
    else if (key == "normalize_inputs") cfg.normalize_inputs = get_bool(v, key);
    else fail(ErrorCode::kUnknownKey, "unknown config key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

namespace {

json config_object(const ToyPreset& p) {
  const ToyConfig& c = p.config;
  const SceneParams& s = p.scene;
  return json{{"beta", c.beta},
              {"lambda", c.lambda},
              {"lr", c.lr},
              {"lr_growth", c.lr_growth},
              {"steps", c.steps},
              {"resample_every", c.resample_every},
              {"batch_n", c.batch_n},
              {"seed", c.seed},
              {"geometry", geometry_name(c.geometry)},
              {"full_batch", c.full_batch},
              {"snapshot_every", c.snapshot_every},
              {"enable_ce", p.enable_ce},
              {"dim", s.dim},
              {"n_id", s.n_id},
              {"n_aux", s.n_aux},
              {"concentration", s.concentration},
              {"n_per_class", s.n_per_class},
              {"separation", s.separation},
              {"spread", s.spread},
              {"box", s.box},
              {"grid_points", s.grid_points},
              {"grid_extent", s.grid_extent},
              {"grid_res", s.grid_res}};
}

json trajectory_config(const ToyConfig& c) {
  return json{{"beta", c.beta},
              {"lambda", c.lambda},
              {"lr", c.lr},
              {"lr_growth", c.lr_growth},
              {"steps", c.steps},
              {"resample_every", c.resample_every},
              {"batch_n", c.batch_n},
              {"seed", c.seed},
              {"geometry", geometry_name(c.geometry)},
              {"full_batch", c.full_batch},
              {"snapshot_every", c.snapshot_every}};
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string snapshot_csv(const ToySnapshot& s) {
  const Eigen::Index d = s.id_patterns.rows();
  std::vector<std::size_t> id_hits(static_cast<std::size_t>(s.id_patterns.cols()), 0);
  std::vector<std::size_t> aux_hits(static_cast<std::size_t>(s.aux_patterns.cols()), 0);
  for (std::size_t i : s.id_indices) ++id_hits[i];
  for (std::size_t i : s.aux_indices) ++aux_hits[i];
  std::string out = "set,index,sampled,weight";
  for (Eigen::Index k = 0; k < d; ++k) out += ",x" + std::to_string(k);
  out += '\n';
  const auto rows = [&](const char* set, const Eigen::MatrixXd& m,
                        const std::vector<std::size_t>& hits, const Vector* w) {
    for (Eigen::Index i = 0; i < m.cols(); ++i) {
      out += std::string(set) + "," + std::to_string(i) + "," +
             std::to_string(hits[static_cast<std::size_t>(i)]) + ",";
      if (w && w->size() == m.cols()) out += fmt17((*w)(i));
      for (Eigen::Index k = 0; k < d; ++k) out += "," + fmt17(m(k, i));
      out += '\n';
    }
  };
  rows("id", s.id_patterns, id_hits, nullptr);
  rows("aux", s.aux_patterns, aux_hits, &s.weights);
  return out;
}

std::string grid_csv(const PatternMemory& grid, const Vector& values) {
  std::string out = "index";
  for (Eigen::Index k = 0; k < grid.dim(); ++k) out += ",x" + std::to_string(k);
  out += ",value\n";
  for (Eigen::Index i = 0; i < grid.count(); ++i) {
    out += std::to_string(i);
    for (Eigen::Index k = 0; k < grid.dim(); ++k) out += "," + fmt17(grid.data()(k, i));
    out += "," + fmt17(values(i)) + "\n";
  }
  return out;
}

}  // namespace

std::string config_json(const ToyPreset& preset) { return config_object(preset).dump(2); }

std::size_t write_trajectory(const std::string& dir, const ToyTrajectory& traj,
                             const std::string& scene) {
  ensure_dir(dir);
  json snaps = json::array();
  char name[64];
  for (const auto& s : traj.snapshots) {
    std::snprintf(name, sizeof name, "snapshot_%06zu.csv", s.step);
    write_file((fs::path(dir) / name).string(), snapshot_csv(s));
    snaps.push_back(json{{"step", s.step},
                         {"file", name},
                         {"l_ood", finite_or_null(s.l_ood)},
                         {"ce", finite_or_null(s.ce)}});
  }
  json manifest{{"scene", scene},
                {"config", trajectory_config(traj.config)},
                {"ce_enabled", traj.ce_enabled},
                {"snapshot_count", traj.snapshots.size()},
                {"snapshots", snaps},
                {"batch_loss", traj.batch_loss}};
  write_file((fs::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");
  return traj.snapshots.size();
}

void write_toy_run(const std::string& dir, const ToyRun& run) {
  ensure_dir(dir);
  write_trajectory((fs::path(dir) / "trajectory").string(), run.trajectory, scene_name(run.kind));
  write_file((fs::path(dir) / "heatmap_initial.csv").string(),
             grid_csv(run.grid, run.heatmap_initial));
  write_file((fs::path(dir) / "heatmap_final.csv").string(), grid_csv(run.grid, run.heatmap_final));
  const ToySummary& s = run.summary;
  json summary{{"scene", scene_name(run.kind)},
               {"config", config_object(run.preset)},
               {"var_orth_initial", s.var_orth_initial},
               {"var_orth_final", s.var_orth_final},
               {"var_par_initial", s.var_par_initial},
               {"var_par_final", s.var_par_final},
               {"cross_dot", s.cross_dot},
               {"l_ood", s.l_ood},
               {"agreement_last_batch", s.agreement_last_batch},
               {"resampling",
                {{"agreement_weighted", s.resampling.agreement_weighted},
                 {"agreement_uniform", s.resampling.agreement_uniform},
                 {"mean_eb_weighted", s.resampling.mean_eb_weighted},
                 {"mean_eb_uniform", s.resampling.mean_eb_uniform}}}};
  write_file((fs::path(dir) / "summary.json").string(), summary.dump(2) + "\n");
}

}  // namespace hopboost::io
