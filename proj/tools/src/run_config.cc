#include "run_config.h"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>

namespace melsb {
namespace cli {
namespace {

namespace fs = std::filesystem;

class Reader {
 public:
  Reader(std::string source, fs::path base_dir)
      : source_(std::move(source)), base_dir_(std::move(base_dir)) {}

  [[noreturn]] void Fail(const YAML::Node& node, const std::string& msg) const {
    std::ostringstream os;
    os << source_;
    if (node.IsDefined() && node.Mark().line >= 0)
      os << ":" << node.Mark().line + 1;
    os << ": " << msg;
    throw ConfigError(os.str());
  }

  void CheckMap(const YAML::Node& node, const std::string& section,
                std::initializer_list<const char*> allowed) const {
    if (!node.IsMap()) Fail(node, section + " must be a mapping");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!keys.count(key))
        Fail(kv.first, "unknown key '" + key + "' in " + section);
    }
  }

  template <typename T>
  T As(const YAML::Node& node, const std::string& what) const {
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      Fail(node, "invalid value for " + what);
    }
  }

  double Number(const YAML::Node& node, const std::string& what) const {
    const double v = As<double>(node, what);
    if (!std::isfinite(v)) Fail(node, what + " must be finite");
    return v;
  }

  int Int(const YAML::Node& node, const std::string& what, int min) const {
    const int v = As<int>(node, what);
    if (v < min)
      Fail(node, what + " must be >= " + std::to_string(min));
    return v;
  }

  // Finite number or the string "inf".
  double NumberOrInf(const YAML::Node& node, const std::string& what) const {
    if (node.IsScalar()) {
      const auto s = node.Scalar();
      if (s == "inf" || s == "+inf" || s == ".inf")
        return std::numeric_limits<double>::infinity();
    }
    return Number(node, what);
  }

  Position Pos(const YAML::Node& node, const std::string& what) const {
    if (!node.IsSequence() || node.size() != 3)
      Fail(node, what + " must be a list of 3 coordinates");
    return {Number(node[0], what), Number(node[1], what),
            Number(node[2], what)};
  }

  fs::path Path(const YAML::Node& node, const std::string& what) const {
    const fs::path p = As<std::string>(node, what);
    return p.is_absolute() ? p : base_dir_ / p;
  }

 private:
  std::string source_;
  fs::path base_dir_;
};

void ReadStft(const Reader& r, const YAML::Node& n, StftConfig& stft) {
  r.CheckMap(n, "stft", {"fft_size", "window_len", "hop", "sample_rate",
                         "window"});
  if (n["fft_size"]) stft.fft_size = r.Int(n["fft_size"], "stft.fft_size", 2);
  if (n["window_len"])
    stft.window_len = r.Int(n["window_len"], "stft.window_len", 1);
  if (n["hop"]) stft.hop = r.Int(n["hop"], "stft.hop", 1);
  if (n["sample_rate"])
    stft.sample_rate = r.Int(n["sample_rate"], "stft.sample_rate", 1);
  if (n["window"] && r.As<std::string>(n["window"], "stft.window") != "hann")
    r.Fail(n["window"], "stft.window must be 'hann'");
  try {
    stft.Validate();
  } catch (const InvalidArgument& e) {
    r.Fail(n, std::string("stft: ") + e.what());
  }
}

void ReadScene(const Reader& r, const YAML::Node& n, SceneConfig& scene) {
  r.CheckMap(n, "scene",
             {"dims", "rt60", "mics", "zones", "loudspeaker", "noise_source",
              "seed", "duration", "active_zones", "snr_db", "ser_db", "echo",
              "distortion", "noise_kind", "diffuse_level_db", "sources"});
  CabinSpec& cabin = scene.cabin;
  SceneOptions& opt = scene.options;
  if (n["dims"]) cabin.dims = r.Pos(n["dims"], "scene.dims");
  if (n["rt60"]) {
    cabin.rt60 = r.Number(n["rt60"], "scene.rt60");
    if (cabin.rt60 < 0.0 || cabin.rt60 > kMaxRt60)
      r.Fail(n["rt60"], "scene.rt60 must lie in [0, 0.6]");
  }
  if (n["mics"]) {
    const auto& m = n["mics"];
    if (!m.IsSequence() || m.size() != 2)
      r.Fail(m, "scene.mics must list exactly 2 positions");
    cabin.mics = {r.Pos(m[0], "scene.mics"), r.Pos(m[1], "scene.mics")};
  }
  if (n["zones"]) {
    const auto& z = n["zones"];
    if (!z.IsSequence() || z.size() != kNumZones)
      r.Fail(z, "scene.zones must list exactly 4 positions");
    for (int i = 0; i < kNumZones; ++i)
      cabin.zones[i] = r.Pos(z[i], "scene.zones");
  }
  if (n["loudspeaker"])
    cabin.loudspeaker = r.Pos(n["loudspeaker"], "scene.loudspeaker");
  if (n["noise_source"])
    cabin.noise_source = r.Pos(n["noise_source"], "scene.noise_source");
  if (n["seed"]) {
    cabin.seed = r.As<uint64_t>(n["seed"], "scene.seed");
    opt.seed = cabin.seed;
  }
  if (n["duration"]) {
    scene.duration_s = r.Number(n["duration"], "scene.duration");
    if (!(scene.duration_s > 0.0 && scene.duration_s <= 600.0))
      r.Fail(n["duration"], "scene.duration must lie in (0, 600] s");
  }
  if (n["active_zones"]) {
    const auto& a = n["active_zones"];
    if (!a.IsSequence()) r.Fail(a, "scene.active_zones must be a list");
    scene.active.fill(false);
    for (const auto& z : a) {
      const int i = r.Int(z, "scene.active_zones entry", 0);
      if (i >= kNumZones) r.Fail(z, "zone index must lie in [0, 3]");
      scene.active[i] = true;
    }
  }
  if (n["snr_db"]) opt.snr_db = r.NumberOrInf(n["snr_db"], "scene.snr_db");
  if (n["ser_db"]) opt.ser_db = r.Number(n["ser_db"], "scene.ser_db");
  if (n["echo"]) scene.echo = r.As<bool>(n["echo"], "scene.echo");
  if (n["diffuse_level_db"])
    opt.diffuse_level_db =
        r.Number(n["diffuse_level_db"], "scene.diffuse_level_db");
  if (n["noise_kind"]) {
    try {
      opt.noise_kind = ParseNoiseKind(
          r.As<std::string>(n["noise_kind"], "scene.noise_kind"));
    } catch (const InvalidArgument& e) {
      r.Fail(n["noise_kind"], e.what());
    }
  }
  if (const auto& d = n["distortion"]) {
    r.CheckMap(d, "scene.distortion",
               {"kind", "clip_threshold", "sigmoid_steepness", "sigmoid_gain"});
    auto& p = opt.distortion;
    if (d["kind"]) {
      try {
        p.kind = ParseDistortionKind(
            r.As<std::string>(d["kind"], "scene.distortion.kind"));
      } catch (const InvalidArgument& e) {
        r.Fail(d["kind"], e.what());
      }
    }
    if (d["clip_threshold"]) {
      p.clip_threshold = r.Number(d["clip_threshold"], "clip_threshold");
      if (!(p.clip_threshold > 0.0))
        r.Fail(d["clip_threshold"], "clip_threshold must be > 0");
    }
    if (d["sigmoid_steepness"]) {
      p.sigmoid_steepness =
          r.Number(d["sigmoid_steepness"], "sigmoid_steepness");
      if (!(p.sigmoid_steepness > 0.0))
        r.Fail(d["sigmoid_steepness"], "sigmoid_steepness must be > 0");
    }
    if (d["sigmoid_gain"])
      p.sigmoid_gain = r.Number(d["sigmoid_gain"], "sigmoid_gain");
  }
  if (const auto& s = n["sources"]) {
    r.CheckMap(s, "scene.sources", {"zone0", "zone1", "zone2", "zone3",
                                    "echo"});
    for (int i = 0; i < kNumZones; ++i) {
      const std::string key = "zone" + std::to_string(i);
      if (s[key]) scene.source_files[i] = r.Path(s[key], "scene.sources");
    }
    if (s["echo"]) scene.echo_file = r.Path(s["echo"], "scene.sources.echo");
  }
  try {
    cabin.Validate();
  } catch (const InvalidArgument& e) {
    r.Fail(n, std::string("scene: ") + e.what());
  }
}

void ReadSeparate(const Reader& r, const YAML::Node& n, SeparateConfig& sep) {
  r.CheckMap(n, "separate", {"mode", "bands", "embed", "seed",
                             "zero_echo_weights", "spectrograms", "input",
                             "weights"});
  if (n["mode"]) {
    try {
      sep.mode = ParseSeparationMode(
          r.As<std::string>(n["mode"], "separate.mode"));
    } catch (const InvalidArgument& e) {
      r.Fail(n["mode"], e.what());
    }
  }
  if (n["bands"]) sep.num_bands = r.Int(n["bands"], "separate.bands", 1);
  if (n["embed"]) sep.embed = r.Int(n["embed"], "separate.embed", 1);
  if (n["seed"]) sep.seed = r.As<uint64_t>(n["seed"], "separate.seed");
  if (n["zero_echo_weights"])
    sep.zero_echo_weights =
        r.As<bool>(n["zero_echo_weights"], "separate.zero_echo_weights");
  if (n["spectrograms"])
    sep.spectrograms = r.As<bool>(n["spectrograms"], "separate.spectrograms");
  if (n["input"]) sep.input = r.Path(n["input"], "separate.input");
  if (n["weights"]) sep.weights = r.Path(n["weights"], "separate.weights");
}

void ReadCost(const Reader& r, const YAML::Node& n, RunConfig& config) {
  r.CheckMap(n, "cost", {"mics", "zones", "crf_half_taps", "bf_half_taps",
                         "embed", "crf_hidden", "gru_hidden", "zone_dim",
                         "heads", "bands"});
  PipelineShapes& s = config.cost;
  if (n["mics"]) s.mics = r.Int(n["mics"], "cost.mics", 1);
  if (n["zones"]) s.zones = r.Int(n["zones"], "cost.zones", 1);
  if (n["crf_half_taps"])
    s.crf_half_taps = r.Int(n["crf_half_taps"], "cost.crf_half_taps", 0);
  if (n["bf_half_taps"])
    s.bf_half_taps = r.Int(n["bf_half_taps"], "cost.bf_half_taps", 0);
  if (n["embed"]) s.embed = r.Int(n["embed"], "cost.embed", 1);
  if (n["crf_hidden"]) s.crf_hidden = r.Int(n["crf_hidden"], "cost.crf_hidden", 1);
  if (n["gru_hidden"]) s.gru_hidden = r.Int(n["gru_hidden"], "cost.gru_hidden", 1);
  if (n["zone_dim"]) s.zone_dim = r.Int(n["zone_dim"], "cost.zone_dim", 1);
  if (n["heads"]) s.heads = r.Int(n["heads"], "cost.heads", 1);
  if (s.zone_dim % s.heads != 0)
    r.Fail(n, "cost.zone_dim must be divisible by cost.heads");
  if (const auto& b = n["bands"]) {
    if (!b.IsSequence() || b.size() == 0)
      r.Fail(b, "cost.bands must be a non-empty list");
    config.cost_bands.clear();
    for (const auto& k : b)
      config.cost_bands.push_back(r.Int(k, "cost.bands entry", 1));
  }
}

}  // namespace

void RunConfig::Validate() const {
  try {
    stft.Validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("stft: ") + e.what());
  }
  const int f = stft.num_bins();
  if (separate.num_bands < 1 || separate.num_bands > f)
    throw ConfigError("separate.bands must lie in [1, " + std::to_string(f) +
                      "]");
  for (int k : cost_bands)
    if (k < 1 || k > f)
      throw ConfigError("cost.bands entries must lie in [1, " +
                        std::to_string(f) + "]");
  if (threads < 1 || threads > 256)
    throw ConfigError("threads must lie in [1, 256]");
  if (scene.cabin.sample_rate != stft.sample_rate)
    throw ConfigError("scene and stft sample rates differ");
  auto must_exist = [](const std::filesystem::path& p, const char* what) {
    if (!std::filesystem::exists(p))
      throw ConfigError(std::string(what) + " not found: " + p.string());
  };
  for (const auto& p : scene.source_files)
    if (p) must_exist(*p, "scene source");
  if (scene.echo_file) must_exist(*scene.echo_file, "echo source");
  if (separate.input) must_exist(*separate.input, "separate.input");
  if (separate.weights) must_exist(*separate.weights, "separate.weights");
}

RunConfig ParseRunConfig(const std::string& text,
                         const std::string& source_name) {
  fs::path base = fs::path(source_name).parent_path();
  if (base.empty()) base = ".";
  const Reader r(source_name, base);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source_name + ":" + std::to_string(e.mark.line + 1) +
                      ": " + e.msg);
  }
  RunConfig config;
  if (root.IsNull()) return config;
  r.CheckMap(root, "config",
             {"stft", "scene", "separate", "cost", "output", "threads"});
  if (root["stft"]) ReadStft(r, root["stft"], config.stft);
  config.scene.cabin.sample_rate = config.stft.sample_rate;
  config.cost.fft_size = config.stft.fft_size;
  config.cost.hop = config.stft.hop;
  config.cost.sample_rate = config.stft.sample_rate;
  if (root["scene"]) ReadScene(r, root["scene"], config.scene);
  if (root["separate"]) ReadSeparate(r, root["separate"], config.separate);
  if (root["cost"]) ReadCost(r, root["cost"], config);
  if (const auto& o = root["output"]) {
    r.CheckMap(o, "output", {"dir"});
    if (o["dir"]) config.output_dir = r.Path(o["dir"], "output.dir");
  }
  if (root["threads"]) config.threads = r.Int(root["threads"], "threads", 1);
  const int f = config.stft.num_bins();
  if (root["separate"] && root["separate"]["bands"] &&
      config.separate.num_bands > f)
    r.Fail(root["separate"]["bands"],
           "separate.bands must lie in [1, " + std::to_string(f) + "]");
  return config;
}

RunConfig LoadRunConfig(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseRunConfig(ss.str(), path.string());
}

fs::path ResolveOutputDir(const RunConfig& config) {
  if (config.output_dir) return *config.output_dir;
  if (const char* env = std::getenv(kOutRootEnv); env && *env) return env;
  return "melsb_out";
}

}  // namespace cli
}  // namespace melsb
