#include "commands.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "melsb/metrics.h"
#include "melsb/signal_gen.h"
#include "melsb/wav_io.h"
#include "melsb/weight_bundle.h"
#include "spectrogram_png.h"

namespace melsb {
namespace cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// Source seeds sit far from the noise seeds (seed, seed + 1 + m) used by the
// scene renderer.
constexpr uint64_t kSourceSeedStride = 7919;
constexpr uint64_t kZoneSeedOffset = 1000;
constexpr uint64_t kEchoSeedOffset = 2000;

size_t SceneLength(const SceneConfig& scene, int sample_rate) {
  return static_cast<size_t>(std::llround(scene.duration_s * sample_rate));
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw DataError("cannot write " + path.string());
}

bool IsSilent(const Waveform& w) { return w.PeakAbs() == 0.0; }

// Saturates to full scale; returns the number of clipped samples.
size_t ClipToFullScale(Waveform& w) {
  size_t clipped = 0;
  for (size_t c = 0; c < w.num_channels(); ++c) {
    for (double& v : w.mutable_channel(c)) {
      if (std::abs(v) > 1.0) {
        v = std::clamp(v, -1.0, 1.0);
        ++clipped;
      }
    }
  }
  return clipped;
}

}  // namespace

Waveform SceneSource(const SceneConfig& scene, int z, int sample_rate) {
  const size_t n = SceneLength(scene, sample_rate);
  const auto& file = z < 0 ? scene.echo_file : scene.source_files[z];
  if (file) {
    const Waveform w = ReadWav(*file);
    if (w.sample_rate() != sample_rate)
      throw DataError(file->string() + ": sample rate " +
                      std::to_string(w.sample_rate()) + " != " +
                      std::to_string(sample_rate));
    if (w.num_channels() != 1) throw DataError(file->string() + ": not mono");
    std::vector<double> x(n, 0.0);
    const auto ch = w.channel(0);
    std::copy_n(ch.begin(), std::min(n, ch.size()), x.begin());
    return Waveform::Mono(sample_rate, std::move(x));
  }
  const uint64_t base = scene.options.seed * kSourceSeedStride;
  const uint64_t seed =
      z < 0 ? base + kEchoSeedOffset : base + kZoneSeedOffset + z;
  return Waveform::Mono(sample_rate, SpeechLikeSignal(n, sample_rate, seed));
}

SceneRender RunSimulate(const RunConfig& config, const fs::path& out_dir) {
  const SceneConfig& scene = config.scene;
  const int fs_hz = scene.cabin.sample_rate;
  std::array<std::optional<Waveform>, kNumZones> sources;
  for (int z = 0; z < kNumZones; ++z)
    if (scene.active[z]) sources[z] = SceneSource(scene, z, fs_hz);
  std::optional<Waveform> echo;
  if (scene.echo) echo = SceneSource(scene, -1, fs_hz);
  SceneRender render =
      RenderScene(scene.cabin, sources, echo, scene.options);
  WriteSceneBundle(render, scene.duration_s, out_dir);
  return render;
}

std::string RunSeparate(const RunConfig& config, const fs::path& input_dir,
                        const fs::path& out_dir) {
  const SceneBundle bundle = ReadSceneBundle(input_dir);
  const SeparateConfig& sep = config.separate;
  if (NeedsGroundTruth(sep.mode) && bundle.input.targets.empty())
    throw DataError("mode " + ToString(sep.mode) +
                    " needs ground-truth target_zone files in " +
                    input_dir.string());

  SeparationConfig cfg;
  cfg.stft = config.stft;
  cfg.mode = sep.mode;
  cfg.num_bands = sep.num_bands;
  cfg.embed = sep.embed;
  cfg.seed = sep.seed;
  cfg.zero_echo_weights = sep.zero_echo_weights;
  if (sep.weights) cfg.weights = WeightBundle::Load(*sep.weights);
  const SeparationOutput out = Separate(bundle.input, cfg);

  fs::create_directories(out_dir);
  const int ref_ch = cfg.mvdr.ref_ch;
  const Waveform mix_ref = bundle.input.mixture.Channel(ref_ch);
  const double mix_power = mix_ref.MeanPower();
  const bool have_refs = !bundle.input.targets.empty();

  Json report;
  report["mode"] = ToString(sep.mode);
  if (sep.mode == SeparationMode::kOracleMvdrSubband ||
      sep.mode == SeparationMode::kStubSrnn)
    report["bands"] = sep.num_bands;
  report["reference_channel"] = ref_ch;
  report["zero_echo_weights"] = sep.zero_echo_weights;
  report["num_flagged"] = out.num_flagged;
  report["reference_available"] = have_refs;
  Json zones = Json::array();
  for (int z = 0; z < static_cast<int>(out.zones.size()); ++z) {
    Waveform est = out.zones[z];
    Json e;
    e["zone"] = z;
    e["file"] = "sep_zone" + std::to_string(z) + ".wav";
    e["active"] = bundle.active[z];
    // null for an all-zero output.
    const double est_power = est.MeanPower();
    if (est_power > 0.0 && mix_power > 0.0)
      e["output_power_db_rel_mixture"] =
          10.0 * std::log10(est_power / mix_power);
    else
      e["output_power_db_rel_mixture"] = nullptr;
    if (have_refs) {
      const Waveform ref = bundle.input.targets[z].Channel(ref_ch);
      const bool silent = IsSilent(ref);
      e["silent"] = silent;
      if (!silent) {
        const double base = SiSnr(mix_ref, ref);
        const double sisnr = SiSnr(est, ref);
        e["si_snr_db"] = sisnr;
        e["si_snr_unprocessed_db"] = base;
        e["si_snr_improvement_db"] = sisnr - base;
        e["sdr_db"] = Sdr(est, ref);
        e["sdr_unprocessed_db"] = Sdr(mix_ref, ref);
      }
    } else {
      e["silent"] = !bundle.active[z];
    }
    e["clipped_samples"] = ClipToFullScale(est);
    WriteWav(est, out_dir / e["file"].get<std::string>(),
             WavEncoding::kFloat32);
    zones.push_back(e);
  }
  report["zones"] = zones;

  if (sep.spectrograms) {
    WriteSpectrogramPng(out.mixture_spec, ref_ch, out_dir / "mixture.png");
    for (size_t z = 0; z < out.zone_specs.size(); ++z)
      WriteSpectrogramPng(out.zone_specs[z], 0,
                          out_dir / ("sep_zone" + std::to_string(z) + ".png"));
  }
  const std::string text = report.dump(2) + "\n";
  WriteText(out_dir / "metrics.json", text);
  return text;
}

std::string RunCost(const RunConfig& config, const fs::path& out_dir,
                    std::ostream& table_out) {
  config.cost.Validate();
  std::vector<CostReport> reports;
  reports.push_back(CountMacs(ProcessingMode::kNarrowBand, config.cost));
  reports.push_back(CountMacs(ProcessingMode::kFullBand, config.cost));
  std::vector<int> bands = config.cost_bands;
  std::sort(bands.begin(), bands.end());
  bands.erase(std::unique(bands.begin(), bands.end()), bands.end());
  for (int k : bands)
    reports.push_back(CountMacs(ProcessingMode::kSubBand, config.cost, k));
  reports = SortByCost(std::move(reports));
  table_out << CostTable(reports);
  const std::string json = CostJson(reports);
  fs::create_directories(out_dir);
  WriteText(out_dir / "cost.json", json);
  return json;
}

std::string RunMetrics(const fs::path& ref_path, const fs::path& est_path,
                       int channel, const StftConfig& stft) {
  const Waveform ref_all = ReadWav(ref_path);
  const Waveform est_all = ReadWav(est_path);
  auto pick = [channel](const Waveform& w, const fs::path& p) {
    if (channel < 0 || static_cast<size_t>(channel) >= w.num_channels())
      throw DataError(p.string() + ": no channel " + std::to_string(channel));
    return w.Channel(channel);
  };
  const Waveform ref = pick(ref_all, ref_path);
  // Mono estimates are compared as they are.
  const Waveform est =
      est_all.num_channels() == 1 ? est_all : pick(est_all, est_path);
  if (ref.num_samples() != est.num_samples())
    throw DataError("reference and estimate lengths differ");
  if (ref.sample_rate() != est.sample_rate())
    throw DataError("reference and estimate sample rates differ");
  StftConfig cfg = stft;
  cfg.sample_rate = ref.sample_rate();
  Json j;
  j["reference"] = ref_path.string();
  j["estimate"] = est_path.string();
  j["channel"] = channel;
  j["si_snr_db"] = SiSnr(est, ref);
  j["sdr_db"] = Sdr(est, ref);
  j["spectral_mse"] = SpectralMse(est, ref, cfg);
  return j.dump(2) + "\n";
}

}  // namespace cli
}  // namespace melsb
