#include "scene_bundle.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "melsb/wav_io.h"

namespace melsb {
namespace cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::string TargetName(int z) {
  return "target_zone" + std::to_string(z) + ".wav";
}

Json PosJson(const Position& p) { return Json::array({p.x, p.y, p.z}); }

Position PosFromJson(const Json& j) {
  if (!j.is_array() || j.size() != 3)
    throw DataError("manifest position must have 3 coordinates");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void WriteComponent(const Waveform& w, const fs::path& path) {
  if (w.PeakAbs() > 1.0)
    throw DataError(path.filename().string() + " exceeds full scale");
  WriteWav(w, path, WavEncoding::kFloat32);
}

}  // namespace

void WriteSceneBundle(const SceneRender& render, double duration_s,
                      const fs::path& dir) {
  fs::create_directories(dir);
  const int fs_hz = render.mixture.sample_rate();
  const size_t n = render.mixture.num_samples();

  Json files;
  files["mixture"] = "mixture.wav";
  WriteComponent(render.mixture, dir / "mixture.wav");

  const Waveform echo_ref = render.has_echo && !render.echo_ref.empty()
                                ? render.echo_ref
                                : Waveform::Zeros(fs_hz, 1, n);
  files["echo_ref"] = "echo_ref.wav";
  WriteComponent(echo_ref, dir / "echo_ref.wav");

  Json targets = Json::array();
  for (int z = 0; z < kNumZones; ++z) {
    const Waveform& t = render.targets[z];
    const Waveform image =
        t.empty() ? Waveform::Zeros(fs_hz, render.mixture.num_channels(), n)
                  : t;
    WriteComponent(image, dir / TargetName(z));
    targets.push_back(TargetName(z));
  }
  files["targets"] = targets;
  if (render.has_noise) {
    files["noise"] = "noise.wav";
    WriteComponent(render.noise, dir / "noise.wav");
  }
  if (render.has_echo) {
    files["echo_image"] = "echo_image.wav";
    WriteComponent(render.echo_image, dir / "echo_image.wav");
  }

  const CabinSpec& spec = render.spec;
  Json m;
  m["format"] = "melsb-scene";
  m["version"] = 1;
  m["sample_rate"] = fs_hz;
  m["num_samples"] = n;
  m["num_mics"] = render.mixture.num_channels();
  m["duration_s"] = duration_s;
  m["seed"] = spec.seed;
  m["rt60"] = spec.rt60;
  Json geometry;
  geometry["dims"] = PosJson(spec.dims);
  geometry["mics"] = Json::array();
  for (const auto& p : spec.mics) geometry["mics"].push_back(PosJson(p));
  geometry["zones"] = Json::array();
  for (const auto& p : spec.zones) geometry["zones"].push_back(PosJson(p));
  geometry["loudspeaker"] = PosJson(spec.loudspeaker);
  geometry["noise_source"] = PosJson(spec.noise_source);
  m["geometry"] = geometry;
  Json active = Json::array();
  for (int z = 0; z < kNumZones; ++z)
    if (render.active[z]) active.push_back(z);
  m["active_zones"] = active;
  m["noise_present"] = render.has_noise;
  if (render.has_noise) {
    m["snr_db"] = render.snr_db;
  } else {
    m["snr_db"] = nullptr;
    m["noise_note"] = "snr is +inf; no noise component emitted";
  }
  m["echo_present"] = render.has_echo;
  if (render.has_echo)
    m["ser_db"] = render.ser_db;
  else
    m["ser_db"] = nullptr;
  m["files"] = files;

  std::ofstream out(dir / kManifestName, std::ios::binary);
  out << m.dump(2) << "\n";
  if (!out) throw DataError("cannot write manifest in " + dir.string());
}

SceneBundle ReadSceneBundle(const fs::path& dir) {
  const fs::path manifest_path = dir / kManifestName;
  std::ifstream in(manifest_path);
  if (!in) throw DataError("missing manifest: " + manifest_path.string());
  Json m;
  try {
    m = Json::parse(in);
  } catch (const Json::exception& e) {
    throw DataError("malformed manifest " + manifest_path.string() + ": " +
                    e.what());
  }
  SceneBundle b;
  try {
    if (m.value("format", "") != "melsb-scene" || m.value("version", 0) != 1)
      throw DataError("unsupported manifest format or version");
    const Json& files = m.at("files");
    b.input.mixture = ReadWav(dir / files.at("mixture").get<std::string>());
    b.sample_rate = b.input.mixture.sample_rate();
    b.has_echo = m.at("echo_present").get<bool>();
    if (b.has_echo)
      b.input.echo_ref = ReadWav(dir / files.at("echo_ref").get<std::string>());
    for (const auto& z : m.at("active_zones")) {
      const int i = z.get<int>();
      if (i < 0 || i >= kNumZones) throw DataError("bad active zone index");
      b.active[i] = true;
    }
    const Json& geometry = m.at("geometry");
    for (const auto& p : geometry.at("mics"))
      b.input.mics.push_back(PosFromJson(p));
    for (const auto& p : geometry.at("zones"))
      b.input.zones.push_back(PosFromJson(p));
    const Json& targets = files.at("targets");
    bool complete = targets.size() == kNumZones;
    for (const auto& t : targets)
      complete = complete && fs::exists(dir / t.get<std::string>());
    if (complete)
      for (const auto& t : targets)
        b.input.targets.push_back(ReadWav(dir / t.get<std::string>()));
  } catch (const Json::exception& e) {
    throw DataError("malformed manifest " + manifest_path.string() + ": " +
                    e.what());
  }
  return b;
}

}  // namespace cli
}  // namespace melsb
