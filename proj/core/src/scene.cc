#include "melsb/scene.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <tuple>

#include "melsb/fft.h"

namespace melsb {
namespace {

constexpr int kSincHalfTaps = 4;        // 8-tap interpolator: -3..+4
constexpr double kMinSourceDistance = 1e-3;

// Adds a fractionally delayed, scaled impulse using a Hann-windowed sinc.
// Taps floor(delay) - 3 .. floor(delay) + 4.
void AddFractionalImpulse(std::vector<double>& h, double delay, double gain) {
  const double base_f = std::floor(delay);
  const long long base = static_cast<long long>(base_f);
  const double frac = delay - base_f;
  if (frac == 0.0) {
    if (base >= 0 && base < static_cast<long long>(h.size())) h[base] += gain;
    return;
  }
  // sin(pi (k - frac)) = -(-1)^k sin(pi frac), and the window cosine is
  // expanded around frac so each image costs three trig calls.
  static const auto kTable = [] {
    std::array<std::array<double, 2>, 2 * kSincHalfTaps> t{};
    for (int i = 0; i < 2 * kSincHalfTaps; ++i) {
      const double k = i - (kSincHalfTaps - 1);
      t[i] = {std::cos(kPi * k / kSincHalfTaps),
              std::sin(kPi * k / kSincHalfTaps)};
    }
    return t;
  }();
  const double s = std::sin(kPi * frac);
  const double cf = std::cos(kPi * frac / kSincHalfTaps);
  const double sf = std::sin(kPi * frac / kSincHalfTaps);
  for (int i = 0; i < 2 * kSincHalfTaps; ++i) {
    const int k = i - (kSincHalfTaps - 1);
    const long long n = base + k;
    if (n < 0 || n >= static_cast<long long>(h.size())) continue;
    const double x = k - frac;
    const double sin_px = (k % 2 == 0 ? -s : s);
    const double win = 0.5 * (1.0 + kTable[i][0] * cf + kTable[i][1] * sf);
    h[n] += gain * sin_px / (kPi * x) * win;
  }
}

// Removes the DC build-up of the all-positive image sum: the two-pole
// 100 Hz high-pass of Allen and Berkley.
void RemoveDc(std::vector<double>& h, int fs) {
  const double w = 2.0 * kPi * 100.0 / fs;
  const double r1 = std::exp(-w);
  const double b1 = 2.0 * r1 * std::cos(w);
  const double b2 = -r1 * r1;
  const double a1 = -(1.0 + r1);
  double y0 = 0.0, y1 = 0.0, y2 = 0.0;
  for (double& v : h) {
    y2 = y1;
    y1 = y0;
    y0 = b1 * y1 + b2 * y2 + v;
    v = y0 + a1 * y1 + r1 * y2;
  }
}

}  // namespace

CabinSpec CabinSpec::Default() {
  CabinSpec spec;
  const double cy = spec.dims.y / 2.0;
  spec.mics = {{0.55, cy - kMicSpacing / 2.0, 1.1},
               {0.55, cy + kMicSpacing / 2.0, 1.1}};
  spec.zones = {Position{1.05, 0.45, 0.95}, Position{1.05, 1.25, 0.95},
                Position{1.95, 0.45, 0.95}, Position{1.95, 1.25, 0.95}};
  spec.loudspeaker = {0.3, 0.2, 0.6};
  spec.noise_source = {0.2, cy, 0.3};
  return spec;
}

bool CabinSpec::Inside(const Position& p) const {
  return p.x > 0.0 && p.x < dims.x && p.y > 0.0 && p.y < dims.y &&
         p.z > 0.0 && p.z < dims.z;
}

void CabinSpec::Validate() const {
  if (dims.x <= 0.0 || dims.y <= 0.0 || dims.z <= 0.0)
    throw InvalidArgument("cabin dimensions must be positive");
  if (!(rt60 >= 0.0 && rt60 <= kMaxRt60))
    throw InvalidArgument("rt60 must lie in [0, 0.6] s");
  if (sample_rate <= 0) throw InvalidArgument("sample_rate must be > 0");
  if (mics.size() != 2)
    throw InvalidArgument("cabin needs exactly two microphones");
  if (std::abs(Distance(mics[0], mics[1]) - kMicSpacing) > 1e-9)
    throw InvalidArgument("microphone spacing must be 0.118 m");
  for (const auto& m : mics)
    if (!Inside(m)) throw InvalidArgument("microphone outside cabin");
  for (const auto& z : zones)
    if (!Inside(z)) throw InvalidArgument("zone position outside cabin");
  if (!Inside(loudspeaker)) throw InvalidArgument("loudspeaker outside cabin");
  if (!Inside(noise_source)) throw InvalidArgument("noise source outside cabin");
}

double SabineAbsorption(const Position& dims, double rt60) {
  if (!(rt60 > 0.0)) throw InvalidArgument("Sabine absorption needs rt60 > 0");
  const double volume = dims.x * dims.y * dims.z;
  const double surface =
      2.0 * (dims.x * dims.y + dims.x * dims.z + dims.y * dims.z);
  const double alpha = 0.161 * volume / (surface * rt60);
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw InvalidArgument("rt60 " + std::to_string(rt60) +
                          " s needs wall absorption outside (0, 1]");
  return alpha;
}

namespace {

// Calls fn(distance, reflection_count) for every image of source seen from
// mic whose distance is at most max_dist.
template <typename Fn>
void ForEachImage(const Position& dims, const Position& source,
                  const Position& mic, double max_dist, bool direct_only,
                  Fn&& fn) {
  const std::array<double, 3> room{dims.x, dims.y, dims.z};
  const std::array<double, 3> src{source.x, source.y, source.z};
  const std::array<double, 3> m{mic.x, mic.y, mic.z};
  struct AxisImage {
    double offset2;  // squared distance along the axis
    int reflections;
  };
  std::array<std::vector<AxisImage>, 3> axis;
  for (int a = 0; a < 3; ++a) {
    const int order =
        direct_only ? 0
                    : static_cast<int>(std::ceil(max_dist / (2.0 * room[a]))) + 1;
    for (int l = -order; l <= order; ++l)
      for (int u = 0; u <= (direct_only ? 0 : 1); ++u) {
        const double c = (1 - 2 * u) * src[a] + 2.0 * l * room[a] - m[a];
        if (c * c > max_dist * max_dist) continue;
        axis[a].push_back({c * c, std::abs(l - u) + std::abs(l)});
      }
  }
  const double max_d2 = max_dist * max_dist;
  for (const auto& ix : axis[0])
    for (const auto& iy : axis[1]) {
      const double dxy2 = ix.offset2 + iy.offset2;
      if (dxy2 > max_d2) continue;
      for (const auto& iz : axis[2]) {
        const double d2 = dxy2 + iz.offset2;
        if (d2 > max_d2) continue;
        fn(std::sqrt(d2), ix.reflections + iy.reflections + iz.reflections);
      }
    }
}

size_t RirLength(double rt60, int fs) {
  return static_cast<size_t>(std::ceil(1.2 * rt60 * fs));
}

// Schroeder T60 of an energy envelope sampled every bin_seconds, from a
// linear fit of the decay between -5 and -35 dB. Returns 0 when the decay
// never spans that range.
double SchroederT60(const std::vector<double>& energy, double bin_seconds) {
  std::vector<double> edc(energy.size());
  double acc = 0.0;
  for (size_t i = energy.size(); i-- > 0;) edc[i] = acc += energy[i];
  if (!(acc > 0.0)) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < edc.size(); ++i) {
    if (!(edc[i] > 0.0)) break;
    const double db = 10.0 * std::log10(edc[i] / acc);
    if (db > -5.0) continue;
    if (db < -35.0) break;
    const double t = (i + 0.5) * bin_seconds;
    sx += t; sy += db; sxx += t * t; sxy += t * db; ++n;
  }
  if (n < 3) return 0.0;
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return slope < 0.0 ? -60.0 / slope : std::numeric_limits<double>::infinity();
}

Position CalibrationSource(const Position& dims) {
  return {0.31 * dims.x, 0.42 * dims.y, 0.37 * dims.z};
}
Position CalibrationMic(const Position& dims) {
  return {0.67 * dims.x, 0.58 * dims.y, 0.71 * dims.z};
}

// Reflection coefficient for which the incoherent image energy decays at
// target_t60, for a response truncated at 1.2 * rt60.
double EnergyCalibration(const Position& dims, double rt60, double target_t60,
                         int fs) {
  constexpr int kBin = 32;  // samples per energy bin
  const Position src = CalibrationSource(dims);
  const Position mic = CalibrationMic(dims);
  const size_t length = RirLength(rt60, fs);
  const size_t bins = (length + kBin - 1) / kBin;
  const double max_dist = static_cast<double>(length) / fs * kSpeedOfSound;
  // Energy per (reflection count, time bin) before wall losses.
  std::vector<std::vector<double>> hist;
  ForEachImage(dims, src, mic, max_dist, false, [&](double d, int refl) {
    const size_t b = static_cast<size_t>(d / kSpeedOfSound * fs) / kBin;
    if (b >= bins) return;
    if (refl >= static_cast<int>(hist.size()))
      hist.resize(refl + 1, std::vector<double>(bins, 0.0));
    hist[refl][b] += 1.0 / (d * d);
  });
  std::vector<double> energy(bins);
  auto t60 = [&](double beta) {
    std::fill(energy.begin(), energy.end(), 0.0);
    double g = 1.0;
    for (const auto& row : hist) {
      for (size_t b = 0; b < bins; ++b) energy[b] += g * row[b];
      g *= beta * beta;
    }
    return SchroederT60(energy, static_cast<double>(kBin) / fs);
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (t60(mid) < target_t60 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> ImageResponse(const Position& dims, const Position& source,
                                  const Position& mic, double beta,
                                  size_t length, bool direct_only, int fs) {
  std::vector<double> h(length, 0.0);
  const double max_dist =
      static_cast<double>(length + kSincHalfTaps) / fs * kSpeedOfSound;
  std::vector<double> beta_pow(1, 1.0);
  ForEachImage(dims, source, mic, max_dist, direct_only,
               [&](double d, int refl) {
                 while (static_cast<int>(beta_pow.size()) <= refl)
                   beta_pow.push_back(beta_pow.back() * beta);
                 const double gain = beta_pow[refl];
                 if (gain == 0.0) return;
                 AddFractionalImpulse(h, d / kSpeedOfSound * fs,
                                      gain / (4.0 * kPi * d));
               });
  if (!direct_only) RemoveDc(h, fs);
  return h;
}

// The pressure response decays slightly differently from the incoherent
// energy model, so the energy target is corrected from measured decays of a
// reference response.
double CalibrateReflection(const Position& dims, double rt60, int fs) {
  constexpr int kRefinements = 2;
  const size_t length = RirLength(rt60, fs);
  double target = rt60;
  double beta = EnergyCalibration(dims, rt60, target, fs);
  for (int i = 0; i < kRefinements; ++i) {
    const auto h = ImageResponse(dims, CalibrationSource(dims),
                                 CalibrationMic(dims), beta, length, false, fs);
    std::vector<double> energy(h.size());
    for (size_t n = 0; n < h.size(); ++n) energy[n] = h[n] * h[n];
    const double measured = SchroederT60(energy, 1.0 / fs);
    if (!(measured > 0.0) || !std::isfinite(measured)) break;
    target *= rt60 / measured;
    beta = EnergyCalibration(dims, rt60, target, fs);
  }
  return beta;
}

}  // namespace

double WallReflection(const Position& dims, double rt60, int sample_rate) {
  if (!(rt60 > 0.0)) return 0.0;
  if (dims.x <= 0.0 || dims.y <= 0.0 || dims.z <= 0.0 || sample_rate <= 0)
    throw InvalidArgument("invalid room for reflection calibration");
  using Key = std::tuple<double, double, double, double, int>;
  static std::mutex mu;
  static std::map<Key, double> cache;
  const Key key{dims.x, dims.y, dims.z, rt60, sample_rate};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const double beta = CalibrateReflection(dims, rt60, sample_rate);
  // Absorption 1 - beta^2 must stay inside (0, 1].
  if (!(beta < 1.0 - 1e-9))
    throw InvalidArgument("rt60 " + std::to_string(rt60) +
                          " s needs wall absorption outside (0, 1]");
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, beta);
  return beta;
}

Rir SimulateRir(const CabinSpec& spec, const Position& source) {
  if (!spec.Inside(source)) throw InvalidArgument("source outside cabin");
  if (!(spec.rt60 >= 0.0)) throw InvalidArgument("rt60 must be >= 0");
  const int fs = spec.sample_rate;
  Rir rir;
  rir.sample_rate = fs;

  double max_direct = 0.0;
  for (const auto& mic : spec.mics) {
    const double d = Distance(mic, source);
    if (d < kMinSourceDistance)
      throw InvalidArgument("source coincides with a microphone");
    rir.direct_delay.push_back(d / kSpeedOfSound * fs);
    max_direct = std::max(max_direct, rir.direct_delay.back());
  }

  const bool anechoic = spec.rt60 == 0.0;
  const double beta = WallReflection(spec.dims, spec.rt60, fs);
  size_t length = static_cast<size_t>(std::ceil(max_direct)) + 2 * kSincHalfTaps;
  if (!anechoic) length = std::max(length, RirLength(spec.rt60, fs));
  for (const auto& mic : spec.mics)
    rir.taps.push_back(
        ImageResponse(spec.dims, source, mic, beta, length, anechoic, fs));
  return rir;
}

DistortionKind ParseDistortionKind(const std::string& name) {
  if (name == "none") return DistortionKind::kNone;
  if (name == "clip") return DistortionKind::kClip;
  if (name == "sigmoid") return DistortionKind::kSigmoid;
  throw InvalidArgument("unknown distortion kind: " + name);
}

std::string ToString(DistortionKind kind) {
  switch (kind) {
    case DistortionKind::kNone: return "none";
    case DistortionKind::kClip: return "clip";
    case DistortionKind::kSigmoid: return "sigmoid";
  }
  return "unknown";
}

Waveform DistortLoudspeaker(const Waveform& x, const DistortionParams& params) {
  if (x.num_channels() != 1)
    throw InvalidArgument("loudspeaker distortion expects a mono signal");
  std::vector<double> y(x.channel(0).begin(), x.channel(0).end());
  switch (params.kind) {
    case DistortionKind::kNone:
      break;
    case DistortionKind::kClip:
      if (!(params.clip_threshold > 0.0))
        throw InvalidArgument("clip threshold must be > 0");
      for (double& v : y)
        v = std::clamp(v, -params.clip_threshold, params.clip_threshold);
      break;
    case DistortionKind::kSigmoid:
      if (!(params.sigmoid_steepness > 0.0))
        throw InvalidArgument("sigmoid steepness must be > 0");
      for (double& v : y)
        v = params.sigmoid_gain *
            (2.0 / (1.0 + std::exp(-params.sigmoid_steepness * v)) - 1.0);
      break;
    default:
      throw InvalidArgument("unknown distortion kind");
  }
  return Waveform::Mono(x.sample_rate(), std::move(y));
}

Waveform SceneRender::SpeechImage() const {
  Waveform sum = targets[0];
  for (int z = 1; z < kNumZones; ++z) sum += targets[z];
  return sum;
}

Waveform SceneRender::Interference(int zone) const {
  if (zone < 0 || zone >= kNumZones) throw InvalidArgument("zone out of range");
  Waveform z = Waveform::Zeros(mixture.sample_rate(), mixture.num_channels(),
                               mixture.num_samples());
  for (int i = 0; i < kNumZones; ++i)
    if (i != zone) z += targets[i];
  z += echo_image;
  z += noise;
  return z;
}

namespace {

Waveform Reverberate(const Rir& rir, std::span<const double> dry, size_t n,
                     int fs) {
  std::vector<std::vector<double>> ch;
  for (const auto& h : rir.taps) ch.push_back(Convolve(dry, h, n));
  return Waveform(fs, std::move(ch));
}

std::vector<double> PadTo(std::span<const double> x, size_t n) {
  std::vector<double> out(n, 0.0);
  std::copy_n(x.begin(), std::min(n, x.size()), out.begin());
  return out;
}

}  // namespace

SceneRender RenderScene(
    const CabinSpec& spec,
    const std::array<std::optional<Waveform>, kNumZones>& sources,
    const std::optional<Waveform>& echo_source, const SceneOptions& options) {
  spec.Validate();
  const int fs = spec.sample_rate;
  size_t n = 0;
  bool any = false;
  auto check_input = [&](const Waveform& w, const char* what) {
    if (w.sample_rate() != fs)
      throw InvalidArgument(std::string(what) + " sample rate " +
                            std::to_string(w.sample_rate()) +
                            " does not match scene rate " + std::to_string(fs));
    if (w.num_channels() != 1)
      throw InvalidArgument(std::string(what) + " must be mono");
    n = std::max(n, w.num_samples());
  };
  for (const auto& s : sources) {
    if (s) {
      check_input(*s, "source");
      any = true;
    }
  }
  if (!any) throw InvalidArgument("scene needs at least one source");
  if (echo_source) check_input(*echo_source, "echo source");

  const size_t mics = spec.mics.size();
  SceneRender r;
  r.spec = spec;
  for (int z = 0; z < kNumZones; ++z) {
    r.active[z] = sources[z].has_value();
    if (!sources[z]) {
      r.targets[z] = Waveform::Zeros(fs, mics, n);
      continue;
    }
    const auto dry = PadTo(sources[z]->channel(0), n);
    r.targets[z] = Reverberate(SimulateRir(spec, spec.zones[z]), dry, n, fs);
  }
  Waveform speech = Waveform::Zeros(fs, mics, n);
  for (const auto& t : r.targets) speech += t;
  const double speech_power = speech.MeanPower();
  if (!(speech_power > 0.0))
    throw DataError("all sources are silent; SNR/SER undefined");

  r.echo_image = Waveform::Zeros(fs, mics, n);
  r.echo_ref = Waveform::Zeros(fs, 1, n);
  if (echo_source) {
    r.has_echo = true;
    Waveform x = Waveform::Mono(fs, PadTo(echo_source->channel(0), n));
    const Waveform distorted = DistortLoudspeaker(x, options.distortion);
    Waveform image =
        Reverberate(SimulateRir(spec, spec.loudspeaker), distorted.channel(0),
                    n, fs);
    const double p = image.MeanPower();
    if (!(p > 0.0)) throw DataError("echo source is silent");
    const double gain =
        std::sqrt(speech_power / (p * std::pow(10.0, options.ser_db / 10.0)));
    image *= gain;
    r.echo_image = std::move(image);
    r.echo_ref = std::move(x);
  }

  r.noise = Waveform::Zeros(fs, mics, n);
  if (std::isfinite(options.snr_db)) {
    r.has_noise = true;
    const auto point = NoiseSignal(options.noise_kind, n, fs, options.seed);
    Waveform noise = Reverberate(SimulateRir(spec, spec.noise_source), point,
                                 n, fs);
    const double point_power = noise.MeanPower();
    const double diffuse_gain =
        std::sqrt(point_power * std::pow(10.0, options.diffuse_level_db / 10.0));
    for (size_t m = 0; m < mics; ++m) {
      const auto diffuse =
          NoiseSignal(options.noise_kind, n, fs, options.seed + 1 + m);
      auto ch = noise.mutable_channel(m);
      for (size_t i = 0; i < n; ++i) ch[i] += diffuse_gain * diffuse[i];
    }
    const double p = noise.MeanPower();
    noise *= std::sqrt(speech_power / (p * std::pow(10.0, options.snr_db / 10.0)));
    r.noise = std::move(noise);
  }

  auto assemble = [&] {
    r.mixture = r.SpeechImage();
    r.mixture += r.echo_image;
    r.mixture += r.noise;
  };
  assemble();
  const double peak = std::max(r.mixture.PeakAbs(), r.echo_ref.PeakAbs());
  if (peak > 0.95) {
    const double g = 0.95 / peak;
    r.echo_ref *= g;
    r.echo_image *= g;
    r.noise *= g;
    for (auto& t : r.targets) t *= g;
    assemble();
  }

  const double ps = r.SpeechImage().MeanPower();
  r.snr_db = r.has_noise ? 10.0 * std::log10(ps / r.noise.MeanPower())
                         : std::numeric_limits<double>::infinity();
  r.ser_db = r.has_echo ? 10.0 * std::log10(ps / r.echo_image.MeanPower())
                        : std::numeric_limits<double>::quiet_NaN();
  return r;
}

}  // namespace melsb
