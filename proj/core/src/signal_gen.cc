#include "melsb/signal_gen.h"

#include <algorithm>
#include <cmath>
#include <array>
#include <random>

#include "melsb/types.h"

namespace melsb {
namespace {

struct Resonator {
  double a1 = 0.0, a2 = 0.0, gain = 1.0;
  double y1 = 0.0, y2 = 0.0;

  void Tune(double freq, double bandwidth, int fs) {
    const double r = std::exp(-kPi * bandwidth / fs);
    a1 = 2.0 * r * std::cos(2.0 * kPi * freq / fs);
    a2 = -r * r;
    gain = 1.0 - r;
  }
  double Step(double x) {
    const double y = gain * x + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

void NormalizePeak(std::vector<double>& x, double peak) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m > 0.0)
    for (double& v : x) v *= peak / m;
}

void NormalizePower(std::vector<double>& x) {
  double p = 0.0;
  for (double v : x) p += v * v;
  if (p <= 0.0) return;
  const double g = 1.0 / std::sqrt(p / x.size());
  for (double& v : x) v *= g;
}

}  // namespace

std::vector<double> SpeechLikeSignal(size_t num_samples, int sample_rate,
                                     uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 0x5EEDULL);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto range = [&](double lo, double hi) { return lo + (hi - lo) * uni(rng); };

  std::vector<double> out(num_samples, 0.0);
  const double fs = sample_rate;
  const double f0_base = range(95.0, 230.0);
  std::array<Resonator, 3> formants;
  double phase = 0.0;

  size_t pos = static_cast<size_t>(range(0.0, 0.1) * fs);
  while (pos < num_samples) {
    const double kind = uni(rng);
    if (kind < 0.18) {
      // Fricative: high-passed noise burst.
      const size_t len = static_cast<size_t>(range(0.05, 0.12) * fs);
      Resonator hiss;
      hiss.Tune(range(3500.0, 6000.0), range(1500.0, 2500.0), sample_rate);
      const double amp = range(0.05, 0.2);
      for (size_t i = 0; i < len && pos + i < num_samples; ++i) {
        const double env = std::sin(kPi * i / len);
        out[pos + i] += amp * env * hiss.Step(gauss(rng));
      }
      pos += len;
    } else {
      // Voiced syllable with a pitch glide and fixed formants.
      const size_t len = static_cast<size_t>(range(0.12, 0.3) * fs);
      const double f0_start = f0_base * range(0.85, 1.15);
      const double f0_end = f0_base * range(0.85, 1.15);
      formants[0].Tune(range(300.0, 800.0), range(60.0, 120.0), sample_rate);
      formants[1].Tune(range(900.0, 2300.0), range(80.0, 150.0), sample_rate);
      formants[2].Tune(range(2400.0, 3300.0), range(100.0, 200.0), sample_rate);
      const double amp = range(0.5, 1.0);
      const size_t ramp = static_cast<size_t>(0.02 * fs);
      for (size_t i = 0; i < len && pos + i < num_samples; ++i) {
        const double u = static_cast<double>(i) / len;
        const double f0 = f0_start + (f0_end - f0_start) * u;
        phase += 2.0 * kPi * f0 / fs;
        if (phase > 2.0 * kPi) phase -= 2.0 * kPi;
        const int harmonics =
            std::min(40, static_cast<int>(0.5 * fs / f0) - 1);
        double src = 0.0;
        for (int h = 1; h <= harmonics; ++h) src += std::sin(h * phase) / h;
        src += 0.02 * gauss(rng);
        double y = src;
        for (auto& r : formants) y = r.Step(y) * 4.0;
        double env = 1.0;
        if (i < ramp) env = 0.5 - 0.5 * std::cos(kPi * i / ramp);
        if (len - i < ramp) env = 0.5 - 0.5 * std::cos(kPi * (len - i) / ramp);
        out[pos + i] += amp * env * y;
      }
      pos += len;
    }
    pos += static_cast<size_t>(range(0.04, 0.15) * fs);
  }
  NormalizePeak(out, 0.5);
  return out;
}

NoiseKind ParseNoiseKind(const std::string& name) {
  if (name == "white") return NoiseKind::kWhite;
  if (name == "car") return NoiseKind::kCar;
  if (name == "modulated") return NoiseKind::kModulated;
  throw InvalidArgument("unknown noise kind: " + name);
}

std::string ToString(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kWhite: return "white";
    case NoiseKind::kCar: return "car";
    case NoiseKind::kModulated: return "modulated";
  }
  return "unknown";
}

std::vector<double> NoiseSignal(NoiseKind kind, size_t num_samples,
                                int sample_rate, uint64_t seed) {
  std::mt19937_64 rng(seed * 0xD1B54A32D192ED03ULL + 0x401CEULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> out(num_samples);
  for (double& v : out) v = gauss(rng);
  if (kind == NoiseKind::kWhite) {
    NormalizePower(out);
    return out;
  }
  // Two cascaded one-pole low-passes at ~300 Hz plus a white floor.
  const double a = std::exp(-2.0 * kPi * 300.0 / sample_rate);
  double s1 = 0.0, s2 = 0.0;
  for (double& v : out) {
    s1 = a * s1 + (1.0 - a) * v;
    s2 = a * s2 + (1.0 - a) * s1;
    v = s2 * 8.0 + 0.05 * v;
  }
  if (kind == NoiseKind::kModulated) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double rate = 0.4 + 0.8 * uni(rng);
    const double phase = 2.0 * kPi * uni(rng);
    for (size_t i = 0; i < out.size(); ++i) {
      const double m =
          0.5 + 0.5 * std::sin(2.0 * kPi * rate * i / sample_rate + phase);
      out[i] *= 0.05 + m * m;
    }
  }
  NormalizePower(out);
  return out;
}

}  // namespace melsb
