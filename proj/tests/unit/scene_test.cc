#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "melsb/parallel.h"
#include "melsb/scene.h"
#include "melsb/signal_gen.h"
#include "test_util.h"

namespace melsb {
namespace {

constexpr int kFs = 16000;

// Schroeder backward integral, T60 extrapolated from the -5..-35 dB fit.
double SchroederT30(const std::vector<double>& h, int fs) {
  std::vector<double> edc(h.size());
  double acc = 0.0;
  for (size_t i = h.size(); i-- > 0;) {
    acc += h[i] * h[i];
    edc[i] = acc;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < h.size(); ++i) {
    const double db = 10.0 * std::log10(edc[i] / edc[0]);
    if (db > -5.0 || db < -35.0) continue;
    const double x = static_cast<double>(i) / fs;
    sx += x;
    sy += db;
    sxx += x * x;
    sxy += x * db;
    ++n;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return -60.0 / slope;
}

CabinSpec Anechoic() {
  CabinSpec spec = CabinSpec::Default();
  spec.rt60 = 0.0;
  return spec;
}

Waveform Speech(double seconds, uint64_t seed) {
  return Waveform::Mono(
      kFs, SpeechLikeSignal(static_cast<size_t>(seconds * kFs), kFs, seed));
}

TEST(CabinSpecTest, DefaultIsValid) {
  const CabinSpec spec = CabinSpec::Default();
  EXPECT_NO_THROW(spec.Validate());
  EXPECT_NEAR(Distance(spec.mics[0], spec.mics[1]), kMicSpacing, 1e-9);
}

TEST(CabinSpecTest, RejectsBadSpacingRt60AndPositions) {
  CabinSpec spec = CabinSpec::Default();
  spec.mics[1].y += 0.01;
  EXPECT_THROW(spec.Validate(), InvalidArgument);
  spec = CabinSpec::Default();
  spec.rt60 = 0.7;
  EXPECT_THROW(spec.Validate(), InvalidArgument);
  spec = CabinSpec::Default();
  spec.zones[2].x = spec.dims.x + 0.1;
  EXPECT_THROW(spec.Validate(), InvalidArgument);
}

TEST(RirTest, DirectPathAtOneMetre) {
  CabinSpec spec = Anechoic();
  const Position src{spec.mics[0].x + 1.0, spec.mics[0].y, spec.mics[0].z};
  const Rir rir = SimulateRir(spec, src);
  const auto& h = rir.taps[0];
  // 1 m / 343 m/s * 16 kHz = 46.647 samples.
  EXPECT_NEAR(rir.direct_delay[0], 46.647, 1e-3);
  const size_t peak = std::max_element(h.begin(), h.end(),
                                       [](double a, double b) {
                                         return std::abs(a) < std::abs(b);
                                       }) -
                      h.begin();
  EXPECT_EQ(peak, 47u);
}

TEST(RirTest, DirectPathGainFallsAsOneOverDistance) {
  CabinSpec spec = Anechoic();
  for (double d : {0.5, 1.0, 1.5}) {
    const Position src{spec.mics[0].x + d, spec.mics[0].y, spec.mics[0].z};
    const Rir rir = SimulateRir(spec, src);
    const auto& h = rir.taps[0];
    double sum = 0.0;
    for (double v : h) sum += v;
    // The windowed-sinc taps sum to about one, so the DC gain is 1/(4 pi d).
    EXPECT_NEAR(sum * 4.0 * kPi * d, 1.0, 0.02) << "d = " << d;
  }
}

TEST(RirTest, CoincidentOrOutsideSourceIsRejected) {
  const CabinSpec spec = Anechoic();
  EXPECT_THROW(SimulateRir(spec, spec.mics[0]), InvalidArgument);
  EXPECT_THROW(SimulateRir(spec, {-0.1, 0.5, 0.5}), InvalidArgument);
}

TEST(RirTest, AnechoicPeakWithinOneSampleOfGeometricDelay) {
  CabinSpec spec = Anechoic();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(0.1, spec.dims.x - 0.1),
      uy(0.1, spec.dims.y - 0.1), uz(0.1, spec.dims.z - 0.1);
  for (int i = 0; i < 20; ++i) {
    const Position src{ux(rng), uy(rng), uz(rng)};
    if (Distance(src, spec.mics[0]) < 0.1 || Distance(src, spec.mics[1]) < 0.1)
      continue;
    const Rir rir = SimulateRir(spec, src);
    for (size_t m = 0; m < 2; ++m) {
      const auto& h = rir.taps[m];
      const auto peak = std::max_element(h.begin(), h.end()) - h.begin();
      const double expected =
          Distance(src, spec.mics[m]) / kSpeedOfSound * kFs;
      EXPECT_LE(std::abs(peak - std::round(expected)), 1.0);
    }
  }
}

TEST(RirTest, ReverberantDecayMatchesRt60OnAverage) {
  CabinSpec spec = CabinSpec::Default();
  spec.rt60 = 0.3;
  double sum = 0.0;
  int n = 0;
  for (const auto& z : spec.zones) {
    const Rir rir = SimulateRir(spec, z);
    for (const auto& h : rir.taps) {
      const double t30 = SchroederT30(h, kFs);
      EXPECT_NEAR(t30, 0.3, 0.3 * 0.15);
      sum += t30;
      ++n;
    }
  }
  EXPECT_NEAR(sum / n, 0.3, 0.03);
}

TEST(RirTest, LengthCoversRt60Margin) {
  CabinSpec spec = CabinSpec::Default();
  spec.rt60 = 0.15;
  const Rir rir = SimulateRir(spec, spec.zones[0]);
  EXPECT_GE(rir.taps[0].size(), static_cast<size_t>(1.2 * 0.15 * kFs));
}

TEST(RirTest, SabineOutOfRangeIsRejected) {
  EXPECT_THROW(SabineAbsorption({2.6, 1.7, 1.2}, 0.001), InvalidArgument);
  EXPECT_THROW(SabineAbsorption({2.6, 1.7, 1.2}, 0.0), InvalidArgument);
  EXPECT_GT(SabineAbsorption({2.6, 1.7, 1.2}, 0.3), 0.0);
}

TEST(DistortionTest, HardClip) {
  DistortionParams p;
  p.kind = DistortionKind::kClip;
  p.clip_threshold = 0.5;
  const Waveform y =
      DistortLoudspeaker(Waveform::Mono(kFs, {0.2, 0.8, -0.9}), p);
  EXPECT_EQ(y.channel(0)[0], 0.2);
  EXPECT_EQ(y.channel(0)[1], 0.5);
  EXPECT_EQ(y.channel(0)[2], -0.5);
}

TEST(DistortionTest, SigmoidIsOddAndLinearForSmallSignals) {
  DistortionParams p;
  p.kind = DistortionKind::kSigmoid;
  std::vector<double> x;
  for (int i = -100; i <= 100; ++i) x.push_back(i * 0.01);
  std::vector<double> neg(x.size());
  std::transform(x.begin(), x.end(), neg.begin(), [](double v) { return -v; });
  const Waveform y = DistortLoudspeaker(Waveform::Mono(kFs, x), p);
  const Waveform yn = DistortLoudspeaker(Waveform::Mono(kFs, neg), p);
  for (size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(yn.channel(0)[i], -y.channel(0)[i], 1e-15);
    if (std::abs(x[i]) <= 0.01 && x[i] != 0.0) {
      EXPECT_NEAR(y.channel(0)[i] / x[i], 1.0, 0.01);
    }
  }
}

TEST(RenderSceneTest, SingleCleanSpeakerMixtureIsItsImage) {
  CabinSpec spec = CabinSpec::Default();
  spec.rt60 = 0.15;
  SceneOptions opt;
  opt.snr_db = std::numeric_limits<double>::infinity();
  std::array<std::optional<Waveform>, kNumZones> src;
  src[1] = Speech(1.0, 3);
  const SceneRender r = RenderScene(spec, src, std::nullopt, opt);
  EXPECT_FALSE(r.has_noise);
  EXPECT_FALSE(r.has_echo);
  for (size_t c = 0; c < 2; ++c)
    for (size_t i = 0; i < r.mixture.num_samples(); ++i)
      ASSERT_EQ(r.mixture.channel(c)[i], r.targets[1].channel(c)[i]);
  for (double v : r.targets[0].channel(0)) EXPECT_EQ(v, 0.0);
}

TEST(RenderSceneTest, MixtureIsSumOfComponents) {
  CabinSpec spec = CabinSpec::Default();
  spec.rt60 = 0.15;
  SceneOptions opt;
  opt.snr_db = 5.0;
  opt.ser_db = -5.0;
  std::array<std::optional<Waveform>, kNumZones> src;
  src[0] = Speech(1.0, 1);
  src[3] = Speech(1.0, 2);
  const SceneRender r = RenderScene(spec, src, Speech(1.0, 4), opt);
  for (size_t c = 0; c < 2; ++c) {
    for (size_t i = 0; i < r.mixture.num_samples(); ++i) {
      double sum = r.echo_image.channel(c)[i] + r.noise.channel(c)[i];
      for (const auto& t : r.targets) sum += t.channel(c)[i];
      ASSERT_NEAR(r.mixture.channel(c)[i], sum, 1e-14);
    }
  }
}

TEST(RenderSceneTest, RealizedSnrAndSerMatchRequest) {
  CabinSpec spec = CabinSpec::Default();
  spec.rt60 = 0.15;
  SceneOptions opt;
  opt.snr_db = 0.0;
  opt.ser_db = -10.0;
  opt.distortion.kind = DistortionKind::kClip;
  std::array<std::optional<Waveform>, kNumZones> src;
  src[0] = Speech(1.5, 7);
  const SceneRender r = RenderScene(spec, src, Speech(1.5, 8), opt);
  const double speech = r.SpeechImage().MeanPower();
  EXPECT_NEAR(10.0 * std::log10(speech / r.noise.MeanPower()), 0.0, 0.01);
  EXPECT_NEAR(10.0 * std::log10(speech / r.echo_image.MeanPower()), -10.0,
              0.01);
  EXPECT_NEAR(r.snr_db, 0.0, 0.01);
  EXPECT_NEAR(r.ser_db, -10.0, 0.01);
}

TEST(RenderSceneTest, DeterministicAcrossRunsAndThreadCounts) {
  CabinSpec spec = CabinSpec::Default();
  spec.rt60 = 0.15;
  SceneOptions opt;
  opt.seed = 21;
  std::array<std::optional<Waveform>, kNumZones> src;
  src[0] = Speech(1.0, 1);
  src[2] = Speech(1.0, 2);
  SetNumThreads(1);
  const SceneRender a = RenderScene(spec, src, std::nullopt, opt);
  SetNumThreads(4);
  const SceneRender b = RenderScene(spec, src, std::nullopt, opt);
  SetNumThreads(1);
  EXPECT_EQ(a.mixture.channels(), b.mixture.channels());
  EXPECT_EQ(a.noise.channels(), b.noise.channels());
}

TEST(RenderSceneTest, NeedsAtLeastOneSource) {
  std::array<std::optional<Waveform>, kNumZones> src;
  EXPECT_THROW(RenderScene(CabinSpec::Default(), src, std::nullopt, {}),
               InvalidArgument);
}

TEST(SignalGenTest, SpeechLikeIsDeterministicAndBounded) {
  const auto a = SpeechLikeSignal(8000, kFs, 3);
  const auto b = SpeechLikeSignal(8000, kFs, 3);
  EXPECT_EQ(a, b);
  double peak = 0.0;
  for (double v : a) peak = std::max(peak, std::abs(v));
  EXPECT_NEAR(peak, 0.5, 1e-12);
  EXPECT_NE(a, SpeechLikeSignal(8000, kFs, 4));
}

TEST(SignalGenTest, NoiseHasUnitVariance) {
  for (NoiseKind k : {NoiseKind::kWhite, NoiseKind::kCar, NoiseKind::kModulated}) {
    const auto x = NoiseSignal(k, 32000, kFs, 1);
    double p = 0.0;
    for (double v : x) p += v * v;
    EXPECT_NEAR(p / x.size(), 1.0, 1e-9) << ToString(k);
  }
}

}  // namespace
}  // namespace melsb
