#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "melsb/beamformer.h"
#include "test_util.h"

namespace melsb {
namespace {

using testing_util::RandomSpectrogram;

constexpr int kDim = 3;

std::vector<Complex> Outer(const std::vector<Complex>& d) {
  std::vector<Complex> m(d.size() * d.size());
  for (size_t i = 0; i < d.size(); ++i)
    for (size_t j = 0; j < d.size(); ++j) m[i * d.size() + j] = d[i] * std::conj(d[j]);
  return m;
}

std::vector<Complex> Eye(int n, double scale = 1.0) {
  std::vector<Complex> m(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) m[i * n + i] = scale;
  return m;
}

Complex Dot(const std::vector<Complex>& w, const std::vector<Complex>& x) {
  Complex acc = 0.0;
  for (size_t i = 0; i < w.size(); ++i) acc += std::conj(w[i]) * x[i];
  return acc;
}

TEST(MvdrVectorTest, WhiteNoiseGainOfThreeElementArray) {
  const std::vector<Complex> d = {std::polar(1.0, 0.0), std::polar(1.0, -0.7),
                                  std::polar(1.0, 1.9)};
  std::vector<Complex> w(kDim);
  ASSERT_TRUE(MvdrVector(Outer(d), Eye(kDim), kDim, MvdrOptions{}, w));
  // Distortionless towards the reference channel component.
  EXPECT_NEAR(std::abs(Dot(w, d) - d[0]), 0.0, 1e-5);
  double norm2 = 0.0;
  for (const auto& v : w) norm2 += std::norm(v);
  const double wng_db = 10.0 * std::log10(std::norm(Dot(w, d)) / norm2);
  EXPECT_NEAR(wng_db, 10.0 * std::log10(3.0), 1e-4);
  EXPECT_NEAR(wng_db, 4.77, 0.01);
}

TEST(MvdrVectorTest, EqualCovariancesGiveScaledReference) {
  std::vector<Complex> phi = {{2.0, 0.0}, {0.3, 0.1}, {0.0, -0.2},
                              {0.3, -0.1}, {1.5, 0.0}, {0.1, 0.0},
                              {0.0, 0.2}, {0.1, 0.0}, {1.0, 0.0}};
  for (int ref = 0; ref < kDim; ++ref) {
    MvdrOptions opt;
    opt.ref_ch = ref;
    std::vector<Complex> w(kDim);
    ASSERT_TRUE(MvdrVector(phi, phi, kDim, opt, w));
    for (int i = 0; i < kDim; ++i)
      EXPECT_NEAR(std::abs(w[i] - (i == ref ? 1.0 / kDim : 0.0)), 0.0, 1e-5);
  }
}

TEST(MvdrVectorTest, ScaleInvariant) {
  const std::vector<Complex> d = {1.0, {0.0, 1.0}, {0.5, 0.5}};
  std::vector<Complex> zz = Eye(kDim);
  zz[1] = {0.2, 0.1};
  zz[3] = {0.2, -0.1};
  std::vector<Complex> a(kDim), b(kDim);
  ASSERT_TRUE(MvdrVector(Outer(d), zz, kDim, MvdrOptions{}, a));
  auto ss = Outer(d);
  for (auto& v : ss) v *= 1e6;
  for (auto& v : zz) v *= 1e6;
  ASSERT_TRUE(MvdrVector(ss, zz, kDim, MvdrOptions{}, b));
  for (int i = 0; i < kDim; ++i) EXPECT_NEAR(std::abs(a[i] - b[i]), 0.0, 1e-9);
}

TEST(MvdrVectorTest, ZeroSpeechIsFlagged) {
  std::vector<Complex> w(kDim, 5.0);
  EXPECT_FALSE(MvdrVector(Eye(kDim, 0.0), Eye(kDim), kDim, MvdrOptions{}, w));
  for (const auto& v : w) EXPECT_EQ(v, Complex(0.0));
  MvdrOptions bad;
  bad.ref_ch = kDim;
  EXPECT_THROW(MvdrVector(Eye(kDim), Eye(kDim), kDim, bad, w), InvalidArgument);
}

TEST(OracleMvdrTest, FlagsSilentBinsAndCountsThem) {
  CovarianceSeries ss(4, 5, kDim), zz(4, 5, kDim);
  for (int t = 0; t < 4; ++t)
    for (int f = 0; f < 5; ++f) {
      auto z = zz.matrix(t, f);
      for (int i = 0; i < kDim; ++i) z[i * kDim + i] = 1.0;
      if (f != 2) {
        auto s = ss.matrix(t, f);
        for (int i = 0; i < kDim; ++i) s[i * kDim + i] = 1.0;
      }
    }
  const auto sol = OracleMvdrWeights(ss, zz);
  EXPECT_EQ(sol.num_flagged, 4u);
  for (int t = 0; t < 4; ++t) {
    EXPECT_EQ(sol.flagged[t * 5 + 2], 1);
    EXPECT_EQ(sol.flagged[t * 5 + 1], 0);
    for (int c = 0; c < kDim; ++c)
      EXPECT_EQ(sol.weights.at(0, t, 2, kBeamformerHalfTaps, c), Complex(0.0));
  }
}

TEST(SmoothScmTest, TimeInvariantAndRecursive) {
  CovarianceSeries s(3, 1, 1);
  s.at(0, 0, 0, 0) = 1.0;
  s.at(1, 0, 0, 0) = 2.0;
  s.at(2, 0, 0, 0) = 6.0;
  const auto ti = SmoothScm(s, ScmSmoothing::kTimeInvariant, 0.0);
  for (int t = 0; t < 3; ++t) EXPECT_NEAR(ti.at(t, 0, 0, 0).real(), 3.0, 1e-12);
  const auto rec = SmoothScm(s, ScmSmoothing::kRecursive, 0.5);
  EXPECT_NEAR(rec.at(0, 0, 0, 0).real(), 0.5, 1e-12);
  EXPECT_NEAR(rec.at(1, 0, 0, 0).real(), 1.25, 1e-12);
  EXPECT_NEAR(rec.at(2, 0, 0, 0).real(), 3.625, 1e-12);
  const auto fw = SmoothScm(s, ScmSmoothing::kFrameWise, 0.5);
  EXPECT_EQ(fw.data(), s.data());
  EXPECT_THROW(SmoothScm(s, ScmSmoothing::kRecursive, 1.0), InvalidArgument);
}

TEST(ApplyWeightsTest, ReferenceSelectorReturnsChannel) {
  const StftConfig cfg;
  const auto x = RandomSpectrogram(kDim, 6, cfg, 1);
  BeamformerWeights w(2, 6, 257, kBeamformerHalfTaps, kDim);
  for (int t = 0; t < 6; ++t)
    for (int f = 0; f < 257; ++f) {
      w.at(0, t, f, kBeamformerHalfTaps, 0) = 1.0;
      // Zone 1 listens only to the echo reference channel.
      w.at(1, t, f, kBeamformerHalfTaps, 2) = Complex(0.0, 1.0);
    }
  const auto out = ApplyWeights(x, w);
  ASSERT_EQ(out.size(), 2u);
  for (int t = 0; t < 6; ++t)
    for (int f = 0; f < 257; ++f) {
      EXPECT_EQ(out[0].at(0, t, f), x.at(0, t, f));
      EXPECT_NEAR(std::abs(out[1].at(0, t, f) -
                           Complex(0.0, -1.0) * x.at(2, t, f)),
                  0.0, 1e-12);
    }
  w.ZeroChannel(2);
  const auto echo_free = ApplyWeights(x, w);
  for (const auto& v : echo_free[1].data()) EXPECT_EQ(v, Complex(0.0));
}

TEST(ApplyWeightsTest, TapsReadNeighbouringFrames) {
  const StftConfig cfg;
  const auto x = RandomSpectrogram(kDim, 5, cfg, 2);
  BeamformerWeights w(1, 5, 257, kBeamformerHalfTaps, kDim);
  for (int t = 0; t < 5; ++t) w.at(0, t, 3, kBeamformerHalfTaps + 1, 1) = 1.0;
  const auto out = ApplyWeights(x, w)[0];
  for (int t = 0; t < 4; ++t) EXPECT_EQ(out.at(0, t, 3), x.at(1, t + 1, 3));
  EXPECT_EQ(out.at(0, 4, 3), Complex(0.0));
}

TEST(ApplyWeightsTest, LinearInInput) {
  const StftConfig cfg;
  const auto a = RandomSpectrogram(kDim, 4, cfg, 3);
  const auto b = RandomSpectrogram(kDim, 4, cfg, 4);
  BeamformerWeights w(1, 4, 257, 1, kDim);
  const auto r = testing_util::Gaussian(w.data().size() * 2, 5);
  for (size_t i = 0; i < w.data().size(); ++i)
    w.data()[i] = Complex(r[2 * i], r[2 * i + 1]);
  auto sum = a;
  for (size_t i = 0; i < sum.data().size(); ++i)
    sum.data()[i] = 2.0 * a.data()[i] + Complex(0.0, 3.0) * b.data()[i];
  const auto ya = ApplyWeights(a, w)[0], yb = ApplyWeights(b, w)[0],
             ys = ApplyWeights(sum, w)[0];
  for (size_t i = 0; i < ys.data().size(); ++i)
    EXPECT_NEAR(std::abs(ys.data()[i] - 2.0 * ya.data()[i] -
                         Complex(0.0, 3.0) * yb.data()[i]),
                0.0, 1e-10);
}

TEST(BeamformerWeightsTest, RealRoundTripAndLayout) {
  BeamformerWeights w(2, 3, 4, 1, 2);
  const auto r = testing_util::Gaussian(w.data().size() * 2, 6);
  for (size_t i = 0; i < w.data().size(); ++i)
    w.data()[i] = Complex(r[2 * i], r[2 * i + 1]);
  const auto real = w.ToReal();
  ASSERT_EQ(real.size(), 3u * 4 * w.real_dim());
  const size_t base = (2 * 4 + 1) * w.real_dim() + ((1 * 3 + 2) * 2 + 1) * 2;
  EXPECT_EQ(real[base], w.at(1, 2, 1, 2, 1).real());
  EXPECT_EQ(real[base + 1], w.at(1, 2, 1, 2, 1).imag());
  const auto back = BeamformerWeights::FromReal(real, 2, 3, 4, 1, 2);
  EXPECT_EQ(back.data(), w.data());
  EXPECT_THROW(BeamformerWeights::FromReal(real, 2, 3, 4, 1, 3), InvalidArgument);
}

}  // namespace
}  // namespace melsb
