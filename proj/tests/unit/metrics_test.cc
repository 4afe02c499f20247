#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "melsb/metrics.h"
#include "test_util.h"

namespace melsb {
namespace {

using testing_util::Gaussian;

TEST(SiSnrTest, ScaleInvariant) {
  const auto ref = Gaussian(8000, 1);
  auto est = ref;
  const auto noise = Gaussian(8000, 2, 0.3);
  for (size_t i = 0; i < est.size(); ++i) est[i] += noise[i];
  const double base = SiSnr(est, ref);
  for (double scale : {1e-3, 0.5, 7.0, 1e3}) {
    auto scaled = est;
    for (double& v : scaled) v *= scale;
    EXPECT_NEAR(SiSnr(scaled, ref), base, 1e-9) << scale;
  }
}

TEST(SiSnrTest, OrthogonalEqualPowerNoiseIsZeroDb) {
  std::vector<double> ref(16000), noise(16000), est(16000);
  for (size_t n = 0; n < ref.size(); ++n) {
    ref[n] = std::sin(2.0 * kPi * 50.0 * n / 16000.0);
    noise[n] = std::cos(2.0 * kPi * 50.0 * n / 16000.0);
    est[n] = ref[n] + noise[n];
  }
  EXPECT_NEAR(SiSnr(est, ref), 0.0, 0.1);
}

TEST(SiSnrTest, MeanIsIgnored) {
  const auto ref = Gaussian(4000, 3);
  auto est = Gaussian(4000, 4, 0.5);
  for (size_t i = 0; i < est.size(); ++i) est[i] += ref[i];
  const double a = SiSnr(est, ref);
  for (double& v : est) v += 3.0;
  EXPECT_NEAR(SiSnr(est, ref), a, 1e-9);
}

TEST(SiSnrTest, PerfectAndSilentEstimatesAreCapped) {
  const auto ref = Gaussian(1000, 5);
  EXPECT_EQ(SiSnr(ref, ref), kMetricCapDb);
  EXPECT_EQ(SiSnr(std::vector<double>(1000, 0.0), ref), -kMetricCapDb);
  EXPECT_THROW(SiSnr(ref, std::vector<double>(1000, 0.0)), DataError);
  EXPECT_THROW(SiSnr(ref, std::vector<double>(999, 1.0)), InvalidArgument);
}

TEST(SdrTest, DoubledEstimateIsZeroDb) {
  const auto ref = Gaussian(1000, 6);
  auto est = ref;
  for (double& v : est) v *= 2.0;
  EXPECT_NEAR(Sdr(est, ref), 0.0, 1e-12);
  EXPECT_EQ(Sdr(ref, ref), kMetricCapDb);
  EXPECT_THROW(Sdr(ref, std::vector<double>(1000, 0.0)), DataError);
}

TEST(SdrTest, NotScaleInvariant) {
  const auto ref = Gaussian(1000, 7);
  auto est = ref;
  for (double& v : est) v *= 0.5;
  EXPECT_NEAR(Sdr(est, ref), 10.0 * std::log10(4.0), 1e-9);
  EXPECT_NEAR(SiSnr(est, ref), kMetricCapDb, 1e-9);
}

TEST(LossTest, PerfectEstimateAndMseTerm) {
  const StftConfig cfg;
  const Waveform a = Waveform::Mono(16000, Gaussian(4000, 8));
  const Waveform b = Waveform::Mono(16000, Gaussian(4000, 9));
  EXPECT_NEAR(SpectralMse(a, a, cfg), 0.0, 1e-20);
  EXPECT_NEAR(LossValue({a, b}, {a, b}, cfg), -2.0 * kMetricCapDb, 1e-9);
  const double mse = SpectralMse(b, a, cfg);
  EXPECT_GT(mse, 0.0);
  EXPECT_NEAR(LossValue({b}, {a}, cfg), -SiSnr(b, a) + mse, 1e-9);
  EXPECT_THROW(LossValue({a}, {a, b}, cfg), InvalidArgument);
}

}  // namespace
}  // namespace melsb
