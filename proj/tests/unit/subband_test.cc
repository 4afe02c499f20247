#include <cmath>
#include <numeric>
#include <vector>

#include "gtest/gtest.h"
#include "melsb/subband.h"
#include "melsb/weight_bundle.h"
#include "test_util.h"

namespace melsb {
namespace {

using testing_util::Gaussian;
using testing_util::RelativeL2;

constexpr int kBins = 257;
constexpr int kFs = 16000;

// Frozen output of tests/oracles/mel_band_edges.py.
const std::vector<int> kEdges8 = {0, 8, 20, 35, 57, 86, 126, 181, 257};
const std::vector<int> kEdges16 = {0,  4,  8,   14,  20,  27,  35,  45, 57,
                                   70, 86, 104, 126, 151, 181, 215, 257};
const std::vector<int> kEdges32 = {
    0,  2,  4,  6,  8,  11, 14, 16,  20,  23,  27,  31,  35,  40,  45,  51, 57,
    63, 70, 78, 86, 95, 104, 115, 126, 138, 151, 165, 181, 197, 215, 235, 257};
const std::vector<int> kEdges64 = {
    0,   1,   2,   3,   4,   5,   6,   7,   8,   10,  11,  12,  14,
    15,  16,  18,  20,  21,  23,  25,  27,  29,  31,  33,  35,  38,
    40,  42,  45,  48,  51,  54,  57,  60,  63,  66,  70,  74,  78,
    82,  86,  90,  95,  99,  104, 109, 115, 120, 126, 132, 138, 144,
    151, 158, 165, 173, 181, 189, 197, 206, 215, 225, 235, 245, 257};

class BandPlanOracleTest
    : public ::testing::TestWithParam<std::pair<int, std::vector<int>>> {};

TEST_P(BandPlanOracleTest, MatchesBruteForceEdges) {
  const auto& [k, edges] = GetParam();
  const BandPlan plan = MakeBandPlan(kBins, k, kFs);
  EXPECT_EQ(plan.edges, edges);
}

TEST_P(BandPlanOracleTest, PartitionInvariants) {
  const BandPlan plan = MakeBandPlan(kBins, GetParam().first, kFs);
  EXPECT_NO_THROW(plan.Validate());
  const int k = plan.num_bands();
  int sum = 0;
  double low = 0.0, high = 0.0;
  for (int b = 0; b < k; ++b) {
    EXPECT_GE(plan.width(b), 1);
    sum += plan.width(b);
    (b < k / 2 ? low : high) += plan.width(b);
    if (b > 0) {
      EXPECT_GE(plan.width(b), plan.width(b - 1) - 1);
    }
  }
  EXPECT_EQ(sum, kBins);
  EXPECT_GE(high / (k - k / 2), low / (k / 2));
}

INSTANTIATE_TEST_SUITE_P(
    MelEdges, BandPlanOracleTest,
    ::testing::Values(std::make_pair(8, kEdges8), std::make_pair(16, kEdges16),
                      std::make_pair(32, kEdges32),
                      std::make_pair(64, kEdges64)));

TEST(BandPlanTest, DegenerateBandCounts) {
  EXPECT_EQ(MakeBandPlan(kBins, 1, kFs).edges, (std::vector<int>{0, 257}));
  const BandPlan full = MakeBandPlan(kBins, kBins, kFs);
  std::vector<int> identity(kBins + 1);
  std::iota(identity.begin(), identity.end(), 0);
  EXPECT_EQ(full.edges, identity);
  EXPECT_THROW(MakeBandPlan(kBins, 0, kFs), InvalidArgument);
  EXPECT_THROW(MakeBandPlan(kBins, kBins + 1, kFs), InvalidArgument);
}

TEST(BandPlanTest, FirstBandNearMelSpacingAndLastMuchWider) {
  const BandPlan plan = MakeBandPlan(kBins, 8, kFs);
  EXPECT_EQ(plan.edges[1], 8);
  // 8 bins of 31.25 Hz = 250 Hz; the mel point itself sits near 259 Hz.
  EXPECT_NEAR(MelToHz(HzToMel(kFs / 2.0) / 8.0), 259.0, 5.0);
  EXPECT_GE(plan.width(7), 4 * plan.width(0));
}

TEST(BandPlanTest, ManifestRoundTrip) {
  const BandPlan plan = MakeBandPlan(kBins, 16, kFs);
  const std::string text = plan.ToManifest();
  EXPECT_EQ(text.rfind("K 16\n", 0), 0u);
  const BandPlan back = BandPlan::FromManifest(text, kBins);
  EXPECT_EQ(back.edges, plan.edges);
  EXPECT_EQ(back.sample_rate, kFs);
  EXPECT_THROW(BandPlan::FromManifest("K 2\nfs 16000\nedges 0 5 5\n", 5),
               InvalidArgument);
}

TEST(MelScaleTest, KnownPoints) {
  EXPECT_NEAR(HzToMel(700.0), 2595.0 * std::log10(2.0), 1e-9);
  EXPECT_NEAR(MelToHz(HzToMel(1234.5)), 1234.5, 1e-9);
}

TEST(AnalyzeTest, PassthroughZeroAndAveraging) {
  const int t = 3, d = 4;
  const auto feat = Gaussian(static_cast<size_t>(t) * kBins * d, 1);
  const BandPlan full = MakeBandPlan(kBins, kBins, kFs);
  const auto pass = SubbandFilters::Passthrough(full);
  const SubbandFeature sub = Analyze(feat, t, d, full, pass);
  for (int tt = 0; tt < t; ++tt)
    for (int f = 0; f < kBins; ++f)
      for (int dd = 0; dd < d; ++dd)
        EXPECT_EQ(sub.at(f, tt, 0, dd),
                  feat[(static_cast<size_t>(tt) * kBins + f) * d + dd]);
  EXPECT_EQ(Synthesize(sub, full, pass), feat);

  const BandPlan plan = MakeBandPlan(kBins, 8, kFs);
  SubbandFilters avg;
  avg.embed = 1;
  SubbandFilters zero;
  zero.embed = 1;
  for (int k = 0; k < 8; ++k) {
    avg.analysis.emplace_back(plan.width(k), 1.0 / plan.width(k));
    avg.synthesis.emplace_back(plan.width(k), 1.0);
    zero.analysis.emplace_back(plan.width(k), 0.0);
    zero.synthesis.emplace_back(plan.width(k), 0.0);
  }
  const SubbandFeature a = Analyze(feat, t, d, plan, avg);
  for (int k = 0; k < 8; ++k) {
    for (int tt = 0; tt < t; ++tt) {
      for (int dd = 0; dd < d; ++dd) {
        double mean = 0.0;
        for (int f = plan.begin(k); f < plan.begin(k) + plan.width(k); ++f)
          mean += feat[(static_cast<size_t>(tt) * kBins + f) * d + dd];
        mean /= plan.width(k);
        EXPECT_NEAR(a.at(k, tt, 0, dd), mean, 1e-12);
      }
    }
  }
  for (double v : Analyze(feat, t, d, plan, zero).data) EXPECT_EQ(v, 0.0);
  SubbandFeature z(8, t, 1, d);
  for (double v : Synthesize(z, plan, avg)) EXPECT_EQ(v, 0.0);
}

TEST(SubbandFiltersTest, OrthonormalRoundTripForEveryBandCount) {
  for (int k : {8, 16, 32, 64}) {
    const BandPlan plan = MakeBandPlan(kBins, k, kFs);
    const int e = plan.max_width();
    const auto filters = SubbandFilters::Orthonormal(plan, e, 42);
    const int t = 4, d = 12;
    const auto feat = Gaussian(static_cast<size_t>(t) * kBins * d, k);
    const auto back = Synthesize(Analyze(feat, t, d, plan, filters), plan, filters);
    EXPECT_LE(RelativeL2(back, feat), 1e-6) << "K = " << k;
  }
}

TEST(SubbandFiltersTest, SynthesisIsPseudoInverse) {
  const BandPlan plan = MakeBandPlan(kBins, 16, kFs);
  const auto f = SubbandFilters::Orthonormal(plan, 32, 3);
  for (int k = 0; k < 16; ++k) {
    const int w = plan.width(k);
    const auto pinv = PseudoInverse(f.analysis[k], 32, w);
    for (size_t i = 0; i < pinv.size(); ++i)
      EXPECT_NEAR(pinv[i], f.synthesis[k][i], 1e-10);
  }
}

TEST(SubbandFiltersTest, BundleRoundTripAndMissingSynthesis) {
  const BandPlan plan = MakeBandPlan(kBins, 8, kFs);
  const auto f = SubbandFilters::Orthonormal(plan, 16, 9);
  WeightBundle bundle;
  f.ToBundle(&bundle);
  const auto g = SubbandFilters::FromBundle(bundle, plan, 16);
  EXPECT_EQ(g.analysis, f.analysis);
  EXPECT_EQ(g.synthesis, f.synthesis);

  WeightBundle only_analysis;
  for (int k = 0; k < 8; ++k)
    only_analysis.Set("subband.analysis." + std::to_string(k),
                      bundle.Get("subband.analysis." + std::to_string(k)));
  const auto h = SubbandFilters::FromBundle(only_analysis, plan, 16);
  for (int k = 0; k < 8; ++k)
    for (size_t i = 0; i < h.synthesis[k].size(); ++i)
      EXPECT_NEAR(h.synthesis[k][i], f.synthesis[k][i], 1e-10);
  EXPECT_THROW(SubbandFilters::FromBundle(bundle, plan, 12), InvalidArgument);
}

TEST(PseudoInverseTest, MoorePenroseIdentity) {
  const int r = 5, c = 3;
  const auto a = Gaussian(r * c, 4);
  const auto p = PseudoInverse(a, r, c);
  // a p a == a with p stored cols x rows.
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) {
      double v = 0.0;
      for (int k = 0; k < c; ++k) {
        double pa_kj = 0.0;
        for (int m = 0; m < r; ++m) pa_kj += p[k * r + m] * a[m * c + j];
        v += a[i * c + k] * pa_kj;
      }
      EXPECT_NEAR(v, a[i * c + j], 1e-10);
    }
  }
}

}  // namespace
}  // namespace melsb
