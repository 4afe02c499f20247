#include "melsb/subband.h"

#include <Eigen/Dense>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "melsb/parallel.h"
#include "melsb/types.h"

namespace melsb {
namespace {

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<double> ToVector(const RowMat& m) {
  return std::vector<double>(m.data(), m.data() + m.size());
}

}  // namespace

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

int BandPlan::max_width() const {
  int w = 0;
  for (int k = 0; k < num_bands(); ++k) w = std::max(w, width(k));
  return w;
}

void BandPlan::Validate() const {
  if (edges.size() < 2 || edges.front() != 0 || edges.back() != num_bins)
    throw InvalidArgument("band edges must run from 0 to the bin count");
  for (size_t k = 1; k < edges.size(); ++k)
    if (edges[k] <= edges[k - 1])
      throw InvalidArgument("band edges must strictly increase");
}

std::string BandPlan::ToManifest() const {
  std::ostringstream out;
  out << "K " << num_bands() << "\nfs " << sample_rate << "\nedges";
  for (int e : edges) out << ' ' << e;
  out << '\n';
  return out.str();
}

BandPlan BandPlan::FromManifest(const std::string& text, int num_bins) {
  std::istringstream in(text);
  std::string key;
  int k = -1;
  BandPlan plan;
  plan.num_bins = num_bins;
  while (in >> key) {
    if (key == "K") {
      in >> k;
    } else if (key == "fs") {
      in >> plan.sample_rate;
    } else if (key == "edges") {
      int e;
      while (in >> e) plan.edges.push_back(e);
    } else {
      throw InvalidArgument("unknown band manifest key: " + key);
    }
  }
  if (k != plan.num_bands())
    throw InvalidArgument("band manifest edge count does not match K");
  plan.Validate();
  return plan;
}

BandPlan MakeBandPlan(int num_bins, int num_bands, int sample_rate) {
  if (num_bins < 1 || num_bands < 1)
    throw InvalidArgument("band plan needs positive bin and band counts");
  if (num_bands > num_bins)
    throw InvalidArgument("cannot split " + std::to_string(num_bins) +
                          " bins into " + std::to_string(num_bands) +
                          " non-empty bands");
  if (sample_rate <= 0) throw InvalidArgument("sample rate must be positive");
  const double bin_hz =
      static_cast<double>(sample_rate) / (2.0 * (num_bins - 1));
  const double mel_max = HzToMel(sample_rate / 2.0);
  BandPlan plan;
  plan.num_bins = num_bins;
  plan.sample_rate = sample_rate;
  auto& e = plan.edges;
  e.push_back(0);
  for (int k = 1; k < num_bands; ++k) {
    const double hz = MelToHz(k * mel_max / num_bands);
    e.push_back(static_cast<int>(std::floor(hz / bin_hz + 0.5)));
  }
  e.push_back(num_bins);
  for (int k = 1; k <= num_bands; ++k)
    if (e[k] <= e[k - 1]) e[k] = e[k - 1] + 1;
  e[num_bands] = num_bins;
  for (int k = num_bands - 1; k > 0; --k)
    if (e[k] >= e[k + 1]) e[k] = e[k + 1] - 1;
  plan.Validate();
  return plan;
}

std::vector<double> PseudoInverse(std::span<const double> m, int rows,
                                  int cols) {
  if (m.size() != static_cast<size_t>(rows) * cols)
    throw InvalidArgument("pseudo-inverse shape mismatch");
  Eigen::Map<const RowMat> a(m.data(), rows, cols);
  Eigen::CompleteOrthogonalDecomposition<RowMat> cod(a);
  return ToVector(cod.pseudoInverse());
}

SubbandFilters SubbandFilters::Orthonormal(const BandPlan& plan, int embed,
                                           uint64_t seed) {
  if (embed < 1) throw InvalidArgument("embedding size must be positive");
  plan.Validate();
  SubbandFilters fl;
  fl.embed = embed;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int k = 0; k < plan.num_bands(); ++k) {
    const int w = plan.width(k);
    const int tall = std::max(embed, w), thin = std::min(embed, w);
    RowMat gauss(tall, thin);
    for (int r = 0; r < tall; ++r)
      for (int c = 0; c < thin; ++c) gauss(r, c) = g(rng);
    Eigen::HouseholderQR<RowMat> qr(gauss);
    RowMat q = qr.householderQ() * RowMat::Identity(tall, thin);
    RowMat analysis = embed >= w ? q : RowMat(q.transpose());
    fl.analysis.push_back(ToVector(analysis));
    fl.synthesis.push_back(ToVector(analysis.transpose()));
  }
  return fl;
}

SubbandFilters SubbandFilters::Passthrough(const BandPlan& plan) {
  SubbandFilters fl;
  fl.embed = 1;
  for (int k = 0; k < plan.num_bands(); ++k) {
    if (plan.width(k) != 1)
      throw InvalidArgument("passthrough filters need single-bin bands");
    fl.analysis.push_back({1.0});
    fl.synthesis.push_back({1.0});
  }
  return fl;
}

SubbandFilters SubbandFilters::FromBundle(const WeightBundle& bundle,
                                          const BandPlan& plan, int embed) {
  SubbandFilters fl;
  fl.embed = embed;
  for (int k = 0; k < plan.num_bands(); ++k) {
    const int w = plan.width(k);
    const auto& a =
        bundle.Get("subband.analysis." + std::to_string(k), {embed, w}).values;
    fl.analysis.push_back(a);
    const std::string syn = "subband.synthesis." + std::to_string(k);
    fl.synthesis.push_back(bundle.Contains(syn)
                               ? bundle.Get(syn, {w, embed}).values
                               : PseudoInverse(a, embed, w));
  }
  return fl;
}

void SubbandFilters::ToBundle(WeightBundle* bundle) const {
  for (size_t k = 0; k < analysis.size(); ++k) {
    const int64_t w = static_cast<int64_t>(analysis[k].size()) / embed;
    bundle->Set("subband.analysis." + std::to_string(k),
                Tensor({embed, w}, analysis[k]));
    bundle->Set("subband.synthesis." + std::to_string(k),
                Tensor({w, embed}, synthesis[k]));
  }
}

void SubbandFilters::Validate(const BandPlan& plan) const {
  if (embed < 1) throw InvalidArgument("embedding size must be positive");
  if (static_cast<int>(analysis.size()) != plan.num_bands() ||
      static_cast<int>(synthesis.size()) != plan.num_bands())
    throw InvalidArgument("filter count does not match band count");
  for (int k = 0; k < plan.num_bands(); ++k) {
    const size_t n = static_cast<size_t>(embed) * plan.width(k);
    if (analysis[k].size() != n || synthesis[k].size() != n)
      throw InvalidArgument("filter shape does not match band " +
                            std::to_string(k));
  }
}

SubbandFeature::SubbandFeature(int bands, int frames, int embed_in, int dim_in)
    : num_bands(bands), num_frames(frames), embed(embed_in), dim(dim_in) {
  data.assign(static_cast<size_t>(bands) * frames * embed_in * dim_in, 0.0);
}

void AnalyzeBand(int k, std::span<const double> feat, int num_frames, int dim,
                 const BandPlan& plan, const SubbandFilters& filters,
                 std::span<double> out) {
  const int bins = plan.num_bins, w = plan.width(k), e_dim = filters.embed;
  if (feat.size() != static_cast<size_t>(num_frames) * bins * dim ||
      out.size() != static_cast<size_t>(num_frames) * e_dim * dim)
    throw InvalidArgument("subband analysis shape mismatch");
  const double* a = filters.analysis.at(k).data();
  const int b0 = plan.begin(k);
  for (int t = 0; t < num_frames; ++t)
    for (int e = 0; e < e_dim; ++e) {
      double* o = out.data() + (static_cast<size_t>(t) * e_dim + e) * dim;
      std::fill(o, o + dim, 0.0);
      for (int j = 0; j < w; ++j) {
        const double c = a[e * w + j];
        if (c == 0.0) continue;
        const double* in =
            feat.data() + (static_cast<size_t>(t) * bins + b0 + j) * dim;
        for (int d = 0; d < dim; ++d) o[d] += c * in[d];
      }
    }
}

void SynthesizeBand(int k, std::span<const double> in, int num_frames,
                    int dim, const BandPlan& plan,
                    const SubbandFilters& filters, std::span<double> full) {
  const int bins = plan.num_bins, w = plan.width(k), e_dim = filters.embed;
  if (in.size() != static_cast<size_t>(num_frames) * e_dim * dim ||
      full.size() != static_cast<size_t>(num_frames) * bins * dim)
    throw InvalidArgument("subband synthesis shape mismatch");
  const double* s = filters.synthesis.at(k).data();
  const int b0 = plan.begin(k);
  for (int t = 0; t < num_frames; ++t)
    for (int j = 0; j < w; ++j) {
      double* o = full.data() + (static_cast<size_t>(t) * bins + b0 + j) * dim;
      std::fill(o, o + dim, 0.0);
      for (int e = 0; e < e_dim; ++e) {
        const double c = s[j * e_dim + e];
        if (c == 0.0) continue;
        const double* x =
            in.data() + (static_cast<size_t>(t) * e_dim + e) * dim;
        for (int d = 0; d < dim; ++d) o[d] += c * x[d];
      }
    }
}

SubbandFeature Analyze(std::span<const double> feat, int num_frames, int dim,
                       const BandPlan& plan, const SubbandFilters& filters) {
  filters.Validate(plan);
  SubbandFeature sub(plan.num_bands(), num_frames, filters.embed, dim);
  ParallelFor(static_cast<size_t>(plan.num_bands()), [&](size_t b, size_t e) {
    for (size_t k = b; k < e; ++k)
      AnalyzeBand(static_cast<int>(k), feat, num_frames, dim, plan, filters,
                  sub.band(static_cast<int>(k)));
  });
  return sub;
}

std::vector<double> Synthesize(const SubbandFeature& sub, const BandPlan& plan,
                               const SubbandFilters& filters) {
  filters.Validate(plan);
  if (sub.num_bands != plan.num_bands() || sub.embed != filters.embed)
    throw InvalidArgument("subband tensor does not match plan and filters");
  std::vector<double> full(
      static_cast<size_t>(sub.num_frames) * plan.num_bins * sub.dim, 0.0);
  ParallelFor(static_cast<size_t>(plan.num_bands()), [&](size_t b, size_t e) {
    for (size_t k = b; k < e; ++k)
      SynthesizeBand(static_cast<int>(k), sub.band(static_cast<int>(k)),
                     sub.num_frames, sub.dim, plan, filters, full);
  });
  return full;
}

}  // namespace melsb
