#include "melsb/estimator.h"

#include <cmath>
#include <random>

#include "melsb/hermitian.h"
#include "melsb/parallel.h"

namespace melsb {

std::string ToString(CrfTarget target) {
  return target == CrfTarget::kSpeech ? "speech" : "noise";
}

ComplexRatioFilter::ComplexRatioFilter(int num_frames, int num_bins,
                                       int half_taps, int num_channels,
                                       CrfTarget target, int zone)
    : num_frames_(num_frames),
      num_bins_(num_bins),
      half_taps_(half_taps),
      num_channels_(num_channels),
      target_(target),
      zone_(zone) {
  if (num_frames < 0 || num_bins < 0 || half_taps < 0 || num_channels <= 0)
    throw InvalidArgument("invalid cRF dimensions");
  data_.assign(static_cast<size_t>(num_frames) * num_bins * num_taps() *
                   num_channels,
               Complex(0.0));
}

ComplexRatioFilter ComplexRatioFilter::Identity(int num_frames, int num_bins,
                                                int half_taps,
                                                int num_channels) {
  ComplexRatioFilter crf(num_frames, num_bins, half_taps, num_channels);
  for (int t = 0; t < num_frames; ++t)
    for (int f = 0; f < num_bins; ++f)
      for (int c = 0; c < num_channels; ++c) crf.at(t, f, half_taps, c) = 1.0;
  return crf;
}

MultichannelSpectrogram ApplyCrf(const MultichannelSpectrogram& stacked,
                                 const ComplexRatioFilter& crf) {
  if (crf.num_frames() != stacked.num_frames() ||
      crf.num_bins() != stacked.num_bins() ||
      crf.num_channels() != stacked.num_channels())
    throw InvalidArgument("cRF shape does not match the stacked input");
  const int frames = stacked.num_frames(), bins = stacked.num_bins();
  const int channels = stacked.num_channels(), k = crf.half_taps();
  MultichannelSpectrogram out(channels, frames, stacked.config(),
                              stacked.num_samples());
  ParallelFor(static_cast<size_t>(frames), [&](size_t b, size_t e) {
    for (int c = 0; c < channels; ++c)
      for (int t = static_cast<int>(b); t < static_cast<int>(e); ++t)
        for (int f = 0; f < bins; ++f) {
          Complex acc = 0.0;
          for (int tau = -k; tau <= k; ++tau) {
            const int src = t + tau;
            if (src < 0 || src >= frames) continue;
            acc += crf.at(t, f, tau + k, c) * stacked.at(c, src, f);
          }
          out.at(c, t, f) = acc;
        }
  });
  return out;
}

MultichannelSpectrogram ApplyCrf(const MultichannelSpectrogram& mix,
                                 const MultichannelSpectrogram& echo,
                                 const ComplexRatioFilter& crf) {
  return ApplyCrf(StackWithReference(mix, echo), crf);
}

OracleCrfFit FitOracleCrf(const MultichannelSpectrogram& stacked,
                          const MultichannelSpectrogram& target,
                          const OracleCrfOptions& options, CrfTarget kind,
                          int zone) {
  if (!stacked.SameGrid(target) ||
      stacked.num_channels() != target.num_channels())
    throw InvalidArgument("oracle cRF target shape mismatch");
  if (options.half_taps < 0 || options.context < 0 || options.ridge < 0.0)
    throw InvalidArgument("invalid oracle cRF options");
  const int frames = stacked.num_frames(), bins = stacked.num_bins();
  const int channels = stacked.num_channels(), k = options.half_taps;
  const int taps = 2 * k + 1;
  OracleCrfFit fit{ComplexRatioFilter(frames, bins, k, channels, kind, zone),
                   0.0};
  std::vector<double> bin_residual(bins, 0.0);

  ParallelFor(static_cast<size_t>(bins), [&](size_t fb, size_t fe) {
    std::vector<Complex> a, rhs(taps), gram(taps * taps), x(taps);
    std::vector<Complex> rows_b;
    for (int f = static_cast<int>(fb); f < static_cast<int>(fe); ++f) {
      double res = 0.0;
      for (int c = 0; c < channels; ++c) {
        for (int t = 0; t < frames; ++t) {
          a.clear();
          rows_b.clear();
          for (int tp = t - options.context; tp <= t + options.context; ++tp) {
            if (tp < 0 || tp >= frames) continue;
            for (int tau = -k; tau <= k; ++tau) {
              const int src = tp + tau;
              a.push_back(src >= 0 && src < frames ? stacked.at(c, src, f)
                                                   : Complex(0.0));
            }
            rows_b.push_back(target.at(c, tp, f));
          }
          const int rows = static_cast<int>(rows_b.size());
          double trace = 0.0;
          for (int i = 0; i < taps; ++i) {
            rhs[i] = 0.0;
            for (int j = 0; j < taps; ++j) {
              Complex g = 0.0;
              for (int r = 0; r < rows; ++r)
                g += std::conj(a[r * taps + i]) * a[r * taps + j];
              gram[i * taps + j] = g;
            }
            for (int r = 0; r < rows; ++r)
              rhs[i] += std::conj(a[r * taps + i]) * rows_b[r];
            trace += gram[i * taps + i].real();
          }
          std::fill(x.begin(), x.end(), Complex(0.0));
          if (trace > 0.0) {
            const double lambda = options.ridge * trace;
            for (int i = 0; i < taps; ++i) gram[i * taps + i] += lambda;
            if (!SolveHermitian(gram, taps, rhs, 1, x))
              std::fill(x.begin(), x.end(), Complex(0.0));
          }
          for (int i = 0; i < taps; ++i) fit.filter.at(t, f, i, c) = x[i];
          for (int r = 0; r < rows; ++r) {
            Complex pred = 0.0;
            for (int i = 0; i < taps; ++i) pred += a[r * taps + i] * x[i];
            res += std::norm(pred - rows_b[r]);
          }
        }
      }
      bin_residual[f] = res;
    }
  });
  for (double r : bin_residual) fit.residual += r;
  return fit;
}

MultichannelSpectrogram OracleTarget(const MultichannelSpectrogram& stacked,
                                     const MultichannelSpectrogram& zone_image,
                                     CrfTarget kind) {
  const int mics = stacked.num_channels() - 1;
  if (mics < 1 || zone_image.num_channels() != mics ||
      !stacked.SameGrid(zone_image))
    throw InvalidArgument("zone image does not match the stacked layout");
  MultichannelSpectrogram target(mics + 1, stacked.num_frames(),
                                 stacked.config(), stacked.num_samples());
  for (int c = 0; c < mics; ++c)
    for (int t = 0; t < stacked.num_frames(); ++t)
      for (int f = 0; f < stacked.num_bins(); ++f)
        target.at(c, t, f) = kind == CrfTarget::kSpeech
                                 ? zone_image.at(c, t, f)
                                 : stacked.at(c, t, f) - zone_image.at(c, t, f);
  if (kind == CrfTarget::kNoise)
    for (int t = 0; t < stacked.num_frames(); ++t)
      for (int f = 0; f < stacked.num_bins(); ++f)
        target.at(mics, t, f) = stacked.at(mics, t, f);
  return target;
}

ComplexRatioFilter OracleCrf(const SceneRender& render,
                             const StftConfig& config, int zone,
                             CrfTarget target,
                             const OracleCrfOptions& options) {
  if (zone < 0 || zone >= kNumZones)
    throw InvalidArgument("zone out of range");
  if (render.targets[zone].empty())
    throw DataError("missing ground-truth image for zone " +
                    std::to_string(zone));
  const auto mix = Stft(render.mixture, config);
  const Waveform echo =
      render.echo_ref.empty()
          ? Waveform::Zeros(render.mixture.sample_rate(), 1,
                            render.mixture.num_samples())
          : render.echo_ref;
  const auto stacked = StackWithReference(mix, Stft(echo, config));
  const auto image = Stft(render.targets[zone], config);
  return FitOracleCrf(stacked, OracleTarget(stacked, image, target), options,
                      target, zone)
      .filter;
}

CovarianceSeries::CovarianceSeries(int num_frames, int num_bins, int dim,
                                   CrfTarget kind, int zone)
    : num_frames_(num_frames),
      num_bins_(num_bins),
      dim_(dim),
      kind_(kind),
      zone_(zone) {
  if (num_frames < 0 || num_bins < 0 || dim <= 0)
    throw InvalidArgument("invalid covariance dimensions");
  data_.assign(static_cast<size_t>(num_frames) * num_bins * dim * dim,
               Complex(0.0));
}

CovarianceSeries ComputeScm(const MultichannelSpectrogram& est, CrfTarget kind,
                            int zone) {
  const int frames = est.num_frames(), bins = est.num_bins();
  const int dim = est.num_channels();
  CovarianceSeries scm(frames, bins, dim, kind, zone);
  ParallelFor(static_cast<size_t>(frames), [&](size_t b, size_t e) {
    for (int t = static_cast<int>(b); t < static_cast<int>(e); ++t)
      for (int f = 0; f < bins; ++f)
        for (int i = 0; i < dim; ++i) {
          const Complex si = est.at(i, t, f);
          for (int j = 0; j < dim; ++j)
            scm.at(t, f, i, j) = si * std::conj(est.at(j, t, f));
        }
  });
  return scm;
}

LayerNormParams LayerNormParams::Identity(int size) {
  return {std::vector<double>(size, 1.0), std::vector<double>(size, 0.0)};
}

LayerNormParams LayerNormParams::FromBundle(const WeightBundle& bundle,
                                            int size) {
  LayerNormParams p = Identity(size);
  if (bundle.Contains("scm.ln.gamma"))
    p.gamma = bundle.Get("scm.ln.gamma", {size}).values;
  if (bundle.Contains("scm.ln.beta"))
    p.beta = bundle.Get("scm.ln.beta", {size}).values;
  return p;
}

void NormalizeScmEntry(std::span<const Complex> phi, int dim,
                       const LayerNormParams& params, std::span<double> out) {
  const size_t n = static_cast<size_t>(dim) * dim;
  const size_t d = 2 * n;
  if (phi.size() != n || out.size() != d || params.gamma.size() != d ||
      params.beta.size() != d)
    throw InvalidArgument("layer norm size mismatch");
  for (size_t i = 0; i < n; ++i) {
    out[i] = phi[i].real();
    out[n + i] = phi[i].imag();
  }
  double mean = 0.0;
  for (double v : out) mean += v;
  mean /= d;
  double var = 0.0;
  for (double v : out) var += (v - mean) * (v - mean);
  var /= d;
  const double inv = 1.0 / std::sqrt(var + params.eps);
  for (size_t i = 0; i < d; ++i)
    out[i] = params.gamma[i] * (out[i] - mean) * inv + params.beta[i];
}

std::vector<double> NormalizeScm(const CovarianceSeries& scm,
                                 const LayerNormParams& params) {
  const int frames = scm.num_frames(), bins = scm.num_bins();
  const size_t d = ScmFeatureSize(scm.dim());
  std::vector<double> out(static_cast<size_t>(frames) * bins * d);
  ParallelFor(static_cast<size_t>(frames), [&](size_t b, size_t e) {
    for (int t = static_cast<int>(b); t < static_cast<int>(e); ++t)
      for (int f = 0; f < bins; ++f)
        NormalizeScmEntry(
            scm.matrix(t, f), scm.dim(), params,
            std::span<double>(out.data() + (static_cast<size_t>(t) * bins + f) * d, d));
  });
  return out;
}

int CrfStubDims::OutputIndex(int zone, CrfTarget kind, int tap, int c) const {
  const int k = kind == CrfTarget::kSpeech ? 0 : 1;
  return (((zone * 2 + k) * num_taps() + tap) * channels + c) * 2;
}

WeightBundle InitCrfStubWeights(const CrfStubDims& dims, uint64_t seed,
                                double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  auto draw = [&](std::vector<int64_t> shape) {
    Tensor t = Tensor::Zeros(std::move(shape));
    for (double& v : t.values) v = g(rng);
    return t;
  };
  WeightBundle b;
  b.Set("crf.conv1.weight", draw({dims.hidden, dims.num_features, 3}));
  b.Set("crf.conv1.bias", draw({dims.hidden}));
  b.Set("crf.out.weight", draw({dims.outputs(), dims.hidden}));
  b.Set("crf.out.bias", draw({dims.outputs()}));
  return b;
}

WeightBundle IdentityCrfStubWeights(const CrfStubDims& dims) {
  WeightBundle b;
  b.Set("crf.conv1.weight",
        Tensor::Zeros({dims.hidden, dims.num_features, 3}));
  b.Set("crf.conv1.bias", Tensor::Zeros({dims.hidden}));
  b.Set("crf.out.weight", Tensor::Zeros({dims.outputs(), dims.hidden}));
  Tensor bias = Tensor::Zeros({dims.outputs()});
  for (int z = 0; z < dims.zones; ++z)
    for (CrfTarget k : {CrfTarget::kSpeech, CrfTarget::kNoise})
      for (int c = 0; c < dims.channels; ++c)
        bias.values[dims.OutputIndex(z, k, dims.half_taps, c)] = 1.0;
  b.Set("crf.out.bias", std::move(bias));
  return b;
}

std::vector<CrfPair> NeuralCrfStub(const FeatureTensor& features,
                                   const WeightBundle& weights,
                                   const CrfStubDims& dims) {
  if (features.num_features() != dims.num_features)
    throw InvalidArgument("feature count does not match cRF stub input");
  if (features.num_zones != dims.zones && features.num_zones != 0)
    throw InvalidArgument("feature zone count does not match cRF stub");
  const int hidden = dims.hidden, in = dims.num_features;
  const int outs = dims.outputs();
  const auto& w1 = weights.Get("crf.conv1.weight", {hidden, in, 3}).values;
  const auto& b1 = weights.Get("crf.conv1.bias", {hidden}).values;
  const auto& w2 = weights.Get("crf.out.weight", {outs, hidden}).values;
  const auto& b2 = weights.Get("crf.out.bias", {outs}).values;

  const int frames = features.num_frames, bins = features.num_bins;
  std::vector<CrfPair> result;
  for (int z = 0; z < dims.zones; ++z)
    result.push_back(
        {ComplexRatioFilter(frames, bins, dims.half_taps, dims.channels,
                            CrfTarget::kSpeech, z),
         ComplexRatioFilter(frames, bins, dims.half_taps, dims.channels,
                            CrfTarget::kNoise, z)});

  ParallelFor(static_cast<size_t>(bins), [&](size_t fb, size_t fe) {
    std::vector<double> h(hidden), o(outs);
    for (int f = static_cast<int>(fb); f < static_cast<int>(fe); ++f)
      for (int t = 0; t < frames; ++t) {
        for (int j = 0; j < hidden; ++j) {
          double acc = b1[j];
          for (int k = 0; k < 3; ++k) {
            const int src = t + k - 1;
            if (src < 0 || src >= frames) continue;
            for (int i = 0; i < in; ++i)
              acc += w1[(j * in + i) * 3 + k] * features.at(i, src, f);
          }
          h[j] = std::tanh(acc);
        }
        for (int q = 0; q < outs; ++q) {
          double acc = b2[q];
          for (int j = 0; j < hidden; ++j) acc += w2[q * hidden + j] * h[j];
          o[q] = acc;
        }
        for (int z = 0; z < dims.zones; ++z)
          for (CrfTarget kind : {CrfTarget::kSpeech, CrfTarget::kNoise}) {
            auto& crf =
                kind == CrfTarget::kSpeech ? result[z].speech : result[z].noise;
            for (int tap = 0; tap < dims.num_taps(); ++tap)
              for (int c = 0; c < dims.channels; ++c) {
                const int q = dims.OutputIndex(z, kind, tap, c);
                crf.at(t, f, tap, c) = Complex(o[q], o[q + 1]);
              }
          }
      }
  });
  return result;
}

}  // namespace melsb
