#include "melsb/beamformer.h"

#include <algorithm>
#include <cmath>

#include "melsb/hermitian.h"
#include "melsb/parallel.h"

namespace melsb {

BeamformerWeights::BeamformerWeights(int num_zones, int num_frames,
                                     int num_bins, int half_taps,
                                     int num_channels)
    : num_zones_(num_zones),
      num_frames_(num_frames),
      num_bins_(num_bins),
      half_taps_(half_taps),
      num_channels_(num_channels) {
  if (num_zones <= 0 || num_frames < 0 || num_bins < 0 || half_taps < 0 ||
      num_channels <= 0)
    throw InvalidArgument("invalid beamformer weight dimensions");
  data_.assign(static_cast<size_t>(num_zones) * num_frames * num_bins *
                   num_taps() * num_channels,
               Complex(0.0));
}

void BeamformerWeights::SetZone(int z, const BeamformerWeights& src) {
  if (z < 0 || z >= num_zones_ || src.num_frames_ != num_frames_ ||
      src.num_bins_ != num_bins_ || src.half_taps_ != half_taps_ ||
      src.num_channels_ != num_channels_)
    throw InvalidArgument("zone weights do not match");
  const size_t n = data_.size() / num_zones_;
  std::copy(src.data_.begin(), src.data_.begin() + n, data_.begin() + z * n);
}

void BeamformerWeights::ZeroChannel(int c) {
  if (c < 0 || c >= num_channels_)
    throw InvalidArgument("channel out of range");
  for (size_t i = c; i < data_.size(); i += num_channels_) data_[i] = 0.0;
}

std::vector<double> BeamformerWeights::ToReal() const {
  const int d = real_dim();
  std::vector<double> out(static_cast<size_t>(num_frames_) * num_bins_ * d);
  for (int z = 0; z < num_zones_; ++z)
    for (int t = 0; t < num_frames_; ++t)
      for (int f = 0; f < num_bins_; ++f)
        for (int tap = 0; tap < num_taps(); ++tap)
          for (int c = 0; c < num_channels_; ++c) {
            const Complex v = at(z, t, f, tap, c);
            const size_t base =
                (static_cast<size_t>(t) * num_bins_ + f) * d +
                ((z * num_taps() + tap) * num_channels_ + c) * 2;
            out[base] = v.real();
            out[base + 1] = v.imag();
          }
  return out;
}

BeamformerWeights BeamformerWeights::FromReal(std::span<const double> real,
                                              int num_zones, int num_frames,
                                              int num_bins, int half_taps,
                                              int num_channels) {
  BeamformerWeights w(num_zones, num_frames, num_bins, half_taps,
                      num_channels);
  const int d = w.real_dim();
  if (real.size() != static_cast<size_t>(num_frames) * num_bins * d)
    throw InvalidArgument("real weight tensor has the wrong size");
  for (int z = 0; z < num_zones; ++z)
    for (int t = 0; t < num_frames; ++t)
      for (int f = 0; f < num_bins; ++f)
        for (int tap = 0; tap < w.num_taps(); ++tap)
          for (int c = 0; c < num_channels; ++c) {
            const size_t base =
                (static_cast<size_t>(t) * num_bins + f) * d +
                ((z * w.num_taps() + tap) * num_channels + c) * 2;
            w.at(z, t, f, tap, c) = Complex(real[base], real[base + 1]);
          }
  return w;
}

bool MvdrVector(std::span<const Complex> phi_ss,
                std::span<const Complex> phi_zz, int dim,
                const MvdrOptions& options, std::span<Complex> w) {
  const size_t n2 = static_cast<size_t>(dim) * dim;
  if (phi_ss.size() != n2 || phi_zz.size() != n2 ||
      w.size() != static_cast<size_t>(dim))
    throw InvalidArgument("MVDR shape mismatch");
  if (options.ref_ch < 0 || options.ref_ch >= dim)
    throw InvalidArgument("reference channel out of range");
  std::fill(w.begin(), w.end(), Complex(0.0));
  double tr_ss = 0.0, tr_zz = 0.0;
  for (int i = 0; i < dim; ++i) {
    tr_ss += phi_ss[i * dim + i].real();
    tr_zz += phi_zz[i * dim + i].real();
  }
  if (!(tr_ss > 0.0) || !std::isfinite(tr_ss)) return false;
  // Scale both matrices by the same factor; the weights are invariant to it.
  const double base = tr_zz > 0.0 ? tr_zz : tr_ss;
  const double scale = 1.0 / base;
  const double delta = options.loading / dim;
  std::vector<Complex> r(n2), s(n2), x(n2);
  for (size_t i = 0; i < n2; ++i) {
    r[i] = phi_zz[i] * scale;
    s[i] = phi_ss[i] * scale;
  }
  for (int i = 0; i < dim; ++i) r[i * dim + i] += delta;
  if (!SolveHermitian(r, dim, s, dim, x)) return false;
  Complex trace = 0.0;
  for (int i = 0; i < dim; ++i) trace += x[i * dim + i];
  if (!(std::abs(trace) >= options.min_trace) || !std::isfinite(std::abs(trace)))
    return false;
  for (int i = 0; i < dim; ++i) w[i] = x[i * dim + options.ref_ch] / trace;
  return true;
}

CovarianceSeries SmoothScm(const CovarianceSeries& scm, ScmSmoothing smoothing,
                           double alpha) {
  if (smoothing == ScmSmoothing::kFrameWise) return scm;
  const int frames = scm.num_frames(), bins = scm.num_bins();
  const size_t n2 = static_cast<size_t>(scm.dim()) * scm.dim();
  CovarianceSeries out(frames, bins, scm.dim(), scm.kind(), scm.zone());
  if (smoothing == ScmSmoothing::kTimeInvariant) {
    if (frames == 0) return out;
    std::vector<Complex> mean(static_cast<size_t>(bins) * n2, 0.0);
    for (int t = 0; t < frames; ++t)
      for (int f = 0; f < bins; ++f) {
        auto m = scm.matrix(t, f);
        for (size_t i = 0; i < n2; ++i) mean[f * n2 + i] += m[i];
      }
    for (auto& v : mean) v /= static_cast<double>(frames);
    for (int t = 0; t < frames; ++t)
      for (int f = 0; f < bins; ++f)
        std::copy(mean.begin() + f * n2, mean.begin() + (f + 1) * n2,
                  out.matrix(t, f).begin());
    return out;
  }
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw InvalidArgument("recursive averaging factor must be in [0, 1)");
  for (int f = 0; f < bins; ++f)
    for (int t = 0; t < frames; ++t) {
      auto cur = scm.matrix(t, f);
      auto dst = out.matrix(t, f);
      for (size_t i = 0; i < n2; ++i) {
        const Complex prev = t > 0 ? out.matrix(t - 1, f)[i] : Complex(0.0);
        dst[i] = alpha * prev + (1.0 - alpha) * cur[i];
      }
    }
  return out;
}

MvdrSolution OracleMvdrWeights(const CovarianceSeries& speech_scm,
                               const CovarianceSeries& noise_scm,
                               const MvdrOptions& options) {
  if (speech_scm.num_frames() != noise_scm.num_frames() ||
      speech_scm.num_bins() != noise_scm.num_bins() ||
      speech_scm.dim() != noise_scm.dim())
    throw InvalidArgument("speech and noise covariance shapes differ");
  const auto ss = SmoothScm(speech_scm, options.smoothing, options.alpha);
  const auto zz = SmoothScm(noise_scm, options.smoothing, options.alpha);
  const int frames = ss.num_frames(), bins = ss.num_bins(), dim = ss.dim();
  MvdrSolution sol{
      BeamformerWeights(1, frames, bins, options.half_taps, dim),
      std::vector<uint8_t>(static_cast<size_t>(frames) * bins, 0), 0};
  ParallelFor(static_cast<size_t>(frames), [&](size_t b, size_t e) {
    std::vector<Complex> w(dim);
    for (int t = static_cast<int>(b); t < static_cast<int>(e); ++t)
      for (int f = 0; f < bins; ++f) {
        const bool ok = MvdrVector(ss.matrix(t, f), zz.matrix(t, f), dim,
                                   options, w);
        sol.flagged[static_cast<size_t>(t) * bins + f] = ok ? 0 : 1;
        for (int c = 0; c < dim; ++c)
          sol.weights.at(0, t, f, options.half_taps, c) = w[c];
      }
  });
  for (uint8_t v : sol.flagged) sol.num_flagged += v;
  return sol;
}

std::vector<MultichannelSpectrogram> ApplyWeights(
    const MultichannelSpectrogram& stacked, const BeamformerWeights& w) {
  if (w.num_frames() != stacked.num_frames() ||
      w.num_bins() != stacked.num_bins() ||
      w.num_channels() != stacked.num_channels())
    throw InvalidArgument("beamformer weights do not match the input");
  const int frames = stacked.num_frames(), bins = stacked.num_bins();
  const int channels = stacked.num_channels(), k = w.half_taps();
  std::vector<MultichannelSpectrogram> out;
  for (int z = 0; z < w.num_zones(); ++z)
    out.emplace_back(1, frames, stacked.config(), stacked.num_samples());
  ParallelFor(static_cast<size_t>(frames), [&](size_t b, size_t e) {
    for (int z = 0; z < w.num_zones(); ++z)
      for (int t = static_cast<int>(b); t < static_cast<int>(e); ++t)
        for (int f = 0; f < bins; ++f) {
          Complex acc = 0.0;
          for (int tau = -k; tau <= k; ++tau) {
            const int src = t + tau;
            if (src < 0 || src >= frames) continue;
            for (int c = 0; c < channels; ++c)
              acc += std::conj(w.at(z, t, f, tau + k, c)) *
                     stacked.at(c, src, f);
          }
          out[z].at(0, t, f) = acc;
        }
  });
  return out;
}

std::vector<MultichannelSpectrogram> ApplyWeights(
    const MultichannelSpectrogram& mix, const MultichannelSpectrogram& echo,
    const BeamformerWeights& w) {
  return ApplyWeights(StackWithReference(mix, echo), w);
}

}  // namespace melsb
