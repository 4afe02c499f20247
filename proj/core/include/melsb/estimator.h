#ifndef MELSB_ESTIMATOR_H_
#define MELSB_ESTIMATOR_H_

#include <cstdint>
#include <string>
#include <vector>

#include "melsb/features.h"
#include "melsb/scene.h"
#include "melsb/stft.h"
#include "melsb/types.h"
#include "melsb/weight_bundle.h"

namespace melsb {

enum class CrfTarget { kSpeech, kNoise };

std::string ToString(CrfTarget target);

// Complex FIR filter per (frame, bin, channel) over taps tau in
// [-half_taps, half_taps], stored at tap index tau + half_taps.
class ComplexRatioFilter {
 public:
  ComplexRatioFilter() = default;
  ComplexRatioFilter(int num_frames, int num_bins, int half_taps,
                     int num_channels, CrfTarget target = CrfTarget::kSpeech,
                     int zone = 0);

  int num_frames() const { return num_frames_; }
  int num_bins() const { return num_bins_; }
  int half_taps() const { return half_taps_; }
  int num_taps() const { return 2 * half_taps_ + 1; }
  int num_channels() const { return num_channels_; }
  CrfTarget target() const { return target_; }
  int zone() const { return zone_; }

  Complex& at(int t, int f, int tap, int c) { return data_[Index(t, f, tap, c)]; }
  const Complex& at(int t, int f, int tap, int c) const {
    return data_[Index(t, f, tap, c)];
  }
  std::vector<Complex>& data() { return data_; }
  const std::vector<Complex>& data() const { return data_; }

  // Coefficient 1 at tau = 0 on every channel.
  static ComplexRatioFilter Identity(int num_frames, int num_bins,
                                     int half_taps, int num_channels);

 private:
  size_t Index(int t, int f, int tap, int c) const {
    return ((static_cast<size_t>(t) * num_bins_ + f) * num_taps() + tap) *
               num_channels_ + c;
  }

  int num_frames_ = 0;
  int num_bins_ = 0;
  int half_taps_ = 0;
  int num_channels_ = 0;
  CrfTarget target_ = CrfTarget::kSpeech;
  int zone_ = 0;
  std::vector<Complex> data_;
};

// out(c, t, f) = sum_tau crf(t, f, tau, c) * stacked(c, t + tau, f), with
// frames outside [0, T) read as zero.
MultichannelSpectrogram ApplyCrf(const MultichannelSpectrogram& stacked,
                                 const ComplexRatioFilter& crf);
// Stacks mix (M channels) with echo (1 channel) first.
MultichannelSpectrogram ApplyCrf(const MultichannelSpectrogram& mix,
                                 const MultichannelSpectrogram& echo,
                                 const ComplexRatioFilter& crf);

struct OracleCrfOptions {
  int half_taps = 1;
  // Least-squares rows for frame t come from frames t - context .. t + context.
  int context = 1;
  // Tikhonov weight relative to the trace of the normal matrix.
  double ridge = 1e-4;
};

struct OracleCrfFit {
  ComplexRatioFilter filter;
  // Sum over (t, f, c) of the squared residual of each local fit.
  double residual = 0.0;
};

// Per (t, f, channel) ridge least squares fit of the taps mapping stacked
// to target, both (M+1)-channel spectrograms on the same grid.
OracleCrfFit FitOracleCrf(const MultichannelSpectrogram& stacked,
                          const MultichannelSpectrogram& target,
                          const OracleCrfOptions& options = {},
                          CrfTarget kind = CrfTarget::kSpeech, int zone = 0);

// Ground-truth target for a zone in the stacked layout. Speech: the zone's
// reverberant image on the mics and zero on the echo channel. Noise: the
// rest of the mixture on the mics and the echo reference on the echo channel.
MultichannelSpectrogram OracleTarget(const MultichannelSpectrogram& stacked,
                                     const MultichannelSpectrogram& zone_image,
                                     CrfTarget kind);

ComplexRatioFilter OracleCrf(const SceneRender& render,
                             const StftConfig& config, int zone,
                             CrfTarget target,
                             const OracleCrfOptions& options = {});

// Frame-wise spatial covariance matrices, indexed (t, f, i, j).
class CovarianceSeries {
 public:
  CovarianceSeries() = default;
  CovarianceSeries(int num_frames, int num_bins, int dim,
                   CrfTarget kind = CrfTarget::kSpeech, int zone = 0);

  int num_frames() const { return num_frames_; }
  int num_bins() const { return num_bins_; }
  int dim() const { return dim_; }
  CrfTarget kind() const { return kind_; }
  int zone() const { return zone_; }

  Complex& at(int t, int f, int i, int j) { return data_[Index(t, f) + i * dim_ + j]; }
  const Complex& at(int t, int f, int i, int j) const {
    return data_[Index(t, f) + i * dim_ + j];
  }
  // Row-major dim x dim matrix for (t, f).
  std::span<Complex> matrix(int t, int f) {
    return {data_.data() + Index(t, f), static_cast<size_t>(dim_) * dim_};
  }
  std::span<const Complex> matrix(int t, int f) const {
    return {data_.data() + Index(t, f), static_cast<size_t>(dim_) * dim_};
  }
  std::vector<Complex>& data() { return data_; }
  const std::vector<Complex>& data() const { return data_; }

 private:
  size_t Index(int t, int f) const {
    return (static_cast<size_t>(t) * num_bins_ + f) * dim_ * dim_;
  }

  int num_frames_ = 0;
  int num_bins_ = 0;
  int dim_ = 0;
  CrfTarget kind_ = CrfTarget::kSpeech;
  int zone_ = 0;
  std::vector<Complex> data_;
};

// Raw outer products s s^H per (t, f).
CovarianceSeries ComputeScm(const MultichannelSpectrogram& est,
                            CrfTarget kind = CrfTarget::kSpeech, int zone = 0);

struct LayerNormParams {
  std::vector<double> gamma;
  std::vector<double> beta;
  double eps = 1e-12;

  // gamma = 1, beta = 0 over `size` entries.
  static LayerNormParams Identity(int size);
  // Reads "scm.ln.gamma" and "scm.ln.beta" when present, else identity.
  static LayerNormParams FromBundle(const WeightBundle& bundle, int size);
};

// Flattened SCM size: real parts then imaginary parts, row-major.
inline int ScmFeatureSize(int dim) { return 2 * dim * dim; }

// Writes the layer-normalized flattened SCM of (t, f) into out, which has
// ScmFeatureSize(dim) entries.
void NormalizeScmEntry(std::span<const Complex> phi, int dim,
                       const LayerNormParams& params, std::span<double> out);

// Layer-normalized SCM features, real (T x F x 2 dim^2).
std::vector<double> NormalizeScm(const CovarianceSeries& scm,
                                 const LayerNormParams& params);

// Convolutional cRF estimator: per bin, a kernel-3 conv over frames with
// tanh, then a 1x1 conv producing paired (re, im) coefficients for every
// zone, target, tap and channel. Weights are shared across bins.
struct CrfStubDims {
  int num_features = 6;
  int hidden = 16;
  int zones = kNumZones;
  int channels = 3;
  int half_taps = 1;

  int num_taps() const { return 2 * half_taps + 1; }
  int outputs() const { return zones * 2 * num_taps() * channels * 2; }
  // Output index of the real part; the imaginary part follows.
  int OutputIndex(int zone, CrfTarget kind, int tap, int c) const;
};

// Gaussian weights with standard deviation `scale`, deterministic in seed.
WeightBundle InitCrfStubWeights(const CrfStubDims& dims, uint64_t seed,
                                double scale = 0.1);
// All zeros except an output bias of 1 on the real tau = 0 coefficient.
WeightBundle IdentityCrfStubWeights(const CrfStubDims& dims);

struct CrfPair {
  ComplexRatioFilter speech;
  ComplexRatioFilter noise;
};

std::vector<CrfPair> NeuralCrfStub(const FeatureTensor& features,
                                   const WeightBundle& weights,
                                   const CrfStubDims& dims);

}  // namespace melsb

#endif  // MELSB_ESTIMATOR_H_
