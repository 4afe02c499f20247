#ifndef MELSB_BEAMFORMER_H_
#define MELSB_BEAMFORMER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "melsb/estimator.h"
#include "melsb/stft.h"
#include "melsb/types.h"

namespace melsb {

inline constexpr int kBeamformerHalfTaps = 2;

// Multi-frame multichannel weights indexed (zone, t, f, tap, channel), tap
// index = tau + half_taps.
class BeamformerWeights {
 public:
  BeamformerWeights() = default;
  BeamformerWeights(int num_zones, int num_frames, int num_bins,
                    int half_taps, int num_channels);

  int num_zones() const { return num_zones_; }
  int num_frames() const { return num_frames_; }
  int num_bins() const { return num_bins_; }
  int half_taps() const { return half_taps_; }
  int num_taps() const { return 2 * half_taps_ + 1; }
  int num_channels() const { return num_channels_; }

  Complex& at(int z, int t, int f, int tap, int c) {
    return data_[Index(z, t, f, tap, c)];
  }
  const Complex& at(int z, int t, int f, int tap, int c) const {
    return data_[Index(z, t, f, tap, c)];
  }
  std::vector<Complex>& data() { return data_; }
  const std::vector<Complex>& data() const { return data_; }

  // Copies all of src's zone 0 into zone z.
  void SetZone(int z, const BeamformerWeights& src);
  // Zeroes every coefficient on the given channel.
  void ZeroChannel(int c);

  // Real features per (t, f): zones * taps * channels * 2 entries ordered
  // (zone, tap, channel, re/im).
  int real_dim() const { return num_zones_ * num_taps() * num_channels_ * 2; }
  // T x F x real_dim().
  std::vector<double> ToReal() const;
  static BeamformerWeights FromReal(std::span<const double> real,
                                    int num_zones, int num_frames,
                                    int num_bins, int half_taps,
                                    int num_channels);

 private:
  size_t Index(int z, int t, int f, int tap, int c) const {
    return (((static_cast<size_t>(z) * num_frames_ + t) * num_bins_ + f) *
                num_taps() + tap) * num_channels_ + c;
  }

  int num_zones_ = 0;
  int num_frames_ = 0;
  int num_bins_ = 0;
  int half_taps_ = 0;
  int num_channels_ = 0;
  std::vector<Complex> data_;
};

enum class ScmSmoothing {
  kFrameWise,      // instantaneous matrices
  kTimeInvariant,  // one average over all frames
  kRecursive,      // phi(t) = alpha phi(t-1) + (1 - alpha) phi_inst(t)
};

struct MvdrOptions {
  int ref_ch = 0;
  ScmSmoothing smoothing = ScmSmoothing::kFrameWise;
  double alpha = 0.95;
  // Loading relative to trace(phi_zz) / (M + 1).
  double loading = 1e-6;
  double min_trace = 1e-12;
  int half_taps = kBeamformerHalfTaps;
};

// w = (phi_zz + dI)^-1 phi_ss u_ref / trace((phi_zz + dI)^-1 phi_ss).
// Returns false and zeroes w when the trace is below min_trace.
bool MvdrVector(std::span<const Complex> phi_ss, std::span<const Complex> phi_zz,
                int dim, const MvdrOptions& options, std::span<Complex> w);

CovarianceSeries SmoothScm(const CovarianceSeries& scm, ScmSmoothing smoothing,
                           double alpha);

struct MvdrSolution {
  BeamformerWeights weights;  // single zone, tau = 0 only
  std::vector<uint8_t> flagged;  // T x F, 1 where the weight was zeroed
  size_t num_flagged = 0;
};

MvdrSolution OracleMvdrWeights(const CovarianceSeries& speech_scm,
                               const CovarianceSeries& noise_scm,
                               const MvdrOptions& options = {});

// out_z(t, f) = sum_tau w(z, t, f, tau)^H stacked(t + tau, f), with frames
// outside [0, T) read as zero. One single-channel spectrogram per zone.
std::vector<MultichannelSpectrogram> ApplyWeights(
    const MultichannelSpectrogram& stacked, const BeamformerWeights& w);
std::vector<MultichannelSpectrogram> ApplyWeights(
    const MultichannelSpectrogram& mix, const MultichannelSpectrogram& echo,
    const BeamformerWeights& w);

}  // namespace melsb

#endif  // MELSB_BEAMFORMER_H_
