#ifndef MELSB_METRICS_H_
#define MELSB_METRICS_H_

#include <span>
#include <vector>

#include "melsb/stft.h"
#include "melsb/waveform.h"

namespace melsb {

// Reported in place of +inf / -inf for perfect or empty estimates.
inline constexpr double kMetricCapDb = 90.0;

// Scale-invariant SNR after mean removal. Equal-length inputs; throws
// DataError for a silent reference.
double SiSnr(std::span<const double> est, std::span<const double> ref);
double SiSnr(const Waveform& est, const Waveform& ref);

// 10 log10(|ref|^2 / |est - ref|^2), capped at +/-90 dB.
double Sdr(std::span<const double> est, std::span<const double> ref);
double Sdr(const Waveform& est, const Waveform& ref);

// Mean over (t, f) of |S_est - S_ref|^2 for single-channel signals.
double SpectralMse(const Waveform& est, const Waveform& ref,
                   const StftConfig& config);

// sum over zones of -SiSnr + SpectralMse.
double LossValue(const std::vector<Waveform>& est_zones,
                 const std::vector<Waveform>& ref_zones,
                 const StftConfig& config);

}  // namespace melsb

#endif  // MELSB_METRICS_H_
