#ifndef MELSB_FEATURES_H_
#define MELSB_FEATURES_H_

#include <filesystem>
#include <vector>

#include "melsb/stft.h"
#include "melsb/types.h"

namespace melsb {

struct MicPair {
  int first = 0;
  int second = 1;
};

// All pairs (i, j) with i < j among num_mics microphones.
std::vector<MicPair> AllMicPairs(int num_mics);

// Expected inter-channel phase per zone, per pair, per bin:
// steering[zone][pair][f].
using SteeringPhases = std::vector<std::vector<std::vector<double>>>;

// Near-field steering phases from source and microphone positions, matching
// the sign convention of ComputeIpd.
SteeringPhases SteeringFromGeometry(const std::vector<Position>& mics,
                                    const std::vector<Position>& zones,
                                    const std::vector<MicPair>& pairs,
                                    const StftConfig& config);

// Spatial/spectral input features, each laid out (., frame, bin).
struct FeatureTensor {
  int num_frames = 0;
  int num_bins = 0;
  int num_pairs = 0;
  int num_zones = 0;
  std::vector<double> lps;  // T x F
  std::vector<double> ipd;  // P x T x F, in (-pi, pi]
  std::vector<double> df;   // Z x T x F, in [-1, 1]

  int num_features() const { return 1 + num_pairs + num_zones; }
  // Feature value for (feature index, t, f) in the order lps, ipd..., df...
  double at(int feature, int t, int f) const;
};

inline constexpr double kLpsFloor = 1e-12;

// Wraps an angle into (-pi, pi].
double WrapPhase(double angle);

// ln(max(|Y_ref|^2, 1e-12)), T x F.
std::vector<double> ComputeLps(const MultichannelSpectrogram& s, int ref_ch);

// wrap(angle(Y_first) - angle(Y_second)), P x T x F.
std::vector<double> ComputeIpd(const MultichannelSpectrogram& s,
                               const std::vector<MicPair>& pairs);

// cos(ipd - steering_zone) averaged over pairs, Z x T x F.
std::vector<double> ComputeDf(const MultichannelSpectrogram& s,
                              const std::vector<MicPair>& pairs,
                              const SteeringPhases& steering);

FeatureTensor ComputeFeatures(const MultichannelSpectrogram& s, int ref_ch,
                              const std::vector<MicPair>& pairs,
                              const SteeringPhases& steering);

// Dumps features as one (features x T x F) tensor file.
void WriteFeatureFile(const FeatureTensor& features,
                      const std::filesystem::path& path);

}  // namespace melsb

#endif  // MELSB_FEATURES_H_
