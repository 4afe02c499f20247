#include "melsb/features.h"

#include <cmath>
#include <string>

#include "melsb/parallel.h"
#include "melsb/tensor_io.h"

namespace melsb {

std::vector<MicPair> AllMicPairs(int num_mics) {
  std::vector<MicPair> pairs;
  for (int i = 0; i < num_mics; ++i)
    for (int j = i + 1; j < num_mics; ++j) pairs.push_back({i, j});
  return pairs;
}

double WrapPhase(double angle) {
  double r = std::remainder(angle, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

SteeringPhases SteeringFromGeometry(const std::vector<Position>& mics,
                                    const std::vector<Position>& zones,
                                    const std::vector<MicPair>& pairs,
                                    const StftConfig& config) {
  const int bins = config.num_bins();
  SteeringPhases steering(zones.size());
  for (size_t z = 0; z < zones.size(); ++z) {
    for (const auto& p : pairs) {
      if (p.first < 0 || p.second < 0 ||
          p.first >= static_cast<int>(mics.size()) ||
          p.second >= static_cast<int>(mics.size()))
        throw InvalidArgument("mic pair out of range");
      // Y_m ~ S exp(-j w tau_m), so the pair phase is w (tau_2 - tau_1).
      const double lag = (Distance(zones[z], mics[p.second]) -
                          Distance(zones[z], mics[p.first])) /
                         kSpeedOfSound;
      std::vector<double> phase(bins);
      for (int f = 0; f < bins; ++f) {
        const double hz =
            static_cast<double>(f) * config.sample_rate / config.fft_size;
        phase[f] = WrapPhase(2.0 * kPi * hz * lag);
      }
      steering[z].push_back(std::move(phase));
    }
  }
  return steering;
}

double FeatureTensor::at(int feature, int t, int f) const {
  const size_t plane = static_cast<size_t>(num_frames) * num_bins;
  const size_t off = static_cast<size_t>(t) * num_bins + f;
  if (feature == 0) return lps[off];
  if (feature <= num_pairs) return ipd[(feature - 1) * plane + off];
  return df[(feature - 1 - num_pairs) * plane + off];
}

std::vector<double> ComputeLps(const MultichannelSpectrogram& s, int ref_ch) {
  if (ref_ch < 0 || ref_ch >= s.num_channels())
    throw InvalidArgument("reference channel out of range");
  const int frames = s.num_frames(), bins = s.num_bins();
  std::vector<double> lps(static_cast<size_t>(frames) * bins);
  for (int t = 0; t < frames; ++t)
    for (int f = 0; f < bins; ++f)
      lps[static_cast<size_t>(t) * bins + f] =
          std::log(std::max(std::norm(s.at(ref_ch, t, f)), kLpsFloor));
  return lps;
}

namespace {

void CheckPairs(const MultichannelSpectrogram& s,
                const std::vector<MicPair>& pairs) {
  for (const auto& p : pairs) {
    if (p.first < 0 || p.second < 0 || p.first >= s.num_channels() ||
        p.second >= s.num_channels())
      throw InvalidArgument("mic pair (" + std::to_string(p.first) + ", " +
                            std::to_string(p.second) + ") out of range");
  }
}

}  // namespace

std::vector<double> ComputeIpd(const MultichannelSpectrogram& s,
                               const std::vector<MicPair>& pairs) {
  if (s.num_channels() < 2)
    throw InvalidArgument("IPD needs at least two channels");
  CheckPairs(s, pairs);
  const int frames = s.num_frames(), bins = s.num_bins();
  const size_t plane = static_cast<size_t>(frames) * bins;
  std::vector<double> ipd(pairs.size() * plane);
  ParallelFor(static_cast<size_t>(frames), [&](size_t b, size_t e) {
    for (size_t p = 0; p < pairs.size(); ++p)
      for (size_t t = b; t < e; ++t)
        for (int f = 0; f < bins; ++f) {
          const Complex a = s.at(pairs[p].first, static_cast<int>(t), f);
          const Complex c = s.at(pairs[p].second, static_cast<int>(t), f);
          ipd[p * plane + t * bins + f] =
              WrapPhase(std::arg(a) - std::arg(c));
        }
  });
  return ipd;
}

std::vector<double> ComputeDf(const MultichannelSpectrogram& s,
                              const std::vector<MicPair>& pairs,
                              const SteeringPhases& steering) {
  const auto ipd = ComputeIpd(s, pairs);
  const int frames = s.num_frames(), bins = s.num_bins();
  const size_t plane = static_cast<size_t>(frames) * bins;
  for (size_t z = 0; z < steering.size(); ++z) {
    if (steering[z].size() != pairs.size())
      throw InvalidArgument("missing steering for zone " + std::to_string(z));
    for (const auto& per_pair : steering[z])
      if (static_cast<int>(per_pair.size()) != bins)
        throw InvalidArgument("steering length does not match bin count");
  }
  std::vector<double> df(steering.size() * plane, 0.0);
  const double inv_pairs = pairs.empty() ? 0.0 : 1.0 / pairs.size();
  for (size_t z = 0; z < steering.size(); ++z)
    for (size_t p = 0; p < pairs.size(); ++p)
      for (size_t t = 0; t < static_cast<size_t>(frames); ++t)
        for (int f = 0; f < bins; ++f)
          df[z * plane + t * bins + f] +=
              inv_pairs *
              std::cos(ipd[p * plane + t * bins + f] - steering[z][p][f]);
  return df;
}

FeatureTensor ComputeFeatures(const MultichannelSpectrogram& s, int ref_ch,
                              const std::vector<MicPair>& pairs,
                              const SteeringPhases& steering) {
  FeatureTensor out;
  out.num_frames = s.num_frames();
  out.num_bins = s.num_bins();
  out.num_pairs = static_cast<int>(pairs.size());
  out.num_zones = static_cast<int>(steering.size());
  out.lps = ComputeLps(s, ref_ch);
  out.ipd = ComputeIpd(s, pairs);
  out.df = ComputeDf(s, pairs, steering);
  return out;
}

void WriteFeatureFile(const FeatureTensor& features,
                      const std::filesystem::path& path) {
  std::vector<double> values;
  values.reserve(features.lps.size() + features.ipd.size() +
                 features.df.size());
  values.insert(values.end(), features.lps.begin(), features.lps.end());
  values.insert(values.end(), features.ipd.begin(), features.ipd.end());
  values.insert(values.end(), features.df.begin(), features.df.end());
  WriteTensorFile(Tensor({features.num_features(), features.num_frames,
                          features.num_bins},
                         std::move(values)),
                  path);
}

}  // namespace melsb
