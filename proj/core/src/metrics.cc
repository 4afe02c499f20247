#include "melsb/metrics.h"

#include <algorithm>
#include <cmath>

#include "melsb/types.h"

namespace melsb {
namespace {

constexpr double kEps = 1e-9;

void CheckPair(std::span<const double> est, std::span<const double> ref) {
  if (est.size() != ref.size())
    throw InvalidArgument("estimate and reference lengths differ");
  if (ref.empty()) throw InvalidArgument("empty signals");
}

std::vector<double> ZeroMean(std::span<const double> x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  std::vector<double> out(x.begin(), x.end());
  for (double& v : out) v -= mean;
  return out;
}

double Energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

double RatioDb(double signal, double error) {
  if (error <= kEps * signal) return kMetricCapDb;
  if (signal <= kEps * error) return -kMetricCapDb;
  return std::clamp(10.0 * std::log10(signal / error), -kMetricCapDb,
                    kMetricCapDb);
}

std::span<const double> Mono(const Waveform& w) {
  if (w.num_channels() != 1) throw InvalidArgument("metric needs mono input");
  return w.channel(0);
}

}  // namespace

double SiSnr(std::span<const double> est, std::span<const double> ref) {
  CheckPair(est, ref);
  const auto e = ZeroMean(est);
  const auto r = ZeroMean(ref);
  const double rr = Energy(r);
  if (rr <= 0.0) throw DataError("silent reference");
  double dot = 0.0;
  for (size_t i = 0; i < r.size(); ++i) dot += e[i] * r[i];
  const double a = dot / rr;
  double target = 0.0, noise = 0.0;
  for (size_t i = 0; i < r.size(); ++i) {
    const double s = a * r[i];
    target += s * s;
    noise += (e[i] - s) * (e[i] - s);
  }
  if (target == 0.0 && noise == 0.0) return -kMetricCapDb;
  return RatioDb(target, noise);
}

double SiSnr(const Waveform& est, const Waveform& ref) {
  return SiSnr(Mono(est), Mono(ref));
}

double Sdr(std::span<const double> est, std::span<const double> ref) {
  CheckPair(est, ref);
  const double rr = Energy(ref);
  if (rr <= 0.0) throw DataError("silent reference");
  double err = 0.0;
  for (size_t i = 0; i < ref.size(); ++i)
    err += (est[i] - ref[i]) * (est[i] - ref[i]);
  return RatioDb(rr, err);
}

double Sdr(const Waveform& est, const Waveform& ref) {
  return Sdr(Mono(est), Mono(ref));
}

double SpectralMse(const Waveform& est, const Waveform& ref,
                   const StftConfig& config) {
  Mono(est);
  Mono(ref);
  if (est.num_samples() != ref.num_samples())
    throw InvalidArgument("estimate and reference lengths differ");
  const auto se = Stft(est, config);
  const auto sr = Stft(ref, config);
  double sum = 0.0;
  for (size_t i = 0; i < se.data().size(); ++i)
    sum += std::norm(se.data()[i] - sr.data()[i]);
  return sum / static_cast<double>(se.data().size());
}

double LossValue(const std::vector<Waveform>& est_zones,
                 const std::vector<Waveform>& ref_zones,
                 const StftConfig& config) {
  if (est_zones.size() != ref_zones.size())
    throw InvalidArgument("zone counts differ");
  double loss = 0.0;
  for (size_t z = 0; z < est_zones.size(); ++z)
    loss += -SiSnr(est_zones[z], ref_zones[z]) +
            SpectralMse(est_zones[z], ref_zones[z], config);
  return loss;
}

}  // namespace melsb
