#include "melsb/waveform.h"

#include <algorithm>
#include <cmath>

#include "melsb/types.h"

namespace melsb {

Waveform::Waveform(int sample_rate, std::vector<std::vector<double>> channels)
    : sample_rate_(sample_rate), channels_(std::move(channels)) {
  if (sample_rate_ <= 0) throw InvalidArgument("sample_rate must be > 0");
  for (const auto& ch : channels_) {
    if (ch.size() != channels_.front().size())
      throw InvalidArgument("waveform channels differ in length");
  }
}

Waveform Waveform::Zeros(int sample_rate, size_t num_channels,
                         size_t num_samples) {
  return Waveform(sample_rate, std::vector<std::vector<double>>(
                                   num_channels,
                                   std::vector<double>(num_samples, 0.0)));
}

Waveform Waveform::Mono(int sample_rate, std::vector<double> samples) {
  std::vector<std::vector<double>> ch;
  ch.push_back(std::move(samples));
  return Waveform(sample_rate, std::move(ch));
}

Waveform Waveform::Channel(size_t c) const {
  return Mono(sample_rate_, channels_.at(c));
}

double Waveform::MeanPower() const {
  if (empty()) return 0.0;
  double acc = 0.0;
  for (const auto& ch : channels_)
    for (double v : ch) acc += v * v;
  return acc / static_cast<double>(num_channels() * num_samples());
}

double Waveform::PeakAbs() const {
  double peak = 0.0;
  for (const auto& ch : channels_)
    for (double v : ch) peak = std::max(peak, std::abs(v));
  return peak;
}

Waveform& Waveform::operator*=(double gain) {
  for (auto& ch : channels_)
    for (double& v : ch) v *= gain;
  return *this;
}

Waveform& Waveform::operator+=(const Waveform& other) {
  if (other.num_channels() != num_channels() ||
      other.num_samples() != num_samples())
    throw InvalidArgument("waveform shape mismatch in addition");
  for (size_t c = 0; c < channels_.size(); ++c)
    for (size_t i = 0; i < channels_[c].size(); ++i)
      channels_[c][i] += other.channels_[c][i];
  return *this;
}

Waveform operator*(double gain, Waveform w) {
  w *= gain;
  return w;
}

Waveform operator+(Waveform a, const Waveform& b) {
  a += b;
  return a;
}

double Distance(const Position& a, const Position& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                   (a.z - b.z) * (a.z - b.z));
}

}  // namespace melsb
