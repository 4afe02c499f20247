#ifndef MELSB_WAVEFORM_H_
#define MELSB_WAVEFORM_H_

#include <cstddef>
#include <span>
#include <vector>

namespace melsb {

// Multichannel real-valued audio. All channels have equal length and the
// sample rate is positive; the constructor enforces both.
class Waveform {
 public:
  Waveform() = default;
  Waveform(int sample_rate, std::vector<std::vector<double>> channels);

  static Waveform Zeros(int sample_rate, size_t num_channels,
                        size_t num_samples);
  static Waveform Mono(int sample_rate, std::vector<double> samples);

  int sample_rate() const { return sample_rate_; }
  size_t num_channels() const { return channels_.size(); }
  size_t num_samples() const {
    return channels_.empty() ? 0 : channels_.front().size();
  }
  bool empty() const { return num_channels() == 0 || num_samples() == 0; }

  std::span<const double> channel(size_t c) const { return channels_.at(c); }
  std::span<double> mutable_channel(size_t c) { return channels_.at(c); }
  const std::vector<std::vector<double>>& channels() const {
    return channels_;
  }

  // Returns a waveform holding only channel c.
  Waveform Channel(size_t c) const;

  // Sum of squares over all channels divided by the sample count of all
  // channels.
  double MeanPower() const;
  double PeakAbs() const;

  Waveform& operator*=(double gain);
  Waveform& operator+=(const Waveform& other);

 private:
  int sample_rate_ = 16000;
  std::vector<std::vector<double>> channels_;
};

Waveform operator*(double gain, Waveform w);
Waveform operator+(Waveform a, const Waveform& b);

}  // namespace melsb

#endif  // MELSB_WAVEFORM_H_
