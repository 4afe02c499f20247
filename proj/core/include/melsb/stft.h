#ifndef MELSB_STFT_H_
#define MELSB_STFT_H_

#include <cstddef>
#include <span>
#include <vector>

#include "melsb/types.h"
#include "melsb/waveform.h"

namespace melsb {

enum class WindowType { kHann };

struct StftConfig {
  int fft_size = 512;
  int window_len = 512;
  int hop = 256;
  WindowType window = WindowType::kHann;
  int sample_rate = 16000;

  int num_bins() const { return fft_size / 2 + 1; }
  // Frames produced for a signal of num_samples with centered framing.
  int NumFrames(size_t num_samples) const;
  // Throws InvalidArgument unless hop divides window_len, fft_size >=
  // window_len and all sizes are positive (fft_size even).
  void Validate() const;

  bool operator==(const StftConfig&) const = default;
};

std::vector<double> MakeWindow(WindowType type, int length);

// Complex spectrogram indexed (channel, frame, bin), bins fastest.
class MultichannelSpectrogram {
 public:
  MultichannelSpectrogram() = default;
  MultichannelSpectrogram(int num_channels, int num_frames,
                          const StftConfig& config, size_t num_samples);

  int num_channels() const { return num_channels_; }
  int num_frames() const { return num_frames_; }
  int num_bins() const { return num_bins_; }
  const StftConfig& config() const { return config_; }
  // Length of the time-domain signal this spectrogram was computed from.
  size_t num_samples() const { return num_samples_; }

  Complex& at(int c, int t, int f) { return data_[Index(c, t, f)]; }
  const Complex& at(int c, int t, int f) const { return data_[Index(c, t, f)]; }

  std::span<Complex> frame(int c, int t) {
    return {data_.data() + Index(c, t, 0), static_cast<size_t>(num_bins_)};
  }
  std::span<const Complex> frame(int c, int t) const {
    return {data_.data() + Index(c, t, 0), static_cast<size_t>(num_bins_)};
  }

  std::vector<Complex>& data() { return data_; }
  const std::vector<Complex>& data() const { return data_; }

  // Returns a spectrogram holding only channel c.
  MultichannelSpectrogram Channel(int c) const;
  // Shapes (frames, bins, config, sample count) agree.
  bool SameGrid(const MultichannelSpectrogram& other) const;

  MultichannelSpectrogram& operator*=(Complex gain);

 private:
  size_t Index(int c, int t, int f) const {
    return (static_cast<size_t>(c) * num_frames_ + t) * num_bins_ + f;
  }

  int num_channels_ = 0;
  int num_frames_ = 0;
  int num_bins_ = 0;
  StftConfig config_;
  size_t num_samples_ = 0;
  std::vector<Complex> data_;
};

// Centered STFT: the signal is reflect-padded by window_len / 2 on both ends
// so frame t is centered on sample t * hop.
MultichannelSpectrogram Stft(const Waveform& w, const StftConfig& config);

// Weighted overlap-add inverse of Stft: synthesis with the analysis window,
// normalized by the summed squared window. Returns num_samples() samples per
// channel at config().sample_rate.
Waveform Istft(const MultichannelSpectrogram& s);

// Stacks the M mixture channels and the single echo-reference channel into
// an (M+1)-channel spectrogram.
MultichannelSpectrogram StackWithReference(const MultichannelSpectrogram& mix,
                                           const MultichannelSpectrogram& echo);

}  // namespace melsb

#endif  // MELSB_STFT_H_
