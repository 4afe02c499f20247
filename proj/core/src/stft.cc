#include "melsb/stft.h"

#include <cmath>
#include <string>

#include "melsb/fft.h"
#include "melsb/parallel.h"

namespace melsb {
namespace {

// Mirror-reflect index into [0, n) without repeating the edge sample.
size_t ReflectIndex(long long i, size_t n) {
  if (n == 1) return 0;
  const long long period = 2 * static_cast<long long>(n - 1);
  long long r = i % period;
  if (r < 0) r += period;
  if (r >= static_cast<long long>(n)) r = period - r;
  return static_cast<size_t>(r);
}

}  // namespace

int StftConfig::NumFrames(size_t num_samples) const {
  return 1 + static_cast<int>(num_samples / static_cast<size_t>(hop));
}

void StftConfig::Validate() const {
  if (fft_size <= 0 || window_len <= 0 || hop <= 0 || sample_rate <= 0)
    throw InvalidArgument("stft sizes and sample rate must be positive");
  if (fft_size % 2 != 0) throw InvalidArgument("fft_size must be even");
  if (fft_size < window_len)
    throw InvalidArgument("fft_size must be >= window_len");
  if (window_len % hop != 0)
    throw InvalidArgument("hop must divide window_len (COLA)");
  if (window_len % 2 != 0) throw InvalidArgument("window_len must be even");
}

std::vector<double> MakeWindow(WindowType type, int length) {
  std::vector<double> w(length);
  switch (type) {
    case WindowType::kHann:
      // Periodic Hann.
      for (int n = 0; n < length; ++n)
        w[n] = 0.5 - 0.5 * std::cos(2.0 * kPi * n / length);
      break;
  }
  return w;
}

MultichannelSpectrogram::MultichannelSpectrogram(int num_channels,
                                                 int num_frames,
                                                 const StftConfig& config,
                                                 size_t num_samples)
    : num_channels_(num_channels),
      num_frames_(num_frames),
      num_bins_(config.num_bins()),
      config_(config),
      num_samples_(num_samples),
      data_(static_cast<size_t>(num_channels) * num_frames * num_bins_) {}

MultichannelSpectrogram MultichannelSpectrogram::Channel(int c) const {
  if (c < 0 || c >= num_channels_) throw InvalidArgument("channel out of range");
  MultichannelSpectrogram out(1, num_frames_, config_, num_samples_);
  std::copy_n(data_.begin() + Index(c, 0, 0),
              static_cast<size_t>(num_frames_) * num_bins_, out.data_.begin());
  return out;
}

bool MultichannelSpectrogram::SameGrid(
    const MultichannelSpectrogram& other) const {
  return num_frames_ == other.num_frames_ && num_bins_ == other.num_bins_ &&
         config_ == other.config_ && num_samples_ == other.num_samples_;
}

MultichannelSpectrogram& MultichannelSpectrogram::operator*=(Complex gain) {
  for (auto& v : data_) v *= gain;
  return *this;
}

MultichannelSpectrogram Stft(const Waveform& w, const StftConfig& config) {
  config.Validate();
  if (w.empty()) throw InvalidArgument("stft of empty waveform");
  if (w.sample_rate() != config.sample_rate)
    throw InvalidArgument("waveform sample rate " +
                          std::to_string(w.sample_rate()) +
                          " does not match stft config " +
                          std::to_string(config.sample_rate));
  const size_t n = w.num_samples();
  const int frames = config.NumFrames(n);
  const int channels = static_cast<int>(w.num_channels());
  const long long pad = config.window_len / 2;
  const auto window = MakeWindow(config.window, config.window_len);
  MultichannelSpectrogram out(channels, frames, config, n);
  RealFft fft(config.fft_size);

  ParallelFor(static_cast<size_t>(channels) * frames, [&](size_t b, size_t e) {
    std::vector<double> buf(config.fft_size);
    for (size_t job = b; job < e; ++job) {
      const int c = static_cast<int>(job / frames);
      const int t = static_cast<int>(job % frames);
      const auto x = w.channel(c);
      std::fill(buf.begin(), buf.end(), 0.0);
      const long long start = static_cast<long long>(t) * config.hop - pad;
      for (int i = 0; i < config.window_len; ++i)
        buf[i] = window[i] * x[ReflectIndex(start + i, n)];
      fft.Forward(buf, out.frame(c, t));
    }
  });
  return out;
}

Waveform Istft(const MultichannelSpectrogram& s) {
  const StftConfig& config = s.config();
  config.Validate();
  if (s.num_channels() <= 0) throw InvalidArgument("istft of empty spectrogram");
  if (s.num_bins() != config.num_bins() ||
      s.num_frames() != config.NumFrames(s.num_samples()))
    throw InvalidArgument("spectrogram frame metadata is inconsistent");
  const size_t n = s.num_samples();
  const long long pad = config.window_len / 2;
  const auto window = MakeWindow(config.window, config.window_len);
  RealFft fft(config.fft_size);

  // Window-square normalization is identical for every channel.
  std::vector<double> norm(n, 0.0);
  for (int t = 0; t < s.num_frames(); ++t) {
    const long long start = static_cast<long long>(t) * config.hop - pad;
    for (int i = 0; i < config.window_len; ++i) {
      const long long idx = start + i;
      if (idx >= 0 && idx < static_cast<long long>(n))
        norm[idx] += window[i] * window[i];
    }
  }

  std::vector<std::vector<double>> channels(s.num_channels(),
                                            std::vector<double>(n, 0.0));
  ParallelFor(static_cast<size_t>(s.num_channels()), [&](size_t b, size_t e) {
    std::vector<double> frame(config.fft_size);
    for (size_t c = b; c < e; ++c) {
      auto& y = channels[c];
      for (int t = 0; t < s.num_frames(); ++t) {
        fft.Inverse(s.frame(static_cast<int>(c), t), frame);
        const long long start = static_cast<long long>(t) * config.hop - pad;
        for (int i = 0; i < config.window_len; ++i) {
          const long long idx = start + i;
          if (idx >= 0 && idx < static_cast<long long>(n))
            y[idx] += window[i] * frame[i];
        }
      }
      for (size_t i = 0; i < n; ++i)
        y[i] = norm[i] > 1e-10 ? y[i] / norm[i] : 0.0;
    }
  });
  return Waveform(config.sample_rate, std::move(channels));
}

MultichannelSpectrogram StackWithReference(const MultichannelSpectrogram& mix,
                                           const MultichannelSpectrogram& echo) {
  if (echo.num_channels() != 1)
    throw InvalidArgument("echo reference must have exactly one channel");
  if (!mix.SameGrid(echo))
    throw InvalidArgument("mixture and echo spectrograms differ in shape");
  const int m = mix.num_channels();
  MultichannelSpectrogram out(m + 1, mix.num_frames(), mix.config(),
                              mix.num_samples());
  std::copy(mix.data().begin(), mix.data().end(), out.data().begin());
  std::copy(echo.data().begin(), echo.data().end(),
            out.data().begin() + mix.data().size());
  return out;
}

}  // namespace melsb
