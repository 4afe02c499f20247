#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "melsb/fft.h"
#include "melsb/stft.h"
#include "melsb/wav_io.h"
#include "melsb/waveform.h"
#include "test_util.h"

namespace melsb {
namespace {

using testing_util::Gaussian;
using testing_util::RandomWaveform;
using testing_util::ScratchDir;

void PutLe(std::string& s, uint32_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) s.push_back(static_cast<char>(v >> (8 * i)));
}

// Minimal 16-bit PCM mono file written byte by byte.
void WritePcm16(const std::filesystem::path& path,
                const std::vector<int16_t>& samples, int fs) {
  std::string s = "RIFF";
  PutLe(s, 36 + 2 * samples.size(), 4);
  s += "WAVEfmt ";
  PutLe(s, 16, 4);
  PutLe(s, 1, 2);
  PutLe(s, 1, 2);
  PutLe(s, fs, 4);
  PutLe(s, fs * 2, 4);
  PutLe(s, 2, 2);
  PutLe(s, 16, 2);
  s += "data";
  PutLe(s, 2 * samples.size(), 4);
  for (int16_t v : samples) PutLe(s, static_cast<uint16_t>(v), 2);
  std::ofstream(path, std::ios::binary) << s;
}

TEST(WaveformTest, RejectsUnequalChannelsAndBadRate) {
  EXPECT_THROW(Waveform(16000, {{1.0, 2.0}, {1.0}}), InvalidArgument);
  EXPECT_THROW(Waveform(0, {{1.0}}), InvalidArgument);
}

TEST(WavIoTest, FullScalePcm16Normalizes) {
  const auto dir = ScratchDir("wav_fullscale");
  WritePcm16(dir / "a.wav", {32767, -32768, 0}, 16000);
  const Waveform w = ReadWav(dir / "a.wav");
  ASSERT_EQ(w.num_samples(), 3u);
  EXPECT_NEAR(w.channel(0)[0], 32767.0 / 32768.0, 1e-12);
  EXPECT_NEAR(w.channel(0)[0], 0.99997, 1e-5);
  EXPECT_EQ(w.channel(0)[1], -1.0);
}

TEST(WavIoTest, OneSecondMonoLength) {
  const auto dir = ScratchDir("wav_len");
  WritePcm16(dir / "a.wav", std::vector<int16_t>(16000, 5), 16000);
  const Waveform w = ReadWav(dir / "a.wav");
  EXPECT_EQ(w.num_channels(), 1u);
  EXPECT_EQ(w.num_samples(), 16000u);
  EXPECT_EQ(w.sample_rate(), 16000);
}

TEST(WavIoTest, Pcm16RoundTripWithinQuantizationBound) {
  const auto dir = ScratchDir("wav_rt16");
  auto x = Gaussian(4000, 3, 0.3);
  for (double& v : x) v = std::clamp(v, -1.0, 1.0);
  const Waveform w = Waveform::Mono(16000, x);
  WriteWav(w, dir / "a.wav", WavEncoding::kPcm16);
  const Waveform r = ReadWav(dir / "a.wav");
  double max_err = 0.0;
  for (size_t i = 0; i < x.size(); ++i)
    max_err = std::max(max_err, std::abs(r.channel(0)[i] - x[i]));
  EXPECT_LE(max_err, std::ldexp(1.0, -15));
}

TEST(WavIoTest, Float32RoundTripIsFloatExact) {
  const auto dir = ScratchDir("wav_f32");
  const Waveform w = RandomWaveform(2, 1000, 4, 0.2);
  WriteWav(w, dir / "a.wav", WavEncoding::kFloat32);
  const Waveform r = ReadWav(dir / "a.wav");
  for (size_t c = 0; c < 2; ++c)
    for (size_t i = 0; i < 1000; ++i)
      EXPECT_EQ(r.channel(c)[i],
                static_cast<double>(static_cast<float>(w.channel(c)[i])));
}

TEST(WavIoTest, SilenceReadsBackZero) {
  const auto dir = ScratchDir("wav_zero");
  WriteWav(Waveform::Zeros(16000, 1, 100), dir / "a.wav");
  const Waveform r = ReadWav(dir / "a.wav");
  for (double v : r.channel(0)) EXPECT_EQ(v, 0.0);
}

TEST(WavIoTest, ClippedInputIsAnError) {
  const auto dir = ScratchDir("wav_clip");
  EXPECT_THROW(WriteWav(Waveform::Mono(16000, {0.5, 1.2}), dir / "a.wav"),
               InvalidArgument);
  EXPECT_FALSE(std::filesystem::exists(dir / "a.wav"));
}

TEST(WavIoTest, FourChannelOrderPreserved) {
  const auto dir = ScratchDir("wav_4ch");
  std::vector<std::vector<double>> ch(4, std::vector<double>(10));
  for (int c = 0; c < 4; ++c)
    for (int i = 0; i < 10; ++i) ch[c][i] = 0.1 * c + 0.001 * i;
  WriteWav(Waveform(16000, ch), dir / "a.wav", WavEncoding::kPcm24);
  const Waveform r = ReadWav(dir / "a.wav");
  ASSERT_EQ(r.num_channels(), 4u);
  for (int c = 0; c < 4; ++c)
    for (int i = 0; i < 10; ++i)
      EXPECT_NEAR(r.channel(c)[i], ch[c][i], std::ldexp(1.0, -23));
}

TEST(WavIoTest, MissingFileIsDataError) {
  EXPECT_THROW(ReadWav("/nonexistent/melsb.wav"), DataError);
}

TEST(FftTest, MatchesDirectDft) {
  const int n = 16;
  const auto x = Gaussian(n, 9);
  RealFft fft(n);
  std::vector<Complex> out(fft.num_bins());
  fft.Forward(x, out);
  for (int k = 0; k < fft.num_bins(); ++k) {
    Complex ref = 0.0;
    for (int i = 0; i < n; ++i)
      ref += x[i] * std::polar(1.0, -2.0 * kPi * k * i / n);
    EXPECT_NEAR(std::abs(out[k] - ref), 0.0, 1e-12);
  }
  std::vector<double> back(n);
  fft.Inverse(out, back);
  for (int i = 0; i < n; ++i) EXPECT_NEAR(back[i], x[i], 1e-12);
}

TEST(FftTest, ConvolveMatchesDirectSum) {
  const auto x = Gaussian(50, 1), h = Gaussian(7, 2);
  const auto y = Convolve(x, h, 56);
  for (size_t n = 0; n < 56; ++n) {
    double ref = 0.0;
    for (size_t k = 0; k < h.size(); ++k)
      if (n >= k && n - k < x.size()) ref += h[k] * x[n - k];
    EXPECT_NEAR(y[n], ref, 1e-12);
  }
}

TEST(StftConfigTest, ValidatesCola) {
  StftConfig cfg;
  EXPECT_NO_THROW(cfg.Validate());
  EXPECT_EQ(cfg.num_bins(), 257);
  cfg.hop = 200;
  EXPECT_THROW(cfg.Validate(), InvalidArgument);
  cfg = {};
  cfg.fft_size = 256;
  EXPECT_THROW(cfg.Validate(), InvalidArgument);
}

TEST(StftTest, FrameCountFollowsCenteredFraming) {
  const StftConfig cfg;
  const auto s = Stft(Waveform::Zeros(16000, 1, 16000), cfg);
  EXPECT_EQ(s.num_frames(), 1 + 16000 / 256);
  EXPECT_EQ(s.num_bins(), 257);
}

TEST(StftTest, BinCenteredToneStaysInMainLobe) {
  const StftConfig cfg;
  const int k = 40;
  std::vector<double> x(16000);
  for (size_t n = 0; n < x.size(); ++n)
    x[n] = std::cos(2.0 * kPi * k * static_cast<double>(n) / cfg.fft_size);
  const auto s = Stft(Waveform::Mono(16000, x), cfg);
  for (int t = 4; t < s.num_frames() - 4; ++t) {
    double total = 0.0;
    for (int f = 0; f < s.num_bins(); ++f) total += std::norm(s.at(0, t, f));
    double lobe = 0.0;
    for (int f = k - 1; f <= k + 1; ++f) lobe += std::norm(s.at(0, t, f));
    EXPECT_GE(lobe / total, 0.99);
    // Periodic Hann: neighbours at exactly half the centre magnitude.
    EXPECT_NEAR(std::abs(s.at(0, t, k - 1)) / std::abs(s.at(0, t, k)), 0.5,
                1e-9);
    EXPECT_NEAR(std::abs(s.at(0, t, k)), 0.25 * cfg.window_len, 1e-6);
  }
}

TEST(StftTest, ZeroSignalGivesZeroSpectrogram) {
  const auto s = Stft(Waveform::Zeros(16000, 2, 3000), StftConfig{});
  for (const auto& v : s.data()) EXPECT_EQ(v, Complex(0.0));
}

TEST(StftTest, ImpulseAtFrameCentreIsFlat) {
  const StftConfig cfg;
  std::vector<double> x(4096, 0.0);
  const int t = 5;
  x[t * cfg.hop] = 1.0;
  const auto s = Stft(Waveform::Mono(16000, x), cfg);
  const double centre_window = MakeWindow(WindowType::kHann, 512)[256];
  EXPECT_DOUBLE_EQ(centre_window, 1.0);
  for (int f = 0; f < s.num_bins(); ++f)
    EXPECT_NEAR(std::abs(s.at(0, t, f)), centre_window, 1e-12);
}

TEST(StftTest, WhiteNoiseRoundTrip) {
  const Waveform w = RandomWaveform(2, 48000, 11);
  const Waveform r = Istft(Stft(w, StftConfig{}));
  ASSERT_EQ(r.num_samples(), w.num_samples());
  for (size_t c = 0; c < 2; ++c) {
    std::vector<double> a(r.channel(c).begin(), r.channel(c).end());
    std::vector<double> b(w.channel(c).begin(), w.channel(c).end());
    EXPECT_LE(testing_util::RelativeL2(a, b), 1e-6);
  }
}

TEST(StftTest, IstftIsLinear) {
  const StftConfig cfg;
  auto s = Stft(RandomWaveform(1, 5000, 12), cfg);
  const Waveform a = Istft(s);
  s *= Complex(2.0);
  const Waveform b = Istft(s);
  for (size_t i = 0; i < a.num_samples(); ++i)
    EXPECT_NEAR(b.channel(0)[i], 2.0 * a.channel(0)[i], 1e-12);
  s *= Complex(0.0);
  const Waveform zero = Istft(s);
  for (double v : zero.channel(0)) EXPECT_EQ(v, 0.0);
}

TEST(StftTest, StackWithReferenceAppendsEchoChannel) {
  const StftConfig cfg;
  const auto mix = Stft(RandomWaveform(2, 2000, 1), cfg);
  const auto echo = Stft(RandomWaveform(1, 2000, 2), cfg);
  const auto st = StackWithReference(mix, echo);
  ASSERT_EQ(st.num_channels(), 3);
  EXPECT_EQ(st.at(2, 3, 10), echo.at(0, 3, 10));
  EXPECT_EQ(st.at(1, 3, 10), mix.at(1, 3, 10));
}

}  // namespace
}  // namespace melsb
