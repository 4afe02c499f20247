#include "melsb/wav_io.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "melsb/types.h"

namespace melsb {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint16_t ReadU16(const uint8_t* p) { return p[0] | (p[1] << 8); }
uint32_t ReadU32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

void PutU16(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}
void PutU32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

double DecodeSample(const uint8_t* p, uint16_t format, uint16_t bits) {
  if (format == kFormatFloat) {
    float f;
    uint32_t u = ReadU32(p);
    std::memcpy(&f, &u, sizeof(f));
    return f;
  }
  switch (bits) {
    case 16:
      return static_cast<int16_t>(ReadU16(p)) / 32768.0;
    case 24: {
      int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v |= ~0xFFFFFF;
      return v / 8388608.0;
    }
    case 32:
      return static_cast<int32_t>(ReadU32(p)) / 2147483648.0;
  }
  return 0.0;
}

int64_t Quantize(double x, int bits) {
  const double scale = std::ldexp(1.0, bits - 1);
  const int64_t hi = static_cast<int64_t>(scale) - 1;
  const int64_t lo = -static_cast<int64_t>(scale);
  return std::clamp(static_cast<int64_t>(std::llround(x * scale)), lo, hi);
}

}  // namespace

Waveform ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open wav file: " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw DataError("not a RIFF/WAVE file: " + path.string());

  uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
  uint32_t sample_rate = 0;
  const uint8_t* data = nullptr;
  size_t data_size = 0;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint8_t* chunk = bytes.data() + pos;
    const uint32_t size = ReadU32(chunk + 4);
    const size_t avail = std::min<size_t>(size, bytes.size() - pos - 8);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) throw DataError("truncated fmt chunk: " + path.string());
      format = ReadU16(chunk + 8);
      channels = ReadU16(chunk + 10);
      sample_rate = ReadU32(chunk + 12);
      block_align = ReadU16(chunk + 20);
      bits = ReadU16(chunk + 22);
      if (format == kFormatExtensible) {
        if (avail < 26) throw DataError("truncated extensible fmt chunk");
        format = ReadU16(chunk + 8 + 24);
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = avail;
    }
    pos += 8 + size + (size & 1);
  }
  if (channels == 0 || sample_rate == 0)
    throw DataError("missing fmt chunk: " + path.string());
  const bool supported =
      (format == kFormatPcm && (bits == 16 || bits == 24 || bits == 32)) ||
      (format == kFormatFloat && bits == 32);
  if (!supported)
    throw DataError("unsupported wav encoding (format " +
                    std::to_string(format) + ", " + std::to_string(bits) +
                    " bits): " + path.string());
  const size_t bytes_per_sample = bits / 8;
  if (block_align != bytes_per_sample * channels)
    throw DataError("inconsistent block alignment: " + path.string());
  const size_t frames = data ? data_size / block_align : 0;
  if (frames == 0) throw DataError("zero-length audio: " + path.string());

  std::vector<std::vector<double>> out(channels, std::vector<double>(frames));
  for (size_t i = 0; i < frames; ++i)
    for (size_t c = 0; c < channels; ++c)
      out[c][i] = DecodeSample(data + i * block_align + c * bytes_per_sample,
                               format, bits);
  return Waveform(static_cast<int>(sample_rate), std::move(out));
}

void WriteWav(const Waveform& w, const std::filesystem::path& path,
              WavEncoding encoding) {
  if (w.num_channels() == 0) throw InvalidArgument("waveform has no channels");
  for (const auto& ch : w.channels()) {
    for (double v : ch) {
      if (!std::isfinite(v))
        throw InvalidArgument("non-finite sample in " + path.string());
      if (std::abs(v) > 1.0)
        throw InvalidArgument("sample exceeds full scale in " + path.string());
    }
  }
  uint16_t bits = 16;
  uint16_t format = kFormatPcm;
  switch (encoding) {
    case WavEncoding::kPcm16: bits = 16; break;
    case WavEncoding::kPcm24: bits = 24; break;
    case WavEncoding::kPcm32: bits = 32; break;
    case WavEncoding::kFloat32: bits = 32; format = kFormatFloat; break;
  }
  const uint16_t channels = static_cast<uint16_t>(w.num_channels());
  const uint16_t block_align = channels * (bits / 8);
  const uint32_t data_size =
      static_cast<uint32_t>(w.num_samples() * block_align);

  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  PutU32(out, 36 + data_size);
  out += "WAVEfmt ";
  PutU32(out, 16);
  PutU16(out, format);
  PutU16(out, channels);
  PutU32(out, static_cast<uint32_t>(w.sample_rate()));
  PutU32(out, static_cast<uint32_t>(w.sample_rate()) * block_align);
  PutU16(out, block_align);
  PutU16(out, bits);
  out += "data";
  PutU32(out, data_size);
  for (size_t i = 0; i < w.num_samples(); ++i) {
    for (size_t c = 0; c < channels; ++c) {
      const double v = w.channel(c)[i];
      if (format == kFormatFloat) {
        const float f = static_cast<float>(v);
        uint32_t u;
        std::memcpy(&u, &f, sizeof(u));
        PutU32(out, u);
      } else {
        const int64_t q = Quantize(v, bits);
        for (int b = 0; b < bits / 8; ++b)
          out.push_back(static_cast<char>((q >> (8 * b)) & 0xFF));
      }
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError("cannot write wav file: " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw DataError("write failed: " + path.string());
}

}  // namespace melsb
