#ifndef MELSB_WAV_IO_H_
#define MELSB_WAV_IO_H_

#include <filesystem>

#include "melsb/waveform.h"

namespace melsb {

enum class WavEncoding { kPcm16, kPcm24, kPcm32, kFloat32 };

// Reads a RIFF/WAVE file (PCM 16/24/32-bit, IEEE float32, plain or
// WAVE_FORMAT_EXTENSIBLE). Samples are normalized to [-1, 1]. Throws
// DataError on missing files, unsupported encodings and empty audio.
Waveform ReadWav(const std::filesystem::path& path);

// Writes interleaved channels. Samples must be finite with |x| <= 1; PCM
// encodings round to nearest and saturate +1.0 to the largest code.
void WriteWav(const Waveform& w, const std::filesystem::path& path,
              WavEncoding encoding = WavEncoding::kPcm16);

}  // namespace melsb

#endif  // MELSB_WAV_IO_H_
