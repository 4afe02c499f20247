#ifndef MELSB_TOOLS_SPECTROGRAM_PNG_H_
#define MELSB_TOOLS_SPECTROGRAM_PNG_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "melsb/stft.h"

namespace melsb {
namespace cli {

inline constexpr double kSpectrogramRangeDb = 80.0;

// 8-bit colormap indices, frames along x and bins along y with the lowest
// bin in the bottom row. Levels are 20 log10 |X| clipped to
// [peak - range_db, peak]; an all-zero channel maps to index 0.
std::vector<uint8_t> SpectrogramLevels(const MultichannelSpectrogram& s,
                                       int channel,
                                       double range_db = kSpectrogramRangeDb);

// RGB PNG of one channel through the embedded viridis lookup table. Throws
// DataError when the file cannot be written.
void WriteSpectrogramPng(const MultichannelSpectrogram& s, int channel,
                         const std::filesystem::path& path,
                         double range_db = kSpectrogramRangeDb);

}  // namespace cli
}  // namespace melsb

#endif  // MELSB_TOOLS_SPECTROGRAM_PNG_H_
