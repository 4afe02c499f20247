#include "spectrogram_png.h"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>

namespace melsb {
namespace cli {
namespace {

constexpr uint8_t kViridis[256][3] = {
#include "viridis_lut.inc"
};

}  // namespace

std::vector<uint8_t> SpectrogramLevels(const MultichannelSpectrogram& s,
                                       int channel, double range_db) {
  if (channel < 0 || channel >= s.num_channels())
    throw InvalidArgument("spectrogram channel out of range");
  if (!(range_db > 0.0)) throw InvalidArgument("range_db must be > 0");
  const int t_max = s.num_frames(), f_max = s.num_bins();
  std::vector<double> db(static_cast<size_t>(t_max) * f_max);
  double peak = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < t_max; ++t) {
    for (int f = 0; f < f_max; ++f) {
      const double mag = std::abs(s.at(channel, t, f));
      const double v = mag > 0.0 ? 20.0 * std::log10(mag)
                                 : -std::numeric_limits<double>::infinity();
      db[static_cast<size_t>(t) * f_max + f] = v;
      peak = std::max(peak, v);
    }
  }
  std::vector<uint8_t> levels(db.size(), 0);
  if (!std::isfinite(peak)) return levels;
  const double floor = peak - range_db;
  for (int row = 0; row < f_max; ++row) {
    const int f = f_max - 1 - row;
    for (int t = 0; t < t_max; ++t) {
      const double v = std::clamp(db[static_cast<size_t>(t) * f_max + f],
                                  floor, peak);
      levels[static_cast<size_t>(row) * t_max + t] =
          static_cast<uint8_t>(std::lround((v - floor) / range_db * 255.0));
    }
  }
  return levels;
}

void WriteSpectrogramPng(const MultichannelSpectrogram& s, int channel,
                         const std::filesystem::path& path, double range_db) {
  const auto levels = SpectrogramLevels(s, channel, range_db);
  const int width = s.num_frames(), height = s.num_bins();
  std::unique_ptr<FILE, int (*)(FILE*)> file(
      std::fopen(path.string().c_str(), "wb"), &std::fclose);
  if (!file) throw DataError("cannot open " + path.string());
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw DataError("libpng initialization failed");
  }
  std::vector<png_byte> row(static_cast<size_t>(width) * 3);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError("failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const auto& c = kViridis[levels[static_cast<size_t>(y) * width + x]];
      std::copy(c, c + 3, row.begin() + 3 * x);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace cli
}  // namespace melsb
