#include "melsb/cost_model.h"

#include <algorithm>
#include <bit>
#include <cstdio>

#include "json.hpp"
#include "melsb/types.h"

namespace melsb {
namespace {

constexpr uint64_t kComplexMac = 4;

uint64_t Log2Ceil(uint64_t n) { return std::bit_width(n - 1); }

// Real FFT of size n plus windowing.
uint64_t FftMacs(uint64_t n) { return 2 * n * Log2Ceil(n) + n; }

}  // namespace

std::string ToString(ProcessingMode mode) {
  switch (mode) {
    case ProcessingMode::kNarrowBand: return "NB";
    case ProcessingMode::kFullBand: return "FB";
    case ProcessingMode::kSubBand: return "SB";
  }
  return "?";
}

void PipelineShapes::Validate() const {
  for (int v : {fft_size, hop, sample_rate, mics, zones, embed, crf_hidden,
                gru_hidden, zone_dim, heads})
    if (v <= 0) throw InvalidArgument("pipeline shapes must be positive");
  if (crf_half_taps < 0 || bf_half_taps < 0)
    throw InvalidArgument("tap counts must be non-negative");
}

uint64_t CostReport::macs_per_second() const {
  uint64_t total = 0;
  for (const auto& s : breakdown) total += s.macs_per_second;
  return total;
}

uint64_t CostReport::stage(const std::string& name) const {
  for (const auto& s : breakdown)
    if (s.name == name) return s.macs_per_second;
  throw InvalidArgument("unknown cost stage: " + name);
}

std::string CostReport::label() const {
  if (mode == ProcessingMode::kSubBand)
    return "SB(" + std::to_string(num_bands) + ")";
  return ToString(mode);
}

uint64_t EstimatorInstanceMacs(const PipelineShapes& s) {
  const uint64_t in = 2ull * s.embed * s.scm_dim();
  const uint64_t h = s.gru_hidden, z = s.zones, dz = s.zone_dim;
  const uint64_t out = static_cast<uint64_t>(s.embed) * s.channels() *
                       (2 * s.bf_half_taps + 1) * 2;
  const uint64_t gru = 3 * (in * h + h * h);
  const uint64_t head = h * z * dz;
  const uint64_t mhsa = 4 * z * dz * dz + 2 * z * z * dz;
  return gru + head + mhsa + z * dz * out;
}

CostReport CountMacs(ProcessingMode mode, const PipelineShapes& s,
                     int num_bands) {
  s.Validate();
  const uint64_t f = s.num_bins(), c = s.channels(), z = s.zones;
  const uint64_t p = s.num_pairs(), fps = s.frames_per_second();
  if (mode == ProcessingMode::kSubBand &&
      (num_bands < 1 || num_bands > s.num_bins()))
    throw InvalidArgument("subband mode needs 1 <= K <= F");

  const uint64_t features = c * FftMacs(s.fft_size) + f * (2 + 4 * p + z * p);
  const uint64_t crf_taps = 2 * s.crf_half_taps + 1;
  const uint64_t crf_in = 1 + p + z;
  const uint64_t crf_out = z * 2 * crf_taps * c * 2;
  const uint64_t crf =
      f * (crf_in * s.crf_hidden * 3 + s.crf_hidden * crf_out +
           z * 2 * crf_taps * c * kComplexMac);
  const uint64_t scm = f * z * 2 * (c * c * kComplexMac + 3 * 2 * c * c);
  uint64_t transform = 0, instances = 1;
  switch (mode) {
    case ProcessingMode::kNarrowBand: instances = f; break;
    case ProcessingMode::kFullBand: instances = 1; break;
    case ProcessingMode::kSubBand:
      instances = num_bands;
      // Sum over bands of width * E * (2 D_in + D_out), widths sum to F.
      transform = f * s.embed * (2ull * s.scm_dim() + s.weight_dim());
      break;
  }
  const uint64_t estimator = instances * EstimatorInstanceMacs(s);
  const uint64_t bf_taps = 2 * s.bf_half_taps + 1;
  const uint64_t apply =
      f * z * bf_taps * c * kComplexMac + z * FftMacs(s.fft_size);

  CostReport r;
  r.mode = mode;
  r.num_bands = mode == ProcessingMode::kSubBand ? num_bands : 0;
  r.breakdown = {{kStageFeatures, features * fps},
                 {kStageCrf, crf * fps},
                 {kStageScm, scm * fps},
                 {kStageTransform, transform * fps},
                 {kStageEstimator, estimator * fps},
                 {kStageApply, apply * fps}};
  return r;
}

std::vector<CostReport> SortByCost(std::vector<CostReport> reports) {
  std::stable_sort(reports.begin(), reports.end(),
                   [](const CostReport& a, const CostReport& b) {
                     return a.macs_per_second() > b.macs_per_second();
                   });
  return reports;
}

std::string CostTable(const std::vector<CostReport>& reports) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-8s", "mode");
  out += line;
  const auto stages = {kStageFeatures, kStageCrf, kStageScm, kStageTransform,
                       kStageEstimator, kStageApply};
  for (const char* s : stages) {
    std::snprintf(line, sizeof(line), " %18s", s);
    out += line;
  }
  std::snprintf(line, sizeof(line), " %14s %9s\n", "total MAC/s", "GMAC/s");
  out += line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof(line), "%-8s", r.label().c_str());
    out += line;
    for (const char* s : stages) {
      std::snprintf(line, sizeof(line), " %18llu",
                    static_cast<unsigned long long>(r.stage(s)));
      out += line;
    }
    std::snprintf(line, sizeof(line), " %14llu %9.3f\n",
                  static_cast<unsigned long long>(r.macs_per_second()),
                  r.macs_per_second() / 1e9);
    out += line;
  }
  return out;
}

std::string CostJson(const std::vector<CostReport>& reports) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json e;
    e["mode"] = ToString(r.mode);
    e["label"] = r.label();
    if (r.mode == ProcessingMode::kSubBand) e["bands"] = r.num_bands;
    e["macs_per_second"] = r.macs_per_second();
    nlohmann::ordered_json b;
    for (const auto& s : r.breakdown) b[s.name] = s.macs_per_second;
    e["breakdown"] = b;
    j.push_back(e);
  }
  return j.dump(2) + "\n";
}

}  // namespace melsb
