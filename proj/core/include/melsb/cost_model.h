#ifndef MELSB_COST_MODEL_H_
#define MELSB_COST_MODEL_H_

#include <cstdint>
#include <string>
#include <vector>

namespace melsb {

enum class ProcessingMode { kNarrowBand, kFullBand, kSubBand };

std::string ToString(ProcessingMode mode);

// Shapes entering the multiply-accumulate count. The defaults describe a
// mid-sized network of the kind used for in-car separation.
struct PipelineShapes {
  int fft_size = 512;
  int hop = 256;
  int sample_rate = 16000;
  int mics = 2;
  int zones = 4;
  int crf_half_taps = 1;
  int bf_half_taps = 2;
  int embed = 32;
  int crf_hidden = 64;   // per-bin mask network width
  int gru_hidden = 256;  // weight estimator recurrent width
  int zone_dim = 64;     // attention token size per zone
  int heads = 4;

  int num_bins() const { return fft_size / 2 + 1; }
  int channels() const { return mics + 1; }
  int num_pairs() const { return mics * (mics - 1) / 2; }
  // STFT frames covering one second of audio.
  int frames_per_second() const { return 1 + sample_rate / hop; }
  // Layer-normalized SCM features per bin and target kind, all zones.
  int scm_dim() const { return zones * 2 * channels() * channels(); }
  // Real beamformer outputs per bin: zones * channels * taps * 2.
  int weight_dim() const {
    return zones * channels() * (2 * bf_half_taps + 1) * 2;
  }
  // Throws InvalidArgument for non-positive sizes.
  void Validate() const;
};

struct StageCost {
  std::string name;
  uint64_t macs_per_second = 0;
};

struct CostReport {
  ProcessingMode mode = ProcessingMode::kNarrowBand;
  int num_bands = 0;  // SB only
  std::vector<StageCost> breakdown;

  uint64_t macs_per_second() const;
  uint64_t stage(const std::string& name) const;
  // "NB", "FB" or "SB(K)".
  std::string label() const;
};

inline constexpr const char* kStageFeatures = "features";
inline constexpr const char* kStageCrf = "crf";
inline constexpr const char* kStageScm = "scm";
inline constexpr const char* kStageTransform = "bandplan transform";
inline constexpr const char* kStageEstimator = "weight estimator";
inline constexpr const char* kStageApply = "apply";

// MACs of one estimator instance (one bin, band or the whole spectrum) for
// one frame. Identical across modes.
uint64_t EstimatorInstanceMacs(const PipelineShapes& shapes);

// Per-second counts. Per-bin stages scale with F in every mode; the weight
// estimator runs F times (NB), K times (SB) or once (FB); SB adds the band
// analysis and synthesis transforms.
CostReport CountMacs(ProcessingMode mode, const PipelineShapes& shapes,
                     int num_bands = 0);

// Reports sorted by descending total cost.
std::vector<CostReport> SortByCost(std::vector<CostReport> reports);
std::string CostTable(const std::vector<CostReport>& reports);
std::string CostJson(const std::vector<CostReport>& reports);

}  // namespace melsb

#endif  // MELSB_COST_MODEL_H_
