#ifndef MELSB_PIPELINE_H_
#define MELSB_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "melsb/beamformer.h"
#include "melsb/estimator.h"
#include "melsb/rnn_stub.h"
#include "melsb/scene.h"
#include "melsb/stft.h"
#include "melsb/weight_bundle.h"

namespace melsb {

enum class SeparationMode {
  kOracleMvdrFullband,
  kOracleMvdrSubband,
  kStubSrnn,
  kBaselineMvdrTi,
  kBaselineMvdrTv,
  kIdentity,  // reference mixture channel for every zone
};

SeparationMode ParseSeparationMode(const std::string& name);
std::string ToString(SeparationMode mode);
bool NeedsGroundTruth(SeparationMode mode);

struct SeparationInput {
  Waveform mixture;                  // M channels
  std::optional<Waveform> echo_ref;  // mono; absent means a zero channel
  // Reverberant per-zone images (M channels each, zeros for absent zones).
  // Required by the oracle and baseline modes.
  std::vector<Waveform> targets;
  // Geometry for the directional features of the stub mode.
  std::vector<Position> mics;
  std::vector<Position> zones;

  static SeparationInput FromRender(const SceneRender& render);
};

struct SeparationConfig {
  StftConfig stft;
  SeparationMode mode = SeparationMode::kOracleMvdrFullband;
  int num_bands = 64;
  int embed = 32;
  int num_zones = kNumZones;
  uint64_t seed = 0;
  // Forces the echo-reference weights to zero after solving.
  bool zero_echo_weights = false;
  OracleCrfOptions crf;
  // Reference channel, loading and taps; smoothing is set by the mode.
  MvdrOptions mvdr;
  // Recursive SCM averaging for the oracle modes and the time-variant
  // baseline.
  double oracle_alpha = 0.25;
  double baseline_alpha = 0.95;
  // Stub network sizes; embed, zones, channels and feature sizes are filled
  // in from the input.
  int crf_hidden = 16;
  int rnn_hidden = 32;
  int zone_dim = 16;
  int heads = 4;
  // Network, layer-norm and subband filter tensors. Missing tensors are
  // drawn from seed (networks) or built orthonormal (filters).
  std::optional<WeightBundle> weights;
};

struct SeparationOutput {
  std::vector<Waveform> zones;  // mono, input length
  BeamformerWeights weights;
  size_t num_flagged = 0;  // zeroed (zone, t, f) solutions
  MultichannelSpectrogram mixture_spec;
  std::vector<MultichannelSpectrogram> zone_specs;
};

SeparationOutput Separate(const SeparationInput& input,
                          const SeparationConfig& config);

}  // namespace melsb

#endif  // MELSB_PIPELINE_H_
