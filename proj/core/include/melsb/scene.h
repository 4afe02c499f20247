#ifndef MELSB_SCENE_H_
#define MELSB_SCENE_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "melsb/signal_gen.h"
#include "melsb/types.h"
#include "melsb/waveform.h"

namespace melsb {

inline constexpr int kNumZones = 4;
inline constexpr double kMicSpacing = 0.118;  // meters
inline constexpr double kMaxRt60 = 0.6;       // seconds

// Shoebox car cabin with a 2-mic linear array, one talker position per zone,
// a loudspeaker and a point noise source.
struct CabinSpec {
  Position dims{2.6, 1.7, 1.2};
  double rt60 = 0.3;
  std::vector<Position> mics;
  std::array<Position, kNumZones> zones;
  Position loudspeaker;
  Position noise_source;
  uint64_t seed = 0;
  int sample_rate = 16000;

  // Overhead array between the front seats, zones ordered driver, front
  // passenger, rear left, rear right.
  static CabinSpec Default();

  // Throws InvalidArgument when a position lies outside the cabin, rt60 is
  // outside [0, 0.6] or the mic pair is not 0.118 m apart.
  void Validate() const;
  bool Inside(const Position& p) const;
};

// Per-mic impulse responses from one source position.
struct Rir {
  std::vector<std::vector<double>> taps;
  int sample_rate = 16000;
  // Direct-path delay per mic in (fractional) samples.
  std::vector<double> direct_delay;
};

// Uniform wall absorption from Sabine's formula. Throws when the result is
// outside (0, 1]. rt60 must be > 0.
double SabineAbsorption(const Position& dims, double rt60);

// Uniform wall pressure reflection coefficient for which the image-source
// response of the room decays by 60 dB in rt60 seconds (Schroeder fit over
// -5..-35 dB). A first guess from the incoherent image energy is refined
// against the measured decay of a reference response; cached per room.
// Returns 0 for rt60 == 0 and throws InvalidArgument when the decay would
// need wall absorption outside (0, 1].
double WallReflection(const Position& dims, double rt60, int sample_rate);

// Image-source RIR with 8-tap Hann-windowed-sinc fractional delays and
// 1/(4 pi d) spreading. Reverberant responses pass a 100 Hz DC-removal
// high-pass. rt60 == 0 yields the direct path only; otherwise the
// response covers 1.2 * rt60 seconds.
Rir SimulateRir(const CabinSpec& spec, const Position& source);

enum class DistortionKind { kNone, kClip, kSigmoid };

DistortionKind ParseDistortionKind(const std::string& name);
std::string ToString(DistortionKind kind);

struct DistortionParams {
  DistortionKind kind = DistortionKind::kNone;
  double clip_threshold = 0.5;
  // f(x) = gain * (2 / (1 + exp(-steepness * x)) - 1); the default pair has
  // unit small-signal slope.
  double sigmoid_steepness = 4.0;
  double sigmoid_gain = 0.5;
};

// Memoryless loudspeaker nonlinearity applied per sample to a mono signal.
Waveform DistortLoudspeaker(const Waveform& x, const DistortionParams& params);

struct SceneOptions {
  // +inf disables the noise component.
  double snr_db = 10.0;
  // Ignored when no echo source is given.
  double ser_db = 0.0;
  DistortionParams distortion;
  NoiseKind noise_kind = NoiseKind::kCar;
  // Level of the per-mic independent noise relative to the point-source
  // noise image.
  double diffuse_level_db = -10.0;
  uint64_t seed = 0;
};

struct SceneRender {
  CabinSpec spec;
  Waveform mixture;                         // M channels
  Waveform echo_ref;                        // clean loudspeaker signal
  std::array<Waveform, kNumZones> targets;  // reverberant images, M channels
  std::array<bool, kNumZones> active{};
  Waveform echo_image;                      // M channels
  Waveform noise;                           // M channels
  bool has_echo = false;
  bool has_noise = false;
  double snr_db = 0.0;  // realized; +inf without noise
  double ser_db = 0.0;  // realized; NaN without echo

  Waveform SpeechImage() const;
  // Everything in the mixture except zone's own target.
  Waveform Interference(int zone) const;
};

// Renders y = sum_i h_i * s_i + h_x * f_NL(x) + v. Absent zones get zero
// targets. Components are scaled to the requested SNR and SER, then the
// whole scene is attenuated if the mixture would exceed 0.95 full scale.
SceneRender RenderScene(
    const CabinSpec& spec,
    const std::array<std::optional<Waveform>, kNumZones>& sources,
    const std::optional<Waveform>& echo_source, const SceneOptions& options);

}  // namespace melsb

#endif  // MELSB_SCENE_H_
