#ifndef MELSB_TOOLS_SCENE_BUNDLE_H_
#define MELSB_TOOLS_SCENE_BUNDLE_H_

#include <array>
#include <filesystem>
#include <string>

#include "melsb/pipeline.h"
#include "melsb/scene.h"

namespace melsb {
namespace cli {

inline constexpr char kManifestName[] = "manifest.json";

// Writes mixture.wav, echo_ref.wav, target_zone{0..3}.wav (float32) and,
// when present, noise.wav and echo_image.wav, plus manifest.json with the
// geometry and realized SNR/SER. Absent zones get all-zero targets; the
// echo reference is all zeros without a loudspeaker signal. The output is a
// pure function of the render, so equal renders give byte-identical files.
// Throws DataError if any component exceeds full scale.
void WriteSceneBundle(const SceneRender& render, double duration_s,
                      const std::filesystem::path& dir);

struct SceneBundle {
  SeparationInput input;
  std::array<bool, kNumZones> active{};
  bool has_echo = false;
  int sample_rate = 0;
};

// Loads a bundle written by WriteSceneBundle. Targets are loaded when all
// four files exist, otherwise left empty. Throws DataError for a missing or
// malformed manifest or mixture.
SceneBundle ReadSceneBundle(const std::filesystem::path& dir);

}  // namespace cli
}  // namespace melsb

#endif  // MELSB_TOOLS_SCENE_BUNDLE_H_
