#ifndef MELSB_TOOLS_RUN_CONFIG_H_
#define MELSB_TOOLS_RUN_CONFIG_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "melsb/cost_model.h"
#include "melsb/pipeline.h"
#include "melsb/scene.h"
#include "melsb/stft.h"

namespace melsb {
namespace cli {

// Invalid configuration file or flag. what() carries "file:line: message"
// when the offending value has a source location.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SceneConfig {
  CabinSpec cabin = CabinSpec::Default();
  SceneOptions options;
  double duration_s = 4.0;
  std::array<bool, kNumZones> active{true, true, false, false};
  bool echo = false;
  // Optional mono source files per zone and for the loudspeaker; synthetic
  // speech-like signals are drawn from the seed otherwise.
  std::array<std::optional<std::filesystem::path>, kNumZones> source_files;
  std::optional<std::filesystem::path> echo_file;
};

struct SeparateConfig {
  SeparationMode mode = SeparationMode::kOracleMvdrSubband;
  int num_bands = 64;
  int embed = 32;
  uint64_t seed = 0;
  bool zero_echo_weights = false;
  bool spectrograms = false;
  std::optional<std::filesystem::path> input;    // scene bundle directory
  std::optional<std::filesystem::path> weights;  // weight bundle file
};

// Run settings assembled from the config file, then flags.
struct RunConfig {
  StftConfig stft;
  SceneConfig scene;
  SeparateConfig separate;
  PipelineShapes cost;
  std::vector<int> cost_bands{8, 16, 32, 64};
  std::optional<std::filesystem::path> output_dir;
  int threads = 1;

  // Checks cross-field constraints (band count against the STFT size,
  // referenced files exist). Throws ConfigError.
  void Validate() const;
};

// Parses a YAML file whose top-level sections are stft, scene, separate,
// cost, output and threads. Unknown keys and malformed values are errors
// naming the file and line.
RunConfig LoadRunConfig(const std::filesystem::path& path);
RunConfig ParseRunConfig(const std::string& text,
                         const std::string& source_name);

// Output directory: explicit setting, else $MELSB_OUT_ROOT, else
// ./melsb_out.
std::filesystem::path ResolveOutputDir(const RunConfig& config);

inline constexpr char kOutRootEnv[] = "MELSB_OUT_ROOT";

}  // namespace cli
}  // namespace melsb

#endif  // MELSB_TOOLS_RUN_CONFIG_H_
