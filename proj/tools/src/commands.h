#ifndef MELSB_TOOLS_COMMANDS_H_
#define MELSB_TOOLS_COMMANDS_H_

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "run_config.h"
#include "scene_bundle.h"

namespace melsb {
namespace cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDataError = 3;

// Dry source for zone z (or the loudspeaker when z < 0): the configured
// file, trimmed or zero-padded to the scene length, else a speech-like
// signal drawn from the scene seed.
Waveform SceneSource(const SceneConfig& scene, int z, int sample_rate);

// Renders the configured scene and writes its bundle to out_dir.
SceneRender RunSimulate(const RunConfig& config,
                        const std::filesystem::path& out_dir);

// Separates the bundle in input_dir and writes sep_zone{0..3}.wav,
// metrics.json and, if enabled, mixture.png and sep_zone{i}.png to out_dir.
// Returns the metrics document.
std::string RunSeparate(const RunConfig& config,
                        const std::filesystem::path& input_dir,
                        const std::filesystem::path& out_dir);

// Prints the NB, FB and SB(K) cost table sorted by total cost and writes
// cost.json to out_dir. Returns the JSON document.
std::string RunCost(const RunConfig& config, const std::filesystem::path& out_dir,
                    std::ostream& table_out);

// Si-SNR, SDR and spectral MSE of one channel of est against ref, as JSON.
std::string RunMetrics(const std::filesystem::path& ref_path,
                       const std::filesystem::path& est_path, int channel,
                       const StftConfig& stft);

}  // namespace cli
}  // namespace melsb

#endif  // MELSB_TOOLS_COMMANDS_H_
