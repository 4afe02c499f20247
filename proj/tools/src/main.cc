#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.h"
#include "melsb/parallel.h"
#include "run_config.h"

namespace {

namespace fs = std::filesystem;
using melsb::cli::ConfigError;
using melsb::cli::RunConfig;

struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> mode;
  std::optional<int> bands;
  std::optional<uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<std::string> input;
  bool png = false;
  bool zero_echo = false;
  std::string ref;
  std::string est;
  int channel = 0;
};

// Config file first, flags override.
RunConfig Assemble(const Flags& f) {
  RunConfig c = f.config ? melsb::cli::LoadRunConfig(*f.config) : RunConfig{};
  if (f.mode) {
    try {
      c.separate.mode = melsb::ParseSeparationMode(*f.mode);
    } catch (const melsb::InvalidArgument& e) {
      throw ConfigError(std::string("--mode: ") + e.what());
    }
  }
  if (f.bands) {
    c.separate.num_bands = *f.bands;
    bool listed = false;
    for (int k : c.cost_bands) listed = listed || k == *f.bands;
    if (!listed) c.cost_bands.push_back(*f.bands);
  }
  if (f.seed) {
    c.scene.cabin.seed = *f.seed;
    c.scene.options.seed = *f.seed;
    c.separate.seed = *f.seed;
  }
  if (f.out) c.output_dir = fs::path(*f.out);
  if (f.threads) c.threads = *f.threads;
  if (f.input) c.separate.input = fs::path(*f.input);
  if (f.png) c.separate.spectrograms = true;
  if (f.zero_echo) c.separate.zero_echo_weights = true;
  c.Validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"melsb: in-car multi-zone speech separation toolkit"};
  app.require_subcommand(1);
  Flags f;
  auto add_common = [&f](CLI::App* sub) {
    sub->add_option("--config", f.config, "YAML run configuration")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "Seed for scene and stub weights");
    sub->add_option("--out", f.out,
                    "Output directory (default $MELSB_OUT_ROOT or ./melsb_out)");
    sub->add_option("--threads", f.threads, "Worker threads")
        ->check(CLI::Range(1, 256));
  };
  CLI::App* simulate = app.add_subcommand("simulate", "Render a cabin scene bundle");
  add_common(simulate);

  CLI::App* separate =
      app.add_subcommand("separate", "Separate a scene bundle into zones");
  add_common(separate);
  separate->add_option("--mode", f.mode,
                       "oracle-mvdr-fullband | oracle-mvdr-subband | "
                       "stub-srnn | baseline-mvdr-ti | baseline-mvdr-tv | "
                       "identity");
  separate->add_option("--bands", f.bands, "Mel band count K")
      ->check(CLI::PositiveNumber);
  separate->add_option("--input", f.input,
                       "Scene bundle directory (default: output directory)");
  separate->add_flag("--png", f.png, "Write spectrogram images");
  separate->add_flag("--zero-echo-weights", f.zero_echo,
                     "Force echo-reference weights to zero");

  CLI::App* cost = app.add_subcommand("cost", "Compare NB, FB and SB costs");
  add_common(cost);
  cost->add_option("--bands", f.bands, "Additional band count K")
      ->check(CLI::PositiveNumber);

  CLI::App* metrics =
      app.add_subcommand("metrics", "Score an estimate against a reference");
  add_common(metrics);
  metrics->add_option("--ref", f.ref, "Reference WAV")->required();
  metrics->add_option("--est", f.est, "Estimate WAV")->required();
  metrics->add_option("--channel", f.channel, "Reference channel");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? melsb::cli::kExitOk : melsb::cli::kExitConfigError;
  }

  try {
    const RunConfig config = Assemble(f);
    melsb::SetNumThreads(config.threads);
    const fs::path out_dir = melsb::cli::ResolveOutputDir(config);
    if (simulate->parsed()) {
      const auto render = melsb::cli::RunSimulate(config, out_dir);
      std::printf("wrote scene bundle to %s (snr %.2f dB, ser %.2f dB)\n",
                  out_dir.string().c_str(), render.snr_db, render.ser_db);
    } else if (separate->parsed()) {
      const fs::path input = config.separate.input.value_or(out_dir);
      std::cout << melsb::cli::RunSeparate(config, input, out_dir);
    } else if (cost->parsed()) {
      melsb::cli::RunCost(config, out_dir, std::cout);
    } else if (metrics->parsed()) {
      const std::string json =
          melsb::cli::RunMetrics(f.ref, f.est, f.channel, config.stft);
      std::cout << json;
      if (f.out) {
        fs::create_directories(out_dir);
        std::ofstream(out_dir / "metrics.json", std::ios::binary) << json;
      }
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return melsb::cli::kExitConfigError;
  } catch (const melsb::InvalidArgument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return melsb::cli::kExitConfigError;
  } catch (const melsb::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return melsb::cli::kExitDataError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return melsb::cli::kExitDataError;
  }
  return melsb::cli::kExitOk;
}
