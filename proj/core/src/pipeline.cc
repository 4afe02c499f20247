#include "melsb/pipeline.h"

#include <map>

#include "melsb/features.h"
#include "melsb/parallel.h"
#include "melsb/subband.h"

namespace melsb {
namespace {

const std::map<std::string, SeparationMode>& ModeNames() {
  static const auto* names = new std::map<std::string, SeparationMode>{
      {"oracle-mvdr-fullband", SeparationMode::kOracleMvdrFullband},
      {"oracle-mvdr-subband", SeparationMode::kOracleMvdrSubband},
      {"stub-srnn", SeparationMode::kStubSrnn},
      {"baseline-mvdr-ti", SeparationMode::kBaselineMvdrTi},
      {"baseline-mvdr-tv", SeparationMode::kBaselineMvdrTv},
      {"identity", SeparationMode::kIdentity}};
  return *names;
}

struct Estimates {
  std::vector<MultichannelSpectrogram> speech;
  std::vector<MultichannelSpectrogram> noise;
};

Estimates OracleEstimates(const SeparationInput& in,
                          const MultichannelSpectrogram& stacked,
                          const SeparationConfig& cfg) {
  if (static_cast<int>(in.targets.size()) != cfg.num_zones)
    throw DataError("oracle modes need a ground-truth image for every zone");
  Estimates est;
  for (int z = 0; z < cfg.num_zones; ++z) {
    if (in.targets[z].num_channels() != in.mixture.num_channels() ||
        in.targets[z].num_samples() != in.mixture.num_samples())
      throw DataError("ground-truth image for zone " + std::to_string(z) +
                      " does not match the mixture");
    const auto image = Stft(in.targets[z], cfg.stft);
    for (CrfTarget kind : {CrfTarget::kSpeech, CrfTarget::kNoise}) {
      const auto fit = FitOracleCrf(
          stacked, OracleTarget(stacked, image, kind), cfg.crf, kind, z);
      (kind == CrfTarget::kSpeech ? est.speech : est.noise)
          .push_back(ApplyCrf(stacked, fit.filter));
    }
  }
  return est;
}

Estimates StubEstimates(const SeparationInput& in,
                        const MultichannelSpectrogram& mix,
                        const MultichannelSpectrogram& stacked,
                        const SeparationConfig& cfg, const WeightBundle& w) {
  const int mics = mix.num_channels();
  const auto pairs = AllMicPairs(mics);
  std::vector<Position> mic_pos = in.mics, zone_pos = in.zones;
  if (mic_pos.empty() || zone_pos.empty()) {
    const auto cabin = CabinSpec::Default();
    if (mic_pos.empty()) mic_pos = cabin.mics;
    if (zone_pos.empty()) zone_pos.assign(cabin.zones.begin(), cabin.zones.end());
  }
  if (static_cast<int>(mic_pos.size()) != mics ||
      static_cast<int>(zone_pos.size()) != cfg.num_zones)
    throw InvalidArgument("array geometry does not match mixture and zones");
  const auto features =
      ComputeFeatures(mix, cfg.mvdr.ref_ch, pairs,
                      SteeringFromGeometry(mic_pos, zone_pos, pairs, cfg.stft));
  CrfStubDims dims;
  dims.num_features = features.num_features();
  dims.hidden = cfg.crf_hidden;
  dims.zones = cfg.num_zones;
  dims.channels = mics + 1;
  dims.half_taps = cfg.crf.half_taps;
  WeightBundle crf_w = InitCrfStubWeights(dims, cfg.seed);
  if (w.Contains("crf.conv1.weight")) crf_w.Merge(w);
  const auto crfs = NeuralCrfStub(features, crf_w, dims);
  Estimates est;
  for (const auto& pair : crfs) {
    est.speech.push_back(ApplyCrf(stacked, pair.speech));
    est.noise.push_back(ApplyCrf(stacked, pair.noise));
  }
  return est;
}

BeamformerWeights MvdrForZones(const Estimates& est, const MvdrOptions& opt,
                               int frames, int bins, int channels,
                               size_t* flagged) {
  BeamformerWeights w(static_cast<int>(est.speech.size()), frames, bins,
                      opt.half_taps, channels);
  for (size_t z = 0; z < est.speech.size(); ++z) {
    const auto sol =
        OracleMvdrWeights(ComputeScm(est.speech[z], CrfTarget::kSpeech, z),
                          ComputeScm(est.noise[z], CrfTarget::kNoise, z), opt);
    *flagged += sol.num_flagged;
    w.SetZone(static_cast<int>(z), sol.weights);
  }
  return w;
}

SubbandFilters FiltersFor(const BandPlan& plan, const SeparationConfig& cfg) {
  if (cfg.weights && cfg.weights->Contains("subband.analysis.0"))
    return SubbandFilters::FromBundle(*cfg.weights, plan, cfg.embed);
  return SubbandFilters::Orthonormal(plan, cfg.embed, cfg.seed);
}

// Routes full-band weights through per-band analysis and synthesis.
BeamformerWeights ThroughSubbands(const BeamformerWeights& w,
                                  const SeparationConfig& cfg) {
  const int frames = w.num_frames(), bins = w.num_bins();
  const auto plan = MakeBandPlan(bins, cfg.num_bands, cfg.stft.sample_rate);
  const auto filters = FiltersFor(plan, cfg);
  filters.Validate(plan);
  const auto real = w.ToReal();
  const int dim = w.real_dim();
  std::vector<double> out(real.size(), 0.0);
  ParallelFor(static_cast<size_t>(plan.num_bands()), [&](size_t b, size_t e) {
    std::vector<double> sub(static_cast<size_t>(frames) * cfg.embed * dim);
    for (size_t k = b; k < e; ++k) {
      AnalyzeBand(static_cast<int>(k), real, frames, dim, plan, filters, sub);
      SynthesizeBand(static_cast<int>(k), sub, frames, dim, plan, filters,
                     out);
    }
  });
  return BeamformerWeights::FromReal(out, w.num_zones(), frames, bins,
                                     w.half_taps(), w.num_channels());
}

// Layer-normalized SCMs of all zones concatenated per bin: T x F x Z*2C^2.
std::vector<double> ZoneScmFeatures(
    const std::vector<MultichannelSpectrogram>& est, CrfTarget kind,
    const LayerNormParams& ln) {
  const int frames = est[0].num_frames(), bins = est[0].num_bins();
  const int zones = static_cast<int>(est.size());
  const int per = ScmFeatureSize(est[0].num_channels());
  std::vector<double> out(static_cast<size_t>(frames) * bins * zones * per);
  for (int z = 0; z < zones; ++z) {
    const auto norm = NormalizeScm(ComputeScm(est[z], kind, z), ln);
    for (size_t tf = 0; tf < static_cast<size_t>(frames) * bins; ++tf)
      std::copy_n(norm.begin() + tf * per, per,
                  out.begin() + (tf * zones + z) * per);
  }
  return out;
}

BeamformerWeights StubWeights(const Estimates& est,
                              const SeparationConfig& cfg,
                              const WeightBundle& bundle, int channels) {
  const int frames = est.speech[0].num_frames();
  const int bins = est.speech[0].num_bins();
  const auto ln = LayerNormParams::FromBundle(bundle, ScmFeatureSize(channels));
  const auto speech = ZoneScmFeatures(est.speech, CrfTarget::kSpeech, ln);
  const auto noise = ZoneScmFeatures(est.noise, CrfTarget::kNoise, ln);

  RnnBfDims dims;
  dims.embed = cfg.embed;
  dims.feature_dim = cfg.num_zones * ScmFeatureSize(channels);
  dims.hidden = cfg.rnn_hidden;
  dims.zone_dim = cfg.zone_dim;
  dims.heads = cfg.heads;
  dims.zones = cfg.num_zones;
  dims.channels = channels;
  dims.half_taps = cfg.mvdr.half_taps;
  WeightBundle net_w = InitRnnBfStubWeights(dims, cfg.seed + 1);
  if (bundle.Contains("bf.gru.w_ih")) net_w.Merge(bundle);
  const RnnBfStub net(net_w, dims);

  const auto plan = MakeBandPlan(bins, cfg.num_bands, cfg.stft.sample_rate);
  const auto filters = FiltersFor(plan, cfg);
  filters.Validate(plan);
  const int out_dim = dims.output_dim();
  std::vector<double> full(static_cast<size_t>(frames) * bins * out_dim, 0.0);
  ParallelFor(static_cast<size_t>(plan.num_bands()), [&](size_t b, size_t e) {
    const size_t in_size =
        static_cast<size_t>(frames) * cfg.embed * dims.feature_dim;
    std::vector<double> s(in_size), n(in_size),
        o(static_cast<size_t>(frames) * cfg.embed * out_dim);
    for (size_t k = b; k < e; ++k) {
      const int band = static_cast<int>(k);
      AnalyzeBand(band, speech, frames, dims.feature_dim, plan, filters, s);
      AnalyzeBand(band, noise, frames, dims.feature_dim, plan, filters, n);
      net.ForwardBand(s, n, frames, o);
      SynthesizeBand(band, o, frames, out_dim, plan, filters, full);
    }
  });
  return BeamformerWeights::FromReal(full, cfg.num_zones, frames, bins,
                                     dims.half_taps, channels);
}

}  // namespace

SeparationMode ParseSeparationMode(const std::string& name) {
  auto it = ModeNames().find(name);
  if (it == ModeNames().end())
    throw InvalidArgument("unknown separation mode: " + name);
  return it->second;
}

std::string ToString(SeparationMode mode) {
  for (const auto& [name, m] : ModeNames())
    if (m == mode) return name;
  return "?";
}

bool NeedsGroundTruth(SeparationMode mode) {
  return mode != SeparationMode::kStubSrnn &&
         mode != SeparationMode::kIdentity;
}

SeparationInput SeparationInput::FromRender(const SceneRender& render) {
  SeparationInput in;
  in.mixture = render.mixture;
  in.echo_ref = render.echo_ref;
  in.targets.assign(render.targets.begin(), render.targets.end());
  in.mics = render.spec.mics;
  in.zones.assign(render.spec.zones.begin(), render.spec.zones.end());
  return in;
}

SeparationOutput Separate(const SeparationInput& input,
                          const SeparationConfig& cfg) {
  cfg.stft.Validate();
  if (input.mixture.empty()) throw DataError("empty mixture");
  if (input.mixture.sample_rate() != cfg.stft.sample_rate)
    throw DataError("mixture sample rate does not match the STFT config");
  if (cfg.num_zones < 1) throw InvalidArgument("need at least one zone");
  const size_t n = input.mixture.num_samples();
  Waveform echo = Waveform::Zeros(input.mixture.sample_rate(), 1, n);
  if (input.echo_ref && !input.echo_ref->empty()) {
    if (input.echo_ref->num_channels() != 1 ||
        input.echo_ref->num_samples() != n)
      throw DataError("echo reference must be mono and match the mixture");
    echo = *input.echo_ref;
  }

  SeparationOutput out;
  out.mixture_spec = Stft(input.mixture, cfg.stft);
  const auto stacked = StackWithReference(out.mixture_spec, Stft(echo, cfg.stft));
  const int frames = stacked.num_frames(), bins = stacked.num_bins();
  const int channels = stacked.num_channels();
  if (cfg.mvdr.ref_ch < 0 || cfg.mvdr.ref_ch >= channels - 1)
    throw InvalidArgument("reference channel must be a mixture channel");
  const WeightBundle empty_bundle;
  const WeightBundle& bundle = cfg.weights ? *cfg.weights : empty_bundle;

  MvdrOptions mvdr = cfg.mvdr;
  switch (cfg.mode) {
    case SeparationMode::kIdentity: {
      out.weights = BeamformerWeights(cfg.num_zones, frames, bins,
                                      mvdr.half_taps, channels);
      for (int z = 0; z < cfg.num_zones; ++z)
        for (int t = 0; t < frames; ++t)
          for (int f = 0; f < bins; ++f)
            out.weights.at(z, t, f, mvdr.half_taps, mvdr.ref_ch) = 1.0;
      break;
    }
    case SeparationMode::kOracleMvdrFullband:
    case SeparationMode::kOracleMvdrSubband:
    case SeparationMode::kBaselineMvdrTi:
    case SeparationMode::kBaselineMvdrTv: {
      mvdr.smoothing = ScmSmoothing::kRecursive;
      mvdr.alpha = cfg.oracle_alpha;
      if (cfg.mode == SeparationMode::kBaselineMvdrTi) {
        mvdr.smoothing = ScmSmoothing::kTimeInvariant;
      } else if (cfg.mode == SeparationMode::kBaselineMvdrTv) {
        mvdr.alpha = cfg.baseline_alpha;
      }
      const auto est = OracleEstimates(input, stacked, cfg);
      out.weights =
          MvdrForZones(est, mvdr, frames, bins, channels, &out.num_flagged);
      if (cfg.mode == SeparationMode::kOracleMvdrSubband)
        out.weights = ThroughSubbands(out.weights, cfg);
      break;
    }
    case SeparationMode::kStubSrnn: {
      const auto est =
          StubEstimates(input, out.mixture_spec, stacked, cfg, bundle);
      out.weights = StubWeights(est, cfg, bundle, channels);
      break;
    }
  }
  if (cfg.zero_echo_weights) out.weights.ZeroChannel(channels - 1);

  out.zone_specs = ApplyWeights(stacked, out.weights);
  for (const auto& spec : out.zone_specs) out.zones.push_back(Istft(spec));
  return out;
}

}  // namespace melsb
