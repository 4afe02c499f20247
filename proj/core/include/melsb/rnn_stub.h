#ifndef MELSB_RNN_STUB_H_
#define MELSB_RNN_STUB_H_

#include <cstdint>
#include <span>
#include <vector>

#include "melsb/scene.h"
#include "melsb/subband.h"
#include "melsb/weight_bundle.h"

namespace melsb {

// Shapes of the shared per-band weight estimator: a GRU over frames fed by
// the flattened speech and noise subband features, a dense head producing
// one token per zone, one multi-head self-attention block across the zone
// tokens with a residual connection, and a per-token output layer emitting
// (embed, tap, channel, re/im) weights for each zone.
struct RnnBfDims {
  int embed = 32;
  int feature_dim = 72;  // per kind, all zones concatenated
  int hidden = 32;
  int zone_dim = 16;
  int heads = 4;
  int zones = kNumZones;
  int channels = 3;
  int half_taps = 2;

  int num_taps() const { return 2 * half_taps + 1; }
  int input_dim() const { return 2 * embed * feature_dim; }
  int zone_output_dim() const { return embed * num_taps() * channels * 2; }
  // Per (t, e): zones * taps * channels * 2, ordered (zone, tap, channel,
  // re/im).
  int output_dim() const { return zones * num_taps() * channels * 2; }
  void Validate() const;
};

// Gaussian weights scaled by 1 / sqrt(fan_in), deterministic in seed.
WeightBundle InitRnnBfStubWeights(const RnnBfDims& dims, uint64_t seed);
WeightBundle ZeroRnnBfStubWeights(const RnnBfDims& dims);

class RnnBfStub {
 public:
  // Throws InvalidArgument when a tensor is missing or misshapen.
  RnnBfStub(const WeightBundle& weights, const RnnBfDims& dims);

  const RnnBfDims& dims() const { return dims_; }

  // speech and noise are T x E x feature_dim; out is T x E x output_dim.
  // Causal: out at frame t depends only on inputs at frames <= t.
  void ForwardBand(std::span<const double> speech,
                   std::span<const double> noise, int num_frames,
                   std::span<double> out) const;

  // Runs ForwardBand on every band with the same parameters.
  SubbandFeature Forward(const SubbandFeature& speech,
                         const SubbandFeature& noise) const;

 private:
  RnnBfDims dims_;
  std::vector<double> w_ih_, w_hh_, b_ih_, b_hh_;
  std::vector<double> head_w_, head_b_;
  std::vector<double> w_q_, w_k_, w_v_, w_o_;
  std::vector<double> out_w_, out_b_;
};

}  // namespace melsb

#endif  // MELSB_RNN_STUB_H_
