#ifndef MELSB_SUBBAND_H_
#define MELSB_SUBBAND_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "melsb/weight_bundle.h"

namespace melsb {

double HzToMel(double hz);
double MelToHz(double mel);

// Contiguous partition of F bins into K non-empty bands.
struct BandPlan {
  int num_bins = 0;
  int sample_rate = 16000;
  std::vector<int> edges;  // K + 1 entries, edges[0] = 0, edges[K] = F

  int num_bands() const { return static_cast<int>(edges.size()) - 1; }
  int begin(int k) const { return edges[k]; }
  int width(int k) const { return edges[k + 1] - edges[k]; }
  int max_width() const;

  // Throws InvalidArgument unless edges strictly increase from 0 to F.
  void Validate() const;

  // "K <n>\nfs <hz>\nedges e0 e1 ... eK\n"
  std::string ToManifest() const;
  static BandPlan FromManifest(const std::string& text, int num_bins);
};

// K + 1 mel-uniform points between 0 Hz and fs / 2 rounded to the nearest
// bin, then repaired so every band holds at least one bin: duplicate edges
// are pushed up by one bin, and edges pushed past F are pulled back down.
BandPlan MakeBandPlan(int num_bins, int num_bands, int sample_rate);

// Per-band dense maps along frequency. analysis[k] is E x width(k) and
// synthesis[k] is width(k) x E, both row-major.
struct SubbandFilters {
  int embed = 0;
  std::vector<std::vector<double>> analysis;
  std::vector<std::vector<double>> synthesis;

  // Analysis from the thin QR factor of a seeded Gaussian matrix, so its
  // columns (E >= width) or rows (E < width) are orthonormal; synthesis is
  // its transpose, which equals the pseudo-inverse.
  static SubbandFilters Orthonormal(const BandPlan& plan, int embed,
                                    uint64_t seed);
  // E = 1 with analysis = synthesis = [1]; requires single-bin bands.
  static SubbandFilters Passthrough(const BandPlan& plan);
  // Reads "subband.analysis.<k>" and, when present, "subband.synthesis.<k>";
  // missing synthesis maps are the pseudo-inverse of the analysis.
  static SubbandFilters FromBundle(const WeightBundle& bundle,
                                   const BandPlan& plan, int embed);
  void ToBundle(WeightBundle* bundle) const;

  // Throws InvalidArgument when shapes disagree with the plan.
  void Validate(const BandPlan& plan) const;
};

// Moore-Penrose pseudo-inverse of a rows x cols row-major matrix.
std::vector<double> PseudoInverse(std::span<const double> m, int rows,
                                  int cols);

// Real tensor indexed (k, t, e, d).
struct SubbandFeature {
  int num_bands = 0;
  int num_frames = 0;
  int embed = 0;
  int dim = 0;
  std::vector<double> data;

  SubbandFeature() = default;
  SubbandFeature(int bands, int frames, int embed_in, int dim_in);
  double& at(int k, int t, int e, int d) { return data[Index(k, t, e, d)]; }
  double at(int k, int t, int e, int d) const { return data[Index(k, t, e, d)]; }
  size_t band_size() const {
    return static_cast<size_t>(num_frames) * embed * dim;
  }
  std::span<double> band(int k) { return {data.data() + k * band_size(), band_size()}; }
  std::span<const double> band(int k) const {
    return {data.data() + k * band_size(), band_size()};
  }

 private:
  size_t Index(int k, int t, int e, int d) const {
    return ((static_cast<size_t>(k) * num_frames + t) * embed + e) * dim + d;
  }
};

// out (T x E x D) = analysis[k] applied to bins of band k of feat (T x F x D).
void AnalyzeBand(int k, std::span<const double> feat, int num_frames, int dim,
                 const BandPlan& plan, const SubbandFilters& filters,
                 std::span<double> out);
// Writes synthesis[k] applied to in (T x E x D) into the bins of band k of
// full (T x F x D); other bins are untouched.
void SynthesizeBand(int k, std::span<const double> in, int num_frames,
                    int dim, const BandPlan& plan,
                    const SubbandFilters& filters, std::span<double> full);

SubbandFeature Analyze(std::span<const double> feat, int num_frames, int dim,
                       const BandPlan& plan, const SubbandFilters& filters);
// Returns T x F x D.
std::vector<double> Synthesize(const SubbandFeature& sub, const BandPlan& plan,
                               const SubbandFilters& filters);

}  // namespace melsb

#endif  // MELSB_SUBBAND_H_
