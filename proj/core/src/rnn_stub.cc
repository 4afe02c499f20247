#include "melsb/rnn_stub.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "melsb/parallel.h"
#include "melsb/types.h"

namespace melsb {
namespace {

struct Shape {
  const char* name;
  std::vector<int64_t> dims;
};

std::vector<Shape> Shapes(const RnnBfDims& d) {
  const int64_t h = d.hidden, dz = d.zone_dim;
  return {{"bf.gru.w_ih", {3 * h, d.input_dim()}},
          {"bf.gru.w_hh", {3 * h, h}},
          {"bf.gru.b_ih", {3 * h}},
          {"bf.gru.b_hh", {3 * h}},
          {"bf.head.weight", {d.zones * dz, h}},
          {"bf.head.bias", {d.zones * dz}},
          {"bf.mhsa.w_q", {dz, dz}},
          {"bf.mhsa.w_k", {dz, dz}},
          {"bf.mhsa.w_v", {dz, dz}},
          {"bf.mhsa.w_o", {dz, dz}},
          {"bf.out.weight", {d.zone_output_dim(), dz}},
          {"bf.out.bias", {d.zone_output_dim()}}};
}

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y = W x (+ b), W rows x cols row-major.
void MatVec(const std::vector<double>& w, const double* x, int rows, int cols,
            const double* b, double* y) {
  for (int r = 0; r < rows; ++r) {
    double acc = b ? b[r] : 0.0;
    const double* row = w.data() + static_cast<size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

}  // namespace

void RnnBfDims::Validate() const {
  if (embed < 1 || feature_dim < 1 || hidden < 1 || zone_dim < 1 ||
      heads < 1 || zones < 1 || channels < 1 || half_taps < 0)
    throw InvalidArgument("invalid weight estimator dimensions");
  if (zone_dim % heads != 0)
    throw InvalidArgument("zone token size must be divisible by head count");
}

WeightBundle InitRnnBfStubWeights(const RnnBfDims& dims, uint64_t seed) {
  dims.Validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  WeightBundle b;
  for (const auto& s : Shapes(dims)) {
    Tensor t = Tensor::Zeros(s.dims);
    const double fan_in = s.dims.size() > 1 ? s.dims[1] : s.dims[0];
    const double scale = 1.0 / std::sqrt(fan_in);
    for (double& v : t.values) v = scale * g(rng);
    b.Set(s.name, std::move(t));
  }
  return b;
}

WeightBundle ZeroRnnBfStubWeights(const RnnBfDims& dims) {
  dims.Validate();
  WeightBundle b;
  for (const auto& s : Shapes(dims)) b.Set(s.name, Tensor::Zeros(s.dims));
  return b;
}

RnnBfStub::RnnBfStub(const WeightBundle& weights, const RnnBfDims& dims)
    : dims_(dims) {
  dims.Validate();
  std::vector<std::vector<double>*> dst = {
      &w_ih_, &w_hh_, &b_ih_, &b_hh_, &head_w_, &head_b_,
      &w_q_,  &w_k_,  &w_v_,  &w_o_,  &out_w_,  &out_b_};
  const auto shapes = Shapes(dims);
  for (size_t i = 0; i < shapes.size(); ++i)
    *dst[i] = weights.Get(shapes[i].name, shapes[i].dims).values;
}

void RnnBfStub::ForwardBand(std::span<const double> speech,
                            std::span<const double> noise, int num_frames,
                            std::span<double> out) const {
  const RnnBfDims& d = dims_;
  const size_t in_frame = static_cast<size_t>(d.embed) * d.feature_dim;
  const size_t out_frame = static_cast<size_t>(d.embed) * d.output_dim();
  if (speech.size() != num_frames * in_frame ||
      noise.size() != num_frames * in_frame ||
      out.size() != num_frames * out_frame)
    throw InvalidArgument("weight estimator band shape mismatch");
  const int h_dim = d.hidden, dz = d.zone_dim, z_n = d.zones;
  const int dh = dz / d.heads;
  const int taps = d.num_taps();
  std::vector<double> x(d.input_dim()), h(h_dim, 0.0), gi(3 * h_dim),
      gh(3 * h_dim), tok(z_n * dz), q(z_n * dz), k(z_n * dz), v(z_n * dz),
      ctx(z_n * dz), att(z_n * dz), y(d.zone_output_dim()), score(z_n);

  for (int t = 0; t < num_frames; ++t) {
    std::copy_n(speech.data() + t * in_frame, in_frame, x.begin());
    std::copy_n(noise.data() + t * in_frame, in_frame, x.begin() + in_frame);
    MatVec(w_ih_, x.data(), 3 * h_dim, d.input_dim(), b_ih_.data(), gi.data());
    MatVec(w_hh_, h.data(), 3 * h_dim, h_dim, b_hh_.data(), gh.data());
    for (int j = 0; j < h_dim; ++j) {
      const double r = Sigmoid(gi[j] + gh[j]);
      const double zg = Sigmoid(gi[h_dim + j] + gh[h_dim + j]);
      const double n = std::tanh(gi[2 * h_dim + j] + r * gh[2 * h_dim + j]);
      h[j] = (1.0 - zg) * n + zg * h[j];
    }
    MatVec(head_w_, h.data(), z_n * dz, h_dim, head_b_.data(), tok.data());
    for (int z = 0; z < z_n; ++z) {
      MatVec(w_q_, tok.data() + z * dz, dz, dz, nullptr, q.data() + z * dz);
      MatVec(w_k_, tok.data() + z * dz, dz, dz, nullptr, k.data() + z * dz);
      MatVec(w_v_, tok.data() + z * dz, dz, dz, nullptr, v.data() + z * dz);
    }
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
    for (int head = 0; head < d.heads; ++head) {
      const int o = head * dh;
      for (int zi = 0; zi < z_n; ++zi) {
        double mx = -INFINITY;
        for (int zj = 0; zj < z_n; ++zj) {
          double s = 0.0;
          for (int i = 0; i < dh; ++i)
            s += q[zi * dz + o + i] * k[zj * dz + o + i];
          score[zj] = s * inv_sqrt;
          mx = std::max(mx, score[zj]);
        }
        double sum = 0.0;
        for (int zj = 0; zj < z_n; ++zj) sum += score[zj] = std::exp(score[zj] - mx);
        for (int i = 0; i < dh; ++i) {
          double acc = 0.0;
          for (int zj = 0; zj < z_n; ++zj) acc += score[zj] * v[zj * dz + o + i];
          ctx[zi * dz + o + i] = acc / sum;
        }
      }
    }
    for (int z = 0; z < z_n; ++z) {
      MatVec(w_o_, ctx.data() + z * dz, dz, dz, nullptr, att.data() + z * dz);
      for (int i = 0; i < dz; ++i) att[z * dz + i] += tok[z * dz + i];
    }
    double* frame_out = out.data() + t * out_frame;
    for (int z = 0; z < z_n; ++z) {
      MatVec(out_w_, att.data() + z * dz, d.zone_output_dim(), dz,
             out_b_.data(), y.data());
      // y is (e, tap, c, re/im); out is (e, zone, tap, c, re/im).
      for (int e = 0; e < d.embed; ++e)
        for (int tap = 0; tap < taps; ++tap)
          for (int c = 0; c < d.channels; ++c)
            for (int ri = 0; ri < 2; ++ri)
              frame_out[static_cast<size_t>(e) * d.output_dim() +
                        ((z * taps + tap) * d.channels + c) * 2 + ri] =
                  y[((e * taps + tap) * d.channels + c) * 2 + ri];
    }
  }
}

SubbandFeature RnnBfStub::Forward(const SubbandFeature& speech,
                                  const SubbandFeature& noise) const {
  if (speech.num_bands != noise.num_bands ||
      speech.num_frames != noise.num_frames || speech.embed != dims_.embed ||
      noise.embed != dims_.embed || speech.dim != dims_.feature_dim ||
      noise.dim != dims_.feature_dim)
    throw InvalidArgument("subband inputs do not match the weight estimator");
  SubbandFeature out(speech.num_bands, speech.num_frames, dims_.embed,
                     dims_.output_dim());
  ParallelFor(static_cast<size_t>(speech.num_bands), [&](size_t b, size_t e) {
    for (size_t k = b; k < e; ++k)
      ForwardBand(speech.band(static_cast<int>(k)),
                  noise.band(static_cast<int>(k)), speech.num_frames,
                  out.band(static_cast<int>(k)));
  });
  return out;
}

}  // namespace melsb
