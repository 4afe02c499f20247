#include "melsb/fft.h"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <vector>

namespace melsb {
namespace {

// FFTW planning and plan destruction are not thread-safe; execution is.
std::mutex& PlannerMutex() {
  static std::mutex m;
  return m;
}

constexpr unsigned kPlanFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

}  // namespace

RealFft::RealFft(int size) : size_(size) {
  if (size <= 0 || size % 2 != 0)
    throw InvalidArgument("fft size must be positive and even");
  std::vector<double> real(size);
  std::vector<Complex> spec(size / 2 + 1);
  auto* cplx = reinterpret_cast<fftw_complex*>(spec.data());
  std::lock_guard<std::mutex> lock(PlannerMutex());
  forward_plan_ = fftw_plan_dft_r2c_1d(size, real.data(), cplx, kPlanFlags);
  inverse_plan_ = fftw_plan_dft_c2r_1d(size, cplx, real.data(), kPlanFlags);
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(PlannerMutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void RealFft::Forward(std::span<const double> in, std::span<Complex> out) const {
  if (static_cast<int>(in.size()) != size_ ||
      static_cast<int>(out.size()) != num_bins())
    throw InvalidArgument("RealFft::Forward size mismatch");
  std::vector<double> buf(in.begin(), in.end());
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), buf.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft::Inverse(std::span<const Complex> in, std::span<double> out) const {
  if (static_cast<int>(in.size()) != num_bins() ||
      static_cast<int>(out.size()) != size_)
    throw InvalidArgument("RealFft::Inverse size mismatch");
  // c2r overwrites its input.
  std::vector<Complex> buf(in.begin(), in.end());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                       reinterpret_cast<fftw_complex*>(buf.data()), out.data());
  const double scale = 1.0 / size_;
  for (double& v : out) v *= scale;
}

std::vector<double> Convolve(std::span<const double> x,
                             std::span<const double> h, size_t out_len) {
  std::vector<double> y(out_len, 0.0);
  if (x.empty() || h.empty() || out_len == 0) return y;
  const size_t full = x.size() + h.size() - 1;
  size_t n = 2;
  while (n < full) n <<= 1;
  RealFft fft(static_cast<int>(n));
  std::vector<double> xp(n, 0.0), hp(n, 0.0), yp(n);
  std::copy(x.begin(), x.end(), xp.begin());
  std::copy(h.begin(), h.end(), hp.begin());
  std::vector<Complex> xs(fft.num_bins()), hs(fft.num_bins());
  fft.Forward(xp, xs);
  fft.Forward(hp, hs);
  for (size_t k = 0; k < xs.size(); ++k) xs[k] *= hs[k];
  fft.Inverse(xs, yp);
  std::copy_n(yp.begin(), std::min(out_len, full), y.begin());
  return y;
}

}  // namespace melsb
