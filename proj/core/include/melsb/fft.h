#ifndef MELSB_FFT_H_
#define MELSB_FFT_H_

#include <span>
#include <vector>

#include "melsb/types.h"

namespace melsb {

// One-sided real DFT of fixed size backed by FFTW. Forward is unnormalized;
// Inverse scales by 1/size so Inverse(Forward(x)) == x. A single instance
// may be used from several threads at once.
class RealFft {
 public:
  explicit RealFft(int size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return size_; }
  int num_bins() const { return size_ / 2 + 1; }

  // in.size() == size(), out.size() == num_bins().
  void Forward(std::span<const double> in, std::span<Complex> out) const;
  // in.size() == num_bins(), out.size() == size().
  void Inverse(std::span<const Complex> in, std::span<double> out) const;

 private:
  int size_;
  void* forward_plan_;
  void* inverse_plan_;
};

// Linear convolution of x with h truncated to out_len samples, via FFT.
std::vector<double> Convolve(std::span<const double> x,
                             std::span<const double> h, size_t out_len);

}  // namespace melsb

#endif  // MELSB_FFT_H_
