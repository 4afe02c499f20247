#include "melsb/hermitian.h"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>

namespace melsb {
namespace {

// Inverse via the adjugate; a is n x n with n in {1, 2, 3}.
bool AdjugateInverse(std::span<const Complex> a, int n, Complex* inv) {
  if (n == 1) {
    if (std::abs(a[0]) == 0.0) return false;
    inv[0] = 1.0 / a[0];
    return true;
  }
  if (n == 2) {
    const Complex det = a[0] * a[3] - a[1] * a[2];
    if (std::abs(det) == 0.0 || !std::isfinite(std::abs(det))) return false;
    inv[0] = a[3] / det;
    inv[1] = -a[1] / det;
    inv[2] = -a[2] / det;
    inv[3] = a[0] / det;
    return true;
  }
  auto m = [&](int r, int c) { return a[r * 3 + c]; };
  Complex cof[9];
  cof[0] = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  cof[1] = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
  cof[2] = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
  cof[3] = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
  cof[4] = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
  cof[5] = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
  cof[6] = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
  cof[7] = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
  cof[8] = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const Complex det = m(0, 0) * cof[0] + m(0, 1) * cof[3] + m(0, 2) * cof[6];
  if (std::abs(det) == 0.0 || !std::isfinite(std::abs(det))) return false;
  for (int i = 0; i < 9; ++i) inv[i] = cof[i] / det;
  return true;
}

}  // namespace

bool SolveHermitian(std::span<const Complex> a, int n,
                    std::span<const Complex> b, int ncols,
                    std::span<Complex> x) {
  if (n <= 0 || a.size() != static_cast<size_t>(n) * n ||
      b.size() != static_cast<size_t>(n) * ncols || x.size() != b.size())
    throw InvalidArgument("SolveHermitian: shape mismatch");
  if (n <= 3) {
    Complex inv[9];
    if (!AdjugateInverse(a, n, inv)) return false;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < ncols; ++c) {
        Complex acc = 0.0;
        for (int k = 0; k < n; ++k) acc += inv[r * n + k] * b[k * ncols + c];
        x[r * ncols + c] = acc;
      }
    return true;
  }
  using Mat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                            Eigen::RowMajor>;
  Eigen::Map<const Mat> am(a.data(), n, n);
  Eigen::Map<const Mat> bm(b.data(), n, ncols);
  Eigen::LLT<Mat> llt(am);
  if (llt.info() != Eigen::Success) return false;
  Mat xm = llt.solve(bm);
  Eigen::Map<Mat>(x.data(), n, ncols) = xm;
  return true;
}

}  // namespace melsb
