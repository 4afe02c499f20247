#ifndef MELSB_HERMITIAN_H_
#define MELSB_HERMITIAN_H_

#include <span>

#include "melsb/types.h"

namespace melsb {

// Solves A X = B for Hermitian positive definite A (n x n, row-major) and
// B (n x ncols, row-major). n <= 3 uses the closed-form adjugate; larger n
// uses a Cholesky factorization. Returns false when A is numerically
// singular, leaving x untouched.
bool SolveHermitian(std::span<const Complex> a, int n,
                    std::span<const Complex> b, int ncols,
                    std::span<Complex> x);

}  // namespace melsb

#endif  // MELSB_HERMITIAN_H_
