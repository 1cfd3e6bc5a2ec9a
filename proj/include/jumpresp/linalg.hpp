#pragma once

#include "jumpresp/types.hpp"

namespace jumpresp {

// Solves L C + C L^T = Q for C by complex Schur reduction of L
// (Bartels-Stewart). Requires every eigenvalue of L to have positive real
// part; throws NumericalError otherwise. The result is symmetrized.
Matrix solve_lyapunov(const Matrix& L, const Matrix& Q);

// exp(A t), Pade scaling and squaring.
Matrix matrix_exponential(const Matrix& A, double t = 1.0);

// Smallest real part over the spectrum of A.
double min_real_eigenvalue(const Matrix& A);

// Symmetric square root factor S with S S^T = M for a symmetric positive
// semi-definite M; slightly negative eigenvalues from rounding are clipped.
Matrix psd_factor(const Matrix& M);

}  // namespace jumpresp
