#pragma once

#include <Eigen/Dense>
#include <complex>

#include "iso/errors.hpp"

namespace iso {

using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using rmat = Eigen::MatrixXd;
using rvec = Eigen::VectorXd;
using cplx = std::complex<double>;

namespace num {

// Tolerance budget for the dense kernels. Dimensions stay tiny (<= ~30), so
// near-machine accuracy is cheap and downstream statistics are not polluted
// by kernel error.
inline constexpr double kUnitarityTol = 1e-10;
inline constexpr double kExpmRelTol = 1e-12;
inline constexpr double kRankFloor = 1e-300;

void require_finite(const cmat& a, const char* what);
void require_square(const cmat& a, const char* what);
void require_same_shape(const cmat& a, const cmat& b, const char* what);

// Hilbert-Schmidt inner product (a|b) = Tr(a^dag b).
cplx hs_inner(const cmat& a, const cmat& b);

double fro_norm(const cmat& a);

// Matrix exponential of a general square matrix (Pade scaling-and-squaring).
cmat expm(const cmat& x);

// exp(h) for Hermitian h, via eigendecomposition. Much faster than the
// general path and exactly what the stochastic stepper needs.
cmat expm_hermitian(const cmat& h);

// exp(-i * angle * h) for Hermitian h.
cmat expu(const cmat& h, double angle);

// Largest singular value.
double spectral_norm(const cmat& a);

struct SvdResult {
    cmat u;            // left singular vectors, columns ordered by descending s
    rvec s;            // singular values, descending, all > 0
    cmat v;            // right singular vectors; a = u * s.asDiagonal() * v^dag
};

// Full SVD of a square matrix. Throws degenerate_spectrum_error if the
// smallest singular value falls below kRankFloor. No phase canonicalization:
// gauge-invariant quantities (projectors, singular values) are formed by the
// callers.
SvdResult svd(const cmat& k);

}  // namespace num
}  // namespace iso
