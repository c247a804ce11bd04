#include "iso/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace iso {
namespace num {

void require_finite(const cmat& a, const char* what) {
    if (!a.allFinite()) throw numeric_error(std::string(what) + ": non-finite entries");
}

void require_square(const cmat& a, const char* what) {
    if (a.rows() != a.cols())
        throw dimension_error(std::string(what) + ": matrix must be square, got " +
                              std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
}

void require_same_shape(const cmat& a, const cmat& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw dimension_error(std::string(what) + ": shape mismatch " + std::to_string(a.rows()) +
                              "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                              "x" + std::to_string(b.cols()));
}

cplx hs_inner(const cmat& a, const cmat& b) {
    require_same_shape(a, b, "hs_inner");
    return (a.adjoint() * b).trace();
}

double fro_norm(const cmat& a) { return a.norm(); }

cmat expm(const cmat& x) {
    require_square(x, "expm");
    require_finite(x, "expm");
    return x.exp();
}

cmat expm_hermitian(const cmat& h) {
    require_square(h, "expm_hermitian");
    Eigen::SelfAdjointEigenSolver<cmat> es(h);
    if (es.info() != Eigen::Success) throw numeric_error("expm_hermitian: eigensolver failed");
    return es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
           es.eigenvectors().adjoint();
}

cmat expu(const cmat& h, double angle) {
    require_square(h, "expu");
    Eigen::SelfAdjointEigenSolver<cmat> es(h);
    if (es.info() != Eigen::Success) throw numeric_error("expu: eigensolver failed");
    const cplx mi(0.0, -1.0);
    cvec phases(h.rows());
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        phases(i) = std::exp(mi * angle * es.eigenvalues()(i));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

double spectral_norm(const cmat& a) { return a.operatorNorm(); }

SvdResult svd(const cmat& k) {
    require_square(k, "svd");
    require_finite(k, "svd");
    Eigen::JacobiSVD<cmat> solver(k, Eigen::ComputeFullU | Eigen::ComputeFullV);
    SvdResult out{solver.matrixU(), solver.singularValues(), solver.matrixV()};
    if (out.s(out.s.size() - 1) <= kRankFloor)
        throw degenerate_spectrum_error("svd: input is numerically rank-deficient, smallest "
                                        "singular value " +
                                        std::to_string(out.s(out.s.size() - 1)));
    return out;
}

}  // namespace num
}  // namespace iso
