#include "iso/coherent.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace iso {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
}

void require_su2(const GeneratorSet& gen, const char* what) {
    if (gen.group != Group::su2) throw spec_error(std::string(what) + ": su2 generators required");
}

}  // namespace

cvec scs_state(const GeneratorSet& gen, double theta, double phi) {
    require_su2(gen, "scs_state");
    cvec e0 = cvec::Zero(gen.dim_rep);
    e0(0) = 1.0;  // basis is ordered m = j .. -j
    const cvec tilted = num::expu(gen.generators[1], theta) * e0;
    return num::expu(gen.generators[2], phi) * tilted;
}

cvec highest_weight_state(const GeneratorSet& gen, const RootSystem& rs) {
    cmat h = cmat::Zero(gen.dim_rep, gen.dim_rep);
    for (int k = 0; k < gen.rank(); ++k) h += rs.weyl_vector(k) * gen.csa(k);
    Eigen::SelfAdjointEigenSolver<cmat> es(h);
    const Eigen::Index d = gen.dim_rep;
    if (d > 1 && es.eigenvalues()(d - 1) - es.eigenvalues()(d - 2) < 1e-9)
        throw degenerate_spectrum_error("highest weight state is not isolated");
    return es.eigenvectors().col(d - 1);
}

cmat coherent_projector(const GeneratorSet& gen, const RootSystem& rs, const cmat& u) {
    const cvec hw = highest_weight_state(gen, rs);
    const cvec v = u * hw;
    return v * v.adjoint();
}

double impurity(const GeneratorSet& gen, const RootSystem& rs, const cmat& e) {
    num::require_square(e, "impurity");
    if (e.rows() != gen.dim_rep) throw dimension_error("impurity: operator has wrong dimension");
    const double scale = e.norm();
    if (scale <= 0.0) throw argument_error("impurity: zero operator");
    if ((e - e.adjoint()).norm() > 1e-10 * scale)
        throw argument_error("impurity: operator is not Hermitian");
    const cplx tr = e.trace();
    if (std::abs(tr) < 1e-14 * scale) throw argument_error("impurity: traceless positive operator");

    double num = 0.0;
    std::vector<cplx> comps(gen.dim_alg);
    for (int m = 0; m < gen.dim_alg; ++m) comps[m] = num::hs_inner(e, gen.generators[m]);
    for (int m = 0; m < gen.dim_alg; ++m)
        for (int n = 0; n < gen.dim_alg; ++n)
            if (gen.metric_inverse(m, n) != 0.0)
                num += gen.metric_inverse(m, n) * std::real(std::conj(comps[m]) * comps[n]);

    const double lam2 = rs.highest_weight.squaredNorm();
    if (lam2 <= 0.0) return 0.0;  // trivial representation: every state is coherent
    const double val = 1.0 - num / (std::norm(tr) * lam2);
    return std::clamp(val, 0.0, 1.0);
}

bool is_positive_operator(const cmat& e, double tol) {
    if (e.rows() != e.cols()) return false;
    if ((e - e.adjoint()).norm() > tol * std::max(1.0, e.norm())) return false;
    Eigen::SelfAdjointEigenSolver<cmat> es(e);
    return es.eigenvalues().minCoeff() >= -tol * std::max(1.0, e.norm());
}

double invariant_uncertainty(const GeneratorSet& gen, const cvec& psi) {
    if (psi.size() != gen.dim_rep) throw dimension_error("invariant_uncertainty: wrong dimension");
    const double n2 = psi.squaredNorm();
    if (n2 <= 0.0) throw argument_error("invariant_uncertainty: zero vector");
    double mean2 = 0.0;
    std::vector<double> means(gen.dim_alg);
    for (int m = 0; m < gen.dim_alg; ++m)
        means[m] = std::real(psi.dot(gen.generators[m] * psi));  // dot conjugates the lhs
    for (int m = 0; m < gen.dim_alg; ++m)
        for (int n = 0; n < gen.dim_alg; ++n)
            if (gen.metric_inverse(m, n) != 0.0) mean2 += gen.metric_inverse(m, n) * means[m] * means[n];
    return n2 * gen.casimir_eigenvalue * n2 - mean2;
}

SphereSample sphere_sample(GaussianRng& rng) {
    const double c = 2.0 * rng.uniform01() - 1.0;
    const double phi = kTwoPi * (1.0 - rng.uniform01());
    return {std::acos(std::clamp(c, -1.0, 1.0)), phi};
}

EulerAngles haar_angles(GaussianRng& rng) {
    const SphereSample s = sphere_sample(rng);
    return {s.theta, s.phi, 2.0 * kTwoPi * (1.0 - rng.uniform01())};
}

cmat haar_unitary(const GeneratorSet& gen, const EulerAngles& a) {
    require_su2(gen, "haar_unitary");
    return num::expu(gen.generators[2], a.phi) * num::expu(gen.generators[1], a.theta) *
           num::expu(gen.generators[2], a.psi);
}

cmat random_group_element(const GeneratorSet& gen, GaussianRng& rng, double scale) {
    cmat h = cmat::Zero(gen.dim_rep, gen.dim_rep);
    for (const cmat& x : gen.generators) h += scale * rng.gaussian() * x;
    return num::expu(h, 1.0);
}

ResolutionResult resolution_of_identity(const GeneratorSet& gen, int n_theta, int n_phi) {
    require_su2(gen, "resolution_of_identity");
    if (n_theta < 1 || n_phi < 1) throw argument_error("resolution_of_identity: need >= 1 node");
    const int d = gen.dim_rep;
    const double j = gen.spin;

    std::vector<double> xu, wu;
    gauss_legendre(n_theta, xu, wu);

    cmat acc = cmat::Zero(d, d);
    cvec e0 = cvec::Zero(d);
    e0(0) = 1.0;
    for (int iu = 0; iu < n_theta; ++iu) {
        const double theta = std::acos(std::clamp(xu[iu], -1.0, 1.0));
        const cvec base = num::expu(gen.generators[1], theta) * e0;
        cmat avg_phi = cmat::Zero(d, d);
        for (int ip = 0; ip < n_phi; ++ip) {
            const double phi = kTwoPi * ip / n_phi;
            cvec v(d);
            for (int m = 0; m < d; ++m)
                v(m) = std::exp(cplx(0.0, -phi * (j - m))) * base(m);  // diagonal exp(-i phi Jz)
            avg_phi += v * v.adjoint();
        }
        acc += (wu[iu] / 2.0) * (avg_phi / static_cast<double>(n_phi));
    }
    const cmat m = static_cast<double>(d) * acc;
    const bool sufficient = (2.0 * n_theta - 1.0 >= 2.0 * j) && (n_phi >= 2.0 * j + 1.0);
    return {(m - cmat::Identity(d, d)).norm(), sufficient};
}

}  // namespace iso
