#pragma once

#include <vector>

#include "iso/numerics.hpp"

namespace iso {

enum class Group { su2, su3 };
enum class Su3Rep { defining, adjoint };

// Hermitian generator basis of a represented compact Lie algebra, plus the
// metric used for contractions. The basis is chosen so that the invariant
// metric is the identity: the Killing form of each standard basis here is a
// uniform multiple of delta, and that constant is absorbed into the metric
// normalization (the spin triple J_x, J_y, J_z is itself the orthonormal
// basis, likewise the su(3) basis T_a = lambda_a / 2).
struct GeneratorSet {
    Group group = Group::su2;
    double spin = 0.0;  // su2 label; unused for su3
    int dim_rep = 0;    // Hilbert-space dimension
    int dim_alg = 0;    // 3 for su2, 8 for su3
    std::vector<cmat> generators;  // Hermitian, traceless
    std::vector<int> csa_indices;  // indices of the Cartan subalgebra basis
    rmat metric;                   // identity in the normalized convention
    rmat metric_inverse;
    double casimir_eigenvalue = 0.0;  // sum_mn g^{mn} X_m X_n = c * 1

    int rank() const { return static_cast<int>(csa_indices.size()); }
    const cmat& csa(int k) const { return generators[csa_indices[k]]; }
};

struct WeightEntry {
    rvec mu;           // weight as components on the CSA basis
    int multiplicity;  // > 0
};

// Roots, weights and Weyl data of an irrep, all as vectors in R^rank with the
// Euclidean inner product of the normalized metric.
struct RootSystem {
    int rank = 0;
    std::vector<rvec> roots;            // closed under negation
    std::vector<rvec> positive_roots;   // exactly half of roots
    std::vector<rvec> simple_roots;
    std::vector<rvec> fundamental_weights;
    rvec weyl_vector;                   // half-sum of positive roots
    rvec highest_weight;
    std::vector<WeightEntry> weights;   // sorted by descending weyl_vector height

    int total_dimension() const;
    bool is_root(const rvec& alpha, double tol = 1e-9) const;
    // Weyl group as orthogonal matrices on weight space (2 elements for su2,
    // 6 for su3), generated from the simple reflections.
    std::vector<rmat> weyl_elements() const;
};

struct Irrep {
    GeneratorSet gen;
    RootSystem roots;
};

// Structure constants of a Hermitian basis, [X_m, X_n] = i f_{mn}^{r} X_r,
// recovered by least squares against the trace Gram matrix.
struct StructureConstants {
    std::vector<rmat> f;  // f[m](n, r) = f_{mn}^{r}
    double residual;      // worst reconstruction error over all pairs
};

StructureConstants structure_constants(const std::vector<cmat>& generators);

// Restricted Killing form B_{mn} = Tr(ad_m ad_n), positive definite for a
// Hermitian basis of a compact form. Throws algebra_error if the generators
// do not close under commutation.
rmat killing_metric(const std::vector<cmat>& generators);

// Spin-j irrep: J_z diagonal with entries j..-j, J_+/- ladder action
// sqrt(j(j+1) - m(m+-1)), generators ordered (J_x, J_y, J_z), Casimir j(j+1).
Irrep build_spin_irrep(double j);

// su(3) defining (T_a = lambda_a / 2) or adjoint (built from the structure
// constants) representation, with the diagonal CSA and the standard choice of
// positive roots.
Irrep build_su3_irrep(Su3Rep kind);

// Abstract su(3) weight diagram for highest weight p*phi1 + q*phi2, with
// multiplicities from Freudenthal recursion, cross-checked against the Weyl
// dimension formula. Diagram only: no matrices are constructed.
RootSystem weight_diagram(int p, int q);

// Dimension of the su(3) irrep (p,q) via the Weyl dimension formula
// prod_{a>0} (lambda+w, a)/(w, a).
long weyl_dimension_su3(int p, int q);

// W_alpha(mu) = mu - 2 (alpha,mu)/(alpha,alpha) alpha. alpha must be a root.
rvec weyl_reflect(const RootSystem& rs, const rvec& alpha, const rvec& mu);

namespace detail {
// T_a = lambda_a / 2 (Hermitian, traceless, CSA at indices 2 and 7).
std::vector<cmat> su3_defining_generators();
}  // namespace detail

// Canonical representative of a in the closed positive Weyl chamber,
// obtained by simple-root reflections.
rvec to_positive_chamber(const RootSystem& rs, const rvec& a);

}  // namespace iso
