#pragma once

#include "iso/lie_rep.hpp"
#include "iso/rng.hpp"

namespace iso {

// Spin coherent state |j, n(theta,phi)> = exp(-i phi Jz) exp(-i theta Jy) |j, m=j>.
cvec scs_state(const GeneratorSet& gen, double theta, double phi);

// Highest-weight state, identified numerically as the top eigenvector of the
// CSA element in the Weyl-vector direction (nondegenerate for any irrep).
cvec highest_weight_state(const GeneratorSet& gen, const RootSystem& rs);

// U |lambda><lambda| U^dag for a group element U given as a represented unitary.
cmat coherent_projector(const GeneratorSet& gen, const RootSystem& rs, const cmat& u);

// Scale-invariant collapse witness
//   P(E) = 1 - sum_mn (E|X_m) g^{mn} (X_n|E) / ((E|1)(1|E) |lambda|^2),
// zero exactly on coherent projectors, 1 on the maximally mixed state.
// E must be a nonzero positive operator.
double impurity(const GeneratorSet& gen, const RootSystem& rs, const cmat& e);

// Hermitian within tol and eigenvalues >= -tol.
bool is_positive_operator(const cmat& e, double tol = 1e-10);

// <psi|psi><psi|J^2|psi> - <psi|J|psi>^2, bounded below by j <psi|psi>^2
// for unit spins (Casimir minus squared mean generator vector in general).
double invariant_uncertainty(const GeneratorSet& gen, const cvec& psi);

struct SphereSample {
    double theta, phi;
};

struct EulerAngles {
    double theta, phi, psi;
};

// cos(theta) uniform on [-1,1], phi uniform on [0,2pi).
SphereSample sphere_sample(GaussianRng& rng);

// Euler coordinates of the Haar measure: sphere sample plus psi uniform on [0,4pi).
EulerAngles haar_angles(GaussianRng& rng);

// Represented unitary exp(-i phi Jz) exp(-i theta Jy) exp(-i psi Jz) (su2).
cmat haar_unitary(const GeneratorSet& gen, const EulerAngles& a);

// exp(-i sum_m c_m X_m) with c ~ N(0, scale^2), a generic represented group
// element for covariance tests on any group.
cmat random_group_element(const GeneratorSet& gen, GaussianRng& rng, double scale = 1.0);

struct ResolutionResult {
    double residual;        // || (2j+1) integral |n><n| dmu - 1 ||_F
    bool sufficient_nodes;  // quadrature covers the integrand degree
};

// Deterministic product quadrature (Gauss-Legendre in cos(theta) x uniform in
// phi) of the coherent-projector resolution of the identity, for su2.
ResolutionResult resolution_of_identity(const GeneratorSet& gen, int n_theta, int n_phi);

}  // namespace iso
