#pragma once

#include "iso/lie_rep.hpp"
#include "iso/sde_engine.hpp"

namespace iso {

// Generalized singular-value coordinates K = U exp(J(a)) V^dag. The radial
// coordinate a is the canonical representative in the closed positive Weyl
// chamber; frames are exposed through the top singular-vector projectors
// (gauge invariant), never through raw phases.
struct SvdCoords {
    cmat u;
    cmat v;
    rvec a;                 // radial coordinate, positive chamber
    rvec singular_values;   // descending
    bool gap_ok = false;    // top singular value isolated beyond 1e-8 relative
    double lsq_residual = 0.0;  // || log s - (weights(a) + offset) ||_2
};

SvdCoords decompose(const GeneratorSet& gen, const RootSystem& rs, const cmat& k);

// Top singular-vector projectors u1 u1^dag / v1 v1^dag. Only meaningful when
// gap_ok; they equal the coherent projectors carried by the frames.
cmat left_frame_projector(const SvdCoords& c);
cmat right_frame_projector(const SvdCoords& c);

// (4 (lambda,omega) / |lambda|^2) * exp(-4 omega(a)) with a in the chamber.
double impurity_decay_bound(const RootSystem& rs, const rvec& a_chamber);

struct BoundCheck {
    double impurity_pov;     // impurity of K^dag K
    double impurity_post;    // impurity of K K^dag
    double equality_dev;     // |pov - post|
    double bound;
    bool within_bound;       // both impurities < bound
    double margin;           // bound - max(impurities)
};

BoundCheck impurity_bound_check(const GeneratorSet& gen, const RootSystem& rs, const cmat& k);

// De-folds chamber radial samples into a continuous signed branch by
// minimum-distance matching over the Weyl orbit of consecutive snapshots.
// Wall crossings between snapshots fold back; the drift keeps those rare.
class RadialTracker {
public:
    explicit RadialTracker(const RootSystem& rs);
    rvec update(const rvec& folded);
    void reset() { has_prev_ = false; }

private:
    std::vector<rmat> weyl_;
    rvec prev_;
    bool has_prev_ = false;
};

struct RadialReport {
    int n = 0;
    rvec mean;      // signed samples
    rmat covariance;
    rvec se_mean;
    rvec se_var;    // standard error of each variance diagonal
    double predicted_component_variance;  // gamma*T / (4 dim_alg)
    double folded_abs_mean;               // mean |a|
    double predicted_folded_abs_mean;     // folded-normal value, su2 only (else NaN)
};

RadialReport radial_statistics(const std::vector<rvec>& signed_samples, const GeneratorSet& gen,
                               double gamma, double total_time);

struct FreezePoint {
    double t;
    double d_v;        // || Q_V(t) - Q_V(T) ||_F
    double d_u;
    double alpha_norm; // |a(t)|
    bool gap_ok;
};

struct FreezeReport {
    std::vector<FreezePoint> series;
    double median_late_dv;  // over snapshots with |a| > alpha_threshold, final excluded
    double median_late_du;
    double alpha_threshold;
};

// Frame motion relative to the final snapshot: the right frame freezes once
// the radial coordinate is large, the left frame keeps wandering.
FreezeReport freeze_metrics(const std::vector<Snapshot>& snaps, const GeneratorSet& gen,
                            const RootSystem& rs, double alpha_threshold = 1.0);

// Cross-validation mode (su2): Euler-Maruyama integration of the radial and
// frame coordinate equations
//   d a    = 1/2 pi(U^-1 J_m U) dW^m
//   V^-1dV = -1/2 csch(ad_a) pibar(U^-1 J_m U) dW^m
//   U^-1dU = -1/2 coth(ad_a) pibar(U^-1 J_m U) dW^m
// driven by a stored record, for comparison against decompose() of the
// matrix flow. Pathwise agreement is O(sqrt(dt)).
struct CoordinatePath {
    std::vector<double> t;
    std::vector<double> alpha;
};

CoordinatePath integrate_su2_coordinates(const GeneratorSet& gen, const SvdCoords& start,
                                         double t0, const std::vector<rvec>& record,
                                         std::size_t first_increment, const TrajectoryConfig& cfg);

}  // namespace iso
