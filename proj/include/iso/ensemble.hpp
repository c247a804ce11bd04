#pragma once

#include "iso/coherent.hpp"
#include "iso/svd_coords.hpp"

namespace iso {

// Monte Carlo harness over independent trajectories. Per-trajectory seeds are
// derived from base_seed by a counter scheme, results are stored by
// trajectory index and reduced in index order, so serial and OpenMP execution
// produce bit-identical statistics for any worker count.
struct EnsembleConfig {
    TrajectoryConfig traj;
    int n_traj = 1000;
    cmat rho;  // unit-trace initial state; empty disables physical reweighting
    std::vector<double> epsilons{0.3, 0.1, 0.03, 0.01};
    std::uint64_t base_seed = 0;
    int threads = 0;                // 0 = runtime default
    bool serial_reference = false;  // force the serial reference path
    bool track_radial = true;       // de-fold the radial branch from snapshots

    void validate(const GeneratorSet& gen) const;
};

struct TrajectoryOutcome {
    rvec a_signed;
    rvec a_folded;
    double impurity_pov = 1.0;   // impurity of K^dag K
    double impurity_post = 1.0;  // impurity of K K^dag
    double equality_dev = 0.0;
    double bound = 0.0;
    double margin = 0.0;
    bool within_bound = false;
    double weight = 1.0;
    double cos_theta = 0.0;  // outcome direction from Q_V (su2); NaN if undefined
    double log_scale = 0.0;
    bool gap_ok = false;
};

struct GuaranteeRow {
    double epsilon;
    double empirical;  // Prob(impurity < epsilon)
    double se;
    double bound;      // collapse_probability_lower_bound
    bool bound_in_01;
    bool satisfied;    // empirical >= bound whenever the bound is informative
};

struct EnsembleStats {
    int n = 0;
    RadialReport radial;
    std::vector<double> impurity_quantile_levels{0.1, 0.25, 0.5, 0.75, 0.9};
    std::vector<double> impurity_quantiles;
    double max_equality_dev = 0.0;
    std::vector<GuaranteeRow> guarantee;
    int bound_violations = 0;
    double min_margin = 0.0;
    double mean_weight = 1.0;
    double se_weight = 0.0;
    double ess = 0.0;
    double mean_cos_theta = 0.0;  // weighted
    double se_cos_theta = 0.0;
    int n_cos_theta = 0;
    std::vector<TrajectoryOutcome> outcomes;
};

EnsembleStats run_ensemble(const Irrep& ir, const EnsembleConfig& cfg);

// 1 - sqrt(2 dim(g0) / (pi gamma T)) * ln(4 (omega,lambda) / (|lambda|^2 eps)).
// For su2 this is 1 - sqrt(6/(pi gamma T)) ln(2/(j eps)).
double collapse_probability_lower_bound(const RootSystem& rs, int dim_alg, double gamma_t,
                                        double epsilon);

struct CompletenessReport {
    cmat m;              // E[e^{2 log_scale} K^dag K] / E[trace growth]
    double max_abs_dev;  // || m - 1 ||_max
    double max_se;       // largest per-entry standard error (real or imag part)
    double ess;          // effective sample size of the scalar weights
    bool heavy_tail_warning;
};

// Trace-preservation check: the reweighted ensemble mean of K^dag K must be
// the identity. Restricted to gamma*T <= 1 where the estimator variance is
// controlled.
CompletenessReport completeness_check(const Irrep& ir, const EnsembleConfig& cfg);

struct WeightedOutcome {
    double mean_weight;
    double se_weight;
    double ess;
    double mean_cos_theta;
    double se_cos_theta;
    int n_used;
};

// Physical outcome statistics for initial state rho via importance
// reweighting of the Wiener ensemble (w = Tr(rho K^dag K) / trace growth).
WeightedOutcome physical_reweight(const Irrep& ir, const EnsembleConfig& cfg, const cmat& rho);

}  // namespace iso
