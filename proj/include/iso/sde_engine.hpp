#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "iso/lie_rep.hpp"
#include "iso/rng.hpp"

namespace iso {

enum class Stepper { exact_exponential, euler_maruyama };

struct TrajectoryConfig {
    double gamma = 1.0;
    double dt = 0.01;
    double total_time = 1.0;
    Stepper stepper = Stepper::exact_exponential;
    std::uint64_t seed = 0;
    int record_stride = 10;  // super-steps between snapshots
    std::size_t max_record_increments = 10'000'000;

    // gamma, dt > 0, total_time >= 0, gamma*dt <= 0.1 (weak-measurement guard).
    void validate() const;
};

struct Snapshot {
    double t;
    cmat k;
    double log_scale;
};

// Evolving Kraus operator, kept at unit spectral norm; the removed scale is
// accumulated in log_scale so the physical operator is exp(log_scale) * k.
struct KrausTrajectory {
    cmat k;
    double log_scale = 0.0;
    double t = 0.0;
    long steps = 0;
    std::vector<rvec> record;     // one increment vector per super-step
    bool record_complete = true;  // false once max_record_increments is hit
    std::vector<Snapshot> snapshots;
};

KrausTrajectory make_trajectory(const GeneratorSet& gen);

// Independent zero-mean Gaussians, variance gamma*dt, one per generator.
rvec sample_wiener_step(const GeneratorSet& gen, double gamma, double dt, GaussianRng& rng);

// One isotropic super-step. exact_exponential multiplies by
// expm(1/2 sum_m X_m dW^m) (the quadratic correction is automatic and each
// factor has unit determinant); euler_maruyama multiplies by
// 1 + 1/2 sum_m X_m dW^m + 1/8 X^2 gamma dt. Elapsed time advances by
// dim_alg * dt: the record consumes one meter duration per channel.
void apply_step(const GeneratorSet& gen, KrausTrajectory& traj, const rvec& dw,
                const TrajectoryConfig& cfg, bool store_record = true);

// Compose super-steps until t >= total_time, with snapshots at t = 0, every
// record_stride super-steps, and at the end.
KrausTrajectory run_trajectory(const GeneratorSet& gen, const TrajectoryConfig& cfg);

// Memory-lean variant: no record or snapshot storage, on_snapshot is invoked
// at the same instants instead.
void run_trajectory_streamed(const GeneratorSet& gen, const TrajectoryConfig& cfg,
                             const std::function<void(const KrausTrajectory&)>& on_snapshot);

// log E[(1/d) Tr exp(sum_m X_m dW^m)] for one super-step: the exact scalar
// growth rate of E[K^dag K], used to normalize completeness checks and
// physical weights. Closed form for su2, series through (gamma dt)^2 otherwise.
double log_step_trace_drift(const GeneratorSet& gen, double gamma_dt);

struct IsotropyReport {
    rmat effective_covariance;  // kappa^T sigma^{-2} kappa = cov(dW)
    double residual;            // ||cov - scale*g|| / ||scale*g||
    double scale;               // provided target, or fitted
};

// Checks the isotropy condition sigma^{-2}_{ab} kappa^{am} kappa^{bn}
// = scale * g^{mn} for a coupling tensor kappa (rows = meters, columns =
// generators). With target_scale < 0 the scale is fitted.
IsotropyReport design_isotropic_coupling(const rmat& kappa, const rmat& sigma2,
                                         double target_scale = -1.0);

}  // namespace iso
