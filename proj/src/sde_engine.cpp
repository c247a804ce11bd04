#include "iso/sde_engine.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace iso {

void TrajectoryConfig::validate() const {
    if (!(gamma > 0.0)) throw spec_error("gamma must be positive");
    if (!(dt > 0.0)) throw spec_error("dt must be positive");
    if (!(total_time >= 0.0)) throw spec_error("total_time must be nonnegative");
    if (gamma * dt > 0.1 + 1e-12)
        throw spec_error("gamma*dt = " + std::to_string(gamma * dt) +
                         " exceeds the weak-measurement guard 0.1");
    if (record_stride < 1) throw spec_error("record_stride must be >= 1");
}

KrausTrajectory make_trajectory(const GeneratorSet& gen) {
    KrausTrajectory traj;
    traj.k = cmat::Identity(gen.dim_rep, gen.dim_rep);
    return traj;
}

rvec sample_wiener_step(const GeneratorSet& gen, double gamma, double dt, GaussianRng& rng) {
    const double sd = std::sqrt(gamma * dt);
    rvec dw(gen.dim_alg);
    for (int m = 0; m < gen.dim_alg; ++m) dw(m) = sd * rng.gaussian();
    return dw;
}

void apply_step(const GeneratorSet& gen, KrausTrajectory& traj, const rvec& dw,
                const TrajectoryConfig& cfg, bool store_record) {
    if (dw.size() != gen.dim_alg) throw dimension_error("apply_step: wrong increment dimension");

    cmat h = cmat::Zero(gen.dim_rep, gen.dim_rep);
    for (int m = 0; m < gen.dim_alg; ++m) h += (0.5 * dw(m)) * gen.generators[m];

    if (cfg.stepper == Stepper::exact_exponential) {
        traj.k = num::expm_hermitian(h) * traj.k;
    } else {
        const double drift = 0.125 * gen.casimir_eigenvalue * cfg.gamma * cfg.dt;
        h.diagonal().array() += 1.0 + drift;
        traj.k = h * traj.k;
    }

    const double scale = num::spectral_norm(traj.k);
    if (!std::isfinite(scale) || scale <= 0.0)
        throw numeric_error("apply_step: Kraus operator overflowed before renormalization");
    traj.k /= scale;
    traj.log_scale += std::log(scale);
    traj.t += gen.dim_alg * cfg.dt;
    traj.steps += 1;

    if (store_record) {
        if (traj.record.size() < cfg.max_record_increments)
            traj.record.push_back(dw);
        else
            traj.record_complete = false;
    }
}

namespace {

template <typename OnSnapshot>
KrausTrajectory run_impl(const GeneratorSet& gen, const TrajectoryConfig& cfg, bool store,
                         OnSnapshot&& on_snapshot) {
    cfg.validate();
    KrausTrajectory traj = make_trajectory(gen);
    GaussianRng rng(cfg.seed);
    on_snapshot(traj);

    const double step_time = gen.dim_alg * cfg.dt;
    const long n_steps = std::lround(std::ceil(cfg.total_time / step_time - 1e-9));
    for (long s = 0; s < n_steps; ++s) {
        const rvec dw = sample_wiener_step(gen, cfg.gamma, cfg.dt, rng);
        apply_step(gen, traj, dw, cfg, store);
        if (traj.steps % cfg.record_stride == 0 || s + 1 == n_steps) on_snapshot(traj);
    }
    return traj;
}

}  // namespace

KrausTrajectory run_trajectory(const GeneratorSet& gen, const TrajectoryConfig& cfg) {
    std::vector<Snapshot> snaps;
    KrausTrajectory traj = run_impl(gen, cfg, true, [&](const KrausTrajectory& t) {
        if (!snaps.empty() && std::abs(snaps.back().t - t.t) < 1e-15) return;
        snaps.push_back({t.t, t.k, t.log_scale});
    });
    traj.snapshots = std::move(snaps);
    return traj;
}

void run_trajectory_streamed(const GeneratorSet& gen, const TrajectoryConfig& cfg,
                             const std::function<void(const KrausTrajectory&)>& on_snapshot) {
    double last_t = -1.0;
    run_impl(gen, cfg, false, [&](const KrausTrajectory& t) {
        if (last_t >= 0.0 && std::abs(last_t - t.t) < 1e-15) return;
        last_t = t.t;
        on_snapshot(t);
    });
}

double log_step_trace_drift(const GeneratorSet& gen, double gamma_dt) {
    if (gen.group == Group::su2) {
        // E[exp(b r)] for the radius r of a 3-d isotropic Gaussian with
        // per-component variance e is (1 + b^2 e) exp(b^2 e / 2); sum over
        // the J.n spectrum m = -j..j.
        const double e = gamma_dt;
        double s = 0.0;
        for (int i = 0; i < gen.dim_rep; ++i) {
            const double m = gen.spin - i;
            s += (1.0 + m * m * e) * std::exp(0.5 * m * m * e);
        }
        return std::log(s / gen.dim_rep);
    }
    // Series: E[(1/d) Tr e^Y] = 1 + c*e/2 + (2c^2 + q) e^2/24 + O(e^3) with
    // Y = sum X_m w_m, q = (1/d) Tr sum_{mn} X_m X_n X_m X_n.
    const double c = gen.casimir_eigenvalue;
    cmat quart = cmat::Zero(gen.dim_rep, gen.dim_rep);
    for (int m = 0; m < gen.dim_alg; ++m)
        for (int n = 0; n < gen.dim_alg; ++n)
            quart += gen.generators[m] * gen.generators[n] * gen.generators[m] * gen.generators[n];
    const double q = std::real(quart.trace()) / gen.dim_rep;
    const double e = gamma_dt;
    return std::log(1.0 + 0.5 * c * e + (2.0 * c * c + q) * e * e / 24.0);
}

IsotropyReport design_isotropic_coupling(const rmat& kappa, const rmat& sigma2,
                                         double target_scale) {
    const Eigen::Index p = kappa.rows();
    const Eigen::Index n = kappa.cols();
    if (p < n) throw argument_error("design_isotropic_coupling: need at least dim(g0) meters");
    if (sigma2.rows() != p || sigma2.cols() != p)
        throw argument_error("design_isotropic_coupling: covariance shape mismatch");
    Eigen::LDLT<rmat> ldlt(sigma2);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() <= 0.0)
        throw argument_error("design_isotropic_coupling: meter covariance not positive definite");

    IsotropyReport rep;
    rep.effective_covariance = kappa.transpose() * ldlt.solve(kappa);
    rep.scale = target_scale >= 0.0 ? target_scale
                                    : rep.effective_covariance.trace() / static_cast<double>(n);
    const rmat target = rep.scale * rmat::Identity(n, n);
    rep.residual = (rep.effective_covariance - target).norm() / target.norm();
    return rep;
}

}  // namespace iso
