#include "iso/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace iso {

namespace {

double quantile_sorted(const std::vector<double>& sorted, double level) {
    if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double pos = level * (sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - lo;
    return (1.0 - frac) * sorted[lo] + frac * sorted[hi];
}

// One trajectory worker: stream snapshots, de-fold the radial branch, and
// summarize the endpoint.
TrajectoryOutcome run_one(const Irrep& ir, const EnsembleConfig& cfg, std::uint64_t seed,
                          double log_drift_per_step) {
    const GeneratorSet& gen = ir.gen;
    const RootSystem& rs = ir.roots;
    TrajectoryConfig tc = cfg.traj;
    tc.seed = seed;

    RadialTracker tracker(rs);
    TrajectoryOutcome out;
    out.a_signed = rvec::Zero(rs.rank);
    out.a_folded = rvec::Zero(rs.rank);

    cmat k_final;
    double ls_final = 0.0;
    long steps_final = 0;
    run_trajectory_streamed(gen, tc, [&](const KrausTrajectory& t) {
        if (cfg.track_radial && t.steps > 0) {
            const SvdCoords c = decompose(gen, rs, t.k);
            out.a_folded = c.a;
            out.a_signed = tracker.update(c.a);
        }
        k_final = t.k;
        ls_final = t.log_scale;
        steps_final = t.steps;
    });

    const SvdCoords coords = decompose(gen, rs, k_final);
    if (!cfg.track_radial) {
        out.a_folded = coords.a;
        out.a_signed = coords.a;
    }
    out.gap_ok = coords.gap_ok;
    out.log_scale = ls_final;

    const cmat pov = k_final.adjoint() * k_final;
    const cmat post = k_final * k_final.adjoint();
    out.impurity_pov = impurity(gen, rs, pov);
    out.impurity_post = impurity(gen, rs, post);
    out.equality_dev = std::abs(out.impurity_pov - out.impurity_post);
    out.bound = impurity_decay_bound(rs, coords.a);
    const double worst = std::max(out.impurity_pov, out.impurity_post);
    // 1e-12 absolute floor: at large radius the analytic margin shrinks below
    // the floating-point noise of the impurity evaluation
    out.within_bound = worst < out.bound + 1e-12;
    out.margin = out.bound - worst;

    out.cos_theta = std::numeric_limits<double>::quiet_NaN();
    if (gen.group == Group::su2 && coords.gap_ok && gen.dim_rep > 1) {
        const cmat qv = right_frame_projector(coords);
        rvec dir(3);
        for (int m = 0; m < 3; ++m) dir(m) = std::real((qv * gen.generators[m]).trace());
        const double norm = dir.norm();
        if (norm > 1e-12) out.cos_theta = dir(2) / norm;
    }

    if (cfg.rho.size() > 0) {
        const double log_norm = 2.0 * ls_final - steps_final * log_drift_per_step;
        out.weight = std::real((cfg.rho * pov).trace()) * std::exp(log_norm);
    }
    return out;
}

}  // namespace

void EnsembleConfig::validate(const GeneratorSet& gen) const {
    traj.validate();
    if (n_traj < 1) throw spec_error("n_traj must be >= 1");
    if (rho.size() > 0) {
        if (rho.rows() != gen.dim_rep || rho.cols() != gen.dim_rep)
            throw dimension_error("initial state has wrong dimension");
        if (std::abs(rho.trace() - cplx(1.0, 0.0)) > 1e-12)
            throw spec_error("initial state must have unit trace");
    }
}

double collapse_probability_lower_bound(const RootSystem& rs, int dim_alg, double gamma_t,
                                        double epsilon) {
    if (gamma_t <= 0.0) return -std::numeric_limits<double>::infinity();
    const double lam2 = rs.highest_weight.squaredNorm();
    const double lw = rs.highest_weight.dot(rs.weyl_vector);
    return 1.0 - std::sqrt(2.0 * dim_alg / (M_PI * gamma_t)) * std::log(4.0 * lw / (lam2 * epsilon));
}

EnsembleStats run_ensemble(const Irrep& ir, const EnsembleConfig& cfg) {
    cfg.validate(ir.gen);
    const double log_drift =
        log_step_trace_drift(ir.gen, cfg.traj.gamma * cfg.traj.dt);

    EnsembleStats stats;
    stats.n = cfg.n_traj;
    stats.outcomes.resize(cfg.n_traj);

    std::exception_ptr failure = nullptr;
    std::atomic<bool> failed{false};
#ifdef _OPENMP
    const int nt = cfg.serial_reference ? 1 : (cfg.threads > 0 ? cfg.threads : omp_get_max_threads());
#pragma omp parallel for schedule(dynamic, 8) num_threads(nt)
#endif
    for (int i = 0; i < cfg.n_traj; ++i) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            stats.outcomes[i] =
                run_one(ir, cfg, GaussianRng::derive_stream(cfg.base_seed, i), log_drift);
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            {
                if (!failure) failure = std::current_exception();
            }
            failed.store(true, std::memory_order_relaxed);
        }
    }
    if (failure) std::rethrow_exception(failure);

    // All reductions below run in trajectory-index order.
    std::vector<rvec> signed_a;
    signed_a.reserve(cfg.n_traj);
    std::vector<double> imps;
    imps.reserve(cfg.n_traj);
    stats.min_margin = std::numeric_limits<double>::infinity();
    for (const TrajectoryOutcome& o : stats.outcomes) {
        signed_a.push_back(o.a_signed);
        imps.push_back(o.impurity_pov);
        stats.max_equality_dev = std::max(stats.max_equality_dev, o.equality_dev);
        if (!o.within_bound) ++stats.bound_violations;
        stats.min_margin = std::min(stats.min_margin, o.margin);
    }

    if (cfg.n_traj >= 100)
        stats.radial = radial_statistics(signed_a, ir.gen, cfg.traj.gamma, cfg.traj.total_time);

    std::vector<double> sorted = imps;
    std::sort(sorted.begin(), sorted.end());
    for (double q : stats.impurity_quantile_levels)
        stats.impurity_quantiles.push_back(quantile_sorted(sorted, q));

    const double gamma_t = cfg.traj.gamma * cfg.traj.total_time;
    for (double eps : cfg.epsilons) {
        GuaranteeRow row;
        row.epsilon = eps;
        int hit = 0;
        for (double p : imps) hit += (p < eps);
        row.empirical = static_cast<double>(hit) / cfg.n_traj;
        row.se = std::sqrt(std::max(row.empirical * (1.0 - row.empirical), 1e-12) / cfg.n_traj);
        row.bound = collapse_probability_lower_bound(ir.roots, ir.gen.dim_alg, gamma_t, eps);
        row.bound_in_01 = row.bound > 0.0 && row.bound < 1.0;
        row.satisfied = !row.bound_in_01 || row.empirical >= row.bound;
        stats.guarantee.push_back(row);
    }

    double wsum = 0.0, w2sum = 0.0;
    for (const TrajectoryOutcome& o : stats.outcomes) {
        wsum += o.weight;
        w2sum += o.weight * o.weight;
    }
    stats.mean_weight = wsum / cfg.n_traj;
    stats.se_weight =
        std::sqrt(std::max(w2sum / cfg.n_traj - stats.mean_weight * stats.mean_weight, 0.0) /
                  cfg.n_traj);
    stats.ess = w2sum > 0.0 ? wsum * wsum / w2sum : 0.0;

    double cw = 0.0, cwsum = 0.0;
    int n_cos = 0;
    for (const TrajectoryOutcome& o : stats.outcomes) {
        if (std::isnan(o.cos_theta)) continue;
        cw += o.weight * o.cos_theta;
        cwsum += o.weight;
        ++n_cos;
    }
    stats.n_cos_theta = n_cos;
    if (n_cos > 1 && cwsum > 0.0) {
        stats.mean_cos_theta = cw / cwsum;
        // ratio-estimator standard error
        double acc = 0.0;
        for (const TrajectoryOutcome& o : stats.outcomes) {
            if (std::isnan(o.cos_theta)) continue;
            const double r = o.weight * (o.cos_theta - stats.mean_cos_theta);
            acc += r * r;
        }
        stats.se_cos_theta = std::sqrt(acc) / cwsum;
    } else {
        stats.mean_cos_theta = std::numeric_limits<double>::quiet_NaN();
        stats.se_cos_theta = std::numeric_limits<double>::quiet_NaN();
    }
    return stats;
}

CompletenessReport completeness_check(const Irrep& ir, const EnsembleConfig& cfg) {
    cfg.validate(ir.gen);
    const double gamma_t = cfg.traj.gamma * cfg.traj.total_time;
    if (gamma_t > 1.0 + 1e-12)
        throw spec_error("completeness_check: restricted to gamma*T <= 1, got " +
                         std::to_string(gamma_t));
    const double log_drift = log_step_trace_drift(ir.gen, cfg.traj.gamma * cfg.traj.dt);
    const int d = ir.gen.dim_rep;

    std::vector<cmat> samples(cfg.n_traj);
    std::vector<double> wts(cfg.n_traj);
    std::exception_ptr failure = nullptr;
    std::atomic<bool> failed{false};
#ifdef _OPENMP
    const int nt = cfg.serial_reference ? 1 : (cfg.threads > 0 ? cfg.threads : omp_get_max_threads());
#pragma omp parallel for schedule(dynamic, 8) num_threads(nt)
#endif
    for (int i = 0; i < cfg.n_traj; ++i) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            TrajectoryConfig tc = cfg.traj;
            tc.seed = GaussianRng::derive_stream(cfg.base_seed, i);
            cmat k;
            double ls = 0.0;
            long steps = 0;
            run_trajectory_streamed(ir.gen, tc, [&](const KrausTrajectory& t) {
                k = t.k;
                ls = t.log_scale;
                steps = t.steps;
            });
            const double w = std::exp(2.0 * ls - steps * log_drift);
            samples[i] = w * (k.adjoint() * k);
            wts[i] = w;
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            {
                if (!failure) failure = std::current_exception();
            }
            failed.store(true, std::memory_order_relaxed);
        }
    }
    if (failure) std::rethrow_exception(failure);

    cmat mean = cmat::Zero(d, d);
    for (const cmat& s : samples) mean += s;
    mean /= cfg.n_traj;

    rmat var_re = rmat::Zero(d, d), var_im = rmat::Zero(d, d);
    for (const cmat& s : samples) {
        var_re += (s - mean).real().cwiseAbs2();
        var_im += (s - mean).imag().cwiseAbs2();
    }
    var_re /= cfg.n_traj;
    var_im /= cfg.n_traj;

    CompletenessReport rep;
    rep.m = mean;
    rep.max_abs_dev = (mean - cmat::Identity(d, d)).cwiseAbs().maxCoeff();
    rep.max_se = std::sqrt(std::max(var_re.maxCoeff(), var_im.maxCoeff()) / cfg.n_traj);
    double wsum = 0.0, w2 = 0.0;
    for (double w : wts) {
        wsum += w;
        w2 += w * w;
    }
    rep.ess = w2 > 0.0 ? wsum * wsum / w2 : 0.0;
    rep.heavy_tail_warning = rep.ess < 100.0;
    return rep;
}

WeightedOutcome physical_reweight(const Irrep& ir, const EnsembleConfig& cfg, const cmat& rho) {
    EnsembleConfig with_rho = cfg;
    with_rho.rho = rho;
    const EnsembleStats stats = run_ensemble(ir, with_rho);
    return {stats.mean_weight, stats.se_weight,     stats.ess,
            stats.mean_cos_theta, stats.se_cos_theta, stats.n_cos_theta};
}

}  // namespace iso
