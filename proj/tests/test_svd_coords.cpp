#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "iso/coherent.hpp"
#include "iso/ensemble.hpp"
#include "iso/svd_coords.hpp"

using namespace iso;

namespace {

cmat csa_element(const GeneratorSet& gen, const rvec& a) {
    cmat h = cmat::Zero(gen.dim_rep, gen.dim_rep);
    for (int k = 0; k < gen.rank(); ++k) h += a(k) * gen.csa(k);
    return h;
}

// Scalar recursion for the su2 radial coordinate, derived directly from the
// 2x2 step map: cosh a' = cosh a cosh b + sinh a sinh b (unit z-component),
// with b = |dW|/2. Independent of the matrix pipeline.
double scalar_radial_step(double alpha, const rvec& dw) {
    const double beta = 0.5 * dw.norm();
    const double bz = dw.norm() > 0 ? dw(2) / dw.norm() : 0.0;
    const double ca = std::cosh(alpha) * std::cosh(beta) +
                      std::sinh(alpha) * std::sinh(beta) * bz;
    return std::acosh(std::max(ca, 1.0));
}

}  // namespace

TEST_CASE("decompose a diagonal radial exponential") {
    const Irrep ir = build_spin_irrep(1.0);
    const cmat k = num::expm_hermitian(csa_element(ir.gen, (rvec(1) << 1.0).finished()));
    const SvdCoords c = decompose(ir.gen, ir.roots, k);
    CHECK(c.a(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.lsq_residual < 1e-12);
    CHECK(c.gap_ok);
    cmat e0 = cmat::Zero(3, 3);
    e0(0, 0) = 1.0;
    CHECK((left_frame_projector(c) - e0).norm() < 1e-10);
    CHECK((right_frame_projector(c) - e0).norm() < 1e-10);
}

TEST_CASE("decompose the identity: fully degenerate") {
    const Irrep ir = build_spin_irrep(1.0);
    const SvdCoords c = decompose(ir.gen, ir.roots, cmat::Identity(3, 3));
    CHECK(c.a.norm() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK_FALSE(c.gap_ok);
}

TEST_CASE("construct-decompose round trip, su2") {
    GaussianRng rng(3);
    const Irrep ir = build_spin_irrep(1.0);
    for (int t = 0; t < 1000; ++t) {
        const double alpha = 0.3 + 2.7 * rng.uniform01();
        const cmat r = haar_unitary(ir.gen, haar_angles(rng));
        const cmat s = haar_unitary(ir.gen, haar_angles(rng));
        const cmat k =
            r * num::expm_hermitian(csa_element(ir.gen, (rvec(1) << alpha).finished())) *
            s.adjoint();
        const SvdCoords c = decompose(ir.gen, ir.roots, k);
        CHECK(std::abs(c.a(0) - alpha) < 1e-9);
        cvec hw = cvec::Zero(3);
        hw(0) = 1.0;
        const cvec ru = r * hw;
        CHECK((left_frame_projector(c) - ru * ru.adjoint()).norm() < 1e-9);
        const cvec sv = s * hw;
        CHECK((right_frame_projector(c) - sv * sv.adjoint()).norm() < 1e-9);
    }
}

TEST_CASE("construct-decompose round trip, su3 defining and adjoint") {
    GaussianRng rng(9);
    for (Su3Rep kind : {Su3Rep::defining, Su3Rep::adjoint}) {
        const Irrep ir = build_su3_irrep(kind);
        const cvec hw = highest_weight_state(ir.gen, ir.roots);
        for (int t = 0; t < 100; ++t) {
            // a strictly inside the positive chamber
            const rvec a = (0.2 + 1.3 * rng.uniform01()) * ir.roots.fundamental_weights[0] +
                           (0.2 + 1.3 * rng.uniform01()) * ir.roots.fundamental_weights[1];
            const cmat r = random_group_element(ir.gen, rng, 0.8);
            const cmat s = random_group_element(ir.gen, rng, 0.8);
            const cmat k = r * num::expm_hermitian(csa_element(ir.gen, a)) * s.adjoint();
            const SvdCoords c = decompose(ir.gen, ir.roots, k);
            CHECK((c.a - a).norm() < 1e-8);
            CHECK(c.lsq_residual < 1e-8);
            const cvec rv = r * hw;
            CHECK((left_frame_projector(c) - rv * rv.adjoint()).norm() < 1e-8);
        }
    }
}

TEST_CASE("reciprocal singular pairs after determinant normalization, su2") {
    const Irrep ir = build_spin_irrep(1.5);
    TrajectoryConfig cfg;
    cfg.gamma = 1.0;
    cfg.dt = 0.01;
    cfg.total_time = 6.0;
    cfg.seed = 31;
    const KrausTrajectory traj = run_trajectory(ir.gen, cfg);
    const num::SvdResult sv = num::svd(traj.k);
    const int d = ir.gen.dim_rep;
    const double logdet = sv.s.array().log().sum();
    rvec s_norm = (sv.s.array().log() - logdet / d).exp();
    for (int i = 0; i < d; ++i)
        CHECK(std::abs(s_norm(i) * s_norm(d - 1 - i) - 1.0) < 1e-8);
    // log singular values are equally spaced for su2
    const SvdCoords c = decompose(ir.gen, ir.roots, traj.k);
    CHECK(c.lsq_residual < 1e-8 * (1.0 + sv.s.array().log().matrix().norm()));
}

TEST_CASE("impurity equals between the two operator orders and obeys the decay bound") {
    const Irrep half = build_spin_irrep(0.5);
    {
        // alpha = 3: impurity sech^2(3), bound 4 e^{-6}
        const cmat k = num::expm_hermitian(csa_element(half.gen, (rvec(1) << 3.0).finished()));
        const BoundCheck bc = impurity_bound_check(half.gen, half.roots, k);
        const double expect = 1.0 - std::tanh(3.0) * std::tanh(3.0);
        CHECK(bc.impurity_pov == doctest::Approx(expect).epsilon(1e-10));
        CHECK(bc.bound == doctest::Approx(4.0 * std::exp(-6.0)).epsilon(1e-12));
        CHECK(bc.equality_dev < 1e-12);
        CHECK(bc.within_bound);
    }
    {
        // identity: bound 2/j = 4 dominates any impurity <= 1
        const BoundCheck bc = impurity_bound_check(half.gen, half.roots, cmat::Identity(2, 2));
        CHECK(bc.bound == doctest::Approx(4.0));
        CHECK(bc.within_bound);
    }
    GaussianRng rng(13);
    for (const Irrep& ir : {build_spin_irrep(1.0), build_su3_irrep(Su3Rep::defining)}) {
        TrajectoryConfig cfg;
        cfg.gamma = 1.0;
        cfg.dt = 0.01;
        cfg.total_time = 5.0;
        for (int t = 0; t < 20; ++t) {
            cfg.seed = 1000 + t;
            const KrausTrajectory traj = run_trajectory(ir.gen, cfg);
            const BoundCheck bc = impurity_bound_check(ir.gen, ir.roots, traj.k);
            CHECK(bc.equality_dev <= 1e-9);
        }
    }
}

TEST_CASE("radial branch tracking follows the nearest orbit element") {
    const RootSystem rs = weight_diagram(1, 0);
    {
        // a small-step path confined to the interior of one chamber is
        // reproduced exactly as its folded image
        RadialTracker tracker(rs);
        rvec p(2);
        p << -0.8, 0.1;  // interior of some non-positive chamber
        const rvec step = 0.004 * (rvec(2) << 0.3, -0.2).finished();
        double max_dev = 0.0;
        for (int i = 0; i <= 50; ++i) {
            const rvec q = p + double(i) * step;
            const rvec folded = to_positive_chamber(rs, q);
            const rvec tracked = tracker.update(folded);
            max_dev = std::max(max_dev, (tracked - folded).norm());
        }
        CHECK(max_dev < 1e-12);
    }
    {
        // output is always an exact Weyl image of the folded input, and
        // consecutive outputs never jump farther than the nearest image
        GaussianRng rng(77);
        RadialTracker tracker(rs);
        rvec truth = rvec::Zero(2);
        for (int i = 0; i < 400; ++i) {
            truth += 0.05 * (rvec(2) << rng.gaussian(), rng.gaussian()).finished();
            const rvec folded = to_positive_chamber(rs, truth);
            const rvec tracked = tracker.update(folded);
            bool in_orbit = false;
            for (const rmat& w : rs.weyl_elements())
                if (((w * folded).eval() - tracked).norm() < 1e-12) in_orbit = true;
            CHECK(in_orbit);
            CHECK(std::abs(tracked.norm() - folded.norm()) < 1e-12);
        }
    }
}

TEST_CASE("radial statistics bookkeeping") {
    const Irrep ir = build_spin_irrep(0.5);
    std::vector<rvec> samples;
    GaussianRng rng(8);
    const double sd = 0.7;
    for (int i = 0; i < 4000; ++i) samples.push_back((rvec(1) << sd * rng.gaussian()).finished());
    const RadialReport rep = radial_statistics(samples, ir.gen, 1.0, 4.0);
    CHECK(std::abs(rep.mean(0)) < 3.0 * rep.se_mean(0));
    CHECK(std::abs(rep.covariance(0, 0) - sd * sd) < 3.0 * rep.se_var(0));
    CHECK(rep.predicted_component_variance == doctest::Approx(4.0 / 12.0));
    CHECK(rep.predicted_folded_abs_mean ==
          doctest::Approx(std::sqrt(2.0 * 4.0 / (12.0 * M_PI))));
    CHECK_THROWS_AS(radial_statistics({samples[0]}, ir.gen, 1.0, 1.0), statistics_error);
}

TEST_CASE("engine radial law matches the scalar recursion oracle across representations") {
    // The radial coordinate is a property of the group element, not the
    // representation: spin-1/2 and spin-2 ensembles must produce the same law,
    // and both must match the independent scalar recursion driven by its own
    // Wiener draws.
    const double gamma = 1.0, dt = 0.01, total = 2.0;
    const long nsteps = std::lround(total / (3 * dt));

    const int n_oracle = 40000;
    GaussianRng orng(4242);
    double om = 0.0, om2 = 0.0, och = 0.0;
    const Irrep half = build_spin_irrep(0.5);
    for (int i = 0; i < n_oracle; ++i) {
        double alpha = 0.0;
        for (long s = 0; s < nsteps; ++s)
            alpha = scalar_radial_step(alpha, sample_wiener_step(half.gen, gamma, dt, orng));
        om += alpha;
        om2 += alpha * alpha;
        och += std::cosh(alpha);
    }
    om /= n_oracle;
    om2 /= n_oracle;
    och /= n_oracle;
    const double oracle_var = om2 - om * om;

    // exact finite-step analytic value of E[cosh alpha]
    const double analytic_cosh =
        std::pow((1.0 + gamma * dt / 4.0) * std::exp(gamma * dt / 8.0), double(nsteps));
    CHECK(std::abs(och - analytic_cosh) < 0.02 * analytic_cosh);

    for (double j : {0.5, 2.0}) {
        const Irrep ir = build_spin_irrep(j);
        EnsembleConfig cfg;
        cfg.traj.gamma = gamma;
        cfg.traj.dt = dt;
        cfg.traj.total_time = total;
        cfg.n_traj = 4000;
        cfg.base_seed = 99 + int(2 * j);
        cfg.track_radial = false;
        const EnsembleStats st = run_ensemble(ir, cfg);
        double m = 0.0, m2 = 0.0, ch = 0.0;
        for (const TrajectoryOutcome& o : st.outcomes) {
            m += o.a_folded(0);
            m2 += o.a_folded(0) * o.a_folded(0);
            ch += std::cosh(o.a_folded(0));
        }
        m /= st.n;
        m2 /= st.n;
        ch /= st.n;
        const double var = m2 - m * m;
        const double se_mean = std::sqrt(var / st.n) + std::sqrt(oracle_var / n_oracle);
        CHECK(std::abs(m - om) < 3.5 * se_mean);
        const double se_var = var * std::sqrt(2.0 / st.n) + oracle_var * std::sqrt(2.0 / n_oracle);
        CHECK(std::abs(var - oracle_var) < 3.5 * se_var);
        CHECK(std::abs(ch - analytic_cosh) < 0.05 * analytic_cosh);
    }
}

TEST_CASE("right frame freezes while the left frame wanders") {
    const Irrep ir = build_spin_irrep(1.0);
    TrajectoryConfig cfg;
    cfg.gamma = 1.0;
    cfg.dt = 0.01;
    cfg.total_time = 40.0;
    cfg.record_stride = 40;
    double dv_med = 0.0, du_med = 0.0;
    int wins = 0, valid = 0;
    for (int t = 0; t < 10; ++t) {
        cfg.seed = 500 + t;
        const KrausTrajectory traj = run_trajectory(ir.gen, cfg);
        const FreezeReport rep = freeze_metrics(traj.snapshots, ir.gen, ir.roots, 1.5);
        if (std::isnan(rep.median_late_dv) || std::isnan(rep.median_late_du)) continue;
        ++valid;
        dv_med += rep.median_late_dv;
        du_med += rep.median_late_du;
        if (rep.median_late_dv < rep.median_late_du) ++wins;
    }
    REQUIRE(valid >= 8);
    CHECK(wins >= 7);                      // V settles, U does not
    CHECK(dv_med / valid < 0.5 * du_med / valid);
}

TEST_CASE("freeze metrics demand enough resolved snapshots") {
    const Irrep ir = build_spin_irrep(1.0);
    std::vector<Snapshot> snaps{{0.0, cmat::Identity(3, 3), 0.0},
                                {1.0, cmat::Identity(3, 3), 0.0},
                                {2.0, cmat::Identity(3, 3), 0.0}};
    CHECK_THROWS_AS(freeze_metrics(snaps, ir.gen, ir.roots), statistics_error);
}

TEST_CASE("record splicing: shared early halves pin the right frame, late halves the left") {
    const Irrep ir = build_spin_irrep(1.0);
    TrajectoryConfig tc;
    tc.gamma = 1.0;
    tc.dt = 0.01;
    tc.total_time = 25.0;
    const long nsteps = std::lround(25.0 / 0.03);
    std::vector<double> dv_shared, dv_indep, du_shared;
    for (int p = 0; p < 60; ++p) {
        GaussianRng r1(GaussianRng::derive_stream(7000, 4 * p));
        GaussianRng r2(GaussianRng::derive_stream(7000, 4 * p + 1));
        GaussianRng r3(GaussianRng::derive_stream(7000, 4 * p + 2));
        GaussianRng r4(GaussianRng::derive_stream(7000, 4 * p + 3));
        KrausTrajectory a = make_trajectory(ir.gen), b = make_trajectory(ir.gen),
                        c = make_trajectory(ir.gen), e = make_trajectory(ir.gen);
        for (long s = 0; s < nsteps; ++s) {
            const rvec w1 = sample_wiener_step(ir.gen, 1.0, tc.dt, r1);
            const rvec w2 = sample_wiener_step(ir.gen, 1.0, tc.dt, r2);
            const rvec w3 = sample_wiener_step(ir.gen, 1.0, tc.dt, r3);
            const rvec w4 = sample_wiener_step(ir.gen, 1.0, tc.dt, r4);
            const bool first = s < nsteps / 2;
            apply_step(ir.gen, a, first ? w1 : w2, tc, false);
            apply_step(ir.gen, b, first ? w1 : w3, tc, false);  // shares the early half with a
            apply_step(ir.gen, c, w3, tc, false);               // fully independent of a
            apply_step(ir.gen, e, first ? w4 : w2, tc, false);  // shares the late half with a
        }
        const SvdCoords ca = decompose(ir.gen, ir.roots, a.k);
        const SvdCoords cb = decompose(ir.gen, ir.roots, b.k);
        const SvdCoords cc = decompose(ir.gen, ir.roots, c.k);
        const SvdCoords ce = decompose(ir.gen, ir.roots, e.k);
        if (!(ca.gap_ok && cb.gap_ok && cc.gap_ok && ce.gap_ok)) continue;
        dv_shared.push_back((right_frame_projector(ca) - right_frame_projector(cb)).norm());
        dv_indep.push_back((right_frame_projector(ca) - right_frame_projector(cc)).norm());
        du_shared.push_back((left_frame_projector(ca) - left_frame_projector(ce)).norm());
    }
    auto med = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };
    REQUIRE(dv_shared.size() >= 50);
    CHECK(med(dv_shared) < 0.75);
    CHECK(med(du_shared) < 0.75);
    CHECK(med(dv_indep) > 0.9);
    CHECK(med(dv_shared) < 0.65 * med(dv_indep));
    CHECK(med(du_shared) < 0.65 * med(dv_indep));
}

TEST_CASE("coordinate-system integration tracks the matrix flow radially") {
    const Irrep ir = build_spin_irrep(0.5);
    auto max_gap = [&](double dt, std::uint64_t seed) {
        TrajectoryConfig cfg;
        cfg.gamma = 1.0;
        cfg.dt = dt;
        cfg.total_time = 2.0;
        cfg.seed = seed;
        cfg.record_stride = std::max<long>(1, std::lround(0.05 / (3 * dt)));
        const KrausTrajectory traj = run_trajectory(ir.gen, cfg);

        // burn in until the gap is resolved and alpha is clear of the wall
        std::size_t i0 = 0;
        SvdCoords start;
        for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
            start = decompose(ir.gen, ir.roots, traj.snapshots[i].k);
            if (start.gap_ok && start.a(0) > 0.35) {
                i0 = i;
                break;
            }
        }
        REQUIRE(start.gap_ok);
        const std::size_t first_inc = std::lround(traj.snapshots[i0].t / (3 * dt));
        const CoordinatePath path = integrate_su2_coordinates(
            ir.gen, start, traj.snapshots[i0].t, traj.record, first_inc, cfg);

        double gap = 0.0;
        for (std::size_t i = i0 + 1; i < traj.snapshots.size(); ++i) {
            const SvdCoords c = decompose(ir.gen, ir.roots, traj.snapshots[i].k);
            const std::size_t steps_in =
                std::lround((traj.snapshots[i].t - traj.snapshots[i0].t) / (3 * dt));
            REQUIRE(steps_in < path.alpha.size());
            gap = std::max(gap, std::abs(path.alpha[steps_in] - c.a(0)));
        }
        return gap;
    };
    const double coarse = max_gap(1e-3, 321);
    CHECK(coarse < 0.15);
    const double fine = max_gap(1e-4, 321);
    CHECK(fine < 0.06);
}
