#include "iso/svd_coords.hpp"

#include "iso/coherent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace iso {

namespace {

constexpr double kGapTol = 1e-8;

double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Self-conjugate su3 weight systems (the adjoint, for one) are symmetric
// under the diagram flip across the Weyl-vector axis, so singular values
// cannot separate a from its flipped image. The cubic trace invariant of
// (1/2) log(K K^dag) breaks the tie: it flips sign under the diagram
// automorphism.
void disambiguate_su3_flip(const GeneratorSet& gen, const RootSystem& rs, const cmat& k, rvec& a) {
    rmat fw(2, 2);
    fw.col(0) = rs.fundamental_weights[0];
    fw.col(1) = rs.fundamental_weights[1];
    const rvec c = fw.colPivHouseholderQr().solve(a);
    const rvec flipped = fw * (rvec(2) << c(1), c(0)).finished();
    if ((flipped - a).norm() < 1e-12) return;

    const std::vector<cmat> tdef = detail::su3_defining_generators();
    auto cubic_of_csa = [&](const rvec& v) {
        const cmat h = v(0) * tdef[2] + v(1) * tdef[7];
        return std::real((h * h * h).trace());
    };

    Eigen::SelfAdjointEigenSolver<cmat> es(k * k.adjoint());
    const cmat m = es.eigenvectors() *
                   (0.5 * es.eigenvalues().array().log()).matrix().asDiagonal() *
                   es.eigenvectors().adjoint();
    const double ind = std::real((gen.generators[0] * gen.generators[0]).trace());
    cmat h_obs = cmat::Zero(3, 3);
    for (int i = 0; i < 8; ++i)
        h_obs += std::real((m * gen.generators[i]).trace()) / ind * tdef[i];
    const double c_obs = std::real((h_obs * h_obs * h_obs).trace());
    if (std::abs(c_obs - cubic_of_csa(flipped)) < std::abs(c_obs - cubic_of_csa(a))) a = flipped;
}

}  // namespace

SvdCoords decompose(const GeneratorSet& gen, const RootSystem& rs, const cmat& k) {
    const num::SvdResult sv = num::svd(k);
    const int d = gen.dim_rep;

    SvdCoords out;
    out.u = sv.u;
    out.v = sv.v;
    out.singular_values = sv.s;
    out.gap_ok = d >= 2 && (sv.s(0) - sv.s(1)) / sv.s(0) > kGapTol;

    const int r = rs.rank;
    out.a = rvec::Zero(r);
    if (d == 1) return out;

    // Expand the weight diagram by multiplicity; log singular values are the
    // weight functionals of a up to a common offset (the removed scale).
    std::vector<rvec> ws;
    for (const WeightEntry& w : rs.weights)
        for (int m = 0; m < w.multiplicity; ++m) ws.push_back(w.mu);
    if (static_cast<int>(ws.size()) != d)
        throw dimension_error("decompose: weight diagram does not match the representation");

    const rvec y = sv.s.array().log();

    // The assignment of sorted singular values to weights depends on a, and
    // alternating least squares with re-sorting can stall at a wrong fixed
    // point when weight heights tie (the adjoint diagram does). Start the
    // alternation from an interior ray of every Weyl chamber and keep the
    // assignment with the smallest residual.
    auto order_for = [&](const rvec& dir) {
        std::vector<int> ord(d);
        std::iota(ord.begin(), ord.end(), 0);
        std::sort(ord.begin(), ord.end(), [&](int p, int q) {
            const double vp = ws[p].dot(dir);
            const double vq = ws[q].dot(dir);
            if (std::abs(vp - vq) > 1e-14) return vp > vq;
            return p < q;
        });
        return ord;
    };

    std::vector<rvec> dirs;
    if (r == 1) {
        dirs.push_back((rvec(1) << 1.0).finished());
        dirs.push_back((rvec(1) << -1.0).finished());
    } else {
        std::vector<rvec> rays;
        const rvec f1 = rs.fundamental_weights[0].normalized();
        const rvec f2 = rs.fundamental_weights[1].normalized();
        rays.push_back((f1 + f2).normalized());
        rays.push_back((0.92 * f1 + 0.08 * f2).normalized());
        rays.push_back((0.08 * f1 + 0.92 * f2).normalized());
        for (const rmat& w : rs.weyl_elements())
            for (const rvec& ray : rays) dirs.push_back(w * ray);
    }

    double best_residual = std::numeric_limits<double>::infinity();
    rvec best_a = rvec::Zero(r);
    std::vector<std::vector<int>> tried;
    rmat design(d, r + 1);
    for (const rvec& dir : dirs) {
        std::vector<int> order = order_for(dir);
        if (std::find(tried.begin(), tried.end(), order) != tried.end()) continue;
        tried.push_back(order);
        rvec sol;
        for (int iter = 0; iter < 32; ++iter) {
            for (int i = 0; i < d; ++i) {
                design.block(i, 0, 1, r) = ws[order[i]].transpose();
                design(i, r) = 1.0;
            }
            sol = design.colPivHouseholderQr().solve(y);
            std::vector<int> next = order_for(sol.head(r));
            if (next == order) break;
            order = next;
        }
        for (int i = 0; i < d; ++i) {
            design.block(i, 0, 1, r) = ws[order[i]].transpose();
            design(i, r) = 1.0;
        }
        const double residual = (y - design * sol).norm();
        if (residual < best_residual) {
            best_residual = residual;
            best_a = sol.head(r);
        }
        if (best_residual < 1e-12 * (1.0 + y.norm())) break;
    }
    out.lsq_residual = best_residual;
    out.a = to_positive_chamber(rs, best_a);
    if (gen.group == Group::su3) disambiguate_su3_flip(gen, rs, k, out.a);
    return out;
}

cmat left_frame_projector(const SvdCoords& c) {
    const cvec u1 = c.u.col(0);
    return u1 * u1.adjoint();
}

cmat right_frame_projector(const SvdCoords& c) {
    const cvec v1 = c.v.col(0);
    return v1 * v1.adjoint();
}

double impurity_decay_bound(const RootSystem& rs, const rvec& a_chamber) {
    const double lam2 = rs.highest_weight.squaredNorm();
    const double lw = rs.highest_weight.dot(rs.weyl_vector);
    return 4.0 * lw / lam2 * std::exp(-4.0 * rs.weyl_vector.dot(a_chamber));
}

BoundCheck impurity_bound_check(const GeneratorSet& gen, const RootSystem& rs, const cmat& k) {
    const SvdCoords coords = decompose(gen, rs, k);
    BoundCheck bc;
    bc.impurity_pov = impurity(gen, rs, (k.adjoint() * k).eval());
    bc.impurity_post = impurity(gen, rs, (k * k.adjoint()).eval());
    bc.equality_dev = std::abs(bc.impurity_pov - bc.impurity_post);
    bc.bound = impurity_decay_bound(rs, coords.a);
    const double worst = std::max(bc.impurity_pov, bc.impurity_post);
    // same floating-point floor as the ensemble bookkeeping
    bc.within_bound = worst < bc.bound + 1e-12;
    bc.margin = bc.bound - worst;
    return bc;
}

RadialTracker::RadialTracker(const RootSystem& rs) : weyl_(rs.weyl_elements()) {}

rvec RadialTracker::update(const rvec& folded) {
    if (!has_prev_) {
        prev_ = folded;
        has_prev_ = true;
        return folded;
    }
    // Nearest orbit element to the previous value. For a diffusive path the
    // current position is the best predictor of the next one; transversal
    // wall crossings between snapshots are folded back, which is the stated
    // limitation of branch reconstruction from chamber data.
    double best = std::numeric_limits<double>::infinity();
    rvec pick = folded;
    for (const rmat& w : weyl_) {
        const rvec cand = w * folded;
        const double dist = (cand - prev_).norm();
        if (dist < best) {
            best = dist;
            pick = cand;
        }
    }
    prev_ = pick;
    return pick;
}

RadialReport radial_statistics(const std::vector<rvec>& signed_samples, const GeneratorSet& gen,
                               double gamma, double total_time) {
    const int n = static_cast<int>(signed_samples.size());
    if (n < 100) throw statistics_error("radial_statistics: need at least 100 samples, got " +
                                        std::to_string(n));
    const int r = static_cast<int>(signed_samples.front().size());

    RadialReport rep;
    rep.n = n;
    rep.mean = rvec::Zero(r);
    for (const rvec& s : signed_samples) rep.mean += s;
    rep.mean /= n;

    rep.covariance = rmat::Zero(r, r);
    rvec m4 = rvec::Zero(r);
    double abs_acc = 0.0;
    for (const rvec& s : signed_samples) {
        const rvec d = s - rep.mean;
        rep.covariance += d * d.transpose();
        m4 += d.array().pow(4).matrix();
        abs_acc += s.norm();
    }
    rep.covariance /= (n - 1);
    m4 /= n;

    rep.se_mean = (rep.covariance.diagonal() / n).array().sqrt();
    rep.se_var = ((m4 - rep.covariance.diagonal().array().square().matrix()) / n)
                     .cwiseMax(0.0)
                     .array()
                     .sqrt();
    rep.predicted_component_variance = gamma * total_time / (4.0 * gen.dim_alg);
    rep.folded_abs_mean = abs_acc / n;
    rep.predicted_folded_abs_mean =
        gen.group == Group::su2
            ? std::sqrt(2.0 * gamma * total_time / (12.0 * M_PI))
            : std::numeric_limits<double>::quiet_NaN();
    return rep;
}

FreezeReport freeze_metrics(const std::vector<Snapshot>& snaps, const GeneratorSet& gen,
                            const RootSystem& rs, double alpha_threshold) {
    std::vector<SvdCoords> coords;
    coords.reserve(snaps.size());
    int n_ok = 0;
    for (const Snapshot& s : snaps) {
        coords.push_back(decompose(gen, rs, s.k));
        if (coords.back().gap_ok) ++n_ok;
    }
    if (n_ok < 3) throw statistics_error("freeze_metrics: need >= 3 snapshots with a resolved gap");
    if (coords.empty() || !coords.back().gap_ok)
        throw statistics_error("freeze_metrics: final snapshot has a degenerate top singular value");

    const cmat qv_ref = right_frame_projector(coords.back());
    const cmat qu_ref = left_frame_projector(coords.back());

    FreezeReport rep;
    rep.alpha_threshold = alpha_threshold;
    std::vector<double> late_dv, late_du;
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        FreezePoint p;
        p.t = snaps[i].t;
        p.gap_ok = coords[i].gap_ok;
        p.alpha_norm = coords[i].a.norm();
        if (coords[i].gap_ok) {
            p.d_v = (right_frame_projector(coords[i]) - qv_ref).norm();
            p.d_u = (left_frame_projector(coords[i]) - qu_ref).norm();
            if (i + 1 < snaps.size() && p.alpha_norm > alpha_threshold) {
                late_dv.push_back(p.d_v);
                late_du.push_back(p.d_u);
            }
        } else {
            p.d_v = p.d_u = std::numeric_limits<double>::quiet_NaN();
        }
        rep.series.push_back(p);
    }
    rep.median_late_dv = median_of(late_dv);
    rep.median_late_du = median_of(late_du);
    return rep;
}

CoordinatePath integrate_su2_coordinates(const GeneratorSet& gen, const SvdCoords& start,
                                         double t0, const std::vector<rvec>& record,
                                         std::size_t first_increment,
                                         const TrajectoryConfig& cfg) {
    if (gen.group != Group::su2) throw spec_error("coordinate integration is su2 only");
    if (gen.dim_rep != 2)
        throw spec_error("coordinate integration runs on the two-dimensional representation, "
                         "where numerical SVD frames carry only a global phase");
    if (!start.gap_ok) throw argument_error("coordinate integration needs a resolved gap");

    const cmat& jx = gen.generators[0];
    const cmat& jy = gen.generators[1];
    const cmat& jz = gen.generators[2];
    const cmat jplus = jx + cplx(0.0, 1.0) * jy;
    const cmat jminus = jplus.adjoint();
    const double trn = std::real((jz * jz).trace());

    cmat u = start.u;
    double alpha = start.a(0);
    double t = t0;

    CoordinatePath path;
    path.t.push_back(t);
    path.alpha.push_back(alpha);

    for (std::size_t s = first_increment; s < record.size(); ++s) {
        if (std::abs(alpha) < 1e-4)
            throw numeric_error("coordinate integration hit the chamber wall");
        const rvec& dw = record[s];
        rvec bx(3), by(3), bz(3);
        for (int m = 0; m < 3; ++m) {
            const cmat y = u.adjoint() * gen.generators[m] * u;
            bx(m) = std::real((y * jx).trace()) / trn;
            by(m) = std::real((y * jy).trace()) / trn;
            bz(m) = std::real((y * jz).trace()) / trn;
        }
        const double coth = std::cosh(alpha) / std::sinh(alpha);
        // Ito form of the radial equation: the linear increment plus the
        // second-order recomposition drift (gamma dt / 4) coth(alpha), which
        // the frame-radial cross terms generate.
        const double dalpha = 0.5 * bz.dot(dw) + 0.25 * cfg.gamma * cfg.dt * coth;
        const cplx beta_plus = 0.5 * cplx(bx.dot(dw), -by.dot(dw));
        const cmat w = beta_plus * jplus - std::conj(beta_plus) * jminus;  // anti-Hermitian
        // U^-1 dU = i dpsi = -1/2 coth(ad_a) pibar(...); exponentiate to stay unitary
        const cmat g = -0.5 * coth * w;
        u = u * num::expu((cplx(0.0, 1.0) * g).eval(), 1.0);
        alpha += dalpha;
        t += gen.dim_alg * cfg.dt;
        path.t.push_back(t);
        path.alpha.push_back(alpha);
    }
    return path;
}

}  // namespace iso
