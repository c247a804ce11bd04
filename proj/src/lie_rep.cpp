#include "iso/lie_rep.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace iso {

namespace {

constexpr double kClosureTol = 1e-10;
constexpr double kHermTol = 1e-12;
constexpr double kCasimirTol = 1e-10;

bool nearly_equal(const rvec& a, const rvec& b, double tol) {
    return (a - b).norm() <= tol;
}

// Stable ordering for weight lists: descending height against the Weyl
// vector, then lexicographic. decompose() seeds its singular-value
// assignment from this order.
void sort_weights(std::vector<WeightEntry>& ws, const rvec& weyl_vector) {
    std::sort(ws.begin(), ws.end(), [&](const WeightEntry& a, const WeightEntry& b) {
        const double ha = weyl_vector.dot(a.mu);
        const double hb = weyl_vector.dot(b.mu);
        if (std::abs(ha - hb) > 1e-12) return ha > hb;
        for (int k = 0; k < a.mu.size(); ++k)
            if (std::abs(a.mu(k) - b.mu(k)) > 1e-12) return a.mu(k) > b.mu(k);
        return false;
    });
}

void check_generator_set(const GeneratorSet& g) {
    for (const cmat& x : g.generators) {
        if ((x - x.adjoint()).norm() > kHermTol * std::max(1.0, x.norm()))
            throw algebra_error("generator is not Hermitian");
        if (std::abs(x.trace()) > kHermTol * std::max(1.0, x.norm()))
            throw algebra_error("generator is not traceless");
    }
    cmat cas = cmat::Zero(g.dim_rep, g.dim_rep);
    for (int m = 0; m < g.dim_alg; ++m)
        for (int n = 0; n < g.dim_alg; ++n)
            if (g.metric_inverse(m, n) != 0.0)
                cas += g.metric_inverse(m, n) * g.generators[m] * g.generators[n];
    const cmat dev = cas - g.casimir_eigenvalue * cmat::Identity(g.dim_rep, g.dim_rep);
    if (dev.cwiseAbs().maxCoeff() > kCasimirTol)
        throw algebra_error("Casimir identity violated at construction");
}

// Root data of su(3) in the T = lambda/2 normalization: components on
// (T_3, T_8). All roots have unit length here.
struct Su3RootData {
    std::vector<rvec> positive, simple, fundamental;
    rvec weyl_vector;
};

Su3RootData su3_root_data() {
    Su3RootData d;
    rvec a01(2), a12(2), a02(2);
    a01 << 1.0, 0.0;
    a12 << -0.5, std::sqrt(3.0) / 2.0;
    a02 = a01 + a12;
    d.positive = {a01, a02, a12};
    d.simple = {a01, a12};
    rvec f1(2), f2(2);
    f1 << 0.5, 0.5 / std::sqrt(3.0);
    f2 << 0.0, 1.0 / std::sqrt(3.0);
    d.fundamental = {f1, f2};
    d.weyl_vector = 0.5 * (a01 + a02 + a12);
    return d;
}

RootSystem su3_root_system_shell() {
    RootSystem rs;
    rs.rank = 2;
    const Su3RootData d = su3_root_data();
    rs.positive_roots = d.positive;
    for (const rvec& a : d.positive) {
        rs.roots.push_back(a);
        rs.roots.push_back(-a);
    }
    rs.simple_roots = d.simple;
    rs.fundamental_weights = d.fundamental;
    rs.weyl_vector = d.weyl_vector;
    return rs;
}

// Convex hull membership for the 2-d weight polygon (vertices = Weyl orbit
// of the highest weight).
bool in_hull_2d(const std::vector<rvec>& vertices, const rvec& p, double tol) {
    if (vertices.size() == 1) return (p - vertices[0]).norm() <= tol;
    // Gift-wrap a hull order around the centroid.
    rvec c = rvec::Zero(2);
    for (const rvec& v : vertices) c += v;
    c /= static_cast<double>(vertices.size());
    std::vector<rvec> hull = vertices;
    std::sort(hull.begin(), hull.end(), [&](const rvec& a, const rvec& b) {
        return std::atan2(a(1) - c(1), a(0) - c(0)) < std::atan2(b(1) - c(1), b(0) - c(0));
    });
    const auto n = hull.size();
    for (std::size_t i = 0; i < n; ++i) {
        const rvec& a = hull[i];
        const rvec& b = hull[(i + 1) % n];
        const double cross = (b(0) - a(0)) * (p(1) - a(1)) - (b(1) - a(1)) * (p(0) - a(0));
        if (cross < -tol) return false;  // hull is counterclockwise
    }
    return true;
}

}  // namespace

int RootSystem::total_dimension() const {
    int n = 0;
    for (const WeightEntry& w : weights) n += w.multiplicity;
    return n;
}

bool RootSystem::is_root(const rvec& alpha, double tol) const {
    for (const rvec& r : roots)
        if (nearly_equal(r, alpha, tol)) return true;
    return false;
}

std::vector<rmat> RootSystem::weyl_elements() const {
    std::vector<rmat> gens;
    for (const rvec& a : simple_roots)
        gens.push_back(rmat::Identity(rank, rank) - 2.0 / a.squaredNorm() * (a * a.transpose()));
    std::vector<rmat> group{rmat::Identity(rank, rank)};
    bool grew = true;
    while (grew) {
        grew = false;
        for (std::size_t i = 0; i < group.size(); ++i) {
            for (const rmat& s : gens) {
                rmat w = s * group[i];
                bool known = false;
                for (const rmat& g : group)
                    if ((g - w).norm() < 1e-9) { known = true; break; }
                if (!known) {
                    group.push_back(std::move(w));
                    grew = true;
                }
            }
        }
        if (group.size() > 64) throw algebra_error("Weyl group closure did not terminate");
    }
    return group;
}

StructureConstants structure_constants(const std::vector<cmat>& generators) {
    const int n = static_cast<int>(generators.size());
    StructureConstants sc;
    sc.f.assign(n, rmat::Zero(n, n));
    sc.residual = 0.0;
    if (n == 0) return sc;

    rmat gram(n, n);
    for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s)
            gram(r, s) = std::real(num::hs_inner(generators[r], generators[s]));
    if (gram.norm() == 0.0) return sc;  // trivial representation
    Eigen::LDLT<rmat> ldlt(gram);

    const cplx mi(0.0, -1.0);
    for (int m = 0; m < n; ++m) {
        for (int nu = 0; nu < n; ++nu) {
            const cmat comm = generators[m] * generators[nu] - generators[nu] * generators[m];
            cvec b(n);
            for (int r = 0; r < n; ++r) b(r) = mi * num::hs_inner(generators[r], comm);
            const rvec fr = ldlt.solve(b.real().eval());
            cmat recon = cmat::Zero(comm.rows(), comm.cols());
            for (int r = 0; r < n; ++r) recon += cplx(0.0, fr(r)) * generators[r];
            sc.residual = std::max(sc.residual, (comm - recon).norm());
            sc.f[m].row(nu) = fr.transpose();
        }
    }
    return sc;
}

rmat killing_metric(const std::vector<cmat>& generators) {
    const int n = static_cast<int>(generators.size());
    const StructureConstants sc = structure_constants(generators);
    if (sc.residual > kClosureTol)
        throw algebra_error("generators do not close under commutation, residual " +
                            std::to_string(sc.residual));
    // ad_m has matrix elements (ad_m)_{r,nu} = i f_{m nu}^{r}.
    std::vector<cmat> ad(n, cmat::Zero(n, n));
    for (int m = 0; m < n; ++m)
        for (int nu = 0; nu < n; ++nu)
            for (int r = 0; r < n; ++r) ad[m](r, nu) = cplx(0.0, sc.f[m](nu, r));
    rmat b(n, n);
    for (int m = 0; m < n; ++m)
        for (int nu = 0; nu < n; ++nu) b(m, nu) = std::real((ad[m] * ad[nu]).trace());
    return b;
}

Irrep build_spin_irrep(double j) {
    const double twoj = 2.0 * j;
    if (j < 0 || std::abs(twoj - std::round(twoj)) > 1e-9)
        throw spec_error("spin label must be a nonnegative half-integer, got " + std::to_string(j));
    const int dim = static_cast<int>(std::lround(twoj)) + 1;

    cmat jz = cmat::Zero(dim, dim);
    cmat jplus = cmat::Zero(dim, dim);
    // Basis ordered m = j, j-1, ..., -j so the highest-weight state is index 0.
    for (int i = 0; i < dim; ++i) jz(i, i) = j - i;
    for (int i = 1; i < dim; ++i) {
        const double m = j - i;  // J_+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>
        jplus(i - 1, i) = std::sqrt(j * (j + 1) - m * (m + 1));
    }
    const cmat jminus = jplus.adjoint();
    const cplx mi(0.0, -1.0);

    Irrep ir;
    GeneratorSet& g = ir.gen;
    g.group = Group::su2;
    g.spin = j;
    g.dim_rep = dim;
    g.dim_alg = 3;
    g.generators = {0.5 * (jplus + jminus), 0.5 * mi * (jplus - jminus), jz};
    g.csa_indices = {2};
    g.metric = rmat::Identity(3, 3);
    g.metric_inverse = rmat::Identity(3, 3);
    g.casimir_eigenvalue = j * (j + 1);
    check_generator_set(g);

    RootSystem& rs = ir.roots;
    rs.rank = 1;
    rvec plus(1), minus(1);
    plus << 1.0;
    minus << -1.0;
    rs.roots = {plus, minus};
    rs.positive_roots = {plus};
    rs.simple_roots = {plus};
    rs.fundamental_weights = {0.5 * plus};
    rs.weyl_vector = 0.5 * plus;
    rs.highest_weight = j * plus;
    for (int i = 0; i < dim; ++i) {
        rvec mu(1);
        mu << j - i;
        rs.weights.push_back({mu, 1});
    }
    return ir;
}

namespace detail {

std::vector<cmat> su3_defining_generators() {
    const cplx i1(0.0, 1.0);
    std::vector<cmat> lambda(8, cmat::Zero(3, 3));
    lambda[0] << 0, 1, 0, 1, 0, 0, 0, 0, 0;
    lambda[1] << 0, -i1, 0, i1, 0, 0, 0, 0, 0;
    lambda[2] << 1, 0, 0, 0, -1, 0, 0, 0, 0;
    lambda[3] << 0, 0, 1, 0, 0, 0, 1, 0, 0;
    lambda[4] << 0, 0, -i1, 0, 0, 0, i1, 0, 0;
    lambda[5] << 0, 0, 0, 0, 0, 1, 0, 1, 0;
    lambda[6] << 0, 0, 0, 0, 0, -i1, 0, i1, 0;
    const double s3 = std::sqrt(3.0);
    lambda[7] << 1.0 / s3, 0, 0, 0, 1.0 / s3, 0, 0, 0, -2.0 / s3;
    for (cmat& l : lambda) l *= 0.5;
    return lambda;
}

}  // namespace detail

Irrep build_su3_irrep(Su3Rep kind) {
    const cplx i1(0.0, 1.0);
    const std::vector<cmat> t = detail::su3_defining_generators();

    Irrep ir;
    GeneratorSet& g = ir.gen;
    g.group = Group::su3;
    g.dim_alg = 8;
    g.csa_indices = {2, 7};
    g.metric = rmat::Identity(8, 8);
    g.metric_inverse = rmat::Identity(8, 8);

    if (kind == Su3Rep::defining) {
        g.dim_rep = 3;
        g.generators = t;
        g.casimir_eigenvalue = 4.0 / 3.0;
        ir.roots = weight_diagram(1, 0);
    } else {
        const StructureConstants sc = structure_constants(t);
        if (sc.residual > kClosureTol) throw algebra_error("su(3) structure constants failed");
        g.dim_rep = 8;
        g.generators.assign(8, cmat::Zero(8, 8));
        for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b)
                for (int c = 0; c < 8; ++c) g.generators[a](c, b) = i1 * sc.f[a](b, c);
        g.casimir_eigenvalue = 3.0;
        ir.roots = weight_diagram(1, 1);
    }
    check_generator_set(g);
    return ir;
}

long weyl_dimension_su3(int p, int q) {
    const Su3RootData d = su3_root_data();
    const rvec lambda = p * d.fundamental[0] + q * d.fundamental[1];
    double dim = 1.0;
    for (const rvec& a : d.positive) dim *= (lambda + d.weyl_vector).dot(a) / d.weyl_vector.dot(a);
    return std::lround(dim);
}

RootSystem weight_diagram(int p, int q) {
    if (p < 0 || q < 0) throw spec_error("su(3) highest-weight labels must be nonnegative");
    RootSystem rs = su3_root_system_shell();
    const rvec lambda = p * rs.fundamental_weights[0] + q * rs.fundamental_weights[1];
    rs.highest_weight = lambda;

    // Hull vertices: Weyl orbit of the highest weight.
    std::vector<rvec> orbit;
    for (const rmat& w : rs.weyl_elements()) {
        const rvec v = w * lambda;
        bool known = false;
        for (const rvec& u : orbit)
            if (nearly_equal(u, v, 1e-9)) { known = true; break; }
        if (!known) orbit.push_back(v);
    }

    // Candidate lattice mu = lambda - i*a1 - j*a2 restricted to the hull.
    const rvec a1 = rs.simple_roots[0];
    const rvec a2 = rs.simple_roots[1];
    const int span = p + q;
    std::map<std::pair<int, int>, double> mult;
    const rvec rho = rs.weyl_vector;
    const double top = (lambda + rho).squaredNorm();

    for (int height = 0; height <= 2 * span; ++height) {
        for (int i = std::max(0, height - span); i <= std::min(span, height); ++i) {
            const int jj = height - i;
            const rvec mu = lambda - i * a1 - jj * a2;
            if (!in_hull_2d(orbit, mu, 1e-9)) continue;
            if (height == 0) {
                mult[{0, 0}] = 1.0;
                continue;
            }
            // Freudenthal: ((l+w,l+w)-(m+w,m+w)) mult(m)
            //            = 2 sum_{a>0} sum_{k>=1} (m+ka, a) mult(m+ka)
            double acc = 0.0;
            const std::pair<int, int> steps[3] = {{1, 0}, {0, 1}, {1, 1}};  // a1, a2, a1+a2
            const rvec alphas[3] = {a1, a2, a1 + a2};
            for (int r = 0; r < 3; ++r) {
                for (int k = 1;; ++k) {
                    const int ii = i - k * steps[r].first;
                    const int jk = jj - k * steps[r].second;
                    if (ii < 0 || jk < 0) break;
                    const auto it = mult.find({ii, jk});
                    // weight strings are contiguous: once outside, stay outside
                    if (it == mult.end()) break;
                    acc += (mu + k * alphas[r]).dot(alphas[r]) * it->second;
                }
            }
            const double denom = top - (mu + rho).squaredNorm();
            if (denom <= 1e-12) continue;
            const double m = 2.0 * acc / denom;
            if (m > 0.5) mult[{i, jj}] = std::round(m);
        }
    }

    for (const auto& [ij, m] : mult) {
        if (m <= 0.5) continue;
        rs.weights.push_back({lambda - ij.first * a1 - ij.second * a2, static_cast<int>(m)});
    }
    sort_weights(rs.weights, rs.weyl_vector);

    const long dim = weyl_dimension_su3(p, q);
    if (rs.total_dimension() != dim)
        throw algebra_error("weight multiplicities sum to " + std::to_string(rs.total_dimension()) +
                            ", Weyl dimension formula gives " + std::to_string(dim));
    return rs;
}

rvec weyl_reflect(const RootSystem& rs, const rvec& alpha, const rvec& mu) {
    if (alpha.size() != rs.rank || mu.size() != rs.rank)
        throw argument_error("weyl_reflect: wrong vector dimension");
    if (!rs.is_root(alpha)) throw argument_error("weyl_reflect: alpha is not a root");
    return mu - 2.0 * alpha.dot(mu) / alpha.squaredNorm() * alpha;
}

rvec to_positive_chamber(const RootSystem& rs, const rvec& a) {
    rvec x = a;
    for (int iter = 0; iter < 200; ++iter) {
        bool inside = true;
        for (const rvec& s : rs.simple_roots) {
            if (s.dot(x) < -1e-14) {
                x = x - 2.0 * s.dot(x) / s.squaredNorm() * s;
                inside = false;
            }
        }
        if (inside) return x;
    }
    throw numeric_error("to_positive_chamber: reflection loop did not settle");
}

}  // namespace iso
