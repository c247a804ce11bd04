// Command-line driver: trajectory/ensemble simulation, invariant verification,
// diagram emission, and completeness checks, with machine-readable JSON
// summaries. All randomness flows from --seed; per-trajectory streams are
// derived by a counter scheme, so results are identical for any --threads.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "iso/coherent.hpp"
#include "iso/diagram.hpp"
#include "iso/ensemble.hpp"

using json = nlohmann::ordered_json;
using namespace iso;

namespace {

constexpr int kSchemaVersion = 1;

struct RunConfig {
    std::string group = "su2";
    double j = 0.5;
    std::string rep = "defining";
    int p = 1, q = 0;
    double gamma = 1.0;
    double dt = 0.01;
    double T = -1.0;       // resolved below
    double gammaT = -1.0;  // convenience: T = gammaT / gamma
    int ntraj = 1000;
    std::uint64_t seed = 1;
    std::vector<double> eps{0.3, 0.1, 0.03, 0.01};
    std::string rho = "highest_weight";
    std::string out = ".";
    int threads = 0;
    int stride = 10;
    std::string stepper = "exact";
    std::string kind = "weights";
    std::string format = "both";
    std::string coupling_file;
    std::string config_file;
    bool serial = false;
    bool with_completeness = false;
};

// Config precedence: CLI flags override config-file values override defaults.
void apply_config_file(CLI::App& app, RunConfig& cfg) {
    if (cfg.config_file.empty()) return;
    std::ifstream in(cfg.config_file);
    if (!in) throw argument_error("cannot open config file " + cfg.config_file);
    json doc = json::parse(in);

    auto take = [&](const char* flag, auto& field) {
        const CLI::Option* opt = app.get_option_no_throw(flag);
        const char* key = flag + 2;  // strip leading "--"
        if (doc.contains(key) && (opt == nullptr || opt->count() == 0))
            field = doc[key].get<std::decay_t<decltype(field)>>();
    };
    take("--group", cfg.group);
    take("--j", cfg.j);
    take("--rep", cfg.rep);
    take("--p", cfg.p);
    take("--q", cfg.q);
    take("--gamma", cfg.gamma);
    take("--dt", cfg.dt);
    take("--T", cfg.T);
    take("--gammaT", cfg.gammaT);
    take("--ntraj", cfg.ntraj);
    take("--seed", cfg.seed);
    take("--eps", cfg.eps);
    take("--rho", cfg.rho);
    take("--out", cfg.out);
    take("--threads", cfg.threads);
    take("--stride", cfg.stride);
    take("--stepper", cfg.stepper);
}

void resolve(RunConfig& cfg) {
    if (cfg.threads == 0) {
        if (const char* env = std::getenv("ISO_COLLAPSE_THREADS")) cfg.threads = std::atoi(env);
    }
    if (cfg.gammaT >= 0.0) cfg.T = cfg.gammaT / cfg.gamma;
    if (cfg.T < 0.0) cfg.T = 4.0 / cfg.gamma;
}

Irrep build_irrep(const RunConfig& cfg) {
    if (cfg.group == "su2") return build_spin_irrep(cfg.j);
    if (cfg.group == "su3") {
        if (cfg.rep == "defining") return build_su3_irrep(Su3Rep::defining);
        if (cfg.rep == "adjoint") return build_su3_irrep(Su3Rep::adjoint);
        throw spec_error("unknown su3 representation '" + cfg.rep + "'");
    }
    throw spec_error("unknown group '" + cfg.group + "'");
}

EnsembleConfig ensemble_config(const RunConfig& cfg, const Irrep& ir) {
    EnsembleConfig ec;
    ec.traj.gamma = cfg.gamma;
    ec.traj.dt = cfg.dt;
    ec.traj.total_time = cfg.T;
    ec.traj.record_stride = cfg.stride;
    ec.traj.stepper = cfg.stepper == "euler" ? Stepper::euler_maruyama : Stepper::exact_exponential;
    ec.n_traj = cfg.ntraj;
    ec.base_seed = cfg.seed;
    ec.threads = cfg.threads;
    ec.serial_reference = cfg.serial;
    ec.epsilons = cfg.eps;
    if (cfg.rho == "highest_weight") {
        const cvec hw = highest_weight_state(ir.gen, ir.roots);
        ec.rho = hw * hw.adjoint();
    } else if (cfg.rho == "maximally_mixed") {
        ec.rho = cmat::Identity(ir.gen.dim_rep, ir.gen.dim_rep) / double(ir.gen.dim_rep);
    } else if (cfg.rho != "none") {
        throw spec_error("unknown rho selection '" + cfg.rho + "'");
    }
    return ec;
}

json config_json(const RunConfig& cfg) {
    json c;
    c["group"] = cfg.group;
    if (cfg.group == "su2")
        c["j"] = cfg.j;
    else
        c["rep"] = cfg.rep;
    c["gamma"] = cfg.gamma;
    c["dt"] = cfg.dt;
    c["T"] = cfg.T;
    c["ntraj"] = cfg.ntraj;
    c["seed"] = cfg.seed;
    c["eps"] = cfg.eps;
    c["rho"] = cfg.rho;
    c["threads"] = cfg.threads;
    c["stride"] = cfg.stride;
    c["stepper"] = cfg.stepper;
    return c;
}

struct Assertion {
    std::string name;
    bool pass;
    double measured;
    double threshold;
    bool hard;
};

json assertions_json(const std::vector<Assertion>& as, bool& all_hard_pass) {
    json arr = json::array();
    all_hard_pass = true;
    for (const Assertion& a : as) {
        arr.push_back({{"name", a.name},
                       {"pass", a.pass},
                       {"measured", a.measured},
                       {"threshold", a.threshold},
                       {"hard", a.hard}});
        if (a.hard && !a.pass) all_hard_pass = false;
    }
    return arr;
}

void write_json(const std::string& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw argument_error("cannot open " + path + " for writing");
    out << doc.dump(2) << "\n";
}

int cmd_simulate(const RunConfig& cfg) {
    const Irrep ir = build_irrep(cfg);
    EnsembleConfig ec = ensemble_config(cfg, ir);
    const EnsembleStats stats = run_ensemble(ir, ec);
    const double gamma_t = cfg.gamma * cfg.T;

    std::filesystem::create_directories(cfg.out);

    // representative trajectory time series (trajectory 0's stream)
    {
        TrajectoryConfig tc = ec.traj;
        tc.seed = GaussianRng::derive_stream(ec.base_seed, 0);
        const KrausTrajectory traj = run_trajectory(ir.gen, tc);
        const TrajectorySeries series = trajectory_series(traj.snapshots, ir.gen, ir.roots);
        emit_trajectory_csv(series, cfg.out + "/trajectory0.csv");
    }

    json results;
    if (stats.radial.n > 0) {
        json rad;
        rad["n"] = stats.radial.n;
        rad["mean"] = std::vector<double>(stats.radial.mean.data(),
                                          stats.radial.mean.data() + stats.radial.mean.size());
        std::vector<double> vars, se;
        for (int k = 0; k < stats.radial.covariance.rows(); ++k) {
            vars.push_back(stats.radial.covariance(k, k));
            se.push_back(stats.radial.se_var(k));
        }
        rad["variance"] = vars;
        rad["variance_se"] = se;
        rad["predicted_component_variance"] = stats.radial.predicted_component_variance;
        rad["folded_abs_mean"] = stats.radial.folded_abs_mean;
        rad["predicted_folded_abs_mean"] = stats.radial.predicted_folded_abs_mean;
        results["radial"] = rad;
    }
    {
        json iq;
        for (std::size_t i = 0; i < stats.impurity_quantiles.size(); ++i)
            iq[std::to_string(stats.impurity_quantile_levels[i])] = stats.impurity_quantiles[i];
        results["impurity_quantiles"] = iq;
    }
    {
        json rows = json::array();
        for (const GuaranteeRow& r : stats.guarantee)
            rows.push_back({{"gammaT", gamma_t},
                            {"eps", r.epsilon},
                            {"empirical", r.empirical},
                            {"se", r.se},
                            {"bound", r.bound},
                            {"bound_informative", r.bound_in_01},
                            {"satisfied", r.satisfied}});
        results["guarantee"] = rows;
    }
    results["bound_violations"] = stats.bound_violations;
    results["min_bound_margin"] = stats.min_margin;
    if (ec.rho.size() > 0) {
        results["mean_weight"] = stats.mean_weight;
        results["se_weight"] = stats.se_weight;
        results["effective_sample_size"] = stats.ess;
        results["weighted_mean_cos_theta"] = stats.mean_cos_theta;
        results["se_cos_theta"] = stats.se_cos_theta;
    }

    std::vector<Assertion> as;
    as.push_back({"impurity_equality_max_dev", stats.max_equality_dev <= 1e-9,
                  stats.max_equality_dev, 1e-9, true});
    double qmin = 0.0, qmax = 0.0;
    if (!stats.impurity_quantiles.empty()) {
        qmin = *std::min_element(stats.impurity_quantiles.begin(), stats.impurity_quantiles.end());
        qmax = *std::max_element(stats.impurity_quantiles.begin(), stats.impurity_quantiles.end());
    }
    as.push_back({"impurity_in_unit_interval", qmin >= 0.0 && qmax <= 1.0, qmax, 1.0, true});
    for (const GuaranteeRow& r : stats.guarantee)
        if (r.bound_in_01)
            as.push_back({"guarantee_eps_" + std::to_string(r.epsilon), r.satisfied, r.empirical,
                          r.bound, true});
    // The decay-bound margin is a theorem only for the two-dimensional irrep;
    // elsewhere it is reported, not gated.
    const bool bound_hard = cfg.group == "su2" && std::abs(cfg.j - 0.5) < 1e-12;
    as.push_back({"impurity_decay_bound_violations", stats.bound_violations == 0,
                  double(stats.bound_violations), 0.0, bound_hard});
    if (ec.rho.size() > 0) {
        const bool wpass = std::abs(stats.mean_weight - 1.0) <= 3.0 * stats.se_weight;
        as.push_back({"mean_weight_unit", wpass, stats.mean_weight, 3.0 * stats.se_weight, true});
    }
    if (cfg.with_completeness && gamma_t <= 1.0) {
        const CompletenessReport rep = completeness_check(ir, ec);
        results["completeness_max_dev"] = rep.max_abs_dev;
        results["completeness_max_se"] = rep.max_se;
        results["completeness_ess"] = rep.ess;
        as.push_back({"completeness_residual", rep.max_abs_dev < 3.0 * rep.max_se,
                      rep.max_abs_dev, 3.0 * rep.max_se, true});
    }

    bool ok = true;
    json summary;
    summary["schema_version"] = kSchemaVersion;
    summary["config"] = config_json(cfg);
    summary["results"] = results;
    summary["assertions"] = assertions_json(as, ok);
    write_json(cfg.out + "/summary.json", summary);
    std::cout << summary.dump(2) << "\n";
    return ok ? 0 : 1;
}

int cmd_verify(const RunConfig& cfg) {
    const Irrep ir = build_irrep(cfg);
    std::vector<Assertion> as;

    {  // Casimir identity
        cmat cas = cmat::Zero(ir.gen.dim_rep, ir.gen.dim_rep);
        for (int m = 0; m < ir.gen.dim_alg; ++m) cas += ir.gen.generators[m] * ir.gen.generators[m];
        const double dev = (cas - ir.gen.casimir_eigenvalue *
                                      cmat::Identity(ir.gen.dim_rep, ir.gen.dim_rep))
                               .cwiseAbs()
                               .maxCoeff();
        as.push_back({"casimir_identity", dev < 1e-10, dev, 1e-10, true});
    }
    {  // commutator closure
        const StructureConstants sc = structure_constants(ir.gen.generators);
        as.push_back({"commutation_closure", sc.residual < 1e-10, sc.residual, 1e-10, true});
    }
    if (cfg.group == "su2" && ir.gen.dim_rep > 1) {
        const cmat& jx = ir.gen.generators[0];
        const cmat& jy = ir.gen.generators[1];
        const cmat& jz = ir.gen.generators[2];
        const cmat jp = jx + cplx(0, 1) * jy;
        const double ladder_dev = ((jz * jp - jp * jz) - jp).norm();
        as.push_back({"ladder_root", ladder_dev < 1e-10, ladder_dev, 1e-10, true});
        const cmat w = num::expu(jy, M_PI);
        const double refl = (w * jz * w.adjoint() + jz).norm();
        as.push_back({"weight_reflection", refl < 1e-10, refl, 1e-10, true});
        const int n_theta = std::max(8, int(cfg.j) + 2);
        const int n_phi = std::max(8, int(4 * cfg.j) + 3);
        const ResolutionResult rr = resolution_of_identity(ir.gen, n_theta, n_phi);
        as.push_back({"povm_resolution", rr.residual < 1e-10 && rr.sufficient_nodes, rr.residual,
                      1e-10, true});
    }
    {  // determinant accounting over 1000 exact steps. Keep the singular-value
       // dynamic range inside double precision: the largest weight norm sets
       // how far the radial coordinate may safely grow.
        double r_max = 0.0;
        for (const auto& w : ir.roots.weights) r_max = std::max(r_max, w.mu.norm());
        const double a_cap = 10.0 / std::max(1.0, 2.0 * r_max);
        const double y = (-3.0 + std::sqrt(9.0 + 4.0 * a_cap)) / 2.0;  // drift + 3 sd budget
        const double gamma_total = std::min(30.0, 12.0 * y * y);
        TrajectoryConfig tc;
        tc.gamma = cfg.gamma;
        tc.dt = gamma_total / (cfg.gamma * 1000.0 * ir.gen.dim_alg);
        tc.total_time = 1000.0 * ir.gen.dim_alg * tc.dt;
        tc.seed = cfg.seed;
        tc.record_stride = 1000000;
        const KrausTrajectory traj = run_trajectory(ir.gen, tc);
        const num::SvdResult sv = num::svd(traj.k);
        const double logdet = sv.s.array().log().sum();
        const double dev = std::abs(logdet + ir.gen.dim_rep * traj.log_scale);
        as.push_back({"determinant_accounting", dev < 1e-8, dev, 1e-8, true});
    }
    {  // stepper consistency: pathwise gap shrinks roughly linearly in dt
        const Irrep half = build_spin_irrep(0.5);
        std::vector<double> dts{1e-2, 1e-3, 1e-4}, slopes;
        for (int rep = 0; rep < 7; ++rep) {
            std::vector<double> gaps;
            for (double dt : dts) {
                TrajectoryConfig te, tm;
                te.gamma = tm.gamma = 1.0;
                te.dt = tm.dt = dt;
                te.total_time = tm.total_time = 3.0;
                tm.stepper = Stepper::euler_maruyama;
                GaussianRng rng(cfg.seed + 99 + rep);
                KrausTrajectory a = make_trajectory(half.gen), b = make_trajectory(half.gen);
                const long n = std::lround(3.0 / (3.0 * dt));
                for (long s = 0; s < n; ++s) {
                    const rvec dw = sample_wiener_step(half.gen, 1.0, dt, rng);
                    apply_step(half.gen, a, dw, te, false);
                    apply_step(half.gen, b, dw, tm, false);
                }
                gaps.push_back((a.k - b.k).norm());
            }
            slopes.push_back(std::log(gaps[0] / gaps[2]) / std::log(dts[0] / dts[2]));
        }
        std::sort(slopes.begin(), slopes.end());
        const double slope = slopes[slopes.size() / 2];
        as.push_back({"stepper_consistency_slope", slope > 0.8 && slope < 1.2, slope, 1.0, true});
    }
    {  // isotropic coupling design
        IsotropyReport rep;
        if (!cfg.coupling_file.empty()) {
            std::ifstream in(cfg.coupling_file);
            if (!in) throw argument_error("cannot open coupling file " + cfg.coupling_file);
            json doc = json::parse(in);
            const auto km = doc["kappa"].get<std::vector<std::vector<double>>>();
            const auto sm = doc["sigma2"].get<std::vector<std::vector<double>>>();
            rmat kappa(km.size(), km[0].size());
            for (std::size_t r = 0; r < km.size(); ++r)
                for (std::size_t c = 0; c < km[r].size(); ++c) kappa(r, c) = km[r][c];
            rmat sigma2(sm.size(), sm[0].size());
            for (std::size_t r = 0; r < sm.size(); ++r)
                for (std::size_t c = 0; c < sm[r].size(); ++c) sigma2(r, c) = sm[r][c];
            const double target = doc.value("target_scale", -1.0);
            rep = design_isotropic_coupling(kappa, sigma2, target);
        } else {
            const double gdt = cfg.gamma * cfg.dt;
            const rmat kappa = std::sqrt(gdt) * rmat::Identity(ir.gen.dim_alg, ir.gen.dim_alg);
            rep = design_isotropic_coupling(kappa, rmat::Identity(ir.gen.dim_alg, ir.gen.dim_alg),
                                            gdt);
        }
        as.push_back({"isotropic_coupling_residual", rep.residual < 1e-9, rep.residual, 1e-9, true});
    }

    bool ok = true;
    json report;
    report["schema_version"] = kSchemaVersion;
    report["config"] = config_json(cfg);
    report["checks"] = assertions_json(as, ok);
    std::filesystem::create_directories(cfg.out);
    write_json(cfg.out + "/verify.json", report);
    std::cout << report.dump(2) << "\n";
    return ok ? 0 : 1;
}

int cmd_diagram(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out);
    const bool want_csv = cfg.format == "csv" || cfg.format == "both";
    const bool want_svg = cfg.format == "svg" || cfg.format == "both";

    if (cfg.kind == "weights" || cfg.kind == "roots") {
        const RootSystem rs = cfg.kind == "roots" ? weight_diagram(1, 1)
                                                  : weight_diagram(cfg.p, cfg.q);
        const std::string base = cfg.kind == "roots"
                                     ? cfg.out + "/roots"
                                     : cfg.out + "/weights_" + std::to_string(cfg.p) + "_" +
                                           std::to_string(cfg.q);
        if (want_csv) emit_weight_diagram_csv(rs, base + ".csv");
        if (want_svg) emit_weight_diagram_svg(rs, base + ".svg");
        std::cout << "wrote " << base << (want_csv ? ".csv " : "") << (want_svg ? ".svg" : "")
                  << "\n";
        return 0;
    }
    if (cfg.kind == "radial_walk" || cfg.kind == "impurity_decay") {
        const Irrep ir = build_irrep(cfg);
        TrajectoryConfig tc;
        tc.gamma = cfg.gamma;
        tc.dt = cfg.dt;
        tc.total_time = cfg.T;
        tc.seed = cfg.seed;
        tc.record_stride = cfg.stride;
        const KrausTrajectory traj = run_trajectory(ir.gen, tc);
        const TrajectorySeries series = trajectory_series(traj.snapshots, ir.gen, ir.roots);
        const std::string base = cfg.out + "/" + cfg.kind;
        if (want_csv) emit_trajectory_csv(series, base + ".csv");
        if (want_svg) emit_trajectory_svg(series, base + ".svg", cfg.kind);
        std::cout << "wrote " << base << (want_csv ? ".csv " : "") << (want_svg ? ".svg" : "")
                  << "\n";
        return 0;
    }
    throw spec_error("unknown diagram kind '" + cfg.kind + "'");
}

int cmd_completeness(const RunConfig& cfg) {
    const Irrep ir = build_irrep(cfg);
    EnsembleConfig ec = ensemble_config(cfg, ir);
    ec.rho = cmat();  // unweighted Wiener ensemble
    const CompletenessReport rep = completeness_check(ir, ec);

    std::vector<Assertion> as;
    as.push_back(
        {"completeness_residual", rep.max_abs_dev < 3.0 * rep.max_se, rep.max_abs_dev,
         3.0 * rep.max_se, true});
    as.push_back({"effective_sample_size", !rep.heavy_tail_warning, rep.ess, 100.0, false});

    bool ok = true;
    json report;
    report["schema_version"] = kSchemaVersion;
    report["config"] = config_json(cfg);
    report["results"] = {{"max_abs_dev", rep.max_abs_dev},
                         {"max_se", rep.max_se},
                         {"effective_sample_size", rep.ess},
                         {"heavy_tail_warning", rep.heavy_tail_warning}};
    report["assertions"] = assertions_json(as, ok);
    std::filesystem::create_directories(cfg.out);
    write_json(cfg.out + "/completeness.json", report);
    std::cout << report.dump(2) << "\n";
    return ok ? 0 : 1;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--group", cfg.group, "group: su2 or su3")
        ->check(CLI::IsMember({"su2", "su3"}));
    sub->add_option("--j", cfg.j, "su2 spin label (nonnegative half-integer)");
    sub->add_option("--rep", cfg.rep, "su3 representation: defining or adjoint")
        ->check(CLI::IsMember({"defining", "adjoint"}));
    sub->add_option("--gamma", cfg.gamma, "measurement rate")->check(CLI::PositiveNumber);
    sub->add_option("--dt", cfg.dt, "meter duration per channel")->check(CLI::PositiveNumber);
    sub->add_option("--T", cfg.T, "total time");
    sub->add_option("--gammaT", cfg.gammaT, "dimensionless duration; sets T = gammaT/gamma");
    sub->add_option("--seed", cfg.seed, "base seed for all randomness");
    sub->add_option("--threads", cfg.threads, "worker cap (0 = runtime default)");
    sub->add_option("--stride", cfg.stride, "super-steps between snapshots")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_option("--config", cfg.config_file, "flat JSON config file");
    sub->add_flag("--serial", cfg.serial, "force the serial reference path");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"continuous isotropic measurement simulator for SU(2)/SU(3) irreps"};
    app.require_subcommand(1);
    RunConfig cfg;

    CLI::App* sim = app.add_subcommand("simulate", "run a trajectory ensemble");
    add_common(sim, cfg);
    sim->add_option("--ntraj", cfg.ntraj, "number of trajectories")->check(CLI::PositiveNumber);
    sim->add_option("--eps", cfg.eps, "impurity thresholds for the guarantee table");
    sim->add_option("--rho", cfg.rho, "initial state: highest_weight, maximally_mixed, none");
    sim->add_option("--stepper", cfg.stepper, "exact or euler")
        ->check(CLI::IsMember({"exact", "euler"}));
    sim->add_flag("--completeness", cfg.with_completeness, "also run the completeness check");

    CLI::App* ver = app.add_subcommand("verify", "run the invariant suite");
    add_common(ver, cfg);
    ver->add_option("--coupling", cfg.coupling_file, "JSON file with kappa/sigma2 to check");

    CLI::App* dia = app.add_subcommand("diagram", "emit diagrams and walk data");
    add_common(dia, cfg);
    dia->add_option("--kind", cfg.kind, "weights, roots, radial_walk, impurity_decay")
        ->check(CLI::IsMember({"weights", "roots", "radial_walk", "impurity_decay"}));
    dia->add_option("--p", cfg.p, "su3 highest-weight label p")->check(CLI::NonNegativeNumber);
    dia->add_option("--q", cfg.q, "su3 highest-weight label q")->check(CLI::NonNegativeNumber);
    dia->add_option("--format", cfg.format, "csv, svg, or both")
        ->check(CLI::IsMember({"csv", "svg", "both"}));

    CLI::App* comp = app.add_subcommand("completeness", "trace-preservation check");
    add_common(comp, cfg);
    comp->add_option("--ntraj", cfg.ntraj, "number of trajectories")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        for (CLI::App* sub : {sim, ver, dia, comp})
            if (sub->parsed()) apply_config_file(*sub, cfg);
        resolve(cfg);
        if (sim->parsed()) return cmd_simulate(cfg);
        if (ver->parsed()) return cmd_verify(cfg);
        if (dia->parsed()) return cmd_diagram(cfg);
        if (comp->parsed()) return cmd_completeness(cfg);
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
