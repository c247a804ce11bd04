#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "iso/diagram.hpp"

using namespace iso;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("diagram_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::multiset<std::pair<long, long>> weight_rows(const std::vector<WeightDiagramRow>& rows) {
    std::multiset<std::pair<long, long>> out;
    for (const WeightDiagramRow& r : rows)
        if (r.kind == "weight")
            for (int c = 0; c < r.multiplicity; ++c)
                out.insert({std::lround(r.x * 1e6), std::lround(r.y * 1e6)});
    return out;
}

}  // namespace

TEST_CASE("weight diagram CSV: counts for the 15-dimensional example") {
    TempDir tmp;
    const RootSystem rs = weight_diagram(2, 1);
    const std::string path = tmp.file("w21.csv");
    emit_weight_diagram_csv(rs, path);
    const auto rows = parse_weight_diagram_csv(path);

    int weights = 0, mult2 = 0, roots = 0, axes = 0;
    for (const auto& r : rows) {
        if (r.kind == "weight") {
            ++weights;
            if (r.multiplicity == 2) ++mult2;
        }
        if (r.kind == "root") ++roots;
        if (r.kind == "reflection_axis") ++axes;
    }
    CHECK(weights == 12);
    CHECK(mult2 == 3);
    CHECK(roots == 6);
    CHECK(axes == 3);
}

TEST_CASE("weight diagram CSV: triangle and adjoint") {
    TempDir tmp;
    emit_weight_diagram_csv(weight_diagram(1, 0), tmp.file("w10.csv"));
    const auto tri = parse_weight_diagram_csv(tmp.file("w10.csv"));
    int weights = 0;
    for (const auto& r : tri)
        if (r.kind == "weight") {
            ++weights;
            CHECK(r.multiplicity == 1);
        }
    CHECK(weights == 3);

    // adjoint: weights coincide with the roots plus a double zero
    emit_weight_diagram_csv(weight_diagram(1, 1), tmp.file("w11.csv"));
    const auto adj = parse_weight_diagram_csv(tmp.file("w11.csv"));
    std::multiset<std::pair<long, long>> root_set, weight_set;
    for (const auto& r : adj) {
        if (r.kind == "root") root_set.insert({std::lround(r.x * 1e6), std::lround(r.y * 1e6)});
        if (r.kind == "weight" && !(std::abs(r.x) < 1e-9 && std::abs(r.y) < 1e-9))
            weight_set.insert({std::lround(r.x * 1e6), std::lround(r.y * 1e6)});
        if (r.kind == "weight" && std::abs(r.x) < 1e-9 && std::abs(r.y) < 1e-9)
            CHECK(r.multiplicity == 2);
    }
    CHECK(root_set == weight_set);
}

TEST_CASE("CSV round-trip preserves 12 significant digits") {
    TempDir tmp;
    const RootSystem rs = weight_diagram(2, 1);
    const std::string path = tmp.file("rt.csv");
    emit_weight_diagram_csv(rs, path);
    const auto rows = parse_weight_diagram_csv(path);
    std::size_t i = 0;
    for (const rvec& r : rs.roots) {
        REQUIRE(rows[i].kind == "root");
        CHECK(rows[i].x == doctest::Approx(r(0)).epsilon(1e-11));
        CHECK(rows[i].y == doctest::Approx(r(1)).epsilon(1e-11));
        ++i;
    }
    for (const WeightEntry& w : rs.weights) {
        REQUIRE(rows[i].kind == "weight");
        CHECK(rows[i].x == doctest::Approx(w.mu(0)).epsilon(1e-11));
        CHECK(rows[i].y == doctest::Approx(w.mu(1)).epsilon(1e-11));
        CHECK(rows[i].multiplicity == w.multiplicity);
        ++i;
    }
}

TEST_CASE("emitted weight multiset stays Weyl invariant after a file round trip") {
    TempDir tmp;
    const RootSystem rs = weight_diagram(3, 1);
    const std::string path = tmp.file("weyl.csv");
    emit_weight_diagram_csv(rs, path);
    const auto rows = parse_weight_diagram_csv(path);
    const auto base = weight_rows(rows);
    for (const rmat& w : rs.weyl_elements()) {
        std::vector<WeightDiagramRow> reflected;
        for (const auto& r : rows) {
            if (r.kind != "weight") continue;
            rvec mu(2);
            mu << r.x, r.y;
            const rvec rm = w * mu;
            reflected.push_back({"weight", rm(0), rm(1), r.multiplicity, r.label});
        }
        CHECK(weight_rows(reflected) == base);
    }
}

TEST_CASE("rank-1 systems are rejected by the plane emitter") {
    TempDir tmp;
    const Irrep su2 = build_spin_irrep(1.0);
    CHECK_THROWS_AS(emit_weight_diagram_csv(su2.roots, tmp.file("bad.csv")), argument_error);
}

TEST_CASE("trajectory series: columns, ranges, and round trip") {
    TempDir tmp;
    const Irrep ir = build_spin_irrep(1.0);
    TrajectoryConfig cfg;
    cfg.gamma = 1.0;
    cfg.dt = 0.01;
    cfg.total_time = 8.0;
    cfg.seed = 9;
    cfg.record_stride = 20;
    const KrausTrajectory traj = run_trajectory(ir.gen, cfg);
    const TrajectorySeries s = trajectory_series(traj.snapshots, ir.gen, ir.roots);

    CHECK(s.t.front() == 0.0);
    CHECK(s.alpha.front() == doctest::Approx(0.0).epsilon(1e-14));
    for (double p : s.impurity) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }

    const std::string path = tmp.file("walk.csv");
    emit_trajectory_csv(s, path);
    {
        std::ifstream in(path);
        std::string header;
        std::getline(in, header);
        CHECK(header == "t,alpha,impurity,d_v,d_u,log_scale");
    }
    const TrajectorySeries rt = parse_trajectory_csv(path);
    REQUIRE(rt.t.size() == s.t.size());
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        CHECK(rt.t[i] == doctest::Approx(s.t[i]).epsilon(1e-11));
        CHECK(rt.alpha[i] == doctest::Approx(s.alpha[i]).epsilon(1e-11));
        CHECK(rt.log_scale[i] == doctest::Approx(s.log_scale[i]).epsilon(1e-11));
    }

    emit_trajectory_svg(s, tmp.file("walk.svg"), "radial_walk");
    emit_trajectory_svg(s, tmp.file("decay.svg"), "impurity_decay");
    for (const char* f : {"walk.svg", "decay.svg"}) {
        std::ifstream in(tmp.file(f));
        std::string content((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
        CHECK(content.find("<svg") != std::string::npos);
        CHECK(content.find("polyline") != std::string::npos);
    }
    CHECK_THROWS_AS(emit_trajectory_svg(s, tmp.file("x.svg"), "nope"), argument_error);
}

TEST_CASE("empty series are rejected") {
    CHECK_THROWS_AS(emit_trajectory_csv(TrajectorySeries{}, "/tmp/should_not_exist.csv"),
                    argument_error);
    const Irrep ir = build_spin_irrep(0.5);
    CHECK_THROWS_AS(trajectory_series({}, ir.gen, ir.roots), argument_error);
}

TEST_CASE("weight diagram SVG has the advertised structure") {
    TempDir tmp;
    emit_weight_diagram_svg(weight_diagram(2, 1), tmp.file("w.svg"));
    std::ifstream in(tmp.file("w.svg"));
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content.find("<svg") != std::string::npos);
    CHECK(content.find("fill-opacity") != std::string::npos);  // multiplicity encoding
    CHECK(content.find("polygon") != std::string::npos);       // chamber shading
}
