#include "iso/diagram.hpp"

#include "iso/coherent.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace iso {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw argument_error("cannot open " + path + " for writing");
    out << content;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

}  // namespace

void emit_weight_diagram_csv(const RootSystem& rs, const std::string& path) {
    if (rs.rank != 2) throw argument_error("weight diagram emission supports rank 2 only");
    std::string out = "kind,x,y,multiplicity,label\n";
    int i = 0;
    for (const rvec& r : rs.roots)
        out += "root," + fmt(r(0)) + "," + fmt(r(1)) + ",1,r" + std::to_string(i++) + "\n";
    i = 0;
    for (const WeightEntry& w : rs.weights)
        out += "weight," + fmt(w.mu(0)) + "," + fmt(w.mu(1)) + "," + std::to_string(w.multiplicity) +
               ",w" + std::to_string(i++) + "\n";
    i = 0;
    for (const rvec& a : rs.positive_roots) {
        // fixed line of the reflection: direction orthogonal to the root
        const rvec dir = (rvec(2) << -a(1), a(0)).finished().normalized();
        out += "reflection_axis," + fmt(dir(0)) + "," + fmt(dir(1)) + ",0,s" + std::to_string(i++) +
               "\n";
    }
    i = 0;
    for (const rvec& f : rs.fundamental_weights) {
        const rvec dir = f.normalized();
        out += "chamber_ray," + fmt(dir(0)) + "," + fmt(dir(1)) + ",0,c" + std::to_string(i++) + "\n";
    }
    write_file(path, out);
}

std::vector<WeightDiagramRow> parse_weight_diagram_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw argument_error("cannot open " + path);
    std::vector<WeightDiagramRow> rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 5) throw argument_error("malformed weight diagram row: " + line);
        rows.push_back({f[0], std::stod(f[1]), std::stod(f[2]), std::stoi(f[3]), f[4]});
    }
    return rows;
}

void emit_weight_diagram_svg(const RootSystem& rs, const std::string& path) {
    if (rs.rank != 2) throw argument_error("weight diagram emission supports rank 2 only");
    double extent = 0.5;
    for (const rvec& r : rs.roots) extent = std::max(extent, r.norm());
    for (const WeightEntry& w : rs.weights) extent = std::max(extent, w.mu.norm());
    extent *= 1.25;
    const double size = 480.0;
    const double scale = size / (2.0 * extent);
    auto px = [&](double x) { return size / 2.0 + scale * x; };
    auto py = [&](double y) { return size / 2.0 - scale * y; };

    int max_mult = 1;
    for (const WeightEntry& w : rs.weights) max_mult = std::max(max_mult, w.multiplicity);

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt(size) +
         "\" height=\"" + fmt(size) + "\" viewBox=\"0 0 " + fmt(size) + " " + fmt(size) + "\">\n";
    // Weyl chamber wedge between the fundamental-weight rays
    const rvec c1 = rs.fundamental_weights[0].normalized() * extent;
    const rvec c2 = rs.fundamental_weights[1].normalized() * extent;
    s += "<polygon points=\"" + fmt(px(0)) + "," + fmt(py(0)) + " " + fmt(px(c1(0))) + "," +
         fmt(py(c1(1))) + " " + fmt(px(c2(0))) + "," + fmt(py(c2(1))) +
         "\" fill=\"#dddddd\" stroke=\"none\"/>\n";
    // reflection fixed lines
    for (const rvec& a : rs.positive_roots) {
        const rvec dir = (rvec(2) << -a(1), a(0)).finished().normalized() * extent;
        s += "<line x1=\"" + fmt(px(-dir(0))) + "\" y1=\"" + fmt(py(-dir(1))) + "\" x2=\"" +
             fmt(px(dir(0))) + "\" y2=\"" + fmt(py(dir(1))) +
             "\" stroke=\"#cc3333\" stroke-width=\"1\"/>\n";
    }
    for (const rvec& r : rs.roots)
        s += "<circle cx=\"" + fmt(px(r(0))) + "\" cy=\"" + fmt(py(r(1))) +
             "\" r=\"5\" fill=\"#cc3333\"/>\n";
    for (const WeightEntry& w : rs.weights) {
        const double opacity = static_cast<double>(w.multiplicity) / max_mult;
        s += "<circle cx=\"" + fmt(px(w.mu(0))) + "\" cy=\"" + fmt(py(w.mu(1))) +
             "\" r=\"7\" fill=\"#222222\" fill-opacity=\"" + fmt(opacity) + "\"/>\n";
    }
    s += "</svg>\n";
    write_file(path, s);
}

TrajectorySeries trajectory_series(const std::vector<Snapshot>& snaps, const GeneratorSet& gen,
                                   const RootSystem& rs) {
    if (snaps.empty()) throw argument_error("trajectory_series: no snapshots");
    TrajectorySeries s;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    std::vector<FreezePoint> freeze;
    try {
        freeze = freeze_metrics(snaps, gen, rs).series;
    } catch (const statistics_error&) {
        // not enough resolved snapshots; frame distances stay NaN
    }
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        const SvdCoords c = decompose(gen, rs, snaps[i].k);
        s.t.push_back(snaps[i].t);
        s.alpha.push_back(c.a.norm());
        s.impurity.push_back(impurity(gen, rs, (snaps[i].k.adjoint() * snaps[i].k).eval()));
        s.log_scale.push_back(snaps[i].log_scale);
        if (!freeze.empty() && freeze[i].gap_ok) {
            s.d_v.push_back(freeze[i].d_v);
            s.d_u.push_back(freeze[i].d_u);
        } else {
            s.d_v.push_back(nan);
            s.d_u.push_back(nan);
        }
    }
    return s;
}

void emit_trajectory_csv(const TrajectorySeries& s, const std::string& path) {
    if (s.t.empty()) throw argument_error("emit_trajectory_csv: empty series");
    std::string out = "t,alpha,impurity,d_v,d_u,log_scale\n";
    for (std::size_t i = 0; i < s.t.size(); ++i)
        out += fmt(s.t[i]) + "," + fmt(s.alpha[i]) + "," + fmt(s.impurity[i]) + "," +
               fmt(s.d_v[i]) + "," + fmt(s.d_u[i]) + "," + fmt(s.log_scale[i]) + "\n";
    write_file(path, out);
}

TrajectorySeries parse_trajectory_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw argument_error("cannot open " + path);
    TrajectorySeries s;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 6) throw argument_error("malformed trajectory row: " + line);
        s.t.push_back(std::stod(f[0]));
        s.alpha.push_back(std::stod(f[1]));
        s.impurity.push_back(std::stod(f[2]));
        s.d_v.push_back(std::stod(f[3]));
        s.d_u.push_back(std::stod(f[4]));
        s.log_scale.push_back(std::stod(f[5]));
    }
    return s;
}

void emit_trajectory_svg(const TrajectorySeries& s, const std::string& path,
                         const std::string& kind) {
    if (s.t.empty()) throw argument_error("emit_trajectory_svg: empty series");
    const std::vector<double>* ys = nullptr;
    if (kind == "radial_walk")
        ys = &s.alpha;
    else if (kind == "impurity_decay")
        ys = &s.impurity;
    else
        throw argument_error("emit_trajectory_svg: unknown kind " + kind);

    const double w = 640.0, h = 400.0, margin = 40.0;
    double tmax = s.t.back() > 0 ? s.t.back() : 1.0;
    double ymax = 1e-12, ymin = 0.0;
    for (double y : *ys)
        if (std::isfinite(y)) ymax = std::max(ymax, y);
    auto px = [&](double t) { return margin + (w - 2 * margin) * t / tmax; };
    auto py = [&](double y) { return h - margin - (h - 2 * margin) * (y - ymin) / (ymax - ymin); };

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
                      fmt(w) + "\" height=\"" + fmt(h) + "\">\n";
    svg += "<line x1=\"" + fmt(margin) + "\" y1=\"" + fmt(h - margin) + "\" x2=\"" + fmt(w - margin) +
           "\" y2=\"" + fmt(h - margin) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fmt(margin) + "\" y1=\"" + fmt(margin) + "\" x2=\"" + fmt(margin) +
           "\" y2=\"" + fmt(h - margin) + "\" stroke=\"black\"/>\n";
    svg += "<polyline fill=\"none\" stroke=\"#2255cc\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        if (!std::isfinite((*ys)[i])) continue;
        svg += fmt(px(s.t[i])) + "," + fmt(py((*ys)[i])) + " ";
    }
    svg += "\"/>\n";
    svg += "<text x=\"" + fmt(w / 2) + "\" y=\"" + fmt(h - 8) + "\" font-size=\"13\">t</text>\n";
    svg += "<text x=\"8\" y=\"" + fmt(margin - 10) + "\" font-size=\"13\">" + kind + "</text>\n";
    svg += "</svg>\n";
    write_file(path, svg);
}

}  // namespace iso
