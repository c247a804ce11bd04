#pragma once

#include <string>
#include <vector>

#include "iso/svd_coords.hpp"

namespace iso {

// File emitters for root/weight diagrams and trajectory time series.
// CSV: UTF-8, header row, LF endings, %.12g numbers. SVG: minimal standalone
// SVG 1.1, no charting dependency.

struct WeightDiagramRow {
    std::string kind;  // "root", "weight", "reflection_axis", "chamber_ray"
    double x = 0.0;
    double y = 0.0;
    int multiplicity = 0;
    std::string label;
};

void emit_weight_diagram_csv(const RootSystem& rs, const std::string& path);
void emit_weight_diagram_svg(const RootSystem& rs, const std::string& path);
std::vector<WeightDiagramRow> parse_weight_diagram_csv(const std::string& path);

// Time series extracted from trajectory snapshots. alpha is the radial
// coordinate (chamber norm for rank > 1); d_v / d_u are frame-projector
// distances to the final snapshot (NaN where the gap is unresolved).
struct TrajectorySeries {
    std::vector<double> t, alpha, impurity, d_v, d_u, log_scale;
};

TrajectorySeries trajectory_series(const std::vector<Snapshot>& snaps, const GeneratorSet& gen,
                                   const RootSystem& rs);

// Columns: t,alpha,impurity,d_v,d_u,log_scale (fixed order).
void emit_trajectory_csv(const TrajectorySeries& s, const std::string& path);

// kind: "radial_walk" plots alpha vs t, "impurity_decay" plots impurity vs t.
void emit_trajectory_svg(const TrajectorySeries& s, const std::string& path,
                         const std::string& kind);

TrajectorySeries parse_trajectory_csv(const std::string& path);

}  // namespace iso
