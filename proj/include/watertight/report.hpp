#pragma once

// JSON reports for pipeline runs and gap checks.

#include "mesh.hpp"
#include "model_io.hpp"
#include "pipeline.hpp"

namespace watertight {

inline Json config_json(const PipelineConfig& c) {
    return {{"march_step", c.march_step}, {"march_tol", c.march_tol}, {"fit_degree", c.fit_degree},
            {"fit_tol", c.fit_tol},       {"samples", c.samples},     {"reduce", c.reduce},
            {"reduce_tol", c.reduce_tol}, {"points", c.points},       {"keep_a", to_string(c.keep_a)},
            {"keep_b", to_string(c.keep_b)}};
}

inline Json cells_json(const PatchSet& s) {
    int trapezoids = 0;
    Json cases = Json::array();
    for (const auto& c : s.patches.cells)
        if (c.kind == CellKind::trapezoid) {
            ++trapezoids;
            cases.push_back(c.trapezoid_case->case_id);
        }
    double residual = 0.0;
    for (const auto& c : s.patches.cells) residual = std::max(residual, c.fit_residual);
    return {{"total", s.patches.cells.size()},
            {"trapezoids", trapezoids},
            {"rectangles", static_cast<int>(s.patches.cells.size()) - trapezoids},
            {"boundary_patches", s.boundary_order.size()},
            {"cases", cases},
            {"max_fit_residual", residual}};
}

inline Json pipeline_report(const PipelineResult& r, const PipelineConfig& cfg, int audit_grid) {
    const auto audit = audit_trim(r.model, audit_grid);
    return {{"version", "watertight-report/1"},
            {"config", config_json(cfg)},
            {"intersection",
             {{"points", r.intersection.points.size()}, {"segments", r.intersection.curve_c.segment_count()}}},
            {"cuts", r.cuts.size()},
            {"cells", {{"a", cells_json(r.model.set_a)}, {"b", cells_json(r.model.set_b)}}},
            {"pre_stitch",
             {{"curve_vs_a", io::to_json(r.gap_c_a)},
              {"curve_vs_b", io::to_json(r.gap_c_b)},
              {"lifted", io::to_json(r.lifted)},
              {"edges", io::to_json(r.model.pre_gap)}}},
            {"post_stitch", {{"edges", io::to_json(r.model.post_gap)}, {"verified", io::to_json(r.verified)}}},
            {"deviation", r.model.deviation},
            {"shape_deviation", r.shape_deviation},
            {"watertight", r.verified.max_gap == 0.0},
            {"trim_audit",
             {{"grid", audit_grid},
              {"trim_vertices", audit.trim_vertices},
              {"one_sided_edges", audit.one_sided_edges},
              {"unshared_vertices", audit.unshared_vertices}}}};
}

}  // namespace watertight
