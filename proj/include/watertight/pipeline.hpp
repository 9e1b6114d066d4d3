#pragma once

// The two-stage pipeline: intersect, segment and normalize each surface,
// then stitch both onto the shared intersection curve.

#include "stitching.hpp"

#include <functional>

namespace watertight {

struct PipelineConfig {
    double march_step = 0.02;
    double march_tol = 1e-10;
    int fit_degree = 2;
    double fit_tol = 1e-4;
    int samples = 200;  // gap samples
    bool reduce = false;
    double reduce_tol = 1e-6;
    int points = 8;  // interpolation points; 0 keeps every marched point
    KeepSide keep_a = KeepSide::below;
    KeepSide keep_b = KeepSide::above;
};

/// A stage failed; `stage` names it.
class StageError : public Error {
public:
    StageError(std::string stage_name, std::string what)
        : Error(stage_name + ": " + what), stage(std::move(stage_name)), detail(std::move(what)) {}
    std::string stage;
    std::string detail;
};

class NoIntersectionError : public Error {
public:
    using Error::Error;
};

struct PipelineResult {
    IntersectionData intersection;
    std::vector<double> cuts;  // shared curve-parameter cuts of both decompositions
    WatertightModel model;
    GapReport gap_c_a, gap_c_b;  // intersection curve against each surface
    GapReport lifted;            // lifted domain curves against each other
    GapReport verified;          // after stitching
    double shape_deviation = 0.0;  // stitched boundary patches against the source surfaces
};

/// Max distance from samples (21 x 21 per patch) of the stitched boundary
/// patches to the surface they came from.
inline double shape_deviation(const PatchSet& set, const BezierSurface& source) {
    std::vector<double> worst(set.boundary_order.size(), 0.0);
    parallel_for(set.boundary_order.size(), [&](std::size_t k) {
        const auto& cell = set.patches.cells[set.boundary_order[k].patch];
        const auto& p = set.patches.patches[set.boundary_order[k].patch];
        for (int i = 0; i <= 20; ++i)
            for (int j = 0; j <= 20; ++j) {
                const Point2 xy{i / 20.0, j / 20.0};
                Point2 local = xy;
                if (cell.kind == CellKind::trapezoid) {
                    const int r = cell.trapezoid_case->rotation_quarter_turns;
                    const Point2 ab = to_canonical(xy, r);
                    local = rotate_point({ab.u * (*cell.boundary_fn)(ab.v), ab.v}, r);
                }
                worst[k] = std::max(worst[k], distance_to_surface(source, eval_surface(p, xy), cell.to_global(local)));
            }
    });
    double d = 0.0;
    for (double w : worst) d = std::max(d, w);
    return d;
}

namespace detail {

template <class F>
auto run_stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const NoIntersectionError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(name, e.what());
    }
}

}  // namespace detail

/// March, resample and interpolate: the intersection stages of the pipeline.
inline IntersectionData compute_intersection(const BezierSurface& a, const BezierSurface& b,
                                             const PipelineConfig& cfg) {
    const auto branch = detail::run_stage("march", [&] { return march_branch(a, b, cfg.march_step, cfg.march_tol); });
    if (branch.points.size() < 2) throw NoIntersectionError("no intersection found (" + branch.diagnostic + ")");
    if (branch.closed) throw StageError("march", "closed intersection loops are not supported by the pipeline");

    const auto points = detail::run_stage("invert", [&] {
        return cfg.points == 0 ? branch.points : resample_branch(a, b, branch, cfg.points, cfg.march_tol);
    });
    return detail::run_stage("interpolate", [&] { return build_intersection_data(a, b, points); });
}

inline PipelineResult run_pipeline(const BezierSurface& a, const BezierSurface& b, const PipelineConfig& cfg) {
    PipelineResult r;
    r.intersection = compute_intersection(a, b, cfg);
    const auto& data = r.intersection;

    const auto seg_a = detail::run_stage("split_monotone", [&] { return single_monotone_segment(data.domain_curve_a); });
    const auto seg_b = detail::run_stage("split_monotone", [&] { return single_monotone_segment(data.domain_curve_b); });

    // Both sides are cut at the same curve parameters; a re-split on one side
    // is replayed on the other until neither changes.
    const SegmentationOptions seg_opts{cfg.fit_degree, cfg.fit_tol};
    std::vector<DomainCell> cells_a, cells_b;
    detail::run_stage("fit", [&] {
        r.cuts = default_cuts(seg_a);
        for (int round = 0;; ++round) {
            if (round > 64) throw FitInfeasibleError("shared cuts did not settle", 0.0);
            const auto before = r.cuts;
            cells_a = fit_with_refinement(seg_a, cfg.keep_a, r.cuts, seg_opts);
            cells_b = fit_with_refinement(seg_b, cfg.keep_b, r.cuts, seg_opts);
            if (r.cuts == before) break;
        }
        return 0;
    });
    auto set_a = detail::run_stage("normalize", [&] { return make_patch_set(normalize_all(a, cells_a)); });
    auto set_b = detail::run_stage("normalize", [&] { return make_patch_set(normalize_all(b, cells_b)); });

    const auto triples = detail::run_stage("align", [&] { return align_boundary(data, set_a, set_b); });
    r.model = detail::run_stage("stitch", [&] {
        return stitch_boundary(set_a, set_b, triples, {cfg.reduce, cfg.reduce_tol});
    });

    detail::run_stage("verify", [&] {
        r.gap_c_a = measure_gap(data.curve_c, a, cfg.samples, &data.domain_curve_a);
        r.gap_c_b = measure_gap(data.curve_c, b, cfg.samples, &data.domain_curve_b);
        r.lifted = lifted_gap(data.lifted_a, data.lifted_b);
        r.verified = verify_watertight(r.model, cfg.samples);
        r.shape_deviation = std::max(shape_deviation(r.model.set_a, a), shape_deviation(r.model.set_b, b));
        return 0;
    });
    return r;
}

}  // namespace watertight
