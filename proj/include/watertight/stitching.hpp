#pragma once

// Stage two: overwrite the trim edges of both surfaces' boundary patches with
// the control points of the shared intersection curve.

#include "segmentation.hpp"

namespace watertight {

struct BoundaryEntry {
    std::size_t patch = 0;
    Edge curved_edge = Edge::u_max;
    bool forward = true;  // edge parameter increases with the curve parameter
    double param0 = 0.0, param1 = 0.0;

    friend bool operator==(const BoundaryEntry&, const BoundaryEntry&) = default;
};

struct PatchSet {
    PatchDecomposition patches;
    std::vector<BoundaryEntry> boundary_order;  // sorted by curve parameter

    friend bool operator==(const PatchSet&, const PatchSet&) = default;
};

struct StitchTriple {
    std::size_t entry_a = 0, entry_b = 0;  // indices into boundary_order
    BezierCurve3 segment;                  // C restricted to the edge, oriented with the curve parameter
    double param0 = 0.0, param1 = 0.0;
};

struct StitchOptions {
    bool reduce = false;
    double reduce_tol = 1e-6;
};

struct WatertightModel {
    PatchSet set_a, set_b;
    std::vector<BezierCurve3> shared_boundary;  // one per matched pair, oriented with the curve parameter
    GapReport pre_gap, post_gap;
    double deviation = 0.0;
    std::vector<double> patch_deviation_a, patch_deviation_b;
};

namespace detail {

/// Edge-parameter-zero corner of a patch edge in patch coordinates.
inline Point2 edge_origin(Edge e) {
    switch (e) {
        case Edge::v_min: return {0.0, 0.0};
        case Edge::u_max: return {1.0, 0.0};
        case Edge::v_max: return {0.0, 1.0};
        case Edge::u_min: return {0.0, 0.0};
    }
    return {};
}

/// Whether the edge parameter grows along with the curve parameter.
inline bool edge_forward(const DomainCell& cell) {
    Point2 local = edge_origin(cell.trim_edge);
    if (cell.kind == CellKind::trapezoid) {
        const int r = cell.trapezoid_case->rotation_quarter_turns;
        const Point2 ab = to_canonical(local, r);
        local = rotate_point({(*cell.boundary_fn)(ab.v), ab.v}, r);
    }
    auto host = [&](Point2 p) { return cell.axis == GraphAxis::u_of_v ? p.v : p.u; };
    return (host(local) < 0.5) == (host(cell.edge_start) < 0.5);
}

/// Point on a patch edge at edge weights (w0, w1), evaluated through the
/// surface with exact 0/1 weights on the fixed parameter.
inline Point3 eval_edge(const BezierSurface& s, Edge e, double w0, double w1) {
    switch (e) {
        case Edge::v_min: return eval_surface_weighted(s, w0, w1, 1.0, 0.0);
        case Edge::u_max: return eval_surface_weighted(s, 0.0, 1.0, w0, w1);
        case Edge::v_max: return eval_surface_weighted(s, w0, w1, 0.0, 1.0);
        case Edge::u_min: return eval_surface_weighted(s, 1.0, 0.0, w0, w1);
    }
    return {};
}

inline Point3 eval_entry(const PatchSet& set, const BoundaryEntry& e, int k, int count) {
    const double w0 = static_cast<double>(count - k) / count, w1 = static_cast<double>(k) / count;
    const auto& s = set.patches.patches[e.patch];
    return e.forward ? eval_edge(s, e.curved_edge, w0, w1) : eval_edge(s, e.curved_edge, w1, w0);
}

inline double patch_distance(const BezierSurface& a, const BezierSurface& b) {
    double d = 0.0;
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j) d = std::max(d, distance(eval_surface(a, i / 20.0, j / 20.0), eval_surface(b, i / 20.0, j / 20.0)));
    return d;
}

}  // namespace detail

/// Boundary bookkeeping for a fitted, normalized decomposition.
inline PatchSet make_patch_set(PatchDecomposition d) {
    PatchSet set;
    for (std::size_t k = 0; k < d.cells.size(); ++k) {
        const auto& c = d.cells[k];
        if (!c.on_trim) continue;
        set.boundary_order.push_back({k, c.trim_edge, detail::edge_forward(c), c.param0, c.param1});
    }
    std::sort(set.boundary_order.begin(), set.boundary_order.end(),
              [](const BoundaryEntry& l, const BoundaryEntry& r) { return l.param0 < r.param0; });
    set.patches = std::move(d);
    return set;
}

/// Matches boundary patches of both sides by their curve-parameter
/// intervals and cuts the matching piece out of C for each pair.
inline std::vector<StitchTriple> align_boundary(const IntersectionData& data, const PatchSet& a, const PatchSet& b) {
    if (a.boundary_order.size() != b.boundary_order.size())
        throw AlignmentError("align_boundary: sides have " + std::to_string(a.boundary_order.size()) + " and " +
                             std::to_string(b.boundary_order.size()) + " boundary patches");
    std::vector<StitchTriple> out;
    for (std::size_t k = 0; k < a.boundary_order.size(); ++k) {
        const auto& ea = a.boundary_order[k];
        const auto& eb = b.boundary_order[k];
        if (ea.param0 != eb.param0 || ea.param1 != eb.param1)
            throw AlignmentError("align_boundary: breakpoint mismatch at boundary patch " + std::to_string(k));
        if (k > 0 && ea.param0 != a.boundary_order[k - 1].param1)
            throw AlignmentError("align_boundary: boundary patches do not cover the curve contiguously");
        out.push_back({k, k, piece_between(data.curve_c, ea.param0, ea.param1), ea.param0, ea.param1});
    }
    return out;
}

/// Max distance between matched edges of the two sides, sampled at
/// `samples + 1` uniform edge parameters per pair.
inline GapReport boundary_gap(const PatchSet& a, const PatchSet& b, const std::vector<StitchTriple>& triples,
                              int samples = 64) {
    GapReport r;
    double sum_sq = 0.0;
    for (const auto& t : triples)
        for (int k = 0; k <= samples; ++k) {
            const Point3 pa = detail::eval_entry(a, a.boundary_order[t.entry_a], k, samples);
            const Point3 pb = detail::eval_entry(b, b.boundary_order[t.entry_b], k, samples);
            const double d = distance(pa, pb);
            sum_sq += d * d;
            ++r.sample_count;
            if (r.sample_count == 1 || d > r.max_gap) {
                r.max_gap = d;
                r.worst_location = pa;
            }
        }
    if (r.sample_count > 0) r.rms_gap = std::min(r.max_gap, std::sqrt(sum_sq / r.sample_count));
    return r;
}

/// Replaces every matched trim edge on both sides by the elevated C piece.
/// Both edges of a pair are brought to a common degree first (the lower
/// side's patch is degree-elevated), so the written control points are
/// shared bit for bit.
inline WatertightModel stitch_boundary(const PatchSet& a, const PatchSet& b, const std::vector<StitchTriple>& triples,
                                       const StitchOptions& opts = {}) {
    WatertightModel m;
    m.set_a = a;
    m.set_b = b;
    m.pre_gap = boundary_gap(a, b, triples);

    for (const auto& t : triples) {
        auto& ea = m.set_a.boundary_order[t.entry_a];
        auto& eb = m.set_b.boundary_order[t.entry_b];
        auto& pa = m.set_a.patches.patches[ea.patch];
        auto& pb = m.set_b.patches.patches[eb.patch];

        BezierCurve3 piece = t.segment;
        if (opts.reduce) {
            while (piece.degree() > 1) {
                try {
                    piece = degree_reduce_curve(piece, piece.degree() - 1, opts.reduce_tol);
                } catch (const ReductionInfeasibleError&) {
                    break;
                }
            }
        }
        const int da = edge_degree(pa, ea.curved_edge), db = edge_degree(pb, eb.curved_edge);
        if (piece.degree() > da || piece.degree() > db)
            throw StitchDegreeError("stitch_boundary: intersection curve degree " + std::to_string(piece.degree()) +
                                    " exceeds boundary edge degree " + std::to_string(std::min(da, db)) +
                                    "; raise the fit degree or the surface degree");
        const int target = std::max(da, db);
        auto raise = [&](BezierSurface& s, Edge e) {
            if (edge_degree(s, e) == target) return;
            const bool along_u = e == Edge::v_min || e == Edge::v_max;
            s = elevate_surface(s, along_u ? target : s.degree_u, along_u ? s.degree_v : target);
        };
        raise(pa, ea.curved_edge);
        raise(pb, eb.curved_edge);

        const auto shared = degree_elevate_curve(piece, target);
        const std::vector<Point3> forward = shared.control_points;
        const std::vector<Point3> backward(forward.rbegin(), forward.rend());
        set_edge(pa, ea.curved_edge, ea.forward ? forward : backward);
        set_edge(pb, eb.curved_edge, eb.forward ? forward : backward);
        m.shared_boundary.push_back(shared);
    }

    m.patch_deviation_a.assign(a.patches.patches.size(), 0.0);
    m.patch_deviation_b.assign(b.patches.patches.size(), 0.0);
    parallel_for(a.patches.patches.size(), [&](std::size_t k) {
        m.patch_deviation_a[k] = detail::patch_distance(a.patches.patches[k], m.set_a.patches.patches[k]);
    });
    parallel_for(b.patches.patches.size(), [&](std::size_t k) {
        m.patch_deviation_b[k] = detail::patch_distance(b.patches.patches[k], m.set_b.patches.patches[k]);
    });
    for (double d : m.patch_deviation_a) m.deviation = std::max(m.deviation, d);
    for (double d : m.patch_deviation_b) m.deviation = std::max(m.deviation, d);
    m.post_gap = boundary_gap(m.set_a, m.set_b, triples);
    return m;
}

/// Gap between the two sides along every matched boundary pair of a model,
/// with pairs taken in boundary order.
inline GapReport verify_watertight(const WatertightModel& m, int samples) {
    if (m.set_a.boundary_order.size() != m.set_b.boundary_order.size())
        throw AlignmentError("verify_watertight: boundary patch counts differ");
    std::vector<StitchTriple> pairs;
    for (std::size_t k = 0; k < m.set_a.boundary_order.size(); ++k) pairs.push_back({k, k, {}, 0.0, 0.0});
    return boundary_gap(m.set_a, m.set_b, pairs, samples);
}

}  // namespace watertight
