#pragma once

// Stage one: split a trimmed domain along its domain curve into rectangles
// and curved trapezoids, classify the trapezoids, fit their boundary
// polynomials and normalize every cell to a standard-domain Bezier patch.

#include "compose.hpp"
#include "intersection.hpp"

#include <optional>

namespace watertight {

/// Which coordinate is the single-valued function of the other.
enum class GraphAxis { u_of_v, v_of_u };

/// Retained side of the trim: below keeps the dependent coordinate under the
/// curve (u < g(v) or v < h(u)), above keeps it over the curve.
enum class KeepSide { below, above };

inline const char* to_string(GraphAxis a) { return a == GraphAxis::u_of_v ? "u_of_v" : "v_of_u"; }
inline const char* to_string(KeepSide k) { return k == KeepSide::below ? "below" : "above"; }

struct MonotoneSegment {
    PiecewiseCurve2 curve;  // parent domain curve
    GraphAxis axis = GraphAxis::u_of_v;
    double param_begin = 0.0;
    double param_end = 1.0;

    /// Host coordinate (the independent one) of a domain point.
    double host(Point2 p) const { return axis == GraphAxis::u_of_v ? p.v : p.u; }
    double dependent(Point2 p) const { return axis == GraphAxis::u_of_v ? p.u : p.v; }
};

struct TrapezoidCase {
    int case_id = 1;                 // 1..8
    int rotation_quarter_turns = 0;  // canonical (a, b) -> cell-local (x, y)

    friend bool operator==(const TrapezoidCase&, const TrapezoidCase&) = default;
};

enum class CellKind { rectangle, trapezoid };

struct DomainCell {
    CellKind kind = CellKind::rectangle;
    double u0 = 0.0, u1 = 1.0, v0 = 0.0, v1 = 1.0;

    // Cells touching the trim (trapezoids, and rectangles cut by an
    // isoparametric stretch of the curve) carry the fields below.
    bool on_trim = false;
    GraphAxis axis = GraphAxis::u_of_v;
    KeepSide keep = KeepSide::below;
    double param0 = 0.0, param1 = 0.0;      // curve parameters bounding the curved edge
    int breakpoint0 = -1, breakpoint1 = -1;  // parent breakpoint indices, -1 if inserted
    Point2 edge_start, edge_end;             // curve ends (at param0, param1) in cell-local coordinates
    Edge trim_edge = Edge::u_max;            // patch edge carrying the trim

    // Trapezoids after classification and fitting.
    std::optional<TrapezoidCase> trapezoid_case;
    std::optional<BoundaryPolynomial> boundary_fn;  // canonical coordinates: retained a <= f(b)
    double fit_residual = 0.0;                      // canonical units

    Point2 to_local(Point2 uv) const { return {(uv.u - u0) / (u1 - u0), (uv.v - v0) / (v1 - v0)}; }
    Point2 to_global(Point2 xy) const { return {u0 + xy.u * (u1 - u0), v0 + xy.v * (v1 - v0)}; }

    friend bool operator==(const DomainCell&, const DomainCell&) = default;
};

struct PatchDecomposition {
    std::vector<DomainCell> cells;
    std::vector<BezierSurface> patches;  // one per cell, standard domain

    friend bool operator==(const PatchDecomposition&, const PatchDecomposition&) = default;
};

/// A boundary cell's polynomial could not be fitted; carries the curve
/// parameters of the offending edge so the caller can re-split it.
class CellFitError : public FitInfeasibleError {
public:
    CellFitError(const std::string& what, double residual, double p0, double p1)
        : FitInfeasibleError(what, residual), param0(p0), param1(p1) {}
    double param0, param1;
};

// ---------------------------------------------------------------------------
// Monotone splitting

namespace detail {

inline Point2 curve_derivative(const PiecewiseCurve2& c, double t) {
    const auto [k, local] = c.locate(t);
    const double scale = 1.0 / (c.breakpoints[k + 1] - c.breakpoints[k]);
    return scale * eval(derivative(c.segments[k]), local);
}

/// Roots of one derivative component, from sign changes on a sampled grid
/// refined by bisection to 1e-10 (ends excluded).
inline std::vector<double> derivative_sign_changes(const PiecewiseCurve2& c, std::size_t comp) {
    std::vector<double> grid;
    for (std::size_t k = 0; k < c.segment_count(); ++k) {
        const double a = c.breakpoints[k], b = c.breakpoints[k + 1];
        for (int i = 0; i < 100; ++i) grid.push_back(a + (b - a) * i / 100.0);
    }
    grid.push_back(1.0);
    auto value = [&](double t) { return curve_derivative(c, t)[comp]; };
    double scale = 0.0;
    for (double t : grid) scale = std::max(scale, std::abs(value(t)));
    const double zero = 1e-12 * std::max(scale, 1e-300);
    std::vector<double> roots;
    int last_sign = 0;
    double last_t = 0.0;
    for (double t : grid) {
        const double d = value(t);
        const int sign = d > zero ? 1 : (d < -zero ? -1 : 0);
        if (sign != 0) {
            if (last_sign != 0 && sign != last_sign) {
                double lo = last_t, hi = t;
                while (hi - lo > 1e-10) {
                    const double mid = 0.5 * (lo + hi);
                    const double dm = value(mid);
                    if ((dm > 0.0 ? 1 : -1) == last_sign)
                        lo = mid;
                    else
                        hi = mid;
                }
                roots.push_back(0.5 * (lo + hi));
            }
            last_sign = sign;
            last_t = t;
        }
    }
    return roots;
}

}  // namespace detail

/// Splits a domain curve into pieces along which both coordinates are
/// monotone, then declares each piece a graph over its longer extent.
inline std::vector<MonotoneSegment> split_monotone(const PiecewiseCurve2& c) {
    bool degenerate = true;
    const Point2 first = c.segments.front().control_points.front();
    for (const auto& s : c.segments)
        for (const auto& p : s.control_points)
            if (!(p == first)) degenerate = false;
    if (degenerate) throw ArgumentError("split_monotone: degenerate curve (single point)");

    std::vector<double> cuts{0.0, 1.0};
    for (std::size_t comp = 0; comp < 2; ++comp)
        for (double r : detail::derivative_sign_changes(c, comp)) cuts.push_back(r);
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> unique;
    for (double t : cuts)
        if (unique.empty() || t - unique.back() > 1e-9) unique.push_back(t);
    unique.back() = 1.0;

    std::vector<MonotoneSegment> out;
    for (std::size_t k = 0; k + 1 < unique.size(); ++k) {
        MonotoneSegment seg;
        seg.curve = c;
        seg.param_begin = unique[k];
        seg.param_end = unique[k + 1];
        const Point2 a = eval_curve(c, seg.param_begin), b = eval_curve(c, seg.param_end);
        seg.axis = std::abs(b.v - a.v) >= std::abs(b.u - a.u) ? GraphAxis::u_of_v : GraphAxis::v_of_u;
        out.push_back(std::move(seg));
    }
    return out;
}

/// Sampled check (101 points) that the host coordinate is strictly monotone.
inline bool is_single_valued(const MonotoneSegment& seg) {
    double prev = seg.host(eval_curve(seg.curve, seg.param_begin));
    int direction = 0;
    for (int k = 1; k <= 100; ++k) {
        const double t = seg.param_begin + (seg.param_end - seg.param_begin) * k / 100.0;
        const double h = seg.host(eval_curve(seg.curve, k == 100 ? seg.param_end : t));
        const int d = h > prev ? 1 : (h < prev ? -1 : 0);
        if (d == 0 || (direction != 0 && d != direction)) return false;
        direction = d;
        prev = h;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Decomposition

namespace detail {

inline constexpr double boundary_eps = 1e-9;

/// Cell from ranges on the host and dependent axes.
inline DomainCell cell_from_ranges(GraphAxis axis, double h0, double h1, double d0, double d1) {
    DomainCell c;
    if (axis == GraphAxis::u_of_v) {
        c.u0 = d0, c.u1 = d1, c.v0 = h0, c.v1 = h1;
    } else {
        c.u0 = h0, c.u1 = h1, c.v0 = d0, c.v1 = d1;
    }
    return c;
}

inline int breakpoint_index(const PiecewiseCurve2& c, double t) {
    const auto it = std::find(c.breakpoints.begin(), c.breakpoints.end(), t);
    return it == c.breakpoints.end() ? -1 : static_cast<int>(std::distance(c.breakpoints.begin(), it));
}

}  // namespace detail

/// Default cut parameters: the segment ends plus every parent breakpoint in between.
inline std::vector<double> default_cuts(const MonotoneSegment& seg) {
    std::vector<double> cuts{seg.param_begin};
    for (double b : seg.curve.breakpoints)
        if (b > seg.param_begin && b < seg.param_end) cuts.push_back(b);
    cuts.push_back(seg.param_end);
    return cuts;
}

/// Splits the retained side of one monotone segment into cells. Each pair of
/// consecutive cut parameters spawns one cell whose curved edge runs between
/// them; the remaining parts of the domain beyond the segment's host range
/// become rectangles when they lie on the retained side.
inline std::vector<DomainCell> decompose_domain(const MonotoneSegment& seg, KeepSide keep,
                                                std::vector<double> cuts = {}) {
    if (cuts.empty()) cuts = default_cuts(seg);
    if (cuts.size() < 2 || cuts.front() != seg.param_begin || cuts.back() != seg.param_end)
        throw ArgumentError("decompose_domain: cuts must start and end at the segment ends");
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
        if (!(cuts[k] < cuts[k + 1])) throw ArgumentError("decompose_domain: cuts must increase strictly");

    std::vector<DomainCell> cells;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double pa = cuts[k], pb = cuts[k + 1];
        const Point2 a = eval_curve(seg.curve, pa), b = eval_curve(seg.curve, pb);
        const double ha = seg.host(a), hb = seg.host(b), ga = seg.dependent(a), gb = seg.dependent(b);
        const double hlo = std::min(ha, hb), hhi = std::max(ha, hb);
        if (!(hhi - hlo > 1e-12))
            throw DegenerateCellError("decompose_domain: curve is not single-valued between parameters " +
                                      format_number(pa) + " and " + format_number(pb));
        const double glo = std::min(ga, gb), ghi = std::max(ga, gb);

        bool flat = ghi - glo <= 1e-12;
        if (flat)
            for (int s = 1; s < 16 && flat; ++s)
                flat = std::abs(seg.dependent(eval_curve(seg.curve, pa + (pb - pa) * s / 16.0)) - ga) <= 1e-12;

        double dlo, dhi;
        if (keep == KeepSide::below) {
            dlo = 0.0;
            dhi = ghi;
        } else {
            dlo = glo;
            dhi = 1.0;
        }
        if (!(dhi - dlo > 1e-12))
            throw DegenerateCellError("decompose_domain: curve runs along the domain boundary on the kept side");

        DomainCell cell = detail::cell_from_ranges(seg.axis, hlo, hhi, dlo, dhi);
        cell.kind = flat ? CellKind::rectangle : CellKind::trapezoid;
        cell.on_trim = true;
        cell.axis = seg.axis;
        cell.keep = keep;
        cell.param0 = pa;
        cell.param1 = pb;
        cell.breakpoint0 = detail::breakpoint_index(seg.curve, pa);
        cell.breakpoint1 = detail::breakpoint_index(seg.curve, pb);
        cell.edge_start = cell.to_local(a);
        cell.edge_end = cell.to_local(b);
        // Pin the local ends to exact 0/1 on the host axis.
        auto pin = [&](Point2& p, double h) {
            const double val = h == hlo ? 0.0 : 1.0;
            (seg.axis == GraphAxis::u_of_v ? p.v : p.u) = val;
        };
        pin(cell.edge_start, ha);
        pin(cell.edge_end, hb);
        if (flat) {
            const bool dep_high = keep == KeepSide::below;
            cell.trim_edge = seg.axis == GraphAxis::u_of_v ? (dep_high ? Edge::u_max : Edge::u_min)
                                                           : (dep_high ? Edge::v_max : Edge::v_min);
        }
        cells.push_back(cell);
    }

    // Domain parts beyond the host range of the segment.
    const Point2 start = eval_curve(seg.curve, seg.param_begin), end = eval_curve(seg.curve, seg.param_end);
    const Point2 lo_pt = seg.host(start) <= seg.host(end) ? start : end;
    const Point2 hi_pt = seg.host(start) <= seg.host(end) ? end : start;
    auto outside_owner = [&](Point2 p) -> std::optional<KeepSide> {
        const double g = seg.dependent(p);
        if (g >= 1.0 - detail::boundary_eps) return KeepSide::below;
        if (g <= detail::boundary_eps) return KeepSide::above;
        throw DegenerateCellError("decompose_domain: trim curve ends inside the domain at (" + format_number(p.u) +
                                  ", " + format_number(p.v) + ")");
    };
    if (seg.host(lo_pt) > detail::boundary_eps && outside_owner(lo_pt) == keep)
        cells.push_back(detail::cell_from_ranges(seg.axis, 0.0, seg.host(lo_pt), 0.0, 1.0));
    if (seg.host(hi_pt) < 1.0 - detail::boundary_eps && outside_owner(hi_pt) == keep)
        cells.push_back(detail::cell_from_ranges(seg.axis, seg.host(hi_pt), 1.0, 0.0, 1.0));
    return cells;
}

// ---------------------------------------------------------------------------
// Classification

/// Rotation taking canonical coordinates to the cell for a trim on the
/// given axis and side.
inline int rotation_for(GraphAxis axis, KeepSide keep) {
    if (axis == GraphAxis::u_of_v) return keep == KeepSide::below ? 0 : 2;
    return keep == KeepSide::below ? 1 : 3;
}

inline Point2 to_canonical(Point2 local, int quarter_turns) { return rotate_point(local, (4 - quarter_turns) % 4); }

/// Case id 1..8 from the trim side (one of four quarter turns) and whether
/// the curve reaches the far side at canonical corner (1,1) or (1,0).
inline TrapezoidCase classify_trapezoid(const DomainCell& cell) {
    if (cell.kind != CellKind::trapezoid) throw ArgumentError("classify_trapezoid: cell is not a trapezoid");
    const int r = rotation_for(cell.axis, cell.keep);
    const Point2 s = to_canonical(cell.edge_start, r), e = to_canonical(cell.edge_end, r);
    constexpr double eps = 1e-12;
    const bool s_far = std::abs(s.u - 1.0) <= eps, e_far = std::abs(e.u - 1.0) <= eps;
    if (s_far && e_far)
        throw AmbiguousCaseError("classify_trapezoid: curve passes through two far corners; re-split the cell");
    if (!s_far && !e_far) throw AmbiguousCaseError("classify_trapezoid: curve does not reach a cell corner");
    const Point2 through = s_far ? s : e;
    const int sub = through.v >= 0.5 ? 0 : 1;
    return {1 + 2 * r + sub, r};
}

/// Cell-local corner the curve passes through for a given case.
inline Point2 through_corner(const TrapezoidCase& c) {
    const Point2 canonical = (c.case_id - 1) % 2 == 0 ? Point2{1.0, 1.0} : Point2{1.0, 0.0};
    return rotate_point(canonical, c.rotation_quarter_turns);
}

// ---------------------------------------------------------------------------
// Boundary polynomial

struct BoundaryFit {
    BoundaryPolynomial polynomial;
    double residual = 0.0;
};

/// Least-squares f of degree p through samples (b_k, a_k) of the curved edge
/// in canonical coordinates, interpolating the first (b = 0) and last (b = 1)
/// samples exactly.
inline BoundaryFit fit_boundary_polynomial(const std::vector<Point2>& samples, int p, double tol) {
    if (p < 1 || p > max_compose_boundary_degree) throw ArgumentError("fit_boundary_polynomial: degree must be 1..3");
    if (samples.size() < 2 || samples.front().u != 0.0 || samples.back().u != 1.0)
        throw ArgumentError("fit_boundary_polynomial: samples must run from b = 0 to b = 1");
    const double a0 = samples.front().v, a1 = samples.back().v;
    // f(b) = a0 + (a1 - a0) b + b (1 - b) q(b), q of degree p - 2.
    std::vector<double> coeffs{a0, a1 - a0};
    coeffs.resize(static_cast<std::size_t>(p) + 1, 0.0);
    if (p >= 2) {
        const int unknowns = p - 1;
        Eigen::MatrixXd m(static_cast<int>(samples.size()), unknowns);
        Eigen::VectorXd rhs(static_cast<int>(samples.size()));
        for (std::size_t k = 0; k < samples.size(); ++k) {
            const double b = samples[k].u;
            double basis = b * (1.0 - b);
            for (int j = 0; j < unknowns; ++j, basis *= b) m(static_cast<int>(k), j) = basis;
            rhs[static_cast<int>(k)] = samples[k].v - (a0 + (a1 - a0) * b);
        }
        const Eigen::VectorXd q = m.colPivHouseholderQr().solve(rhs);
        // b (1 - b) b^j = b^(j+1) - b^(j+2)
        for (int j = 0; j < unknowns; ++j) {
            coeffs[j + 1] += q[j];
            coeffs[j + 2] -= q[j];
        }
    }
    BoundaryPolynomial f(coeffs);
    double residual = 0.0;
    for (const auto& s : samples) residual = std::max(residual, std::abs(f(s.u) - s.v));
    if (residual > tol)
        throw FitInfeasibleError("fit_boundary_polynomial: residual " + format_number(residual) +
                                     " exceeds tolerance; raise the degree or re-split the cell",
                                 residual);
    return {std::move(f), residual};
}

/// Canonical-coordinate samples (b, a) of a cell's curved edge at `count`
/// uniform curve parameters, ends exact.
inline std::vector<Point2> curved_edge_samples(const DomainCell& cell, const PiecewiseCurve2& curve, int count) {
    const int r = rotation_for(cell.axis, cell.keep);
    std::vector<Point2> out;
    for (int k = 0; k < count; ++k) {
        Point2 local;
        if (k == 0)
            local = cell.edge_start;
        else if (k == count - 1)
            local = cell.edge_end;
        else
            local = cell.to_local(eval_curve(curve, cell.param0 + (cell.param1 - cell.param0) * k / (count - 1)));
        const Point2 ab = to_canonical(local, r);
        out.push_back({ab.v, ab.u});
    }
    std::sort(out.begin(), out.end(), [](Point2 l, Point2 r2) { return l.u < r2.u; });
    return out;
}

/// The exact curved edge as a function a(b) in canonical coordinates, by
/// bisection on the curve parameter.
inline double canonical_edge_value(const DomainCell& cell, const PiecewiseCurve2& curve, double b) {
    const int r = rotation_for(cell.axis, cell.keep);
    auto canon = [&](double t) { return to_canonical(cell.to_local(eval_curve(curve, t)), r); };
    double lo = cell.param0, hi = cell.param1;
    const bool increasing = canon(hi).v > canon(lo).v;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((canon(mid).v < b) == increasing)
            lo = mid;
        else
            hi = mid;
    }
    return canon(0.5 * (lo + hi)).u;
}

/// Classifies and fits one trapezoid cell. Tries degree p, then 3; if the
/// fitted polynomial overshoots the cell, widens the cell along the
/// dependent axis so that f stays within [0, 1].
inline void fit_cell(DomainCell& cell, const PiecewiseCurve2& curve, int p, double tol) {
    if (cell.kind != CellKind::trapezoid) return;
    cell.trapezoid_case = classify_trapezoid(cell);
    cell.trim_edge = curved_edge_for_rotation(cell.trapezoid_case->rotation_quarter_turns);
    const auto samples = curved_edge_samples(cell, curve, 64);
    const auto check = curved_edge_samples(cell, curve, 257);

    double last_residual = 0.0;
    for (int degree = p; degree <= max_compose_boundary_degree; ++degree) {
        BoundaryFit fit;
        try {
            fit = fit_boundary_polynomial(samples, degree, tol);
        } catch (const FitInfeasibleError& e) {
            last_residual = e.residual;
            continue;
        }
        double residual = fit.residual;
        for (const auto& s : check) residual = std::max(residual, std::abs(fit.polynomial(s.u) - s.v));
        const auto range = polynomial_range(fit.polynomial);
        if (residual > tol || range.min < -1e-12) {
            last_residual = std::max(residual, -range.min);
            continue;
        }
        if (range.max > 1.0 + 1e-12) {
            const double scale = range.max;
            const bool u_dep = cell.axis == GraphAxis::u_of_v;
            double& lo = u_dep ? cell.u0 : cell.v0;
            double& hi = u_dep ? cell.u1 : cell.v1;
            const double width = hi - lo;
            Point2 gs = cell.to_global(cell.edge_start), ge = cell.to_global(cell.edge_end);
            if (cell.keep == KeepSide::below)
                hi = lo + scale * width;
            else
                lo = hi - scale * width;
            if (lo < 0.0 || hi > 1.0) {
                last_residual = scale - 1.0;
                continue;
            }
            auto pts = fit.polynomial.coefficients();
            for (auto& c : pts) c /= scale;
            fit.polynomial = BoundaryPolynomial(pts);
            residual /= scale;
            const Point2 old_s = cell.edge_start, old_e = cell.edge_end;
            cell.edge_start = cell.to_local(gs);
            cell.edge_end = cell.to_local(ge);
            // Host coordinates are unchanged; keep them exact.
            (u_dep ? cell.edge_start.v : cell.edge_start.u) = u_dep ? old_s.v : old_s.u;
            (u_dep ? cell.edge_end.v : cell.edge_end.u) = u_dep ? old_e.v : old_e.u;
        }
        cell.boundary_fn = std::move(fit.polynomial);
        cell.fit_residual = residual;
        return;
    }
    throw CellFitError("fit_cell: no boundary polynomial of degree <= 3 meets tolerance (residual " +
                           format_number(last_residual) + ")",
                       last_residual, cell.param0, cell.param1);
}

// ---------------------------------------------------------------------------
// Normalization

/// Standard-domain patch for one cell of `s`.
inline BezierSurface normalize_patch(const BezierSurface& s, const DomainCell& cell) {
    const auto sub = extract_subpatch(s, cell.u0, cell.u1, cell.v0, cell.v1);
    if (cell.kind == CellKind::rectangle) return sub;
    if (!cell.trapezoid_case || !cell.boundary_fn)
        throw ArgumentError("normalize_patch: trapezoid cell must be classified and fitted first");
    const int r = cell.trapezoid_case->rotation_quarter_turns;
    const auto canonical = rotate_net(sub, r);
    const auto composed = compose_reparameterize(canonical, *cell.boundary_fn);
    return rotate_net(composed, (4 - r) % 4);
}

/// Half-open membership (lower/left edges inclusive; the domain's upper
/// edges belong to the cells touching them).
inline bool cell_contains(const DomainCell& cell, Point2 uv) {
    auto in = [](double x, double lo, double hi) { return x >= lo && (x < hi || (hi == 1.0 && x <= hi)); };
    if (!in(uv.u, cell.u0, cell.u1) || !in(uv.v, cell.v0, cell.v1)) return false;
    if (cell.kind == CellKind::rectangle) return true;
    const int r = cell.trapezoid_case ? cell.trapezoid_case->rotation_quarter_turns : rotation_for(cell.axis, cell.keep);
    const Point2 ab = to_canonical(cell.to_local(uv), r);
    if (!cell.boundary_fn) throw ArgumentError("cell_contains: trapezoid cell has no boundary polynomial");
    return ab.u < (*cell.boundary_fn)(ab.v);
}

struct SegmentationOptions {
    int fit_degree = 2;
    double fit_tol = 1e-4;
};

/// Normalizes already fitted cells of one surface.
inline PatchDecomposition normalize_all(const BezierSurface& s, std::vector<DomainCell> cells) {
    PatchDecomposition d;
    d.patches.resize(cells.size());
    parallel_for(cells.size(), [&](std::size_t k) { d.patches[k] = normalize_patch(s, cells[k]); });
    d.cells = std::move(cells);
    return d;
}

/// Fits every trapezoid and normalizes every cell of one surface.
inline PatchDecomposition normalize_cells(const BezierSurface& s, std::vector<DomainCell> cells,
                                          const PiecewiseCurve2& curve, const SegmentationOptions& opts) {
    for (auto& c : cells) fit_cell(c, curve, opts.fit_degree, opts.fit_tol);
    return normalize_all(s, std::move(cells));
}

/// Decomposes and fits one side, inserting the midpoint of any cell whose
/// boundary polynomial fails into `cuts` and retrying. The updated cuts are
/// left in place so the other side of the trim can share them.
inline std::vector<DomainCell> fit_with_refinement(const MonotoneSegment& seg, KeepSide keep,
                                                   std::vector<double>& cuts, const SegmentationOptions& opts,
                                                   int max_splits = 32) {
    if (cuts.empty()) cuts = default_cuts(seg);
    for (int splits = 0;; ++splits) {
        auto cells = decompose_domain(seg, keep, cuts);
        try {
            for (auto& c : cells) fit_cell(c, seg.curve, opts.fit_degree, opts.fit_tol);
            return cells;
        } catch (const CellFitError& e) {
            if (splits >= max_splits) throw;
            const double mid = 0.5 * (e.param0 + e.param1);
            cuts.insert(std::upper_bound(cuts.begin(), cuts.end(), mid), mid);
        }
    }
}

/// The single monotone segment spanning a trim chain; multi-piece chains are
/// not supported by the decomposition.
inline MonotoneSegment single_monotone_segment(const PiecewiseCurve2& curve) {
    auto segs = split_monotone(curve);
    if (segs.size() != 1)
        throw Error("segmentation: trim chain splits into " + std::to_string(segs.size()) +
                    " monotone pieces; only single-valued trim chains are supported");
    return std::move(segs.front());
}

}  // namespace watertight
