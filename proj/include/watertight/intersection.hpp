#pragma once

// Intersection data for two Bezier surfaces: marched intersection points with
// their parameters on both surfaces, the interpolated space curve, the two
// domain curves, their lifts onto the surfaces, and gap measurement.

#include "bezier.hpp"

#include <Eigen/Dense>

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace watertight {

struct IntersectionPoint {
    Point3 position;
    Point2 params_a;  // on the first surface
    Point2 params_b;  // on the second surface
    double residual_a = 0.0;
    double residual_b = 0.0;

    friend bool operator==(const IntersectionPoint&, const IntersectionPoint&) = default;
};

struct GapReport {
    double max_gap = 0.0;
    double rms_gap = 0.0;
    int sample_count = 0;
    Point3 worst_location;
    int flagged_samples = 0;  // samples whose distance came from the grid fallback

    friend bool operator==(const GapReport&, const GapReport&) = default;
};

struct IntersectionData {
    std::vector<IntersectionPoint> points;
    PiecewiseCurve3 curve_c;
    PiecewiseCurve2 domain_curve_a;
    PiecewiseCurve2 domain_curve_b;
    std::vector<Point3> lifted_a;
    std::vector<Point3> lifted_b;

    friend bool operator==(const IntersectionData&, const IntersectionData&) = default;
};

/// A marched branch. `closed` means the last point connects back to the first.
struct IntersectionBranch {
    std::vector<IntersectionPoint> points;
    bool closed = false;
    std::string diagnostic;
};

namespace detail {

inline Point2 clamp_unit(Point2 p) { return {std::clamp(p.u, 0.0, 1.0), std::clamp(p.v, 0.0, 1.0)}; }

// Unchecked evaluation; Newton iterates may step slightly outside the domain.
inline Point3 eval_any(const BezierSurface& s, double u, double v) {
    return eval_surface_weighted(s, 1.0 - u, u, 1.0 - v, v);
}

inline Eigen::Vector3d vec(Point3 p) { return {p.x, p.y, p.z}; }

/// Closest sample of a res x res grid of parameters.
inline Point2 grid_closest(const BezierSurface& s, Point3 p, int res, double* dist = nullptr) {
    Point2 best{};
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < res; ++i)
        for (int j = 0; j < res; ++j) {
            const Point2 uv{static_cast<double>(i) / (res - 1), static_cast<double>(j) / (res - 1)};
            const double d = distance(eval_surface(s, uv), p);
            if (d < best_d) {
                best_d = d;
                best = uv;
            }
        }
    if (dist) *dist = best_d;
    return best;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Point inversion

/// Newton minimization of |S(u,v) - p|^2 from `seed`, with parameters kept in
/// [0,1]^2 (coordinates pinned at a bound while the step pushes outward).
/// Converges when the parameter update drops below 1e-12; at most 50 steps.
inline Point2 invert_point(const BezierSurface& s, Point3 p, Point2 seed) {
    if (!(seed.u >= 0.0 && seed.u <= 1.0 && seed.v >= 0.0 && seed.v <= 1.0))
        throw DomainError("invert_point: seed outside [0, 1]^2");
    Point2 x = seed;
    double last_update = std::numeric_limits<double>::infinity();
    auto objective = [&](Point2 q) {
        const auto d = eval_surface(s, q) - p;
        return dot(d, d);
    };
    for (int iter = 0; iter < 50; ++iter) {
        const auto d = surface_derivatives(s, x.u, x.v);
        const Point3 r = d.p - p;
        const double gu = dot(d.su, r), gv = dot(d.sv, r);
        double huu = dot(d.su, d.su) + dot(d.suu, r);
        double huv = dot(d.su, d.sv) + dot(d.suv, r);
        double hvv = dot(d.sv, d.sv) + dot(d.svv, r);
        if (huu <= 0.0 || huu * hvv - huv * huv <= 0.0) {
            huu = dot(d.su, d.su);
            huv = dot(d.su, d.sv);
            hvv = dot(d.sv, d.sv);
        }
        auto solve = [&](bool fix_u, bool fix_v) -> Point2 {
            if (fix_u && fix_v) return {0.0, 0.0};
            if (fix_u) return {0.0, hvv > 0.0 ? -gv / hvv : 0.0};
            if (fix_v) return {huu > 0.0 ? -gu / huu : 0.0, 0.0};
            const double det = huu * hvv - huv * huv;
            if (det == 0.0) return {huu > 0.0 ? -gu / huu : 0.0, hvv > 0.0 ? -gv / hvv : 0.0};
            return {(-gu * hvv + gv * huv) / det, (gu * huv - gv * huu) / det};
        };
        bool fix_u = false, fix_v = false;
        Point2 step = solve(false, false);
        for (int pass = 0; pass < 2; ++pass) {
            const bool out_u = (x.u <= 0.0 && step.u < 0.0) || (x.u >= 1.0 && step.u > 0.0);
            const bool out_v = (x.v <= 0.0 && step.v < 0.0) || (x.v >= 1.0 && step.v > 0.0);
            if (!out_u && !out_v) break;
            fix_u = fix_u || out_u;
            fix_v = fix_v || out_v;
            step = solve(fix_u, fix_v);
        }
        const double f0 = dot(r, r);
        Point2 next = detail::clamp_unit(x + step);
        for (int halving = 0; halving < 30 && objective(next) > f0; ++halving) {
            step = 0.5 * step;
            next = detail::clamp_unit(x + step);
        }
        last_update = norm(next - x);
        x = next;
        if (last_update < 1e-12) return x;
    }
    if (last_update < 1e-9) return x;
    throw InversionError("invert_point: no convergence after 50 iterations", x, std::sqrt(objective(x)));
}

/// Distance from p to s; Newton from `seed` when given, else from a coarse grid.
/// Falls back to a 256x256 grid when Newton fails (reported through `flagged`).
inline double distance_to_surface(const BezierSurface& s, Point3 p, std::optional<Point2> seed, bool* flagged = nullptr,
                                  Point2* foot = nullptr) {
    const Point2 start = seed ? detail::clamp_unit(*seed) : detail::grid_closest(s, p, 24);
    try {
        const auto uv = invert_point(s, p, start);
        if (foot) *foot = uv;
        if (flagged) *flagged = false;
        return distance(eval_surface(s, uv), p);
    } catch (const InversionError&) {
        double d = 0.0;
        const auto uv = detail::grid_closest(s, p, 256, &d);
        if (foot) *foot = uv;
        if (flagged) *flagged = true;
        return d;
    }
}

// ---------------------------------------------------------------------------
// Marching

namespace detail {

using Vec4 = Eigen::Vector4d;


inline Point3 residual(const BezierSurface& a, const BezierSurface& b, const Vec4& x) {
    return eval_any(a, x[0], x[1]) - eval_any(b, x[2], x[3]);
}

inline bool in_unit_box(const Vec4& x, double slack = 0.0) {
    for (int k = 0; k < 4; ++k)
        if (x[k] < -slack || x[k] > 1.0 + slack) return false;
    return true;
}

/// Constraint closing the 3x4 intersection system.
struct Constraint {
    enum class Kind { plane, fixed_param } kind = Kind::plane;
    Point3 origin;     // plane: a point on it
    Point3 normal;     // plane: unit normal
    int index = 0;     // fixed_param: which parameter
    double value = 0;  // fixed_param: its value
};

/// Newton on S1(u,v) - S2(s,t) = 0 plus one constraint. Returns true when the
/// intersection residual is within tol.
inline bool newton_correct(const BezierSurface& a, const BezierSurface& b, Vec4& x, const Constraint& c,
                           double tol) {
    if (c.kind == Constraint::Kind::fixed_param) x[c.index] = c.value;
    for (int iter = 0; iter < 30; ++iter) {
        const auto da = surface_derivatives(a, x[0], x[1]);
        const auto db = surface_derivatives(b, x[2], x[3]);
        const Point3 f = da.p - db.p;
        Eigen::Matrix4d j = Eigen::Matrix4d::Zero();
        j.block<3, 1>(0, 0) = vec(da.su);
        j.block<3, 1>(0, 1) = vec(da.sv);
        j.block<3, 1>(0, 2) = -vec(db.su);
        j.block<3, 1>(0, 3) = -vec(db.sv);
        Vec4 rhs;
        rhs.head<3>() = -vec(f);
        if (c.kind == Constraint::Kind::plane) {
            j(3, 0) = dot(da.su, c.normal);
            j(3, 1) = dot(da.sv, c.normal);
            rhs[3] = -dot(da.p - c.origin, c.normal);
        } else {
            j(3, c.index) = 1.0;
            rhs[3] = c.value - x[c.index];
        }
        Eigen::FullPivLU<Eigen::Matrix4d> lu(j);
        if (!lu.isInvertible()) return false;
        const Vec4 dx = lu.solve(rhs);
        if (!dx.allFinite()) return false;
        x += dx;
        if (c.kind == Constraint::Kind::fixed_param) x[c.index] = c.value;
        if (x.cwiseAbs().maxCoeff() > 10.0) return false;
        if (dx.norm() < 1e-15 || (norm(residual(a, b, x)) <= 0.01 * tol && dx.norm() < 1e-12)) break;
    }
    return norm(residual(a, b, x)) <= tol;
}

/// Minimum-norm Gauss-Newton onto the intersection, for seeding.
inline bool project_to_intersection(const BezierSurface& a, const BezierSurface& b, Vec4& x, double tol) {
    for (int iter = 0; iter < 60; ++iter) {
        const auto da = surface_derivatives(a, x[0], x[1]);
        const auto db = surface_derivatives(b, x[2], x[3]);
        const Point3 f = da.p - db.p;
        Eigen::Matrix<double, 3, 4> j;
        j.col(0) = vec(da.su);
        j.col(1) = vec(da.sv);
        j.col(2) = -vec(db.su);
        j.col(3) = -vec(db.sv);
        const Eigen::Matrix3d jjt = j * j.transpose();
        Eigen::FullPivLU<Eigen::Matrix3d> lu(jjt);
        if (!lu.isInvertible()) return false;
        const Vec4 dx = -j.transpose() * lu.solve(vec(f));
        x += dx;
        for (int k = 0; k < 4; ++k) x[k] = std::clamp(x[k], 0.0, 1.0);
        if (norm(residual(a, b, x)) <= 0.01 * tol || dx.norm() < 1e-15) break;
    }
    return norm(residual(a, b, x)) <= tol;
}

inline Point3 unit(Point3 p) {
    const double n = norm(p);
    return n > 0.0 ? (1.0 / n) * p : p;
}

inline Point3 tangent_at(const BezierSurface& a, const BezierSurface& b, const Vec4& x) {
    const auto da = surface_derivatives(a, x[0], x[1]);
    const auto db = surface_derivatives(b, x[2], x[3]);
    return unit(cross(cross(da.su, da.sv), cross(db.su, db.sv)));
}

/// Parameter step realizing a 3D displacement on one surface (least squares).
inline Point2 param_step(const BezierSurface& s, double u, double v, Point3 delta) {
    const auto d = surface_derivatives(s, u, v);
    Eigen::Matrix<double, 3, 2> j;
    j.col(0) = vec(d.su);
    j.col(1) = vec(d.sv);
    const Eigen::Vector2d x = j.colPivHouseholderQr().solve(vec(delta));
    return {x[0], x[1]};
}

inline IntersectionPoint make_point(const BezierSurface& a, const BezierSurface& b, const Vec4& x) {
    const Point3 pa = eval_surface(a, x[0], x[1]);
    const Point3 pb = eval_surface(b, x[2], x[3]);
    IntersectionPoint ip;
    ip.position = 0.5 * (pa + pb);
    ip.params_a = {x[0], x[1]};
    ip.params_b = {x[2], x[3]};
    ip.residual_a = distance(pa, ip.position);
    ip.residual_b = distance(pb, ip.position);
    return ip;
}

inline Vec4 state_of(const IntersectionPoint& p) { return {p.params_a.u, p.params_a.v, p.params_b.u, p.params_b.v}; }

/// Lands an out-of-domain corrected state on the domain boundary by pinning the
/// worst-violating parameter at its bound.
inline bool land_on_boundary(const BezierSurface& a, const BezierSurface& b, const Vec4& inside, const Vec4& outside,
                             double tol, Vec4& landed) {
    Vec4 target = outside;
    for (int attempt = 0; attempt < 4; ++attempt) {
        int worst = -1;
        double worst_excess = 0.0, bound = 0.0;
        for (int k = 0; k < 4; ++k) {
            const double excess = target[k] < 0.0 ? -target[k] : (target[k] > 1.0 ? target[k] - 1.0 : 0.0);
            if (excess > worst_excess) {
                worst_excess = excess;
                worst = k;
                bound = target[k] < 0.0 ? 0.0 : 1.0;
            }
        }
        if (worst < 0) {
            landed = target;
            return true;
        }
        // Start from the interpolated crossing of the violated parameter.
        const double span = target[worst] - inside[worst];
        const double frac = span != 0.0 ? std::clamp((bound - inside[worst]) / span, 0.0, 1.0) : 0.0;
        Vec4 x = inside + frac * (target - inside);
        Constraint c;
        c.kind = Constraint::Kind::fixed_param;
        c.index = worst;
        c.value = bound;
        if (!newton_correct(a, b, x, c, tol)) return false;
        target = x;
        target[worst] = bound;
        for (int k = 0; k < 4; ++k)
            if (k != worst && std::abs(target[k] - std::clamp(target[k], 0.0, 1.0)) < 1e-13)
                target[k] = std::clamp(target[k], 0.0, 1.0);
    }
    return false;
}

enum class StopReason { boundary, closed, failure, limit };

inline StopReason march_direction(const BezierSurface& a, const BezierSurface& b, const Vec4& start, double sign,
                                  double step, double tol, std::vector<IntersectionPoint>& out,
                                  const Point3& loop_start, std::string& diagnostic) {
    Vec4 x = start;
    Point3 prev_dir = sign * tangent_at(a, b, x);
    double travelled = 0.0;
    constexpr int max_points = 20000;
    for (int count = 0; count < max_points; ++count) {
        Point3 dir = tangent_at(a, b, x);
        if (norm(dir) == 0.0) {
            diagnostic = "tangent surfaces: intersection direction undefined";
            return StopReason::failure;
        }
        if (dot(dir, prev_dir) < 0.0) dir = -1.0 * dir;
        const Point3 here = eval_surface(a, x[0], x[1]);

        bool accepted = false;
        Vec4 next;
        double h = step;
        for (int tries = 0; tries < 6 && !accepted; ++tries, h *= 0.5) {
            const Point2 da = param_step(a, x[0], x[1], h * dir);
            const Point2 db = param_step(b, x[2], x[3], h * dir);
            next = x + Vec4(da.u, da.v, db.u, db.v);
            Constraint c;
            c.origin = here + h * dir;
            c.normal = dir;
            accepted = newton_correct(a, b, next, c, tol);
        }
        if (!accepted) {
            diagnostic = "Newton corrector diverged; branch truncated";
            return StopReason::failure;
        }
        if (!in_unit_box(next)) {
            Vec4 landed;
            if (!land_on_boundary(a, b, x, next, tol, landed)) {
                diagnostic = "could not land the branch on the domain boundary";
                return StopReason::failure;
            }
            auto ip = make_point(a, b, landed);
            // Already on the boundary (e.g. seeded there): nothing to add.
            if (distance(ip.position, out.back().position) < 1e-3 * step) return StopReason::boundary;
            // Keep spacing within half a step of nominal at the boundary.
            if (out.size() > 1 && distance(ip.position, out.back().position) < 0.5 * step &&
                distance(ip.position, out[out.size() - 2].position) <= 1.5 * step)
                out.back() = ip;
            else
                out.push_back(ip);
            return StopReason::boundary;
        }
        auto ip = make_point(a, b, next);
        travelled += distance(ip.position, here);
        if (travelled > 2.5 * step && distance(ip.position, loop_start) < 0.75 * step) return StopReason::closed;
        out.push_back(ip);
        prev_dir = dir;
        x = next;
    }
    diagnostic = "point limit reached";
    return StopReason::limit;
}

}  // namespace detail

/// Marches one intersection branch: coarse-grid seed, tangent predictor along
/// the cross product of the normals, Newton corrector on the step plane.
inline IntersectionBranch march_branch(const BezierSurface& a, const BezierSurface& b, double step, double tol) {
    if (!(step > 0.0) || !(tol > 0.0)) throw ArgumentError("march_intersection: step and tol must be positive");
    IntersectionBranch branch;

    // Seeds: closest pairs of a 24x24 sampling of each surface.
    constexpr int res = 24;
    std::vector<Point3> pa, pb;
    for (int i = 0; i < res; ++i)
        for (int j = 0; j < res; ++j) {
            pa.push_back(eval_surface(a, static_cast<double>(i) / (res - 1), static_cast<double>(j) / (res - 1)));
            pb.push_back(eval_surface(b, static_cast<double>(i) / (res - 1), static_cast<double>(j) / (res - 1)));
        }
    struct Candidate {
        double d;
        std::size_t ia, ib;
    };
    std::vector<Candidate> candidates;
    for (std::size_t ia = 0; ia < pa.size(); ++ia) {
        Candidate best{std::numeric_limits<double>::infinity(), ia, 0};
        for (std::size_t ib = 0; ib < pb.size(); ++ib) {
            const double d = distance(pa[ia], pb[ib]);
            if (d < best.d) best = {d, ia, ib};
        }
        candidates.push_back(best);
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& l, const Candidate& r) {
        return l.d != r.d ? l.d < r.d : l.ia < r.ia;
    });

    std::optional<detail::Vec4> seed;
    for (std::size_t k = 0; k < std::min<std::size_t>(candidates.size(), 12) && !seed; ++k) {
        const auto& c = candidates[k];
        const auto uv = [&](std::size_t idx) {
            return Point2{static_cast<double>(idx / res) / (res - 1), static_cast<double>(idx % res) / (res - 1)};
        };
        const Point2 ua = uv(c.ia), ub = uv(c.ib);
        detail::Vec4 x(ua.u, ua.v, ub.u, ub.v);
        if (detail::project_to_intersection(a, b, x, tol) && detail::in_unit_box(x)) seed = x;
    }
    if (!seed) {
        branch.diagnostic = "no intersection seed found";
        return branch;
    }

    const auto start = detail::make_point(a, b, *seed);
    std::vector<IntersectionPoint> forward{start};
    std::string diag;
    const auto why = detail::march_direction(a, b, *seed, 1.0, step, tol, forward, start.position, diag);
    if (why == detail::StopReason::closed) {
        branch.points = std::move(forward);
        branch.closed = true;
        return branch;
    }
    std::vector<IntersectionPoint> backward{start};
    std::string diag_back;
    detail::march_direction(a, b, *seed, -1.0, step, tol, backward, start.position, diag_back);
    backward.erase(backward.begin());
    branch.points.assign(backward.rbegin(), backward.rend());
    branch.points.insert(branch.points.end(), forward.begin(), forward.end());
    branch.diagnostic = diag.empty() ? diag_back : diag;
    return branch;
}

inline std::vector<IntersectionPoint> march_intersection(const BezierSurface& a, const BezierSurface& b, double step,
                                                         double tol) {
    return march_branch(a, b, step, tol).points;
}

/// Re-solves `count` points spaced evenly by chord length along a marched
/// branch. Open branches keep their two end points.
inline std::vector<IntersectionPoint> resample_branch(const BezierSurface& a, const BezierSurface& b,
                                                      const IntersectionBranch& branch, int count, double tol) {
    auto pts = branch.points;
    if (branch.closed && !pts.empty()) pts.push_back(pts.front());
    if (pts.size() < 2) throw ArgumentError("resample_branch: branch has fewer than two points");
    if (count < 2) throw ArgumentError("resample_branch: need at least two points");
    std::vector<double> cum{0.0};
    for (std::size_t k = 1; k < pts.size(); ++k) cum.push_back(cum.back() + distance(pts[k].position, pts[k - 1].position));
    const double total = cum.back();
    const int n_out = branch.closed ? count + 1 : count;
    std::vector<IntersectionPoint> out;
    for (int k = 0; k < n_out; ++k) {
        if (k == 0) {
            out.push_back(pts.front());
            continue;
        }
        if (k == n_out - 1) {
            if (!branch.closed) out.push_back(pts.back());
            continue;
        }
        const double target = total * k / (n_out - 1);
        const auto it = std::upper_bound(cum.begin(), cum.end(), target);
        const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(std::distance(cum.begin(), it)), pts.size() - 1);
        const std::size_t lo = i - 1;
        const double frac = (target - cum[lo]) / (cum[i] - cum[lo]);
        detail::Vec4 x = detail::state_of(pts[lo]) + frac * (detail::state_of(pts[i]) - detail::state_of(pts[lo]));
        detail::Constraint c;
        c.origin = pts[lo].position + frac * (pts[i].position - pts[lo].position);
        c.normal = detail::unit(pts[i].position - pts[lo].position);
        if (!detail::newton_correct(a, b, x, c, tol) || !detail::in_unit_box(x, 1e-12))
            throw Error("resample_branch: could not re-solve intersection point " + std::to_string(k));
        for (int d = 0; d < 4; ++d) x[d] = std::clamp(x[d], 0.0, 1.0);
        out.push_back(detail::make_point(a, b, x));
    }
    return out;
}

/// Splits a closed loop at two antipodal breakpoints into two open chains that
/// share their end points.
inline std::pair<std::vector<IntersectionPoint>, std::vector<IntersectionPoint>> split_closed_loop(
    const std::vector<IntersectionPoint>& loop) {
    if (loop.size() < 4) throw ArgumentError("split_closed_loop: need at least four points");
    const std::size_t half = loop.size() / 2;
    std::vector<IntersectionPoint> first(loop.begin(), loop.begin() + static_cast<std::ptrdiff_t>(half) + 1);
    std::vector<IntersectionPoint> second(loop.begin() + static_cast<std::ptrdiff_t>(half), loop.end());
    second.push_back(loop.front());
    return {std::move(first), std::move(second)};
}

// ---------------------------------------------------------------------------
// Interpolation

/// Chord-length parameters normalized to [0, 1].
template <class P>
std::vector<double> chord_length_knots(const std::vector<P>& pts) {
    if (pts.size() < 2) throw ArgumentError("interpolation needs at least two points");
    std::vector<double> knots{0.0};
    for (std::size_t k = 1; k < pts.size(); ++k) {
        const double d = distance(pts[k], pts[k - 1]);
        if (!(d > 0.0)) throw ArgumentError("interpolation: consecutive points " + std::to_string(k - 1) + " and " +
                                            std::to_string(k) + " coincide");
        knots.push_back(knots.back() + d);
    }
    const double total = knots.back();
    for (auto& k : knots) k /= total;
    knots.back() = 1.0;
    return knots;
}

/// C1 piecewise-cubic Hermite interpolant. Tangents: three-point rule at
/// interior points, one-sided three-point rule at the ends (periodic rule when
/// the first and last points coincide). Two points give a single linear segment.
template <class P>
PiecewiseBezierCurve<P> interpolate_hermite(const std::vector<P>& pts, std::vector<double> knots = {}) {
    if (pts.size() < 2) throw ArgumentError("interpolation needs at least two points");
    if (knots.empty()) knots = chord_length_knots(pts);
    if (knots.size() != pts.size()) throw ArgumentError("interpolation: knot count must match point count");
    for (std::size_t k = 1; k < pts.size(); ++k)
        if (pts[k] == pts[k - 1])
            throw ArgumentError("interpolation: consecutive points " + std::to_string(k - 1) + " and " +
                                std::to_string(k) + " coincide");

    const std::size_t n = pts.size();
    if (n == 2) return PiecewiseBezierCurve<P>({BezierCurve<P>({pts[0], pts[1]})}, {0.0, 1.0});

    std::vector<P> slopes(n - 1);
    std::vector<double> h(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = knots[k + 1] - knots[k];
        slopes[k] = (1.0 / h[k]) * (pts[k + 1] - pts[k]);
    }
    std::vector<P> tangents(n);
    for (std::size_t k = 1; k + 1 < n; ++k)
        tangents[k] = (1.0 / (h[k - 1] + h[k])) * (h[k] * slopes[k - 1] + h[k - 1] * slopes[k]);
    if (n >= 4 && pts.front() == pts.back()) {
        // Closed polygon: the ends share the periodic three-point tangent.
        const double h0 = h[n - 2], h1 = h[0];
        tangents[0] = (1.0 / (h0 + h1)) * (h1 * slopes[n - 2] + h0 * slopes[0]);
        tangents[n - 1] = tangents[0];
    } else {
        tangents[0] = (1.0 / (h[0] + h[1])) * ((2.0 * h[0] + h[1]) * slopes[0] - h[0] * slopes[1]);
        tangents[n - 1] =
            (1.0 / (h[n - 3] + h[n - 2])) * ((2.0 * h[n - 2] + h[n - 3]) * slopes[n - 2] - h[n - 2] * slopes[n - 3]);
    }

    std::vector<BezierCurve<P>> segs;
    for (std::size_t k = 0; k + 1 < n; ++k)
        segs.emplace_back(std::vector<P>{pts[k], pts[k] + (h[k] / 3.0) * tangents[k],
                                         pts[k + 1] - (h[k] / 3.0) * tangents[k + 1], pts[k + 1]});
    return PiecewiseBezierCurve<P>(std::move(segs), std::move(knots));
}

inline PiecewiseCurve3 interpolate_space_curve(const std::vector<Point3>& points, std::vector<double> knots = {}) {
    return interpolate_hermite(points, std::move(knots));
}

/// As interpolate_space_curve in the parameter plane; control points are
/// clamped into [0,1]^2 so the curve stays in the domain.
inline PiecewiseCurve2 interpolate_domain_curve(const std::vector<Point2>& params, std::vector<double> knots = {}) {
    for (const auto& p : params)
        if (!(p.u >= 0.0 && p.u <= 1.0 && p.v >= 0.0 && p.v <= 1.0))
            throw DomainError("interpolate_domain_curve: parameter pair outside [0, 1]^2");
    auto c = interpolate_hermite(params, std::move(knots));
    for (auto& seg : c.segments)
        for (auto& p : seg.control_points) p = detail::clamp_unit(p);
    return c;
}

inline std::vector<Point3> lift_domain_curve(const BezierSurface& s, const PiecewiseCurve2& c, int samples) {
    if (samples < 2) throw ArgumentError("lift_domain_curve: need at least two samples");
    std::vector<Point3> out;
    out.reserve(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k) {
        const double t = k == samples - 1 ? 1.0 : static_cast<double>(k) / (samples - 1);
        out.push_back(eval_surface(s, eval_curve(c, t)));
    }
    return out;
}

/// Distance from `samples` uniform points of `curve` to `s`. When a domain
/// curve sharing the same global parameter is given it seeds the inversion.
inline GapReport measure_gap(const PiecewiseCurve3& curve, const BezierSurface& s, int samples,
                             const PiecewiseCurve2* seed_curve = nullptr) {
    if (samples < 2) throw ArgumentError("measure_gap: need at least two samples");
    std::vector<double> d(static_cast<std::size_t>(samples));
    std::vector<Point3> where(d.size());
    std::vector<char> flagged(d.size(), 0);
    parallel_for(d.size(), [&](std::size_t k) {
        const double w = k + 1 == d.size() ? 1.0 : static_cast<double>(k) / (samples - 1);
        const Point3 p = eval_curve(curve, w);
        std::optional<Point2> seed;
        if (seed_curve) seed = eval_curve(*seed_curve, w);
        bool flag = false;
        d[k] = distance_to_surface(s, p, seed, &flag);
        where[k] = p;
        flagged[k] = flag ? 1 : 0;
    });
    GapReport r;
    r.sample_count = samples;
    double sum_sq = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
        sum_sq += d[k] * d[k];
        if (k == 0 || d[k] > r.max_gap) {
            r.max_gap = d[k];
            r.worst_location = where[k];
        }
        r.flagged_samples += flagged[k];
    }
    r.rms_gap = std::min(r.max_gap, std::sqrt(sum_sq / static_cast<double>(d.size())));
    return r;
}

/// Pointwise distance between two lifted polylines sampled at the same
/// global parameters.
inline GapReport lifted_gap(const std::vector<Point3>& a, const std::vector<Point3>& b) {
    if (a.size() != b.size() || a.size() < 2) throw ArgumentError("lifted_gap: polylines must match in size");
    GapReport r;
    r.sample_count = static_cast<int>(a.size());
    double sum_sq = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = distance(a[k], b[k]);
        sum_sq += d * d;
        if (k == 0 || d > r.max_gap) {
            r.max_gap = d;
            r.worst_location = a[k];
        }
    }
    r.rms_gap = std::min(r.max_gap, std::sqrt(sum_sq / static_cast<double>(a.size())));
    return r;
}

/// Builds C, C1, C2 on shared breakpoints (chord length of the 3D points) and
/// lifts the domain curves with `samples_per_segment` samples per segment.
inline IntersectionData build_intersection_data(const BezierSurface& a, const BezierSurface& b,
                                                std::vector<IntersectionPoint> points, int samples_per_segment = 40) {
    if (points.size() < 2) throw ArgumentError("build_intersection_data: need at least two intersection points");
    IntersectionData data;
    std::vector<Point3> pos;
    std::vector<Point2> ua, ub;
    for (const auto& p : points) {
        pos.push_back(p.position);
        ua.push_back(p.params_a);
        ub.push_back(p.params_b);
    }
    const auto knots = chord_length_knots(pos);
    data.curve_c = interpolate_space_curve(pos, knots);
    data.domain_curve_a = interpolate_domain_curve(ua, knots);
    data.domain_curve_b = interpolate_domain_curve(ub, knots);
    const int samples = samples_per_segment * static_cast<int>(points.size() - 1) + 1;
    data.lifted_a = lift_domain_curve(a, data.domain_curve_a, samples);
    data.lifted_b = lift_domain_curve(b, data.domain_curve_b, samples);
    data.points = std::move(points);
    return data;
}

}  // namespace watertight
