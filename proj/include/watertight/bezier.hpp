#pragma once

// Bernstein/Bezier algebra: basis evaluation, curves, tensor-product surfaces,
// subdivision, degree elevation/reduction and basis change.

#include "core.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace watertight {

// ---------------------------------------------------------------------------
// Bernstein basis

/// All degree-l Bernstein basis values at x, by the triangular recurrence
/// B_{k,l} = (1-x) B_{k,l-1} + x B_{k-1,l-1}.
inline std::vector<double> bernstein_all(int l, double x) {
    if (l < 0) throw IndexError("bernstein_all: negative degree");
    std::vector<double> b(static_cast<std::size_t>(l) + 1, 0.0);
    b[0] = 1.0;
    const double s = 1.0 - x;
    for (int j = 1; j <= l; ++j) {
        double saved = 0.0;
        for (int k = 0; k < j; ++k) {
            const double tmp = b[k];
            b[k] = saved + s * tmp;
            saved = x * tmp;
        }
        b[j] = saved;
    }
    return b;
}

inline double bernstein_basis(int k, int l, double x) {
    if (l < 0 || k < 0 || k > l)
        throw IndexError("bernstein_basis: index " + std::to_string(k) + " outside [0, " + std::to_string(l) + "]");
    return bernstein_all(l, x)[static_cast<std::size_t>(k)];
}

/// Values, first and second derivatives of all degree-l basis functions at x.
struct BasisDerivatives {
    std::vector<double> value, first, second;
};

inline BasisDerivatives bernstein_derivatives(int l, double x) {
    BasisDerivatives d;
    d.value = bernstein_all(l, x);
    d.first.assign(d.value.size(), 0.0);
    d.second.assign(d.value.size(), 0.0);
    if (l >= 1) {
        const auto lower = bernstein_all(l - 1, x);
        for (int k = 0; k <= l; ++k) {
            const double left = k >= 1 ? lower[k - 1] : 0.0;
            const double right = k <= l - 1 ? lower[k] : 0.0;
            d.first[k] = l * (left - right);
        }
    }
    if (l >= 2) {
        const auto lower = bernstein_all(l - 2, x);
        auto at = [&](int k) { return (k >= 0 && k <= l - 2) ? lower[k] : 0.0; };
        for (int k = 0; k <= l; ++k) d.second[k] = l * (l - 1) * (at(k - 2) - 2.0 * at(k - 1) + at(k));
    }
    return d;
}

// ---------------------------------------------------------------------------
// de Casteljau

/// Evaluates the Bezier polygon with explicit weights (one_minus_t, t).
/// Passing both weights makes evaluation of a reversed polygon at the
/// complementary weights bitwise identical to the forward evaluation.
template <class P>
P de_casteljau(std::span<const P> pts, double one_minus_t, double t) {
    if (pts.empty()) throw ArgumentError("de_casteljau: empty control polygon");
    std::vector<P> work(pts.begin(), pts.end());
    for (std::size_t level = work.size() - 1; level > 0; --level)
        for (std::size_t i = 0; i < level; ++i) work[i] = one_minus_t * work[i] + t * work[i + 1];
    return work[0];
}

/// Splits a control polygon at t into (left, right) halves.
template <class P>
std::pair<std::vector<P>, std::vector<P>> split_polygon(std::span<const P> pts, double t) {
    const std::size_t n = pts.size();
    std::vector<P> work(pts.begin(), pts.end());
    std::vector<P> left(n), right(n);
    left[0] = work[0];
    right[n - 1] = work[n - 1];
    const double s = 1.0 - t;
    for (std::size_t level = 1; level < n; ++level) {
        for (std::size_t i = 0; i + level < n; ++i) work[i] = s * work[i] + t * work[i + 1];
        left[level] = work[0];
        right[n - 1 - level] = work[n - 1 - level];
    }
    return {std::move(left), std::move(right)};
}

/// Control polygon of the restriction to [t0, t1], reparameterized to [0, 1].
template <class P>
std::vector<P> restrict_polygon(std::span<const P> pts, double t0, double t1) {
    auto left = split_polygon<P>(pts, t1).first;
    if (t0 == 0.0) return left;
    return split_polygon<P>(std::span<const P>(left), t0 / t1).second;
}

/// One-step-at-a-time degree elevation; endpoints are copied verbatim.
template <class P>
std::vector<P> elevate_polygon(std::vector<P> pts, int target) {
    while (static_cast<int>(pts.size()) - 1 < target) {
        const int n = static_cast<int>(pts.size()) - 1;
        std::vector<P> next(pts.size() + 1);
        next.front() = pts.front();
        next.back() = pts.back();
        for (int i = 1; i <= n; ++i) {
            const double a = static_cast<double>(i) / (n + 1);
            next[i] = a * pts[i - 1] + (1.0 - a) * pts[i];
        }
        pts = std::move(next);
    }
    return pts;
}

// ---------------------------------------------------------------------------
// Curves

template <class P>
struct BezierCurve {
    std::vector<P> control_points;

    BezierCurve() = default;
    explicit BezierCurve(std::vector<P> pts) : control_points(std::move(pts)) {
        if (control_points.empty()) throw ArgumentError("BezierCurve: needs at least one control point");
        for (const auto& p : control_points)
            if (!is_finite(p)) throw DomainError("BezierCurve: non-finite control point");
    }

    int degree() const { return static_cast<int>(control_points.size()) - 1; }
    std::span<const P> points() const { return control_points; }

    friend bool operator==(const BezierCurve&, const BezierCurve&) = default;
};

using BezierCurve2 = BezierCurve<Point2>;
using BezierCurve3 = BezierCurve<Point3>;

template <class P>
P eval(const BezierCurve<P>& c, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("eval: curve parameter outside [0, 1]");
    return de_casteljau<P>(c.points(), 1.0 - t, t);
}

template <class P>
BezierCurve<P> reversed(const BezierCurve<P>& c) {
    return BezierCurve<P>(std::vector<P>(c.control_points.rbegin(), c.control_points.rend()));
}

/// Restriction of a curve to [t0, t1], reparameterized to [0, 1].
template <class P>
BezierCurve<P> subsegment(const BezierCurve<P>& c, double t0, double t1) {
    if (!(0.0 <= t0 && t0 < t1 && t1 <= 1.0)) throw DomainError("subsegment: invalid interval");
    return BezierCurve<P>(restrict_polygon<P>(c.points(), t0, t1));
}

template <class P>
BezierCurve<P> derivative(const BezierCurve<P>& c) {
    const int n = c.degree();
    if (n == 0) return BezierCurve<P>({P{}});
    std::vector<P> d(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) d[i] = static_cast<double>(n) * (c.control_points[i + 1] - c.control_points[i]);
    return BezierCurve<P>(std::move(d));
}

template <class P>
BezierCurve<P> degree_elevate_curve(const BezierCurve<P>& c, int target) {
    if (target < c.degree())
        throw ArgumentError("degree_elevate_curve: target " + std::to_string(target) + " below degree " +
                            std::to_string(c.degree()));
    return BezierCurve<P>(elevate_polygon(c.control_points, target));
}

/// Least-squares degree reduction with both endpoints interpolated. The fit
/// uses 10*degree uniform samples; the result is accepted only if the maximum
/// deviation over 201 uniform samples is within tol.
template <class P>
BezierCurve<P> degree_reduce_curve(const BezierCurve<P>& c, int target, double tol) {
    const int n = c.degree();
    if (target < 0 || target >= n)
        throw ArgumentError("degree_reduce_curve: target must satisfy 0 <= target < degree");

    std::vector<P> out(static_cast<std::size_t>(target) + 1);
    if (target == 0) {
        // A constant cannot interpolate distinct endpoints; use the mean of the ends.
        out[0] = 0.5 * (c.control_points.front() + c.control_points.back());
    } else {
        out.front() = c.control_points.front();
        out.back() = c.control_points.back();
        const int unknowns = target - 1;
        if (unknowns > 0) {
            const int samples = 10 * n;
            Eigen::MatrixXd a(samples, unknowns);
            Eigen::MatrixXd rhs(samples, static_cast<int>(P::dimension));
            for (int k = 0; k < samples; ++k) {
                const double t = static_cast<double>(k) / (samples - 1);
                const auto basis = bernstein_all(target, t);
                for (int j = 0; j < unknowns; ++j) a(k, j) = basis[j + 1];
                const P fixed = basis[0] * out.front() + basis[target] * out.back();
                const P r = eval(c, t) - fixed;
                for (std::size_t d = 0; d < P::dimension; ++d) rhs(k, static_cast<int>(d)) = r[d];
            }
            const Eigen::MatrixXd sol = a.colPivHouseholderQr().solve(rhs);
            for (int j = 0; j < unknowns; ++j)
                for (std::size_t d = 0; d < P::dimension; ++d) out[j + 1][d] = sol(j, static_cast<int>(d));
        }
    }
    BezierCurve<P> reduced(std::move(out));
    double worst = 0.0;
    for (int k = 0; k <= 200; ++k) {
        const double t = k / 200.0;
        worst = std::max(worst, distance(eval(c, t), eval(reduced, t)));
    }
    if (worst > tol)
        throw ReductionInfeasibleError("degree_reduce_curve: deviation " + std::to_string(worst) +
                                           " exceeds tolerance " + format_number(tol),
                                       worst);
    return reduced;
}

/// Piecewise Bezier curve over a global parameter in [0, 1]. Segment k covers
/// [breakpoints[k], breakpoints[k+1]].
template <class P>
struct PiecewiseBezierCurve {
    std::vector<BezierCurve<P>> segments;
    std::vector<double> breakpoints;

    PiecewiseBezierCurve() = default;
    PiecewiseBezierCurve(std::vector<BezierCurve<P>> segs, std::vector<double> bps)
        : segments(std::move(segs)), breakpoints(std::move(bps)) {
        validate();
    }

    void validate() const {
        if (segments.empty()) throw ArgumentError("PiecewiseBezierCurve: no segments");
        if (breakpoints.size() != segments.size() + 1)
            throw ArgumentError("PiecewiseBezierCurve: need one more breakpoint than segments");
        if (breakpoints.front() != 0.0 || breakpoints.back() != 1.0)
            throw ArgumentError("PiecewiseBezierCurve: breakpoints must span [0, 1]");
        for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k)
            if (!(breakpoints[k] < breakpoints[k + 1]))
                throw ArgumentError("PiecewiseBezierCurve: breakpoints must be strictly increasing");
        for (std::size_t k = 0; k + 1 < segments.size(); ++k)
            if (!(segments[k].control_points.back() == segments[k + 1].control_points.front()))
                throw ArgumentError("PiecewiseBezierCurve: segments " + std::to_string(k) + " and " +
                                    std::to_string(k + 1) + " do not share their junction point");
    }

    std::size_t segment_count() const { return segments.size(); }

    /// Segment index and local parameter for global t. Breakpoints map to the
    /// start of the following segment (the last one maps to the end).
    std::pair<std::size_t, double> locate(double t) const {
        if (!(t >= 0.0 && t <= 1.0)) throw DomainError("PiecewiseBezierCurve: parameter outside [0, 1]");
        auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
        std::size_t k = static_cast<std::size_t>(std::distance(breakpoints.begin(), it));
        k = k == 0 ? 0 : k - 1;
        if (k >= segments.size()) k = segments.size() - 1;
        const double a = breakpoints[k], b = breakpoints[k + 1];
        const double local = std::clamp((t - a) / (b - a), 0.0, 1.0);
        return {k, local};
    }

    friend bool operator==(const PiecewiseBezierCurve&, const PiecewiseBezierCurve&) = default;
};

using PiecewiseCurve2 = PiecewiseBezierCurve<Point2>;
using PiecewiseCurve3 = PiecewiseBezierCurve<Point3>;

template <class P>
P eval_curve(const PiecewiseBezierCurve<P>& c, double t) {
    const auto [k, local] = c.locate(t);
    if (local == 0.0) return c.segments[k].control_points.front();
    if (local == 1.0) return c.segments[k].control_points.back();
    return eval(c.segments[k], local);
}

/// Global-parameter restriction of a piecewise curve to one segment-aligned
/// or sub-segment interval [t0, t1] lying within a single segment.
template <class P>
BezierCurve<P> piece_between(const PiecewiseBezierCurve<P>& c, double t0, double t1) {
    const auto k = c.locate(0.5 * (t0 + t1)).first;
    const double a = c.breakpoints[k], b = c.breakpoints[k + 1];
    if (t0 < a || t1 > b) throw AlignmentError("piece_between: interval straddles a breakpoint");
    if (t0 == a && t1 == b) return c.segments[k];
    const double l0 = (t0 - a) / (b - a);
    const double l1 = t1 == b ? 1.0 : (t1 - a) / (b - a);
    auto piece = subsegment(c.segments[k], l0, l1);
    // Pin the ends to the exact curve values at shared parameters.
    if (t0 == a) piece.control_points.front() = c.segments[k].control_points.front();
    if (t1 == b) piece.control_points.back() = c.segments[k].control_points.back();
    return piece;
}

// ---------------------------------------------------------------------------
// Tensor-product surfaces

struct BezierSurface {
    int degree_u = 0;
    int degree_v = 0;
    std::vector<Point3> control_net;  // row-major: index i * (degree_v + 1) + j

    BezierSurface() = default;
    BezierSurface(int m, int n, std::vector<Point3> net) : degree_u(m), degree_v(n), control_net(std::move(net)) {
        validate();
    }

    void validate() const {
        if (degree_u < 0 || degree_v < 0) throw ArgumentError("BezierSurface: negative degree");
        if (control_net.size() != static_cast<std::size_t>(degree_u + 1) * static_cast<std::size_t>(degree_v + 1))
            throw ArgumentError("BezierSurface: control net size does not match degrees");
        for (const auto& p : control_net)
            if (!is_finite(p)) throw DomainError("BezierSurface: non-finite control point");
    }

    Point3& at(int i, int j) { return control_net[static_cast<std::size_t>(i) * (degree_v + 1) + j]; }
    const Point3& at(int i, int j) const { return control_net[static_cast<std::size_t>(i) * (degree_v + 1) + j]; }

    std::vector<Point3> row(int i) const {  // fixed i, varying j (a v-direction curve)
        return {control_net.begin() + static_cast<std::ptrdiff_t>(i) * (degree_v + 1),
                control_net.begin() + static_cast<std::ptrdiff_t>(i + 1) * (degree_v + 1)};
    }
    std::vector<Point3> column(int j) const {  // fixed j, varying i (a u-direction curve)
        std::vector<Point3> c(static_cast<std::size_t>(degree_u) + 1);
        for (int i = 0; i <= degree_u; ++i) c[i] = at(i, j);
        return c;
    }

    friend bool operator==(const BezierSurface&, const BezierSurface&) = default;
};

/// Evaluation with explicit complementary weights in both directions. The v
/// direction is reduced first, then u.
inline Point3 eval_surface_weighted(const BezierSurface& s, double su, double u, double sv, double v) {
    std::vector<Point3> reduced(static_cast<std::size_t>(s.degree_u) + 1);
    for (int i = 0; i <= s.degree_u; ++i) {
        const auto r = s.row(i);
        reduced[i] = de_casteljau<Point3>(r, sv, v);
    }
    return de_casteljau<Point3>(reduced, su, u);
}

inline Point3 eval_surface(const BezierSurface& s, double u, double v) {
    if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0))
        throw DomainError("eval_surface: parameter outside [0, 1]^2");
    return eval_surface_weighted(s, 1.0 - u, u, 1.0 - v, v);
}

inline Point3 eval_surface(const BezierSurface& s, Point2 uv) { return eval_surface(s, uv.u, uv.v); }

/// Position and partial derivatives up to second order.
struct SurfaceDerivatives {
    Point3 p, su, sv, suu, suv, svv;
};

inline SurfaceDerivatives surface_derivatives(const BezierSurface& s, double u, double v) {
    const auto bu = bernstein_derivatives(s.degree_u, u);
    const auto bv = bernstein_derivatives(s.degree_v, v);
    SurfaceDerivatives d;
    for (int i = 0; i <= s.degree_u; ++i) {
        for (int j = 0; j <= s.degree_v; ++j) {
            const Point3& r = s.at(i, j);
            d.p += (bu.value[i] * bv.value[j]) * r;
            d.su += (bu.first[i] * bv.value[j]) * r;
            d.sv += (bu.value[i] * bv.first[j]) * r;
            d.suu += (bu.second[i] * bv.value[j]) * r;
            d.suv += (bu.first[i] * bv.first[j]) * r;
            d.svv += (bu.value[i] * bv.second[j]) * r;
        }
    }
    return d;
}

inline BezierSurface extract_subpatch(const BezierSurface& s, double u0, double u1, double v0, double v1) {
    if (!(0.0 <= u0 && u0 < u1 && u1 <= 1.0 && 0.0 <= v0 && v0 < v1 && v1 <= 1.0))
        throw DomainError("extract_subpatch: interval inverted or outside [0, 1]");
    BezierSurface out = s;
    for (int i = 0; i <= s.degree_u; ++i) {
        const auto r = restrict_polygon<Point3>(s.row(i), v0, v1);
        for (int j = 0; j <= s.degree_v; ++j) out.at(i, j) = r[j];
    }
    for (int j = 0; j <= s.degree_v; ++j) {
        const auto c = restrict_polygon<Point3>(out.column(j), u0, u1);
        for (int i = 0; i <= s.degree_u; ++i) out.at(i, j) = c[i];
    }
    return out;
}

inline BezierSurface elevate_surface(const BezierSurface& s, int target_u, int target_v) {
    if (target_u < s.degree_u || target_v < s.degree_v)
        throw ArgumentError("elevate_surface: target below current degree");
    BezierSurface mid(s.degree_u, target_v,
                      std::vector<Point3>(static_cast<std::size_t>(s.degree_u + 1) * (target_v + 1)));
    for (int i = 0; i <= s.degree_u; ++i) {
        const auto r = elevate_polygon(s.row(i), target_v);
        for (int j = 0; j <= target_v; ++j) mid.at(i, j) = r[j];
    }
    BezierSurface out(target_u, target_v,
                      std::vector<Point3>(static_cast<std::size_t>(target_u + 1) * (target_v + 1)));
    for (int j = 0; j <= target_v; ++j) {
        const auto c = elevate_polygon(mid.column(j), target_u);
        for (int i = 0; i <= target_u; ++i) out.at(i, j) = c[i];
    }
    return out;
}

/// Patch edges, numbered counter-clockwise from v = 0.
enum class Edge : int { v_min = 0, u_max = 1, v_max = 2, u_min = 3 };

inline const char* edge_name(Edge e) {
    switch (e) {
        case Edge::v_min: return "v=0";
        case Edge::u_max: return "u=1";
        case Edge::v_max: return "v=1";
        case Edge::u_min: return "u=0";
    }
    return "?";
}

/// Edge control points ordered by increasing free parameter.
inline BezierCurve3 edge_curve(const BezierSurface& s, Edge e) {
    switch (e) {
        case Edge::v_min: return BezierCurve3(s.column(0));
        case Edge::u_max: return BezierCurve3(s.row(s.degree_u));
        case Edge::v_max: return BezierCurve3(s.column(s.degree_v));
        case Edge::u_min: return BezierCurve3(s.row(0));
    }
    throw ArgumentError("edge_curve: bad edge");
}

inline int edge_degree(const BezierSurface& s, Edge e) {
    return (e == Edge::v_min || e == Edge::v_max) ? s.degree_u : s.degree_v;
}

inline void set_edge(BezierSurface& s, Edge e, std::span<const Point3> pts) {
    if (static_cast<int>(pts.size()) != edge_degree(s, e) + 1)
        throw ArgumentError("set_edge: control point count does not match edge degree");
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const int idx = static_cast<int>(k);
        switch (e) {
            case Edge::v_min: s.at(idx, 0) = pts[k]; break;
            case Edge::u_max: s.at(s.degree_u, idx) = pts[k]; break;
            case Edge::v_max: s.at(idx, s.degree_v) = pts[k]; break;
            case Edge::u_min: s.at(0, idx) = pts[k]; break;
        }
    }
}

// ---------------------------------------------------------------------------
// Univariate basis change and Bernstein-form arithmetic

inline std::vector<double> monomial_from_bernstein(std::span<const double> b, int degree) {
    if (static_cast<int>(b.size()) != degree + 1)
        throw ArgumentError("monomial_from_bernstein: coefficient count must be degree + 1");
    std::vector<double> a(b.size(), 0.0);
    for (int k = 0; k <= degree; ++k) {
        std::vector<double> terms;
        for (int i = 0; i <= k; ++i) {
            const double sign = ((k - i) % 2 == 0) ? 1.0 : -1.0;
            terms.push_back(sign * binomial(degree, k) * binomial(k, i) * b[i]);
        }
        a[k] = accumulate(terms);
    }
    return a;
}

inline std::vector<double> bernstein_from_monomial(std::span<const double> a, int degree) {
    if (static_cast<int>(a.size()) != degree + 1)
        throw ArgumentError("bernstein_from_monomial: coefficient count must be degree + 1");
    std::vector<double> b(a.size(), 0.0);
    for (int i = 0; i <= degree; ++i) {
        std::vector<double> terms;
        for (int k = 0; k <= i; ++k) terms.push_back(binomial(i, k) / binomial(degree, k) * a[k]);
        b[i] = accumulate(terms);
    }
    return b;
}

/// Product of two polynomials in Bernstein form (degrees a.size()-1 and b.size()-1).
template <class T>
std::vector<T> bernstein_product(std::span<const double> a, std::span<const T> b) {
    const int p = static_cast<int>(a.size()) - 1;
    const int q = static_cast<int>(b.size()) - 1;
    std::vector<T> c(static_cast<std::size_t>(p + q) + 1);
    for (int k = 0; k <= p + q; ++k) {
        std::vector<T> terms;
        for (int i = std::max(0, k - q); i <= std::min(p, k); ++i)
            terms.push_back((binomial(p, i) * binomial(q, k - i) / binomial(p + q, k) * a[i]) * b[k - i]);
        c[k] = accumulate(terms);
    }
    return c;
}

}  // namespace watertight
