#pragma once

// Reparameterization of a Bezier surface under u = s * f(t), v = t, plus the
// quarter-turn relabelings that bring any curved-trapezoid patch into the
// orientation the substitution expects.

#include "bezier.hpp"

#include <utility>

namespace watertight {

inline constexpr int max_compose_surface_degree = 10;
inline constexpr int max_compose_boundary_degree = 3;

/// f(t) = a_0 + a_1 t + ... + a_p t^p in the monomial basis.
class BoundaryPolynomial {
public:
    BoundaryPolynomial() : coefficients_{1.0} {}
    explicit BoundaryPolynomial(std::vector<double> coefficients) : coefficients_(std::move(coefficients)) {
        if (coefficients_.empty()) throw ArgumentError("BoundaryPolynomial: no coefficients");
        for (double c : coefficients_)
            if (!std::isfinite(c)) throw DomainError("BoundaryPolynomial: non-finite coefficient");
        // Exact trailing zeros do not contribute to the degree.
        while (coefficients_.size() > 1 && coefficients_.back() == 0.0) coefficients_.pop_back();
    }

    int degree() const { return static_cast<int>(coefficients_.size()) - 1; }
    const std::vector<double>& coefficients() const { return coefficients_; }

    double operator()(double t) const {
        double r = 0.0;
        for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) r = r * t + *it;
        return r;
    }

    BoundaryPolynomial derivative() const {
        if (coefficients_.size() == 1) return BoundaryPolynomial({0.0});
        std::vector<double> d(coefficients_.size() - 1);
        for (std::size_t k = 1; k < coefficients_.size(); ++k) d[k - 1] = static_cast<double>(k) * coefficients_[k];
        return BoundaryPolynomial(std::move(d));
    }

    std::vector<double> bernstein() const { return bernstein_from_monomial(coefficients_, degree()); }

    friend bool operator==(const BoundaryPolynomial&, const BoundaryPolynomial&) = default;

private:
    std::vector<double> coefficients_;
};

struct ValueRange {
    double min = 0.0;
    double max = 0.0;
};

/// Range of f over [0, 1]: 257 uniform samples plus every isolated root of f'
/// (sign changes on the same grid, refined by bisection).
inline ValueRange polynomial_range(const BoundaryPolynomial& f) {
    constexpr int samples = 257;
    const auto df = f.derivative();
    ValueRange r{f(0.0), f(0.0)};
    auto include = [&](double t) {
        const double y = f(t);
        r.min = std::min(r.min, y);
        r.max = std::max(r.max, y);
    };
    double prev_t = 0.0, prev_d = df(0.0);
    for (int k = 1; k < samples; ++k) {
        const double t = static_cast<double>(k) / (samples - 1);
        include(t);
        const double d = df(t);
        if (prev_d == 0.0) include(prev_t);
        if ((prev_d < 0.0 && d > 0.0) || (prev_d > 0.0 && d < 0.0)) {
            double lo = prev_t, hi = t, dlo = prev_d;
            for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double dm = df(mid);
                if ((dm < 0.0) == (dlo < 0.0)) {
                    lo = mid;
                    dlo = dm;
                } else {
                    hi = mid;
                }
            }
            include(0.5 * (lo + hi));
        }
        prev_t = t;
        prev_d = d;
    }
    return r;
}

inline void require_unit_range(const BoundaryPolynomial& f) {
    const auto r = polynomial_range(f);
    if (r.min < -1e-12 || r.max > 1.0 + 1e-12)
        throw DomainError("boundary polynomial leaves [0, 1] on [0, 1]: range [" + format_number(r.min) + ", " +
                          format_number(r.max) + "]");
}

/// Returns the patch R with R(s, t) = S(s * f(t), t), of bidegree (m, m*p + n).
///
/// Uses B_{i,m}(s f) = sum_{r>=i} C(r,i) B_{r,m}(s) f^i (1-f)^{r-i}, so every
/// product stays in Bernstein form with nonnegative weights.
inline BezierSurface compose_reparameterize(const BezierSurface& s, const BoundaryPolynomial& f) {
    const int m = s.degree_u, n = s.degree_v, p = f.degree();
    if (m > max_compose_surface_degree || n > max_compose_surface_degree || p > max_compose_boundary_degree)
        throw UnsupportedDegreeError("compose_reparameterize: degrees (" + std::to_string(m) + ", " +
                                     std::to_string(n) + ", p=" + std::to_string(p) +
                                     ") exceed the supported caps (10, 10, p=3)");
    require_unit_range(f);

    const auto fb = f.bernstein();
    std::vector<double> gb(fb.size());
    for (std::size_t k = 0; k < fb.size(); ++k) gb[k] = 1.0 - fb[k];

    std::vector<std::vector<double>> fpow{{1.0}}, gpow{{1.0}};
    for (int k = 1; k <= m; ++k) {
        fpow.push_back(bernstein_product<double>(fb, fpow.back()));
        gpow.push_back(bernstein_product<double>(gb, gpow.back()));
    }

    const int out_n = m * p + n;
    BezierSurface out(m, out_n, std::vector<Point3>(static_cast<std::size_t>(m + 1) * (out_n + 1)));
    for (int r = 0; r <= m; ++r) {
        std::vector<std::vector<Point3>> terms(static_cast<std::size_t>(r) + 1);
        for (int i = 0; i <= r; ++i) {
            auto weight = bernstein_product<double>(fpow[i], gpow[r - i]);
            for (double& w : weight) w *= binomial(r, i);
            const auto g = s.row(i);
            terms[i] = elevate_polygon(bernstein_product<Point3>(weight, g), out_n);
        }
        for (int j = 0; j <= out_n; ++j) {
            std::vector<Point3> column(terms.size());
            for (std::size_t i = 0; i < terms.size(); ++i) column[i] = terms[i][j];
            out.at(r, j) = accumulate(column);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Quarter-turn relabelings of the unit square

/// Maps canonical coordinates (a, b) to (x, y) under `quarter_turns` rotations.
inline Point2 rotate_point(Point2 ab, int quarter_turns) {
    switch (((quarter_turns % 4) + 4) % 4) {
        case 0: return ab;
        case 1: return {1.0 - ab.v, ab.u};
        case 2: return {1.0 - ab.u, 1.0 - ab.v};
        default: return {ab.v, 1.0 - ab.u};
    }
}

/// Patch Q with Q(a, b) = P(rotate_point((a, b), quarter_turns)). Pure index
/// relabeling, so control points are copied bit for bit.
inline BezierSurface rotate_net(const BezierSurface& p, int quarter_turns) {
    const int r = ((quarter_turns % 4) + 4) % 4;
    const int mx = p.degree_u, my = p.degree_v;
    const bool swap = (r % 2) == 1;
    BezierSurface q(swap ? my : mx, swap ? mx : my, p.control_net);
    for (int i = 0; i <= q.degree_u; ++i) {
        for (int j = 0; j <= q.degree_v; ++j) {
            switch (r) {
                case 0: q.at(i, j) = p.at(i, j); break;
                case 1: q.at(i, j) = p.at(mx - j, i); break;
                case 2: q.at(i, j) = p.at(mx - i, my - j); break;
                default: q.at(i, j) = p.at(j, my - i); break;
            }
        }
    }
    return q;
}

/// The edge that the canonical side a = 1 lands on after rotating back.
inline Edge curved_edge_for_rotation(int quarter_turns) {
    switch (((quarter_turns % 4) + 4) % 4) {
        case 0: return Edge::u_max;
        case 1: return Edge::v_max;
        case 2: return Edge::u_min;
        default: return Edge::v_min;
    }
}

}  // namespace watertight
