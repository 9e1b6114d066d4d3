// Acceptance suite: one PASS/FAIL line per criterion; exit status is the
// number of failed criteria.

#include "test_support.hpp"

#include <watertight/watertight.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

using namespace watertight;
using namespace watertight::testing;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& title, const std::string& detail) {
    std::printf("%s  %d  %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    failures += pass ? 0 : 1;
}

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

/// Random boundary polynomial with values in [0, 1]: Bernstein coefficients in [0, 1].
BoundaryPolynomial random_f(std::mt19937_64& rng, int p) {
    std::uniform_real_distribution<double> d(0.05, 1.0);
    std::vector<double> b(static_cast<std::size_t>(p) + 1);
    for (auto& x : b) x = d(rng);
    return BoundaryPolynomial(monomial_from_bernstein(b, p));
}

// ---------------------------------------------------------------------------

void degree_law() {
    std::mt19937_64 rng(101);
    const auto bicubic = compose_reparameterize(random_surface(rng, 3, 3), BoundaryPolynomial({0.2, 0.9, -0.4}));
    bool ok = bicubic.degree_u == 3 && bicubic.degree_v == 9;
    int good = 0;
    for (int m = 1; m <= 4; ++m)
        for (int n = 1; n <= 4; ++n)
            for (int p = 1; p <= 3; ++p) {
                const auto w = compose_reparameterize(random_surface(rng, m, n), random_f(rng, p));
                good += w.degree_u == m && w.degree_v == m * p + n;
            }
    ok = ok && good == 48;
    report(1, ok, "degree law",
           "bicubic with quadratic f -> (" + std::to_string(bicubic.degree_u) + "," +
               std::to_string(bicubic.degree_v) + "); " + std::to_string(good) + "/48 cases give (m, m*p+n)");
}

void composition_exactness() {
    std::mt19937_64 rng(202);
    std::uniform_int_distribution<int> deg(1, 4), pdeg(1, 3);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto s = random_surface(rng, deg(rng), deg(rng), 10.0);
        const auto f = random_f(rng, pdeg(rng));
        const auto w = compose_reparameterize(s, f);
        for (int i = 0; i <= 20; ++i)
            for (int j = 0; j <= 20; ++j) {
                const double a = i / 20.0, b = j / 20.0;
                worst = std::max(worst, distance(eval_surface(w, a, b), direct_bernstein_sum(s, a * f(b), b)));
            }
    }
    report(2, worst <= 1e-9, "composition exactness", "max error " + sci(worst) + " over 100 surfaces (bound 1e-9)");
}

struct ShapeCheck {
    double error = 0.0;
    double bound = 0.0;
    bool ok() const { return error <= bound; }
};

/// Normalized patch of `cell` against the source surface through the exact trim.
ShapeCheck shape_check(const BezierSurface& s, const DomainCell& cell, const BezierSurface& w,
                       const PiecewiseCurve2& curve) {
    ShapeCheck c;
    const int r = cell.trapezoid_case->rotation_quarter_turns;
    const bool u_dep = cell.axis == GraphAxis::u_of_v;
    const double width = u_dep ? cell.u1 - cell.u0 : cell.v1 - cell.v0;
    double lip = 0.0;
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j) {
            const auto d = surface_derivatives(s, cell.u0 + (cell.u1 - cell.u0) * i / 20.0,
                                               cell.v0 + (cell.v1 - cell.v0) * j / 20.0);
            lip = std::max(lip, norm(u_dep ? d.su : d.sv) * width);
        }
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j) {
            const Point2 xy{i / 20.0, j / 20.0};
            const Point2 ab = to_canonical(xy, r);
            const Point2 local = rotate_point({ab.u * canonical_edge_value(cell, curve, ab.v), ab.v}, r);
            const Point2 g = cell.to_global(local);
            c.error = std::max(c.error, distance(eval_surface(w, xy.u, xy.v), direct_bernstein_sum(s, g.u, g.v)));
        }
    // Sampled Lipschitz bound with 5% slack for the sampling.
    c.bound = cell.fit_residual * lip * 1.05 + 1e-9;
    return c;
}

/// A trapezoid over the whole domain for quarter turn r and far corner `sub`,
/// with trim a(b) = base(b) in canonical coordinates.
struct CaseFixture {
    std::vector<DomainCell> cells;
    PiecewiseCurve2 curve;
};

CaseFixture synthetic_case(int r, int sub, bool curved) {
    auto a_of_b = [&](double b) {
        const double t = sub == 0 ? b : 1.0 - b;  // far corner at b = 1 or b = 0
        return 0.5 + 0.5 * t + (curved ? 0.12 * t * (1.0 - t) : 0.0);
    };
    std::vector<Point2> pts;
    const int count = curved ? 9 : 2;
    for (int k = 0; k < count; ++k) {
        const double b = static_cast<double>(k) / (count - 1);
        pts.push_back(rotate_point({a_of_b(b), b}, r));
    }
    CaseFixture f;
    f.curve = interpolate_domain_curve(pts);
    const auto seg = single_monotone_segment(f.curve);
    f.cells = decompose_domain(seg, r < 2 ? KeepSide::below : KeepSide::above);
    for (auto& c : f.cells) {
        if (c.kind != CellKind::trapezoid)
            throw Error("synthetic case r=" + std::to_string(r) + " sub=" + std::to_string(sub) + ": rectangle cell");
        fit_cell(c, f.curve, 2, 1e-3);
    }
    return f;
}

void shape_preservation() {
    std::mt19937_64 rng(303);
    const auto s = random_surface(rng, 3, 3, 1.0);

    // Exactly representable trim: a straight line, f linear with residual 0.
    double exact_err = 0.0, exact_res = 0.0;
    for (int r = 0; r < 4; ++r) {
        const auto fx = synthetic_case(r, 0, false);
        const auto& cell = fx.cells.front();
        exact_res = std::max(exact_res, cell.fit_residual);
        exact_err = std::max(exact_err, shape_check(s, cell, normalize_patch(s, cell), fx.curve).error);
    }
    // Fitted trim: the decomposition of a circular arc.
    std::vector<Point2> arc;
    const double a0 = std::asin(0.3 / 0.9);
    for (int k = 0; k < 8; ++k) {
        const double a = a0 + (std::numbers::pi / 2 - 2 * a0) * k / 7;
        arc.push_back({-0.3 + 0.9 * std::cos(a), -0.3 + 0.9 * std::sin(a)});
    }
    arc.front().v = 0.0;
    arc.back().u = 0.0;
    const auto curve = interpolate_domain_curve(arc);
    const auto seg = single_monotone_segment(curve);
    int fitted_ok = 0, fitted_total = 0;
    double worst_ratio = 0.0;
    for (auto keep : {KeepSide::below, KeepSide::above}) {
        std::vector<double> cuts;
        const auto d = normalize_all(s, fit_with_refinement(seg, keep, cuts, {2, 1e-4}));
        for (std::size_t k = 0; k < d.cells.size(); ++k) {
            if (d.cells[k].kind != CellKind::trapezoid) continue;
            const auto c = shape_check(s, d.cells[k], d.patches[k], curve);
            ++fitted_total;
            fitted_ok += c.ok();
            worst_ratio = std::max(worst_ratio, c.error / c.bound);
        }
    }
    const bool ok = exact_err <= 1e-9 && exact_res <= 1e-12 && fitted_ok == fitted_total && fitted_total > 0;
    report(3, ok, "stage-1 shape preservation",
           "exact trim error " + sci(exact_err) + " (bound 1e-9); fitted trims " + std::to_string(fitted_ok) + "/" +
               std::to_string(fitted_total) + " within residual x Lipschitz + 1e-9 (worst error/bound " +
               sci(worst_ratio) + ")");
}

void watertightness(const PipelineResult& r) {
    const auto g = verify_watertight(r.model, 200);
    std::string detail = "verify max_gap " + sci(g.max_gap) + "; one-sided trim edges at grid";
    bool ok = g.max_gap == 0.0;
    for (int grid : {4, 8, 16}) {
        const auto a = audit_trim(r.model, grid);
        detail += " " + std::to_string(grid) + ":" + std::to_string(a.one_sided_edges);
        ok = ok && a.one_sided_edges == 0 && a.unshared_vertices == 0 && a.trim_vertices > 0;
    }
    report(4, ok, "watertightness by construction", detail);
}

void gap_convergence(const PipelineResult& r8) {
    PipelineConfig cfg;
    cfg.points = 32;
    const auto r32 = run_pipeline(demo_paraboloid(), demo_plane(), cfg);
    const double g8 = std::max(r8.gap_c_a.max_gap, r8.gap_c_b.max_gap);
    const double g32 = std::max(r32.gap_c_a.max_gap, r32.gap_c_b.max_gap);
    const bool ok = g32 < g8 && r32.model.deviation < r8.model.deviation;
    report(5, ok, "gap convergence",
           "pre-stitch gap " + sci(g8) + " -> " + sci(g32) + ", deviation " + sci(r8.model.deviation) + " -> " +
               sci(r32.model.deviation) + " (8 -> 32 points)");
}

void oracle_equivalences() {
    std::mt19937_64 rng(606);
    // Inversion against a 512 x 512 grid argmin.
    auto surface = affine_patch(3, 3, {0, 0, 0}, {1, 0, 0}, {0, 1, 0});
    std::uniform_real_distribution<double> bump(-0.15, 0.15), unit(0.05, 0.95), off(-0.05, 0.05);
    for (auto& p : surface.control_net) p.z += bump(rng);
    std::vector<Point3> grid;
    for (int i = 0; i < 512; ++i)
        for (int j = 0; j < 512; ++j) grid.push_back(eval_surface(surface, i / 511.0, j / 511.0));
    double worst_inv = 0.0;
    for (int q = 0; q < 50; ++q) {
        const auto d = surface_derivatives(surface, unit(rng), unit(rng));
        const Point3 n = cross(d.su, d.sv);
        const Point3 p = d.p + (off(rng) / norm(n)) * n;
        std::size_t best = 0;
        for (std::size_t k = 1; k < grid.size(); ++k)
            if (distance(grid[k], p) < distance(grid[best], p)) best = k;
        const Point2 arg{static_cast<double>(best / 512) / 511.0, static_cast<double>(best % 512) / 511.0};
        const auto uv = invert_point(surface, p, detail::grid_closest(surface, p, 8));
        worst_inv = std::max({worst_inv, std::abs(uv.u - arg.u), std::abs(uv.v - arg.v)});
    }

    std::uniform_int_distribution<int> deg(1, 5);
    std::uniform_real_distribution<double> t(0.0, 1.0);
    double worst_sub = 0.0, worst_elev = 0.0, worst_basis = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto s = random_surface(rng, deg(rng), deg(rng), 1.0);
        double u0 = t(rng), u1 = t(rng), v0 = t(rng), v1 = t(rng);
        if (u0 > u1) std::swap(u0, u1);
        if (v0 > v1) std::swap(v0, v1);
        if (u1 - u0 < 1e-3 || v1 - v0 < 1e-3) continue;
        const auto sub = extract_subpatch(s, u0, u1, v0, v1);
        const auto elev = elevate_surface(s, s.degree_u + 2, s.degree_v + 1);
        for (int k = 0; k < 25; ++k) {
            const double a = t(rng), b = t(rng);
            worst_sub = std::max(worst_sub, distance(eval_surface(sub, a, b),
                                                     direct_bernstein_sum(s, u0 + a * (u1 - u0), v0 + b * (v1 - v0))));
            worst_elev = std::max(worst_elev, distance(eval_surface(elev, a, b), direct_bernstein_sum(s, a, b)));
        }
        const int p = deg(rng) + 1;
        std::vector<double> coeffs(static_cast<std::size_t>(p) + 1);
        for (auto& c : coeffs) c = 2.0 * t(rng) - 1.0;
        const auto round = bernstein_from_monomial(monomial_from_bernstein(coeffs, p), p);
        for (std::size_t k = 0; k < coeffs.size(); ++k) worst_basis = std::max(worst_basis, std::abs(round[k] - coeffs[k]));
    }
    const bool ok = worst_inv <= 2e-3 && worst_sub <= 1e-12 && worst_elev <= 1e-12 && worst_basis <= 1e-12;
    report(6, ok, "oracle equivalences",
           "inversion vs 512^2 grid " + sci(worst_inv) + " (2e-3); subpatch " + sci(worst_sub) + ", elevation " +
               sci(worst_elev) + ", basis round trip " + sci(worst_basis) + " (1e-12)");
}

void eight_cases() {
    std::mt19937_64 rng(707);
    const auto s = random_surface(rng, 3, 2, 1.0);
    std::set<int> ids;
    int shape_ok = 0, total = 0;
    for (int r = 0; r < 4; ++r)
        for (int sub = 0; sub < 2; ++sub)
            for (bool curved : {false, true}) {
                const auto fx = synthetic_case(r, sub, curved);
                if (!curved) ids.insert(fx.cells.front().trapezoid_case->case_id);
                for (const auto& cell : fx.cells) {
                    ++total;
                    shape_ok += shape_check(s, cell, normalize_patch(s, cell), fx.curve).ok();
                }
            }
    const bool ok = ids.size() == 8 && *ids.begin() == 1 && *ids.rbegin() == 8 && shape_ok == total;
    report(7, ok, "eight-case coverage",
           std::to_string(ids.size()) + " distinct case ids; " + std::to_string(shape_ok) + "/" +
               std::to_string(total) + " normalized cells pass the shape check");
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void determinism() {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "watertight_acceptance";
    fs::create_directories(dir);
    std::string files[2][3];
    bool ran = true;
    for (int k = 0; k < 2; ++k) {
        const auto tag = std::to_string(k);
        const fs::path out = dir / ("model" + tag + ".json"), obj = dir / ("mesh" + tag + ".obj"),
                       rep = dir / ("report" + tag + ".json");
        const std::string cmd = std::string(WATERTIGHT_CLI) + " run --model '" + WATERTIGHT_DATA +
                                "/paraboloid_plane.json' --out '" + out.string() + "' --obj '" + obj.string() +
                                "' --report '" + rep.string() + "' >/dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        ran = ran && WIFEXITED(status) && WEXITSTATUS(status) == 0;
        files[k][0] = slurp(out);
        files[k][1] = slurp(obj);
        files[k][2] = slurp(rep);
    }
    bool same = ran;
    for (int f = 0; f < 3; ++f) same = same && !files[0][f].empty() && files[0][f] == files[1][f];
    report(8, same, "determinism",
           ran ? (same ? "two runs produced bitwise-identical model, mesh and report" : "outputs differ")
               : "CLI run failed");
}

template <class F>
void guarded(int id, const char* title, F&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        report(id, false, title, std::string("exception: ") + e.what());
    }
}

}  // namespace

int main() {
    guarded(1, "degree law", degree_law);
    guarded(2, "composition exactness", composition_exactness);
    guarded(3, "stage-1 shape preservation", shape_preservation);
    PipelineResult demo8;
    bool demo_ok = true;
    try {
        demo8 = run_pipeline(demo_paraboloid(), demo_plane(), {});
    } catch (const std::exception& e) {
        demo_ok = false;
        report(4, false, "watertightness by construction", std::string("pipeline failed: ") + e.what());
        report(5, false, "gap convergence", "pipeline failed");
    }
    if (demo_ok) {
        guarded(4, "watertightness by construction", [&] { watertightness(demo8); });
        guarded(5, "gap convergence", [&] { gap_convergence(demo8); });
    }
    guarded(6, "oracle equivalences", oracle_equivalences);
    guarded(7, "eight-case coverage", eight_cases);
    guarded(8, "determinism", determinism);
    std::printf("%d of 8 criteria failed\n", failures);
    return failures;
}
