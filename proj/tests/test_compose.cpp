#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

#include <watertight/compose.hpp>

using namespace watertight;
using namespace watertight::testing;

namespace {

/// Random polynomial of degree p with values in [0, 1]: a Bernstein
/// polynomial with coefficients in [0.05, 1] maps [0,1] into (0, 1].
BoundaryPolynomial random_boundary(std::mt19937_64& rng, int p) {
    std::uniform_real_distribution<double> d(0.05, 1.0);
    std::vector<double> b(static_cast<std::size_t>(p) + 1);
    for (auto& x : b) x = d(rng);
    return BoundaryPolynomial(monomial_from_bernstein(b, p));
}

double composition_error(const BezierSurface& s, const BoundaryPolynomial& f, const BezierSurface& r) {
    double worst = 0.0;
    for (int a = 0; a <= 20; ++a)
        for (int b = 0; b <= 20; ++b) {
            const double sig = a / 20.0, tau = b / 20.0;
            worst = std::max(worst, distance(eval_surface(r, sig, tau), eval_surface(s, sig * f(tau), tau)));
        }
    return worst;
}

}  // namespace

TEST_CASE("boundary polynomial basics", "[compose]") {
    const BoundaryPolynomial f({0.25, -1.0, 1.0});
    CHECK(f.degree() == 2);
    CHECK(f(0.5) == 0.0);
    const auto r = polynomial_range(f);
    CHECK(r.min == Catch::Approx(0.0).margin(1e-15));
    CHECK(r.max == 0.25);

    // Interior maximum found by derivative root isolation: 4 t (1 - t) peaks at 1.
    const auto bump = polynomial_range(BoundaryPolynomial({0.0, 4.0, -4.0}));
    CHECK(bump.max == Catch::Approx(1.0).margin(1e-15));

    CHECK(BoundaryPolynomial({0.5, 0.0}).degree() == 0);
}

TEST_CASE("compose with identity substitution", "[compose]") {
    std::mt19937_64 rng(17);
    const auto s = random_surface(rng, 3, 2);
    const auto r = compose_reparameterize(s, BoundaryPolynomial({1.0}));
    REQUIRE(r.degree_u == 3);
    REQUIRE(r.degree_v == 2);
    for (std::size_t k = 0; k < s.control_net.size(); ++k) CHECK(distance(r.control_net[k], s.control_net[k]) <= 1e-12);
}

TEST_CASE("compose bilinear plane with f(t) = t", "[compose]") {
    const auto r = compose_reparameterize(flat_unit_patch(), BoundaryPolynomial({0.0, 1.0}));
    REQUIRE(r.degree_u == 1);
    REQUIRE(r.degree_v == 2);

    // Oracle: the composed map is (s t, t, 0).
    for (int a = 0; a <= 4; ++a)
        for (int b = 0; b <= 4; ++b) {
            const double s = a / 4.0, t = b / 4.0;
            CHECK(distance(eval_surface(r, s, t), Point3{s * t, t, 0}) <= 1e-15);
        }
    const std::vector<Point3> expected{{0, 0, 0}, {0, 0.5, 0}, {0, 1, 0}, {0, 0, 0}, {0.5, 0.5, 0}, {1, 1, 0}};
    for (std::size_t k = 0; k < expected.size(); ++k) CHECK(distance(r.control_net[k], expected[k]) <= 1e-15);
}

TEST_CASE("compose degree law", "[compose][property]") {
    std::mt19937_64 rng(23);
    const auto bicubic = random_surface(rng, 3, 3);
    const auto fig = compose_reparameterize(bicubic, BoundaryPolynomial({0.2, 0.5, 0.3}));
    CHECK(fig.degree_u == 3);
    CHECK(fig.degree_v == 9);

    for (int m = 1; m <= 4; ++m)
        for (int n = 1; n <= 4; ++n)
            for (int p = 1; p <= 3; ++p) {
                const auto r = compose_reparameterize(random_surface(rng, m, n), random_boundary(rng, p));
                CHECK(r.degree_u == m);
                CHECK(r.degree_v == m * p + n);
            }
}

TEST_CASE("compose exactness on random nets", "[compose][property]") {
    std::mt19937_64 rng(29);
    std::uniform_int_distribution<int> deg(0, 4), pdeg(0, 3);
    for (int trial = 0; trial < 60; ++trial) {
        const auto s = random_surface(rng, deg(rng), deg(rng));
        const auto f = random_boundary(rng, pdeg(rng));
        CHECK(composition_error(s, f, compose_reparameterize(s, f)) <= 1e-9);
    }
}

TEST_CASE("compose commutes with affine maps", "[compose][property]") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const auto s = random_surface(rng, 3, 2, 1.0);
        const auto f = random_boundary(rng, 2);
        const auto a = random_affine(rng);
        const auto lhs = compose_reparameterize(transformed(s, a), f);
        const auto rhs = transformed(compose_reparameterize(s, f), a);
        for (std::size_t k = 0; k < lhs.control_net.size(); ++k)
            CHECK(distance(lhs.control_net[k], rhs.control_net[k]) <= 1e-11);
    }
}

TEST_CASE("compose rejects invalid input", "[compose]") {
    std::mt19937_64 rng(37);
    const auto s = random_surface(rng, 2, 2);
    CHECK_THROWS_AS(compose_reparameterize(s, BoundaryPolynomial({0.0, 1.5})), DomainError);
    CHECK_THROWS_AS(compose_reparameterize(s, BoundaryPolynomial({0.5, -1.0})), DomainError);
    // Interior overshoot only visible through the derivative root.
    CHECK_THROWS_AS(compose_reparameterize(s, BoundaryPolynomial({0.0, 4.2, -4.2})), DomainError);
    CHECK_THROWS_AS(compose_reparameterize(random_surface(rng, 11, 2), BoundaryPolynomial({1.0})),
                    UnsupportedDegreeError);
    CHECK_THROWS_AS(compose_reparameterize(s, BoundaryPolynomial({0.1, 0.1, 0.1, 0.1, 0.1})),
                    UnsupportedDegreeError);
}

TEST_CASE("quarter-turn relabeling", "[compose][rotation]") {
    std::mt19937_64 rng(41);
    const auto p = random_surface(rng, 2, 4);
    for (int r = 0; r < 4; ++r) {
        const auto q = rotate_net(p, r);
        for (int a = 0; a <= 6; ++a)
            for (int b = 0; b <= 6; ++b) {
                const Point2 ab{a / 6.0, b / 6.0};
                const auto xy = rotate_point(ab, r);
                CHECK(distance(eval_surface(q, ab), eval_surface(p, xy)) <= 1e-13);
            }
        // Rotating back restores the net bit for bit.
        CHECK(rotate_net(q, (4 - r) % 4) == p);
    }
}
