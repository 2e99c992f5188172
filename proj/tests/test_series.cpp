#include <doctest.h>

#include <cmath>

#include "gmc/jets.hpp"
#include "gmc/series.hpp"
#include "support.hpp"

using namespace gmc;

TEST_CASE("coefficients and evaluation") {
    Poly2 p(3);
    p.set(0, 0, 1.0);
    p.set(2, 1, -2.0);
    p.add(2, 1, 0.5);
    CHECK(p.coeff(2, 1) == doctest::Approx(-1.5));
    CHECK(p.coeff(3, 1) == 0.0);
    CHECK(p(2.0, 3.0) == doctest::Approx(1.0 - 1.5 * 4.0 * 3.0));
    CHECK(p.partial(2, 1, 0.7, -0.2) == doctest::Approx(-3.0));
    CHECK(p.dx().coeff(1, 1) == doctest::Approx(-3.0));
    CHECK(p.dy().coeff(2, 0) == doctest::Approx(-1.5));
}

TEST_CASE("product truncates at the smaller degree") {
    const Poly2 x = Poly2::x(2), y = Poly2::y(4);
    const Poly2 q = (1.0 + x) * (1.0 + y);
    CHECK(q.degree() == 2);
    CHECK(q.coeff(1, 1) == doctest::Approx(1.0));
    const Poly2 cube = x * x * x;
    CHECK(cube.max_abs_coeff() == 0.0);
}

TEST_CASE("shifted and rotated are exact re-expansions") {
    const Poly2 h = monge_height(MongeJet4{1.3, 0.7, -0.4, 0.9, 0.5, 1.1, -0.6, 0.8, 0.3, -0.2});
    const Poly2 s = h.shifted(0.3, -0.2);
    const Poly2 r = h.rotated(0.4);
    auto g = test::rng(1);
    for (int i = 0; i < 20; ++i) {
        const double x = test::uniform(g, -1, 1), y = test::uniform(g, -1, 1);
        CHECK(s(x, y) == doctest::Approx(h(0.3 + x, -0.2 + y)).epsilon(1e-13));
        const double c = std::cos(0.4), sn = std::sin(0.4);
        CHECK(r(x, y) == doctest::Approx(h(c * x - sn * y, sn * x + c * y)).epsilon(1e-13));
    }
}

TEST_CASE("series reciprocal and powers") {
    Poly2 p = 2.0 + Poly2::x(5) * 0.5 - Poly2::y(5) * 0.25;
    const Poly2 inv = p.reciprocal();
    const Poly2 one = p * inv;
    CHECK(one.coeff(0, 0) == doctest::Approx(1.0));
    for (int i = 0; i <= 5; ++i)
        for (int j = 0; i + j <= 5; ++j)
            if (i + j > 0) CHECK(std::abs(one.coeff(i, j)) < 1e-14);
    const Poly2 root = p.pow(0.5);
    const Poly2 sq = root * root;
    for (int i = 0; i <= 5; ++i)
        for (int j = 0; i + j <= 5; ++j) CHECK(std::abs(sq.coeff(i, j) - p.coeff(i, j)) < 1e-14);
}

TEST_CASE("compose substitutes series") {
    const Poly2 h = Poly2::x(4) * Poly2::x(4) + Poly2::y(4);
    const Poly2 u = Poly2::x(4) + Poly2::y(4), v = Poly2::x(4) * Poly2::y(4);
    const Poly2 c = h.compose(u, v);
    CHECK(c(0.3, 0.2) == doctest::Approx(0.25 + 0.06));
}

TEST_CASE("homogeneous parts and truncation") {
    const Poly2 h = monge_height(MongeJet3{1.0, 2.0, 1.0, 0.5});
    const Poly2 h2 = h.homogeneous(2), h3 = h.homogeneous(3);
    CHECK(h2.coeff(2, 0) == doctest::Approx(0.5));
    CHECK(h2.coeff(3, 0) == 0.0);
    CHECK(h3.coeff(3, 0) == doctest::Approx(2.0 / 6.0));
    CHECK(h3.coeff(1, 2) == doctest::Approx(0.5));
    CHECK(h.truncated(2).coeff(3, 0) == 0.0);
    CHECK_FALSE(h.to_string().empty());
}
