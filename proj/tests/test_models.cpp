#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gmc/models.hpp"
#include "support.hpp"

using namespace gmc;
using std::numbers::pi;

TEST_CASE("singular quadrature: known integrals, both schemes") {
    // integral of (1 - x^2)^(-1/2) over (-1, 1) is pi
    const EndpointIntegrand f = [](double x, double from_a, double to_b) {
        (void)x;
        return 1.0 / std::sqrt(from_a * to_b);
    };
    QuadratureConfig ts, gs;
    gs.scheme = QuadratureScheme::substitution_gauss;
    CHECK(std::abs(singular_integral(f, -1.0, 1.0, 2, ts) - pi) < 1e-13);
    CHECK(std::abs(singular_integral(f, -1.0, 1.0, 2, gs) - pi) < 1e-13);
    // integral of (cos s)^(-1/4) over (-pi/2, pi/2), both ends x^(-1/4)
    const EndpointIntegrand g = [](double, double from_a, double to_b) {
        return std::pow(std::sin(std::min(from_a, to_b)), -0.25);
    };
    const double want = std::sqrt(pi) * std::tgamma(3.0 / 8.0) / std::tgamma(7.0 / 8.0);
    CHECK(std::abs(singular_integral(g, -pi / 2, pi / 2, 4, ts) - want) < 1e-12);
    CHECK(std::abs(singular_integral(g, -pi / 2, pi / 2, 4, gs) - want) < 1e-12);
    CHECK(singular_integral(f, 0.5, 0.5, 2) == 0.0);
    CHECK_THROWS_AS(singular_integral(f, 1.0, 0.0, 2), DomainError);
}

TEST_CASE("continued fractions and nearest rationals") {
    const auto cf = convergents(pi, 4);
    REQUIRE(cf.size() == 4);
    CHECK(cf[1].p == 22);
    CHECK(cf[1].q == 7);
    CHECK(cf[3].p == 355);
    CHECK(cf[3].q == 113);
    CHECK(convergents(0.5, 10).size() == 2);
    const RationalApprox r = nearest_rational(0.41253, 64);
    CHECK(std::abs(static_cast<double>(r.p) / r.q - 0.41253) == doctest::Approx(r.distance));
    CHECK(r.q <= 64);
    CHECK(nearest_rational(3.0 / 7.0).q == 7);
}

TEST_CASE("torus rotation number") {
    SUBCASE("ODE rate at s = 0 and theta0 independence") {
        TorusOdeConfig a, b;
        b.theta0 = 1.7;
        CHECK(torus_theta_advance(1.0, 3.0, a) == doctest::Approx(torus_theta_advance(1.0, 3.0, b)).epsilon(1e-10));
        CHECK(std::pow(1.0 / 64.0, 0.25) == doctest::Approx(0.35355339));
    }
    SUBCASE("quadrature and ODE differ by a constant factor") {
        for (double x : {0.05, 0.2, 0.5, 0.8}) {
            const TorusRho t = torus_rotation(x);
            CHECK(t.rho_quadrature > 0.0);
            CHECK(t.rho_numeric > 0.0);
            CHECK(t.normalization == doctest::Approx(2 * pi).epsilon(1e-10));
            CHECK(t.continued_fraction.size() == 10);
        }
    }
    SUBCASE("quadrature vanishes like ratio^(3/4)") {
        const double c = std::sqrt(pi) * std::tgamma(3.0 / 8.0) / std::tgamma(7.0 / 8.0);
        const double x = 1e-6;
        CHECK(torus_rho(x) / std::pow(x, 0.75) == doctest::Approx(2 * c).epsilon(1e-5));
    }
    SUBCASE("halving the endpoint fraction changes nothing") {
        QuadratureConfig h;
        h.endpoint_fraction = 0.125;
        CHECK(std::abs(torus_rho(0.5, h) - torus_rho(0.5)) < 1e-9);
        QuadratureConfig g;
        g.scheme = QuadratureScheme::substitution_gauss;
        CHECK(std::abs(torus_rho(0.5, g) - torus_rho(0.5)) < 1e-12);
    }
    SUBCASE("billiard trace reproduces the ODE") {
        for (double x : {0.1, 0.5}) {
            const TorusTraceRho tr = torus_rho_trace(x, 1.0);
            CHECK(std::abs(tr.rho - torus_rho_numeric(x, 1.0)) < 1e-5);
            CHECK(tr.reflections == 2);
        }
    }
    CHECK_THROWS_AS(torus_rho(1.2), ConfigError);
}

TEST_CASE("ellipsoid closed forms") {
    const auto U = ellipsoid_umbilics(3, 2, 1);
    CHECK(U[0](0) == doctest::Approx(2.37170825));
    CHECK(U[0](2) == doctest::Approx(0.61237244));
    for (const Vec3& p : U) CHECK(std::abs(p(0) * p(0) / 9 + p(2) * p(2) - 1.0) < 1e-12);
    CHECK(ellipsoid_umbilics(2.0, 2.0 - 1e-9, 1.0)[0](0) < 1e-3);
    CHECK(ellipsoid_h(3, 2, 1, -4.0) == 0.0);
    CHECK_THROWS_AS(ellipsoid_umbilics(1, 2, 3), ConfigError);
}

TEST_CASE("S1 and S2") {
    const EllipsoidData d = ellipsoid_data(3, 2, 1);
    CHECK(d.S1 > 0.0);
    CHECK(d.S2 > 0.0);
    CHECK(std::abs(d.S1 - d.S1_check) < 1e-8);
    CHECK(std::abs(d.S2 - d.S2_check) < 1e-8);
    CHECK(d.rho == doctest::Approx(d.S2 / d.S1));
    QuadratureConfig h;
    h.endpoint_fraction = 0.125;
    const EllipsoidArcs half = ellipsoid_S1_S2(3, 2, 1, h);
    CHECK(std::abs(half.S1 - d.S1) < 1e-9);
    CHECK(std::abs(half.S2 - d.S2) < 1e-9);
    // |t|^(1/4) / sqrt|h(t)| dt is homogeneous of degree -1/2 in the axes
    const EllipsoidArcs s = ellipsoid_S1_S2(6, 4, 2);
    CHECK(s.rho == doctest::Approx(d.rho).epsilon(1e-12));
    CHECK(s.S1 / d.S1 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(s.S2 / d.S2 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("sigma coordinates") {
    const EllipsoidSigma sig(3, 2, 1);
    double prev = -1.0;
    for (double u = -4.0; u <= -1.0; u += 0.25) {
        const double s = sig.sigma1(u);
        CHECK(s > prev);
        prev = s;
    }
    CHECK(sig.sigma1(-1.0) == doctest::Approx(sig.S1()));
    CHECK(sig.sigma2(-9.0) == 0.0);
    CHECK(sig.sigma2(-4.0) == doctest::Approx(sig.S2()));
    CHECK_THROWS_AS(sig.sigma1(-0.5), DomainError);

    // umbilics sit at 0, 2 S2, 2 S2 + 2 S1, 4 S2 + 2 S1 along the ellipse; sigma has a
    // square-root endpoint there, so rounding in the position costs about sqrt(eps)
    const auto Ua = ellipsoid_umbilics_angular(3, 2, 1);
    const double want[4] = {0.0, 2 * sig.S2(), 2 * sig.S2() + 2 * sig.S1(), 4 * sig.S2() + 2 * sig.S1()};
    for (int i = 0; i < 4; ++i) {
        const double pos = sig.ellipse_position(Ua[i].v);
        const double d = std::remainder(pos - want[i], sig.perimeter());
        CHECK(std::abs(d) < 1e-7);
    }
    // monotone along the ellipse
    double last = sig.ellipse_position(Ua[0].v + 1e-6);
    for (int k = 1; k < 200; ++k) {
        const double p = sig.ellipse_position(Ua[0].v + 1e-6 + 2 * pi * k / 200.0);
        if (p < last) CHECK(last - p > 0.9 * sig.perimeter());  // wrap
        last = p;
    }
}

TEST_CASE("GMC traces are diagonal lines in sigma coordinates") {
    const EllipsoidSigma sig(3, 2, 1);
    const SurfaceChart E = orient_positive(SurfaceChart::ellipsoid(3, 2, 1), {-2.5, -6.5});
    for (Branch br : {Branch::minimal, Branch::maximal}) {
        TraceConfig cfg;
        cfg.rel_tol = 1e-12;
        const Polyline pl = trace_gmc_line(E, {-2.5, -6.5}, br, cfg);
        const SigmaLineFit fit = sigma_line_fit(sig, pl);
        CHECK(fit.samples > 10);
        CHECK(fit.max_deviation < 1e-5);
    }
}

TEST_CASE("return map on the umbilic ellipse is a rotation") {
    const EllipsoidData d = ellipsoid_data(3, 2, 1);
    const std::vector<double> seeds{0.1, 1.3, 2.9, 4.0, 5.5};
    const ReturnMapReport mx = ellipsoid_return_map(3, 2, 1, Branch::maximal, seeds);
    CHECK(mx.spread < 1e-6);
    CHECK(std::abs(mx.rotation_number - d.rho_return) < 1e-6);
    const ReturnMapReport mn = ellipsoid_return_map(3, 2, 1, Branch::minimal, seeds);
    CHECK(std::abs(mn.rotation_number - (1.0 - d.rho_return)) < 1e-6);
}
