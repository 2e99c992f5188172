#include "gmc/umbilic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/roots.hpp>
#include <Eigen/LU>
#include <unsupported/Eigen/Polynomials>

namespace gmc {

namespace {

double jet_scale(const MongeJet3& j) { return std::max({std::abs(j.a), std::abs(j.b), std::abs(j.c)}); }

// Real roots of sum_i coeffs[i] t^i (ascending), Newton-polished.
std::vector<double> real_roots(std::vector<double> coeffs, double scale) {
    while (coeffs.size() > 1 && std::abs(coeffs.back()) <= 1e-14 * scale) coeffs.pop_back();
    std::vector<double> out;
    if (coeffs.size() <= 1) return out;
    auto eval = [&](double t, double& d) {
        double v = 0.0;
        d = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 0;) {
            d = d * t + v;
            v = v * t + coeffs[i];
        }
        return v;
    };
    Eigen::VectorXd c(static_cast<Eigen::Index>(coeffs.size()));
    for (std::size_t i = 0; i < coeffs.size(); ++i) c(static_cast<Eigen::Index>(i)) = coeffs[i];
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
    solver.compute(c);
    for (const auto& z : solver.roots()) {
        if (std::abs(z.imag()) > 1e-7 * std::max(1.0, std::abs(z))) continue;
        double t = z.real();
        for (int it = 0; it < 4; ++it) {
            double d;
            const double v = eval(t, d);
            if (d == 0.0) break;
            t -= v / d;
        }
        out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

const char* to_string(GmcType t) {
    switch (t) {
        case GmcType::G1: return "G1";
        case GmcType::G2: return "G2";
        case GmcType::G3: return "G3";
        case GmcType::degenerate: return "degenerate";
    }
    return "degenerate";
}

const char* to_string(PrincipalType t) {
    switch (t) {
        case PrincipalType::D1: return "D1";
        case PrincipalType::D2: return "D2";
        case PrincipalType::D3: return "D3";
        case PrincipalType::degenerate: return "degenerate";
    }
    return "degenerate";
}

const char* to_string(EquilibriumKind k) {
    switch (k) {
        case EquilibriumKind::saddle: return "saddle";
        case EquilibriumKind::node: return "node";
        case EquilibriumKind::nonhyperbolic: return "nonhyperbolic";
    }
    return "nonhyperbolic";
}

double delta_G(const MongeJet3& j) {
    const double a = j.a, b = j.b, c = j.c;
    const double t = a - 5.0 * b;
    return 4.0 * c * c * (2.0 * a - b) * (2.0 * a - b) - (3.0 * c * c + t * t) * (3.0 * t * (a - b) + c * c);
}

double delta_P(const MongeJet3& j) {
    const double a = j.a, b = j.b, c = j.c;
    const double t = a - 2.0 * b;
    return 4.0 * b * t * t * t - c * c * t * t;
}

QuadraticCoeffs umbilic_first_jet_bde(const MongeJet3& j, double x, double y) {
    const double l = (j.b - j.a) * x + j.c * y;
    return QuadraticCoeffs{l, 2.0 * j.b * y, -l};
}

std::vector<LieCartanEquilibrium> lie_cartan_equilibria(const MongeJet3& j, const ToleranceConfig& tol) {
    const double a = j.a, b = j.b, c = j.c;
    const double s = jet_scale(j);
    if (!(std::abs(j.k * b * (b - a)) > tol.jet_boundary * std::max(1.0, std::abs(j.k)) * s * s))
        throw RegularityError("lie_cartan_equilibria: transversality kb(b-a) != 0 fails");

    // F = x A(p) + y B(p) with A = (b-a)(p^2-1), B = c p^2 + 4 b p - c (p = dy/dx).
    // On the fiber the lifted field reduces to p' = -(A + pB).
    auto A1 = [&](double p) { return 2.0 * (b - a) * p; };
    auto B = [&](double p) { return c * p * p + 4.0 * b * p - c; };
    auto B1 = [&](double p) { return 2.0 * c * p + 4.0 * b; };
    // Complementary chart q = dx/dy: F = x At(q) + y Bt(q).
    auto At = [&](double q) { return (b - a) * (1.0 - q * q); };
    auto At1 = [&](double q) { return -2.0 * (b - a) * q; };
    auto Bt1 = [&](double q) { return -2.0 * c * q + 4.0 * b; };

    std::vector<LieCartanEquilibrium> out;
    const double hyp_tol = 1e-9 * s;
    auto classify = [&](LieCartanEquilibrium& e) {
        if (std::abs(e.eigen1) <= hyp_tol || std::abs(e.eigen2) <= hyp_tol) {
            e.kind = EquilibriumKind::nonhyperbolic;
            throw RegularityError("lie_cartan_equilibria: nonhyperbolic equilibrium on the fiber");
        }
        e.kind = e.eigen1 * e.eigen2 < 0.0 ? EquilibriumKind::saddle : EquilibriumKind::node;
    };

    // c p^3 + (5b - a) p^2 - c p + (a - b) = 0, keep |p| <= 1.
    for (double p : real_roots({a - b, -c, 5.0 * b - a, c}, s)) {
        if (std::abs(p) > 1.0) continue;
        LieCartanEquilibrium e;
        e.slope_chart = true;
        e.coordinate = p;
        e.direction = Vec2(1.0, p).normalized();
        e.eigen2 = A1(p) + p * B1(p);
        e.eigen1 = -(A1(p) + B(p) + p * B1(p));
        classify(e);
        out.push_back(e);
    }
    // Same cubic in q = 1/p: (a - b) q^3 - c q^2 + (5b - a) q + c = 0, keep |q| < 1.
    for (double q : real_roots({c, 5.0 * b - a, -c, a - b}, s)) {
        if (std::abs(q) >= 1.0) continue;
        LieCartanEquilibrium e;
        e.slope_chart = false;
        e.coordinate = q;
        e.direction = Vec2(q, 1.0).normalized();
        e.eigen2 = Bt1(q) + q * At1(q);
        e.eigen1 = -(Bt1(q) + At(q) + q * At1(q));
        classify(e);
        out.push_back(e);
    }
    return out;
}

UmbilicClassification classify_gmc_umbilic(const MongeJet3& j, const ToleranceConfig& tol) {
    UmbilicClassification r;
    const double s = jet_scale(j);
    const double rel = tol.jet_boundary;
    r.delta_G = delta_G(j);
    r.delta_P = delta_P(j);
    r.transversality_Tg = std::abs(j.k * j.b * (j.b - j.a)) > rel * std::max(1.0, std::abs(j.k)) * s * s;
    r.transversality_T = std::abs(j.b * (j.b - j.a)) > rel * s * s;
    const double s4 = s * s * s * s;

    if (r.transversality_T) {
        const double ratio = j.a / j.b;
        if (std::abs(r.delta_P) <= rel * s4) r.principal_type = PrincipalType::degenerate;
        else if (r.delta_P > 0.0) r.principal_type = PrincipalType::D1;
        else if (ratio > 1.0) r.principal_type = PrincipalType::D2;
        else r.principal_type = PrincipalType::D3;
    }
    if (r.transversality_Tg && std::abs(r.delta_G) > rel * s4) {
        const double ratio = j.a / j.b;
        if (r.delta_G > 0.0) r.gmc_type = GmcType::G1;
        else if (ratio > 1.0) r.gmc_type = GmcType::G2;
        else r.gmc_type = GmcType::G3;
        try {
            r.equilibria = lie_cartan_equilibria(j, tol);
            r.separatrix_count = static_cast<int>(std::count_if(
                r.equilibria.begin(), r.equilibria.end(),
                [](const LieCartanEquilibrium& e) { return e.kind == EquilibriumKind::saddle; }));
        } catch (const RegularityError&) {
            r.gmc_type = GmcType::degenerate;
            r.equilibria.clear();
            r.separatrix_count = 0;
        }
    }
    return r;
}

MongeJet3 reduce_height(const Poly2& h) {
    MongeJet3 j;
    j.k = h.coeff(2, 0) + h.coeff(0, 2);
    Poly2 cubic = h.truncated(3).homogeneous(3);
    const double scale = cubic.max_abs_coeff();
    if (scale == 0.0) return j;

    auto mixed = [&](double t) { return cubic.rotated(t).coeff(2, 1); };
    // The x^2 y coefficient is a trigonometric polynomial of degree 3 in t.
    std::vector<double> roots;
    const int n = 720;
    const double two_pi = 2.0 * std::numbers::pi;
    double t0 = 0.0, f0 = mixed(0.0);
    for (int i = 1; i <= n; ++i) {
        const double t1 = two_pi * i / n, f1 = mixed(t1);
        if (f0 == 0.0) roots.push_back(t0);
        else if (f0 * f1 < 0.0) {
            boost::uintmax_t iters = 100;
            auto tolf = boost::math::tools::eps_tolerance<double>(52);
            const auto br = boost::math::tools::toms748_solve(mixed, t0, t1, f0, f1, tolf, iters);
            roots.push_back(0.5 * (br.first + br.second));
        }
        t0 = t1;
        f0 = f1;
    }
    if (roots.empty()) throw ConvergenceError("reduce_to_monge_jet: rotation solve found no root");

    // Among the admissible rotations take the smallest |c|; a half turn then
    // makes b >= 0 (it negates a, b, c and is itself admissible).
    bool have = false;
    MongeJet3 best;
    for (double t : roots) {
        const Poly2 rc = cubic.rotated(t);
        MongeJet3 cand{j.k, 6.0 * rc.coeff(3, 0), 2.0 * rc.coeff(1, 2), 6.0 * rc.coeff(0, 3)};
        if (!have || std::abs(cand.c) < std::abs(best.c)) {
            best = cand;
            have = true;
        }
    }
    if (best.b < 0.0 || (best.b == 0.0 && best.a < 0.0)) {
        best.a = -best.a;
        best.b = -best.b;
        best.c = -best.c;
    }
    return best;
}

ChartPoint locate_umbilic(const SurfaceChart& chart, const ChartPoint& guess, const ToleranceConfig& tol) {
    // Shape operator in the frame given by the Cholesky factor of the first form.
    auto residual = [&](const ChartPoint& p, Eigen::Matrix2d* jac) {
        const FormsT<AD> w = forms_at<AD>(chart, ad_var(p.u, 0), ad_var(p.v, 1));
        const AD l11 = sqrt(w.E), l21 = w.F / l11, l22 = sqrt(w.G - l21 * l21);
        const AD i11 = 1.0 / l11, i21 = -l21 / (l11 * l22), i22 = 1.0 / l22;
        const AD s11 = i11 * i11 * w.e;
        const AD s12 = i11 * (i21 * w.e + i22 * w.f);
        const AD s22 = i21 * i21 * w.e + 2.0 * i21 * i22 * w.f + i22 * i22 * w.g;
        const AD r1 = 0.5 * (s11 - s22);
        if (jac) {
            jac->row(0) = r1.derivatives().transpose();
            jac->row(1) = s12.derivatives().transpose();
        }
        return Vec2(r1.value(), s12.value());
    };
    ChartPoint p = guess;
    const CurvatureData cd0 = curvature_at(chart, p, tol);
    const double scale = std::max(std::abs(cd0.k1), std::abs(cd0.k2));
    for (int it = 0; it < 60; ++it) {
        Eigen::Matrix2d J;
        const Vec2 r = residual(p, &J);
        if (r.norm() <= 1e-14 * scale) return p;
        const Eigen::FullPivLU<Eigen::Matrix2d> lu(J);
        if (!lu.isInvertible()) throw ConvergenceError("locate_umbilic: singular Jacobian");
        const Vec2 step = lu.solve(r);
        p.u -= step(0);
        p.v -= step(1);
        chart.require(p);
        if (step.norm() <= 1e-15 * std::max(1.0, std::hypot(p.u, p.v))) return p;
    }
    if (residual(p, nullptr).norm() <= 1e-10 * scale) return p;
    throw ConvergenceError("locate_umbilic: no convergence");
}

MongeJet3 reduce_to_monge_jet(const SurfaceChart& chart, const ChartPoint& p, const ToleranceConfig& tol) {
    const CurvatureData cd = curvature_at(chart, p, tol);
    if (!cd.umbilic) throw DomainError("reduce_to_monge_jet: point is not an umbilic");
    if (cd.region != Region::elliptic) throw DomainError("reduce_to_monge_jet: umbilic is not elliptic");
    if (!(cd.H > 0.0)) throw OrientationError("reduce_to_monge_jet: orientation not normalized (H <= 0)");
    const TangentGraph tg = tangent_graph(chart, p, 3);
    return reduce_height(tg.h);
}

}  // namespace gmc
