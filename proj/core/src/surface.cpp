#include "gmc/surface.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

namespace gmc {

namespace {

template <class S>
S eval_poly(const Poly2& p, const S& x, const S& y) {
    const int n = p.degree();
    S result(0.0);
    for (int i = n; i >= 0; --i) {
        S row(0.0);
        for (int j = n - i; j >= 0; --j) row = S(row * y + S(p.coeff(i, j)));
        result = S(result * x + row);
    }
    return result;
}

template <class S>
using V3 = Eigen::Matrix<S, 3, 1>;

template <class S>
V3<S> cross(const V3<S>& a, const V3<S>& b) {
    V3<S> r;
    r(0) = a(1) * b(2) - a(2) * b(1);
    r(1) = a(2) * b(0) - a(0) * b(2);
    r(2) = a(0) * b(1) - a(1) * b(0);
    return r;
}

template <class S>
S dot(const V3<S>& a, const V3<S>& b) {
    return a(0) * b(0) + a(1) * b(1) + a(2) * b(2);
}

// Ellipsoidal coordinate factor sqrt(eps (t + w2)) and its first two derivatives.
template <class S>
void sqrt_factor(const S& t, double w2, double eps, S& f, S& f1, S& f2) {
    using std::sqrt;
    f = sqrt(S(eps * (t + w2)));
    f1 = S(eps / (2.0 * f));
    f2 = S(-1.0 / (4.0 * f * f * f));
}

}  // namespace

const char* to_string(ChartKind k) {
    switch (k) {
        case ChartKind::MongeGraph: return "monge";
        case ChartKind::TorusOfRevolution: return "torus";
        case ChartKind::TriaxialEllipsoid: return "ellipsoid";
        case ChartKind::EllipsoidAngular: return "ellipsoid_angular";
    }
    return "unknown";
}

const char* to_string(Region r) {
    switch (r) {
        case Region::elliptic: return "elliptic";
        case Region::parabolic: return "parabolic";
        case Region::hyperbolic: return "hyperbolic";
    }
    return "unknown";
}

SurfaceChart SurfaceChart::monge(const Poly2& h, const Domain& domain) {
    for (int i = 0; i <= h.degree(); ++i)
        for (int j = 0; i + j <= h.degree(); ++j)
            if (!std::isfinite(h.coeff(i, j))) throw ConfigError("monge: non-finite coefficient");
    SurfaceChart c;
    c.kind_ = ChartKind::MongeGraph;
    c.domain_ = domain;
    c.h_ = {h, h.dx(), h.dy(), h.dx().dx(), h.dx().dy(), h.dy().dy()};
    return c;
}

SurfaceChart SurfaceChart::torus(double r, double R) {
    if (!(r > 0.0 && R > r)) throw ConfigError("torus: requires 0 < r < R");
    SurfaceChart c;
    c.kind_ = ChartKind::TorusOfRevolution;
    c.p0_ = r;
    c.p1_ = R;
    c.domain_ = Domain{-std::numbers::pi, std::numbers::pi, -std::numbers::pi, std::numbers::pi, true, true};
    c.base_sign_ = -1;  // alpha_s x alpha_theta points inward
    return c;
}

SurfaceChart SurfaceChart::ellipsoid(double a, double b, double c, std::array<int, 3> signs) {
    if (!(a > b && b > c && c > 0.0)) throw ConfigError("ellipsoid: requires a > b > c > 0");
    for (int s : signs)
        if (s != 1 && s != -1) throw ConfigError("ellipsoid: signs must be +-1");
    SurfaceChart ch;
    ch.kind_ = ChartKind::TriaxialEllipsoid;
    ch.p0_ = a;
    ch.p1_ = b;
    ch.p2_ = c;
    ch.signs_ = signs;
    ch.domain_ = Domain{-b * b, -c * c, -a * a, -b * b, false, false};
    const double u = -0.5 * (b * b + c * c), v = -0.5 * (a * a + b * b);
    const auto j = ch.jet<double>(u, v);
    ch.base_sign_ = dot<double>(cross<double>(j.pu, j.pv), j.p) > 0.0 ? 1 : -1;
    return ch;
}

SurfaceChart SurfaceChart::ellipsoid_angular(double a, double b, double c) {
    if (!(a > b && b > c && c > 0.0)) throw ConfigError("ellipsoid: requires a > b > c > 0");
    SurfaceChart ch;
    ch.kind_ = ChartKind::EllipsoidAngular;
    ch.p0_ = a;
    ch.p1_ = b;
    ch.p2_ = c;
    ch.domain_ = Domain{0.0, std::numbers::pi, -std::numbers::pi, std::numbers::pi, false, true};
    const auto j = ch.jet<double>(1.0, 0.3);
    ch.base_sign_ = dot<double>(cross<double>(j.pu, j.pv), j.p) > 0.0 ? 1 : -1;
    return ch;
}

SurfaceChart SurfaceChart::with_orientation(int sign) const {
    if (sign != 1 && sign != -1) throw ConfigError("orientation must be +-1");
    SurfaceChart c = *this;
    c.orientation_ = sign;
    return c;
}

SurfaceChart SurfaceChart::with_domain(const Domain& d) const {
    SurfaceChart c = *this;
    c.domain_ = d;
    return c;
}

void SurfaceChart::require(const ChartPoint& p) const {
    if (!std::isfinite(p.u) || !std::isfinite(p.v) || !domain_.contains(p))
        throw DomainError("point (" + std::to_string(p.u) + ", " + std::to_string(p.v) + ") outside the " +
                          to_string(kind_) + " chart domain");
}

template <class S>
EmbeddingJet<S> SurfaceChart::jet(const S& u, const S& v) const {
    using std::cos;
    using std::sin;
    EmbeddingJet<S> J;
    switch (kind_) {
        case ChartKind::MongeGraph: {
            const S zero(0.0), one(1.0);
            J.p << u, v, eval_poly(h_[0], u, v);
            J.pu << one, zero, eval_poly(h_[1], u, v);
            J.pv << zero, one, eval_poly(h_[2], u, v);
            J.puu << zero, zero, eval_poly(h_[3], u, v);
            J.puv << zero, zero, eval_poly(h_[4], u, v);
            J.pvv << zero, zero, eval_poly(h_[5], u, v);
            break;
        }
        case ChartKind::TorusOfRevolution: {
            const double r = p0_, R = p1_;
            const S cs = cos(u), ss = sin(u), ct = cos(v), st = sin(v);
            const S rho = S(R + r * cs);
            const S zero(0.0);
            J.p << rho * ct, rho * st, S(r * ss);
            J.pu << S(-r * ss * ct), S(-r * ss * st), S(r * cs);
            J.pv << S(-rho * st), S(rho * ct), zero;
            J.puu << S(-r * cs * ct), S(-r * cs * st), S(-r * ss);
            J.puv << S(r * ss * st), S(-r * ss * ct), zero;
            J.pvv << S(-rho * ct), S(-rho * st), zero;
            break;
        }
        case ChartKind::TriaxialEllipsoid: {
            const double ax[3] = {p0_, p1_, p2_};
            const double a2 = ax[0] * ax[0], b2 = ax[1] * ax[1], c2 = ax[2] * ax[2];
            const double W[3] = {(a2 - b2) * (a2 - c2), (b2 - a2) * (b2 - c2), (c2 - a2) * (c2 - b2)};
            const double eps_u[3] = {1.0, 1.0, -1.0};
            const double eps_v[3] = {1.0, -1.0, -1.0};
            for (int i = 0; i < 3; ++i) {
                const double w2 = ax[i] * ax[i];
                const double C = signs_[static_cast<std::size_t>(i)] * std::sqrt(w2 / std::abs(W[i]));
                S f, f1, f2, g, g1, g2;
                sqrt_factor(u, w2, eps_u[i], f, f1, f2);
                sqrt_factor(v, w2, eps_v[i], g, g1, g2);
                J.p(i) = S(C * f * g);
                J.pu(i) = S(C * f1 * g);
                J.pv(i) = S(C * f * g1);
                J.puu(i) = S(C * f2 * g);
                J.puv(i) = S(C * f1 * g1);
                J.pvv(i) = S(C * f * g2);
            }
            break;
        }
        case ChartKind::EllipsoidAngular: {
            const double a = p0_, b = p1_, c = p2_;
            const S st = sin(u), ct = cos(u), sp = sin(v), cp = cos(v);
            const S zero(0.0);
            J.p << S(a * st * cp), S(b * ct), S(c * st * sp);
            J.pu << S(a * ct * cp), S(-b * st), S(c * ct * sp);
            J.pv << S(-a * st * sp), zero, S(c * st * cp);
            J.puu << S(-a * st * cp), S(-b * ct), S(-c * st * sp);
            J.puv << S(-a * ct * sp), zero, S(c * ct * cp);
            J.pvv << S(-a * st * cp), zero, S(-c * st * sp);
            break;
        }
    }
    return J;
}

template EmbeddingJet<double> SurfaceChart::jet<double>(const double&, const double&) const;
template EmbeddingJet<AD> SurfaceChart::jet<AD>(const AD&, const AD&) const;

Vec3 SurfaceChart::position(const ChartPoint& p) const { return jet<double>(p.u, p.v).p; }

Vec3 SurfaceChart::normal(const ChartPoint& p) const {
    const auto j = jet<double>(p.u, p.v);
    return normal_sign() * j.pu.cross(j.pv).normalized();
}

template <class S>
FormsT<S> forms_from_jet(const EmbeddingJet<S>& j, int normal_sign) {
    using std::sqrt;
    FormsT<S> w;
    w.E = dot<S>(j.pu, j.pu);
    w.F = dot<S>(j.pu, j.pv);
    w.G = dot<S>(j.pv, j.pv);
    V3<S> n = cross<S>(j.pu, j.pv);
    const S len = sqrt(dot<S>(n, n));
    const S scale = S(double(normal_sign) / len);
    n = (n * scale).eval();
    w.e = dot<S>(n, j.puu);
    w.f = dot<S>(n, j.puv);
    w.g = dot<S>(n, j.pvv);
    return w;
}

template FormsT<double> forms_from_jet<double>(const EmbeddingJet<double>&, int);
template FormsT<AD> forms_from_jet<AD>(const EmbeddingJet<AD>&, int);

FundamentalForms fundamental_forms(const SurfaceChart& chart, const ChartPoint& p) {
    chart.require(p);
    const auto w = forms_at<double>(chart, p.u, p.v);
    FundamentalForms ff{w.E, w.F, w.G, w.e, w.f, w.g, chart.normal_sign()};
    if (!(ff.E > 0.0 && ff.G > 0.0 && ff.det_first() > 0.0) || !std::isfinite(ff.e + ff.f + ff.g))
        throw DomainError("chart is not regular at (" + std::to_string(p.u) + ", " + std::to_string(p.v) + ")");
    return ff;
}

CurvatureData curvature_data(const FundamentalForms& ff, const ToleranceConfig& tol) {
    const double det = ff.det_first();
    if (!(det > 0.0)) throw ConsistencyError("curvature_data: first form is not positive definite");
    CurvatureData cd;
    cd.K = ff.det_second() / det;
    cd.H = (ff.e * ff.G - 2.0 * ff.f * ff.F + ff.g * ff.E) / (2.0 * det);
    // Shape operator in the first-form orthonormal frame e1 = (1, 0)/sqrt(E),
    // e2 = (-F, E)/sqrt(E det). Its eigenvalue gap has no cancellation, which
    // H^2 - K would suffer near umbilics.
    const double s11 = ff.e / ff.E;
    const double s12 = (ff.E * ff.f - ff.F * ff.e) / (ff.E * std::sqrt(det));
    const double s22 = (ff.F * ff.F * ff.e - 2.0 * ff.E * ff.F * ff.f + ff.E * ff.E * ff.g) / (ff.E * det);
    const double gap = std::hypot(s11 - s22, 2.0 * s12);
    const double disc = cd.H * cd.H - cd.K;
    if (disc < -1e-8 * std::max(1.0, cd.H * cd.H))
        throw ConsistencyError("curvature_data: H^2 - K = " + std::to_string(disc) + " < 0");
    // Larger-magnitude root first, the other from the product K = k1 k2.
    if (cd.H >= 0.0) {
        cd.k2 = cd.H + 0.5 * gap;
        cd.k1 = cd.k2 != 0.0 ? cd.K / cd.k2 : 0.0;
    } else {
        cd.k1 = cd.H - 0.5 * gap;
        cd.k2 = cd.K / cd.k1;
    }
    if (cd.k1 > cd.k2) std::swap(cd.k1, cd.k2);
    if (cd.K > tol.parabolic) cd.region = Region::elliptic;
    else if (cd.K < -tol.parabolic) cd.region = Region::hyperbolic;
    else cd.region = Region::parabolic;
    cd.umbilic = gap < tol.umbilic * std::max(1.0, std::abs(cd.k1) + std::abs(cd.k2));
    return cd;
}

CurvatureData curvature_at(const SurfaceChart& chart, const ChartPoint& p, const ToleranceConfig& tol) {
    return curvature_data(fundamental_forms(chart, p), tol);
}

Vec2 gaussian_gradient(const SurfaceChart& chart, const ChartPoint& p) {
    chart.require(p);
    const auto w = forms_at<AD>(chart, ad_var(p.u, 0), ad_var(p.v, 1));
    return gaussian_curvature(w).derivatives();
}

SurfaceChart orient_positive(const SurfaceChart& chart, const ChartPoint& reference, const ToleranceConfig& tol) {
    const CurvatureData cd = curvature_at(chart, reference, tol);
    if (cd.region == Region::hyperbolic)
        throw HyperbolicRegionError("orient_positive: reference point has K < 0");
    if (cd.region == Region::parabolic)
        throw ParabolicPointError("orient_positive: reference point is parabolic");
    return cd.H > 0.0 ? chart : chart.with_orientation(-chart.orientation_sign());
}

TangentGraph tangent_graph(const SurfaceChart& chart, const ChartPoint& p, int order) {
    if (order < 2 || order > 4) throw ConfigError("tangent_graph: order must be 2, 3 or 4");
    chart.require(p);
    const auto J = chart.jet<double>(p.u, p.v);
    TangentGraph tg;
    tg.origin = J.p;
    tg.normal = chart.normal(p);
    tg.e1 = J.pu.normalized();
    tg.e2 = tg.normal.cross(tg.e1);

    // Taylor polynomials (in du, dv) of the three components of alpha - alpha(p).
    std::array<Poly2, 3> comp{Poly2(order), Poly2(order), Poly2(order)};
    if (chart.kind() == ChartKind::MongeGraph) {
        comp[0].set(1, 0, 1.0);
        comp[1].set(0, 1, 1.0);
        comp[2] = chart.height().shifted(p.u, p.v).truncated(order);
        comp[2].set(0, 0, 0.0);
    } else {
        if (order > 3) throw ConfigError("tangent_graph: order 4 needs a Monge graph chart");
        const auto Ja = chart.jet<AD>(ad_var(p.u, 0), ad_var(p.v, 1));
        for (int i = 0; i < 3; ++i) {
            Poly2& c = comp[static_cast<std::size_t>(i)];
            c.set(1, 0, J.pu(i));
            c.set(0, 1, J.pv(i));
            c.set(2, 0, J.puu(i) / 2.0);
            c.set(1, 1, J.puv(i));
            c.set(0, 2, J.pvv(i) / 2.0);
            if (order >= 3) {
                const Vec2 duu = Ja.puu(i).derivatives(), dvv = Ja.pvv(i).derivatives();
                c.set(3, 0, duu(0) / 6.0);
                c.set(2, 1, duu(1) / 2.0);
                c.set(1, 2, dvv(0) / 2.0);
                c.set(0, 3, dvv(1) / 6.0);
            }
        }
    }
    auto project = [&](const Vec3& axis) {
        return axis(0) * comp[0] + axis(1) * comp[1] + axis(2) * comp[2];
    };
    const Poly2 X = project(tg.e1), Y = project(tg.e2), Z = project(tg.normal);

    // Invert (du, dv) -> (X, Y) as a series by fixed-point iteration on the
    // nonlinear remainder; each pass gains one order.
    Eigen::Matrix2d L;
    L << X.coeff(1, 0), X.coeff(0, 1), Y.coeff(1, 0), Y.coeff(0, 1);
    const Eigen::Matrix2d Li = L.inverse();
    const Poly2 Xn = X - X.homogeneous(1), Yn = Y - Y.homogeneous(1);
    const Poly2 x = Poly2::x(order), y = Poly2::y(order);
    Poly2 du = Li(0, 0) * x + Li(0, 1) * y;
    Poly2 dv = Li(1, 0) * x + Li(1, 1) * y;
    for (int it = 1; it < order; ++it) {
        const Poly2 rx = x - Xn.compose(du, dv), ry = y - Yn.compose(du, dv);
        du = Li(0, 0) * rx + Li(0, 1) * ry;
        dv = Li(1, 0) * rx + Li(1, 1) * ry;
    }
    tg.h = Z.compose(du, dv);
    tg.h.set(0, 0, 0.0);
    tg.h.set(1, 0, 0.0);
    tg.h.set(0, 1, 0.0);
    return tg;
}

FormsExpansion monge_forms_expansion(const MongeJet4& j) {
    const int n = 3;
    const double k = j.k, a = j.a, b = j.b, c = j.c, d = j.d;
    FormsExpansion x{Poly2(n), Poly2(n), Poly2(n), Poly2(n), Poly2(n), Poly2(n)};
    x.E.set(0, 0, 1.0);

    x.F.set(1, 2, d * k);
    x.F.set(0, 3, b * k / 2.0);

    // The printed xy^2 coefficient reads "2kbo"; taken here as 2kb.
    x.G.set(0, 0, 1.0);
    x.G.set(0, 2, k * k);
    x.G.set(1, 2, 2.0 * k * b);
    x.G.set(0, 3, k * c);

    x.e.set(1, 0, a);
    x.e.set(0, 1, d);
    x.e.set(2, 0, j.A / 2.0);
    x.e.set(1, 1, j.B);
    x.e.set(0, 2, j.C / 2.0);
    x.e.set(0, 3, -0.5 * d * k * k);

    x.f.set(1, 0, d);
    x.f.set(0, 1, b);
    x.f.set(2, 0, j.B / 2.0);
    x.f.set(1, 1, j.C);
    x.f.set(0, 2, j.D / 2.0);
    x.f.set(1, 2, -0.5 * d * k * k);
    x.f.set(0, 3, -0.5 * b * k * k);

    x.g.set(0, 0, k);
    x.g.set(1, 0, b);
    x.g.set(0, 1, c);
    x.g.set(2, 0, j.C / 2.0);
    x.g.set(1, 1, j.D);
    x.g.set(0, 2, 0.5 * (j.E4 - k * k * k));
    x.g.set(2, 1, -0.5 * k * k * d);
    x.g.set(1, 2, -1.5 * b * k * k + d * k * k);
    x.g.set(0, 3, (b / 2.0 - c) * k * k);
    return x;
}

FormsExpansion monge_forms_series(const Poly2& h, int order) {
    const Poly2 hh = h.truncated(order + 2);
    const Poly2 hx = hh.dx().truncated(order), hy = hh.dy().truncated(order);
    const Poly2 hxx = hh.dx().dx().truncated(order), hxy = hh.dx().dy().truncated(order),
                hyy = hh.dy().dy().truncated(order);
    const Poly2 Winv = (1.0 + hx * hx + hy * hy).pow(-0.5);
    return FormsExpansion{1.0 + hx * hx, hx * hy, 1.0 + hy * hy, hxx * Winv, hxy * Winv, hyy * Winv};
}

Poly2 monge_height(const MongeJet3& j) {
    Poly2 h(3);
    h.set(2, 0, j.k / 2.0);
    h.set(0, 2, j.k / 2.0);
    h.set(3, 0, j.a / 6.0);
    h.set(1, 2, j.b / 2.0);
    h.set(0, 3, j.c / 6.0);
    return h;
}

Poly2 monge_height(const MongeJet4& j) {
    Poly2 h(4);
    h.set(0, 2, j.k / 2.0);
    h.set(3, 0, j.a / 6.0);
    h.set(1, 2, j.b / 2.0);
    h.set(2, 1, j.d / 2.0);
    h.set(0, 3, j.c / 6.0);
    h.set(4, 0, j.A / 24.0);
    h.set(3, 1, j.B / 6.0);
    h.set(2, 2, j.C / 4.0);
    h.set(1, 3, j.D / 6.0);
    h.set(0, 4, j.E4 / 24.0);
    return h;
}

}  // namespace gmc
