#pragma once

#include <array>
#include <string>

#include <Eigen/Core>
#include <unsupported/Eigen/AutoDiff>

#include "gmc/common.hpp"
#include "gmc/jets.hpp"
#include "gmc/series.hpp"

namespace gmc {

/// First-order forward-mode scalar over the chart coordinates (u, v).
using AD = Eigen::AutoDiffScalar<Eigen::Vector2d>;

inline AD ad_var(double value, int index) { return AD(value, 2, index); }

enum class ChartKind { MongeGraph, TorusOfRevolution, TriaxialEllipsoid, EllipsoidAngular };

const char* to_string(ChartKind k);

/// Chart rectangle. Periodic coordinates are unbounded (traces may wind).
struct Domain {
    double u_min = -1.0, u_max = 1.0;
    double v_min = -1.0, v_max = 1.0;
    bool u_periodic = false;
    bool v_periodic = false;

    bool contains(const ChartPoint& p) const {
        const bool uin = u_periodic || (p.u > u_min && p.u < u_max);
        const bool vin = v_periodic || (p.v > v_min && p.v < v_max);
        return uin && vin;
    }
};

/// Embedding and its partial derivatives through order 2 at one chart point.
template <class S>
struct EmbeddingJet {
    using V3 = Eigen::Matrix<S, 3, 1>;
    V3 p, pu, pv, puu, puv, pvv;
};

/// Parametrized surface patch. Immutable; the with_* helpers return copies.
///
/// The unit normal is orientation_sign() * base_sign * (alpha_u x alpha_v)/|.|.
/// base_sign is fixed per kind so that orientation +1 reproduces the usual
/// textbook normal (outward for the torus and the ellipsoids, +z for graphs).
class SurfaceChart {
public:
    /// Graph (x, y, h(x, y)) over the given rectangle.
    static SurfaceChart monge(const Poly2& h, const Domain& domain = Domain{});
    /// alpha(s, theta) = ((R + r cos s) cos theta, (R + r cos s) sin theta, r sin s).
    static SurfaceChart torus(double r, double R);
    /// Ellipsoidal coordinates u in (-b^2, -c^2), v in (-a^2, -b^2) on one octant.
    static SurfaceChart ellipsoid(double a, double b, double c, std::array<int, 3> signs = {1, 1, 1});
    /// alpha(theta, phi) = (a sin theta cos phi, b cos theta, c sin theta sin phi).
    /// Poles sit on the middle axis, so the umbilic ellipse y = 0 is theta = pi/2.
    static SurfaceChart ellipsoid_angular(double a, double b, double c);

    ChartKind kind() const { return kind_; }
    const Domain& domain() const { return domain_; }
    int orientation_sign() const { return orientation_; }
    /// Sign of N relative to alpha_u x alpha_v.
    int normal_sign() const { return orientation_ * base_sign_; }

    SurfaceChart with_orientation(int sign) const;
    SurfaceChart with_domain(const Domain& d) const;

    // parameters (meaningful for the matching kind only)
    const Poly2& height() const { return h_[0]; }
    double r() const { return p0_; }
    double R() const { return p1_; }
    double a() const { return p0_; }
    double b() const { return p1_; }
    double c() const { return p2_; }
    const std::array<int, 3>& signs() const { return signs_; }

    bool contains(const ChartPoint& p) const { return domain_.contains(p); }
    /// Throws DomainError when p is outside the open domain.
    void require(const ChartPoint& p) const;

    template <class S>
    EmbeddingJet<S> jet(const S& u, const S& v) const;

    Vec3 position(const ChartPoint& p) const;
    Vec3 normal(const ChartPoint& p) const;

private:
    ChartKind kind_ = ChartKind::MongeGraph;
    Domain domain_;
    int orientation_ = 1;
    int base_sign_ = 1;
    double p0_ = 0.0, p1_ = 0.0, p2_ = 0.0;
    std::array<int, 3> signs_{1, 1, 1};
    // h, h_x, h_y, h_xx, h_xy, h_yy
    std::array<Poly2, 6> h_;
};

struct FundamentalForms {
    double E = 1.0, F = 0.0, G = 1.0;
    double e = 0.0, f = 0.0, g = 0.0;
    /// Sign of N against alpha_u x alpha_v; fixes the rotation J used for N^T.
    int normal_sign = 1;

    double det_first() const { return E * G - F * F; }
    double det_second() const { return e * g - f * f; }
};

template <class S>
struct FormsT {
    S E, F, G, e, f, g;
};

enum class Region { elliptic, parabolic, hyperbolic };
const char* to_string(Region r);

struct CurvatureData {
    double K = 0.0, H = 0.0;
    double k1 = 0.0, k2 = 0.0;
    Region region = Region::parabolic;
    bool umbilic = false;
};

template <class S>
FormsT<S> forms_from_jet(const EmbeddingJet<S>& j, int normal_sign);

template <class S>
FormsT<S> forms_at(const SurfaceChart& chart, const S& u, const S& v) {
    return forms_from_jet(chart.template jet<S>(u, v), chart.normal_sign());
}

template <class S>
S gaussian_curvature(const FormsT<S>& w) {
    return (w.e * w.g - w.f * w.f) / (w.E * w.G - w.F * w.F);
}

template <class S>
S mean_curvature(const FormsT<S>& w) {
    return (w.e * w.G - S(2.0) * w.f * w.F + w.g * w.E) / (S(2.0) * (w.E * w.G - w.F * w.F));
}

FundamentalForms fundamental_forms(const SurfaceChart& chart, const ChartPoint& p);
CurvatureData curvature_data(const FundamentalForms& ff, const ToleranceConfig& tol = {});
CurvatureData curvature_at(const SurfaceChart& chart, const ChartPoint& p, const ToleranceConfig& tol = {});

/// Exact chart gradient (dK/du, dK/dv).
Vec2 gaussian_gradient(const SurfaceChart& chart, const ChartPoint& p);

/// Flip the normal, if needed, so that H > 0 at an elliptic reference point.
SurfaceChart orient_positive(const SurfaceChart& chart, const ChartPoint& reference,
                             const ToleranceConfig& tol = {});

/// The surface written as a graph z = h(x, y) over its tangent plane at p,
/// in the orthonormal frame (e1, e2, normal) with e1 x e2 = normal.
struct TangentGraph {
    Poly2 h;
    Vec3 origin, e1, e2, normal;
};

/// Series reversion of the chart around p. Orders up to 3 work on every chart
/// kind; order 4 is exact polynomial algebra and needs a Monge graph.
TangentGraph tangent_graph(const SurfaceChart& chart, const ChartPoint& p, int order);

/// Taylor tables of the six form coefficients at the origin of a Monge chart.
struct FormsExpansion {
    Poly2 E, F, G, e, f, g;
};

/// Closed-form expansions of the forms of a parabolic Monge jet, as printed
/// in the literature (through total degree 3). Validation target only.
FormsExpansion monge_forms_expansion(const MongeJet4& jet);

/// Exact Taylor expansion (to `order`) of the forms of the graph z = h(x, y)
/// at the origin, with the upward normal. Used as the numeric reference.
FormsExpansion monge_forms_series(const Poly2& h, int order);

}  // namespace gmc
