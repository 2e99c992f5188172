#pragma once

#include <array>
#include <cmath>

#include "gmc/common.hpp"
#include "gmc/surface.hpp"

namespace gmc {

/// Lq dv^2 + 2 Mq du dv + Nq du^2 = 0.
struct QuadraticCoeffs {
    double Lq = 0.0, Mq = 0.0, Nq = 0.0;
    double eval(double du, double dv) const { return Lq * dv * dv + 2.0 * Mq * du * dv + Nq * du * du; }
};

/// A40 du^4 + A31 du^3 dv + A22 du^2 dv^2 + A13 du dv^3 + A04 dv^4 = 0.
struct QuarticCoeffs {
    double A40 = 0.0, A31 = 0.0, A22 = 0.0, A13 = 0.0, A04 = 0.0;
    double eval(double du, double dv) const;
    /// Largest single term |A_ij du^i dv^j|, the natural residual scale.
    double max_term(double du, double dv) const;
};

enum class Branch { minimal, maximal };
const char* to_string(Branch b);
inline Branch other(Branch b) { return b == Branch::minimal ? Branch::maximal : Branch::minimal; }
inline double branch_sign(Branch b) { return b == Branch::maximal ? 1.0 : -1.0; }

struct Direction {
    Vec2 ratio{1.0, 0.0};  ///< (du, dv), unit length in the first form
    Branch branch = Branch::minimal;
    double tau_g = 0.0;
    double theta = 0.0;  ///< angle to the minimal principal line, in the first form
};

struct DirectionPair {
    Direction minimal;
    Direction maximal;
};

QuadraticCoeffs gmc_quadratic(const FundamentalForms& ff, const CurvatureData& cd);
QuarticCoeffs quartic_coeffs(const FundamentalForms& ff);
DirectionPair gmc_directions(const FundamentalForms& ff, const CurvatureData& cd, const ToleranceConfig& tol = {});

/// Closed form: sign(branch) K^{1/4} sqrt(2H - 2 sqrt K).
double geodesic_torsion(const CurvatureData& cd, Branch branch);
/// tau_g along a tangent direction: II(t, Jt) / I(t, t).
double geodesic_torsion_of(const FundamentalForms& ff, const Vec2& t);
double normal_curvature(const FundamentalForms& ff, const Vec2& t);

/// arctan((k1/k2)^{1/4}).
double gmc_angle(const CurvatureData& cd);
/// arctan(sqrt((sqrt K - k1)/(k2 - sqrt K))); must agree with gmc_angle.
double gmc_angle_from_sqrtK(const CurvatureData& cd);

/// Unit (first form) principal directions; [0] belongs to k1, [1] to k2.
std::array<Vec2, 2> principal_directions(const FundamentalForms& ff, const CurvatureData& cd);

/// Rotation by +90 degrees in the tangent plane (chart components of N x t).
Vec2 conormal(const FundamentalForms& ff, const Vec2& t);
double first_form_dot(const FundamentalForms& ff, const Vec2& a, const Vec2& b);
Vec2 normalize_first(const FundamentalForms& ff, const Vec2& t);
/// Unsigned angle in [0, pi/2] between the lines spanned by a and b.
double line_angle(const FundamentalForms& ff, const Vec2& a, const Vec2& b);

inline double value_of(double x) { return x; }
inline double value_of(const AD& x) { return x.value(); }

/// Both roots of the quadratic as (du, dv) pairs, not normalized. Stable
/// extraction: q = -(M + sgn(M) sqrt(D)), roots (L, q) and (q, N).
/// Generic in the scalar so the direction field can be differentiated.
template <class S>
std::array<Eigen::Matrix<S, 2, 1>, 2> gmc_root_pair(const FormsT<S>& w) {
    using std::sqrt;
    using V = Eigen::Matrix<S, 2, 1>;
    const S K = gaussian_curvature(w);
    const S sK = value_of(K) > 0.0 ? S(sqrt(K)) : S(0.0);
    const S L = w.g - sK * w.G;
    const S M = w.f - sK * w.F;
    const S N = w.e - sK * w.E;
    const S D = M * M - L * N;
    const S sD = value_of(D) > 0.0 ? S(sqrt(D)) : S(0.0);
    const S q = value_of(M) >= 0.0 ? S(-(M + sD)) : S(-(M - sD));
    V r1, r2;
    r1 << L, q;
    r2 << q, N;
    const double n1 = std::hypot(value_of(L), value_of(q));
    const double n2 = std::hypot(value_of(q), value_of(N));
    // A vanishing candidate means a double root; the other one carries it.
    if (n1 < 1e-14 * n2) r1 = r2;
    if (n2 < 1e-14 * n1) r2 = r1;
    return {r1, r2};
}

/// Unit-length (first form) rescaling, generic scalar.
template <class S>
Eigen::Matrix<S, 2, 1> normalize_first(const FormsT<S>& w, const Eigen::Matrix<S, 2, 1>& t) {
    using std::sqrt;
    const S n2 = w.E * t(0) * t(0) + S(2.0) * w.F * t(0) * t(1) + w.G * t(1) * t(1);
    const S inv = S(1.0 / sqrt(n2));
    return Eigen::Matrix<S, 2, 1>(S(t(0) * inv), S(t(1) * inv));
}

}  // namespace gmc
