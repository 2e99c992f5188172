#include "gmc/bde.hpp"

#include <algorithm>
#include <cmath>

namespace gmc {

namespace {

double second_form(const FundamentalForms& ff, const Vec2& a, const Vec2& b) {
    return ff.e * a(0) * b(0) + ff.f * (a(0) * b(1) + a(1) * b(0)) + ff.g * a(1) * b(1);
}

Vec2 canonical_sign(Vec2 t) {
    if (t(0) < 0.0 || (t(0) == 0.0 && t(1) < 0.0)) t = -t;
    return t;
}

}  // namespace

const char* to_string(Branch b) { return b == Branch::minimal ? "minimal" : "maximal"; }

double QuarticCoeffs::eval(double du, double dv) const {
    const double u2 = du * du, v2 = dv * dv;
    return A40 * u2 * u2 + A31 * u2 * du * dv + A22 * u2 * v2 + A13 * du * v2 * dv + A04 * v2 * v2;
}

double QuarticCoeffs::max_term(double du, double dv) const {
    const double u2 = du * du, v2 = dv * dv;
    return std::max({std::abs(A40 * u2 * u2), std::abs(A31 * u2 * du * dv), std::abs(A22 * u2 * v2),
                     std::abs(A13 * du * v2 * dv), std::abs(A04 * v2 * v2)});
}

double first_form_dot(const FundamentalForms& ff, const Vec2& a, const Vec2& b) {
    return ff.E * a(0) * b(0) + ff.F * (a(0) * b(1) + a(1) * b(0)) + ff.G * a(1) * b(1);
}

Vec2 normalize_first(const FundamentalForms& ff, const Vec2& t) {
    const double n = std::sqrt(first_form_dot(ff, t, t));
    if (!(n > 0.0)) throw ConsistencyError("normalize_first: zero direction");
    return t / n;
}

double line_angle(const FundamentalForms& ff, const Vec2& a, const Vec2& b) {
    const double c = std::abs(first_form_dot(ff, a, b)) /
                     std::sqrt(first_form_dot(ff, a, a) * first_form_dot(ff, b, b));
    return std::acos(std::min(1.0, c));
}

Vec2 conormal(const FundamentalForms& ff, const Vec2& t) {
    const double s = ff.normal_sign / std::sqrt(ff.det_first());
    return s * Vec2(-(ff.F * t(0) + ff.G * t(1)), ff.E * t(0) + ff.F * t(1));
}

double geodesic_torsion_of(const FundamentalForms& ff, const Vec2& t) {
    return second_form(ff, t, conormal(ff, t)) / first_form_dot(ff, t, t);
}

double normal_curvature(const FundamentalForms& ff, const Vec2& t) {
    const double n = first_form_dot(ff, t, t);
    if (!(n > 0.0)) throw ConsistencyError("normal_curvature: zero direction");
    return second_form(ff, t, t) / n;
}

QuadraticCoeffs gmc_quadratic(const FundamentalForms& ff, const CurvatureData& cd) {
    if (cd.region == Region::hyperbolic) throw HyperbolicRegionError("gmc_quadratic: K < 0");
    const double sK = cd.K > 0.0 ? std::sqrt(cd.K) : 0.0;
    return QuadraticCoeffs{ff.g - sK * ff.G, ff.f - sK * ff.F, ff.e - sK * ff.E};
}

QuarticCoeffs quartic_coeffs(const FundamentalForms& ff) {
    const double d1 = ff.det_first(), d2 = ff.det_second();
    const double E = ff.E, F = ff.F, G = ff.G, e = ff.e, f = ff.f, g = ff.g;
    QuarticCoeffs q;
    q.A40 = e * e * d1 - E * E * d2;
    q.A31 = 4.0 * e * f * d1 - 4.0 * E * F * d2;
    q.A22 = 6.0 * f * f * E * G - 6.0 * e * g * F * F;
    q.A13 = 4.0 * f * g * d1 - 4.0 * F * G * d2;
    q.A04 = g * g * d1 - G * G * d2;
    return q;
}

std::array<Vec2, 2> principal_directions(const FundamentalForms& ff, const CurvatureData& cd) {
    std::array<Vec2, 2> out;
    const double ks[2] = {cd.k1, cd.k2};
    for (int i = 0; i < 2; ++i) {
        const double k = ks[i];
        const double a = ff.e - k * ff.E, b = ff.f - k * ff.F, c = ff.g - k * ff.G;
        const Vec2 t1(-b, a), t2(c, -b);
        Vec2 t = t1.norm() >= t2.norm() ? t1 : t2;
        if (t.norm() == 0.0) t = i == 0 ? Vec2(1.0, 0.0) : Vec2(0.0, 1.0);
        out[static_cast<std::size_t>(i)] = canonical_sign(normalize_first(ff, t));
    }
    if (cd.umbilic) {
        // Any orthonormal pair is principal; keep it orthogonal in the first form.
        const Vec2 t0 = normalize_first(ff, Vec2(1.0, 0.0));
        out = {t0, canonical_sign(normalize_first(ff, conormal(ff, t0)))};
    }
    return out;
}

DirectionPair gmc_directions(const FundamentalForms& ff, const CurvatureData& cd, const ToleranceConfig& tol) {
    if (cd.region == Region::hyperbolic) throw HyperbolicRegionError("gmc_directions: K < 0");
    if (cd.region == Region::parabolic)
        throw ParabolicPointError("gmc_directions: parabolic point, the two directions coincide");
    if (cd.umbilic) throw UmbilicPointError("gmc_directions: umbilic point, directions undefined");
    const QuadraticCoeffs q = gmc_quadratic(ff, cd);
    const double scale = std::sqrt(cd.K) * std::max(ff.E, ff.G);
    if (std::max({std::abs(q.Lq), std::abs(q.Mq), std::abs(q.Nq)}) < tol.umbilic * scale)
        throw UmbilicPointError("gmc_directions: quadratic vanishes to tolerance");

    const FormsT<double> w{ff.E, ff.F, ff.G, ff.e, ff.f, ff.g};
    const auto roots = gmc_root_pair<double>(w);
    const Vec2 e1 = principal_directions(ff, cd)[0];
    Direction d[2];
    for (int i = 0; i < 2; ++i) {
        const Vec2 t = canonical_sign(normalize_first(ff, roots[static_cast<std::size_t>(i)]));
        d[i].ratio = t;
        d[i].tau_g = geodesic_torsion_of(ff, t);
        d[i].branch = d[i].tau_g > 0.0 ? Branch::maximal : Branch::minimal;
        d[i].theta = line_angle(ff, t, e1);
    }
    if (d[0].branch == d[1].branch)
        throw ConsistencyError("gmc_directions: both roots carry the same torsion sign");
    return d[0].branch == Branch::minimal ? DirectionPair{d[0], d[1]} : DirectionPair{d[1], d[0]};
}

double geodesic_torsion(const CurvatureData& cd, Branch branch) {
    if (!(cd.K > 0.0)) throw DomainError("geodesic_torsion: requires K > 0");
    const double sK = std::sqrt(cd.K);
    double gap = 2.0 * cd.H - 2.0 * sK;
    if (gap < 0.0) {
        if (gap < -1e-12 * std::max(1.0, std::abs(cd.H)))
            throw OrientationError("geodesic_torsion: 2H - 2 sqrt K < 0; normalize the orientation");
        gap = 0.0;
    }
    return branch_sign(branch) * std::sqrt(sK) * std::sqrt(gap);
}

double gmc_angle(const CurvatureData& cd) {
    if (cd.umbilic) throw UmbilicPointError("gmc_angle: umbilic point");
    if (!(cd.k1 >= 0.0 && cd.k2 > 0.0)) throw OrientationError("gmc_angle: requires 0 <= k1 <= k2");
    return std::atan(std::pow(cd.k1 / cd.k2, 0.25));
}

double gmc_angle_from_sqrtK(const CurvatureData& cd) {
    if (cd.umbilic) throw UmbilicPointError("gmc_angle: umbilic point");
    if (!(cd.k1 >= 0.0 && cd.k2 > 0.0)) throw OrientationError("gmc_angle: requires 0 <= k1 <= k2");
    const double sK = std::sqrt(cd.k1 * cd.k2);
    return std::atan(std::sqrt((sK - cd.k1) / (cd.k2 - sK)));
}

}  // namespace gmc
