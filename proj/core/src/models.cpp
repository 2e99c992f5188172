#include "gmc/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/numeric/odeint.hpp>

namespace gmc {

namespace {

constexpr double pi = std::numbers::pi;

// Composite 20-point Gauss-Legendre on [lo, hi].
template <class F>
double gauss_composite(const F& f, double lo, double hi, int panels) {
    using G = boost::math::quadrature::gauss<double, 20>;
    double sum = 0.0;
    const double w = (hi - lo) / panels;
    for (int i = 0; i < panels; ++i) sum += G::integrate(f, lo + i * w, lo + (i + 1) * w);
    return sum;
}

double wrap_to(double x, double period, double center) {
    return x - period * std::round((x - center) / period);
}

}  // namespace

const char* to_string(QuadratureScheme s) {
    return s == QuadratureScheme::tanh_sinh ? "tanh_sinh" : "substitution_gauss";
}

double singular_integral(const EndpointIntegrand& f, double a, double b, int power, const QuadratureConfig& cfg) {
    if (!(b > a)) {
        if (a == b) return 0.0;
        throw DomainError("singular_integral: empty interval");
    }
    if (!(cfg.endpoint_fraction > 0.0 && cfg.endpoint_fraction <= 0.5) || cfg.gauss_panels < 1 || power < 1)
        throw ConfigError("singular_integral: bad quadrature configuration");
    const double L = b - a;
    const double w = cfg.endpoint_fraction * L;
    // Pieces in the distance variable t: left x = a + t, right x = b - t.
    auto left = [&](double t) { return f(a + t, t, L - t); };
    auto right = [&](double t) { return f(b - t, L - t, t); };
    auto middle = [&](double t) { return f(a + t, t, L - t); };

    double total = 0.0;
    if (cfg.scheme == QuadratureScheme::tanh_sinh) {
        boost::math::quadrature::tanh_sinh<double> ts(static_cast<std::size_t>(cfg.max_refinements));
        double err = 0.0;
        total += ts.integrate(left, 0.0, w, cfg.tolerance, &err);
        total += ts.integrate(right, 0.0, w, cfg.tolerance, &err);
        if (L - 2.0 * w > 0.0) total += ts.integrate(middle, w, L - w, cfg.tolerance, &err);
    } else {
        const double m = power;
        const double tmax = std::pow(w, 1.0 / m);
        auto sub = [&](const auto& g) {
            return [&g, m](double s) { return s == 0.0 ? 0.0 : g(std::pow(s, m)) * m * std::pow(s, m - 1.0); };
        };
        total += gauss_composite(sub(left), 0.0, tmax, cfg.gauss_panels);
        total += gauss_composite(sub(right), 0.0, tmax, cfg.gauss_panels);
        if (L - 2.0 * w > 0.0) total += gauss_composite(middle, w, L - w, cfg.gauss_panels);
    }
    if (!std::isfinite(total)) throw ConvergenceError("singular_integral: non-finite result");
    return total;
}

std::vector<Convergent> convergents(double x, int count) {
    std::vector<Convergent> out;
    if (!std::isfinite(x)) return out;
    long long p0 = 1, q0 = 0, p1 = static_cast<long long>(std::floor(x)), q1 = 1;
    out.push_back({p1, q1});
    double r = x - std::floor(x);
    while (static_cast<int>(out.size()) < count) {
        if (r < 1e-12) break;
        const double inv = 1.0 / r;
        const auto a = static_cast<long long>(std::floor(inv));
        r = inv - static_cast<double>(a);
        const long long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > 1000000000000LL) break;
        out.push_back({p2, q2});
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    return out;
}

RationalApprox nearest_rational(double x, int max_den) {
    RationalApprox best;
    best.distance = std::numeric_limits<double>::infinity();
    for (int q = 1; q <= max_den; ++q) {
        const auto p = static_cast<long long>(std::llround(x * q));
        const double d = std::abs(x - static_cast<double>(p) / q);
        if (d < best.distance) best = {p, q, d};
    }
    return best;
}

// ---------------------------------------------------------------- torus

double torus_rho(double ratio, const QuadratureConfig& cfg) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("torus_rho: ratio must lie in (0, 1)");
    // cos s = sin(distance to the nearer end of [-pi/2, pi/2]).
    auto f = [ratio](double, double from_a, double to_b) {
        const double cs = std::sin(std::min(from_a, to_b));
        return 1.0 / (std::pow(cs, 0.25) * std::pow(1.0 + ratio * cs, 0.75));
    };
    return 2.0 * std::pow(ratio, 0.75) * singular_integral(f, -0.5 * pi, 0.5 * pi, 4, cfg);
}

double torus_theta_advance(double r, double R, const TorusOdeConfig& cfg) {
    if (!(r > 0.0 && r < R)) throw ConfigError("torus: requires 0 < r < R");
    if (!(cfg.delta0 > 0.0 && cfg.delta0 < 0.5) || cfg.levels < 2) throw ConfigError("torus: bad ODE configuration");
    namespace ode = boost::numeric::odeint;
    using State = std::array<double, 1>;
    const double r3 = r * r * r;
    auto rhs = [&](const State&, State& d, double s) {
        const double cs = std::cos(s);
        const double w = R + r * cs;
        d[0] = std::pow(r3 / (cs * w * w * w), 0.25);
    };
    std::vector<double> T;
    for (int k = 0; k < cfg.levels; ++k) {
        const double delta = cfg.delta0 / std::pow(2.0, k);
        State y{cfg.theta0};
        auto stepper = ode::make_controlled(cfg.rel_tol, cfg.rel_tol, ode::runge_kutta_dopri5<State>());
        ode::integrate_adaptive(stepper, rhs, y, -0.5 * pi + delta, 0.5 * pi - delta, 1e-3);
        T.push_back(y[0] - cfg.theta0);
    }
    // The two cut-off tails expand in delta^(3/4 + j).
    std::vector<std::vector<double>> tab(T.size());
    for (std::size_t k = 0; k < T.size(); ++k) {
        tab[k].push_back(T[k]);
        for (std::size_t j = 1; j <= k; ++j) {
            const double f = std::pow(2.0, 0.75 + static_cast<double>(j - 1));
            tab[k].push_back(tab[k][j - 1] + (tab[k][j - 1] - tab[k - 1][j - 1]) / (f - 1.0));
        }
    }
    const std::size_t n = T.size() - 1;
    const double best = tab[n][n];
    if (!(std::abs(best - tab[n - 1][n - 1]) <= 1e-9 * std::abs(best)))
        throw ConvergenceError("torus_rho_numeric: extrapolation did not converge");
    return best;
}

double torus_rho_numeric(double r, double R, const TorusOdeConfig& cfg) {
    return 2.0 * torus_theta_advance(r, R, cfg) / (2.0 * pi);
}

TorusRho torus_rotation(double ratio, const QuadratureConfig& qcfg, const TorusOdeConfig& ocfg) {
    TorusRho t;
    t.ratio = ratio;
    t.rho_quadrature = torus_rho(ratio, qcfg);
    t.rho_numeric = torus_rho_numeric(ratio, 1.0, ocfg);
    t.normalization = t.rho_quadrature / t.rho_numeric;
    t.continued_fraction = convergents(t.rho_numeric, 10);
    t.nearest = nearest_rational(t.rho_numeric, 64);
    return t;
}

TorusTraceRho torus_rho_trace(double r, double R, Branch branch, const TraceConfig& cfg_in,
                              const ToleranceConfig& tol) {
    if (!(r > 0.0 && r < R)) throw ConfigError("torus: requires 0 < r < R");
    const SurfaceChart chart = orient_positive(SurfaceChart::torus(r, R), ChartPoint{0.0, 0.0}, tol);
    TraceConfig cfg = cfg_in;
    cfg.detect_closure = false;
    cfg.integrand = false;
    cfg.max_arclength = std::max(cfg.max_arclength, 8.0 * pi * (R + r));
    ExtendedOptions ext;
    ext.reflect_tangential = true;
    const SectionStop equator{[](const ChartPoint& q) { return q.u; }, true, 1e-6 * r};

    TorusTraceRho out;
    ChartPoint p{0.0, 0.0};
    Branch br = branch;
    std::optional<Vec2> dir = Vec2(1.0, 0.0);
    // Leg 1 runs out to the outer circle s = pi/2 and back to s = 0, leg 2
    // does the same on the inner side.
    for (int leg = 0; leg < 2; ++leg) {
        const Polyline pl = trace_extended(chart, p, br, cfg, ext, tol, dir, &equator);
        if (pl.end != TraceEnd::section) throw TraceError("torus_rho_trace: trace did not return to s = 0");
        for (const auto& ev : pl.events)
            if (ev.kind != EventKind::section_crossing) ++out.reflections;
        out.length += pl.length();
        const Sample& last = pl.samples.back();
        p = last.p;
        br = last.branch;
        dir = last.t;
    }
    out.theta_advance = std::abs(p.v);
    out.rho = out.theta_advance / (2.0 * pi);
    return out;
}

// ---------------------------------------------------------------- ellipsoid

std::array<Vec3, 4> ellipsoid_umbilics(double a, double b, double c) {
    if (!(a > b && b > c && c > 0.0)) throw ConfigError("ellipsoid: requires a > b > c > 0");
    const double x0 = a * std::sqrt((a * a - b * b) / (a * a - c * c));
    const double z0 = c * std::sqrt((c * c - b * b) / (c * c - a * a));
    return {Vec3(x0, 0.0, z0), Vec3(-x0, 0.0, z0), Vec3(-x0, 0.0, -z0), Vec3(x0, 0.0, -z0)};
}

std::array<ChartPoint, 4> ellipsoid_umbilics_angular(double a, double b, double c) {
    const auto U = ellipsoid_umbilics(a, b, c);
    std::array<ChartPoint, 4> out;
    for (int i = 0; i < 4; ++i) out[i] = ChartPoint{0.5 * pi, std::atan2(U[i](2) / c, U[i](0) / a)};
    return out;
}

double ellipsoid_h(double a, double b, double c, double x) { return (x + a * a) * (x + b * b) * (x + c * c); }

namespace {

// |t|^(1/4) / sqrt|h(t)| between two roots of h; `other` is the third root.
EndpointIntegrand arc_integrand(double other) {
    return [other](double x, double from_a, double to_b) {
        return std::pow(std::abs(x), 0.25) / std::sqrt(from_a * to_b * std::abs(x - other));
    };
}

}  // namespace

EllipsoidArcs ellipsoid_S1_S2(double a, double b, double c, const QuadratureConfig& cfg) {
    if (!(a > b && b > c && c > 0.0)) throw ConfigError("ellipsoid: requires a > b > c > 0");
    const double a2 = a * a, b2 = b * b, c2 = c * c;
    EllipsoidArcs r;
    r.S1 = singular_integral(arc_integrand(-a2), -b2, -c2, 2, cfg);
    r.S2 = singular_integral(arc_integrand(-c2), -a2, -b2, 2, cfg);
    r.rho = r.S2 / r.S1;
    return r;
}

EllipsoidData ellipsoid_data(double a, double b, double c, const QuadratureConfig& cfg) {
    EllipsoidData d;
    d.a = a;
    d.b = b;
    d.c = c;
    d.umbilics = ellipsoid_umbilics(a, b, c);
    const EllipsoidArcs main = ellipsoid_S1_S2(a, b, c, cfg);
    QuadratureConfig other = cfg;
    other.scheme = cfg.scheme == QuadratureScheme::tanh_sinh ? QuadratureScheme::substitution_gauss
                                                              : QuadratureScheme::tanh_sinh;
    const EllipsoidArcs check = ellipsoid_S1_S2(a, b, c, other);
    d.S1 = main.S1;
    d.S2 = main.S2;
    d.rho = main.rho;
    d.S1_check = check.S1;
    d.S2_check = check.S2;
    d.rho_return = d.S2 / (d.S1 + d.S2);
    d.continued_fraction = convergents(d.rho, 10);
    d.nearest = nearest_rational(d.rho, 64);
    return d;
}

EllipsoidSigma::EllipsoidSigma(double a, double b, double c, const QuadratureConfig& cfg)
    : a_(a), b_(b), c_(c), cfg_(cfg) {
    const EllipsoidArcs arcs = ellipsoid_S1_S2(a, b, c, cfg);
    S1_ = arcs.S1;
    S2_ = arcs.S2;
}

double EllipsoidSigma::integrate(double lo, double hi) const {
    // [lo, hi] sits inside one of the two coordinate ranges and starts at a
    // root of h; hi may or may not be the next root.
    const double a2 = a_ * a_, b2 = b_ * b_, c2 = c_ * c_;
    const bool u_range = lo >= -b2 - 1e-15 * b2;
    const double root_hi = u_range ? -c2 : -b2;
    const double other = u_range ? -a2 : -c2;
    const double gap = root_hi - hi;  // >= 0
    auto f = [=](double x, double from_a, double to_b) {
        const double h = from_a * (to_b + gap) * std::abs(x - other);
        return std::pow(std::abs(x), 0.25) / std::sqrt(h);
    };
    return singular_integral(f, lo, hi, 2, cfg_);
}

double EllipsoidSigma::sigma1(double u) const {
    const double b2 = b_ * b_, c2 = c_ * c_;
    if (!(u >= -b2 && u <= -c2)) throw DomainError("sigma1: u outside [-b^2, -c^2]");
    if (u == -c2) return S1_;
    return integrate(-b2, u);
}

double EllipsoidSigma::sigma2(double v) const {
    const double a2 = a_ * a_, b2 = b_ * b_;
    if (!(v >= -a2 && v <= -b2)) throw DomainError("sigma2: v outside [-a^2, -b^2]");
    if (v == -b2) return S2_;
    return integrate(-a2, v);
}

double EllipsoidSigma::ellipse_position(double phi) const {
    const double a2 = a_ * a_, b2 = b_ * b_, c2 = c_ * c_;
    phi = std::fmod(phi, 2.0 * pi);
    if (phi < 0.0) phi += 2.0 * pi;
    const double s = std::sin(phi), co = std::cos(phi);
    // Second confocal coordinate of (a cos phi, 0, c sin phi).
    const double w = -(a2 * s * s + c2 * co * co);
    // Sigma distance from the umbilic end (w = -b^2) of the arc containing w.
    double D;
    if (w >= -b2) D = w >= -c2 ? S1_ : integrate(-b2, std::min(w, -c2));
    else D = S2_ - sigma2(std::max(w, -a2));
    const double phi1 = std::atan2(std::sqrt((b2 - c2) / (a2 - c2)), std::sqrt((a2 - b2) / (a2 - c2)));
    if (phi >= phi1 && phi < pi - phi1) return phi < 0.5 * pi ? D : 2.0 * S2_ - D;
    if (phi >= pi - phi1 && phi < pi + phi1) return 2.0 * S2_ + (phi < pi ? D : 2.0 * S1_ - D);
    if (phi >= pi + phi1 && phi < 2.0 * pi - phi1) return 2.0 * (S1_ + S2_) + (phi < 1.5 * pi ? D : 2.0 * S2_ - D);
    const double q = phi > pi ? phi - 2.0 * pi : phi;
    return 4.0 * S2_ + 2.0 * S1_ + (q < 0.0 ? D : 2.0 * S1_ - D);
}

SigmaLineFit sigma_line_fit(const EllipsoidSigma& sig, const Polyline& line) {
    SigmaLineFit fit;
    if (line.samples.size() < 2) return fit;
    std::vector<double> s1, s2;
    for (const auto& smp : line.samples) {
        s1.push_back(sig.sigma1(smp.p.u));
        s2.push_back(sig.sigma2(smp.p.v));
    }
    const double d1 = s1.back() - s1.front(), d2 = s2.back() - s2.front();
    fit.slope_sign = d1 * d2 >= 0.0 ? 1.0 : -1.0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < s1.size(); ++i) {
        const double r = s2[i] - fit.slope_sign * s1[i];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    fit.max_deviation = 0.5 * (hi - lo) / std::numbers::sqrt2;
    fit.samples = s1.size();
    return fit;
}

ReturnMapReport ellipsoid_return_map(double a, double b, double c, Branch branch, const std::vector<double>& seeds,
                                     int returns, const TraceConfig& cfg_in, const ToleranceConfig& tol,
                                     const QuadratureConfig& qcfg) {
    if (returns < 1 || seeds.empty()) throw ConfigError("ellipsoid_return_map: need seeds and returns >= 1");
    const SurfaceChart chart = orient_positive(SurfaceChart::ellipsoid_angular(a, b, c), ChartPoint{1.0, 0.3}, tol);
    const EllipsoidSigma sig(a, b, c, qcfg);
    const double P = sig.perimeter();
    TraceConfig cfg = cfg_in;
    cfg.detect_closure = false;
    cfg.integrand = false;
    const SectionStop ellipse{[](const ChartPoint& q) { return q.u - 0.5 * pi; }, true, 1e-9 * c};

    ReturnMapReport rep;
    double reference = std::numeric_limits<double>::quiet_NaN();
    for (double phi : seeds) {
        ChartPoint p{0.5 * pi, phi};
        std::optional<Vec2> dir = Vec2(1.0, 0.0);  // into y < 0 first
        double pos = sig.ellipse_position(phi), total = 0.0;
        for (int k = 0; k < 2 * returns; ++k) {
            const Polyline pl = trace_gmc_line(chart, p, branch, cfg, tol, dir, &ellipse);
            if (pl.end != TraceEnd::section)
                throw TraceError(std::string("ellipsoid_return_map: trace ended (") + to_string(pl.end) +
                                 ") before returning to the ellipse");
            p = pl.samples.back().p;
            p.u = 0.5 * pi;
            dir = pl.samples.back().t;
            if (k % 2 == 1) {
                const double next = sig.ellipse_position(p.v);
                double d = next - pos;
                d -= P * std::floor(d / P);
                if (std::isnan(reference)) reference = d;
                total += wrap_to(d, P, reference);
                pos = next;
            }
        }
        rep.seeds.push_back(phi);
        rep.displacement.push_back(total / returns / P);
    }
    const auto [lo, hi] = std::minmax_element(rep.displacement.begin(), rep.displacement.end());
    double mean = 0.0;
    for (double d : rep.displacement) mean += d;
    mean /= static_cast<double>(rep.displacement.size());
    rep.rotation_number = mean - std::floor(mean);
    rep.spread = *hi - *lo;
    return rep;
}

}  // namespace gmc
