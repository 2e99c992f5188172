#include "gmc/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>
#include <boost/numeric/odeint.hpp>

namespace gmc {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, 3>;   // u, v, carried integral
using GState = std::array<double, 4>;  // u, v, u', v'

enum class FailReason { outside, no_field };

struct StageFail {
    FailReason reason;
};

FundamentalForms to_ff(const FormsT<double>& w, int ns) { return FundamentalForms{w.E, w.F, w.G, w.e, w.f, w.g, ns}; }

FormsT<double> values(const FormsT<AD>& w) {
    return {w.E.value(), w.F.value(), w.G.value(), w.e.value(), w.f.value(), w.g.value()};
}

Vec2 canonical(Vec2 t) {
    if (t(0) < 0.0 || (t(0) == 0.0 && t(1) < 0.0)) t = -t;
    return t;
}

struct Pick {
    int root = 0;
    double sign = 1.0;
    Vec2 t;
};

// Root of the GMC quadratic whose torsion sign matches the branch, oriented
// along `ref` in the first form (or canonically when ref is empty).
std::optional<Pick> pick_root(const FormsT<double>& w, int ns, Branch br, const std::optional<Vec2>& ref) {
    const double K = gaussian_curvature(w);
    if (!(K > 0.0) || !std::isfinite(K)) return std::nullopt;
    const FundamentalForms ff = to_ff(w, ns);
    const auto roots = gmc_root_pair<double>(w);
    int found = 0;
    Pick p;
    for (int i = 0; i < 2; ++i) {
        const Vec2& r = roots[static_cast<std::size_t>(i)];
        const double n2 = first_form_dot(ff, r, r);
        if (!(n2 > 0.0)) continue;
        const Vec2 t = r / std::sqrt(n2);
        const double tau = geodesic_torsion_of(ff, t);
        if (tau != 0.0 && (tau > 0.0) == (br == Branch::maximal)) {
            ++found;
            p.root = i;
            p.t = t;
        }
    }
    if (found != 1) return std::nullopt;
    if (ref) {
        p.sign = first_form_dot(ff, p.t, *ref) >= 0.0 ? 1.0 : -1.0;
    } else {
        p.sign = canonical(p.t) == p.t ? 1.0 : -1.0;
    }
    p.t *= p.sign;
    return p;
}

struct Full {
    Vec2 t;
    FormsT<double> w;
    FrameQuantities fq;
    double integrand = 0.0;
    double K = 0.0, H = 0.0;
};

// Tangent, Darboux frame and transition integrand at x. Differentiates the
// unit direction field by forward-mode AD to get the curve's acceleration.
std::optional<Full> full_at(const SurfaceChart& chart, const Vec2& x, Branch br, const std::optional<Vec2>& ref) {
    const int ns = chart.normal_sign();
    const auto wa = forms_at<AD>(chart, ad_var(x(0), 0), ad_var(x(1), 1));
    Full out;
    out.w = values(wa);
    const auto pk = pick_root(out.w, ns, br, ref);
    if (!pk) return std::nullopt;
    const auto ra = gmc_root_pair<AD>(wa)[static_cast<std::size_t>(pk->root)];
    const auto ta = normalize_first<AD>(wa, ra);
    out.t = pk->t;
    Eigen::Matrix2d Dt;
    Dt.row(0) = pk->sign * ta(0).derivatives().transpose();
    Dt.row(1) = pk->sign * ta(1).derivatives().transpose();
    const Vec2 tdot = Dt * out.t;

    const auto J = chart.jet<double>(x(0), x(1));
    const double t0 = out.t(0), t1 = out.t(1);
    const Vec3 acc = J.puu * t0 * t0 + 2.0 * J.puv * t0 * t1 + J.pvv * t1 * t1 + J.pu * tdot(0) + J.pv * tdot(1);
    FrameQuantities& fq = out.fq;
    fq.N = ns * J.pu.cross(J.pv).normalized();
    fq.T = J.pu * t0 + J.pv * t1;
    fq.NT = fq.N.cross(fq.T);
    fq.k_g = acc.dot(fq.NT);
    fq.k_n = acc.dot(fq.N);
    const FundamentalForms ff = to_ff(out.w, ns);
    fq.tau_g = geodesic_torsion_of(ff, out.t);

    const AD Ka = gaussian_curvature(wa);
    out.K = Ka.value();
    out.H = mean_curvature(out.w);
    const double sK = std::sqrt(out.K);
    const Vec2 c = conormal(ff, out.t);
    const double dsK = Ka.derivatives().dot(c) / (2.0 * sK);
    out.integrand = dsK / (2.0 * fq.tau_g) + fq.k_g / fq.tau_g * (out.H - sK);
    return out;
}

struct FieldSystem {
    const SurfaceChart* chart;
    Branch br;
    Vec2 ref;
    bool integrand;

    void operator()(const State& x, State& dx, double) const {
        const ChartPoint p{x[0], x[1]};
        if (!std::isfinite(x[0]) || !std::isfinite(x[1]) || !chart->contains(p)) throw StageFail{FailReason::outside};
        if (integrand) {
            const auto f = full_at(*chart, Vec2(x[0], x[1]), br, ref);
            if (!f) throw StageFail{FailReason::no_field};
            dx = {f->t(0), f->t(1), f->integrand};
        } else {
            const auto w = forms_at<double>(*chart, x[0], x[1]);
            const auto pk = pick_root(w, chart->normal_sign(), br, ref);
            if (!pk) throw StageFail{FailReason::no_field};
            dx = {pk->t(0), pk->t(1), 0.0};
        }
    }
};

Sample make_sample(const SurfaceChart& chart, const Vec2& x, Branch br, const std::optional<Vec2>& ref, double s,
                   double cumulative, const ToleranceConfig& tol) {
    const auto f = full_at(chart, x, br, ref);
    if (!f) throw TraceError("trace: direction field undefined at a sample point");
    Sample sm;
    sm.p = ChartPoint{x(0), x(1)};
    sm.s = s;
    sm.t = f->t;
    sm.T = f->fq.T;
    sm.NT = f->fq.NT;
    sm.N = f->fq.N;
    sm.cd = curvature_data(to_ff(f->w, chart.normal_sign()), tol);
    sm.tau_g = f->fq.tau_g;
    sm.k_g = f->fq.k_g;
    sm.k_n = f->fq.k_n;
    sm.integrand = f->integrand;
    sm.cumulative = cumulative;
    sm.branch = br;
    return sm;
}

double cos_first(const FormsT<double>& w, const Vec2& a, const Vec2& b) {
    const FundamentalForms ff = to_ff(w, 1);
    return first_form_dot(ff, a, b) / std::sqrt(first_form_dot(ff, a, a) * first_form_dot(ff, b, b));
}

double rel_gap(const CurvatureData& cd) {
    const double s = std::abs(cd.k1) + std::abs(cd.k2);
    return s > 0.0 ? (cd.k2 - cd.k1) / s : 0.0;
}

Polyline run_trace(const SurfaceChart& chart, const ChartPoint& seed, Branch branch, const TraceConfig& cfg,
                   const ToleranceConfig& tol, std::optional<Vec2> init, const SectionStop* section,
                   const ExtendedOptions* ext) {
    if (!(cfg.step_target > 0.0 && cfg.max_arclength > 0.0 && cfg.closure_tol > 0.0 && cfg.rel_tol > 0.0))
        throw ConfigError("TraceConfig: all parameters must be positive");
    chart.require(seed);
    const CurvatureData cd0 = curvature_at(chart, seed, tol);
    if (cd0.region == Region::hyperbolic) throw HyperbolicRegionError("trace: seed has K < 0");
    if (cd0.region == Region::parabolic) throw ParabolicPointError("trace: seed is parabolic");
    if (cd0.umbilic) throw UmbilicPointError("trace: seed is an umbilic");

    Polyline out;
    Branch br = branch;
    const Vec2 x0(seed.u, seed.v);
    {
        const auto pk = pick_root(forms_at<double>(chart, seed.u, seed.v), chart.normal_sign(), br, init);
        if (!pk) throw ConsistencyError("trace: no root of the requested branch at the seed");
        init = pk->t;
    }
    out.samples.push_back(make_sample(chart, x0, br, init, 0.0, 0.0, tol));
    Vec2 tcur = out.samples.back().t;
    const Vec3 pos0 = chart.position(seed);
    const Vec3 T0 = out.samples.back().T.normalized();

    State X{seed.u, seed.v, 0.0};
    double s = 0.0;
    double h = 0.25 * cfg.step_target;
    const double h_min = 1e-12;
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(cfg.rel_tol, cfg.rel_tol);
    odeint::runge_kutta_dopri5<State> plain;
    FieldSystem sys{&chart, br, tcur, cfg.integrand};
    double g_prev = section ? section->fn(seed) : 0.0;
    int switches = 0;
    bool leaving = false;
    int outside_fails = 0;

    // Fixed-length step from the current state; nullopt when a stage fails.
    auto step_exact = [&](double dt) -> std::optional<State> {
        State y;
        try {
            // Explicit derivative form: the FSAL cache must not leak between calls.
            State dxdt, dxdt_out;
            sys(X, dxdt, s);
            plain.do_step(sys, X, dxdt, s, y, dxdt_out, dt);
        } catch (const StageFail&) {
            return std::nullopt;
        }
        return y;
    };

    // End of the field ahead: stop, or switch foliation when extending.
    auto arrive = [&]() -> bool {
        if (!ext) {
            out.end = TraceEnd::parabolic;
            return false;
        }
        const Sample& last = out.samples.back();
        const FundamentalForms ff = to_ff(forms_at<double>(chart, last.p.u, last.p.v), chart.normal_sign());
        const Vec2 gK = gaussian_gradient(chart, last.p);
        const Vec2 along(-gK(1), gK(0));
        const bool tangential = along.norm() == 0.0 || line_angle(ff, tcur, along) < ext->tangential_angle;
        if (tangential && !ext->reflect_tangential) {
            out.end = TraceEnd::tangential_parabolic;
            return false;
        }
        if (++switches > ext->max_switches) {
            out.end = TraceEnd::max_switches;
            return false;
        }
        const Vec2 ref = tangential ? tcur : Vec2(-tcur);
        const auto pk = pick_root(forms_at<double>(chart, last.p.u, last.p.v), chart.normal_sign(), other(br), ref);
        if (!pk) {
            out.end = TraceEnd::parabolic;
            return false;
        }
        br = other(br);
        tcur = pk->t;
        out.events.push_back({tangential ? EventKind::tangential_reflection : EventKind::branch_switch,
                              out.samples.size() - 1, last.p});
        leaving = true;
        h = 1e-8;
        stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(cfg.rel_tol, cfg.rel_tol);
        return true;
    };

    while (true) {
        if (s >= cfg.max_arclength * (1.0 - 1e-14)) {
            out.end = TraceEnd::max_arclength;
            break;
        }
        h = std::min({h, cfg.step_target, cfg.max_arclength - s});
        sys.br = br;
        sys.ref = tcur;
        State Xn = X;
        double sn = s;
        odeint::controlled_step_result res = odeint::fail;
        bool failed_stage = false;
        try {
            res = stepper.try_step(sys, Xn, sn, h);
        } catch (const StageFail& f) {
            stepper.reset();
            failed_stage = true;
            if (f.reason == FailReason::outside) ++outside_fails;
            h *= 0.5;
        }
        if (failed_stage || res == odeint::fail) {
            if (outside_fails > 0 && h < 1e-6 * cfg.step_target) {
                out.end = TraceEnd::domain_exit;
                break;
            }
            if (h < h_min) {
                if (arrive()) continue;
                break;
            }
            continue;
        }
        const double dt = sn - s;
        const Vec2 xn(Xn[0], Xn[1]);
        const auto full = full_at(chart, xn, br, tcur);
        if (!full) {
            stepper.reset();
            h = 0.5 * dt;
            if (h < h_min) {
                if (arrive()) continue;
                break;
            }
            continue;
        }
        if (cos_first(full->w, full->t, tcur) < std::cos(0.2)) {
            stepper.reset();
            h = 0.5 * dt;
            if (h < h_min) throw TraceError("trace: branch ambiguity, both roots nearly orthogonal to the previous tangent");
            continue;
        }
        outside_fails = 0;

        if (section) {
            const double g = section->fn(ChartPoint{xn(0), xn(1)});
            if (sn >= section->after && s >= section->after && g_prev * g <= 0.0 && g != g_prev) {
                // Bisect on the step length for the crossing.
                double lo = 0.0, hi = dt;
                State best = Xn;
                for (int it = 0; it < 80 && hi - lo > 1e-15 * std::max(1.0, s); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const auto y = step_exact(mid);
                    if (!y) {
                        hi = mid;
                        continue;
                    }
                    const double gm = section->fn(ChartPoint{(*y)[0], (*y)[1]});
                    if (gm * g_prev > 0.0) {
                        lo = mid;
                    } else {
                        hi = mid;
                        best = *y;
                    }
                }
                const auto yc = step_exact(hi);
                const State Xc = yc ? *yc : best;
                const Vec2 xc(Xc[0], Xc[1]);
                out.samples.push_back(make_sample(chart, xc, br, tcur, s + hi, Xc[2], tol));
                out.events.push_back({EventKind::section_crossing, out.samples.size() - 1, out.samples.back().p});
                if (section->stop) {
                    out.end = TraceEnd::section;
                    break;
                }
                X = Xc;
                s += hi;
                stepper.reset();
                tcur = out.samples.back().t;
                // The crossing point itself may evaluate to exactly 0; carry
                // the far-side value so it is not reported twice.
                g_prev = g;
                continue;
            }
            if (s >= section->after || sn >= section->after) g_prev = g;
        }

        X = Xn;
        s = sn;
        tcur = full->t;
        out.samples.push_back(make_sample(chart, xn, br, tcur, s, X[2], tol));
        const Sample& sm = out.samples.back();

        if (leaving && sm.cd.K > 100.0 * cfg.stop_K) leaving = false;
        if (!leaving && sm.cd.K < cfg.stop_K) {
            if (arrive()) continue;
            break;
        }
        if (rel_gap(sm.cd) < cfg.stop_umbilic) {
            out.end = TraceEnd::umbilic;
            break;
        }
        if (cfg.detect_closure && s > 20.0 * cfg.closure_tol) {
            const Vec3 pos = chart.position(sm.p);
            if ((pos - pos0).norm() < cfg.closure_tol && sm.T.normalized().dot(T0) > std::cos(0.05)) {
                out.closed = true;
                out.end = TraceEnd::closed;
                break;
            }
        }
    }
    return out;
}

}  // namespace

const char* to_string(TraceEnd e) {
    switch (e) {
        case TraceEnd::max_arclength: return "max_arclength";
        case TraceEnd::domain_exit: return "domain_exit";
        case TraceEnd::parabolic: return "parabolic";
        case TraceEnd::tangential_parabolic: return "tangential_parabolic";
        case TraceEnd::umbilic: return "umbilic";
        case TraceEnd::closed: return "closed";
        case TraceEnd::section: return "section";
        case TraceEnd::max_switches: return "max_switches";
    }
    return "unknown";
}

const char* to_string(EventKind e) {
    switch (e) {
        case EventKind::branch_switch: return "branch_switch";
        case EventKind::tangential_reflection: return "tangential_reflection";
        case EventKind::section_crossing: return "section_crossing";
    }
    return "unknown";
}

Polyline trace_gmc_line(const SurfaceChart& chart, const ChartPoint& seed, Branch branch, const TraceConfig& cfg,
                        const ToleranceConfig& tol, std::optional<Vec2> initial_direction,
                        const SectionStop* section) {
    return run_trace(chart, seed, branch, cfg, tol, initial_direction, section, nullptr);
}

Polyline trace_extended(const SurfaceChart& chart, const ChartPoint& seed, Branch branch, const TraceConfig& cfg,
                        const ExtendedOptions& ext, const ToleranceConfig& tol,
                        std::optional<Vec2> initial_direction, const SectionStop* section) {
    return run_trace(chart, seed, branch, cfg, tol, initial_direction, section, &ext);
}

Vec2 gmc_field(const SurfaceChart& chart, const ChartPoint& p, Branch branch, std::optional<Vec2> reference) {
    chart.require(p);
    const auto pk = pick_root(forms_at<double>(chart, p.u, p.v), chart.normal_sign(), branch, reference);
    if (!pk) throw DomainError("gmc_field: no GMC direction of this branch at the point");
    return pk->t;
}

FrameQuantities frame_quantities(const SurfaceChart& chart, const ChartPoint& p, Branch branch, const Vec2& tangent) {
    chart.require(p);
    const auto f = full_at(chart, Vec2(p.u, p.v), branch, tangent);
    if (!f) throw DomainError("frame_quantities: no GMC direction of this branch at the point");
    return f->fq;
}

double sqrtK_conormal_derivative(const SurfaceChart& chart, const ChartPoint& p, const Vec2& conormal,
                                 const ToleranceConfig& tol) {
    chart.require(p);
    const auto w = forms_at<AD>(chart, ad_var(p.u, 0), ad_var(p.v, 1));
    const AD K = gaussian_curvature(w);
    if (!(K.value() > tol.parabolic))
        throw DomainError("sqrtK_conormal_derivative: K below eps_K, the derivative of sqrt K is unbounded");
    return K.derivatives().dot(conormal) / (2.0 * std::sqrt(K.value()));
}

double integrate_samples(const std::vector<double>& s, const std::vector<double>& f) {
    if (s.size() != f.size()) throw ConfigError("integrate_samples: size mismatch");
    const std::size_t n = s.size();
    if (n < 2) return 0.0;
    if (n == 2) return 0.5 * (s[1] - s[0]) * (f[0] + f[1]);
    double sum = 0.0;
    std::size_t i = 0;
    for (; i + 2 < n; i += 2) {
        const double h0 = s[i + 1] - s[i], h1 = s[i + 2] - s[i + 1];
        sum += (h0 + h1) / 6.0 *
               ((2.0 - h1 / h0) * f[i] + (h0 + h1) * (h0 + h1) / (h0 * h1) * f[i + 1] + (2.0 - h0 / h1) * f[i + 2]);
    }
    if (i + 1 < n) {
        // Last single interval: integrate the parabola through the final three nodes.
        // shifted so that x1 = 0; absolute coordinates cancel badly
        const double x0 = s[n - 3] - s[n - 2], x1 = 0.0, x2 = s[n - 1] - s[n - 2];
        const double a = x1, b = x2;
        auto L = [&](double xa, double xb, double xc, double lo, double hi) {
            // integral over [lo, hi] of (x - xb)(x - xc)/((xa - xb)(xa - xc))
            auto F = [&](double x) { return x * x * x / 3.0 - (xb + xc) * x * x / 2.0 + xb * xc * x; };
            return (F(hi) - F(lo)) / ((xa - xb) * (xa - xc));
        };
        sum += f[n - 3] * L(x0, x1, x2, a, b) + f[n - 2] * L(x1, x0, x2, a, b) + f[n - 1] * L(x2, x0, x1, a, b);
    }
    return sum;
}

GeodesicSection::GeodesicSection(const SurfaceChart& chart, const ChartPoint& p, const Vec2& dir, double vmax, int n)
    : vmax_(vmax), dv_(vmax / n) {
    if (!(vmax > 0.0) || n < 2) throw ConfigError("GeodesicSection: vmax > 0 and n >= 2 required");
    auto rhs = [&chart](const GState& x, GState& dx, double) {
        const auto J = chart.jet<double>(x[0], x[1]);
        const double a = x[2], b = x[3];
        const Vec3 Q = J.puu * a * a + 2.0 * J.puv * a * b + J.pvv * b * b;
        Eigen::Matrix2d I;
        I << J.pu.dot(J.pu), J.pu.dot(J.pv), J.pu.dot(J.pv), J.pv.dot(J.pv);
        const Vec2 acc = -I.inverse() * Vec2(J.pu.dot(Q), J.pv.dot(Q));
        dx = {a, b, acc(0), acc(1)};
    };
    const auto w = forms_at<double>(chart, p.u, p.v);
    const Vec2 d = normalize_first(to_ff(w, 1), dir);
    x_.assign(static_cast<std::size_t>(2 * n + 1), Vec2::Zero());
    xd_ = x_;
    for (int sgn : {1, -1}) {
        GState st{p.u, p.v, sgn * d(0), sgn * d(1)};
        int k = 0;
        odeint::integrate_const(odeint::make_dense_output(1e-13, 1e-13, odeint::runge_kutta_dopri5<GState>()), rhs, st,
                                0.0, vmax + 0.5 * dv_, dv_, [&](const GState& x, double) {
                                    if (k > n) return;
                                    const auto idx = static_cast<std::size_t>(n + sgn * k);
                                    x_[idx] = Vec2(x[0], x[1]);
                                    xd_[idx] = sgn * Vec2(x[2], x[3]);
                                    ++k;
                                });
    }
    for (const auto& q : x_)
        if (!q.allFinite()) throw TraceError("GeodesicSection: geodesic left the chart");
}

namespace {

struct Hermite {
    Vec2 x, d, dd;
};

Hermite hermite(const std::vector<Vec2>& x, const std::vector<Vec2>& xd, double dv, double vmax, double v) {
    const int n = static_cast<int>(x.size()) - 1;
    double pos = (v + vmax) / dv;
    int i = std::clamp(static_cast<int>(std::floor(pos)), 0, n - 1);
    const double t = pos - i;
    const auto a = static_cast<std::size_t>(i), b = a + 1;
    const double h00 = 2 * t * t * t - 3 * t * t + 1, h10 = t * t * t - 2 * t * t + t;
    const double h01 = -2 * t * t * t + 3 * t * t, h11 = t * t * t - t * t;
    const double d00 = (6 * t * t - 6 * t) / dv, d10 = 3 * t * t - 4 * t + 1;
    const double d01 = (-6 * t * t + 6 * t) / dv, d11 = 3 * t * t - 2 * t;
    const double s00 = (12 * t - 6) / (dv * dv), s10 = (6 * t - 4) / dv;
    const double s01 = (-12 * t + 6) / (dv * dv), s11 = (6 * t - 2) / dv;
    Hermite H;
    H.x = h00 * x[a] + h10 * dv * xd[a] + h01 * x[b] + h11 * dv * xd[b];
    H.d = d00 * x[a] + d10 * xd[a] + d01 * x[b] + d11 * xd[b];
    H.dd = s00 * x[a] + s10 * xd[a] + s01 * x[b] + s11 * xd[b];
    return H;
}

}  // namespace

ChartPoint GeodesicSection::at(double v) const {
    const Vec2 q = hermite(x_, xd_, dv_, vmax_, v).x;
    return ChartPoint{q(0), q(1)};
}

Vec2 GeodesicSection::velocity(double v) const { return hermite(x_, xd_, dv_, vmax_, v).d; }

std::pair<double, double> GeodesicSection::project(const ChartPoint& qp) const {
    const Vec2 q(qp.u, qp.v);
    std::size_t best = 0;
    double bd = (x_[0] - q).squaredNorm();
    for (std::size_t i = 1; i < x_.size(); ++i) {
        const double d = (x_[i] - q).squaredNorm();
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    double v = -vmax_ + static_cast<double>(best) * dv_;
    for (int it = 0; it < 20; ++it) {
        const Hermite H = hermite(x_, xd_, dv_, vmax_, v);
        const double phi = (H.x - q).dot(H.d);
        const double dphi = H.d.squaredNorm() + (H.x - q).dot(H.dd);
        if (dphi == 0.0) break;
        const double nv = std::clamp(v - phi / dphi, -vmax_, vmax_);
        const bool done = std::abs(nv - v) < 1e-16 * std::max(1.0, vmax_);
        v = nv;
        if (done) break;
    }
    const Hermite H = hermite(x_, xd_, dv_, vmax_, v);
    const Vec2 r = q - H.x;
    const double side = (H.d(0) * r(1) - H.d(1) * r(0)) / H.d.norm();
    return {v, side};
}

namespace {

void check_arc(const ArcRef& arc) {
    if (!arc.line || arc.i1 >= arc.line->samples.size() || arc.i0 > arc.i1)
        throw ConfigError("arc: sample range out of bounds");
    for (const auto& ev : arc.line->events)
        if (ev.kind != EventKind::section_crossing && ev.index >= arc.i0 && ev.index < arc.i1)
            throw TraceError("arc: contains a branch switch");
}

// v1(v0) for a launch at parameter v0 on `from`, arriving on `to`.
double arrival_parameter(const SurfaceChart& chart, const GeodesicSection& from, const GeodesicSection& to, double v0,
                         Branch br, const Vec2& t0, double length, const TraceConfig& cfg, const ToleranceConfig& tol) {
    TraceConfig c = cfg;
    c.integrand = false;
    c.detect_closure = false;
    c.max_arclength = 1.5 * length + 20.0 * to.vmax();
    c.step_target = std::min(cfg.step_target, std::max(length / 8.0, 1e-3));
    SectionStop stop{[&to](const ChartPoint& q) { return to.project(q).second; }, true, 0.5 * length};
    const Polyline pl = trace_gmc_line(chart, from.at(v0), br, c, tol, t0, &stop);
    if (pl.end != TraceEnd::section)
        throw TraceError(std::string("transition: neighbouring trace ended (") + to_string(pl.end) +
                         ") before the far section");
    const auto pr = to.project(pl.samples.back().p);
    if (std::abs(pr.first) >= to.vmax() * (1.0 - 1e-12))
        throw TraceError("transition: neighbouring trace missed the far section");
    return pr.first;
}

Vec2 sample_conormal(const SurfaceChart& chart, const Sample& sm) {
    const FundamentalForms ff = to_ff(forms_at<double>(chart, sm.p.u, sm.p.v), chart.normal_sign());
    return conormal(ff, sm.t);
}

double numeric_ln(const SurfaceChart& chart, const GeodesicSection& from, const GeodesicSection& to, Branch br,
                  const Vec2& t0, double length, double offset, const TraceConfig& cfg, const ToleranceConfig& tol) {
    const double vp = arrival_parameter(chart, from, to, offset, br, t0, length, cfg, tol);
    const double vm = arrival_parameter(chart, from, to, -offset, br, t0, length, cfg, tol);
    const double d = (vp - vm) / (2.0 * offset);
    if (!(d > 0.0)) throw TraceError("transition: non-positive section derivative");
    return std::log(d);
}

}  // namespace

double transition_derivative_integral(const ArcRef& arc, TransitionReport* detail) {
    check_arc(arc);
    const Sample& a = arc.line->samples[arc.i0];
    const Sample& b = arc.line->samples[arc.i1];
    if (!(a.tau_g * b.tau_g > 0.0)) throw TraceError("transition: geodesic torsion changes sign on the arc");
    const double boundary = -0.5 * std::log(b.tau_g / a.tau_g);
    const double integral = b.cumulative - a.cumulative;
    if (detail) {
        detail->ln_boundary_factor = boundary;
        detail->integral = integral;
        detail->ln_derivative_integral = boundary + integral;
    }
    return boundary + integral;
}

double transition_derivative_numeric(const SurfaceChart& chart, const ArcRef& arc, double offset,
                                     const TraceConfig& cfg, const ToleranceConfig& tol) {
    check_arc(arc);
    if (!(offset > 0.0)) throw ConfigError("transition: offset must be positive");
    if (arc.i0 == arc.i1) return 0.0;
    const Sample& a = arc.line->samples[arc.i0];
    const Sample& b = arc.line->samples[arc.i1];
    const double length = b.s - a.s;
    const double growth = std::exp(std::abs(transition_derivative_integral(arc)));
    const GeodesicSection from(chart, a.p, sample_conormal(chart, a), 1.5 * offset, 60);
    const GeodesicSection to(chart, b.p, sample_conormal(chart, b), 4.0 * offset * std::max(1.0, growth), 400);
    return numeric_ln(chart, from, to, a.branch, a.t, length, offset, cfg, tol);
}

TransitionReport transition_report(const SurfaceChart& chart, const ArcRef& arc, double offset,
                                   const TraceConfig& cfg, const ToleranceConfig& tol) {
    TransitionReport r;
    transition_derivative_integral(arc, &r);
    r.offset = offset;
    const double d0 = transition_derivative_numeric(chart, arc, offset, cfg, tol);
    const double d1 = transition_derivative_numeric(chart, arc, 0.5 * offset, cfg, tol);
    const double d2 = transition_derivative_numeric(chart, arc, 0.25 * offset, cfg, tol);
    r.ln_derivative_numeric = d0;
    // Work with the derivative itself: its central-difference error is O(h^2).
    const double e0 = std::exp(d0), e1 = std::exp(d1), e2 = std::exp(d2);
    r.richardson_ratio = (e1 - e2) != 0.0 ? (e0 - e1) / (e1 - e2) : 0.0;
    r.agreement = std::abs(r.ln_derivative_numeric - r.ln_derivative_integral) /
                  std::max(1.0, std::abs(r.ln_derivative_integral));
    return r;
}

CycleReport cycle_hyperbolicity(const SurfaceChart& chart, const Polyline& closed, double threshold, double offset,
                                const TraceConfig& cfg, const ToleranceConfig& tol) {
    if (!closed.closed || closed.samples.size() < 3) throw ConfigError("cycle_hyperbolicity: polyline is not closed");
    CycleReport r;
    const ArcRef arc{&closed, 0, closed.samples.size() - 1};
    r.length = closed.length();
    const Sample& a = closed.samples.front();
    const Sample& b = closed.samples.back();
    r.ln_return_integral = b.cumulative - a.cumulative;  // boundary factor cancels on a loop
    check_arc(arc);

    // Same section at both ends, shifted by whole periods on periodic axes.
    const Domain& d = chart.domain();
    ChartPoint shift{0.0, 0.0};
    if (d.u_periodic) {
        const double P = d.u_max - d.u_min;
        shift.u = P * std::round((b.p.u - a.p.u) / P);
    }
    if (d.v_periodic) {
        const double P = d.v_max - d.v_min;
        shift.v = P * std::round((b.p.v - a.p.v) / P);
    }
    const Vec2 c0 = sample_conormal(chart, a);
    const GeodesicSection from(chart, a.p, c0, 1.5 * offset, 60);
    const GeodesicSection to(chart, ChartPoint{a.p.u + shift.u, a.p.v + shift.v}, c0, 8.0 * offset, 400);
    try {
        r.ln_return_numeric = numeric_ln(chart, from, to, a.branch, a.t, r.length, offset, cfg, tol);
    } catch (const TraceError& e) {
        r.conclusive = false;
        r.note = e.what();
        return r;
    }
    const bool hi = std::abs(r.ln_return_integral) > threshold;
    const bool hn = std::abs(r.ln_return_numeric) > threshold;
    if (hi != hn || (hi && hn && r.ln_return_integral * r.ln_return_numeric < 0.0)) {
        r.conclusive = false;
        r.note = "integral and numeric return derivatives disagree";
    }
    r.hyperbolic = hi && hn && r.conclusive;
    return r;
}

namespace {

struct Outcome {
    bool in = false;
    double psi = 0.0;
    double rmin = 0.0;  ///< closest approach to the centre
};

double wrap(double a) {
    const double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a + std::numbers::pi, two_pi);
    if (a < 0.0) a += two_pi;
    return a - std::numbers::pi;
}

bool jump(const Outcome& a, const Outcome& b, double thr) {
    if (a.in != b.in) return true;
    return !a.in && std::abs(wrap(a.psi - b.psi)) > thr;
}

}  // namespace

ShootingResult shoot_separatrices(const SurfaceChart& chart, const ChartPoint& center, Branch branch, double radius,
                                  int samples, double angle_tol, const ToleranceConfig& tol) {
    if (!(radius > 0.0) || samples < 8) throw ConfigError("shoot_separatrices: bad radius or sample count");
    const double r_in = 1e-4 * radius, r_out = 1.05 * radius;
    TraceConfig cfg;
    cfg.step_target = 0.1 * radius;
    cfg.max_arclength = 40.0 * radius;
    cfg.stop_umbilic = 1e-12;
    cfg.integrand = false;
    cfg.detect_closure = false;
    cfg.rel_tol = 1e-9;
    const Vec2 c(center.u, center.v);
    SectionStop stop{[&](const ChartPoint& q) {
                         const double r = (Vec2(q.u, q.v) - c).norm();
                         return (r - r_in) * (r_out - r);
                     },
                     true, 0.0};

    auto shoot = [&](double phi) {
        const Vec2 dir(std::cos(phi), std::sin(phi));
        const ChartPoint q{c(0) + radius * dir(0), c(1) + radius * dir(1)};
        Outcome o;
        Polyline pl;
        try {
            pl = trace_gmc_line(chart, q, branch, cfg, tol, Vec2(-dir), &stop);
        } catch (const UmbilicPointError&) {
            o.in = true;
            return o;
        }
        const ChartPoint e = pl.samples.back().p;
        const Vec2 x = Vec2(e.u, e.v) - c;
        o.rmin = radius;
        for (const auto& smp : pl.samples) o.rmin = std::min(o.rmin, (Vec2(smp.p.u, smp.p.v) - c).norm());
        if (pl.end == TraceEnd::section && x.norm() > 0.5 * radius) {
            o.psi = std::atan2(x(1), x(0));
        } else {
            o.in = true;
        }
        return o;
    };

    const double two_pi = 2.0 * std::numbers::pi;
    const double thr = 0.5;
    std::vector<Outcome> out(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) out[static_cast<std::size_t>(i)] = shoot(two_pi * i / samples);

    ShootingResult res;
    res.branch = branch;
    res.samples = samples;
    std::vector<double> found;
    for (int i = 0; i < samples; ++i) {
        const auto ia = static_cast<std::size_t>(i), ib = static_cast<std::size_t>((i + 1) % samples);
        if (!jump(out[ia], out[ib], thr)) continue;
        double a = two_pi * i / samples, b = two_pi * (i + 1) / samples;
        Outcome oa = out[ia], ob = out[ib];
        bool genuine = true;
        while (b - a > angle_tol) {
            const double m = 0.5 * (a + b);
            const Outcome om = shoot(m);
            const bool ja = jump(oa, om, thr), jb = jump(om, ob, thr);
            if (ja && !jb) {
                b = m;
                ob = om;
            } else if (!ja && jb) {
                a = m;
                oa = om;
            } else if (ja && jb) {
                b = m;
                ob = om;
            } else {
                genuine = false;  // smooth but steep: not a separatrix
                break;
            }
        }
        // Where the field is tangent to the circle the inward choice flips and
        // the exit angle jumps without any trace nearing the centre.
        const double closest = std::min(oa.in ? 0.0 : oa.rmin, ob.in ? 0.0 : ob.rmin);
        if (closest > 0.05 * radius) genuine = false;
        if (genuine) found.push_back(wrap(0.5 * (a + b)));
    }
    // A narrow band of captured launches around one separatrix shows up as two
    // neighbouring jumps; merge those.
    std::sort(found.begin(), found.end());
    const double merge = 1.5 * two_pi / samples;
    for (std::size_t i = 0; i < found.size(); ++i) {
        if (!res.separatrix_angles.empty() && found[i] - res.separatrix_angles.back() < merge) {
            res.separatrix_angles.back() = 0.5 * (res.separatrix_angles.back() + found[i]);
            continue;
        }
        res.separatrix_angles.push_back(found[i]);
    }
    if (res.separatrix_angles.size() > 1 &&
        res.separatrix_angles.front() + two_pi - res.separatrix_angles.back() < merge) {
        res.separatrix_angles.front() = wrap(0.5 * (res.separatrix_angles.front() + two_pi + res.separatrix_angles.back()));
        res.separatrix_angles.pop_back();
    }
    return res;
}

}  // namespace gmc
