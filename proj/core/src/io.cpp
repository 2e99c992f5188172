#include "gmc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

namespace gmc {

namespace {

double num(const Json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("chart: missing field '") + key + "'");
    if (!j.at(key).is_number()) throw ConfigError(std::string("chart: field '") + key + "' must be a number");
    return j.at(key).get<double>();
}

template <class T>
void read_opt(const Json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

Json vec(const Vec2& v) { return Json::array({v(0), v(1)}); }

}  // namespace

SurfaceChart chart_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw ConfigError("chart: expected an object with a string 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    SurfaceChart chart;
    if (kind == "torus") {
        chart = SurfaceChart::torus(num(j, "r"), num(j, "R"));
    } else if (kind == "monge") {
        if (!j.contains("coeffs") || !j.at("coeffs").is_array()) throw ConfigError("chart: monge needs 'coeffs'");
        int deg = 0;
        for (const auto& t : j.at("coeffs")) {
            if (!t.is_array() || t.size() != 3) throw ConfigError("chart: coeffs entries are [i, j, c]");
            const int a = t[0].get<int>(), b = t[1].get<int>();
            if (a < 0 || b < 0) throw ConfigError("chart: negative exponent");
            deg = std::max(deg, a + b);
        }
        Poly2 h(std::max(deg, 2));
        for (const auto& t : j.at("coeffs")) h.add(t[0].get<int>(), t[1].get<int>(), t[2].get<double>());
        Domain d;
        if (j.contains("domain")) {
            const auto& dj = j.at("domain");
            if (!dj.is_array() || dj.size() != 4) throw ConfigError("chart: domain is [u0, u1, v0, v1]");
            d = Domain{dj[0].get<double>(), dj[1].get<double>(), dj[2].get<double>(), dj[3].get<double>()};
            if (!(d.u_min < d.u_max && d.v_min < d.v_max)) throw ConfigError("chart: empty domain");
        }
        chart = SurfaceChart::monge(h, d);
    } else if (kind == "ellipsoid") {
        std::array<int, 3> signs{1, 1, 1};
        if (j.contains("signs")) {
            const auto& s = j.at("signs");
            if (!s.is_array() || s.size() != 3) throw ConfigError("chart: signs is [sx, sy, sz]");
            for (int i = 0; i < 3; ++i) signs[i] = s[i].get<int>();
        }
        chart = SurfaceChart::ellipsoid(num(j, "a"), num(j, "b"), num(j, "c"), signs);
    } else if (kind == "ellipsoid_angular") {
        chart = SurfaceChart::ellipsoid_angular(num(j, "a"), num(j, "b"), num(j, "c"));
    } else {
        throw ConfigError("chart: unknown kind '" + kind + "'");
    }
    if (j.contains("orientation")) chart = chart.with_orientation(j.at("orientation").get<int>());
    return chart;
}

Json chart_to_json(const SurfaceChart& chart) {
    Json j;
    switch (chart.kind()) {
        case ChartKind::TorusOfRevolution:
            j["kind"] = "torus";
            j["r"] = chart.r();
            j["R"] = chart.R();
            break;
        case ChartKind::MongeGraph: {
            j["kind"] = "monge";
            Json c = Json::array();
            const Poly2& h = chart.height();
            for (int d = 0; d <= h.degree(); ++d)
                for (int i = d; i >= 0; --i)
                    if (h.coeff(i, d - i) != 0.0) c.push_back(Json::array({i, d - i, h.coeff(i, d - i)}));
            j["coeffs"] = c;
            const Domain& dm = chart.domain();
            j["domain"] = Json::array({dm.u_min, dm.u_max, dm.v_min, dm.v_max});
            break;
        }
        case ChartKind::TriaxialEllipsoid:
            j["kind"] = "ellipsoid";
            j["a"] = chart.a();
            j["b"] = chart.b();
            j["c"] = chart.c();
            j["signs"] = chart.signs();
            break;
        case ChartKind::EllipsoidAngular:
            j["kind"] = "ellipsoid_angular";
            j["a"] = chart.a();
            j["b"] = chart.b();
            j["c"] = chart.c();
            break;
    }
    j["orientation"] = chart.orientation_sign();
    return j;
}

ToleranceConfig tolerances_from_json(const Json& j, ToleranceConfig t) {
    if (!j.is_object()) throw ConfigError("tolerances: expected an object");
    read_opt(j, "parabolic", t.parabolic);
    read_opt(j, "umbilic", t.umbilic);
    read_opt(j, "regularity", t.regularity);
    read_opt(j, "jet_boundary", t.jet_boundary);
    if (!(t.parabolic > 0.0 && t.umbilic > 0.0 && t.regularity > 0.0 && t.jet_boundary > 0.0))
        throw ConfigError("tolerances: all must be positive");
    return t;
}

Json to_json(const ToleranceConfig& t) {
    return {{"parabolic", t.parabolic}, {"umbilic", t.umbilic}, {"regularity", t.regularity},
            {"jet_boundary", t.jet_boundary}};
}

TraceConfig trace_config_from_json(const Json& j, TraceConfig c) {
    if (!j.is_object()) throw ConfigError("trace config: expected an object");
    read_opt(j, "step_target", c.step_target);
    read_opt(j, "max_arclength", c.max_arclength);
    read_opt(j, "stop_K", c.stop_K);
    read_opt(j, "stop_umbilic", c.stop_umbilic);
    read_opt(j, "closure_tol", c.closure_tol);
    read_opt(j, "rel_tol", c.rel_tol);
    read_opt(j, "detect_closure", c.detect_closure);
    if (!(c.step_target > 0.0 && c.max_arclength > 0.0 && c.stop_K > 0.0 && c.stop_umbilic > 0.0 &&
          c.closure_tol > 0.0 && c.rel_tol > 0.0))
        throw ConfigError("trace config: all lengths and tolerances must be positive");
    return c;
}

Json to_json(const TraceConfig& c) {
    return {{"step_target", c.step_target},   {"max_arclength", c.max_arclength}, {"stop_K", c.stop_K},
            {"stop_umbilic", c.stop_umbilic}, {"closure_tol", c.closure_tol},     {"rel_tol", c.rel_tol},
            {"detect_closure", c.detect_closure}};
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

const std::vector<std::string>& trace_csv_columns() {
    static const std::vector<std::string> cols{"s", "u", "v", "x", "y", "z", "tau_g", "k_g", "K", "H"};
    return cols;
}

void write_trace_csv(std::ostream& os, const SurfaceChart& chart, const Polyline& line) {
    const auto& cols = trace_csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& s : line.samples) {
        const Vec3 x = chart.position(s.p);
        const double row[] = {s.s, s.p.u, s.p.v, x(0), x(1), x(2), s.tau_g, s.k_g, s.cd.K, s.cd.H};
        for (std::size_t i = 0; i < std::size(row); ++i) os << (i ? "," : "") << format_double(row[i]);
        os << '\n';
    }
}

void write_points_csv(std::ostream& os, const std::vector<ChartPoint>& pts) {
    os << "u,v\n";
    for (const auto& p : pts) os << format_double(p.u) << ',' << format_double(p.v) << '\n';
}

SvgProjection svg_projection_from_string(const std::string& s) {
    if (s == "chart") return SvgProjection::chart;
    if (s == "xy") return SvgProjection::xy;
    if (s == "xz") return SvgProjection::xz;
    if (s == "yz") return SvgProjection::yz;
    throw ConfigError("svg: projection must be one of chart, xy, xz, yz");
}

SvgPath project(const SurfaceChart& chart, const std::vector<ChartPoint>& pts, SvgProjection proj) {
    SvgPath path;
    for (const auto& p : pts) {
        if (proj == SvgProjection::chart) {
            path.points.emplace_back(p.u, p.v);
            continue;
        }
        const Vec3 x = chart.position(p);
        switch (proj) {
            case SvgProjection::xy: path.points.emplace_back(x(0), x(1)); break;
            case SvgProjection::xz: path.points.emplace_back(x(0), x(2)); break;
            default: path.points.emplace_back(x(1), x(2)); break;
        }
    }
    return path;
}

SvgPath project(const SurfaceChart& chart, const Polyline& line, SvgProjection proj) {
    std::vector<ChartPoint> pts;
    pts.reserve(line.samples.size());
    for (const auto& s : line.samples) pts.push_back(s.p);
    SvgPath p = project(chart, pts, proj);
    p.stroke = line.samples.empty() || line.samples.front().branch == Branch::maximal ? "#b03a2e" : "#1f4e79";
    return p;
}

void write_svg(std::ostream& os, const std::vector<SvgPath>& paths, double size) {
    double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
    for (const auto& p : paths)
        for (const auto& q : p.points) {
            x0 = std::min(x0, q(0));
            x1 = std::max(x1, q(0));
            y0 = std::min(y0, q(1));
            y1 = std::max(y1, q(1));
        }
    if (!(x1 >= x0)) x0 = y0 = 0.0, x1 = y1 = 1.0;
    const double span = std::max({x1 - x0, y1 - y0, 1e-300});
    const double margin = 0.02 * size, scale = (size - 2.0 * margin) / span;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_double(size) << "\" height=\""
       << format_double(size) << "\" viewBox=\"0 0 " << format_double(size) << ' ' << format_double(size)
       << "\">\n";
    for (const auto& p : paths) {
        os << "  <polyline fill=\"none\" stroke=\"" << p.stroke << "\" stroke-width=\"1\" points=\"";
        for (std::size_t i = 0; i < p.points.size(); ++i) {
            // SVG y grows downwards.
            const double X = margin + (p.points[i](0) - x0) * scale;
            const double Y = size - margin - (p.points[i](1) - y0) * scale;
            char buf[64];
            auto r = std::to_chars(buf, buf + sizeof buf, X, std::chars_format::fixed, 3);
            os << (i ? " " : "") << std::string(buf, r.ptr) << ',';
            r = std::to_chars(buf, buf + sizeof buf, Y, std::chars_format::fixed, 3);
            os << std::string(buf, r.ptr);
        }
        os << "\"/>\n";
    }
    os << "</svg>\n";
}

Json to_json(const MongeJet3& j) { return {{"k", j.k}, {"a", j.a}, {"b", j.b}, {"c", j.c}}; }

Json to_json(const MongeJet4& j) {
    return {{"k", j.k}, {"a", j.a}, {"b", j.b}, {"c", j.c}, {"d", j.d},
            {"A", j.A}, {"B", j.B}, {"C", j.C}, {"D", j.D}, {"E", j.E4}};
}

MongeJet3 jet3_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("jet: expected an object {k, a, b, c}");
    MongeJet3 m;
    read_opt(j, "k", m.k);
    read_opt(j, "a", m.a);
    read_opt(j, "b", m.b);
    read_opt(j, "c", m.c);
    return m;
}

MongeJet4 jet4_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("jet: expected an object {k, a, b, c, d, A, B, C, D, E}");
    MongeJet4 m;
    read_opt(j, "k", m.k);
    read_opt(j, "a", m.a);
    read_opt(j, "b", m.b);
    read_opt(j, "c", m.c);
    read_opt(j, "d", m.d);
    read_opt(j, "A", m.A);
    read_opt(j, "B", m.B);
    read_opt(j, "C", m.C);
    read_opt(j, "D", m.D);
    read_opt(j, "E", m.E4);
    return m;
}

Json to_json(const UmbilicClassification& c) {
    Json eq = Json::array();
    for (const auto& e : c.equilibria)
        eq.push_back({{"direction", vec(e.direction)},
                      {"chart", e.slope_chart ? "dy/dx" : "dx/dy"},
                      {"coordinate", e.coordinate},
                      {"eigen_transverse", e.eigen1},
                      {"eigen_fiber", e.eigen2},
                      {"kind", to_string(e.kind)}});
    return {{"gmc_type", to_string(c.gmc_type)},
            {"principal_type", to_string(c.principal_type)},
            {"delta_G", c.delta_G},
            {"delta_P", c.delta_P},
            {"transversality_Tg", c.transversality_Tg},
            {"transversality_T", c.transversality_T},
            {"separatrix_count", c.separatrix_count},
            {"equilibria", eq}};
}

Json to_json(const ParabolicPointInfo& p) {
    return {{"regularity", p.regularity},
            {"tangency", to_string(p.tangency)},
            {"sigma", p.sigma},
            {"class", to_string(p.cls)},
            {"center_coefficient", p.center_coefficient}};
}

Json to_json(const LieCartanParabolicField& f) {
    return {{"linearization", {{f.linearization(0, 0), f.linearization(0, 1)},
                               {f.linearization(1, 0), f.linearization(1, 1)}}},
            {"eigenvalues", vec(f.eigenvalues)},
            {"center_eigenvector", vec(f.center_eigenvector)},
            {"strong_eigenvector", vec(f.strong_eigenvector)},
            {"center_coefficient_numeric", f.center_coefficient_numeric},
            {"center_coefficient_formula", f.center_coefficient_formula}};
}

Json to_json(const TransitionReport& r) {
    return {{"ln_derivative_integral", r.ln_derivative_integral},
            {"ln_derivative_numeric", r.ln_derivative_numeric},
            {"ln_boundary_factor", r.ln_boundary_factor},
            {"integral", r.integral},
            {"agreement", r.agreement},
            {"richardson_ratio", r.richardson_ratio},
            {"offset", r.offset}};
}

Json to_json(const CycleReport& r) {
    return {{"length", r.length},
            {"ln_return_integral", r.ln_return_integral},
            {"ln_return_numeric", r.ln_return_numeric},
            {"hyperbolic", r.hyperbolic},
            {"conclusive", r.conclusive},
            {"note", r.note}};
}

Json to_json(const std::vector<Convergent>& cf) {
    Json a = Json::array();
    for (const auto& c : cf) a.push_back(Json::array({c.p, c.q}));
    return a;
}

Json to_json(const RationalApprox& r) { return {{"p", r.p}, {"q", r.q}, {"distance", r.distance}}; }

Json to_json(const TorusRho& t) {
    return {{"ratio", t.ratio},
            {"rho_quadrature", t.rho_quadrature},
            {"rho_numeric", t.rho_numeric},
            {"normalization", t.normalization},
            {"convergents", to_json(t.continued_fraction)},
            {"nearest_rational", to_json(t.nearest)}};
}

Json to_json(const EllipsoidData& d) {
    Json u = Json::array();
    for (const auto& p : d.umbilics) u.push_back(Json::array({p(0), p(1), p(2)}));
    return {{"a", d.a},
            {"b", d.b},
            {"c", d.c},
            {"umbilics", u},
            {"S1", d.S1},
            {"S2", d.S2},
            {"S1_check", d.S1_check},
            {"S2_check", d.S2_check},
            {"rho", d.rho},
            {"rho_return", d.rho_return},
            {"convergents", to_json(d.continued_fraction)},
            {"nearest_rational", to_json(d.nearest)}};
}

Json to_json(const ReturnMapReport& r) {
    return {{"rotation_number", r.rotation_number},
            {"spread", r.spread},
            {"seeds", r.seeds},
            {"displacement", r.displacement}};
}

}  // namespace gmc
