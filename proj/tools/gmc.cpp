// gmc: command-line front end for the GMC line library.

#include <algorithm>
#include <atomic>
#include <numbers>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "gmc/io.hpp"
#include "gmc/models.hpp"
#include "gmc/parabolic.hpp"
#include "gmc/umbilic.hpp"

namespace fs = std::filesystem;
using namespace gmc;

namespace {

struct Common {
    std::string chart_file;
    std::string chart_inline;
    std::string out_dir;
    std::vector<std::string> formats{"json"};
    double tol_k = ToleranceConfig{}.parabolic;
    double tol_umbilic = ToleranceConfig{}.umbilic;
    std::uint64_t seed = 1;
    std::string projection = "chart";
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool wants(const Common& c, const std::string& f) {
    return std::find(c.formats.begin(), c.formats.end(), f) != c.formats.end();
}

ToleranceConfig tolerances(const Common& c) {
    Json j{{"parabolic", c.tol_k}, {"umbilic", c.tol_umbilic}};
    return tolerances_from_json(j);
}

bool have_chart(const Common& c) { return !c.chart_file.empty() || !c.chart_inline.empty(); }

Json chart_json(const Common& c) {
    try {
        if (!c.chart_inline.empty()) return Json::parse(c.chart_inline);
        std::ifstream in(c.chart_file);
        if (!in) throw ConfigError("cannot open chart file '" + c.chart_file + "'");
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("chart JSON: ") + e.what());
    }
}

SurfaceChart load_chart(const Common& c) {
    if (!have_chart(c)) throw UsageError("this command needs --chart or --chart-json");
    return chart_from_json(chart_json(c));
}

Json base_config(const std::string& command, const Common& c) {
    Json j;
    j["command"] = command;
    if (have_chart(c)) j["chart"] = chart_to_json(chart_from_json(chart_json(c)));
    j["tolerances"] = to_json(tolerances(c));
    j["formats"] = c.formats;
    j["seed"] = c.seed;
    if (!c.out_dir.empty()) j["out"] = c.out_dir;
    return j;
}

void write_file(const Common& c, const std::string& name, const std::string& body) {
    if (c.out_dir.empty()) return;
    fs::create_directories(c.out_dir);
    std::ofstream f(fs::path(c.out_dir) / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + (fs::path(c.out_dir) / name).string() + "'");
    f << body;
}

void emit_json(const Common& c, const std::string& command, const Json& result) {
    if (!wants(c, "json")) return;
    const std::string text = result.dump(2) + "\n";
    std::cout << text;
    write_file(c, command + ".json", text);
}

Branch parse_branch(const std::string& s) {
    if (s == "minimal") return Branch::minimal;
    if (s == "maximal") return Branch::maximal;
    throw UsageError("branch must be minimal or maximal");
}

std::vector<Branch> parse_branches(const std::string& s) {
    if (s == "both") return {Branch::minimal, Branch::maximal};
    return {parse_branch(s)};
}

Json polyline_summary(const Polyline& pl) {
    Json ev = Json::array();
    for (const auto& e : pl.events)
        ev.push_back({{"kind", to_string(e.kind)}, {"index", e.index}, {"u", e.p.u}, {"v", e.p.v}});
    return {{"branch", pl.samples.empty() ? "" : to_string(pl.samples.front().branch)},
            {"samples", pl.samples.size()},
            {"length", pl.length()},
            {"end", to_string(pl.end)},
            {"closed", pl.closed},
            {"events", ev}};
}

// ------------------------------------------------------------------ commands

struct UmbilicArgs {
    std::vector<double> jet;
    std::vector<double> point;
    double shoot_radius = 0.0;
};

void run_classify_umbilic(const Common& c, const UmbilicArgs& a) {
    const ToleranceConfig tol = tolerances(c);
    Json cfg = base_config("classify-umbilic", c);
    MongeJet3 jet;
    if (!a.jet.empty()) {
        jet = MongeJet3{a.jet[0], a.jet[1], a.jet[2], a.jet[3]};
        cfg["jet"] = to_json(jet);
    } else {
        if (a.point.size() != 2) throw UsageError("classify-umbilic needs --jet k,a,b,c or --chart with --point u,v");
        const ChartPoint p{a.point[0], a.point[1]};
        const SurfaceChart chart = orient_positive(load_chart(c), p, tol);
        cfg["point"] = a.point;
        jet = reduce_to_monge_jet(chart, locate_umbilic(chart, p, tol), tol);
    }
    if (a.shoot_radius > 0.0) cfg["shoot_radius"] = a.shoot_radius;
    Json out;
    out["config"] = cfg;
    out["jet"] = to_json(jet);
    out["classification"] = to_json(classify_gmc_umbilic(jet, tol));
    if (a.shoot_radius > 0.0) {
        const double R = 50.0 * a.shoot_radius;
        const SurfaceChart graph = SurfaceChart::monge(monge_height(jet), Domain{-R, R, -R, R});
        Json sh = Json::object();
        for (Branch br : {Branch::minimal, Branch::maximal}) {
            const ShootingResult r = shoot_separatrices(graph, {0.0, 0.0}, br, a.shoot_radius, 360, 1e-4, tol);
            sh[to_string(br)] = {{"count", r.separatrix_angles.size()}, {"angles", r.separatrix_angles}};
        }
        out["shooting"] = sh;
    }
    emit_json(c, "classify-umbilic", out);
}

struct ParabolicArgs {
    std::vector<double> jet;
    int grid = 48;
    double chord = 1e-6;
};

void run_parabolic(const Common& c, const ParabolicArgs& a) {
    const ToleranceConfig tol = tolerances(c);
    Json cfg = base_config("parabolic", c);
    Json out;
    if (!a.jet.empty()) {
        const MongeJet4 jet{a.jet[0], a.jet[1], a.jet[2], a.jet[3], a.jet[4],
                            a.jet[5], a.jet[6], a.jet[7], a.jet[8], a.jet[9]};
        cfg["jet"] = to_json(jet);
        out["config"] = cfg;
        const ParabolicPointInfo info = classify_parabolic_point(jet, tol);
        out["classification"] = to_json(info);
        if (info.tangency == Tangency::tangential) out["lie_cartan"] = to_json(lie_cartan_parabolic_field(jet, tol));
        Json disc = Json::array();
        for (const auto& d : expansion_discrepancies(jet))
            disc.push_back({{"table", d.table}, {"i", d.i}, {"j", d.j}, {"printed", d.printed}, {"exact", d.exact},
                            {"note", d.note}});
        out["expansion_discrepancies"] = disc;
        emit_json(c, "parabolic", out);
        return;
    }
    const SurfaceChart chart = load_chart(c);
    ParabolicTraceOptions opt;
    opt.grid = a.grid;
    opt.chord_error = a.chord;
    cfg["grid"] = a.grid;
    cfg["chord_error"] = a.chord;
    out["config"] = cfg;
    const auto lines = parabolic_curve_trace(chart, chart.domain(), tol, opt);
    Json arr = Json::array();
    std::vector<SvgPath> paths;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        Json tp = Json::array();
        for (const auto& t : find_tangential_points(chart, lines[i], tol)) {
            Json e{{"u", t.p.u}, {"v", t.p.v}, {"classified", t.classified}};
            if (t.classified) {
                e["jet"] = to_json(t.jet);
                e["info"] = to_json(t.info);
            }
            tp.push_back(e);
        }
        arr.push_back({{"vertices", lines[i].points.size()}, {"closed", lines[i].closed}, {"tangential_points", tp}});
        if (wants(c, "csv")) {
            std::ostringstream os;
            write_points_csv(os, lines[i].points);
            write_file(c, "parabolic_" + std::to_string(i) + ".csv", os.str());
        }
        paths.push_back(project(chart, lines[i].points, svg_projection_from_string(c.projection)));
    }
    out["curves"] = arr;
    if (wants(c, "svg")) {
        std::ostringstream os;
        write_svg(os, paths);
        write_file(c, "parabolic.svg", os.str());
    }
    emit_json(c, "parabolic", out);
}

struct TraceArgs {
    std::vector<double> point;
    std::string branch = "both";
    bool extended = false;
    bool reflect = false;
    int random = 0;
    TraceConfig cfg;
};

void run_trace(const Common& c, const TraceArgs& a) {
    const ToleranceConfig tol = tolerances(c);
    SurfaceChart chart = load_chart(c);
    std::vector<ChartPoint> seeds;
    if (a.point.size() == 2) seeds.push_back({a.point[0], a.point[1]});
    if (a.random > 0) {
        // Rejection-sample elliptic non-umbilic seeds; periodic axes use one period.
        std::mt19937_64 rng(c.seed);
        const Domain& d = chart.domain();
        std::uniform_real_distribution<double> U(d.u_min, d.u_max), V(d.v_min, d.v_max);
        int tries = 0;
        while (static_cast<int>(seeds.size()) < (a.point.size() == 2 ? 1 : 0) + a.random && tries++ < 100000) {
            const ChartPoint p{U(rng), V(rng)};
            if (!chart.contains(p)) continue;
            const CurvatureData cd = curvature_at(chart, p, tol);
            if (cd.region == Region::elliptic && !cd.umbilic) seeds.push_back(p);
        }
    }
    if (seeds.empty()) throw UsageError("trace needs --point u,v or --random N");
    chart = orient_positive(chart, seeds.front(), tol);

    Json cfg = base_config("trace", c);
    cfg["chart"] = chart_to_json(chart);
    cfg["trace"] = to_json(a.cfg);
    cfg["branch"] = a.branch;
    cfg["extended"] = a.extended;
    cfg["reflect_tangential"] = a.reflect;
    cfg["projection"] = c.projection;
    if (a.point.size() == 2) cfg["point"] = a.point;
    if (a.random > 0) cfg["random"] = a.random;

    ExtendedOptions ext;
    ext.reflect_tangential = a.reflect;
    Json traces = Json::array();
    std::vector<SvgPath> paths;
    int idx = 0;
    for (const auto& p : seeds) {
        for (Branch br : parse_branches(a.branch)) {
            const Polyline pl = a.extended || a.reflect ? trace_extended(chart, p, br, a.cfg, ext, tol)
                                                        : trace_gmc_line(chart, p, br, a.cfg, tol);
            Json s = polyline_summary(pl);
            s["seed"] = {p.u, p.v};
            traces.push_back(s);
            if (wants(c, "csv")) {
                std::ostringstream os;
                write_trace_csv(os, chart, pl);
                write_file(c, "trace_" + std::to_string(idx) + "_" + to_string(br) + ".csv", os.str());
            }
            paths.push_back(project(chart, pl, svg_projection_from_string(c.projection)));
        }
        ++idx;
    }
    if (wants(c, "svg")) {
        std::ostringstream os;
        write_svg(os, paths);
        write_file(c, "trace.svg", os.str());
    }
    emit_json(c, "trace", Json{{"config", cfg}, {"traces", traces}});
}

struct TransitionArgs {
    std::vector<double> point;
    std::string branch = "maximal";
    double length = 0.5;
    double offset = 0.02;
    TraceConfig cfg;
};

void run_transition(const Common& c, const TransitionArgs& a) {
    const ToleranceConfig tol = tolerances(c);
    if (a.point.size() != 2) throw UsageError("transition needs --point u,v");
    const ChartPoint p{a.point[0], a.point[1]};
    const SurfaceChart chart = orient_positive(load_chart(c), p, tol);
    TraceConfig tc = a.cfg;
    tc.max_arclength = a.length;
    tc.detect_closure = false;
    const Polyline pl = trace_gmc_line(chart, p, parse_branch(a.branch), tc, tol);
    const ArcRef arc{&pl, 0, pl.samples.size() - 1};
    const TransitionReport rep = transition_report(chart, arc, a.offset, tc, tol);
    Json cfg = base_config("transition", c);
    cfg["chart"] = chart_to_json(chart);
    cfg["point"] = a.point;
    cfg["branch"] = a.branch;
    cfg["length"] = a.length;
    cfg["offset"] = a.offset;
    cfg["trace"] = to_json(tc);
    emit_json(c, "transition", Json{{"config", cfg}, {"arc", polyline_summary(pl)}, {"report", to_json(rep)}});
}

struct CycleArgs {
    std::vector<double> point;
    std::string branch = "maximal";
    double threshold = 1e-6;
    double offset = 1e-3;
    TraceConfig cfg;
};

void run_cycle_check(const Common& c, const CycleArgs& a) {
    const ToleranceConfig tol = tolerances(c);
    if (a.point.size() != 2) throw UsageError("cycle-check needs --point u,v");
    const ChartPoint p{a.point[0], a.point[1]};
    const SurfaceChart chart = orient_positive(load_chart(c), p, tol);
    TraceConfig tc = a.cfg;
    tc.detect_closure = true;
    const Polyline pl = trace_gmc_line(chart, p, parse_branch(a.branch), tc, tol);
    if (!pl.closed)
        throw TraceError(std::string("cycle-check: trace did not close (ended: ") + to_string(pl.end) + ")");
    const CycleReport rep = cycle_hyperbolicity(chart, pl, a.threshold, a.offset, tc, tol);
    Json cfg = base_config("cycle-check", c);
    cfg["chart"] = chart_to_json(chart);
    cfg["point"] = a.point;
    cfg["branch"] = a.branch;
    cfg["threshold"] = a.threshold;
    cfg["offset"] = a.offset;
    cfg["trace"] = to_json(tc);
    emit_json(c, "cycle-check", Json{{"config", cfg}, {"cycle", polyline_summary(pl)}, {"report", to_json(rep)}});
}

struct TorusArgs {
    double ratio = 0.0;
    bool trace = false;
};

Json torus_record(double ratio, bool with_trace, const ToleranceConfig& tol) {
    const TorusRho t = torus_rotation(ratio);
    Json j = to_json(t);
    if (with_trace) j["rho_trace"] = torus_rho_trace(ratio, 1.0, Branch::maximal, TraceConfig{}, tol).rho;
    return j;
}

void run_torus_rho(const Common& c, const TorusArgs& a) {
    if (!(a.ratio > 0.0 && a.ratio < 1.0)) throw UsageError("torus-rho needs --ratio in (0, 1)");
    Json cfg = base_config("torus-rho", c);
    cfg["ratio"] = a.ratio;
    cfg["trace"] = a.trace;
    cfg["quadrature"] = to_string(QuadratureConfig{}.scheme);
    Json out{{"config", cfg}};
    out["torus"] = torus_record(a.ratio, a.trace, tolerances(c));
    out["torus"]["normalization_note"] = "rho_quadrature / rho_numeric; rho_numeric is the ODE rotation number";
    emit_json(c, "torus-rho", out);
}

struct EllipsoidArgs {
    double a = 3.0, b = 2.0, c = 1.0;
    int return_seeds = 0;
};

void run_ellipsoid(const Common& c, const EllipsoidArgs& e) {
    const ToleranceConfig tol = tolerances(c);
    Json cfg = base_config("ellipsoid", c);
    cfg["a"] = e.a;
    cfg["b"] = e.b;
    cfg["c"] = e.c;
    cfg["return_seeds"] = e.return_seeds;
    const EllipsoidData d = ellipsoid_data(e.a, e.b, e.c);
    Json out{{"config", cfg}, {"ellipsoid", to_json(d)}};
    const SurfaceChart chart =
        orient_positive(SurfaceChart::ellipsoid_angular(e.a, e.b, e.c), ChartPoint{1.0, 0.3}, tol);
    Json um = Json::array();
    for (const auto& p : ellipsoid_umbilics_angular(e.a, e.b, e.c)) {
        const UmbilicClassification cl = classify_gmc_umbilic(reduce_to_monge_jet(chart, p, tol), tol);
        um.push_back({{"theta", p.u}, {"phi", p.v}, {"gmc_type", to_string(cl.gmc_type)},
                      {"principal_type", to_string(cl.principal_type)}, {"delta_G", cl.delta_G}});
    }
    out["umbilic_types"] = um;
    if (e.return_seeds > 0) {
        std::vector<double> seeds;
        std::mt19937_64 rng(c.seed);
        std::uniform_real_distribution<double> phi(-std::numbers::pi, std::numbers::pi);
        const auto U = ellipsoid_umbilics_angular(e.a, e.b, e.c);
        while (static_cast<int>(seeds.size()) < e.return_seeds) {
            const double f = phi(rng);
            bool near = false;
            for (const auto& q : U) near = near || std::abs(std::remainder(f - q.v, 2.0 * std::numbers::pi)) < 0.05;
            if (!near) seeds.push_back(f);
        }
        Json rm = Json::object();
        for (Branch br : {Branch::minimal, Branch::maximal})
            rm[to_string(br)] = to_json(ellipsoid_return_map(e.a, e.b, e.c, br, seeds, 1, TraceConfig{}, tol));
        out["return_map"] = rm;
    }
    emit_json(c, "ellipsoid", out);
}

struct SweepArgs {
    std::string what = "torus";
    double from = 0.05, to = 0.8;
    int count = 10;
    int threads = 0;
    double a = 3.0, c = 1.0;  // ellipsoid sweep varies b in (c, a)
};

void run_sweep(const Common& c, const SweepArgs& s) {
    if (s.count < 1) throw UsageError("sweep needs --count >= 1");
    if (s.what != "torus" && s.what != "ellipsoid") throw UsageError("sweep --what must be torus or ellipsoid");
    const ToleranceConfig tol = tolerances(c);
    std::vector<double> xs(static_cast<std::size_t>(s.count));
    for (int i = 0; i < s.count; ++i)
        xs[static_cast<std::size_t>(i)] = s.count == 1 ? s.from : s.from + (s.to - s.from) * i / (s.count - 1);
    std::vector<Json> rows(xs.size());
    std::vector<std::string> errors(xs.size());
    // Workers pick indices; each writes only its own slot and its own file.
    if (!c.out_dir.empty() && wants(c, "json")) fs::create_directories(fs::path(c.out_dir) / "sweep");
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (std::size_t i; (i = next.fetch_add(1)) < xs.size();) {
            try {
                if (s.what == "torus") {
                    rows[i] = torus_record(xs[i], false, tol);
                } else {
                    rows[i] = to_json(ellipsoid_data(s.a, xs[i], s.c));
                }
                if (!c.out_dir.empty() && wants(c, "json"))
                    write_file(c, "sweep/point_" + std::to_string(i) + ".json", rows[i].dump(2) + "\n");
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n = s.threads > 0 ? static_cast<unsigned>(s.threads) : std::min<unsigned>(hw, 8);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(n, xs.size()); ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();

    Json cfg = base_config("sweep", c);
    cfg["what"] = s.what;
    cfg["from"] = s.from;
    cfg["to"] = s.to;
    cfg["count"] = s.count;
    if (s.what == "ellipsoid") {
        cfg["a"] = s.a;
        cfg["c"] = s.c;
    }
    Json table = Json::array();
    std::ostringstream csv;
    csv << (s.what == "torus" ? "ratio,rho_quadrature,rho_numeric,normalization\n" : "b,S1,S2,rho,rho_return\n");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!errors[i].empty()) {
            table.push_back({{"x", xs[i]}, {"error", errors[i]}});
            continue;
        }
        table.push_back(rows[i]);
        if (s.what == "torus")
            csv << format_double(xs[i]) << ',' << format_double(rows[i]["rho_quadrature"].get<double>()) << ','
                << format_double(rows[i]["rho_numeric"].get<double>()) << ','
                << format_double(rows[i]["normalization"].get<double>()) << '\n';
        else
            csv << format_double(xs[i]) << ',' << format_double(rows[i]["S1"].get<double>()) << ','
                << format_double(rows[i]["S2"].get<double>()) << ',' << format_double(rows[i]["rho"].get<double>())
                << ',' << format_double(rows[i]["rho_return"].get<double>()) << '\n';
    }
    if (wants(c, "csv")) write_file(c, "sweep.csv", csv.str());
    emit_json(c, "sweep", Json{{"config", cfg}, {"rows", table}});
}

void error_json(const std::string& kind, const std::string& msg) {
    std::cerr << Json{{"error", {{"kind", kind}, {"message", msg}}}}.dump() << "\n";
}

void add_trace_options(CLI::App* app, TraceConfig& t) {
    app->add_option("--step", t.step_target, "largest arclength step");
    app->add_option("--max-length", t.max_arclength, "maximal arclength");
    app->add_option("--stop-k", t.stop_K, "stop once K falls below this");
    app->add_option("--rel-tol", t.rel_tol, "integrator tolerance per unit length");
    app->add_option("--closure-tol", t.closure_tol, "closure radius");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric mean curvature lines: classification, tracing and worked models"};
    app.require_subcommand(1);
    Common common;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--chart", common.chart_file, "chart description (JSON file)");
        sub->add_option("--chart-json", common.chart_inline, "chart description as inline JSON");
        sub->add_option("--out", common.out_dir, "output directory");
        sub->add_option("--format", common.formats, "output formats: json,csv,svg")->delimiter(',');
        sub->add_option("--tol-k", common.tol_k, "parabolic threshold on |K|");
        sub->add_option("--tol-umbilic", common.tol_umbilic, "relative umbilic threshold");
        sub->add_option("--seed", common.seed, "random seed");
        sub->add_option("--projection", common.projection, "svg view: chart, xy, xz, yz");
    };

    UmbilicArgs ua;
    auto* cu = app.add_subcommand("classify-umbilic", "classify an umbilic from its reduced 3-jet or a chart point");
    add_common(cu);
    cu->add_option("--jet", ua.jet, "k,a,b,c")->delimiter(',')->expected(4);
    cu->add_option("--point", ua.point, "u,v near the umbilic")->delimiter(',')->expected(2);
    cu->add_option("--shoot", ua.shoot_radius, "also count separatrices by shooting from this radius");

    ParabolicArgs pa;
    auto* cp = app.add_subcommand("parabolic", "classify a parabolic jet or trace the parabolic set of a chart");
    add_common(cp);
    cp->add_option("--jet", pa.jet, "k,a,b,c,d,A,B,C,D,E")->delimiter(',')->expected(10);
    cp->add_option("--grid", pa.grid, "seed grid per axis");
    cp->add_option("--chord", pa.chord, "chord error target");

    TraceArgs ta;
    auto* ct = app.add_subcommand("trace", "trace GMC lines");
    add_common(ct);
    ct->add_option("--point", ta.point, "seed u,v")->delimiter(',')->expected(2);
    ct->add_option("--branch", ta.branch, "minimal, maximal or both");
    ct->add_flag("--extended", ta.extended, "switch foliation at transversal parabolic arrivals");
    ct->add_flag("--reflect-tangential", ta.reflect, "also continue through tangential arrivals");
    ct->add_option("--random", ta.random, "number of random elliptic seeds (uses --seed)");
    add_trace_options(ct, ta.cfg);

    TransitionArgs tra;
    auto* ctr = app.add_subcommand("transition", "transition derivative along an arc, both methods");
    add_common(ctr);
    ctr->add_option("--point", tra.point, "arc start u,v")->delimiter(',')->expected(2);
    ctr->add_option("--branch", tra.branch, "minimal or maximal");
    ctr->add_option("--length", tra.length, "arc length");
    ctr->add_option("--offset", tra.offset, "finite-difference offset along the sections");
    add_trace_options(ctr, tra.cfg);

    CycleArgs ca;
    auto* cc = app.add_subcommand("cycle-check", "hyperbolicity of a closed GMC line");
    add_common(cc);
    cc->add_option("--point", ca.point, "seed u,v on the cycle")->delimiter(',')->expected(2);
    cc->add_option("--branch", ca.branch, "minimal or maximal");
    cc->add_option("--threshold", ca.threshold, "|ln derivative| above this is hyperbolic");
    cc->add_option("--offset", ca.offset, "finite-difference offset");
    add_trace_options(cc, ca.cfg);

    TorusArgs toa;
    auto* cto = app.add_subcommand("torus-rho", "rotation number of GMC lines on a torus of revolution");
    add_common(cto);
    cto->add_option("--ratio", toa.ratio, "r/R in (0, 1)")->required();
    cto->add_flag("--trace", toa.trace, "also measure it on a billiard trace");

    EllipsoidArgs ea;
    auto* ce = app.add_subcommand("ellipsoid", "umbilics, arcs S1, S2 and rotation numbers of an ellipsoid");
    add_common(ce);
    ce->add_option("--a", ea.a, "largest semi-axis");
    ce->add_option("--b", ea.b, "middle semi-axis");
    ce->add_option("--c", ea.c, "smallest semi-axis");
    ce->add_option("--return-seeds", ea.return_seeds, "measure the return map on this many random seeds");

    SweepArgs sa;
    auto* cs = app.add_subcommand("sweep", "parameter sweep of a model on a worker pool");
    add_common(cs);
    cs->add_option("--what", sa.what, "torus (ratio) or ellipsoid (b)");
    cs->add_option("--from", sa.from, "first parameter");
    cs->add_option("--to", sa.to, "last parameter");
    cs->add_option("--count", sa.count, "number of parameters");
    cs->add_option("--threads", sa.threads, "worker threads (0: automatic)");
    cs->add_option("--a", sa.a, "ellipsoid a for the b sweep");
    cs->add_option("--c", sa.c, "ellipsoid c for the b sweep");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        error_json("usage", e.what());
        std::cerr << app.help();
        return 2;
    }

    try {
        for (const auto& f : common.formats)
            if (f != "json" && f != "csv" && f != "svg") throw UsageError("unknown format '" + f + "'");
        if (common.formats.empty()) throw UsageError("--format must name at least one format");
        if (cu->parsed()) run_classify_umbilic(common, ua);
        else if (cp->parsed()) run_parabolic(common, pa);
        else if (ct->parsed()) run_trace(common, ta);
        else if (ctr->parsed()) run_transition(common, tra);
        else if (cc->parsed()) run_cycle_check(common, ca);
        else if (cto->parsed()) run_torus_rho(common, toa);
        else if (ce->parsed()) run_ellipsoid(common, ea);
        else if (cs->parsed()) run_sweep(common, sa);
    } catch (const UsageError& e) {
        error_json("usage", e.what());
        return 2;
    } catch (const gmc::Error& e) {
        error_json(e.kind(), e.what());
        return 1;
    } catch (const std::exception& e) {
        error_json("internal", e.what());
        return 1;
    }
    return 0;
}
