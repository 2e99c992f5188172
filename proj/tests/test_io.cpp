#include <doctest.h>

#include <clocale>
#include <sstream>
#include <string>

#include "gmc/io.hpp"

using namespace gmc;

namespace {

std::size_t count(const std::string& s, const std::string& what) {
    std::size_t n = 0;
    for (auto p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("doubles print with 17 significant digits") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(-2.5) == "-2.5");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_double(1e-300).find('e') != std::string::npos);
}

TEST_CASE("chart JSON round trip") {
    for (const char* text :
         {R"({"kind":"torus","r":1.0,"R":3.0,"orientation":-1})",
          R"({"kind":"ellipsoid","a":3,"b":2,"c":1,"signs":[1,-1,1]})",
          R"({"kind":"ellipsoid_angular","a":3,"b":2,"c":1})",
          R"({"kind":"monge","coeffs":[[2,0,0.5],[0,2,0.5],[3,0,0.1]],"domain":[-0.5,0.5,-0.4,0.4]})"}) {
        const SurfaceChart c = chart_from_json(Json::parse(text));
        const SurfaceChart d = chart_from_json(chart_to_json(c));
        CHECK(d.kind() == c.kind());
        CHECK(d.orientation_sign() == c.orientation_sign());
        CHECK(d.domain().u_min == c.domain().u_min);
        const ChartPoint p = c.kind() == ChartKind::TriaxialEllipsoid ? ChartPoint{-2.0, -6.0}
                             : c.kind() == ChartKind::EllipsoidAngular ? ChartPoint{1.0, 0.5}
                                                                        : ChartPoint{0.1, 0.2};
        CHECK((c.position(p) - d.position(p)).norm() == 0.0);
    }
    CHECK(chart_from_json(Json::parse(R"({"kind":"torus","r":1.0,"R":3.0,"orientation":-1})")).orientation_sign() ==
          -1);
    CHECK_THROWS_AS(chart_from_json(Json::parse(R"({"kind":"klein"})")), ConfigError);
    CHECK_THROWS_AS(chart_from_json(Json::parse(R"({"kind":"torus","r":1.0})")), ConfigError);
}

TEST_CASE("configs round trip") {
    ToleranceConfig t;
    t.parabolic = 1e-9;
    CHECK(tolerances_from_json(to_json(t)).parabolic == 1e-9);
    TraceConfig c;
    c.step_target = 0.005;
    c.detect_closure = false;
    const TraceConfig d = trace_config_from_json(to_json(c));
    CHECK(d.step_target == 0.005);
    CHECK_FALSE(d.detect_closure);
}

TEST_CASE("trace CSV") {
    const SurfaceChart E = orient_positive(SurfaceChart::ellipsoid_angular(3, 2, 1), {1.0, 0.5});
    TraceConfig cfg;
    cfg.max_arclength = 0.3;
    const Polyline pl = trace_gmc_line(E, {1.0, 0.5}, Branch::minimal, cfg);
    std::ostringstream os;
    write_trace_csv(os, E, pl);
    const std::string s = os.str();
    CHECK(s.rfind("s,u,v,x,y,z,tau_g,k_g,K,H\n", 0) == 0);
    CHECK(count(s, "\n") == pl.samples.size() + 1);
    std::istringstream is(s);
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    CHECK(count(row, ",") == 9);
}

TEST_CASE("SVG has one polyline per path and parses as simple XML") {
    std::vector<SvgPath> paths(3);
    for (int i = 0; i < 3; ++i) paths[i].points = {Vec2(0, i), Vec2(1, i + 0.5), Vec2(2, i)};
    std::ostringstream os;
    write_svg(os, paths);
    const std::string s = os.str();
    CHECK(s.rfind("<?xml", 0) == 0);
    CHECK(count(s, "<polyline") == 3);
    CHECK(count(s, "<svg") == 1);
    CHECK(count(s, "</svg>") == 1);
    CHECK(svg_projection_from_string("xz") == SvgProjection::xz);
    CHECK_THROWS_AS(svg_projection_from_string("top"), ConfigError);
}

TEST_CASE("JSON reports") {
    const Json c = to_json(classify_gmc_umbilic({1, 2, 1, 0}));
    CHECK(c["gmc_type"] == "G1");
    CHECK(c["delta_G"].get<double>() == doctest::Approx(81.0));
    const MongeJet4 j = jet4_from_json(Json::parse(R"({"k":1,"d":1,"A":4})"));
    CHECK(j.A == 4.0);
    CHECK(j.a == 0.0);
    const Json p = to_json(classify_parabolic_point(j));
    CHECK(p["class"] == "folded_saddle");
}
