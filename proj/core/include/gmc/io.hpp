#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gmc/flow.hpp"
#include "gmc/models.hpp"
#include "gmc/parabolic.hpp"
#include "gmc/surface.hpp"
#include "gmc/umbilic.hpp"

namespace gmc {

using Json = nlohmann::ordered_json;

/// {"kind": "torus", "r", "R"}, {"kind": "monge", "coeffs": [[i, j, c], ...]},
/// {"kind": "ellipsoid", "a", "b", "c", "signs"} or {"kind": "ellipsoid_angular", "a", "b", "c"};
/// optional "orientation": +-1 and, for monge, "domain": [u0, u1, v0, v1].
SurfaceChart chart_from_json(const Json& j);
Json chart_to_json(const SurfaceChart& chart);

ToleranceConfig tolerances_from_json(const Json& j, ToleranceConfig base = {});
Json to_json(const ToleranceConfig& t);
TraceConfig trace_config_from_json(const Json& j, TraceConfig base = {});
Json to_json(const TraceConfig& c);

/// Shortest decimal form that round-trips is not enough for diffing; this
/// always prints 17 significant digits, '.' decimal, independent of locale.
std::string format_double(double x);

/// Column names of the trace CSV.
const std::vector<std::string>& trace_csv_columns();
void write_trace_csv(std::ostream& os, const SurfaceChart& chart, const Polyline& line);

void write_points_csv(std::ostream& os, const std::vector<ChartPoint>& pts);

enum class SvgProjection { chart, xy, xz, yz };
SvgProjection svg_projection_from_string(const std::string& s);

struct SvgPath {
    std::vector<Vec2> points;
    std::string stroke = "#1f4e79";
};

/// One <polyline> per path, scaled to fit a square canvas.
void write_svg(std::ostream& os, const std::vector<SvgPath>& paths, double size = 800.0);

/// Project a trace according to the requested view.
SvgPath project(const SurfaceChart& chart, const Polyline& line, SvgProjection proj);
SvgPath project(const SurfaceChart& chart, const std::vector<ChartPoint>& pts, SvgProjection proj);

Json to_json(const UmbilicClassification& c);
Json to_json(const MongeJet3& j);
Json to_json(const MongeJet4& j);
Json to_json(const ParabolicPointInfo& p);
Json to_json(const LieCartanParabolicField& f);
Json to_json(const TransitionReport& r);
Json to_json(const CycleReport& r);
Json to_json(const TorusRho& t);
Json to_json(const EllipsoidData& d);
Json to_json(const ReturnMapReport& r);
Json to_json(const std::vector<Convergent>& cf);
Json to_json(const RationalApprox& r);

MongeJet3 jet3_from_json(const Json& j);
MongeJet4 jet4_from_json(const Json& j);

}  // namespace gmc
