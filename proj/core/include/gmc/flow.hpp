#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gmc/bde.hpp"
#include "gmc/common.hpp"
#include "gmc/surface.hpp"

namespace gmc {

struct TraceConfig {
    double step_target = 0.02;   ///< largest arclength step
    double max_arclength = 10.0;
    double stop_K = 1e-10;       ///< stop once K drops below this
    double stop_umbilic = 1e-7;  ///< stop once (k2 - k1)/(|k1| + |k2|) drops below this
    double closure_tol = 1e-3;
    double rel_tol = 1e-10;      ///< integrator tolerance per unit arclength
    bool integrand = true;       ///< carry the transition integrand along (needs one AD pass per stage)
    bool detect_closure = true;
};

enum class TraceEnd {
    max_arclength,
    domain_exit,
    parabolic,            ///< K fell below stop_K (or the field ceased to exist ahead)
    tangential_parabolic,  ///< trace_extended: arrival tangent to the parabolic curve
    umbilic,
    closed,
    section,              ///< a user stop function changed sign
    max_switches,
};
const char* to_string(TraceEnd e);

enum class EventKind { branch_switch, tangential_reflection, section_crossing };
const char* to_string(EventKind e);

struct TraceEvent {
    EventKind kind;
    std::size_t index;  ///< sample index at which the event happened
    ChartPoint p;
};

struct Sample {
    ChartPoint p;
    double s = 0.0;     ///< arclength
    Vec2 t;             ///< chart components of the unit tangent
    Vec3 T, NT, N;      ///< Darboux frame
    CurvatureData cd;
    double tau_g = 0.0;
    double k_g = 0.0;
    double k_n = 0.0;
    double integrand = 0.0;   ///< [sqrt K]_v/(2 tau_g) + (k_g/tau_g)(H - sqrt K)
    double cumulative = 0.0;  ///< integral of the integrand from the first sample
    Branch branch = Branch::minimal;
};

struct Polyline {
    std::vector<Sample> samples;
    std::vector<TraceEvent> events;
    TraceEnd end = TraceEnd::max_arclength;
    bool closed = false;
    double length() const { return samples.empty() ? 0.0 : samples.back().s - samples.front().s; }
};

/// Darboux frame data of a unit chart tangent t along the GMC field of `branch`.
struct FrameQuantities {
    Vec3 T, NT, N;
    double k_g = 0.0, tau_g = 0.0, k_n = 0.0;
};

/// Optional extra stop: the trace ends where fn changes sign (refined).
struct SectionStop {
    std::function<double(const ChartPoint&)> fn;
    bool stop = true;   ///< false: record a section_crossing event and continue
    double after = 0.0;  ///< crossings before this arclength are ignored
};

Polyline trace_gmc_line(const SurfaceChart& chart, const ChartPoint& seed, Branch branch, const TraceConfig& cfg = {},
                        const ToleranceConfig& tol = {}, std::optional<Vec2> initial_direction = std::nullopt,
                        const SectionStop* section = nullptr);

struct ExtendedOptions {
    /// Also continue through tangential arrivals (the torus circles), keeping the
    /// sense of travel. Off by default: such arrivals end the trace.
    bool reflect_tangential = false;
    int max_switches = 64;
    double tangential_angle = 0.1;  ///< arrival angles below this count as tangential
};

Polyline trace_extended(const SurfaceChart& chart, const ChartPoint& seed, Branch branch, const TraceConfig& cfg = {},
                        const ExtendedOptions& ext = {}, const ToleranceConfig& tol = {},
                        std::optional<Vec2> initial_direction = std::nullopt, const SectionStop* section = nullptr);

/// Unit chart tangent of the branch at p, sign chosen by `reference` (or du >= 0).
Vec2 gmc_field(const SurfaceChart& chart, const ChartPoint& p, Branch branch,
               std::optional<Vec2> reference = std::nullopt);

/// Frame and curvatures along the integral curve of the branch field through p.
FrameQuantities frame_quantities(const SurfaceChart& chart, const ChartPoint& p, Branch branch, const Vec2& tangent);

/// Directional derivative of sqrt K along the unit chart direction `conormal`.
double sqrtK_conormal_derivative(const SurfaceChart& chart, const ChartPoint& p, const Vec2& conormal,
                                 const ToleranceConfig& tol = {});

struct TransitionReport {
    double ln_derivative_integral = 0.0;
    double ln_derivative_numeric = 0.0;
    double ln_boundary_factor = 0.0;  ///< -1/2 ln(tau_g(s1)/tau_g(s0))
    double integral = 0.0;            ///< the exp[...] exponent alone
    double agreement = 0.0;           ///< |numeric - integral| / max(1, |integral|)
    double richardson_ratio = 0.0;
    double offset = 0.0;
};

/// Samples [i0, i1] of one GMC trace (no branch switches inside).
struct ArcRef {
    const Polyline* line = nullptr;
    std::size_t i0 = 0, i1 = 0;
};

/// ln(dv/dv0) from the integral formula over the arc: boundary factor plus the
/// carried integral of the integrand.
double transition_derivative_integral(const ArcRef& arc, TransitionReport* detail = nullptr);

/// ln(dv/dv0) by a central difference: geodesic sections along N^T at both
/// ends, neighbouring traces launched at section parameters +-offset.
double transition_derivative_numeric(const SurfaceChart& chart, const ArcRef& arc, double offset,
                                     const TraceConfig& cfg = {}, const ToleranceConfig& tol = {});

/// Both methods plus the Richardson ratio of the numeric derivative at
/// offsets h, h/2, h/4.
TransitionReport transition_report(const SurfaceChart& chart, const ArcRef& arc, double offset,
                                   const TraceConfig& cfg = {}, const ToleranceConfig& tol = {});

struct CycleReport {
    double length = 0.0;
    double ln_return_integral = 0.0;
    double ln_return_numeric = 0.0;
    bool hyperbolic = false;
    bool conclusive = true;
    std::string note;
};

CycleReport cycle_hyperbolicity(const SurfaceChart& chart, const Polyline& closed, double threshold = 1e-6,
                                double offset = 1e-3, const TraceConfig& cfg = {}, const ToleranceConfig& tol = {});

/// Composite Simpson rule on non-uniform nodes (trapezoid on a final odd interval).
double integrate_samples(const std::vector<double>& s, const std::vector<double>& f);

/// Geodesic c(v) through p with unit initial chart velocity dir, sampled on
/// [-vmax, vmax] and interpolated by cubic Hermite pieces.
class GeodesicSection {
public:
    GeodesicSection(const SurfaceChart& chart, const ChartPoint& p, const Vec2& dir, double vmax, int n = 400);
    ChartPoint at(double v) const;
    Vec2 velocity(double v) const;
    double vmax() const { return vmax_; }
    /// Parameter of the point of the section nearest to q (chart metric) and the
    /// signed offset of q to the left of the section.
    std::pair<double, double> project(const ChartPoint& q) const;

private:
    double vmax_, dv_;
    std::vector<Vec2> x_, xd_;
};

/// Separatrix search around an isolated singular point: traces launched
/// inwards from a circle of radius `radius` and sorted by outcome.
struct ShootingResult {
    Branch branch;
    std::vector<double> separatrix_angles;  ///< launch angles on the circle
    int samples = 0;
};

ShootingResult shoot_separatrices(const SurfaceChart& chart, const ChartPoint& center, Branch branch, double radius,
                                  int samples = 360, double angle_tol = 1e-4, const ToleranceConfig& tol = {});

}  // namespace gmc
