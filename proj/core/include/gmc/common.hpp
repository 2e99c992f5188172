#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace gmc {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// Point in chart coordinates (u, v).
struct ChartPoint {
    double u = 0.0;
    double v = 0.0;
};

/// Classification thresholds shared by every module. Nothing downstream
/// hard-codes a tolerance; all of it flows from here.
struct ToleranceConfig {
    double parabolic = 1e-10;      ///< eps_K: |K| below this counts as parabolic
    double umbilic = 1e-8;         ///< eps_u: relative k2 - k1 threshold
    double regularity = 1e-8;      ///< eps_reg: minimum |grad K| on the parabolic curve
    double jet_boundary = 1e-9;    ///< relative width of the non-generic jet strata
};

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual const char* kind() const noexcept { return "error"; }
};

#define GMC_DECLARE_ERROR(Name, tag)                                      \
    class Name : public Error {                                           \
    public:                                                               \
        explicit Name(const std::string& what) : Error(what) {}           \
        const char* kind() const noexcept override { return tag; }        \
    };

GMC_DECLARE_ERROR(DomainError, "domain")
GMC_DECLARE_ERROR(ConsistencyError, "consistency")
GMC_DECLARE_ERROR(HyperbolicRegionError, "hyperbolic_region")
GMC_DECLARE_ERROR(UmbilicPointError, "umbilic_point")
GMC_DECLARE_ERROR(ParabolicPointError, "parabolic_point")
GMC_DECLARE_ERROR(OrientationError, "orientation")
GMC_DECLARE_ERROR(ConvergenceError, "convergence")
GMC_DECLARE_ERROR(RegularityError, "regularity")
GMC_DECLARE_ERROR(TraceError, "trace")
GMC_DECLARE_ERROR(ConfigError, "config")

#undef GMC_DECLARE_ERROR

}  // namespace gmc
