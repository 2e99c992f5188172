#pragma once

#include <array>
#include <functional>
#include <vector>

#include "gmc/bde.hpp"
#include "gmc/common.hpp"
#include "gmc/flow.hpp"
#include "gmc/surface.hpp"
#include "gmc/umbilic.hpp"

namespace gmc {

enum class QuadratureScheme { tanh_sinh, substitution_gauss };
const char* to_string(QuadratureScheme s);

struct QuadratureConfig {
    QuadratureScheme scheme = QuadratureScheme::tanh_sinh;
    double tolerance = 1e-15;      ///< tanh-sinh termination
    int max_refinements = 15;
    int gauss_panels = 24;         ///< composite panels per piece (substitution scheme)
    /// Fraction of the interval, at each end, that is split off and treated as
    /// the singular piece. Results must not depend on it.
    double endpoint_fraction = 0.25;
};

/// Integrand on [a, b] that also receives the exact distances x - a and b - x,
/// so factors vanishing at an endpoint can be formed without cancellation.
using EndpointIntegrand = std::function<double(double x, double from_a, double to_b)>;

/// Integral of f over [a, b] with integrable power singularities at the ends.
/// `power` is the substitution exponent m (x - a = t^m) used by the Gauss
/// scheme; it must clear the endpoint singularity (2 for x^-1/2, 4 for x^-1/4).
double singular_integral(const EndpointIntegrand& f, double a, double b, int power, const QuadratureConfig& cfg = {});

struct Convergent {
    long long p = 0, q = 1;
};

/// First `count` convergents of the continued fraction of x.
std::vector<Convergent> convergents(double x, int count = 10);

struct RationalApprox {
    long long p = 0, q = 1;
    double distance = 0.0;
};

/// Nearest p/q with q <= max_den.
RationalApprox nearest_rational(double x, int max_den = 64);

// ---------------------------------------------------------------- torus

struct TorusRho {
    double ratio = 0.0;
    double rho_quadrature = 0.0;   ///< 2 ratio^(3/4) * integral over (-pi/2, pi/2)
    double rho_numeric = 0.0;      ///< theta advance of one full traversal and back, over 2 pi
    double normalization = 0.0;    ///< rho_quadrature / rho_numeric
    std::vector<Convergent> continued_fraction;  ///< convergents of rho_numeric
    RationalApprox nearest;                      ///< of rho_numeric, denominator <= 64
};

/// rho_quadrature alone.
double torus_rho(double ratio, const QuadratureConfig& cfg = {});

struct TorusOdeConfig {
    double delta0 = 0.05;   ///< first endpoint cut
    int levels = 7;         ///< cuts delta0 / 2^k, k < levels
    double rel_tol = 1e-13;
    double theta0 = 0.0;
};

/// Theta advance along one meridian interval (-pi/2, pi/2) by the ODE
/// d theta/ds = (r^3/(cos s (R + r cos s)^3))^(1/4), extrapolated to zero cut.
double torus_theta_advance(double r, double R, const TorusOdeConfig& cfg = {});

/// Rotation number from the ODE: twice the advance over 2 pi.
double torus_rho_numeric(double r, double R, const TorusOdeConfig& cfg = {});

TorusRho torus_rotation(double ratio, const QuadratureConfig& qcfg = {}, const TorusOdeConfig& ocfg = {});

struct TorusTraceRho {
    double rho = 0.0;
    double theta_advance = 0.0;
    int reflections = 0;
    double length = 0.0;
};

/// Rotation number read off a billiard trace on the torus: start on s = 0,
/// follow two tangential reflections back to s = 0 and measure theta.
TorusTraceRho torus_rho_trace(double r, double R, Branch branch = Branch::maximal, const TraceConfig& cfg = {},
                              const ToleranceConfig& tol = {});

// ---------------------------------------------------------------- ellipsoid

/// Four umbilics (x0, 0, z0), (-x0, 0, z0), (-x0, 0, -z0), (x0, 0, -z0):
/// counterclockwise on the ellipse y = 0 seen in the (x, z) plane.
std::array<Vec3, 4> ellipsoid_umbilics(double a, double b, double c);

/// Umbilics in ellipsoid_angular coordinates (theta = pi/2), same order.
std::array<ChartPoint, 4> ellipsoid_umbilics_angular(double a, double b, double c);

/// h(x) = (x + a^2)(x + b^2)(x + c^2).
double ellipsoid_h(double a, double b, double c, double x);

struct EllipsoidArcs {
    double S1 = 0.0, S2 = 0.0;
    double rho = 0.0;          ///< S2 / S1
};

EllipsoidArcs ellipsoid_S1_S2(double a, double b, double c, const QuadratureConfig& cfg = {});

struct EllipsoidData {
    double a = 0.0, b = 0.0, c = 0.0;
    std::array<Vec3, 4> umbilics;
    double S1 = 0.0, S2 = 0.0;
    double rho = 0.0;           ///< S2 / S1
    double S1_check = 0.0, S2_check = 0.0;  ///< the other quadrature scheme
    /// Rotation number of the return map on the umbilic ellipse predicted by
    /// the reflection picture: S2 / (S1 + S2) (maximal lines).
    double rho_return = 0.0;
    std::vector<Convergent> continued_fraction;
    RationalApprox nearest;
};

EllipsoidData ellipsoid_data(double a, double b, double c, const QuadratureConfig& cfg = {});

/// Coordinates in which GMC lines are the lines of slope +-1:
/// sigma_i = integral of |t|^(1/4) / sqrt|h(t)| dt from the low end of the range.
class EllipsoidSigma {
public:
    EllipsoidSigma(double a, double b, double c, const QuadratureConfig& cfg = {});
    /// u in [-b^2, -c^2]
    double sigma1(double u) const;
    /// v in [-a^2, -b^2]
    double sigma2(double v) const;
    double S1() const { return S1_; }
    double S2() const { return S2_; }
    /// Position on the umbilic ellipse, in the sigma length, counterclockwise
    /// from (x0, 0, z0); the full ellipse measures 4 (S1 + S2).
    double ellipse_position(double phi) const;
    double perimeter() const { return 4.0 * (S1_ + S2_); }

private:
    double a_, b_, c_;
    QuadratureConfig cfg_;
    double S1_, S2_;
    double integrate(double lo, double hi) const;
};

struct SigmaLineFit {
    double max_deviation = 0.0;  ///< from the best line of slope +-1
    double slope_sign = 0.0;
    std::size_t samples = 0;
};

/// Map a trace on the ellipsoidal (u, v) chart to sigma coordinates and measure
/// its deviation from a line of slope +-1.
SigmaLineFit sigma_line_fit(const EllipsoidSigma& sig, const Polyline& line);

struct ReturnMapReport {
    double rotation_number = 0.0;  ///< mean displacement over the perimeter, in [0, 1)
    double spread = 0.0;           ///< max minus min displacement (perimeter units)
    std::vector<double> seeds;     ///< launch angles phi on the ellipse
    std::vector<double> displacement;
};

/// Return map of the GMC foliation on the umbilic ellipse (section y = 0),
/// traced on the angular chart, measured in the sigma length.
ReturnMapReport ellipsoid_return_map(double a, double b, double c, Branch branch, const std::vector<double>& seeds,
                                     int returns = 1, const TraceConfig& cfg = {}, const ToleranceConfig& tol = {},
                                     const QuadratureConfig& qcfg = {});

}  // namespace gmc
