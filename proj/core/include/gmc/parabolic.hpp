#pragma once

#include <string>
#include <vector>

#include "gmc/bde.hpp"
#include "gmc/common.hpp"
#include "gmc/jets.hpp"
#include "gmc/series.hpp"
#include "gmc/surface.hpp"

namespace gmc {

enum class Tangency { transversal, tangential };
enum class ParabolicClass { cuspidal, folded_saddle, folded_node, degenerate };
const char* to_string(Tangency t);
const char* to_string(ParabolicClass c);

struct ParabolicPointInfo {
    bool regularity = false;
    Tangency tangency = Tangency::transversal;
    double sigma = 0.0;  ///< dk(Ak - 3d^2)
    ParabolicClass cls = ParabolicClass::degenerate;
    double center_coefficient = 0.0;  ///< -4(Ak - 3d^2)^3/(k d^3), tangential case only
};

/// Printed quadratic Taylor table of K for a parabolic jet.
Poly2 gaussian_expansion(const MongeJet4& jet);

struct QuarticExpansion {
    Poly2 A40, A31, A22, A13, A04;
};

/// Printed degree-3 expansions of the quartic coefficients.
QuarticExpansion quartic_expansion(const MongeJet4& jet);

/// Exact degree-`order` Taylor tables of the quartic coefficients of a graph.
QuarticExpansion quartic_series(const Poly2& h, int order);

ParabolicPointInfo classify_parabolic_point(const MongeJet4& jet, const ToleranceConfig& tol = {});

/// Reduced Lie-Cartan field (x', p') on {H = 0} near a tangential point.
struct LieCartanParabolicField {
    Eigen::Matrix2d linearization;
    Vec2 eigenvalues;            ///< sorted by absolute value: {~0, dk}
    Vec2 center_eigenvector;     ///< normalized so its x component is 1
    Vec2 strong_eigenvector;     ///< normalized so its p component is 1
    double center_coefficient_numeric = 0.0;
    double center_coefficient_formula = 0.0;
    struct Sample {
        double x, p, dx, dp;
    };
    std::vector<Sample> center_samples;  ///< field along the computed center manifold
};

/// Evaluates H(x, y, p) = A04 p^4 + A13 p^3 + A22 p^2 + A31 p + A40 (p = dy/dx)
/// from numeric fundamental forms and solves H = 0 for y(x, p).
class ParabolicLift {
public:
    explicit ParabolicLift(const MongeJet4& jet);
    /// (H, H_x, H_y, H_p) at a point.
    Eigen::Vector4d eval(double x, double y, double p) const;
    double solve_y(double x, double p) const;
    /// Reduced field (x', p') with y = y(x, p).
    Vec2 field(double x, double p) const;

private:
    MongeJet4 jet_;
    SurfaceChart chart_;
};

LieCartanParabolicField lie_cartan_parabolic_field(const MongeJet4& jet, const ToleranceConfig& tol = {});

/// Re-expand a Monge chart at a parabolic point into the reduced 4-jet
/// (zero principal direction along x, d >= 0).
MongeJet4 reduce_to_parabolic_jet(const SurfaceChart& chart, const ChartPoint& p, const ToleranceConfig& tol = {});

struct ParabolicPolyline {
    std::vector<ChartPoint> points;
    bool closed = false;
};

struct ParabolicTraceOptions {
    int grid = 48;              ///< seed grid resolution per axis
    double chord_error = 1e-6;  ///< target chord error in chart units
    double max_step = 0.05;
    int max_vertices = 200000;
};

std::vector<ParabolicPolyline> parabolic_curve_trace(const SurfaceChart& chart, const Domain& domain,
                                                     const ToleranceConfig& tol = {},
                                                     const ParabolicTraceOptions& opt = {});

struct TangentialPoint {
    ChartPoint p;
    bool classified = false;  ///< only Monge charts can be re-expanded to a 4-jet
    MongeJet4 jet;
    ParabolicPointInfo info;
};

std::vector<TangentialPoint> find_tangential_points(const SurfaceChart& chart, const ParabolicPolyline& line,
                                                    const ToleranceConfig& tol = {});

/// One coefficient of a printed expansion compared with the exact series.
struct ExpansionDiscrepancy {
    std::string table;  ///< e.g. "G" or "A13"
    int i = 0, j = 0;   ///< monomial x^i y^j
    double printed = 0.0;
    double exact = 0.0;
    std::string note;
};

/// Compare the printed form and quartic expansions against exact series for
/// one jet; only coefficients that differ beyond `tol` are returned.
std::vector<ExpansionDiscrepancy> expansion_discrepancies(const MongeJet4& jet, double tol = 1e-10);

}  // namespace gmc
