#pragma once

#include <vector>

#include "gmc/bde.hpp"
#include "gmc/common.hpp"
#include "gmc/jets.hpp"
#include "gmc/surface.hpp"

namespace gmc {

enum class GmcType { G1, G2, G3, degenerate };
enum class PrincipalType { D1, D2, D3, degenerate };
const char* to_string(GmcType t);
const char* to_string(PrincipalType t);

enum class EquilibriumKind { saddle, node, nonhyperbolic };
const char* to_string(EquilibriumKind k);

/// Equilibrium of the Lie-Cartan lift on the exceptional fiber over the umbilic.
struct LieCartanEquilibrium {
    Vec2 direction;        ///< unit (dx, dy) on the fiber; never an unbounded slope
    bool slope_chart = true;  ///< true: coordinate is p = dy/dx; false: q = dx/dy
    double coordinate = 0.0;
    double eigen1 = 0.0;   ///< transverse to the fiber
    double eigen2 = 0.0;   ///< along the fiber
    EquilibriumKind kind = EquilibriumKind::nonhyperbolic;
};

struct UmbilicClassification {
    GmcType gmc_type = GmcType::degenerate;
    PrincipalType principal_type = PrincipalType::degenerate;
    double delta_G = 0.0;
    double delta_P = 0.0;
    bool transversality_Tg = false;
    bool transversality_T = false;
    int separatrix_count = 0;
    std::vector<LieCartanEquilibrium> equilibria;
};

double delta_G(const MongeJet3& j);
double delta_P(const MongeJet3& j);

/// Re-expand the surface over its tangent plane at an umbilic and rotate the
/// axes to kill the x^2 y coefficient.
MongeJet3 reduce_to_monge_jet(const SurfaceChart& chart, const ChartPoint& p, const ToleranceConfig& tol = {});

/// Same reduction applied directly to a height polynomial with isotropic
/// quadratic part at the origin.
MongeJet3 reduce_height(const Poly2& h);

/// Newton search for an umbilic near `guess`: zero of the traceless shape
/// operator written in an orthonormal tangent frame.
ChartPoint locate_umbilic(const SurfaceChart& chart, const ChartPoint& guess, const ToleranceConfig& tol = {});

UmbilicClassification classify_gmc_umbilic(const MongeJet3& jet, const ToleranceConfig& tol = {});

/// Linear parts of the GMC equation at an umbilic, scaled as
/// [(b-a)x + cy] dy^2 + 4by dx dy - [(b-a)x + cy] dx^2.
QuadraticCoeffs umbilic_first_jet_bde(const MongeJet3& jet, double x, double y);

std::vector<LieCartanEquilibrium> lie_cartan_equilibria(const MongeJet3& jet, const ToleranceConfig& tol = {});

}  // namespace gmc
