#pragma once

#include "gmc/series.hpp"

namespace gmc {

/// Reduced Monge 3-jet at an umbilic:
/// h = k/2 (x^2 + y^2) + a/6 x^3 + b/2 x y^2 + c/6 y^3.
struct MongeJet3 {
    double k = 1.0;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

/// Monge 4-jet at a parabolic point:
/// h = k/2 y^2 + a/6 x^3 + b/2 x y^2 + d/2 x^2 y + c/6 y^3
///   + A/24 x^4 + B/6 x^3 y + C/4 x^2 y^2 + D/6 x y^3 + E4/24 y^4.
struct MongeJet4 {
    double k = 1.0;
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
    double A = 0.0, B = 0.0, C = 0.0, D = 0.0, E4 = 0.0;
};

/// Height polynomials (degree 3 and 4 respectively) realizing the jets exactly.
Poly2 monge_height(const MongeJet3& j);
Poly2 monge_height(const MongeJet4& j);

}  // namespace gmc
