#pragma once

#include <string>
#include <vector>

namespace gmc {

/// Bivariate polynomial in (x, y) truncated at total degree `degree()`.
///
/// Serves two roles: exact polynomials (Monge graph heights, where the
/// truncation degree is simply the polynomial degree) and truncated Taylor
/// series (series reversion, Taylor tables of the fundamental forms). Products
/// and compositions truncate at the smaller operand degree, which is the
/// correct rule for series and harmless for exact polynomials sized to fit.
class Poly2 {
public:
    Poly2() : Poly2(0) {}
    explicit Poly2(int degree);

    static Poly2 constant(double c, int degree);
    static Poly2 x(int degree);
    static Poly2 y(int degree);

    int degree() const { return degree_; }

    /// Coefficient of x^i y^j (zero when i + j exceeds the degree).
    double coeff(int i, int j) const;
    void set(int i, int j, double value);
    void add(int i, int j, double value);

    double operator()(double x, double y) const { return eval(x, y); }
    double eval(double x, double y) const;

    /// Value of d^i/dx^i d^j/dy^j at (x, y), exact for polynomials.
    double partial(int i, int j, double x, double y) const;

    Poly2 dx() const;
    Poly2 dy() const;

    /// Truncate (or extend with zeros) to a new degree.
    Poly2 truncated(int degree) const;

    /// Homogeneous part of total degree d, as a polynomial of the same degree.
    Poly2 homogeneous(int d) const;

    /// Substitute x -> p, y -> q; truncates at min(degree(), p, q degrees).
    Poly2 compose(const Poly2& p, const Poly2& q) const;

    /// Exact re-expansion about (x0, y0): result(X, Y) = this(x0 + X, y0 + Y).
    Poly2 shifted(double x0, double y0) const;

    /// result(x, y) = this(cos t x - sin t y, sin t x + cos t y).
    Poly2 rotated(double angle) const;

    /// Series 1/p; requires a nonzero constant term.
    Poly2 reciprocal() const;
    /// Series p^alpha; requires a positive constant term.
    Poly2 pow(double alpha) const;

    double max_abs_coeff() const;

    Poly2& operator+=(const Poly2& o);
    Poly2& operator-=(const Poly2& o);
    Poly2& operator*=(double s);

    friend Poly2 operator+(Poly2 a, const Poly2& b) { return a += b; }
    friend Poly2 operator-(Poly2 a, const Poly2& b) { return a -= b; }
    friend Poly2 operator-(Poly2 a) { return a *= -1.0; }
    friend Poly2 operator*(Poly2 a, double s) { return a *= s; }
    friend Poly2 operator*(double s, Poly2 a) { return a *= s; }
    friend Poly2 operator+(Poly2 a, double s);
    friend Poly2 operator+(double s, Poly2 a) { return a + s; }
    friend Poly2 operator-(Poly2 a, double s) { return a + (-s); }
    friend Poly2 operator-(double s, const Poly2& a) { return (-a) + s; }
    friend Poly2 operator*(const Poly2& a, const Poly2& b);

    /// Human-readable "c x^i y^j + ..." listing, used by discrepancy logs.
    std::string to_string(double drop_below = 0.0) const;

private:
    int index(int i, int j) const { return i * (degree_ + 1) + j; }
    int degree_;
    std::vector<double> c_;
};

}  // namespace gmc
