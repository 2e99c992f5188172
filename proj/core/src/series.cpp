#include "gmc/series.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gmc/common.hpp"

namespace gmc {

Poly2::Poly2(int degree) : degree_(degree) {
    if (degree < 0) throw ConfigError("Poly2: negative degree");
    c_.assign(static_cast<std::size_t>((degree + 1) * (degree + 1)), 0.0);
}

Poly2 Poly2::constant(double c, int degree) {
    Poly2 p(degree);
    p.set(0, 0, c);
    return p;
}

Poly2 Poly2::x(int degree) {
    Poly2 p(degree);
    if (degree >= 1) p.set(1, 0, 1.0);
    return p;
}

Poly2 Poly2::y(int degree) {
    Poly2 p(degree);
    if (degree >= 1) p.set(0, 1, 1.0);
    return p;
}

double Poly2::coeff(int i, int j) const {
    if (i < 0 || j < 0 || i + j > degree_) return 0.0;
    return c_[static_cast<std::size_t>(index(i, j))];
}

void Poly2::set(int i, int j, double value) {
    if (i < 0 || j < 0 || i + j > degree_) {
        if (value == 0.0) return;
        throw ConfigError("Poly2::set: monomial exceeds truncation degree");
    }
    c_[static_cast<std::size_t>(index(i, j))] = value;
}

void Poly2::add(int i, int j, double value) {
    if (i < 0 || j < 0 || i + j > degree_) return;
    c_[static_cast<std::size_t>(index(i, j))] += value;
}

double Poly2::eval(double x, double y) const {
    // Horner in x of polynomials in y.
    double result = 0.0;
    for (int i = degree_; i >= 0; --i) {
        double row = 0.0;
        for (int j = degree_ - i; j >= 0; --j) row = row * y + coeff(i, j);
        result = result * x + row;
    }
    return result;
}

namespace {
double falling(int n, int k) {
    double r = 1.0;
    for (int t = 0; t < k; ++t) r *= static_cast<double>(n - t);
    return r;
}
}  // namespace

double Poly2::partial(int di, int dj, double x, double y) const {
    double result = 0.0;
    for (int i = di; i <= degree_; ++i) {
        const double xp = std::pow(x, i - di);
        for (int j = dj; i + j <= degree_; ++j) {
            const double c = coeff(i, j);
            if (c == 0.0) continue;
            result += c * falling(i, di) * falling(j, dj) * xp * std::pow(y, j - dj);
        }
    }
    return result;
}

Poly2 Poly2::dx() const {
    Poly2 r(degree_);
    for (int i = 1; i <= degree_; ++i)
        for (int j = 0; i + j <= degree_; ++j) r.set(i - 1, j, i * coeff(i, j));
    return r;
}

Poly2 Poly2::dy() const {
    Poly2 r(degree_);
    for (int i = 0; i <= degree_; ++i)
        for (int j = 1; i + j <= degree_; ++j) r.set(i, j - 1, j * coeff(i, j));
    return r;
}

Poly2 Poly2::truncated(int degree) const {
    Poly2 r(degree);
    for (int i = 0; i <= std::min(degree, degree_); ++i)
        for (int j = 0; i + j <= std::min(degree, degree_); ++j) r.set(i, j, coeff(i, j));
    return r;
}

Poly2 Poly2::homogeneous(int d) const {
    Poly2 r(degree_);
    for (int i = 0; i <= d; ++i) r.set(i, d - i, coeff(i, d - i));
    return r;
}

Poly2 operator+(Poly2 a, double s) {
    a.add(0, 0, s);
    return a;
}

Poly2& Poly2::operator+=(const Poly2& o) {
    const int d = std::min(degree_, o.degree_);
    Poly2 r = truncated(d);
    for (int i = 0; i <= d; ++i)
        for (int j = 0; i + j <= d; ++j) r.add(i, j, o.coeff(i, j));
    *this = std::move(r);
    return *this;
}

Poly2& Poly2::operator-=(const Poly2& o) {
    const int d = std::min(degree_, o.degree_);
    Poly2 r = truncated(d);
    for (int i = 0; i <= d; ++i)
        for (int j = 0; i + j <= d; ++j) r.add(i, j, -o.coeff(i, j));
    *this = std::move(r);
    return *this;
}

Poly2& Poly2::operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
}

Poly2 operator*(const Poly2& a, const Poly2& b) {
    const int d = std::min(a.degree_, b.degree_);
    Poly2 r(d);
    for (int i = 0; i <= d; ++i)
        for (int j = 0; i + j <= d; ++j) {
            const double ca = a.coeff(i, j);
            if (ca == 0.0) continue;
            for (int k = 0; i + k <= d; ++k)
                for (int l = 0; i + j + k + l <= d; ++l) r.add(i + k, j + l, ca * b.coeff(k, l));
        }
    return r;
}

Poly2 Poly2::compose(const Poly2& p, const Poly2& q) const {
    const int d = std::min({degree_, p.degree_, q.degree_});
    // Powers of q, reused for every row.
    std::vector<Poly2> qpow;
    qpow.reserve(static_cast<std::size_t>(d + 1));
    qpow.push_back(Poly2::constant(1.0, d));
    for (int j = 1; j <= d; ++j) qpow.push_back(qpow.back() * q.truncated(d));
    Poly2 result(d);
    Poly2 ppow = Poly2::constant(1.0, d);
    for (int i = 0; i <= degree_; ++i) {
        Poly2 row(d);
        bool any = false;
        for (int j = 0; i + j <= degree_; ++j) {
            const double c = coeff(i, j);
            if (c == 0.0) continue;
            if (j > d) {
                // Only matters when q has a constant term; extend the power table.
                while (static_cast<int>(qpow.size()) <= j) qpow.push_back(qpow.back() * q.truncated(d));
            }
            row += c * qpow[static_cast<std::size_t>(j)];
            any = true;
        }
        if (any) result += ppow * row;
        ppow = ppow * p.truncated(d);
    }
    return result;
}

Poly2 Poly2::shifted(double x0, double y0) const {
    Poly2 r(degree_);
    for (int i = 0; i <= degree_; ++i)
        for (int j = 0; i + j <= degree_; ++j) {
            // coefficient of X^i Y^j = partial(i,j)/(i! j!)
            double fi = 1.0, fj = 1.0;
            for (int t = 2; t <= i; ++t) fi *= t;
            for (int t = 2; t <= j; ++t) fj *= t;
            r.set(i, j, partial(i, j, x0, y0) / (fi * fj));
        }
    return r;
}

Poly2 Poly2::rotated(double angle) const {
    const double c = std::cos(angle), s = std::sin(angle);
    Poly2 X(degree_), Y(degree_);
    if (degree_ >= 1) {
        X.set(1, 0, c);
        X.set(0, 1, -s);
        Y.set(1, 0, s);
        Y.set(0, 1, c);
    }
    return compose(X, Y);
}

Poly2 Poly2::reciprocal() const {
    const double c0 = coeff(0, 0);
    if (c0 == 0.0) throw ConsistencyError("Poly2::reciprocal: zero constant term");
    Poly2 r = (*this) * (1.0 / c0) - 1.0;  // this = c0 (1 + r)
    Poly2 term = Poly2::constant(1.0, degree_);
    Poly2 sum = Poly2::constant(1.0, degree_);
    for (int k = 1; k <= degree_; ++k) {
        term = term * r * -1.0;
        sum += term;
    }
    return sum * (1.0 / c0);
}

Poly2 Poly2::pow(double alpha) const {
    const double c0 = coeff(0, 0);
    if (!(c0 > 0.0)) throw ConsistencyError("Poly2::pow: constant term must be positive");
    Poly2 r = (*this) * (1.0 / c0) - 1.0;
    Poly2 term = Poly2::constant(1.0, degree_);
    Poly2 sum = Poly2::constant(1.0, degree_);
    double binom = 1.0;
    for (int k = 1; k <= degree_; ++k) {
        binom *= (alpha - (k - 1)) / k;
        term = term * r;
        sum += binom * term;
    }
    return sum * std::pow(c0, alpha);
}

double Poly2::max_abs_coeff() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
}

std::string Poly2::to_string(double drop_below) const {
    std::ostringstream os;
    os.precision(10);
    bool first = true;
    for (int d = 0; d <= degree_; ++d)
        for (int i = d; i >= 0; --i) {
            const int j = d - i;
            const double c = coeff(i, j);
            if (std::abs(c) <= drop_below) continue;
            if (!first) os << (c < 0 ? " - " : " + ");
            else if (c < 0) os << "-";
            first = false;
            os << std::abs(c);
            if (i > 0) os << " x" << (i > 1 ? "^" + std::to_string(i) : "");
            if (j > 0) os << " y" << (j > 1 ? "^" + std::to_string(j) : "");
        }
    if (first) os << "0";
    return os.str();
}

}  // namespace gmc
