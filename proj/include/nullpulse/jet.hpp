#ifndef NULLPULSE_JET_HPP
#define NULLPULSE_JET_HPP

#include <array>
#include <cassert>
#include <cmath>

#include "nullpulse/errors.hpp"

namespace nullpulse {

/// Bivariate truncated Taylor expansion in the two null coordinates (u, ubar)
/// around a base point, kept to total degree 4.  Coefficients are stored as
/// c[a][b] = (d/du)^a (d/dubar)^b f / (a! b!).  Arithmetic propagates the jet,
/// so exact mixed partials of composite expressions fall out of the top entries.
/// Used by analytic oracles in tests and by the vector field identity checks.
class Jet2 {
public:
    static constexpr int MaxOrder = 4;

    Jet2() : order_(MaxOrder) { c_.fill(0.0); }

    /// Constant jet.
    explicit Jet2(double value) : Jet2() { at(0, 0) = value; }

    /// Jet of the coordinate function u at base point u0.
    static Jet2 coord_u(double u0) {
        Jet2 j(u0);
        j.at(1, 0) = 1.0;
        return j;
    }

    /// Jet of the coordinate function ubar at base point ubar0.
    static Jet2 coord_ubar(double ub0) {
        Jet2 j(ub0);
        j.at(0, 1) = 1.0;
        return j;
    }

    /// Degree through which the stored coefficients are trustworthy.
    int order() const { return order_; }

    double value() const { return at(0, 0); }

    /// Mixed partial d^a_u d^b_ubar f at the base point.
    double partial(int a, int b) const {
        assert(a >= 0 && b >= 0 && a + b <= order_);
        return at(a, b) * factorial(a) * factorial(b);
    }

    double& at(int a, int b) { return c_[idx(a, b)]; }
    double at(int a, int b) const { return c_[idx(a, b)]; }

    Jet2 operator-() const {
        Jet2 r = *this;
        for (double& v : r.c_) v = -v;
        return r;
    }

    Jet2& operator+=(const Jet2& o) {
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
        order_ = std::min(order_, o.order_);
        return *this;
    }
    Jet2& operator-=(const Jet2& o) {
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
        order_ = std::min(order_, o.order_);
        return *this;
    }
    Jet2& operator*=(double s) {
        for (double& v : c_) v *= s;
        return *this;
    }

    friend Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
    friend Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
    friend Jet2 operator*(Jet2 a, double s) { return a *= s; }
    friend Jet2 operator*(double s, Jet2 a) { return a *= s; }
    friend Jet2 operator+(Jet2 a, double s) { a.at(0, 0) += s; return a; }
    friend Jet2 operator+(double s, Jet2 a) { a.at(0, 0) += s; return a; }
    friend Jet2 operator-(Jet2 a, double s) { a.at(0, 0) -= s; return a; }
    friend Jet2 operator-(double s, const Jet2& a) { return (-a) + s; }

    /// Truncated product.  Coefficients of total degree up to the smaller of
    /// the two operand orders remain exact.
    friend Jet2 operator*(const Jet2& x, const Jet2& y) {
        Jet2 r(0.0);
        r.order_ = std::min(x.order_, y.order_);
        for (int a1 = 0; a1 <= MaxOrder; ++a1)
            for (int b1 = 0; a1 + b1 <= MaxOrder; ++b1) {
                const double xv = x.at(a1, b1);
                if (xv == 0.0) continue;
                for (int a2 = 0; a1 + b1 + a2 <= MaxOrder; ++a2)
                    for (int b2 = 0; a1 + b1 + a2 + b2 <= MaxOrder; ++b2)
                        r.at(a1 + a2, b1 + b2) += xv * y.at(a2, b2);
            }
        return r;
    }

    /// Partial derivative in u; the top total degree of the result is unknown,
    /// so the valid order drops by one.
    Jet2 d_u() const {
        Jet2 r(0.0);
        r.order_ = order_ - 1;
        for (int a = 1; a <= MaxOrder; ++a)
            for (int b = 0; a + b <= MaxOrder; ++b)
                r.at(a - 1, b) = at(a, b) * a;
        return r;
    }

    /// Partial derivative in ubar.
    Jet2 d_ubar() const {
        Jet2 r(0.0);
        r.order_ = order_ - 1;
        for (int a = 0; a <= MaxOrder; ++a)
            for (int b = 1; a + b <= MaxOrder; ++b)
                r.at(a, b - 1) = at(a, b) * b;
        return r;
    }

    /// exp(f) through the valid order, via the nilpotent series on f - f(0).
    friend Jet2 exp(const Jet2& f) {
        Jet2 h = f;
        const double f0 = h.value();
        h.at(0, 0) = 0.0;
        Jet2 r(1.0), term(1.0);
        r.order_ = f.order_;
        for (int k = 1; k <= MaxOrder; ++k) {
            term = term * h;
            term *= 1.0 / k;
            r += term;
        }
        r.order_ = f.order_;
        return r * std::exp(f0);
    }

    /// 1/f through the valid order; requires f(0) != 0.
    friend Jet2 inv(const Jet2& f) {
        const double f0 = f.value();
        if (f0 == 0.0) throw input_error("jet reciprocal at a zero of the base value");
        Jet2 h = f * (1.0 / f0);
        h.at(0, 0) = 0.0;   // h = f/f0 - 1
        Jet2 r(1.0), term(1.0);
        for (int k = 1; k <= MaxOrder; ++k) {
            term = term * h;
            r += (k % 2 ? -1.0 : 1.0) * term;
        }
        r.order_ = f.order_;
        return r * (1.0 / f0);
    }

    friend Jet2 pow_int(const Jet2& f, int n) {
        if (n < 0) return inv(pow_int(f, -n));
        Jet2 r(1.0);
        r.order_ = f.order_;
        for (int k = 0; k < n; ++k) r = r * f;
        r.order_ = f.order_;
        return r;
    }

private:
    // Triangular packing of (a, b) with a + b <= MaxOrder.
    static int idx(int a, int b) {
        assert(a >= 0 && b >= 0 && a + b <= MaxOrder);
        const int d = a + b;
        return d * (d + 1) / 2 + b;
    }
    static double factorial(int n) {
        double r = 1.0;
        for (int k = 2; k <= n; ++k) r *= k;
        return r;
    }

    std::array<double, (MaxOrder + 1) * (MaxOrder + 2) / 2> c_;
    int order_;
};

/// Jet of t = u + ubar at a base point.
inline Jet2 jet_t(double u0, double ub0) { return Jet2::coord_u(u0) + Jet2::coord_ubar(ub0); }

/// Jet of r = ubar - u at a base point.
inline Jet2 jet_r(double u0, double ub0) { return Jet2::coord_ubar(ub0) - Jet2::coord_u(u0); }

} // namespace nullpulse

#endif
