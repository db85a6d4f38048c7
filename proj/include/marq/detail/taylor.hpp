#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace marq::detail {

// Truncated power series with double coefficients, fixed maximum order.
// Enough arithmetic (mul/div/sqrt/log, composition, reversion) to expand
// the transformation half*zeta^2 and its relatives around a double root,
// where the closed-form expressions cancel catastrophically.
struct Taylor {
    static constexpr int kOrder = 24; // highest retained power
    std::array<double, kOrder + 1> c{};

    static Taylor constant(double a) {
        Taylor t;
        t.c[0] = a;
        return t;
    }
    // a + b*w
    static Taylor linear(double a, double b) {
        Taylor t;
        t.c[0] = a;
        t.c[1] = b;
        return t;
    }

    double operator[](int k) const { return c[static_cast<std::size_t>(k)]; }
    double& operator[](int k) { return c[static_cast<std::size_t>(k)]; }

    Taylor operator+(const Taylor& o) const {
        Taylor r;
        for (int k = 0; k <= kOrder; ++k) r[k] = c[k] + o[k];
        return r;
    }
    Taylor operator-(const Taylor& o) const {
        Taylor r;
        for (int k = 0; k <= kOrder; ++k) r[k] = c[k] - o[k];
        return r;
    }
    Taylor operator*(double s) const {
        Taylor r;
        for (int k = 0; k <= kOrder; ++k) r[k] = c[k] * s;
        return r;
    }
    Taylor operator*(const Taylor& o) const {
        Taylor r;
        for (int k = 0; k <= kOrder; ++k)
            for (int i = 0; i <= k; ++i) r[k] += c[i] * o[k - i];
        return r;
    }
    Taylor operator/(const Taylor& o) const {
        Taylor r;
        for (int k = 0; k <= kOrder; ++k) {
            double s = c[k];
            for (int i = 0; i < k; ++i) s -= r[i] * o[k - i];
            r[k] = s / o[0];
        }
        return r;
    }

    // Requires a positive constant term.
    Taylor sqrt() const {
        Taylor r;
        r[0] = std::sqrt(c[0]);
        for (int k = 1; k <= kOrder; ++k) {
            double s = c[k];
            for (int i = 1; i < k; ++i) s -= r[i] * r[k - i];
            r[k] = s / (2.0 * r[0]);
        }
        return r;
    }

    // Requires a positive constant term. Uses (log u)' = u'/u.
    Taylor log() const {
        Taylor du; // derivative
        for (int k = 0; k < kOrder; ++k) du[k] = (k + 1) * c[k + 1];
        Taylor d = du / *this;
        Taylor r;
        r[0] = std::log(c[0]);
        for (int k = 1; k <= kOrder; ++k) r[k] = d[k - 1] / k;
        return r;
    }

    // Multiply by the series variable (shift coefficients up one power).
    Taylor shift_up() const {
        Taylor r;
        for (int k = kOrder; k >= 1; --k) r[k] = c[k - 1];
        return r;
    }
    // Divide by the series variable; requires a zero constant term.
    Taylor shift_down() const {
        Taylor r;
        for (int k = 0; k < kOrder; ++k) r[k] = c[k + 1];
        return r;
    }

    // this(inner(w)) with inner(0) = 0, by Horner on series.
    Taylor compose(const Taylor& inner) const {
        Taylor r = constant(c[kOrder]);
        for (int k = kOrder - 1; k >= 0; --k) {
            r = r * inner;
            r[0] += c[k];
        }
        return r;
    }

    // Series reversion: given f with f(0)=0, f'(0)!=0, returns g with
    // f(g(z)) = z through order kOrder.
    Taylor revert() const {
        Taylor g;
        g[1] = 1.0 / c[1];
        for (int m = 2; m <= kOrder; ++m) {
            Taylor h = compose(g);
            g[m] = -h[m] / c[1];
        }
        return g;
    }

    double eval(double w) const {
        double r = c[kOrder];
        for (int k = kOrder - 1; k >= 0; --k) r = r * w + c[k];
        return r;
    }
    // Value of the derivative series at w.
    double eval_derivative(double w) const {
        double r = kOrder * c[kOrder];
        for (int k = kOrder - 1; k >= 1; --k) r = r * w + k * c[k];
        return r;
    }
};

} // namespace marq::detail
