#include "marq/zeta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "marq/detail/rootfind.hpp"
#include "marq/errors.hpp"

namespace marq {

namespace detail {

LineSeries line_series_y(double x) {
    const double s0 = 2.0 * x + 1.0;
    LineSeries ls;
    // t(w) = 1 + 4 x y = (2x+1)^2 + 4 x w along y = x + 1 + w
    Taylor t = Taylor::linear(s0 * s0, 4.0 * x);
    Taylor s = t.sqrt();
    Taylor a = Taylor::linear(s0, 1.0) - s;                    // x + y - S
    Taylor b = (s + Taylor::constant(1.0)).log() -
               Taylor::linear(2.0 * (x + 1.0), 2.0).log();     // ln((1+S)/(2y))
    ls.half_zeta2 = a + b;
    // both vanish at the root; clear the rounding residue
    ls.half_zeta2[0] = 0.0;
    ls.half_zeta2[1] = 0.0;
    ls.quotient = ls.half_zeta2.shift_down().shift_down();
    ls.zeta_series = (ls.quotient * 2.0).sqrt().shift_up();    // w sqrt(2 G(w))
    ls.offset_of_zeta = ls.zeta_series.revert();
    return ls;
}

LineSeries line_series_x(double y) {
    const double s0 = 2.0 * y - 1.0;   // needs 2y > 1
    LineSeries ls;
    // t(v) = (2y-1)^2 + 4 y v along x = y - 1 + v
    Taylor t = Taylor::linear(s0 * s0, 4.0 * y);
    Taylor s = t.sqrt();
    Taylor a = Taylor::linear(s0, 1.0) - s;                    // x + y - S
    Taylor b = (s + Taylor::constant(1.0)).log();
    b[0] -= std::log(2.0 * y);
    ls.half_zeta2 = a + b;
    ls.half_zeta2[0] = 0.0;
    ls.half_zeta2[1] = 0.0;
    ls.quotient = ls.half_zeta2.shift_down().shift_down();
    // sign(zeta) = sign(y - x - 1) = sign(-v)
    ls.zeta_series = (ls.quotient * 2.0).sqrt().shift_up() * -1.0;
    ls.offset_of_zeta = ls.zeta_series.revert();
    return ls;
}

Taylor f_series_in_zeta(double x) {
    LineSeries ls = line_series_y(x);
    const double s0 = 2.0 * x + 1.0;
    Taylor t = Taylor::linear(s0 * s0, 4.0 * x);
    Taylor s = t.sqrt();
    Taylor num = s + Taylor::constant(2.0 * x + 1.0);          // 1 + 2x + S
    Taylor f_of_w = (ls.quotient * 2.0).sqrt() * num /
                    (t.sqrt().sqrt() * 2.0);
    return f_of_w.compose(ls.offset_of_zeta);
}

Taylor zeta1_series_in_zeta(double x) {
    return f_series_in_zeta(x).log().shift_down();
}

double halfzeta2_point(double x, double y) {
    const double w = y - x - 1.0;
    if (std::fabs(w) <= 0.125 * (x + 1.0)) {
        LineSeries ls = line_series_y(x);
        return w * w * ls.quotient.eval(w);
    }
    // rearranged so every piece vanishes with w; the naive form cancels
    const double s0 = 2.0 * x + 1.0;
    const double s = std::sqrt(std::fma(4.0 * x, y, 1.0));
    const double eps = 4.0 * x * w / (s + s0);                 // S - s0
    // far from the line, ln(y/(x+1)) straight from y keeps y's digits
    const double lr = std::fabs(w) > 0.5 * (x + 1.0)
                          ? std::log(y / (x + 1.0))
                          : std::log1p(w / (x + 1.0));
    return (w - eps) + std::log1p(eps / (2.0 * x + 2.0)) - lr;
}

} // namespace detail

ZetaPoint zeta(double x, double y) {
    if (y <= 0.0) throw domain_error("zeta: y must be positive");
    if (x < 0.0) throw domain_error("zeta: x must be nonnegative");
    ZetaPoint pt;
    pt.x = x;
    pt.y = y;
    pt.rho = x > 0.0 ? std::sqrt(y / x) : std::numeric_limits<double>::infinity();
    pt.xi = 2.0 * std::sqrt(x * y);
    const double w = y - x - 1.0;
    pt.zeta = std::copysign(std::sqrt(2.0 * detail::halfzeta2_point(x, y)), w);
    return pt;
}

double f_rhs(double x, double y) { return detail::halfzeta2_point(x, y); }

double f_prime(double x, double y) {
    const double s = std::sqrt(std::fma(4.0 * x, y, 1.0));
    return (1.0 - 2.0 * y + s) / (1.0 + s);
}

double g_rhs(double y, double x) { return detail::halfzeta2_point(x, y); }

double g_prime(double y, double x) {
    const double s = std::sqrt(std::fma(4.0 * x, y, 1.0));
    return (y - 2.0 * x * y - 1.0 + (y - 1.0) * s) / (y * (1.0 + s));
}

std::vector<double> coeffs_a(double y, int kmax) {
    if (!(2.0 * y > 1.0))
        throw domain_error("coeffs_a: requires 2y > 1");
    if (kmax < 1 || kmax > 3)
        throw domain_error("coeffs_a: closed forms available for k in [1,3]");
    const double r = 2.0 * y - 1.0;
    std::vector<double> a{-std::sqrt(r)};
    if (kmax >= 2) a.push_back((3.0 * y - 1.0) / (3.0 * r));
    if (kmax >= 3) a.push_back((6.0 * y - 1.0) / (36.0 * r * r * std::sqrt(r)));
    return a;
}

std::vector<double> coeffs_b(double x, int kmax) {
    if (x < 0.0) throw domain_error("coeffs_b: x must be nonnegative");
    if (kmax < 1 || kmax > 3)
        throw domain_error("coeffs_b: closed forms available for k in [1,3]");
    const double r = 2.0 * x + 1.0;
    std::vector<double> b{std::sqrt(r)};
    if (kmax >= 2) b.push_back((3.0 * x + 1.0) / (3.0 * r));
    if (kmax >= 3) b.push_back((6.0 * x + 1.0) / (36.0 * r * r * std::sqrt(r)));
    return b;
}

std::vector<double> coeffs_c(double x, int kmax) {
    if (x < 0.0) throw domain_error("coeffs_c: x must be nonnegative");
    if (kmax < 0 || kmax > 3)
        throw domain_error("coeffs_c: closed forms available for k in [0,3]");
    const double r = 2.0 * x + 1.0;
    const double sr = std::sqrt(r);
    std::vector<double> c{1.0};
    if (kmax >= 1) c.push_back(-(3.0 * x + 1.0) / (3.0 * r * sr));
    if (kmax >= 2) c.push_back((18.0 * x * x + 6.0 * x + 1.0) / (12.0 * r * r * r));
    if (kmax >= 3)
        c.push_back(-(675.0 * x * x * x + 81.0 * x * x + 36.0 * x + 4.0) /
                    (270.0 * r * r * r * r * sr));
    return c;
}

std::vector<double> coeffs_d(double x, int kmax) {
    if (x < 0.0) throw domain_error("coeffs_d: x must be nonnegative");
    if (kmax < 0 || kmax > 2)
        throw domain_error("coeffs_d: closed forms available for k in [0,2]");
    const double r = 2.0 * x + 1.0;
    const double sr = std::sqrt(r);
    std::vector<double> d{-(3.0 * x + 1.0) / (3.0 * r * sr)};
    if (kmax >= 1) d.push_back((36.0 * x * x + 6.0 * x + 1.0) / (36.0 * r * r * r));
    if (kmax >= 2)
        d.push_back(-(2160.0 * x * x * x - 594.0 * x * x - 9.0 * x - 1.0) /
                    (1620.0 * r * r * r * r * sr));
    return d;
}

ExpansionCoeffs expansion_coeffs(double x, double y, int order) {
    if (!(2.0 * y > 1.0))
        throw domain_error("expansion_coeffs: the a-coefficients require 2y > 1");
    ExpansionCoeffs ec;
    ec.order = order;
    ec.a = coeffs_a(y, std::min(order, 3));
    ec.b = coeffs_b(x, std::min(order, 3));
    ec.c = coeffs_c(x, std::min(order, 3));
    ec.d = coeffs_d(x, std::min(order, 2));
    return ec;
}

namespace {

constexpr double kSeriesSwitch = 0.1;  // |zeta| below which series are used

// Two Newton corrections on the series representation of zeta^2/2.
double polish_on_series(const detail::LineSeries& ls, double u, double target) {
    for (int i = 0; i < 2; ++i) {
        const double g = ls.quotient.eval(u);
        const double dg = ls.quotient.eval_derivative(u);
        const double h = u * u * g - target;
        const double dh = u * (2.0 * g + u * dg);
        if (dh != 0.0) u -= h / dh;
    }
    return u;
}

} // namespace

double invert_zeta_x(double zeta_target, double y, Branch branch,
                     int* iterations) {
    if (y <= 0.0) throw domain_error("invert_zeta_x: y must be positive");
    if (iterations) *iterations = 0;
    const double target = 0.5 * zeta_target * zeta_target;

    if (y < 1.0) {
        const double f0 = detail::halfzeta2_point(0.0, y);
        if (target < f0 * (1.0 - 1e-12))
            throw no_solution_error(
                "invert_zeta_x: zeta^2/2 below its value at x = 0 (no root for y < 1)");
        if (target <= f0) return 0.0;
        // quadratic model through f(0), f'(0) = 1-y, f''(0) = y^2
        const double disc = (1.0 - y) * (1.0 - y) + 2.0 * y * y * (target - f0);
        double start = (-(1.0 - y) + std::sqrt(disc)) / (y * y);
        double hi = std::max(2.0 * start, 1.0);
        while (detail::halfzeta2_point(hi, y) < target) hi *= 2.0;
        auto h = [&](double xx) { return detail::halfzeta2_point(xx, y) - target; };
        auto dh = [&](double xx) { return f_prime(xx, y); };
        auto r = detail::newton_bracketed(h, dh, start, 0.0, hi, true, {1e-15, 0.0, 30});
        if (iterations) *iterations = r.iterations;
        if (!r.converged)
            throw convergence_error("invert_zeta_x: no convergence (y < 1)", r.x,
                                    r.iterations);
        return r.x;
    }

    if (target == 0.0) return y - 1.0;
    const double f0 = detail::halfzeta2_point(0.0, y);
    // the effective sign of zeta is fixed by the requested side
    const double zeff = branch == Branch::left ? std::fabs(zeta_target)
                                               : -std::fabs(zeta_target);

    if (branch == Branch::left) {
        if (target > f0 * (1.0 + 1e-12) + 1e-15)
            throw no_solution_error(
                "invert_zeta_x: no left root, zeta^2/2 exceeds its value at x = 0");
        if (target >= f0) return 0.0;
        if (std::fabs(zeff) <= kSeriesSwitch) {
            detail::LineSeries ls = detail::line_series_x(y);
            double v = polish_on_series(ls, ls.offset_of_zeta.eval(zeff), target);
            if (iterations) *iterations = 2;
            return std::max(y - 1.0 + v, 0.0);
        }
        // f decreases from f(0) to 0 on [0, y-1]; Newton from the boundary
        auto h = [&](double xx) { return detail::halfzeta2_point(xx, y) - target; };
        auto dh = [&](double xx) { return f_prime(xx, y); };
        auto r = detail::newton_bracketed(h, dh, 0.0, 0.0, y - 1.0, false,
                                          {1e-15, 0.0, 30});
        if (iterations) *iterations = r.iterations;
        if (!r.converged)
            throw convergence_error("invert_zeta_x: no convergence (left root)", r.x,
                                    r.iterations);
        return r.x;
    }

    // right root, x >= y - 1
    if (std::fabs(zeff) <= kSeriesSwitch) {
        detail::LineSeries ls = detail::line_series_x(y);
        double v = polish_on_series(ls, ls.offset_of_zeta.eval(zeff), target);
        if (iterations) *iterations = 2;
        return y - 1.0 + v;
    }
    // start right of the root: x_g solves x + y - sqrt(1+4xy) = target
    const double xg = y + target + std::sqrt(4.0 * y * target + 1.0);
    auto h = [&](double xx) { return detail::halfzeta2_point(xx, y) - target; };
    auto dh = [&](double xx) { return f_prime(xx, y); };
    auto r = detail::newton_bracketed(h, dh, xg, y - 1.0, xg, true, {1e-15, 0.0, 30});
    if (iterations) *iterations = r.iterations;
    if (!r.converged)
        throw convergence_error("invert_zeta_x: no convergence (right root)", r.x,
                                r.iterations);
    return r.x;
}

double invert_zeta_y(double zeta_target, double x, int* iterations) {
    if (x < 0.0) throw domain_error("invert_zeta_y: x must be nonnegative");
    if (iterations) *iterations = 0;
    if (zeta_target == 0.0) return x + 1.0;
    const double target = 0.5 * zeta_target * zeta_target;

    if (std::fabs(zeta_target) <= kSeriesSwitch) {
        detail::LineSeries ls = detail::line_series_y(x);
        double w = polish_on_series(ls, ls.offset_of_zeta.eval(zeta_target), target);
        if (iterations) *iterations = 2;
        return x + 1.0 + w;
    }

    auto h = [&](double yy) { return detail::halfzeta2_point(x, yy) - target; };
    auto dh = [&](double yy) { return g_prime(yy, x); };
    const auto bcoef = coeffs_b(x);
    const double z = zeta_target;
    // the b-series start is only sensible within its convergence region;
    // beyond it the asymptotic forms of g give far better starts
    double start;
    if (std::fabs(z) <= 0.5 * bcoef[0]) {
        start = x + 1.0 + z * (bcoef[0] + z * (bcoef[1] + z * bcoef[2]));
    } else if (z > 0.0) {
        const double sx = std::sqrt(x) + std::sqrt(target);
        start = std::max(sx * sx, x + 1.0 + bcoef[0] * z);
    } else {
        start = std::exp(std::min(x - 1.0 - target, 700.0));
    }

    detail::RootResult r;
    if (zeta_target > 0.0) {
        double hi = std::max(2.0 * start,
                             x + 1.0 + 2.0 * target +
                                 2.0 * std::sqrt((2.0 * x + 1.0) * target) + 2.0);
        int guard = 0;
        while (h(hi) < 0.0 && ++guard < 200) hi *= 2.0;
        start = std::min(std::max(start, x + 1.0), hi);
        r = detail::newton_bracketed(h, dh, start, x + 1.0, hi, true, {1e-15, 0.0, 30});
    } else {
        double lo = 0.5 * std::exp(std::min(x - 1.0 - target, 700.0));
        lo = std::min(lo, 0.5 * (x + 1.0));
        int guard = 0;
        while (h(lo) < 0.0 && ++guard < 600) lo *= 0.25;
        start = std::min(std::max(start, lo), x + 1.0);
        r = detail::newton_bracketed(h, dh, start, lo, x + 1.0, false, {1e-15, 0.0, 30});
    }
    if (iterations) *iterations = r.iterations;
    if (!r.converged)
        throw convergence_error("invert_zeta_y: no convergence", r.x, r.iterations);
    return r.x;
}

namespace {

double f_direct(double zeta0, double x, double y) {
    const double t = std::fma(4.0 * x, y, 1.0);
    const double s = std::sqrt(t);
    return zeta0 * (1.0 + 2.0 * x + s) /
           ((y - x - 1.0) * 2.0 * std::sqrt(std::sqrt(t)));
}

} // namespace

double f_of_zeta0(double zeta0, double x, double y, EvalPath path) {
    const bool series = path == EvalPath::series ||
                        (path == EvalPath::automatic && std::fabs(zeta0) < kSeriesSwitch);
    if (series) return detail::f_series_in_zeta(x).eval(zeta0);
    return f_direct(zeta0, x, y);
}

double zeta1(double zeta0, double x, double y, EvalPath path) {
    const bool series = path == EvalPath::series ||
                        (path == EvalPath::automatic && std::fabs(zeta0) < kSeriesSwitch);
    if (series) return detail::zeta1_series_in_zeta(x).eval(zeta0);
    return std::log(f_direct(zeta0, x, y)) / zeta0;
}

double d0(double zeta0, double x, double y) {
    if (std::fabs(zeta0) < kSeriesSwitch) {
        // d0 = (1 - f(zeta)) / zeta = -(c1 + c2 zeta + ...)
        return -detail::f_series_in_zeta(x).shift_down().eval(zeta0);
    }
    const double t = std::fma(4.0 * x, y, 1.0);
    return 1.0 / zeta0 - (1.0 + 2.0 * x + std::sqrt(t)) /
                             (2.0 * (y - x - 1.0) * std::sqrt(std::sqrt(t)));
}

double dzeta_dx(double x, double y) {
    if (y == x + 1.0)
        throw domain_error("dzeta_dx: singular on the transition line y = x + 1");
    const double s = std::sqrt(std::fma(4.0 * x, y, 1.0));
    return (1.0 + s - 2.0 * y) / (zeta(x, y).zeta * (1.0 + s));
}

double dzeta_dy(double x, double y) {
    if (y == x + 1.0)
        throw domain_error("dzeta_dy: singular on the transition line y = x + 1");
    const double s = std::sqrt(std::fma(4.0 * x, y, 1.0));
    return (y - 2.0 * x * y - 1.0 + (y - 1.0) * s) /
           (y * zeta(x, y).zeta * (1.0 + s));
}

} // namespace marq
