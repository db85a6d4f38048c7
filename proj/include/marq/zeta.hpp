#pragma once

#include <vector>

#include "marq/detail/taylor.hpp"

namespace marq {

/// A point of the transformation zeta(x, y):
///   zeta^2/2 = x + y - sqrt(1+4xy) + ln((1 + sqrt(1+4xy)) / (2y)),
///   sign(zeta) = sign(y - x - 1).
/// Arguments are the scaled ones (the transition line is y = x + 1).
struct ZetaPoint {
    double x = 0.0;
    double y = 0.0;
    double rho = 0.0;   // sqrt(y/x), +inf at x = 0
    double xi = 0.0;    // 2 sqrt(xy)
    double zeta = 0.0;
};

/// Root side for the inversion in x relative to the minimum at x = y - 1.
enum class Branch { left, right };

/// How a dual-route quantity should be evaluated.
enum class EvalPath { automatic, direct, series };

/// Leading expansion coefficients around the transition line.
struct ExpansionCoeffs {
    std::vector<double> a;  // a_1..a_k(y), inversion in x
    std::vector<double> b;  // b_1..b_k(x), inversion in y
    std::vector<double> c;  // c_0..c_k(x), series of f(zeta0)
    std::vector<double> d;  // d_0..d_k(x), series of zeta_1
    int order = 0;
};

ZetaPoint zeta(double x, double y);

/// zeta^2/2 as a function of x with y fixed, and its x-derivative.
double f_rhs(double x, double y);
double f_prime(double x, double y);

/// zeta^2/2 as a function of y with x fixed, and its y-derivative.
double g_rhs(double y, double x);
double g_prime(double y, double x);

/// Printed closed-form coefficients (kmax limited to the orders above).
std::vector<double> coeffs_a(double y, int kmax = 3);
std::vector<double> coeffs_b(double x, int kmax = 3);
std::vector<double> coeffs_c(double x, int kmax = 3);
std::vector<double> coeffs_d(double x, int kmax = 2);
ExpansionCoeffs expansion_coeffs(double x, double y, int order = 3);

/// Solves zeta(x, y) = zeta_target for x >= 0 at fixed y, on the requested
/// side of x = y - 1. Throws no_solution_error when the target is not
/// reachable on that side (it needs zeta^2/2 >= f(0) when y < 1, and
/// zeta^2/2 <= f(0) for a left root).
double invert_zeta_x(double zeta_target, double y, Branch branch,
                     int* iterations = nullptr);

/// Solves zeta(x, y) = zeta_target for y > 0 at fixed x (always solvable).
double invert_zeta_y(double zeta_target, double x, int* iterations = nullptr);

/// f(zeta0) = zeta0 (1 + 2x + sqrt(1+4xy)) / (2 (y-x-1) (1+4xy)^{1/4}),
/// with the removable singularity at the line covered by its series.
double f_of_zeta0(double zeta0, double x, double y,
                  EvalPath path = EvalPath::automatic);

/// First correction of the inverted zeta: ln(f(zeta0)) / zeta0, series near 0.
double zeta1(double zeta0, double x, double y,
             EvalPath path = EvalPath::automatic);

/// Leading coefficient of the asymptotic remainder,
/// d0(zeta) = 1/zeta - (1+2x+sqrt(1+4xy)) / (2 (y-x-1) (1+4xy)^{1/4}).
double d0(double zeta0, double x, double y);

/// Partial derivatives of zeta; singular on the line y = x + 1.
double dzeta_dx(double x, double y);
double dzeta_dy(double x, double y);

namespace detail {

// Expansions of zeta^2/2 around its double root, in w = y - x - 1 at fixed
// x (the y-path) or v = x - (y - 1) at fixed y (the x-path, needs 2y > 1).
struct LineSeries {
    Taylor half_zeta2;   // coefficients in the offset variable
    Taylor quotient;     // half_zeta2 with the double zero divided out
    Taylor zeta_series;  // signed zeta as a series in the offset
    Taylor offset_of_zeta;  // reversion of zeta_series
};

LineSeries line_series_y(double x);
LineSeries line_series_x(double y);

// f(zeta0) and zeta_1 as series in zeta0 at fixed x.
Taylor f_series_in_zeta(double x);
Taylor zeta1_series_in_zeta(double x);

double halfzeta2_point(double x, double y);

} // namespace detail

} // namespace marq
