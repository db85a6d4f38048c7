#pragma once

namespace marq {

/// Arguments of the generalized Marcum functions Q_mu(x, y), P_mu(x, y)
/// (unscaled; the asymptotic machinery rescales internally). Orders above
/// 1e4 are rejected unless `unrestricted_mu` is set: beyond that the
/// double-precision paths run at the caller's risk.
struct MarcumParams {
    double mu = 1.0;
    double x = 0.0;
    double y = 0.0;
    bool unrestricted_mu = false;
};

enum class Method { series, asymptotic, quadrature, closed_form };

/// A (q, p) tail pair with q + p = 1. The tail that was computed directly
/// carries relative accuracy; the complemented one only absolute accuracy.
struct ProbabilityPair {
    double q = 0.0;
    double p = 1.0;
    Method method = Method::series;
};

/// Residuals of the order recurrences, normalized by the largest term.
/// `ttrr` is NaN for mu < 2 where the three-term recurrence needs Q_{mu-1}.
struct RecurrenceResiduals {
    double additive = 0.0;
    double ttrr = 0.0;
};

enum class Curvature { concave, convex, indeterminate };

/// Sign certificates for the second derivatives of Q_mu in x and in y.
struct ConvexityCertificate {
    Curvature in_x = Curvature::indeterminate;
    Curvature in_y = Curvature::indeterminate;
};

/// Both tails by the Poisson-mixture series over incomplete gamma ratios,
/// summed outward from the modal weight; the numerically smaller tail is
/// computed directly (Q when y > x + mu, P otherwise).
ProbabilityPair marcum(const MarcumParams& params);
ProbabilityPair marcum(double mu, double x, double y);

/// Uniform asymptotic representation through the leading remainder
/// coefficient d0; error O(1/mu^{3/2}) on the erfc scale.
ProbabilityPair marcum_asymptotic(const MarcumParams& params);

/// dQ/dx = (y/x)^{mu/2} e^{-x-y} I_mu(2 sqrt(xy)) > 0, assembled in log
/// space. Requires x > 0 (the x = 0 limit is the gamma density, see dq_dy).
double dq_dx(const MarcumParams& params);

/// dQ/dy = -(y/x)^{(mu-1)/2} e^{-x-y} I_{mu-1}(2 sqrt(xy)) < 0; at x = 0 it
/// reduces to the negative central gamma density.
double dq_dy(const MarcumParams& params);

/// Bessel ratio coefficient of the three-term recurrence,
/// c_mu(x, y) = sqrt(y/x) I_mu(2 sqrt(xy)) / I_{mu-1}(2 sqrt(xy)).
double c_mu(double mu, double x, double y);

RecurrenceResiduals recurrence_check(const MarcumParams& params);

ConvexityCertificate convexity_bounds(double mu, double x, double y);

/// Approximate median curve: the y with Q_mu(x, y) ~ 1/2,
/// y = x + mu - (3x' + 1) / (3 (2x' + 1)) with x' = x / mu.
double transition_y(double mu, double x);

} // namespace marq
