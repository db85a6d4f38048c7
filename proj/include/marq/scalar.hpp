#pragma once

namespace marq {

/// Incomplete gamma function ratio pair at (mu, y):
/// p = P_mu(y) = gamma(mu,y)/Gamma(mu), q = Q_mu(y) = Gamma(mu,y)/Gamma(mu).
/// The tail that is numerically the smaller one is computed directly and
/// carries relative accuracy; the other is its complement.
struct GammaTailPair {
    double mu = 0.0;
    double y = 0.0;
    double p = 0.0;
    double q = 1.0;
};

/// The transformed variable of the symmetric gamma representation:
/// eta^2/2 = y - 1 - ln y, sign(eta) = sign(y - 1).
struct EtaValue {
    double y = 0.0;
    double eta = 0.0;
};

/// Complementary error function, (2/sqrt(pi)) * integral_z^inf exp(-t^2) dt.
double erfc(double z);

/// Inverse of erfc on (0, 2). Throws domain_error outside the open interval.
double inverfc(double s);

/// Scaled modified Bessel function of the first kind, exp(-z) * I_nu(z),
/// finite over the whole admissible range by construction.
/// Requires nu >= 0 and z >= 0.
double bessel_i_scaled(double nu, double z);

/// First correction polynomials of the large-order Bessel expansions,
/// evaluated at p in (0, 1]:  U1(p) = (3p - 5p^3)/24,  V1(p) = (-9p + 7p^3)/24.
double bessel_u1(double p);
double bessel_v1(double p);

/// Both incomplete gamma ratios at (mu, y), mu >= 1, y >= 0.
/// P by Taylor series when y < mu + 1, Q by continued fraction otherwise,
/// the remaining tail by complement.
GammaTailPair gamma_ratios(double mu, double y);

/// Solves Q_mu(y) = q0 for y (mu >= 1, 0 < q0 < 1). Asymptotic seed in the
/// eta variable followed by bracketed Newton on the tail itself.
double invert_gamma_q(double mu, double q0);

/// Forward map y -> eta (y > 0) and its inverse.
EtaValue eta_of_y(double y);
double y_of_eta(double eta);

namespace detail {
// phi(1+u) = u - log(1+u), evaluated without cancellation for small |u|.
double phi1(double u);
// lambda - 1 - ln(lambda) with the argument branch chosen so that neither
// cancellation near 1 nor digit loss far from 1 degrades it.
double phi_lambda(double lambda);
// Regularized gamma prefactor D(a,x) = x^a e^{-x} / Gamma(a+1).
double gamma_dominant(double a, double x);
// ln(exp(-z) I_nu(z)); -inf where the value is exactly zero. Lets callers
// fold in large prefactors before exponentiating.
double bessel_i_scaled_log(double nu, double z);
// Scaled gamma function Gamma*(a) = Gamma(a) / (sqrt(2 pi) a^(a-1/2) e^(-a)).
double gamma_star(double a);
} // namespace detail

} // namespace marq
