#include "marq/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "marq/detail/rootfind.hpp"
#include "marq/errors.hpp"

namespace marq {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLn2Pi = 1.8378770664093454836;  // ln(2 pi)
constexpr double kSqrtPi = 1.7724538509055160273;

// Kahan-compensated accumulator.
struct Accum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        double t = v - comp;
        double s = sum + t;
        comp = (s - sum) - t;
        sum = s;
    }
};

// Error-free transformations for the compensated exponent assembly below.
struct Split {
    double hi = 0.0;
    double lo = 0.0;
};

Split two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

Split two_prod(double a, double b) {
    const double p = a * b;
    return {p, std::fma(a, b, -p)};
}

// a / b to roughly double-double accuracy.
Split dd_div(const Split& a, const Split& b) {
    const double q = a.hi / b.hi;
    const Split p = two_prod(q, b.hi);
    const double r = ((a.hi - p.hi) - p.lo + a.lo - q * b.lo) / b.hi;
    return {q, r};
}

} // namespace

namespace detail {

double phi1(double u) {
    if (u <= -1.0) throw domain_error("phi1: argument must exceed -1");
    if (std::fabs(u) > 0.4) return u - std::log1p(u);
    // sum_{k>=2} (-1)^k u^k / k, no cancellation against the linear term
    double term = u * u;
    double s = 0.5 * term;
    for (int k = 3; k < 60; ++k) {
        term *= -u;
        double t = term / k;
        s += t;
        if (std::fabs(t) <= 1e-18 * std::fabs(s)) break;
    }
    return s;
}

double phi_lambda(double lambda) {
    // lambda - 1 - ln(lambda). Forming lambda - 1 first destroys digits of
    // lambda when it is far from 1, so only the central window uses phi1.
    if (lambda > 0.5 && lambda < 2.0) return phi1(lambda - 1.0);
    return lambda - 1.0 - std::log(lambda);
}

double gamma_star(double a) {
    if (a >= 20.0) {
        // Stirling series for Gamma(a) / (sqrt(2 pi) a^(a-1/2) e^-a)
        static const double c[] = {
            1.0,
            1.0 / 12.0,
            1.0 / 288.0,
            -139.0 / 51840.0,
            -571.0 / 2488320.0,
            163879.0 / 209018880.0,
            5246819.0 / 75246796800.0,
            -534703531.0 / 902961561600.0,
            -4483131259.0 / 86684309913600.0,
        };
        double s = 0.0, pw = 1.0;
        for (double ck : c) {
            s += ck / pw;
            pw *= a;
        }
        return s;
    }
    return std::exp(std::lgamma(a) - ((a - 0.5) * std::log(a) - a + 0.5 * kLn2Pi));
}

double gamma_dominant(double a, double x) {
    if (x == 0.0) return 0.0;
    const double e = a * phi_lambda(x / a);
    if (e > 700.0) return 0.0;
    return std::exp(-e) / (std::sqrt(2.0 * kPi * a) * gamma_star(a));
}

} // namespace detail

double erfc(double z) { return std::erfc(z); }

namespace {

// z with erfc(z) = s for s in (0, 1]: rational first guess, Newton polish.
double inverfc_pos(double s) {
    if (s == 1.0) return 0.0;
    if (s < 1e-305) {
        // Below the reach of the Newton polish (exp(z^2) would overflow):
        // invert the asymptotic erfc(z) ~ e^{-z^2}/(z sqrt(pi)) (1 - ...).
        const double r = -std::log(s);
        double z = std::sqrt(r);
        for (int i = 0; i < 8; ++i) {
            const double zz = z * z;
            const double corr =
                ((( 6.5625 / zz - 1.875) / zz + 0.75) / zz - 0.5) / zz;
            z = std::sqrt(r - std::log(z * kSqrtPi) + std::log1p(corr));
        }
        return z;
    }
    const double t = std::sqrt(-2.0 * std::log(0.5 * s));
    double z = -0.70711 * ((2.30753 + t * 0.27061) /
                           (1.0 + t * (0.99229 + t * 0.04481)) - t);
    for (int i = 0; i < 5; ++i) {
        const double err = std::erfc(z) - s;
        const double step = err * (0.5 * kSqrtPi) * std::exp(z * z);
        z += step;
        if (std::fabs(step) <= 1e-15 * (1.0 + std::fabs(z))) break;
    }
    return z;
}

} // namespace

double inverfc(double s) {
    if (!(s > 0.0 && s < 2.0)) throw domain_error("inverfc: argument must lie in (0, 2)");
    // 2 - s is exact for s in [1, 2]
    return s > 1.0 ? -inverfc_pos(2.0 - s) : inverfc_pos(s);
}

double bessel_u1(double p) { return p * (3.0 - 5.0 * p * p) / 24.0; }
double bessel_v1(double p) { return p * (-9.0 + 7.0 * p * p) / 24.0; }

namespace {

// Coefficient polynomials U_k(p) of the large-order Bessel expansion,
// grown by the standard derivative/integral recurrence:
//   U_{k+1}(p) = p^2 (1-p^2)/2 U_k'(p) + 1/8 int_0^p (1-5t^2) U_k(t) dt.
const std::vector<std::vector<double>>& bessel_u_polys() {
    static const std::vector<std::vector<double>> polys = [] {
        std::vector<std::vector<double>> u;
        u.push_back({1.0});
        for (int k = 0; k < 12; ++k) {
            const auto& cur = u.back();
            const int deg = static_cast<int>(cur.size()) - 1;
            std::vector<double> next(static_cast<std::size_t>(deg + 4), 0.0);
            // p^2(1-p^2)/2 * d/dp
            for (int j = 1; j <= deg; ++j) {
                const double d = j * cur[static_cast<std::size_t>(j)];
                next[static_cast<std::size_t>(j + 1)] += 0.5 * d;
                next[static_cast<std::size_t>(j + 3)] -= 0.5 * d;
            }
            // 1/8 int_0^p (1 - 5 t^2) * .
            for (int j = 0; j <= deg; ++j) {
                const double cj = cur[static_cast<std::size_t>(j)];
                next[static_cast<std::size_t>(j + 1)] += 0.125 * cj / (j + 1);
                next[static_cast<std::size_t>(j + 3)] -= 0.625 * cj / (j + 3);
            }
            u.push_back(std::move(next));
        }
        return u;
    }();
    return polys;
}

double poly_eval(const std::vector<double>& c, double x) {
    double r = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
    return r;
}

// Uniform large-order expansion of exp(-z) I_nu(z), z = nu w, as a log.
// In t = nu/z = 1/w the exponent is eta(w) - w = t/(1+rt) - asinh(t) with
// rt = sqrt(1+t^2): two pieces of the size of the result, so the factor nu
// amplifies only eps * |nu A|, never more.
double bessel_i_scaled_uniform_log(double nu, double z) {
    const double t = nu / z;
    const double rt = std::sqrt(1.0 + t * t);
    const double a = t / (1.0 + rt) - std::asinh(t);
    const double p = t / rt;  // = 1/sqrt(1+w^2)
    const auto& polys = bessel_u_polys();
    double su = 0.0, pw = 1.0;
    for (const auto& uk : polys) {
        su += poly_eval(uk, p) / pw;
        pw *= nu;
    }
    // (1+w^2)^{-1/4} = sqrt(t/rt)
    return nu * a + std::log(su * std::sqrt(t / rt) / std::sqrt(2.0 * kPi * nu));
}

// Large-argument expansion, valid for z >> nu^2, as a log.
double bessel_i_scaled_hankel_log(double nu, double z) {
    const double mu4 = 4.0 * nu * nu;
    double term = 1.0;
    Accum s;
    s.add(term);
    double prev = std::fabs(term);
    for (int k = 1; k <= 40; ++k) {
        const double f = 2.0 * k - 1.0;
        term *= -(mu4 - f * f) / (8.0 * k * z);
        if (std::fabs(term) > prev) break; // past the optimal truncation point
        prev = std::fabs(term);
        s.add(term);
        if (std::fabs(term) <= 1e-18 * std::fabs(s.sum)) break;
    }
    return std::log(s.sum) - 0.5 * std::log(2.0 * kPi * z);
}

// Maclaurin series summed outward from its largest term, so that no
// individual term under- or overflows when the result is representable.
double bessel_i_scaled_series_log(double nu, double z) {
    const double q = 0.25 * z * z;
    // peak index: m(nu+m) ~ q with m = k+1
    const double m0 = 0.5 * (-nu + std::sqrt(nu * nu + z * z));
    const int kpeak = std::max(0, static_cast<int>(m0) - 1);

    // log of the peak term, Stirling-grouped so no piece is much larger
    // than the final exponent (plain lgamma assembly loses digits when the
    // peak sits tens of thousands of terms in), with the rounding residues
    // of the argument sums carried explicitly
    const double kp1 = kpeak + 1.0;
    const Split nk = two_sum(nu, kp1);           // nu + k + 1 and its residue
    const double nkp1 = nk.hi;
    double lt;
    if (kpeak == 0) {
        const Split lin = two_sum(nkp1, -z);
        lt = nu * std::log(z / (2.0 * nkp1)) - nu * (nk.lo / nkp1) + lin.hi +
             (lin.lo + nk.lo) - 0.5 * std::log(nkp1) - 0.5 * kLn2Pi -
             std::log(detail::gamma_star(nkp1));
    } else {
        // k * ln(q / ((k+1)(nu+k+1))): the log argument is ~1 near the peak,
        // so its last bits get amplified by k; keep them in double-double
        const Split q2 = two_prod(z, z);
        const Split qq{0.25 * q2.hi, 0.25 * q2.lo};
        Split den = two_prod(kp1, nkp1);
        den.lo += kp1 * nk.lo;
        const Split u = dd_div(qq, den);
        const double l1 = kpeak * std::log(u.hi) + kpeak * (u.lo / u.hi);
        const double l2 = nu * std::log(z / (2.0 * nkp1)) - nu * (nk.lo / nkp1);
        const Split s1 = two_sum(nu, 2.0 * kpeak + 2.0);
        const Split s2 = two_sum(s1.hi, -z);
        lt = l1 + l2 + s2.hi + (s2.lo + s1.lo) - 0.5 * std::log(kp1 * nkp1) -
             kLn2Pi - std::log(detail::gamma_star(kp1)) -
             std::log(detail::gamma_star(nkp1));
    }

    Accum s;
    s.add(1.0);
    double t = 1.0;
    for (int k = kpeak; ; ++k) { // upward
        t *= q / ((k + 1.0) * (nu + k + 1.0));
        s.add(t);
        if (t <= 1e-18 * s.sum) break;
    }
    t = 1.0;
    for (int k = kpeak; k >= 1; --k) { // downward
        t *= (k * (nu + k)) / q;
        s.add(t);
        if (t <= 1e-18 * s.sum) break;
    }
    return lt + std::log(s.sum);
}

} // namespace

namespace detail {

double bessel_i_scaled_log(double nu, double z) {
    if (z < 0.0) throw domain_error("bessel_i_scaled: negative argument");
    if (nu < 0.0) throw domain_error("bessel_i_scaled: negative order");
    if (z == 0.0)
        return nu == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
    if (nu >= 150.0 && z >= 0.25 * nu) return bessel_i_scaled_uniform_log(nu, z);
    if (z >= 500.0 && z >= 2.0 * nu * nu) return bessel_i_scaled_hankel_log(nu, z);
    return bessel_i_scaled_series_log(nu, z);
}

} // namespace detail

double bessel_i_scaled(double nu, double z) {
    const double e = detail::bessel_i_scaled_log(nu, z);
    return e < -745.0 ? 0.0 : std::exp(e);
}

namespace {

// P_mu(y) by its Taylor series, as a multiple of the dominant part.
double gamma_p_series_factor(double mu, double y) {
    double t = 1.0, s = 1.0;
    for (int n = 1; n < 10000; ++n) {
        t *= y / (mu + n);
        s += t;
        if (t <= 1e-17 * s) break;
    }
    return s;
}

// Q_mu(y) continued fraction (Legendre form), modified Lentz evaluation.
double gamma_q_cf_factor(double mu, double y) {
    const double tiny = 1e-300;
    double b = y + 1.0 - mu;
    double c = 1.0 / tiny;
    double d = 1.0 / std::max(b, tiny);
    double h = d;
    for (int k = 1; k < 10000; ++k) {
        const double an = k * (mu - k);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) <= 1e-16) break;
    }
    return h;
}

} // namespace

GammaTailPair gamma_ratios(double mu, double y) {
    if (mu < 1.0) throw domain_error("gamma_ratios: order must be >= 1");
    if (y < 0.0) throw domain_error("gamma_ratios: negative argument");
    GammaTailPair out;
    out.mu = mu;
    out.y = y;
    if (y == 0.0) {
        out.p = 0.0;
        out.q = 1.0;
        return out;
    }
    const double dom = detail::gamma_dominant(mu, y);
    if (y < mu + 1.0) {
        out.p = dom * gamma_p_series_factor(mu, y);
        out.q = 1.0 - out.p;
    } else {
        out.q = dom * mu * gamma_q_cf_factor(mu, y);
        out.p = 1.0 - out.q;
    }
    return out;
}

EtaValue eta_of_y(double y) {
    if (y <= 0.0) throw domain_error("eta_of_y: argument must be positive");
    return EtaValue{y, std::copysign(std::sqrt(2.0 * detail::phi_lambda(y)), y - 1.0)};
}

double y_of_eta(double eta) {
    if (!std::isfinite(eta)) throw domain_error("y_of_eta: non-finite argument");
    if (eta == 0.0) return 1.0;
    const double target = 0.5 * eta * eta;
    if (std::fabs(eta) < 1e-4)
        return 1.0 + eta * (1.0 + eta * (1.0 / 3.0 + eta / 36.0));

    if (eta < 0.0) {
        // lower branch in u = ln y: e^u - 1 - u = target is convex and
        // falling for u < 0, so Newton from the deep-tail approximation
        // u = -1 - target converges monotonically; it also keeps roots
        // near the underflow boundary reachable
        double u = eta > -1.0
                       ? std::log(1.0 + eta * (1.0 + eta * (1.0 / 3.0 + eta / 36.0)))
                       : -1.0 - target;
        for (int i = 0; i < 60; ++i) {
            const double hv = (std::expm1(u) - u) - target;
            const double dv = std::expm1(u);  // e^u - 1 < 0 here
            const double un = u - hv / dv;
            if (!std::isfinite(un) || un >= 0.0) break;
            const bool done = std::fabs(un - u) <= 1e-15 * (std::fabs(u) + 1e-300);
            u = un;
            if (done) break;
        }
        return std::exp(u);
    }

    double start = eta < 1.0 ? 1.0 + eta * (1.0 + eta * (1.0 / 3.0 + eta / 36.0))
                             : target + 1.0;
    if (eta >= 1.0) // a few rounds of y = T + 1 + ln y
        for (int i = 0; i < 3; ++i) start = target + 1.0 + std::log(start);
    double hi = std::max(start * 2.0,
                         target + 2.0 * std::log(std::max(start, 2.0)) + 2.0);
    while (detail::phi_lambda(hi) < target) hi *= 2.0;
    // h(y) = y - 1 - ln y - target, increasing on (1, inf)
    auto h = [&](double yy) { return detail::phi_lambda(yy) - target; };
    auto dh = [](double yy) { return 1.0 - 1.0 / yy; };
    auto r = detail::newton_bracketed(h, dh, start, 1.0, hi, true, {1e-15, 0.0, 40});
    if (!r.converged)
        throw convergence_error("y_of_eta: no convergence", r.x, r.iterations);
    return r.x;
}

double invert_gamma_q(double mu, double q0) {
    if (mu < 1.0) throw domain_error("invert_gamma_q: order must be >= 1");
    if (!(q0 > 0.0 && q0 < 1.0))
        throw domain_error("invert_gamma_q: tail probability must lie in (0, 1)");

    // asymptotic seed in the eta variable, one 1/mu correction
    const double eta0 = std::sqrt(2.0 / mu) * inverfc(2.0 * q0);
    double eta1;
    if (std::fabs(eta0) < 0.25) {
        eta1 = -1.0 / 3.0 + eta0 / 36.0 + eta0 * eta0 / 1620.0;
    } else {
        const double ys = y_of_eta(eta0);
        eta1 = std::log(eta0 / (ys - 1.0)) / eta0;
    }
    double y = mu * y_of_eta(eta0 + eta1 / mu);
    if (!(y > 0.0)) y = mu;

    const double lnq0 = std::log(q0);
    double lo = 0.0, hi = std::max(2.0 * y, mu + 10.0 * std::sqrt(mu) + 10.0);
    while (gamma_ratios(mu, hi).q > q0) hi *= 2.0;
    y = std::min(std::max(y, lo + 1e-300), hi);

    int it = 0;
    double best_y = y, best_dln = std::numeric_limits<double>::infinity();
    for (; it < 30; ++it) {
        const double q = gamma_ratios(mu, y).q;
        if (q > 0.0) {
            const double dln = std::log(q) - lnq0;
            if (std::fabs(dln) < best_dln) {
                best_dln = std::fabs(dln);
                best_y = y;
            }
            if (std::fabs(dln) <= 1e-13) return y;
            if (dln > 0.0) lo = y; else hi = y;       // Q decreasing in y
            const double dq = -std::exp((mu - 1.0) * std::log(y) - y - std::lgamma(mu));
            double yn = y - q0 * std::expm1(dln) / dq;
            if (!std::isfinite(yn) || yn <= lo || yn >= hi) yn = 0.5 * (lo + hi);
            if (std::fabs(yn - y) <= 1e-15 * y) return yn;
            y = yn;
        } else {
            hi = y;
            y = 0.5 * (lo + hi);
        }
    }
    // Deep tails bottom out at the evaluation noise of Q itself; accept the
    // best iterate when it is already far past the contract tolerance scale.
    if (best_dln <= 1e-10) return best_y;
    throw convergence_error("invert_gamma_q: Newton did not converge", y, it);
}

} // namespace marq
