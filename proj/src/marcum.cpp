#include "marq/marcum.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "marq/errors.hpp"
#include "marq/scalar.hpp"
#include "marq/zeta.hpp"

namespace marq {

namespace {

constexpr double kPi = std::numbers::pi;

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

void check_domain(const MarcumParams& p) {
    if (!(p.mu >= 1.0)) throw domain_error("marcum: order must be >= 1");
    if (!(p.x >= 0.0 && p.x < 1e15))
        throw domain_error("marcum: x must be nonnegative and finite");
    if (!(p.y >= 0.0 && p.y < 1e15))
        throw domain_error("marcum: y must be nonnegative and finite");
    if (p.mu > 1e4 && !p.unrestricted_mu)
        throw domain_error("marcum: order above the 1e4 double-precision limit "
                           "(set unrestricted_mu to override)");
}

// Poisson weight e^{-x} x^n / n! (= the dominant gamma part at integer order).
double poisson_weight(long long n, double x) {
    if (n == 0) return std::exp(-x);
    return detail::gamma_dominant(static_cast<double>(n), x);
}

// One direction of the mixture sum, starting just outside the anchor index.
// `up` walks n upward (weight ratio x/(n+1)), else downward. `tail_step` is
// +1 when the tracked gamma ratio grows by +D in that direction.
void sum_direction(Accum& acc, bool direct_q, bool up, long long nstart,
                   double mu, double x, double y, double w_anchor,
                   double t_anchor, double d_anchor) {
    double w = w_anchor, t = t_anchor, d = d_anchor;
    double t_ref = t_anchor;
    long long n = nstart;
    for (int steps = 1; steps < 200000; ++steps, n += up ? 1 : -1) {
        if (!up && n < 0) break;
        const double a = mu + static_cast<double>(n);  // tail order after this step
        if (up) {
            // Q_{a} = Q_{a-1} + D(a-1), P_{a} = P_{a-1} - D(a-1)
            t += direct_q ? d : -d;
            d *= y / a;
            w *= x / static_cast<double>(n);
        } else {
            d *= (a + 1.0) / y;   // D(a) from D(a+1)
            t += direct_q ? -d : d;
            w *= (static_cast<double>(n) + 1.0) / x;
        }
        if (steps % 200 == 0 || t < 1e-3 * t_ref || t <= 0.0 || d <= 0.0) {
            // fresh anchors: stops drift of the recurrences, rescues the
            // subtracting direction when cancellation sets in, and revives
            // stretches where the carried values underflowed to zero while
            // the true terms re-enter the representable range (the mixture
            // saddle can sit far from the Poisson mode)
            const GammaTailPair g = gamma_ratios(a, y);
            t = direct_q ? g.q : g.p;
            d = detail::gamma_dominant(a, y);
            w = poisson_weight(n, x);
            t_ref = t;
        }
        acc.add(w * t);
        // remaining mass bound: weights are eventually geometric, tails <= 1
        const double r = up ? x / (static_cast<double>(n) + 1.0)
                            : static_cast<double>(n) / x;
        if (r < 1.0) {
            const double bound = w * r / (1.0 - r);
            if (bound <= 1e-17 * acc.sum) break;
        }
    }
}

ProbabilityPair marcum_series(const MarcumParams& pr) {
    const double mu = pr.mu, x = pr.x, y = pr.y;
    const bool direct_q = y > x + mu;

    const long long nstar = static_cast<long long>(x);
    const double w0 = poisson_weight(nstar, x);
    const GammaTailPair g0 = gamma_ratios(mu + static_cast<double>(nstar), y);
    const double t0 = direct_q ? g0.q : g0.p;
    const double d0v = detail::gamma_dominant(mu + static_cast<double>(nstar), y);

    Accum acc;
    acc.add(w0 * t0);
    sum_direction(acc, direct_q, true, nstar + 1, mu, x, y, w0, t0, d0v);
    if (nstar > 0)
        sum_direction(acc, direct_q, false, nstar - 1, mu, x, y, w0, t0, d0v);

    double direct = acc.sum;
    if (direct < 0.0) direct = 0.0;
    if (direct > 1.0) direct = 1.0;
    ProbabilityPair out;
    out.method = Method::series;
    if (direct_q) {
        out.q = direct;
        out.p = 1.0 - direct;
    } else {
        out.p = direct;
        out.q = 1.0 - direct;
    }
    return out;
}

} // namespace

ProbabilityPair marcum(const MarcumParams& params) {
    check_domain(params);
    if (params.y == 0.0) return {1.0, 0.0, Method::closed_form};
    if (params.x == 0.0) {
        const GammaTailPair g = gamma_ratios(params.mu, params.y);
        return {g.q, g.p, Method::closed_form};
    }
    return marcum_series(params);
}

ProbabilityPair marcum(double mu, double x, double y) {
    return marcum(MarcumParams{mu, x, y, false});
}

ProbabilityPair marcum_asymptotic(const MarcumParams& params) {
    check_domain(params);
    if (params.y == 0.0) return {1.0, 0.0, Method::closed_form};
    const double mu = params.mu;
    const double xs = params.x / mu;
    const double ys = params.y / mu;
    const double z = zeta(xs, ys).zeta;
    const double remainder =
        std::exp(-0.5 * mu * z * z) / std::sqrt(2.0 * kPi * mu) * d0(z, xs, ys);
    ProbabilityPair out;
    out.method = Method::asymptotic;
    if (z >= 0.0) {
        out.q = 0.5 * erfc(z * std::sqrt(0.5 * mu)) - remainder;
        out.q = std::fmin(std::fmax(out.q, 0.0), 1.0);
        out.p = 1.0 - out.q;
    } else {
        out.p = 0.5 * erfc(-z * std::sqrt(0.5 * mu)) + remainder;
        out.p = std::fmin(std::fmax(out.p, 0.0), 1.0);
        out.q = 1.0 - out.p;
    }
    return out;
}

double dq_dx(const MarcumParams& params) {
    check_domain(params);
    if (params.x == 0.0)
        throw domain_error("dq_dx: x must be positive (gamma-density limit at 0)");
    if (params.y == 0.0) return 0.0;
    const double mu = params.mu, x = params.x, y = params.y;
    const double xi = 2.0 * std::sqrt(x * y);
    const double sd = std::sqrt(x) - std::sqrt(y);
    // the power prefactor and the Bessel factor routinely over/underflow
    // individually; only their combined exponent is representable
    const double le = 0.5 * mu * std::log(y / x) - sd * sd +
                      detail::bessel_i_scaled_log(mu, xi);
    return le < -745.0 ? 0.0 : std::exp(le);
}

double dq_dy(const MarcumParams& params) {
    check_domain(params);
    const double mu = params.mu, x = params.x, y = params.y;
    if (y == 0.0) return mu > 1.0 ? 0.0 : -std::exp(-x);
    if (x == 0.0) {
        const double le = (mu == 1.0 ? 0.0 : (mu - 1.0) * std::log(y)) - y -
                          std::lgamma(mu);
        return le < -745.0 ? 0.0 : -std::exp(le);
    }
    const double xi = 2.0 * std::sqrt(x * y);
    const double sd = std::sqrt(x) - std::sqrt(y);
    const double le = 0.5 * (mu - 1.0) * std::log(y / x) - sd * sd +
                      detail::bessel_i_scaled_log(mu - 1.0, xi);
    return le < -745.0 ? 0.0 : -std::exp(le);
}

double c_mu(double mu, double x, double y) {
    if (mu <= 0.0) throw domain_error("c_mu: order must be positive");
    if (x < 0.0 || y < 0.0) throw domain_error("c_mu: negative argument");
    if (x == 0.0 || y == 0.0) return y / mu;
    const double xi = 2.0 * std::sqrt(x * y);
    // I_mu / I_{mu-1} by the Gautschi continued fraction; never under/overflows
    const double tiny = 1e-300;
    double c = 2.0 * mu / xi;
    double cc = c, dd = 0.0;
    double h = c;
    for (int k = 1; k < 1000; ++k) {
        const double b = 2.0 * (mu + k) / xi;
        dd = b + dd;
        if (std::fabs(dd) < tiny) dd = tiny;
        cc = b + 1.0 / cc;
        if (std::fabs(cc) < tiny) cc = tiny;
        dd = 1.0 / dd;
        const double delta = cc * dd;
        h *= delta;
        if (std::fabs(delta - 1.0) <= 1e-16) break;
    }
    return std::sqrt(y / x) / h;
}

RecurrenceResiduals recurrence_check(const MarcumParams& params) {
    check_domain(params);
    if (params.x <= 0.0 || params.y <= 0.0)
        throw domain_error("recurrence_check: requires x > 0 and y > 0");
    const double mu = params.mu, x = params.x, y = params.y;
    const double q_mid = marcum(mu, x, y).q;
    const double q_up = marcum(mu + 1.0, x, y).q;
    const double term = dq_dx(params);

    RecurrenceResiduals out;
    const double n1 = std::fmax(std::fmax(q_up, q_mid), term);
    out.additive = std::fabs(q_up - q_mid - term) / n1;

    if (mu >= 2.0) {
        const double q_dn = marcum(mu - 1.0, x, y).q;
        const double c = c_mu(mu, x, y);
        const double n2 =
            std::fmax(std::fmax(q_up, (1.0 + c) * q_mid), c * q_dn);
        out.ttrr = std::fabs(q_up - (1.0 + c) * q_mid + c * q_dn) / n2;
    } else {
        out.ttrr = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

ConvexityCertificate convexity_bounds(double mu, double x, double y) {
    ConvexityCertificate cert;
    if (mu > 0.0) {
        if (x > y - mu - 0.5)
            cert.in_x = Curvature::concave;
        else if (x < y - mu - 1.0)
            cert.in_x = Curvature::convex;
    }
    if (mu >= 1.5) {
        if (y > x + mu - 1.0)
            cert.in_y = Curvature::convex;
        else if (y < x + mu - 1.5)
            cert.in_y = Curvature::concave;
    }
    return cert;
}

double transition_y(double mu, double x) {
    if (mu < 1.0) throw domain_error("transition_y: order must be >= 1");
    if (x < 0.0) throw domain_error("transition_y: x must be nonnegative");
    const double xs = x / mu;
    return x + mu - (3.0 * xs + 1.0) / (3.0 * (2.0 * xs + 1.0));
}

} // namespace marq
