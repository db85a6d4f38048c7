#include "marq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <queue>

#include "marq/errors.hpp"
#include "marq/inversion.hpp"
#include "marq/scalar.hpp"

namespace marq {

namespace {

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1].
constexpr double kNodes[8] = {
    0.000000000000000, 0.405845151377397, 0.741531185599394,
    0.949107912342759, 0.207784955007898, 0.586087235467691,
    0.864864423359769, 0.991455371120813};
constexpr double kGauss[4] = {0.417959183673469, 0.381830050505119,
                              0.279705391489277, 0.129484966168870};
constexpr double kKronrod[8] = {0.209482141084728, 0.190350578064785,
                                0.140653259715525, 0.063092092629979,
                                0.204432940075298, 0.169004726639267,
                                0.104790010322250, 0.022935322010529};

struct Panel {
    double a = 0.0, b = 0.0;
    double value = 0.0, err = 0.0;
    bool operator<(const Panel& o) const { return err < o.err; }
};

template <class F>
Panel gk15(const F& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f0 = f(mid);
    double g = kGauss[0] * f0;
    double k = kKronrod[0] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = half * kNodes[i];
        const double fi = f(mid + dx) + f(mid - dx);
        k += kKronrod[i] * fi;
        if (i < 4) g += kGauss[i] * fi;
    }
    Panel p;
    p.a = a;
    p.b = b;
    p.value = k * half;
    p.err = std::fabs(k - g) * half;
    return p;
}

template <class F>
double integrate_adaptive(const F& f, double a, double b, double sigma) {
    // initial panels no wider than the integrand's concentration scale
    const int n0 = std::clamp(static_cast<int>((b - a) / (2.0 * sigma)) + 1, 8, 256);
    std::priority_queue<Panel> panels;
    double total = 0.0, err = 0.0;
    for (int i = 0; i < n0; ++i) {
        Panel p = gk15(f, a + (b - a) * i / n0, a + (b - a) * (i + 1) / n0);
        total += p.value;
        err += p.err;
        panels.push(p);
    }
    int budget = 4000;
    while (err > std::max(1e-15, 1e-12 * std::fabs(total)) && budget-- > 0) {
        Panel worst = panels.top();
        panels.pop();
        total -= worst.value;
        err -= worst.err;
        const double mid = 0.5 * (worst.a + worst.b);
        for (Panel p : {gk15(f, worst.a, mid), gk15(f, mid, worst.b)}) {
            total += p.value;
            err += p.err;
            panels.push(p);
        }
    }
    if (err > std::max(1e-13, 1e-10 * std::fabs(total)))
        throw convergence_error("quadrature: requested accuracy not reached",
                                total, 4000 - budget);
    return total;
}

// Integrand of the defining integral in overflow-safe form:
//   t^{(mu-1)/2} e^{-t-x} I_{mu-1}(2 sqrt(xt)) x^{(1-mu)/2}
// assembled as exp(L) * [e^{-2 sqrt(xt)} I_{mu-1}(2 sqrt(xt))].
struct MarcumIntegrand {
    double mu, x;
    double operator()(double t) const {
        if (t <= 0.0) return mu > 1.0 ? 0.0 : std::exp(-x);
        if (x == 0.0) {
            const double le = (mu == 1.0 ? 0.0 : (mu - 1.0) * std::log(t)) - t -
                              std::lgamma(mu);
            return le < -745.0 ? 0.0 : std::exp(le);
        }
        const double sd = std::sqrt(t) - std::sqrt(x);
        const double le =
            (mu == 1.0 ? 0.0 : 0.5 * (mu - 1.0) * std::log(t / x)) - sd * sd +
            detail::bessel_i_scaled_log(mu - 1.0, 2.0 * std::sqrt(x * t));
        return le < -745.0 ? 0.0 : std::exp(le);
    }
};

void check_oracle_domain(double mu, double x, double y) {
    if (mu < 1.0) throw domain_error("quadrature oracle: order must be >= 1");
    if (mu > 200.0)
        throw domain_error("quadrature oracle: order above its 200 limit");
    if (x < 0.0 || y < 0.0)
        throw domain_error("quadrature oracle: negative argument");
}

// Directly integrated tail: Q over [y, y + 40 sqrt(mu+x) + 40] when y is
// past the transition line, P over [0, y] otherwise.
double quad_direct(double mu, double x, double y, bool& got_q) {
    const MarcumIntegrand f{mu, x};
    const double sigma = std::sqrt(mu + x);
    got_q = y > x + mu;
    if (got_q) {
        const double hi = y + 40.0 * sigma + 40.0;
        return integrate_adaptive(f, y, hi, sigma);
    }
    return integrate_adaptive(f, 0.0, y, sigma);
}

} // namespace

double quad_q(double mu, double x, double y) {
    check_oracle_domain(mu, x, y);
    if (y == 0.0) return 1.0;
    bool got_q = false;
    const double v = quad_direct(mu, x, y, got_q);
    return got_q ? v : 1.0 - v;
}

double quad_p(double mu, double x, double y) {
    check_oracle_domain(mu, x, y);
    if (y == 0.0) return 0.0;
    bool got_q = false;
    const double v = quad_direct(mu, x, y, got_q);
    return got_q ? 1.0 - v : v;
}

double relative_delta(double target, double recomputed) {
    if (recomputed == 0.0)
        throw domain_error("relative_delta: recomputed value is zero");
    return std::fabs(target / recomputed - 1.0);
}

namespace {

std::string scenario_qq(double q0, double q1) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "q0=%.3g;q1=%.3g", q0, q1);
    return buf;
}

std::string scenario_q_xmu(double q) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "q=%.4g;x=mu", q);
    return buf;
}

} // namespace

std::vector<TableRow> run_table1(
    const std::vector<double>& mu_list,
    const std::vector<std::pair<double, double>>& scenarios) {
    std::vector<TableRow> rows;
    for (double mu : mu_list) {
        for (const auto& [q0, q1] : scenarios) {
            const TwoStepResult r = two_step(mu, q0, q1, InvMethod::asymptotic);
            rows.push_back(TableRow{mu, scenario_qq(q0, q1), r.delta0, r.x1.residual});
        }
    }
    return rows;
}

std::vector<TableRow> run_table2(const std::vector<double>& mu_list,
                                 const std::vector<double>& q_list) {
    std::vector<TableRow> rows;
    for (double mu : mu_list) {
        for (double q : q_list) {
            const TailSpec tail{TailKind::Q, q};
            const InversionReport r0 = invert_y_asymptotic(mu, mu, tail, 1);
            const InversionReport r1 = invert_y_asymptotic(mu, mu, tail, 2);
            rows.push_back(TableRow{mu, scenario_q_xmu(q), r0.residual, r1.residual});
        }
    }
    return rows;
}

void write_csv(std::ostream& os, const std::vector<TableRow>& rows,
               bool full_precision) {
    os << "mu,scenario,delta0,delta1\n";
    const char* fmt = full_precision ? "%.2e,%s,%.16e,%.16e\n" : "%.2e,%s,%.2e,%.2e\n";
    for (const auto& r : rows) {
        char buf[256];
        std::snprintf(buf, sizeof buf, fmt, r.mu, r.scenario.c_str(), r.delta0,
                      r.delta1);
        os << buf;
    }
}

} // namespace marq
