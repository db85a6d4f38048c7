#include "marq/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "marq/detail/rootfind.hpp"
#include "marq/errors.hpp"
#include "marq/marcum.hpp"
#include "marq/scalar.hpp"
#include "marq/zeta.hpp"

namespace marq {

namespace {

void check_tail(const TailSpec& tail) {
    if (!(tail.value > 0.0 && tail.value < 1.0))
        throw domain_error("inversion: tail probability must lie in (0, 1)");
}

double requested_tail(const ProbabilityPair& pair, TailKind kind) {
    return kind == TailKind::Q ? pair.q : pair.p;
}

double tail_residual(double mu, double x, double y, const TailSpec& tail) {
    const double t = requested_tail(marcum(mu, x, y), tail.kind);
    return std::fabs(t / tail.value - 1.0);
}

// Tail value at x = 0 (the feasibility boundary of the x-problem).
double boundary_tail(double mu, double y, TailKind kind) {
    const GammaTailPair g = gamma_ratios(mu, y);
    return kind == TailKind::Q ? g.q : g.p;
}

// Feasibility of Q_mu(x, y) = tail in x >= 0. Returns true when the target
// sits on the boundary (solution x = 0) within tolerance, throws when it is
// beyond it, and returns false when an interior root exists.
bool check_x_feasible(double mu, double y, const TailSpec& tail) {
    const double bound = boundary_tail(mu, y, tail.kind);
    const bool interior = tail.kind == TailKind::Q ? tail.value > bound
                                                   : tail.value < bound;
    if (interior) return false;
    if (std::fabs(tail.value - bound) <= 1e-14 * bound) return true;
    throw no_solution_error(
        tail.kind == TailKind::Q
            ? "invert-x: q must exceed Q_mu(0, y); smaller targets have no root"
            : "invert-x: p must be below P_mu(0, y); larger targets have no root");
}

InversionReport boundary_report(double mu, double y, const TailSpec& tail,
                                InvMethod method) {
    InversionReport rep;
    rep.value = 0.0;
    rep.method = method;
    rep.iterations = 0;
    rep.residual = tail_residual(mu, 0.0, y, tail);
    return rep;
}

} // namespace

double zeta0_from_tail(double mu, TailSpec tail) {
    if (mu < 1.0) throw domain_error("zeta0_from_tail: order must be >= 1");
    check_tail(tail);
    const double z = std::sqrt(2.0 / mu) * inverfc(2.0 * tail.value);
    return tail.kind == TailKind::Q ? z : -z;
}

InversionReport invert_x_asymptotic(double mu, double y, TailSpec tail,
                                    int order) {
    if (mu < 1.0) throw domain_error("invert_x_asymptotic: order must be >= 1");
    if (y <= 0.0) throw domain_error("invert_x_asymptotic: y must be positive");
    check_tail(tail);
    if (check_x_feasible(mu, y, tail))
        return boundary_report(mu, y, tail, InvMethod::asymptotic);

    const double ys = y / mu;
    const double z0 = zeta0_from_tail(mu, tail);
    InversionReport rep;
    rep.method = InvMethod::asymptotic;
    rep.zeta0 = z0;

    auto solve = [&](double zt) {
        int it = 0;
        const Branch side = zt > 0.0 ? Branch::left : Branch::right;
        double xs;
        try {
            xs = invert_zeta_x(zt, ys, side, &it);
        } catch (const no_solution_error&) {
            // feasible in the exact problem but past the boundary of the
            // asymptotic one; clamp to the boundary
            xs = 0.0;
        }
        rep.iterations += it;
        return std::max(xs, 0.0);
    };

    double xs = solve(z0);
    if (order >= 2) {
        const double z1 = zeta1(z0, xs, ys);
        rep.zeta1 = z1;
        xs = solve(z0 + z1 / mu);
    }
    rep.value = mu * xs;
    rep.residual = tail_residual(mu, rep.value, y, tail);
    return rep;
}

InversionReport invert_y_asymptotic(double mu, double x, TailSpec tail,
                                    int order) {
    if (mu < 1.0) throw domain_error("invert_y_asymptotic: order must be >= 1");
    if (x < 0.0) throw domain_error("invert_y_asymptotic: x must be nonnegative");
    check_tail(tail);

    const double xs = x / mu;
    const double z0 = zeta0_from_tail(mu, tail);
    InversionReport rep;
    rep.method = InvMethod::asymptotic;
    rep.zeta0 = z0;

    int it = 0;
    double ys = invert_zeta_y(z0, xs, &it);
    rep.iterations += it;
    if (order >= 2) {
        const double z1 = zeta1(z0, xs, ys);
        rep.zeta1 = z1;
        ys = invert_zeta_y(z0 + z1 / mu, xs, &it);
        rep.iterations += it;
    }
    rep.value = mu * ys;
    rep.residual = tail_residual(mu, x, rep.value, tail);
    return rep;
}

namespace {

struct IterSetup {
    double start = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    int evals = 0;
};

// Starting value and bracket for the x-problem, following the convexity
// certificates: concave side for roots right of x+, convex side left of x-.
IterSetup setup_x(double mu, double y, const TailSpec& tail) {
    IterSetup s;
    const double eps0 = 1e-3 * mu;
    const double xplus = y - mu - 0.5;
    const double xminus = y - mu - 1.0;
    auto tail_at = [&](double xx) {
        ++s.evals;
        return requested_tail(marcum(mu, xx, y), tail.kind);
    };
    // root side by comparing the target against the tail at the starts;
    // the requested tail of Q is increasing in x, of P decreasing
    auto right_of = [&](double xx) {
        const double t = tail_at(xx);
        return tail.kind == TailKind::Q ? tail.value > t : tail.value < t;
    };

    s.lo = 0.0;
    if (xplus <= 0.0) {
        s.start = eps0;
    } else if (right_of(xplus)) {
        s.start = xplus;  // concave region, monotone Newton from x+
    } else if (xminus > 0.0 && !right_of(xminus)) {
        s.start = xminus; // convex region, monotone Newton from x-
    } else {
        s.start = 0.5 * (std::max(xminus, 0.0) + xplus);
    }
    double hi = std::max({2.0 * s.start, xplus + 1.0, y + mu, 4.0 * mu});
    // expand while the root is still to the right of hi
    for (int i = 0; i < 200 && right_of(hi); ++i) hi *= 2.0;
    s.hi = hi;
    return s;
}

IterSetup setup_y(double mu, double x, const TailSpec& tail) {
    IterSetup s;
    const double eps0 = 1e-3 * mu;
    const double yplus = x + mu - 1.0;
    const double yminus = x + mu - 1.5;
    auto tail_at = [&](double yy) {
        ++s.evals;
        return requested_tail(marcum(mu, x, yy), tail.kind);
    };
    // the requested tail of Q is decreasing in y, of P increasing
    auto right_of = [&](double yy) {
        const double t = tail_at(yy);
        return tail.kind == TailKind::Q ? tail.value < t : tail.value > t;
    };

    s.lo = 0.0;
    if (yplus <= 0.0) {
        s.start = eps0;
    } else if (right_of(yplus)) {
        s.start = yplus;  // convex region right of y+
    } else if (yminus > 0.0 && !right_of(yminus)) {
        s.start = std::max(yminus, 0.5 * eps0);
    } else {
        s.start = 0.5 * (std::max(yminus, 0.0) + yplus);
    }
    double hi = std::max({2.0 * s.start, yplus + 1.0,
                          x + mu + 10.0 * std::sqrt(x + mu) + 10.0});
    for (int i = 0; i < 200 && right_of(hi); ++i) hi *= 2.0;
    s.hi = hi;
    return s;
}

} // namespace

namespace {

// Newton/secant on the log of the requested tail: deep tails span hundreds
// of e-folds over the search interval, where the linear-scale iteration
// crawls one e-fold per step. ln(tail) is nearly linear in the coordinate,
// so both methods converge in a handful of steps at any magnitude.
// `slope` returns d(tail)/d(coord); `increasing` is the tail's direction.
template <class TailFn, class SlopeFn>
detail::RootResult solve_tail_log(TailFn&& tail_at, SlopeFn&& slope,
                                  double target, double start, double lo,
                                  double hi, bool increasing, bool use_newton,
                                  double ftol) {
    const double lt = std::log(target);
    detail::RootResult res;
    double x = std::fmin(std::fmax(start, lo), hi);
    double prev_x = x, prev_h = 0.0;
    bool have_prev = false;
    for (int it = 0; it < 30; ++it) {
        res.iterations = it + 1;
        const double t = tail_at(x);
        const double hv = t > 0.0 ? std::log(t) - lt
                                  : -std::numeric_limits<double>::infinity();
        res.x = x;
        if (std::fabs(hv) <= ftol) {
            res.converged = true;
            return res;
        }
        if ((hv < 0.0) == increasing) lo = x; else hi = x;
        double xn;
        if (!std::isfinite(hv)) {
            xn = 0.5 * (lo + hi);
        } else if (use_newton) {
            xn = x - hv * t / slope(x);
        } else if (have_prev && prev_h != hv) {
            xn = x - hv * (x - prev_x) / (hv - prev_h);
        } else {
            // first step of the secant: nudge off the start
            xn = x + (increasing == (hv < 0.0) ? 1.0 : -1.0) *
                         std::max(1e-3 * (std::fabs(x) + 1.0), 1e-6);
        }
        prev_x = x;
        prev_h = hv;
        have_prev = std::isfinite(hv);
        if (std::isfinite(xn) &&
            std::fabs(xn - x) <= 1e-15 * (std::fabs(x) + 1e-300)) {
            res.converged = true;
            return res;
        }
        if (!std::isfinite(xn) || xn <= lo || xn >= hi) xn = 0.5 * (lo + hi);
        if (std::fabs(xn - x) <= 1e-15 * (std::fabs(x) + 1e-300)) {
            res.x = xn;
            res.converged = true;
            return res;
        }
        x = xn;
    }
    return res;
}

} // namespace

InversionReport invert_x_iterative(double mu, double y, TailSpec tail,
                                   InvMethod method) {
    if (mu < 1.0) throw domain_error("invert_x_iterative: order must be >= 1");
    if (y <= 0.0) throw domain_error("invert_x_iterative: y must be positive");
    check_tail(tail);
    if (check_x_feasible(mu, y, tail))
        return boundary_report(mu, y, tail, method);

    IterSetup s = setup_x(mu, y, tail);
    auto tail_at = [&](double xx) {
        return requested_tail(marcum(mu, xx, y), tail.kind);
    };
    auto slope = [&](double xx) {
        const double d = dq_dx(MarcumParams{mu, std::max(xx, 1e-300), y});
        return tail.kind == TailKind::Q ? d : -d;
    };
    const bool increasing = tail.kind == TailKind::Q;
    detail::RootResult r =
        solve_tail_log(tail_at, slope, tail.value, s.start, s.lo, s.hi,
                       increasing, method != InvMethod::secant, 5e-13);
    if (!r.converged)
        throw convergence_error("invert_x_iterative: no convergence", r.x,
                                r.iterations);
    InversionReport rep;
    rep.value = r.x;
    rep.method = method == InvMethod::secant ? InvMethod::secant : InvMethod::newton;
    rep.iterations = r.iterations + s.evals;
    rep.residual = tail_residual(mu, r.x, y, tail);
    return rep;
}

InversionReport invert_y_iterative(double mu, double x, TailSpec tail,
                                   InvMethod method) {
    if (mu < 1.0) throw domain_error("invert_y_iterative: order must be >= 1");
    if (x < 0.0) throw domain_error("invert_y_iterative: x must be nonnegative");
    check_tail(tail);

    IterSetup s = setup_y(mu, x, tail);
    auto tail_at = [&](double yy) {
        return requested_tail(marcum(mu, x, yy), tail.kind);
    };
    auto slope = [&](double yy) {
        const double d = dq_dy(MarcumParams{mu, x, std::max(yy, 1e-300)});
        return tail.kind == TailKind::Q ? d : -d;
    };
    // the requested tail of Q falls with y, of P rises
    const bool increasing = tail.kind == TailKind::P;
    detail::RootResult r =
        solve_tail_log(tail_at, slope, tail.value, s.start, s.lo, s.hi,
                       increasing, method != InvMethod::secant, 5e-13);
    if (!r.converged)
        throw convergence_error("invert_y_iterative: no convergence", r.x,
                                r.iterations);
    InversionReport rep;
    rep.value = r.x;
    rep.method = method == InvMethod::secant ? InvMethod::secant : InvMethod::newton;
    rep.iterations = r.iterations + s.evals;
    rep.residual = tail_residual(mu, x, r.x, tail);
    return rep;
}

InversionReport invert_hybrid(double mu, double fixed_coord, TailSpec tail,
                              Axis axis) {
    if (mu < 1.0) throw domain_error("invert_hybrid: order must be >= 1");
    check_tail(tail);

    InversionReport seed;
    bool seeded = false;
    if (mu >= 10.0) {
        try {
            seed = axis == Axis::x
                       ? invert_x_asymptotic(mu, fixed_coord, tail)
                       : invert_y_asymptotic(mu, fixed_coord, tail);
            seeded = true;
        } catch (const no_solution_error&) {
            throw;  // genuinely infeasible, not a seeding problem
        } catch (const convergence_error&) {
            seeded = false;
        }
    }
    if (!seeded) {
        InversionReport rep = axis == Axis::x
                                  ? invert_x_iterative(mu, fixed_coord, tail)
                                  : invert_y_iterative(mu, fixed_coord, tail);
        rep.method = InvMethod::hybrid;
        return rep;
    }
    if (axis == Axis::x && seed.value == 0.0) {
        seed.method = InvMethod::hybrid;
        return seed;  // boundary solution, nothing to polish
    }

    // secant polish on the log of the series evaluation (the seed may still
    // be many e-folds off for extreme tails)
    const double lt = std::log(tail.value);
    auto h = [&](double v) {
        const double t = axis == Axis::x
                             ? requested_tail(marcum(mu, v, fixed_coord), tail.kind)
                             : requested_tail(marcum(mu, fixed_coord, v), tail.kind);
        return std::log(std::max(t, 5e-324)) - lt;
    };
    double v0 = seed.value;
    double v1 = v0 * (1.0 + 1e-4) + 1e-9;
    double h0 = h(v0);
    int polish_iters = 0;
    double best = v0, best_h = std::fabs(h0);
    const double ftol = 1e-13;
    for (int i = 0; i < 10 && best_h > ftol; ++i) {
        ++polish_iters;
        const double h1 = h(v1);
        if (std::fabs(h1) < best_h) {
            best = v1;
            best_h = std::fabs(h1);
        }
        if (std::fabs(h1) <= ftol) break;
        const double denom = h1 - h0;
        double vn = denom != 0.0 ? v1 - h1 * (v1 - v0) / denom : v1;
        if (!std::isfinite(vn) || vn < 0.0) vn = 0.5 * (v1 + (vn < 0.0 ? 0.0 : v0));
        if (vn == v1) break;
        v0 = v1;
        h0 = h1;
        v1 = vn;
    }

    InversionReport rep = seed;
    rep.method = InvMethod::hybrid;
    rep.value = best;
    rep.iterations = seed.iterations + polish_iters;
    rep.residual = axis == Axis::x
                       ? tail_residual(mu, best, fixed_coord, tail)
                       : tail_residual(mu, fixed_coord, best, tail);
    // the certified iterative path is the backstop when polishing stalls
    if (rep.residual > 1e-12) {
        InversionReport it = axis == Axis::x
                                 ? invert_x_iterative(mu, fixed_coord, tail)
                                 : invert_y_iterative(mu, fixed_coord, tail);
        if (it.residual < rep.residual) {
            it.method = InvMethod::hybrid;
            it.zeta0 = rep.zeta0;
            it.zeta1 = rep.zeta1;
            it.iterations += rep.iterations;
            return it;
        }
    }
    return rep;
}

TwoStepResult two_step(double mu, double q0, double q1, InvMethod step2) {
    if (mu < 1.0) throw domain_error("two_step: order must be >= 1");
    if (!(q0 > 0.0 && q0 < 1.0) || !(q1 > 0.0 && q1 < 1.0))
        throw domain_error("two_step: q0 and q1 must lie in (0, 1)");
    if (q1 <= q0)
        throw no_solution_error(
            "two_step: q1 must exceed q0 (q1 = q0 corresponds to the boundary "
            "solution x = 0)");

    TwoStepResult out;
    out.y0 = invert_gamma_q(mu, q0);
    out.delta0 = std::fabs(gamma_ratios(mu, out.y0).q / q0 - 1.0);
    const TailSpec tail{TailKind::Q, q1};
    switch (step2) {
        case InvMethod::asymptotic:
            out.x1 = invert_x_asymptotic(mu, out.y0, tail);
            break;
        case InvMethod::newton:
        case InvMethod::secant:
            out.x1 = invert_x_iterative(mu, out.y0, tail, step2);
            break;
        case InvMethod::hybrid:
            out.x1 = invert_hybrid(mu, out.y0, tail, Axis::x);
            break;
    }
    return out;
}

} // namespace marq
