#pragma once

#include <cmath>
#include <functional>

namespace marq::detail {

struct RootResult {
    double x = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct RootOptions {
    double xtol_rel = 1e-15;  // step convergence, relative to |x|
    double ftol = 0.0;        // absolute tolerance on |h|
    int max_iter = 30;
};

// Newton iteration on h(x) with a sign-change bracket [lo, hi] as safety
// net: steps that leave the open bracket, or non-finite steps, bisect
// instead. `increasing` states the sign structure: h(lo) < 0 < h(hi).
// The bracket shrinks with every evaluation, so the loop cannot escape.
template <class F, class DF>
RootResult newton_bracketed(F&& h, DF&& dh, double x0, double lo, double hi,
                            bool increasing, const RootOptions& opt = {}) {
    RootResult res;
    double x = std::fmin(std::fmax(x0, lo), hi);
    for (int it = 0; it < opt.max_iter; ++it) {
        res.iterations = it + 1;
        const double hv = h(x);
        res.x = x;
        if (std::fabs(hv) <= opt.ftol) {
            res.converged = true;
            return res;
        }
        if ((hv < 0.0) == increasing)
            lo = x;
        else
            hi = x;
        const double dv = dh(x);
        double xn = x - hv / dv;
        // step convergence comes before the containment clamp: at the root
        // the bracket may already have collapsed onto x itself
        if (std::isfinite(xn) &&
            std::fabs(xn - x) <= opt.xtol_rel * (std::fabs(x) + 1e-300)) {
            res.converged = true;
            return res;
        }
        if (!std::isfinite(xn) || xn <= lo || xn >= hi) xn = 0.5 * (lo + hi);
        if (std::fabs(xn - x) <= opt.xtol_rel * (std::fabs(x) + 1e-300)) {
            res.x = xn;
            res.converged = true;
            return res;
        }
        x = xn;
    }
    return res;
}

// Secant iteration with the same bracket safeguard. One bisection step
// replaces any iterate that escapes, then the secant resumes.
template <class F>
RootResult secant_bracketed(F&& h, double x0, double x1, double lo, double hi,
                            bool increasing, const RootOptions& opt = {}) {
    RootResult res;
    auto clamp = [&](double v) { return std::fmin(std::fmax(v, lo), hi); };
    double xa = clamp(x0), xb = clamp(x1);
    if (xa == xb) xb = clamp(xa + 1e-6 * (std::fabs(xa) + 1.0));
    double ha = h(xa);
    res.x = xa;
    if (std::fabs(ha) <= opt.ftol) {
        res.converged = true;
        res.iterations = 1;
        return res;
    }
    if ((ha < 0.0) == increasing) lo = std::fmax(lo, xa); else hi = std::fmin(hi, xa);
    for (int it = 0; it < opt.max_iter; ++it) {
        res.iterations = it + 2;
        double hb = h(xb);
        res.x = xb;
        if (std::fabs(hb) <= opt.ftol) {
            res.converged = true;
            return res;
        }
        if ((hb < 0.0) == increasing) lo = std::fmax(lo, xb); else hi = std::fmin(hi, xb);
        double xn = xb - hb * (xb - xa) / (hb - ha);
        if (std::isfinite(xn) &&
            std::fabs(xn - xb) <= opt.xtol_rel * (std::fabs(xb) + 1e-300)) {
            res.converged = true;
            return res;
        }
        if (!std::isfinite(xn) || xn <= lo || xn >= hi) xn = 0.5 * (lo + hi);
        if (std::fabs(xn - xb) <= opt.xtol_rel * (std::fabs(xb) + 1e-300)) {
            res.x = xn;
            res.converged = true;
            return res;
        }
        xa = xb;
        ha = hb;
        xb = xn;
    }
    return res;
}

} // namespace marq::detail
