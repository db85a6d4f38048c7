#pragma once

#include <optional>

namespace marq {

enum class TailKind { Q, P };

/// Which tail is prescribed and its value. Callers should pass whichever
/// tail is the smaller one; nothing here ever forms 1 - p for tiny p.
struct TailSpec {
    TailKind kind = TailKind::Q;
    double value = 0.5;
};

enum class InvMethod { asymptotic, newton, secant, hybrid };
enum class Axis { x, y };

/// Outcome of an inversion. `residual` is |tail(recovered)/target - 1|
/// from an independent re-evaluation of the Marcum function.
struct InversionReport {
    double value = 0.0;
    std::optional<double> zeta0;
    std::optional<double> zeta1;
    InvMethod method = InvMethod::newton;
    int iterations = 0;
    double residual = 0.0;
};

/// Leading inversion coefficient: solves erfc(zeta0 sqrt(mu/2))/2 = value
/// for kind Q; the sign flips for the P-problem.
double zeta0_from_tail(double mu, TailSpec tail);

/// Asymptotic inversion of Q_mu(x, y) = q (or P) with respect to x at fixed
/// unscaled y. `order` 1 uses zeta0 only, 2 adds the zeta1/mu correction.
/// Throws no_solution_error when the target is not reachable (q <= Q_mu(0,y)).
InversionReport invert_x_asymptotic(double mu, double y, TailSpec tail,
                                    int order = 2);

/// Asymptotic inversion with respect to y at fixed unscaled x; any tail
/// value in (0, 1) is reachable.
InversionReport invert_y_asymptotic(double mu, double x, TailSpec tail,
                                    int order = 2);

/// Iterative inversion with convexity-certified starting values
/// (x+ = y - mu - 1/2, x- = y - mu - 1, or small positives when negative).
InversionReport invert_x_iterative(double mu, double y, TailSpec tail,
                                   InvMethod method = InvMethod::newton);

/// Iterative inversion in y with starts y- = x + mu - 3/2, y+ = x + mu - 1.
InversionReport invert_y_iterative(double mu, double x, TailSpec tail,
                                   InvMethod method = InvMethod::newton);

/// Asymptotic seed (mu >= 10) polished by a few secant steps on the series
/// evaluation; falls back to the certified iterative path when needed.
InversionReport invert_hybrid(double mu, double fixed_coord, TailSpec tail,
                              Axis axis);

/// Two-step workflow: y0 with Q_mu(0, y0) = q0, then x1 with
/// Q_mu(x1, y0) = q1. Requires q1 > q0 (q1 = q0 would give the boundary
/// solution x = 0).
struct TwoStepResult {
    double y0 = 0.0;
    double delta0 = 0.0;  // |Q_mu(y0)/q0 - 1|
    InversionReport x1;
};

TwoStepResult two_step(double mu, double q0, double q1,
                       InvMethod step2 = InvMethod::hybrid);

} // namespace marq
