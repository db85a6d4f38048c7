#include <cmath>
#include <random>

#include "doctest.h"
#include "marq/errors.hpp"
#include "marq/inversion.hpp"
#include "marq/marcum.hpp"
#include "marq/scalar.hpp"

using namespace marq;

namespace {

double rel(double got, double want) {
    return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

} // namespace

TEST_CASE("zeta0 from a tail") {
    CHECK(zeta0_from_tail(25.0, {TailKind::Q, 0.5}) == 0.0);
    CHECK(zeta0_from_tail(25.0, {TailKind::P, 0.2}) ==
          -zeta0_from_tail(25.0, {TailKind::Q, 0.2}));
    // erfc round trip: erfc(zeta0 sqrt(mu/2))/2 recovers the tail
    const double z0 = zeta0_from_tail(100.0, {TailKind::Q, 0.9});
    CHECK(rel(0.5 * marq::erfc(z0 * std::sqrt(50.0)), 0.9) <= 1e-13);
    CHECK_THROWS_AS(zeta0_from_tail(10.0, {TailKind::Q, 0.0}), domain_error);
    CHECK_THROWS_AS(zeta0_from_tail(10.0, {TailKind::Q, 1.0}), domain_error);
}

TEST_CASE("asymptotic inversion in x reproduces table-level accuracy") {
    {
        const double y0 = invert_gamma_q(10, 1e-6);
        const InversionReport r = invert_x_asymptotic(10, y0, {TailKind::Q, 0.9});
        CHECK(r.residual <= 1e-4);  // printed 1.23e-5
        CHECK(r.zeta0.has_value());
        CHECK(r.zeta1.has_value());
    }
    {
        const double y0 = invert_gamma_q(1000, 1e-6);
        const InversionReport r = invert_x_asymptotic(1000, y0, {TailKind::Q, 0.9});
        CHECK(r.residual <= 5e-7);  // printed 4.98e-8
    }
    // the boundary tail gives x = 0 exactly
    {
        const double y = 12.0;
        const double q_edge = gamma_ratios(5, y).q;
        const InversionReport r = invert_x_asymptotic(5, y, {TailKind::Q, q_edge});
        CHECK(r.value == 0.0);
    }
    // infeasible below the boundary
    {
        const double y = 12.0;
        const double q_edge = gamma_ratios(5, y).q;
        CHECK_THROWS_AS(invert_x_asymptotic(5, y, {TailKind::Q, 0.5 * q_edge}),
                        no_solution_error);
    }
}

TEST_CASE("asymptotic inversion in y reproduces table-level accuracy") {
    {
        const InversionReport r0 = invert_y_asymptotic(10, 10, {TailKind::Q, 0.5}, 1);
        const InversionReport r1 = invert_y_asymptotic(10, 10, {TailKind::Q, 0.5}, 2);
        CHECK(r0.residual <= 10.0 * 6.95e-2);
        CHECK(r1.residual <= 10.0 * 5.65e-4);
        CHECK(r1.residual < r0.residual);
    }
    {
        const InversionReport r = invert_y_asymptotic(1000, 1000, {TailKind::Q, 0.9999}, 2);
        CHECK(r.residual <= 3e-9);  // printed 2.91e-10
    }
    // q = 1/2: y ~ x + 1 + b1(x) d0(x)/mu in scaled variables
    {
        const double mu = 500.0, xs = 1.0;
        const InversionReport r = invert_y_asymptotic(mu, mu * xs, {TailKind::Q, 0.5}, 2);
        const double want = xs + 1.0 - (3.0 * xs + 1.0) / (3.0 * mu * (2.0 * xs + 1.0));
        CHECK(std::fabs(r.value / mu - want) <= 10.0 / (mu * mu));
    }
}

TEST_CASE("iterative inversion") {
    {
        const double q = marcum(7, 4, 12).q;
        const InversionReport r = invert_x_iterative(7, 12, {TailKind::Q, q});
        CHECK(rel(r.value, 4.0) <= 1e-10);
        CHECK(r.residual <= 1e-12);
        CHECK(r.iterations <= 30);
    }
    {
        const double q = marcum(7, 4, 9).q;
        const InversionReport r = invert_y_iterative(7, 4, {TailKind::Q, q});
        CHECK(rel(r.value, 9.0) <= 1e-10);
        CHECK(r.residual <= 1e-12);
    }
    // boundary tail in x gives 0
    {
        const double q_edge = gamma_ratios(3, 7).q;
        CHECK(invert_x_iterative(3, 7, {TailKind::Q, q_edge}).value == 0.0);
    }
    // deep Table-1-style configuration stays within the iteration budget
    {
        const double y0 = invert_gamma_q(50, 1e-8);
        const InversionReport r = invert_x_iterative(50, y0, {TailKind::Q, 0.999});
        CHECK(r.residual <= 1e-12);
        CHECK(r.iterations <= 15);
    }
    {
        const InversionReport r = invert_y_iterative(200, 200, {TailKind::Q, 1e-6});
        CHECK(r.residual <= 1e-12);
        CHECK(r.iterations <= 20);
    }
    // q -> 1 pushes the quantile toward the y = 0 boundary
    {
        const InversionReport r = invert_y_iterative(3, 2, {TailKind::Q, 1.0 - 1e-10});
        CHECK(r.value < 1e-2);
        CHECK(marcum(3, 2, r.value).q > 1.0 - 1e-9);
    }
    // secant variant agrees with Newton
    {
        const double q = marcum(12, 6, 20).q;
        const InversionReport rn = invert_x_iterative(12, 20, {TailKind::Q, q});
        const InversionReport rs =
            invert_x_iterative(12, 20, {TailKind::Q, q}, InvMethod::secant);
        CHECK(rel(rs.value, rn.value) <= 1e-9);
        CHECK(rs.method == InvMethod::secant);
    }
}

TEST_CASE("hybrid inversion") {
    {
        const InversionReport r = invert_hybrid(10, 10, {TailKind::Q, 0.5}, Axis::y);
        CHECK(r.residual <= 1e-13);  // asymptotic alone sits at 5.65e-4
        CHECK(r.method == InvMethod::hybrid);
    }
    {
        const InversionReport seed =
            invert_y_asymptotic(1e4, 1e4, {TailKind::Q, 0.9999}, 2);
        CHECK(seed.residual <= 1e-10);  // seed alone is already this good
        const InversionReport r = invert_hybrid(1e4, 1e4, {TailKind::Q, 0.9999}, Axis::y);
        CHECK(r.iterations <= seed.iterations + 4);  // polish has little to do
        CHECK(r.residual <= 1e-13);
    }
    // the degenerate tail 1/2 lands on the transition curve
    {
        const InversionReport r = invert_hybrid(100, 100, {TailKind::Q, 0.5}, Axis::y);
        CHECK(std::fabs(r.value - transition_y(100, 100)) <= 0.05);
    }
    // below the asymptotic threshold it falls back to certified iteration
    {
        const double q = marcum(3, 2, 4).q;
        const InversionReport r = invert_hybrid(3, 4, {TailKind::Q, q}, Axis::x);
        CHECK(rel(r.value, 2.0) <= 1e-9);
        CHECK(r.residual <= 1e-12);
    }
}

TEST_CASE("P/Q duality") {
    // Inverting the P-problem at p matches the Q-problem at 1-p to within
    // the residual bound. For tiny p the Q-side coordinate itself is only
    // determined to the conditioning limit of the complemented tail, so the
    // agreement is asserted in tail space: the P-solution also solves the
    // Q-problem within its residual bound.
    const double mu = 40.0, x = 55.0;
    for (double p : {0.2, 0.5, 0.9}) {
        const InversionReport rp = invert_hybrid(mu, x, {TailKind::P, p}, Axis::y);
        const InversionReport rq = invert_hybrid(mu, x, {TailKind::Q, 1.0 - p}, Axis::y);
        CHECK(rel(rp.value, rq.value) <= 1e-9);
        CHECK(rp.residual <= 1e-12);
    }
    for (double p : {1e-8, 1e-4}) {
        const InversionReport rp = invert_hybrid(mu, x, {TailKind::P, p}, Axis::y);
        CHECK(rp.residual <= 1e-12);
        CHECK(std::fabs(marcum(mu, x, rp.value).q / (1.0 - p) - 1.0) <= 1e-11);
    }
    // and for the x-inversion
    for (double p : {1e-6, 0.05}) {
        const double y0 = invert_gamma_q(30.0, 1e-4);
        const InversionReport rp = invert_hybrid(30.0, y0, {TailKind::P, p}, Axis::x);
        CHECK(rp.residual <= 1e-12);
        CHECK(std::fabs(marcum(30.0, rp.value, y0).q / (1.0 - p) - 1.0) <= 1e-11);
    }
}

TEST_CASE("two-step workflow") {
    {
        const TwoStepResult r = two_step(10, 0.4, 0.6, InvMethod::asymptotic);
        CHECK(r.delta0 <= 1e-13);
        CHECK(r.x1.residual <= 1e-3);  // printed 1.16e-4
    }
    {
        const TwoStepResult r = two_step(100, 1e-8, 0.999, InvMethod::asymptotic);
        CHECK(r.delta0 <= 1e-12);
        CHECK(r.x1.residual <= 2e-7);  // printed 1.97e-8
    }
    {
        const TwoStepResult r = two_step(50, 1e-6, 0.9);  // hybrid default
        CHECK(r.x1.residual <= 1e-12);
    }
    CHECK_THROWS_AS(two_step(10, 0.9, 0.5), no_solution_error);
    CHECK_THROWS_AS(two_step(10, 0.5, 0.5), no_solution_error);
    CHECK_THROWS_AS(two_step(10, 0.0, 0.5), domain_error);
}

TEST_CASE("branch correctness of the x-inversion") {
    std::mt19937_64 rng(40812);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const double mu = 20.0 + 400.0 * u01(rng);
        const double ys = 1.2 + 2.0 * u01(rng);
        const double y = mu * ys;
        const double q_lo = gamma_ratios(mu, y).q;
        // a target below 1/2 must land left of the scaled line, above right
        const double q1 = q_lo + (0.45 - q_lo) * u01(rng);
        if (q1 > q_lo && q1 < 0.5) {
            const InversionReport r = invert_x_asymptotic(mu, y, {TailKind::Q, q1});
            CHECK(r.value <= mu * (ys - 1.0) * (1.0 + 1e-9));
        }
        const double q2 = 0.55 + 0.44 * u01(rng);
        const InversionReport r2 = invert_x_asymptotic(mu, y, {TailKind::Q, q2});
        CHECK(r2.value >= mu * (ys - 1.0) * (1.0 - 1e-9));
    }
}
