#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "marq/errors.hpp"
#include "marq/marcum.hpp"
#include "marq/scalar.hpp"
#include "marq/zeta.hpp"

using namespace marq;

namespace {

double rel(double got, double want) {
    return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

} // namespace

TEST_CASE("closed forms and domain") {
    CHECK(marcum(5, 3, 0).q == 1.0);
    CHECK(marcum(5, 3, 0).p == 0.0);
    CHECK(rel(marcum(1, 0, 2).q, std::exp(-2.0)) <= 1e-14);
    CHECK(marcum(3, 0, 5).q == gamma_ratios(3, 5).q);
    CHECK_THROWS_AS(marcum(0.5, 1, 1), domain_error);
    CHECK_THROWS_AS(marcum(2, -1, 1), domain_error);
    CHECK_THROWS_AS(marcum(2, 1, -1), domain_error);
    CHECK_THROWS_AS(marcum(2e4, 1, 1), domain_error);  // soft order limit
    CHECK(marcum(MarcumParams{2e4, 1.0, 1.0, true}).q > 0.0);
}

TEST_CASE("series evaluation against references") {
    // reference values: mpmath, 50 digits
    CHECK(rel(marcum(3, 2, 7).q, 0.2020357694543503847688) <= 1e-12);
    CHECK(rel(marcum(7, 4, 12).q, 0.3596430850887050066554) <= 1e-12);
    CHECK(rel(marcum(7, 4, 9).q, 0.6684049289050399129470) <= 1e-12);
    CHECK(rel(marcum(10, 5, 20).q, 0.1337405898968435166621) <= 1e-12);
    CHECK(rel(marcum(100, 80, 150).q, 0.9735730173114304527789) <= 1e-12);
    CHECK(rel(marcum(100, 80, 150).p, 0.02642698268856954722111) <= 1e-12);
    CHECK(rel(marcum(1, 0.3, 2.6).q, 0.1344191017363241005480) <= 1e-12);
    CHECK(rel(marcum(25, 100, 90).q, 0.9938774433391966908102) <= 1e-12);
    CHECK(rel(marcum(25, 100, 90).p, 0.006122556660803309189786) <= 1e-12);
}

TEST_CASE("pair identity and monotonicity") {
    std::mt19937_64 rng(55021);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        const double mu = std::exp(std::log(9.8e3) * u01(rng));
        const double x = 3.0 * mu * u01(rng) + 1e-3;
        const double y = 3.0 * mu * u01(rng) + 1e-3;
        const ProbabilityPair pr = marcum(mu, x, y);
        CHECK(std::fabs(pr.p + pr.q - 1.0) <= 4.0 * 2.23e-16);
        const double dx = 1e-3 * (1.0 + x);
        CHECK(marcum(mu, x + dx, y).q >= pr.q - 1e-13);   // increasing in x
        CHECK(marcum(mu, x, y + dx).q <= pr.q + 1e-13);   // decreasing in y
        CHECK(marcum(mu * 1.01, x, y).q >= pr.q - 1e-13); // increasing in mu
    }
}

TEST_CASE("derivatives") {
    const MarcumParams p{4, 3, 5, false};
    const double h = 3e-6;
    CHECK(rel(dq_dx(p), (marcum(4, 3 + h, 5).q - marcum(4, 3 - h, 5).q) / (2 * h)) <= 1e-6);
    CHECK(rel(dq_dy(p), (marcum(4, 3, 5 + h).q - marcum(4, 3, 5 - h).q) / (2 * h)) <= 1e-6);
    // x -> 0: dq_dy reduces to the negative gamma density
    CHECK(rel(dq_dy(MarcumParams{1, 0, 1, false}), -std::exp(-1.0)) <= 1e-14);
    CHECK_THROWS_AS(dq_dx(MarcumParams{2, 0, 1, false}), domain_error);

    std::mt19937_64 rng(1733);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double mu = 1.0 + 99.0 * u01(rng);
        const double x = 0.5 + 2.0 * mu * u01(rng);
        const double y = 0.5 + 2.0 * mu * u01(rng);
        CHECK(dq_dx(MarcumParams{mu, x, y, false}) > 0.0);
        CHECK(dq_dy(MarcumParams{mu, x, y, false}) < 0.0);
    }
}

TEST_CASE("recurrences") {
    const RecurrenceResiduals r1 = recurrence_check({5, 2, 3, false});
    CHECK(r1.additive <= 1e-12);
    CHECK(r1.ttrr <= 1e-12);
    const RecurrenceResiduals r2 = recurrence_check({3, 4, 4, false});
    CHECK(r2.additive <= 1e-12);
    CHECK(r2.ttrr <= 1e-12);
    CHECK(std::isnan(recurrence_check({1.5, 2, 3, false}).ttrr));

    // c_mu(0, y) = y / mu
    CHECK(rel(c_mu(4, 1e-22, 2.0), 0.5) <= 1e-9);
    CHECK(rel(c_mu(3, 4, 4),
              bessel_i_scaled(3, 8) / bessel_i_scaled(2, 8)) <= 1e-12);

    std::mt19937_64 rng(90021);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 150; ++i) {
        const double mu = 2.0 + 998.0 * u01(rng);
        const double x = 3.0 * mu * u01(rng) + 1e-2;
        const double y = 3.0 * mu * u01(rng) + 1e-2;
        const RecurrenceResiduals r = recurrence_check({mu, x, y, false});
        CHECK(r.additive <= 1e-12);
        CHECK(r.ttrr <= 1e-12);
    }
}

TEST_CASE("asymptotic representation") {
    // against the series across the mu range
    for (double mu : {100.0, 1000.0, 10000.0}) {
        const double x = mu, y = 2.0 * mu + 0.3 * mu;
        const double qa = marcum_asymptotic({mu, x, y, false}).q;
        const double qs = marcum(mu, x, y).q;
        CHECK(rel(qa, qs) <= 50.0 / (mu * mu));
    }
    // at the scaled transition line zeta = 0 the pair reduces to
    // 1/2 -+ d0(0+)/sqrt(2 pi mu) with d0(0+) = (3x'+1)/(3(2x'+1)^{3/2})
    for (double mu : {100.0, 400.0}) {
        for (double xs : {0.5, 1.0, 2.0}) {
            const ProbabilityPair pr = marcum_asymptotic({mu, mu * xs, mu * (xs + 1.0), false});
            const double lim = (3.0 * xs + 1.0) / (3.0 * std::pow(2.0 * xs + 1.0, 1.5));
            const double want = 0.5 - lim / std::sqrt(2.0 * std::numbers::pi * mu);
            CHECK(rel(pr.q, want) <= 1e-13);
        }
    }
    // x = 0 reduces to the incomplete gamma representation: d0 collapses to
    // 1/zeta - 1/(y-1) with zeta = eta(y)
    {
        const double ys = 1.7;
        const double z = zeta(0.0, ys).zeta;
        CHECK(rel(z, eta_of_y(ys).eta) <= 1e-14);
        CHECK(rel(d0(z, 0.0, ys), 1.0 / z - 1.0 / (ys - 1.0)) <= 1e-12);
    }
}

TEST_CASE("convexity certificates") {
    CHECK(convexity_bounds(2, 10, 5).in_x == Curvature::concave);   // x > y-mu-1/2
    CHECK(convexity_bounds(2, 1, 10).in_x == Curvature::convex);    // x < y-mu-1
    CHECK(convexity_bounds(2, 7.2, 10).in_x == Curvature::indeterminate);
    CHECK(convexity_bounds(2, 1, 10).in_y == Curvature::convex);    // y > x+mu-1
    CHECK(convexity_bounds(2, 10, 5).in_y == Curvature::concave);   // y < x+mu-3/2
    CHECK(convexity_bounds(1.2, 1, 10).in_y == Curvature::indeterminate);

    std::mt19937_64 rng(66120);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double mu = 2.0 + 48.0 * u01(rng);
        const double x = 0.5 + 30.0 * u01(rng);
        const double y = 0.5 + 30.0 * u01(rng);
        const ConvexityCertificate cert = convexity_bounds(mu, x, y);
        const double hx = 1e-3 * (1.0 + x);
        const double d2x = (marcum(mu, x + hx, y).q - 2.0 * marcum(mu, x, y).q +
                            marcum(mu, x - hx, y).q) / (hx * hx);
        if (cert.in_x == Curvature::concave) CHECK(d2x <= 1e-10);
        if (cert.in_x == Curvature::convex) CHECK(d2x >= -1e-10);
        const double hy = 1e-3 * (1.0 + y);
        const double d2y = (marcum(mu, x, y + hy).q - 2.0 * marcum(mu, x, y).q +
                            marcum(mu, x, y - hy).q) / (hy * hy);
        if (cert.in_y == Curvature::convex) CHECK(d2y >= -1e-10);
        if (cert.in_y == Curvature::concave) CHECK(d2y <= 1e-10);
    }
}

TEST_CASE("transition line") {
    CHECK(transition_y(7.0, 0.0) == 7.0 - 1.0 / 3.0);
    std::mt19937_64 rng(31007);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double mu = 1.0 + 999.0 * u01(rng);
        const double x = 5.0 * mu * u01(rng);
        const double d = transition_y(mu, x) - (x + mu);
        CHECK(d > -0.5);
        CHECK(d <= -1.0 / 3.0);
    }
    const double e10 = std::fabs(marcum(10, 10, transition_y(10, 10)).q - 0.5);
    const double e100 = std::fabs(marcum(100, 100, transition_y(100, 100)).q - 0.5);
    const double e1000 = std::fabs(marcum(1000, 1000, transition_y(1000, 1000)).q - 0.5);
    CHECK(e10 <= 0.02);
    CHECK(e10 > e100);
    CHECK(e100 > e1000);
}
