#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "marq/errors.hpp"
#include "marq/marcum.hpp"
#include "marq/oracle.hpp"

using namespace marq;

namespace {

double rel(double got, double want) {
    return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

// printed deltas of the reference tables (mu = 10 .. 1000 rows)
constexpr double kTable1[7][3] = {
    {1.23e-05, 2.30e-07, 1.16e-04}, {7.43e-06, 7.29e-08, 1.94e-05},
    {3.27e-06, 3.70e-08, 3.09e-06}, {1.55e-06, 1.97e-08, 3.15e-06},
    {6.51e-07, 9.34e-09, 1.76e-06}, {1.68e-07, 2.90e-09, 6.18e-07},
    {4.98e-08, 1.02e-09, 2.54e-07}};
constexpr double kTable2[7][6] = {
    {3.80e-01, 1.89e-03, 6.95e-02, 5.65e-04, 4.83e-05, 3.92e-07},
    {2.72e-01, 7.90e-04, 4.81e-02, 1.99e-04, 3.00e-05, 1.33e-07},
    {1.75e-01, 2.34e-04, 2.98e-02, 5.01e-05, 1.70e-05, 3.07e-08},
    {1.24e-01, 8.97e-05, 2.09e-02, 1.77e-05, 1.14e-05, 1.02e-08},
    {8.87e-02, 3.35e-05, 1.47e-02, 6.25e-06, 7.80e-06, 3.45e-09},
    {5.63e-02, 8.96e-06, 9.24e-03, 1.58e-06, 4.78e-06, 8.40e-10},
    {3.99e-02, 3.25e-06, 6.52e-03, 5.59e-07, 3.33e-06, 2.91e-10}};
const std::vector<double> kMus{10, 20, 50, 100, 200, 500, 1000};

} // namespace

TEST_CASE("quadrature oracle basics") {
    CHECK(quad_q(5, 3, 0) == 1.0);
    CHECK(rel(quad_q(1, 0, 1.5), std::exp(-1.5)) <= 1e-11);
    CHECK(rel(quad_q(3, 2, 7), marcum(3, 2, 7).q) <= 1e-10);
    CHECK_THROWS_AS(quad_q(0.5, 1, 1), domain_error);
    CHECK_THROWS_AS(quad_q(300, 1, 1), domain_error);  // oracle order cap
    CHECK_THROWS_AS(quad_p(2, -1, 1), domain_error);
}

TEST_CASE("oracle symmetry") {
    std::mt19937_64 rng(2210);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const double mu = 1.0 + 99.0 * u01(rng);
        const double x = 0.1 + 60.0 * u01(rng);
        const double y = 0.1 + 60.0 * u01(rng);
        CHECK(std::fabs(quad_q(mu, x, y) + quad_p(mu, x, y) - 1.0) <= 1e-10);
    }
}

TEST_CASE("oracle vs series sample") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double mu = 1.0 + 49.0 * u01(rng);
        const double x = 0.1 + 99.9 * u01(rng);
        const double y = 0.1 + 99.9 * u01(rng);
        const ProbabilityPair pr = marcum(mu, x, y);
        const bool qdir = y > x + mu;
        const double direct = qdir ? pr.q : pr.p;
        if (direct < 1e-280) continue;
        const double oracle = qdir ? quad_q(mu, x, y) : quad_p(mu, x, y);
        CHECK(rel(oracle, direct) <= 1e-10);
    }
}

TEST_CASE("relative delta") {
    CHECK(relative_delta(0.7, 0.7) == 0.0);
    CHECK(rel(relative_delta(1.23, 1.0), 0.23) <= 1e-14);
    CHECK_THROWS_AS(relative_delta(1.0, 0.0), domain_error);
}

TEST_CASE("table 1 regeneration") {
    const auto rows =
        run_table1(kMus, {{1e-6, 0.9}, {1e-8, 0.999}, {0.4, 0.6}});
    REQUIRE(rows.size() == 21);
    CHECK(rows[0].scenario == "q0=1e-06;q1=0.9");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double printed = kTable1[i / 3][i % 3];
        CHECK(rows[i].delta0 <= 1e-12);
        CHECK(rows[i].delta1 <= 10.0 * printed);
        CHECK(rows[i].delta1 >= printed / 100.0);  // a vanishing delta means a broken residual
    }
    // the step-2 error improves down each mu column
    for (int c = 0; c < 3; ++c)
        CHECK(rows[c].delta1 > rows[18 + c].delta1);
}

TEST_CASE("table 2 regeneration") {
    const auto rows = run_table2(kMus, {1e-6, 0.5, 0.9999});
    REQUIRE(rows.size() == 21);
    CHECK(rows[1].scenario == "q=0.5;x=mu");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double p0 = kTable2[i / 3][2 * (i % 3)];
        const double p1 = kTable2[i / 3][2 * (i % 3) + 1];
        CHECK(rows[i].delta0 <= 10.0 * p0);
        CHECK(rows[i].delta0 >= p0 / 100.0);
        CHECK(rows[i].delta1 <= 10.0 * p1);
        CHECK(rows[i].delta1 >= p1 / 100.0);
    }
    for (int c = 0; c < 3; ++c) {
        CHECK(rows[c].delta0 > rows[18 + c].delta0);
        CHECK(rows[c].delta1 > rows[18 + c].delta1);
    }
}

TEST_CASE("csv serialization") {
    std::vector<TableRow> rows{{10.0, "q0=1e-06;q1=0.9", 1.27e-15, 1.23e-05}};
    std::ostringstream os;
    write_csv(os, rows);
    CHECK(os.str() == "mu,scenario,delta0,delta1\n"
                      "1.00e+01,q0=1e-06;q1=0.9,1.27e-15,1.23e-05\n");
    std::vector<TableRow> dyadic{{10.0, "s", 0.5, 0.25}};
    std::ostringstream full;
    write_csv(full, dyadic, true);
    CHECK(full.str().find("5.0000000000000000e-01") != std::string::npos);
    CHECK(full.str().find("2.5000000000000000e-01") != std::string::npos);
}
