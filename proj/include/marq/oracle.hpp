#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace marq {

/// One row of a reproduced error table: relative deltas of an inversion
/// sweep, measured against independent re-evaluation.
struct TableRow {
    double mu = 0.0;
    std::string scenario;
    double delta0 = 0.0;
    double delta1 = 0.0;
};

/// Independent evaluation of Q_mu(x, y) by adaptive Gauss-Kronrod
/// quadrature of the defining integral (overflow-safe integrand).
/// Valid for mu in [1, 200]; the smaller tail's interval is integrated
/// directly and the other obtained by complement.
double quad_q(double mu, double x, double y);
double quad_p(double mu, double x, double y);

/// |target / recomputed - 1|; throws domain_error when recomputed == 0.
double relative_delta(double target, double recomputed);

/// Two-step inversions (Step 2 asymptotic-only) over a mu sweep;
/// scenario pairs are (q0, q1).
std::vector<TableRow> run_table1(
    const std::vector<double>& mu_list,
    const std::vector<std::pair<double, double>>& scenarios);

/// Inversions in y at x = mu; delta0 uses zeta0 only, delta1 adds zeta1/mu.
std::vector<TableRow> run_table2(const std::vector<double>& mu_list,
                                 const std::vector<double>& q_list);

/// CSV with header mu,scenario,delta0,delta1. Deltas carry 3 significant
/// digits unless full_precision requests 17.
void write_csv(std::ostream& os, const std::vector<TableRow>& rows,
               bool full_precision = false);

} // namespace marq
