#pragma once

#include <vector>

#include "feedflow/types.hpp"

namespace feedflow {

/// Fixed-point form of the steady-state balance equations,
///   p_s = A p_s + b_s + ((1-B)/c_n) x_s,
/// with a_ij = (1-B) mu_j / c_i for j in L(i) and
/// b_s(i) = (1-B) sum_{k in L(i)} lambda_s(k) / c_i,
/// where c_i aggregates the leaders' activity. B = 0 recovers the plain
/// no-recommendation balance.
struct LinearOperator {
    int n_users = 0;
    int n_parties = 0;
    double budget = 0.0;

    std::vector<int> row_offsets;  // CSR over rows (users), size N+1
    std::vector<int> cols;         // leader indices
    std::vector<double> vals;      // a_ij

    std::vector<double> b;         // N x S constant terms
    std::vector<double> c;         // per-user leader activity aggregates
    std::vector<double> mu;        // per-user repost rates (kept for adjoint solves)
};

struct SolveOptions {
    double tol = 1e-10;        // sup-norm of the per-sweep update
    long max_iter = 100000;
    bool record_trace = false;
    const NewsfeedState* warm_start = nullptr;
};

struct SolveInfo {
    long iterations = 0;          // sweeps applied, including the converging one
    double last_update = 0.0;     // sup-norm of the final update
    double residual = 0.0;        // sup-norm fixed-point residual of the answer
    double spectral_bound = 0.0;  // max row sum of A
    bool budget_consistent = true;
    double max_row_sum_dev = 0.0;  // max |sum_s p_s - 1| over users
    std::vector<double> update_trace;  // per-iteration updates when requested
};

struct SolveResult {
    NewsfeedState state;
    SolveInfo info;
};

/// Throws when some user's leader set carries no activity (c_n = 0).
LinearOperator build_operator(const UserGraph& graph, const ActivityRates& rates, double budget);

/// Max row sum of A; an upper bound on the spectral radius, < 1 when B > 0.
double spectral_bound(const LinearOperator& op);

/// Steady state without recommendations, by power iteration from the uniform
/// start. Throws SolveError on non-convergence.
SolveResult solve_equilibrium(const UserGraph& graph, const ActivityRates& rates,
                              const SolveOptions& opts = {});

/// Steady state under a recommendation policy. Budget-inconsistent policies
/// are solved as given and flagged in the info, never renormalised.
SolveResult solve_with_recommendations(const UserGraph& graph, const ActivityRates& rates,
                                       const RecommendationPolicy& policy,
                                       const SolveOptions& opts = {});

/// Shared iteration core; x may be null (no recommendation term).
SolveResult solve_fixed_point(const LinearOperator& op, const double* x,
                              const SolveOptions& opts);

}  // namespace feedflow
