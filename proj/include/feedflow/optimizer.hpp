#pragma once

#include <string>
#include <vector>

#include "feedflow/equilibrium.hpp"
#include "feedflow/types.hpp"

namespace feedflow {

struct OptimizerConfig {
    double budget = 0.0;        // B in [0,1)
    long max_outer = 2000;
    double tol = 1e-8;          // sup-norm of the projected gradient
    double initial_step = 1.0;
    double backtrack = 0.5;
    double armijo = 1e-4;
    double expand = 1.2;        // step growth after an accepted step
    double solve_tol = 1e-11;   // inner equilibrium/adjoint solves
    long solve_max_iter = 100000;
};

struct OptimizationTrace {
    struct Iteration {
        double phi_bar;
        double step;
        double pg_norm;
    };
    std::vector<Iteration> iterations;
    std::string status;  // converged | max_iter | stalled | budget-zero
};

struct MaximizeResult {
    RecommendationPolicy policy;
    NewsfeedState state;
    OptimizationTrace trace;
};

/// Total recommendation rate user n must receive so a share B of arriving
/// content is recommended: B/(1-B) * sum_{k in L(n)} (lambda_k + mu_k).
double budget_total(int n, const UserGraph& graph, const ActivityRates& rates, double budget);
std::vector<double> budget_totals(const UserGraph& graph, const ActivityRates& rates,
                                  double budget);

/// Euclidean projection onto {x >= 0, sum x = c} by sort and threshold.
std::vector<double> project_budget_simplex(std::span<const double> v, double c);

/// dPhiBar/dx at the policy, with p eliminated as the steady-state solution:
/// one transposed solve per party against (1/N)(S/(S-1))(1 - 2 p_s), scaled
/// by the injection coefficient (1-B)/c_n. Requires B > 0.
std::vector<double> gradient(const RecommendationPolicy& policy, const UserGraph& graph,
                             const ActivityRates& rates);

/// Projected gradient ascent on x with Armijo backtracking. The objective is
/// concave in x, so the returned point is a global maximiser up to tolerance.
MaximizeResult maximize_diversity(const UserGraph& graph, const ActivityRates& rates,
                                  const OptimizerConfig& cfg);

/// Mixing baseline where recommendations are never reshared:
/// p = (1-B) p0 + B x_row/|x_row|_1 per user. Masked rows stay masked.
NewsfeedState no_diffusion_mix(const NewsfeedState& p0, const RecommendationPolicy& policy);

/// Best mixing policy under the no-diffusion model; separable per user, so
/// each row is one simplex projection. Rows are normalised shares (sum 1).
RecommendationPolicy optimize_no_diffusion(const NewsfeedState& p0, double budget);

}  // namespace feedflow
