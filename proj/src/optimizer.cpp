#include "feedflow/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "feedflow/io.hpp"
#include "feedflow/metrics.hpp"

namespace feedflow {

double budget_total(int n, const UserGraph& graph, const ActivityRates& rates, double budget) {
    if (budget < 0 || budget >= 1)
        throw ConfigError("budget_total: budget must be in [0, 1), got " + io::fmt(budget));
    double c = 0;
    for (int k : graph.leaders_of(n)) c += rates.lambda[k] + rates.mu[k];
    if (!(c > 0))
        throw DataError("budget_total: inactive leader set for user " +
                        std::to_string(graph.original_ids[n]));
    return budget / (1.0 - budget) * c;
}

std::vector<double> budget_totals(const UserGraph& graph, const ActivityRates& rates,
                                  double budget) {
    std::vector<double> totals(graph.num_users());
    for (int n = 0; n < graph.num_users(); ++n) totals[n] = budget_total(n, graph, rates, budget);
    return totals;
}

std::vector<double> project_budget_simplex(std::span<const double> v, double c) {
    if (c < 0) throw ConfigError("project_budget_simplex: negative total " + io::fmt(c));
    const int S = static_cast<int>(v.size());
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());

    double cumsum = 0;
    double theta = 0;
    int active = 0;
    for (int k = 0; k < S; ++k) {
        cumsum += sorted[k];
        const double t = (cumsum - c) / (k + 1);
        if (sorted[k] - t > 0) {
            theta = t;
            active = k + 1;
        }
    }
    if (active == 0) theta = (cumsum - c) / S;  // c = 0 with all-equal v

    std::vector<double> out(S);
    for (int s = 0; s < S; ++s) out[s] = std::max(v[s] - theta, 0.0);
    return out;
}

namespace {

// Per-party transposed solve y = A^T y + g, then scale by the injection
// coefficients. A^T is applied through the follower adjacency:
// y_new[j] = g[j] + (1-B) mu[j] sum_{i follows j} y[i]/c[i].
std::vector<double> gradient_from_solution(const LinearOperator& op, const UserGraph& graph,
                                           const NewsfeedState& p, double tol, long max_iter) {
    const int n = op.n_users;
    const int S = op.n_parties;
    const double keep = 1.0 - op.budget;

    std::vector<double> g(static_cast<std::size_t>(n) * S);
    const double scale = 1.0 / n * S / (S - 1.0);
    for (int i = 0; i < n; ++i)
        for (int s = 0; s < S; ++s)
            g[static_cast<std::size_t>(i) * S + s] = scale * (1.0 - 2.0 * p.at(i, s));

    std::vector<double> y = g;
    std::vector<double> next(y.size());
    std::vector<double> z(static_cast<std::size_t>(n) * S);

    double update = 0;
    for (long iter = 0; iter < max_iter; ++iter) {
        for (int i = 0; i < n; ++i) {
            const double inv_c = 1.0 / op.c[i];
            for (int s = 0; s < S; ++s)
                z[static_cast<std::size_t>(i) * S + s] = y[static_cast<std::size_t>(i) * S + s] * inv_c;
        }
        for (int j = 0; j < n; ++j) {
            double* oj = next.data() + static_cast<std::size_t>(j) * S;
            const double* gj = g.data() + static_cast<std::size_t>(j) * S;
            for (int s = 0; s < S; ++s) oj[s] = gj[s];
            const double w = keep * op.mu[j];
            if (w != 0) {
                for (int i : graph.followers_of(j)) {
                    const double* zi = z.data() + static_cast<std::size_t>(i) * S;
                    for (int s = 0; s < S; ++s) oj[s] += w * zi[s];
                }
            }
        }
        update = 0;
        for (std::size_t k = 0; k < y.size(); ++k)
            update = std::max(update, std::abs(next[k] - y[k]));
        y.swap(next);
        if (update < tol) {
            for (int i = 0; i < n; ++i) {
                const double inject = keep / op.c[i];
                for (int s = 0; s < S; ++s) y[static_cast<std::size_t>(i) * S + s] *= inject;
            }
            return y;
        }
    }
    throw SolveError("adjoint solve did not converge (last update " + io::fmt(update) + ")", update);
}

void project_rows(std::vector<double>& x, const std::vector<double>& totals, int S) {
    for (std::size_t n = 0; n < totals.size(); ++n) {
        std::span<const double> row(x.data() + n * S, static_cast<std::size_t>(S));
        auto proj = project_budget_simplex(row, totals[n]);
        std::copy(proj.begin(), proj.end(), x.begin() + static_cast<std::ptrdiff_t>(n * S));
    }
}

}  // namespace

std::vector<double> gradient(const RecommendationPolicy& policy, const UserGraph& graph,
                             const ActivityRates& rates) {
    if (!(policy.budget > 0)) throw ConfigError("gradient: requires a positive budget");
    LinearOperator op = build_operator(graph, rates, policy.budget);
    SolveOptions opts;
    opts.tol = 1e-12;
    SolveResult fwd = solve_fixed_point(op, policy.x.data(), opts);
    return gradient_from_solution(op, graph, fwd.state, opts.tol, opts.max_iter);
}

MaximizeResult maximize_diversity(const UserGraph& graph, const ActivityRates& rates,
                                  const OptimizerConfig& cfg) {
    if (cfg.budget < 0 || cfg.budget >= 1)
        throw ConfigError("maximize_diversity: budget must be in [0, 1)");
    if (cfg.backtrack <= 0 || cfg.backtrack >= 1 || cfg.armijo <= 0 || cfg.armijo >= 1 ||
        cfg.initial_step <= 0 || cfg.expand < 1)
        throw ConfigError("maximize_diversity: invalid step parameters");

    const int n = graph.num_users();
    const int S = graph.parties.size();

    MaximizeResult res;
    if (cfg.budget == 0) {
        res.policy = RecommendationPolicy(n, S, 0.0);
        res.state = solve_equilibrium(graph, rates, {cfg.solve_tol, cfg.solve_max_iter}).state;
        res.trace.status = "budget-zero";
        res.trace.iterations.push_back({phi_bar(res.state), 0.0, 0.0});
        return res;
    }

    LinearOperator op = build_operator(graph, rates, cfg.budget);
    std::vector<double> totals(n);
    for (int i = 0; i < n; ++i) totals[i] = cfg.budget / (1.0 - cfg.budget) * op.c[i];

    std::vector<double> x(static_cast<std::size_t>(n) * S);
    for (int i = 0; i < n; ++i)
        for (int s = 0; s < S; ++s) x[static_cast<std::size_t>(i) * S + s] = totals[i] / S;

    SolveOptions sopts{cfg.solve_tol, cfg.solve_max_iter, false, nullptr};
    NewsfeedState p = solve_fixed_point(op, x.data(), sopts).state;
    double f = phi_bar(p);

    double step = cfg.initial_step;
    res.trace.status = "max_iter";
    std::vector<double> candidate(x.size()), g;

    for (long outer = 0; outer < cfg.max_outer; ++outer) {
        g = gradient_from_solution(op, graph, p, cfg.solve_tol, cfg.solve_max_iter);

        // Projected gradient at unit reference step; sup-norm drives stopping.
        candidate = x;
        for (std::size_t k = 0; k < x.size(); ++k) candidate[k] += g[k];
        project_rows(candidate, totals, S);
        double pg_norm = 0;
        for (std::size_t k = 0; k < x.size(); ++k)
            pg_norm = std::max(pg_norm, std::abs(candidate[k] - x[k]));

        res.trace.iterations.push_back({f, step, pg_norm});
        if (pg_norm <= cfg.tol) {
            res.trace.status = "converged";
            break;
        }

        bool accepted = false;
        while (step > 1e-18) {
            candidate = x;
            for (std::size_t k = 0; k < x.size(); ++k) candidate[k] += step * g[k];
            project_rows(candidate, totals, S);
            double inner = 0;
            for (std::size_t k = 0; k < x.size(); ++k) inner += g[k] * (candidate[k] - x[k]);
            if (inner <= 0) break;  // numerically stationary along the arc

            sopts.warm_start = &p;
            NewsfeedState pc = solve_fixed_point(op, candidate.data(), sopts).state;
            sopts.warm_start = nullptr;
            const double fc = phi_bar(pc);
            if (fc >= f + cfg.armijo * inner) {
                x.swap(candidate);
                p = std::move(pc);
                f = fc;
                step = std::min(step * cfg.expand, 1e18);  // keep x + step*g finite
                accepted = true;
                break;
            }
            step *= cfg.backtrack;
        }
        if (!accepted) {
            res.trace.status = "stalled";
            break;
        }
    }

    res.policy = RecommendationPolicy(n, S, cfg.budget);
    res.policy.x = std::move(x);
    res.state = std::move(p);
    return res;
}

NewsfeedState no_diffusion_mix(const NewsfeedState& p0, const RecommendationPolicy& policy) {
    if (p0.n_users != policy.n_users || p0.n_parties != policy.n_parties)
        throw DataError("no_diffusion_mix: shape mismatch");
    const double B = policy.budget;
    NewsfeedState out(p0.n_users, p0.n_parties);
    for (int u = 0; u < p0.n_users; ++u) {
        if (!p0.row_valid(u)) {
            out.valid[u] = 0;
            continue;
        }
        const double total = policy.row_sum(u);
        if (!(total > 0))
            throw DataError("no_diffusion_mix: zero recommendation row for user " +
                            std::to_string(u));
        for (int s = 0; s < p0.n_parties; ++s)
            out.at(u, s) = (1.0 - B) * p0.at(u, s) + B * policy.at(u, s) / total;
    }
    return out;
}

RecommendationPolicy optimize_no_diffusion(const NewsfeedState& p0, double budget) {
    if (budget <= 0 || budget >= 1)
        throw ConfigError("optimize_no_diffusion: budget must be in (0, 1)");
    const int S = p0.n_parties;
    RecommendationPolicy pol(p0.n_users, S, budget);
    std::vector<double> v(S);
    for (int u = 0; u < p0.n_users; ++u) {
        if (!p0.row_valid(u)) {
            for (int s = 0; s < S; ++s) pol.at(u, s) = 1.0 / S;
            continue;
        }
        // The mixed row is affine in the share vector, so the best share is
        // the projection of the uniform-filling target onto the simplex.
        for (int s = 0; s < S; ++s) v[s] = (1.0 / S - (1.0 - budget) * p0.at(u, s)) / budget;
        auto nu = project_budget_simplex(v, 1.0);
        for (int s = 0; s < S; ++s) pol.at(u, s) = nu[s];
    }
    return pol;
}

}  // namespace feedflow
