#include "feedflow/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include "feedflow/io.hpp"

namespace feedflow {

LinearOperator build_operator(const UserGraph& graph, const ActivityRates& rates, double budget) {
    if (budget < 0 || budget >= 1)
        throw ConfigError("build_operator: budget must be in [0, 1), got " + io::fmt(budget));
    const int n = graph.num_users();
    const int S = graph.parties.size();

    LinearOperator op;
    op.n_users = n;
    op.n_parties = S;
    op.budget = budget;
    op.mu = rates.mu;
    op.c.assign(n, 0.0);
    op.b.assign(static_cast<std::size_t>(n) * S, 0.0);
    op.row_offsets.assign(n + 1, 0);

    for (int i = 0; i < n; ++i) {
        double c = 0;
        for (int k : graph.leaders_of(i)) c += rates.lambda[k] + rates.mu[k];
        if (!(c > 0))
            throw DataError("build_operator: inactive leader set for user " +
                            std::to_string(graph.original_ids[i]));
        op.c[i] = c;
        op.row_offsets[i + 1] = op.row_offsets[i] + static_cast<int>(graph.leaders_of(i).size());
    }

    op.cols.reserve(op.row_offsets[n]);
    op.vals.reserve(op.row_offsets[n]);
    const double keep = 1.0 - budget;
    for (int i = 0; i < n; ++i) {
        const double inv_c = 1.0 / op.c[i];
        for (int k : graph.leaders_of(i)) {
            op.cols.push_back(k);
            op.vals.push_back(keep * rates.mu[k] * inv_c);
            for (int s = 0; s < S; ++s)
                op.b[static_cast<std::size_t>(i) * S + s] += keep * rates.lambda_of(k, s, S) * inv_c;
        }
    }
    return op;
}

double spectral_bound(const LinearOperator& op) {
    double bound = 0;
    for (int i = 0; i < op.n_users; ++i) {
        double row = 0;
        for (int e = op.row_offsets[i]; e < op.row_offsets[i + 1]; ++e) row += op.vals[e];
        bound = std::max(bound, row);
    }
    return bound;
}

SolveResult solve_fixed_point(const LinearOperator& op, const double* x,
                              const SolveOptions& opts) {
    const int n = op.n_users;
    const int S = op.n_parties;
    const double keep = 1.0 - op.budget;

    SolveResult res;
    res.info.spectral_bound = spectral_bound(op);

    NewsfeedState p(n, S, 1.0 / S);
    if (opts.warm_start) {
        if (opts.warm_start->n_users != n || opts.warm_start->n_parties != S)
            throw ConfigError("solve_fixed_point: warm start shape mismatch");
        p.p = opts.warm_start->p;
    }
    std::vector<double> next(p.p.size());

    auto sweep = [&](const std::vector<double>& cur, std::vector<double>& out) {
        for (int i = 0; i < n; ++i) {
            double* oi = out.data() + static_cast<std::size_t>(i) * S;
            const double* bi = op.b.data() + static_cast<std::size_t>(i) * S;
            for (int s = 0; s < S; ++s) oi[s] = bi[s];
            for (int e = op.row_offsets[i]; e < op.row_offsets[i + 1]; ++e) {
                const double a = op.vals[e];
                const double* pj = cur.data() + static_cast<std::size_t>(op.cols[e]) * S;
                for (int s = 0; s < S; ++s) oi[s] += a * pj[s];
            }
            if (x) {
                const double inject = keep / op.c[i];
                const double* xi = x + static_cast<std::size_t>(i) * S;
                for (int s = 0; s < S; ++s) oi[s] += inject * xi[s];
            }
        }
    };

    double update = 0;
    long iter = 0;
    bool converged = false;
    while (iter < opts.max_iter) {
        sweep(p.p, next);
        ++iter;
        update = 0;
        for (std::size_t k = 0; k < next.size(); ++k)
            update = std::max(update, std::abs(next[k] - p.p[k]));
        p.p.swap(next);
        if (opts.record_trace) res.info.update_trace.push_back(update);
        if (update < opts.tol) {
            converged = true;
            break;
        }
    }
    res.info.iterations = iter;
    res.info.last_update = update;
    if (!converged)
        throw SolveError("fixed-point iteration did not converge in " +
                             std::to_string(opts.max_iter) + " iterations (last update " +
                             io::fmt(update) + ")",
                         update);

    // Entries are sums of nonnegative terms, so negatives can only be stray
    // roundoff; anything below the slack aborts.
    for (double& v : p.p) {
        if (v < 0) {
            if (v < -1e-12)
                throw SolveError("negative equilibrium entry " + io::fmt(v), update);
            v = 0;
        }
    }

    sweep(p.p, next);
    double residual = 0;
    for (std::size_t k = 0; k < next.size(); ++k)
        residual = std::max(residual, std::abs(next[k] - p.p[k]));
    res.info.residual = residual;

    for (int i = 0; i < n; ++i) {
        double row = 0;
        for (int s = 0; s < S; ++s) row += p.at(i, s);
        res.info.max_row_sum_dev = std::max(res.info.max_row_sum_dev, std::abs(row - 1.0));
    }
    res.state = std::move(p);
    return res;
}

SolveResult solve_equilibrium(const UserGraph& graph, const ActivityRates& rates,
                              const SolveOptions& opts) {
    LinearOperator op = build_operator(graph, rates, 0.0);
    return solve_fixed_point(op, nullptr, opts);
}

SolveResult solve_with_recommendations(const UserGraph& graph, const ActivityRates& rates,
                                       const RecommendationPolicy& policy,
                                       const SolveOptions& opts) {
    LinearOperator op = build_operator(graph, rates, policy.budget);
    if (policy.n_users != op.n_users || policy.n_parties != op.n_parties)
        throw ConfigError("solve_with_recommendations: policy shape mismatch");
    for (double v : policy.x)
        if (v < 0) throw DataError("solve_with_recommendations: negative recommendation rate");

    SolveResult res = solve_fixed_point(op, policy.x.data(), opts);

    const double ratio = policy.budget / (1.0 - policy.budget);
    for (int i = 0; i < op.n_users; ++i) {
        const double target = ratio * op.c[i];
        if (std::abs(policy.row_sum(i) - target) > 1e-9) {
            res.info.budget_consistent = false;
            break;
        }
    }
    return res;
}

}  // namespace feedflow
