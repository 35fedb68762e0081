#include "feedflow/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "feedflow/dataset.hpp"
#include "feedflow/rng.hpp"

namespace feedflow {

SyntheticInstance generate(const SyntheticSpec& spec) {
    const int n = spec.n_users;
    const int S = spec.n_parties;
    if (n < 1) throw ConfigError("generate: need at least one user");
    if (S < 1) throw ConfigError("generate: need at least one party");
    if (spec.intra_p < 0 || spec.intra_p > 1 || spec.inter_p < 0 || spec.inter_p > 1)
        throw ConfigError("generate: edge probabilities must be in [0, 1]");
    if (spec.intra_p == 0 && spec.inter_p == 0 && n > 1)
        throw ConfigError("generate: zero edge probabilities cannot produce a connected graph");
    if (spec.lambda_min < 0 || spec.lambda_max < spec.lambda_min || spec.mu_min < 0 ||
        spec.mu_max < spec.mu_min)
        throw ConfigError("generate: invalid rate ranges");
    if (!spec.party_shares.empty() && static_cast<int>(spec.party_shares.size()) != S)
        throw ConfigError("generate: party_shares size must match n_parties");

    // Party sizes by largest remainder over the requested shares.
    std::vector<double> shares = spec.party_shares;
    if (shares.empty()) shares.assign(S, 1.0 / S);
    double total = std::accumulate(shares.begin(), shares.end(), 0.0);
    if (!(total > 0)) throw ConfigError("generate: party shares must sum to a positive value");
    std::vector<int> count(S);
    std::vector<std::pair<double, int>> rem(S);
    int assigned = 0;
    for (int s = 0; s < S; ++s) {
        const double exact = shares[s] / total * n;
        count[s] = static_cast<int>(exact);
        assigned += count[s];
        rem[s] = {exact - count[s], s};
    }
    std::sort(rem.begin(), rem.end(),
              [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
    for (int i = 0; i < n - assigned; ++i) ++count[rem[i % S].second];

    std::vector<Affiliation> affs(n);
    {
        int u = 0;
        for (int s = 0; s < S; ++s)
            for (int i = 0; i < count[s]; ++i) affs[u++] = Affiliation::single(s);
    }

    Rng rng(spec.seed);
    std::vector<std::set<int>> leaders(n);
    for (int f = 0; f < n; ++f) {
        for (int l = 0; l < n; ++l) {
            if (f == l) continue;
            const double p = affs[f].first == affs[l].first ? spec.intra_p : spec.inter_p;
            if (rng.uniform() < p) leaders[f].insert(l);
        }
    }

    ActivityRates rates;
    rates.lambda.resize(n);
    rates.mu.resize(n);
    rates.lambda_s.assign(static_cast<std::size_t>(n) * S, 0.0);
    for (int u = 0; u < n; ++u) {
        rates.lambda[u] = rng.uniform(spec.lambda_min, spec.lambda_max);
        rates.mu[u] = rng.uniform(spec.mu_min, spec.mu_max);
        rates.lambda_s[static_cast<std::size_t>(u) * S + affs[u].first] = rates.lambda[u];
    }

    auto build = [&]() {
        std::vector<std::vector<int>> lists(n);
        for (int u = 0; u < n; ++u) lists[u].assign(leaders[u].begin(), leaders[u].end());
        std::vector<std::int64_t> ids(n);
        std::iota(ids.begin(), ids.end(), 0);
        PartySet parties;
        for (int s = 0; s < S; ++s) parties.labels.push_back("P" + std::to_string(s + 1));
        return make_graph(std::move(parties), std::move(ids), affs, lists);
    };

    SyntheticInstance inst;
    inst.rates = std::move(rates);
    inst.graph = build();
    if (n > 1 && !validate(inst.graph, inst.rates).strongly_connected) {
        // connectivity repair: thread a random Hamiltonian cycle through all users
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
        for (int i = 0; i < n; ++i) {
            const int f = perm[i];
            const int l = perm[(i + 1) % n];
            if (leaders[f].insert(l).second) ++inst.repair_edges;
        }
        inst.graph = build();
    }

    Diagnostics d = validate(inst.graph, inst.rates);
    if (!d.passed())
        throw DataError("generate: infeasible spec, instance fails validation (" + d.describe() + ")");
    return inst;
}

}  // namespace feedflow
