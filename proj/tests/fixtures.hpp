#pragma once

// Shared test fixtures: the K2 two-user instance, random synthetic instances,
// and a dense linear-solve oracle built straight from the balance equations
// (independent of the power-iteration path it is used to check).

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "feedflow/dataset.hpp"
#include "feedflow/synthetic.hpp"
#include "feedflow/types.hpp"

namespace fixtures {

struct Instance {
    feedflow::UserGraph graph;
    feedflow::ActivityRates rates;
};

// Two mutual followers with opposed single-party posting and unit repost
// rates; every steady-state quantity has a closed form.
inline Instance k2() {
    feedflow::PartySet parties{{"A", "B"}};
    std::vector<std::int64_t> ids{1, 2};
    std::vector<feedflow::Affiliation> affs{feedflow::Affiliation::single(0),
                                            feedflow::Affiliation::single(1)};
    std::vector<std::vector<int>> leaders{{1}, {0}};
    Instance inst;
    inst.graph = feedflow::make_graph(parties, ids, affs, leaders);
    inst.rates.lambda = {1.0, 1.0};
    inst.rates.mu = {1.0, 1.0};
    inst.rates.lambda_s = {1.0, 0.0, 0.0, 1.0};
    return inst;
}

inline Instance random_instance(int n, int s, std::uint64_t seed, double intra = 0.6,
                                double inter = 0.2) {
    feedflow::SyntheticSpec spec;
    spec.n_users = n;
    spec.n_parties = s;
    spec.intra_p = intra;
    spec.inter_p = inter;
    spec.seed = seed;
    auto inst = feedflow::generate(spec);
    return {std::move(inst.graph), std::move(inst.rates)};
}

// Nonnegative random policy with rows scaled to the exact per-user budget.
inline feedflow::RecommendationPolicy random_policy(const feedflow::UserGraph& graph,
                                                    const feedflow::ActivityRates& rates,
                                                    double budget, std::uint64_t seed) {
    const int n = graph.num_users();
    const int S = graph.parties.size();
    feedflow::RecommendationPolicy pol(n, S, budget);
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int u = 0; u < n; ++u) {
        double c = 0;
        for (int k : graph.leaders_of(u)) c += rates.lambda[k] + rates.mu[k];
        const double total = budget / (1.0 - budget) * c;
        double row = 0;
        for (int s = 0; s < S; ++s) {
            pol.at(u, s) = dist(gen);
            row += pol.at(u, s);
        }
        for (int s = 0; s < S; ++s) pol.at(u, s) *= total / row;
    }
    return pol;
}

// Dense oracle: assembles (I - A) per the balance equations and solves by
// Gaussian elimination with partial pivoting, one right-hand side per party.
inline feedflow::NewsfeedState dense_solve(const feedflow::UserGraph& graph,
                                           const feedflow::ActivityRates& rates, double budget,
                                           const feedflow::RecommendationPolicy* policy) {
    const int n = graph.num_users();
    const int S = graph.parties.size();
    std::vector<double> c(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k : graph.leaders_of(i)) c[i] += rates.lambda[k] + rates.mu[k];

    // system matrix I - A with a_ij = (1-B) mu_j / c_i
    std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        m[static_cast<std::size_t>(i) * n + i] = 1.0;
        for (int j : graph.leaders_of(i))
            m[static_cast<std::size_t>(i) * n + j] -= (1.0 - budget) * rates.mu[j] / c[i];
    }

    std::vector<double> rhs(static_cast<std::size_t>(n) * S, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int s = 0; s < S; ++s) {
            double b = 0;
            for (int k : graph.leaders_of(i)) b += rates.lambda_of(k, s, S);
            b *= (1.0 - budget) / c[i];
            if (policy) b += (1.0 - budget) / c[i] * policy->at(i, s);
            rhs[static_cast<std::size_t>(i) * S + s] = b;
        }
    }

    // LU with partial pivoting applied to all S right-hand sides at once
    std::vector<int> piv(n);
    for (int col = 0; col < n; ++col) {
        int best = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(m[static_cast<std::size_t>(r) * n + col]) >
                std::abs(m[static_cast<std::size_t>(best) * n + col]))
                best = r;
        piv[col] = best;
        if (best != col) {
            for (int k = 0; k < n; ++k)
                std::swap(m[static_cast<std::size_t>(col) * n + k],
                          m[static_cast<std::size_t>(best) * n + k]);
            for (int s = 0; s < S; ++s)
                std::swap(rhs[static_cast<std::size_t>(col) * S + s],
                          rhs[static_cast<std::size_t>(best) * S + s]);
        }
        const double d = m[static_cast<std::size_t>(col) * n + col];
        for (int r = col + 1; r < n; ++r) {
            const double f = m[static_cast<std::size_t>(r) * n + col] / d;
            if (f == 0) continue;
            for (int k = col; k < n; ++k)
                m[static_cast<std::size_t>(r) * n + k] -= f * m[static_cast<std::size_t>(col) * n + k];
            for (int s = 0; s < S; ++s)
                rhs[static_cast<std::size_t>(r) * S + s] -= f * rhs[static_cast<std::size_t>(col) * S + s];
        }
    }
    feedflow::NewsfeedState out(n, S);
    for (int r = n - 1; r >= 0; --r) {
        for (int s = 0; s < S; ++s) {
            double v = rhs[static_cast<std::size_t>(r) * S + s];
            for (int k = r + 1; k < n; ++k)
                v -= m[static_cast<std::size_t>(r) * n + k] * out.at(k, s);
            out.at(r, s) = v / m[static_cast<std::size_t>(r) * n + r];
        }
    }
    return out;
}

// Unique scratch directory, removed on destruction.
struct TmpDir {
    std::filesystem::path path;
    explicit TmpDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        for (int i = 0;; ++i) {
            auto candidate = base / (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(i));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path = candidate;
                return;
            }
        }
    }
    ~TmpDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TmpDir(const TmpDir&) = delete;
    TmpDir& operator=(const TmpDir&) = delete;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::FILE* f = std::fopen(p.string().c_str(), "wb");
    std::fwrite(content.data(), 1, content.size(), f);
    std::fclose(f);
}

// The golden replay fixture: 4 users, 6 events, one masked user, dual labels,
// '?' periods, a labelled repost. Occupation seconds are exact dyadics.
struct GoldenReplay {
    Instance inst;
    feedflow::EventLog log;
};

inline GoldenReplay golden_replay() {
    feedflow::PartySet parties{{"A", "B"}};
    std::vector<std::int64_t> ids{0, 1, 2, 3};
    using feedflow::Affiliation;
    std::vector<Affiliation> affs{Affiliation::single(0), Affiliation::single(1),
                                  Affiliation::pair(0, 1), Affiliation::single(1)};
    std::vector<std::vector<int>> leaders{{3}, {0, 2}, {0, 1}, {1}};
    GoldenReplay g;
    g.inst.graph = feedflow::make_graph(parties, ids, affs, leaders);

    using feedflow::Event;
    using feedflow::EventKind;
    g.log.t_start = 0;
    g.log.t_end = 10;
    auto ev = [](double ts, std::int64_t user, EventKind kind, Affiliation label,
                 std::int64_t origin = -1) {
        Event e;
        e.ts = ts;
        e.user = user;
        e.kind = kind;
        e.label = label;
        if (origin >= 0) {
            e.origin = origin;
            e.origin_known = true;
        }
        return e;
    };
    g.log.events = {
        ev(1, 3, EventKind::Repost, Affiliation::unknown()),
        ev(2, 0, EventKind::Selfpost, Affiliation::single(0)),
        ev(4, 2, EventKind::Selfpost, Affiliation::pair(0, 1)),
        ev(5, 1, EventKind::Repost, Affiliation::pair(0, 1), 2),
        ev(7, 1, EventKind::Selfpost, Affiliation::single(1)),
        ev(8, 3, EventKind::Repost, Affiliation::unknown()),
    };
    return g;
}

}  // namespace fixtures
