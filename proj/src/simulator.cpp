#include "feedflow/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "feedflow/equilibrium.hpp"
#include "feedflow/io.hpp"
#include "feedflow/rng.hpp"

namespace feedflow {

namespace {

// One size-K feed with lazily integrated per-label occupancy.
struct Feed {
    std::vector<std::uint8_t> slots;   // party label per occupied slot
    std::vector<int> counts;           // per party
    std::vector<double> occupancy;     // integral of count_s/occ over occupied time
    double occupied_time = 0;
    double empty_time = 0;
    double last_touch = 0;
};

}  // namespace

SimResult simulate(const UserGraph& graph, const ActivityRates& rates, const SimConfig& cfg) {
    const int n = graph.num_users();
    const int S = graph.parties.size();
    if (!(cfg.horizon > 0)) throw ConfigError("simulate: horizon must be positive");
    if (cfg.burn_in < 0 || cfg.burn_in >= 1)
        throw ConfigError("simulate: burn-in fraction must be in [0, 1)");
    if (cfg.feed_size < 1) throw ConfigError("simulate: feed size must be >= 1");
    if (cfg.batches < 1) throw ConfigError("simulate: batches must be >= 1");

    const double t_burn = cfg.horizon * cfg.burn_in;
    const double window = cfg.horizon - t_burn;
    if (!(window > 0)) throw ConfigError("simulate: no measurement window");

    // Flat event menu: per user a selfpost clock and a repost clock, plus one
    // insertion clock per (user, party) with x > 0.
    struct Clock {
        enum Type { Selfpost, Repost, Recommend } type;
        int user;
        int party;  // recommendations only
        double rate;
    };
    std::vector<Clock> clocks;
    for (int u = 0; u < n; ++u) {
        if (rates.lambda[u] > 0) clocks.push_back({Clock::Selfpost, u, -1, rates.lambda[u]});
        if (rates.mu[u] > 0) clocks.push_back({Clock::Repost, u, -1, rates.mu[u]});
    }
    if (cfg.policy) {
        if (cfg.policy->n_users != n || cfg.policy->n_parties != S)
            throw ConfigError("simulate: policy shape mismatch");
        for (int u = 0; u < n; ++u)
            for (int s = 0; s < S; ++s)
                if (cfg.policy->at(u, s) > 0)
                    clocks.push_back({Clock::Recommend, u, s, cfg.policy->at(u, s)});
    }
    if (clocks.empty()) throw DataError("simulate: no events (all rates are zero)");

    double total_rate = 0;
    std::vector<double> cumulative(clocks.size());
    for (std::size_t i = 0; i < clocks.size(); ++i) {
        total_rate += clocks[i].rate;
        cumulative[i] = total_rate;
    }

    std::vector<Feed> feeds(n);
    for (auto& f : feeds) {
        f.counts.assign(S, 0);
        f.occupancy.assign(S, 0.0);
    }

    SimResult res;
    res.measured_time = window;
    res.batch_p.assign(cfg.batches > 1 ? cfg.batches : 0, {});
    std::vector<std::vector<double>> batch_occ;
    std::vector<std::vector<double>> batch_occ_time;
    if (cfg.batches > 1) {
        batch_occ.assign(cfg.batches, std::vector<double>(static_cast<std::size_t>(n) * S, 0.0));
        batch_occ_time.assign(cfg.batches, std::vector<double>(n, 0.0));
    }
    std::vector<long> events_per_user(n, 0);

    const double batch_len = window / cfg.batches;
    auto batch_of = [&](double t) {
        int b = static_cast<int>((t - t_burn) / batch_len);
        return std::clamp(b, 0, cfg.batches - 1);
    };

    // Integrate a feed's occupancy from its last touch up to time t,
    // splitting at the burn-in boundary and at batch boundaries.
    auto integrate = [&](int user, double t) {
        Feed& f = feeds[user];
        double from = f.last_touch;
        f.last_touch = t;
        if (t <= t_burn) return;
        if (from < t_burn) from = t_burn;
        const double dt = t - from;
        if (dt <= 0) return;
        const int occ = static_cast<int>(f.slots.size());
        if (occ == 0) {
            f.empty_time += dt;
            return;
        }
        f.occupied_time += dt;
        for (int s = 0; s < S; ++s)
            if (f.counts[s] != 0)
                f.occupancy[s] += dt * static_cast<double>(f.counts[s]) / occ;
        if (cfg.batches > 1) {
            const int b_lo = batch_of(from);
            const int b_hi = batch_of(std::nextafter(t, from));
            for (int b = b_lo; b <= b_hi; ++b) {
                const double lo = std::max(from, t_burn + b * batch_len);
                const double hi = std::min(t, t_burn + (b + 1) * batch_len);
                const double seg = hi - lo;
                if (seg <= 0) continue;
                batch_occ_time[b][user] += seg;
                for (int s = 0; s < S; ++s)
                    if (f.counts[s] != 0)
                        batch_occ[b][static_cast<std::size_t>(user) * S + s] +=
                            seg * static_cast<double>(f.counts[s]) / occ;
            }
        }
    };

    auto push = [&](int user, int party, double t, Rng& rng) {
        integrate(user, t);
        Feed& f = feeds[user];
        if (static_cast<int>(f.slots.size()) < cfg.feed_size) {
            f.slots.push_back(static_cast<std::uint8_t>(party));
        } else {
            const int victim = rng.below(cfg.feed_size);
            f.counts[f.slots[victim]] -= 1;
            f.slots[victim] = static_cast<std::uint8_t>(party);
        }
        f.counts[party] += 1;
    };

    Rng rng(cfg.seed);
    double t = 0;
    while (true) {
        t += rng.exponential(total_rate);
        if (t >= cfg.horizon) break;
        const double u = rng.uniform() * total_rate;
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
        const Clock& clk = clocks[std::min<std::size_t>(it - cumulative.begin(), clocks.size() - 1)];
        ++events_per_user[clk.user];

        switch (clk.type) {
            case Clock::Selfpost: {
                // party in proportion to the user's per-party split
                const double r = rng.uniform() * rates.lambda[clk.user];
                double acc = 0;
                int party = S - 1;
                for (int s = 0; s < S; ++s) {
                    acc += rates.lambda_of(clk.user, s, S);
                    if (r < acc) {
                        party = s;
                        break;
                    }
                }
                for (int f : graph.followers_of(clk.user)) push(f, party, t, rng);
                ++res.selfposts;
                break;
            }
            case Clock::Repost: {
                Feed& own = feeds[clk.user];
                if (own.slots.empty()) {
                    ++res.skipped_reposts;
                    break;
                }
                const int slot = rng.below(static_cast<int>(own.slots.size()));
                const int party = own.slots[slot];
                for (int f : graph.followers_of(clk.user)) push(f, party, t, rng);
                ++res.reposts;
                break;
            }
            case Clock::Recommend: {
                push(clk.user, clk.party, t, rng);
                ++res.recommendations;
                break;
            }
        }
    }
    for (int u = 0; u < n; ++u) integrate(u, cfg.horizon);

    res.p_hat = NewsfeedState(n, S);
    res.empty_feed_time.resize(n);
    for (int u = 0; u < n; ++u) {
        res.empty_feed_time[u] = feeds[u].empty_time;
        if (feeds[u].occupied_time > 0) {
            for (int s = 0; s < S; ++s)
                res.p_hat.at(u, s) = feeds[u].occupancy[s] / feeds[u].occupied_time;
        } else {
            res.p_hat.valid[u] = 0;
        }
    }
    for (int b = 0; b < cfg.batches && cfg.batches > 1; ++b) {
        res.batch_p[b].assign(static_cast<std::size_t>(n) * S, 0.0);
        for (int u = 0; u < n; ++u) {
            if (batch_occ_time[b][u] <= 0) continue;
            for (int s = 0; s < S; ++s)
                res.batch_p[b][static_cast<std::size_t>(u) * S + s] =
                    batch_occ[b][static_cast<std::size_t>(u) * S + s] / batch_occ_time[b][u];
        }
    }
    res.min_events_per_user = *std::min_element(events_per_user.begin(), events_per_user.end());
    return res;
}

std::vector<SweepEntry> convergence_sweep(const UserGraph& graph, const ActivityRates& rates,
                                          const SimConfig& cfg,
                                          const std::vector<double>& horizons) {
    for (std::size_t i = 1; i < horizons.size(); ++i)
        if (!(horizons[i] > horizons[i - 1]))
            throw ConfigError("convergence_sweep: horizons must be increasing");

    NewsfeedState model = cfg.policy
                              ? solve_with_recommendations(graph, rates, *cfg.policy).state
                              : solve_equilibrium(graph, rates).state;

    std::vector<SweepEntry> table;
    for (double h : horizons) {
        SimConfig run = cfg;
        run.horizon = h;
        SimResult sim = simulate(graph, rates, run);
        double err = 0;
        long count = 0;
        for (int u = 0; u < graph.num_users(); ++u) {
            if (!sim.p_hat.row_valid(u)) continue;
            for (int s = 0; s < graph.parties.size(); ++s) {
                err += std::abs(sim.p_hat.at(u, s) - model.at(u, s));
                ++count;
            }
        }
        if (count == 0) throw DataError("convergence_sweep: no measurement window");
        table.push_back({h, err / count});
    }
    return table;
}

}  // namespace feedflow
