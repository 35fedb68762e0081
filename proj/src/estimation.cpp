#include "feedflow/estimation.hpp"

#include <cmath>
#include <limits>

namespace feedflow {

ActivityRates estimate_rates(const EventLog& events, const UserGraph& graph) {
    const double span = events.span();
    if (!(span > 0)) throw DataError("estimate_rates: log span must be positive");

    const int n = graph.num_users();
    const int S = graph.parties.size();
    ActivityRates rates;
    rates.lambda.assign(n, 0.0);
    rates.mu.assign(n, 0.0);
    rates.lambda_s.assign(static_cast<std::size_t>(n) * S, 0.0);

    for (const auto& ev : events.events) {
        int u = graph.dense_of(ev.user);
        if (u < 0)
            throw DataError("estimate_rates: event user " + std::to_string(ev.user) +
                            " is not in the graph");
        if (ev.kind == EventKind::Selfpost)
            rates.lambda[u] += 1.0;
        else
            rates.mu[u] += 1.0;
    }
    for (int u = 0; u < n; ++u) {
        rates.lambda[u] /= span;
        rates.mu[u] /= span;
        const Affiliation& aff = graph.affiliation[u];
        if (aff.dual()) {
            rates.lambda_s[static_cast<std::size_t>(u) * S + aff.first] = rates.lambda[u] / 2;
            rates.lambda_s[static_cast<std::size_t>(u) * S + aff.second] = rates.lambda[u] / 2;
        } else if (aff.known()) {
            rates.lambda_s[static_cast<std::size_t>(u) * S + aff.first] = rates.lambda[u];
        }
    }
    return rates;
}

ReplayResult replay_empirical(const EventLog& events, const UserGraph& graph,
                              const ReplayConfig& cfg) {
    if (cfg.feed_size != 1) throw ConfigError("replay_empirical: feed size must be 1");
    if (!(events.span() > 0)) throw DataError("replay_empirical: log span must be positive");

    const int n = graph.num_users();
    const int S = graph.parties.size();

    ReplayResult res;
    res.labelled_seconds.assign(static_cast<std::size_t>(n) * S, 0.0);
    res.unknown_seconds.assign(n, 0.0);
    if (cfg.initial_feed.empty()) {
        res.final_feed.assign(n, Affiliation::unknown());
    } else {
        if (static_cast<int>(cfg.initial_feed.size()) != n)
            throw ConfigError("replay_empirical: initial feed size mismatch");
        res.final_feed = cfg.initial_feed;
    }

    std::vector<double> last_change(n, events.t_start);

    auto account = [&](int user, double until) {
        const double dt = until - last_change[user];
        if (dt < 0) throw DataError("replay_empirical: negative interval duration");
        const Affiliation& cur = res.final_feed[user];
        if (!cur.known()) {
            res.unknown_seconds[user] += dt;
        } else if (cur.dual()) {
            res.labelled_seconds[static_cast<std::size_t>(user) * S + cur.first] += dt / 2;
            res.labelled_seconds[static_cast<std::size_t>(user) * S + cur.second] += dt / 2;
        } else {
            res.labelled_seconds[static_cast<std::size_t>(user) * S + cur.first] += dt;
        }
        last_change[user] = until;
    };

    double prev_ts = events.t_start;
    for (const auto& ev : events.events) {
        if (ev.ts < prev_ts) throw DataError("replay_empirical: events are not sorted by timestamp");
        prev_ts = ev.ts;
        int actor = graph.dense_of(ev.user);
        if (actor < 0)
            throw DataError("replay_empirical: event user " + std::to_string(ev.user) +
                            " is not in the graph");
        for (int f : graph.followers_of(actor)) {
            account(f, ev.ts);
            res.final_feed[f] = ev.label;
        }
    }
    for (int u = 0; u < n; ++u) account(u, events.t_end);  // hold last label to t_end

    res.state = NewsfeedState(n, S);
    for (int u = 0; u < n; ++u) {
        double total = 0;
        for (int s = 0; s < S; ++s) total += res.labelled_seconds[static_cast<std::size_t>(u) * S + s];
        if (total > 0) {
            for (int s = 0; s < S; ++s)
                res.state.at(u, s) = res.labelled_seconds[static_cast<std::size_t>(u) * S + s] / total;
        } else {
            res.state.valid[u] = 0;
        }
    }
    return res;
}

std::vector<double> compute_echo_profile(const NewsfeedState& state, const UserGraph& graph) {
    const int n = state.n_users;
    std::vector<double> echo(n, std::numeric_limits<double>::quiet_NaN());
    for (int u = 0; u < n; ++u) {
        if (!state.row_valid(u)) continue;
        const Affiliation& aff = graph.affiliation[u];
        double e = aff.known() ? state.at(u, aff.first) : 0.0;
        if (aff.dual()) e += state.at(u, aff.second);
        echo[u] = e;
    }
    return echo;
}

}  // namespace feedflow
