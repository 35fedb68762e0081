#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "feedflow/types.hpp"

namespace feedflow {

struct SimConfig {
    int feed_size = 10;
    double horizon = 0.0;        // total simulated time, burn-in included
    double burn_in = 0.2;        // fraction of the horizon discarded
    std::uint64_t seed = 0;
    std::optional<RecommendationPolicy> policy;  // insertion rates, optional
    int batches = 1;             // measurement window split for batch means
};

struct SimResult {
    NewsfeedState p_hat;          // time-averaged label shares; masked if feed stayed empty
    long selfposts = 0;
    long reposts = 0;
    long skipped_reposts = 0;     // repost clock fired on an empty feed
    long recommendations = 0;
    double measured_time = 0.0;   // horizon minus burn-in
    std::vector<double> empty_feed_time;          // per user, within the window
    std::vector<std::vector<double>> batch_p;     // per batch, N x S (batches > 1)
    long min_events_per_user = 0;                 // events acted by the least active user
};

/// Event-driven simulation of the posting process: exponential clocks for
/// selfposts and reposts, Poisson recommendation insertions, uniform repost
/// selection from the actor's own feed, uniform eviction from full feeds.
/// Feeds start empty; transients are discarded via burn-in. Deterministic
/// given the seed.
SimResult simulate(const UserGraph& graph, const ActivityRates& rates, const SimConfig& cfg);

struct SweepEntry {
    double horizon;
    double mean_abs_error;  // mean |p_hat - p_model| over valid entries
};

/// Runs simulate at each horizon and reports the disagreement with the
/// steady-state solution (with the policy's system when one is configured).
std::vector<SweepEntry> convergence_sweep(const UserGraph& graph, const ActivityRates& rates,
                                          const SimConfig& cfg,
                                          const std::vector<double>& horizons);

}  // namespace feedflow
