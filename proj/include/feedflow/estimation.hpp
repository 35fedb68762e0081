#pragma once

#include <vector>

#include "feedflow/types.hpp"

namespace feedflow {

/// Replay knobs. The procedure is defined for size-1 feeds; unknown-label
/// periods are excluded and equal timestamps apply in stable input order.
/// initial_feed lets a caller resume from a previous chunk's final state.
struct ReplayConfig {
    int feed_size = 1;
    std::vector<Affiliation> initial_feed;  // empty = all feeds start '?'
};

struct ReplayResult {
    NewsfeedState state;                 // masked where no labelled post was ever shown
    std::vector<double> labelled_seconds;  // N x S occupation time per label
    std::vector<double> unknown_seconds;   // N, time the feed showed '?'
    std::vector<Affiliation> final_feed;   // feed content at t_end
};

/// lambda = tweets/span, mu = retweets/span; lambda_s puts the whole lambda on
/// the user's party, split in half for dual affiliations.
ActivityRates estimate_rates(const EventLog& events, const UserGraph& graph);

/// Replays the log over size-1 feeds: every post by a leader overwrites the
/// follower's feed with the original creator's label. p is the share of time
/// each label was shown, over the time any label was shown at all.
ReplayResult replay_empirical(const EventLog& events, const UserGraph& graph,
                              const ReplayConfig& cfg = {});

/// echo(n) = share of n's feed aligned with n's own affiliation(s).
/// NaN for masked rows.
std::vector<double> compute_echo_profile(const NewsfeedState& state, const UserGraph& graph);

}  // namespace feedflow
