#pragma once

#include <cstdint>
#include <vector>

#include "feedflow/types.hpp"

namespace feedflow {

struct SyntheticSpec {
    int n_users = 0;
    int n_parties = 2;
    std::vector<double> party_shares;  // empty = uniform
    double intra_p = 0.5;              // follow probability within a party
    double inter_p = 0.05;             // follow probability across parties
    double lambda_min = 0.5, lambda_max = 1.5;
    double mu_min = 0.5, mu_max = 1.5;
    std::uint64_t seed = 0;
};

struct SyntheticInstance {
    UserGraph graph;
    ActivityRates rates;
    int repair_edges = 0;  // edges added to force strong connectivity
};

/// Planted-affiliation follower graph with homophilic block structure and
/// rates drawn uniformly from the configured ranges. Strong connectivity is
/// guaranteed: when the sampled graph is not strongly connected, a random
/// Hamiltonian cycle is added and its edge count recorded.
SyntheticInstance generate(const SyntheticSpec& spec);

}  // namespace feedflow
