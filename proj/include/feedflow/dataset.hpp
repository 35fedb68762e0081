#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "feedflow/types.hpp"

namespace feedflow {

/// Parses the user/edge/event files, drops users with unknown affiliation and
/// users with zero activity, and drops edges/events touching dropped users.
/// Post labels are resolved against the full user table before any removal,
/// so reposts keep the origin author's affiliation even if that author is
/// later dropped. Returns the graph before SCC restriction.
std::pair<UserGraph, EventLog> load_dataset(const std::filesystem::path& user_table,
                                            const std::filesystem::path& edge_table,
                                            const std::filesystem::path& event_log,
                                            const PartySet& parties);

/// Induced subgraph on the largest strongly connected component. Size ties
/// are broken by the component containing the smallest original user id.
UserGraph largest_scc(const UserGraph& graph);

/// Drops events whose actor is not in the graph (used after SCC restriction).
EventLog filter_events(const EventLog& log, const UserGraph& graph);

struct Diagnostics {
    bool strongly_connected = false;
    bool has_creator = false;                 // some lambda > 0
    std::vector<int> inactive_leader_sets;    // users with sum over leaders of lambda+mu == 0
    bool lambda_split_consistent = false;     // sum_s lambda_s == lambda per user

    bool passed() const {
        return strongly_connected && has_creator && inactive_leader_sets.empty() &&
               lambda_split_consistent;
    }
    std::string describe() const;
};

/// Checks the equilibrium uniqueness preconditions. Never throws; callers
/// decide what a failure means.
Diagnostics validate(const UserGraph& graph, const ActivityRates& rates);

PartySet load_parties(const std::filesystem::path& party_file);

// Canonical on-disk dataset formats, shared by ingest/synth output and all
// downstream subcommands.
void write_parties_csv(const std::filesystem::path& path, const PartySet& parties);
void write_users_csv(const std::filesystem::path& path, const UserGraph& graph);
void write_edges_csv(const std::filesystem::path& path, const UserGraph& graph);

/// Reads a preprocessed dataset as-is: affiliations must all be known and
/// edges must resolve; nothing is dropped.
UserGraph load_graph_csv(const std::filesystem::path& users_path,
                         const std::filesystem::path& edges_path, const PartySet& parties);

/// Reposts carry an explicit "label" field so origin affiliations survive
/// even when the origin author is not part of the written graph.
void write_events_jsonl(const std::filesystem::path& path, const EventLog& log,
                        const PartySet& parties);

/// Loads a canonical event log; labels come from the explicit field when
/// present, otherwise from the actor/origin affiliations in the graph.
EventLog load_events_jsonl(const std::filesystem::path& path, const UserGraph& graph);
void write_rates_csv(const std::filesystem::path& lambda_path,
                     const std::filesystem::path& mu_path, const UserGraph& graph,
                     const ActivityRates& rates);
ActivityRates load_rates_csv(const std::filesystem::path& lambda_path,
                             const std::filesystem::path& mu_path, const UserGraph& graph);

}  // namespace feedflow
