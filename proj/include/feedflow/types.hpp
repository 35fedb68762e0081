#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace feedflow {

// Error classes map 1:1 onto the CLI's machine-readable exit classes.
struct Error : std::runtime_error {
    Error(std::string cls, const std::string& msg)
        : std::runtime_error(msg), error_class(std::move(cls)) {}
    std::string error_class;
};

struct InputError : Error {
    explicit InputError(const std::string& msg) : Error("input-error", msg) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error("config-error", msg) {}
};
struct DataError : Error {
    explicit DataError(const std::string& msg) : Error("data-error", msg) {}
};
struct SolveError : Error {
    SolveError(const std::string& msg, double residual)
        : Error("solve-error", msg), last_residual(residual) {}
    double last_residual;
};

/// Ordered universe of party labels; the label position defines the party index.
struct PartySet {
    std::vector<std::string> labels;

    int size() const { return static_cast<int>(labels.size()); }

    int index_of(const std::string& label) const {
        for (int s = 0; s < size(); ++s)
            if (labels[s] == label) return s;
        return -1;
    }
};

/// Political affiliation of a user or post: one party, two parties, or unknown.
struct Affiliation {
    int first = -1;
    int second = -1;

    bool known() const { return first >= 0; }
    bool dual() const { return second >= 0; }

    static Affiliation unknown() { return {}; }
    static Affiliation single(int s) { return {s, -1}; }
    static Affiliation pair(int a, int b) { return {a, b}; }

    bool operator==(const Affiliation&) const = default;
};

/// Directed follower graph over densely numbered users 0..N-1.
/// leaders_of(n) = users n follows; their posts land on n's feed.
struct UserGraph {
    PartySet parties;
    std::vector<std::int64_t> original_ids;                  // dense -> original
    std::unordered_map<std::int64_t, int> dense_ids;         // original -> dense
    std::vector<Affiliation> affiliation;                    // per dense user

    std::vector<int> leader_offsets;   // CSR over leaders, size N+1
    std::vector<int> leaders;
    std::vector<int> follower_offsets; // CSR over followers, size N+1
    std::vector<int> followers;

    int num_users() const { return static_cast<int>(original_ids.size()); }
    std::size_t num_edges() const { return leaders.size(); }

    std::span<const int> leaders_of(int n) const {
        return {leaders.data() + leader_offsets[n],
                leaders.data() + leader_offsets[n + 1]};
    }
    std::span<const int> followers_of(int n) const {
        return {followers.data() + follower_offsets[n],
                followers.data() + follower_offsets[n + 1]};
    }

    int dense_of(std::int64_t original) const {
        auto it = dense_ids.find(original);
        return it == dense_ids.end() ? -1 : it->second;
    }
};

/// Builds a UserGraph from per-user leader lists; derives the follower CSR.
UserGraph make_graph(PartySet parties, std::vector<std::int64_t> original_ids,
                     std::vector<Affiliation> affiliation,
                     const std::vector<std::vector<int>>& leader_lists);

/// Per-user activity: selfpost rate lambda, repost rate mu, per-party split.
struct ActivityRates {
    std::vector<double> lambda;    // size N
    std::vector<double> mu;        // size N
    std::vector<double> lambda_s;  // N x S row-major

    double lambda_of(int n, int s, int S) const { return lambda_s[static_cast<std::size_t>(n) * S + s]; }
};

enum class EventKind { Selfpost, Repost };

struct Event {
    double ts = 0;
    std::int64_t user = 0;        // original id of the acting user
    EventKind kind = EventKind::Selfpost;
    std::int64_t origin = -1;     // original id of the reposted author, if known
    bool origin_known = false;
    Affiliation label;            // label of the propagated post ('?' when unknown)
};

struct EventLog {
    double t_start = 0;
    double t_end = 0;
    std::vector<Event> events;

    double span() const { return t_end - t_start; }
};

/// N x S matrix of average per-party content shares; rows may be masked
/// when no labelled content was ever observed for that user.
struct NewsfeedState {
    int n_users = 0;
    int n_parties = 0;
    std::vector<double> p;        // N x S row-major
    std::vector<std::uint8_t> valid;

    NewsfeedState() = default;
    NewsfeedState(int n, int s, double fill = 0.0)
        : n_users(n), n_parties(s),
          p(static_cast<std::size_t>(n) * s, fill),
          valid(static_cast<std::size_t>(n), 1) {}

    double& at(int n, int s) { return p[static_cast<std::size_t>(n) * n_parties + s]; }
    double at(int n, int s) const { return p[static_cast<std::size_t>(n) * n_parties + s]; }
    std::span<const double> row(int n) const {
        return {p.data() + static_cast<std::size_t>(n) * n_parties,
                static_cast<std::size_t>(n_parties)};
    }
    bool row_valid(int n) const { return valid[static_cast<std::size_t>(n)] != 0; }
    int valid_count() const {
        int c = 0;
        for (auto v : valid) c += v != 0;
        return c;
    }
};

/// Per-user, per-party insertion rates of recommended posts plus the budget
/// they are meant to satisfy.
struct RecommendationPolicy {
    int n_users = 0;
    int n_parties = 0;
    double budget = 0.0;              // B in [0,1)
    std::vector<double> x;            // N x S row-major, nonnegative

    RecommendationPolicy() = default;
    RecommendationPolicy(int n, int s, double b)
        : n_users(n), n_parties(s), budget(b),
          x(static_cast<std::size_t>(n) * s, 0.0) {}

    double& at(int n, int s) { return x[static_cast<std::size_t>(n) * n_parties + s]; }
    double at(int n, int s) const { return x[static_cast<std::size_t>(n) * n_parties + s]; }
    double row_sum(int n) const {
        double t = 0;
        for (int s = 0; s < n_parties; ++s) t += at(n, s);
        return t;
    }
};

}  // namespace feedflow
