#include "feedflow/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "feedflow/io.hpp"
#include "json.hpp"

namespace feedflow {

namespace {

std::int64_t parse_id(const std::string& field, const std::string& file, int line_no) {
    try {
        std::size_t pos = 0;
        std::int64_t id = std::stoll(field, &pos);
        if (pos != field.size()) throw std::invalid_argument(field);
        return id;
    } catch (const std::exception&) {
        throw InputError(file + ":" + std::to_string(line_no) + ": malformed id '" + field + "'");
    }
}

Affiliation parse_affiliation(const std::string& field, const PartySet& parties,
                              const std::string& file, int line_no) {
    if (field == "?") return Affiliation::unknown();
    auto parts = io::split(field, '/');
    if (parts.size() > 2)
        throw InputError(file + ":" + std::to_string(line_no) + ": affiliation '" + field +
                         "' names more than two parties");
    std::vector<int> idx;
    for (const auto& code : parts) {
        int s = parties.index_of(code);
        if (s < 0)
            throw InputError(file + ":" + std::to_string(line_no) + ": unknown party code '" +
                             code + "'");
        idx.push_back(s);
    }
    if (idx.size() == 2) {
        if (idx[0] == idx[1])
            throw InputError(file + ":" + std::to_string(line_no) + ": duplicate party in '" +
                             field + "'");
        return Affiliation::pair(idx[0], idx[1]);
    }
    return Affiliation::single(idx[0]);
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::string content = io::read_file(path);
    std::vector<std::string> lines;
    std::string cur;
    for (char c : content) {
        if (c == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

// Tarjan over an arbitrary adjacency, iterative so deep graphs don't blow the
// stack. Returns component id per node.
std::vector<int> tarjan_components(int n, const std::vector<std::vector<int>>& adj, int& n_comp) {
    std::vector<int> index(n, -1), lowlink(n, 0), comp(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    int next_index = 0;
    n_comp = 0;

    struct Frame {
        int node;
        std::size_t child;
    };
    std::vector<Frame> call;

    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        call.push_back({root, 0});
        while (!call.empty()) {
            auto& fr = call.back();
            int v = fr.node;
            if (fr.child == 0) {
                index[v] = lowlink[v] = next_index++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            bool descended = false;
            while (fr.child < adj[v].size()) {
                int w = adj[v][fr.child++];
                if (index[w] == -1) {
                    call.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) lowlink[v] = std::min(lowlink[v], index[w]);
            }
            if (descended) continue;
            if (lowlink[v] == index[v]) {
                while (true) {
                    int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = n_comp;
                    if (w == v) break;
                }
                ++n_comp;
            }
            call.pop_back();
            if (!call.empty()) {
                int parent = call.back().node;
                lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
            }
        }
    }
    return comp;
}

}  // namespace

UserGraph make_graph(PartySet parties, std::vector<std::int64_t> original_ids,
                     std::vector<Affiliation> affiliation,
                     const std::vector<std::vector<int>>& leader_lists) {
    UserGraph g;
    g.parties = std::move(parties);
    g.original_ids = std::move(original_ids);
    g.affiliation = std::move(affiliation);
    const int n = g.num_users();
    g.dense_ids.reserve(n);
    for (int i = 0; i < n; ++i) g.dense_ids.emplace(g.original_ids[i], i);

    g.leader_offsets.assign(n + 1, 0);
    std::vector<int> follower_count(n, 0);
    for (int i = 0; i < n; ++i) {
        g.leader_offsets[i + 1] = g.leader_offsets[i] + static_cast<int>(leader_lists[i].size());
        for (int l : leader_lists[i]) ++follower_count[l];
    }
    g.leaders.reserve(g.leader_offsets[n]);
    for (int i = 0; i < n; ++i)
        g.leaders.insert(g.leaders.end(), leader_lists[i].begin(), leader_lists[i].end());

    g.follower_offsets.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) g.follower_offsets[i + 1] = g.follower_offsets[i] + follower_count[i];
    g.followers.resize(g.leaders.size());
    std::vector<int> cursor(g.follower_offsets.begin(), g.follower_offsets.end() - 1);
    for (int f = 0; f < n; ++f)
        for (int l : leader_lists[f]) g.followers[cursor[l]++] = f;
    return g;
}

std::pair<UserGraph, EventLog> load_dataset(const std::filesystem::path& user_table,
                                            const std::filesystem::path& edge_table,
                                            const std::filesystem::path& event_log,
                                            const PartySet& parties) {
    const std::string ufile = user_table.string();
    auto ulines = read_lines(user_table);
    if (ulines.empty() || ulines[0] != "user_id,affiliation")
        throw InputError(ufile + ":1: expected header 'user_id,affiliation'");

    std::unordered_map<std::int64_t, Affiliation> table;  // full table, pre-removal
    std::vector<std::int64_t> order;
    for (std::size_t i = 1; i < ulines.size(); ++i) {
        if (ulines[i].empty()) continue;
        auto fields = io::split(ulines[i], ',');
        if (fields.size() != 2)
            throw InputError(ufile + ":" + std::to_string(i + 1) + ": expected 2 fields, got " +
                             std::to_string(fields.size()));
        std::int64_t id = parse_id(fields[0], ufile, static_cast<int>(i + 1));
        Affiliation aff = parse_affiliation(fields[1], parties, ufile, static_cast<int>(i + 1));
        if (!table.emplace(id, aff).second)
            throw InputError(ufile + ":" + std::to_string(i + 1) + ": duplicate user id " +
                             std::to_string(id));
        order.push_back(id);
    }

    // Events: header line with the log span, then one event per line.
    const std::string efile = event_log.string();
    auto elines = read_lines(event_log);
    if (elines.empty()) throw InputError(efile + ": empty event log");
    double t_start = 0, t_end = 0;
    try {
        auto header = nlohmann::json::parse(elines[0]);
        t_start = header.at("t_start").get<double>();
        t_end = header.at("t_end").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(efile + ":1: bad header line: " + e.what());
    }
    if (!(t_end > t_start)) throw InputError(efile + ": log span is empty (t_end <= t_start)");

    std::vector<Event> events;
    std::unordered_map<std::int64_t, std::pair<int, int>> activity;  // id -> (tweets, retweets)
    for (std::size_t i = 1; i < elines.size(); ++i) {
        if (elines[i].empty()) continue;
        Event ev;
        try {
            auto j = nlohmann::json::parse(elines[i]);
            ev.ts = j.at("ts").get<double>();
            ev.user = j.at("user").get<std::int64_t>();
            std::string kind = j.at("kind").get<std::string>();
            if (kind == "tweet")
                ev.kind = EventKind::Selfpost;
            else if (kind == "retweet")
                ev.kind = EventKind::Repost;
            else
                throw InputError(efile + ":" + std::to_string(i + 1) + ": unknown kind '" + kind + "'");
            if (ev.kind == EventKind::Repost) {
                const auto& o = j.at("origin");
                if (o.is_number_integer()) {
                    ev.origin = o.get<std::int64_t>();
                    ev.origin_known = true;
                }  // "?" or anything else stays unknown
            }
        } catch (const nlohmann::json::exception& e) {
            throw InputError(efile + ":" + std::to_string(i + 1) + ": bad event: " + e.what());
        }
        auto it = table.find(ev.user);
        if (it == table.end())
            throw InputError(efile + ":" + std::to_string(i + 1) + ": event references unknown user " +
                             std::to_string(ev.user));
        if (ev.ts < t_start || ev.ts > t_end)
            throw InputError(efile + ":" + std::to_string(i + 1) + ": timestamp " + io::fmt(ev.ts) +
                             " outside log span");
        // Label: tweets carry the creator's affiliation; retweets the origin
        // author's, '?' if that author is unknown or unannotated.
        if (ev.kind == EventKind::Selfpost) {
            ev.label = it->second;
        } else if (ev.origin_known) {
            auto oit = table.find(ev.origin);
            ev.label = oit == table.end() ? Affiliation::unknown() : oit->second;
        }
        auto& act = activity[ev.user];
        (ev.kind == EventKind::Selfpost ? act.first : act.second) += 1;
        events.push_back(ev);
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.ts < b.ts; });

    // Keep users with a known affiliation and at least one tweet or retweet.
    std::unordered_set<std::int64_t> kept;
    for (std::int64_t id : order) {
        if (!table[id].known()) continue;
        auto it = activity.find(id);
        if (it == activity.end() || (it->second.first == 0 && it->second.second == 0)) continue;
        kept.insert(id);
    }

    const std::string gfile = edge_table.string();
    auto glines = read_lines(edge_table);
    if (glines.empty() || glines[0] != "follower_id,leader_id")
        throw InputError(gfile + ":1: expected header 'follower_id,leader_id'");
    std::vector<std::pair<std::int64_t, std::int64_t>> edges;
    for (std::size_t i = 1; i < glines.size(); ++i) {
        if (glines[i].empty()) continue;
        auto fields = io::split(glines[i], ',');
        if (fields.size() != 2)
            throw InputError(gfile + ":" + std::to_string(i + 1) + ": expected 2 fields, got " +
                             std::to_string(fields.size()));
        std::int64_t f = parse_id(fields[0], gfile, static_cast<int>(i + 1));
        std::int64_t l = parse_id(fields[1], gfile, static_cast<int>(i + 1));
        if (!table.count(f))
            throw InputError(gfile + ":" + std::to_string(i + 1) + ": edge references unknown user " +
                             std::to_string(f));
        if (!table.count(l))
            throw InputError(gfile + ":" + std::to_string(i + 1) + ": edge references unknown user " +
                             std::to_string(l));
        if (f == l) continue;  // no self-loops
        if (kept.count(f) && kept.count(l)) edges.emplace_back(f, l);
    }

    // Dense ids in ascending original-id order.
    std::vector<std::int64_t> ids(kept.begin(), kept.end());
    std::sort(ids.begin(), ids.end());
    std::unordered_map<std::int64_t, int> dense;
    for (std::size_t i = 0; i < ids.size(); ++i) dense.emplace(ids[i], static_cast<int>(i));

    std::vector<Affiliation> affs(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) affs[i] = table[ids[i]];

    std::vector<std::vector<int>> leader_lists(ids.size());
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (auto [f, l] : edges) leader_lists[dense[f]].push_back(dense[l]);

    UserGraph graph = make_graph(parties, std::move(ids), std::move(affs), leader_lists);

    EventLog log;
    log.t_start = t_start;
    log.t_end = t_end;
    for (auto& ev : events)
        if (kept.count(ev.user)) log.events.push_back(ev);
    return {std::move(graph), std::move(log)};
}

UserGraph largest_scc(const UserGraph& graph) {
    const int n = graph.num_users();
    if (n == 0) throw DataError("largest_scc: empty graph");

    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i) {
        auto ls = graph.leaders_of(i);
        adj[i].assign(ls.begin(), ls.end());
    }
    int n_comp = 0;
    std::vector<int> comp = tarjan_components(n, adj, n_comp);

    std::vector<int> size(n_comp, 0);
    std::vector<std::int64_t> min_id(n_comp, std::numeric_limits<std::int64_t>::max());
    for (int i = 0; i < n; ++i) {
        ++size[comp[i]];
        min_id[comp[i]] = std::min(min_id[comp[i]], graph.original_ids[i]);
    }
    int best = 0;
    for (int c = 1; c < n_comp; ++c) {
        if (size[c] > size[best] || (size[c] == size[best] && min_id[c] < min_id[best])) best = c;
    }

    std::vector<int> sel;
    for (int i = 0; i < n; ++i)
        if (comp[i] == best) sel.push_back(i);
    std::vector<int> new_id(n, -1);
    for (std::size_t i = 0; i < sel.size(); ++i) new_id[sel[i]] = static_cast<int>(i);

    std::vector<std::int64_t> ids(sel.size());
    std::vector<Affiliation> affs(sel.size());
    std::vector<std::vector<int>> leader_lists(sel.size());
    for (std::size_t i = 0; i < sel.size(); ++i) {
        ids[i] = graph.original_ids[sel[i]];
        affs[i] = graph.affiliation[sel[i]];
        for (int l : graph.leaders_of(sel[i]))
            if (new_id[l] >= 0) leader_lists[i].push_back(new_id[l]);
    }
    return make_graph(graph.parties, std::move(ids), std::move(affs), leader_lists);
}

EventLog filter_events(const EventLog& log, const UserGraph& graph) {
    EventLog out;
    out.t_start = log.t_start;
    out.t_end = log.t_end;
    for (const auto& ev : log.events)
        if (graph.dense_of(ev.user) >= 0) out.events.push_back(ev);
    return out;
}

Diagnostics validate(const UserGraph& graph, const ActivityRates& rates) {
    Diagnostics d;
    const int n = graph.num_users();
    const int S = graph.parties.size();

    if (n > 0) {
        std::vector<std::vector<int>> adj(n);
        for (int i = 0; i < n; ++i) {
            auto ls = graph.leaders_of(i);
            adj[i].assign(ls.begin(), ls.end());
        }
        int n_comp = 0;
        tarjan_components(n, adj, n_comp);
        d.strongly_connected = n_comp == 1;
    }

    d.has_creator = std::any_of(rates.lambda.begin(), rates.lambda.end(),
                                [](double l) { return l > 0; });

    for (int i = 0; i < n; ++i) {
        double agg = 0;
        for (int k : graph.leaders_of(i)) agg += rates.lambda[k] + rates.mu[k];
        if (!(agg > 0)) d.inactive_leader_sets.push_back(i);
    }

    d.lambda_split_consistent = true;
    for (int i = 0; i < n; ++i) {
        double sum = 0;
        for (int s = 0; s < S; ++s) sum += rates.lambda_of(i, s, S);
        if (std::abs(sum - rates.lambda[i]) > 1e-12 * std::max(1.0, rates.lambda[i]))
            d.lambda_split_consistent = false;
    }
    return d;
}

std::string Diagnostics::describe() const {
    std::ostringstream ss;
    ss << "strongly_connected=" << (strongly_connected ? "pass" : "FAIL")
       << " has_creator=" << (has_creator ? "pass" : "FAIL (no creator)")
       << " leader_activity=";
    if (inactive_leader_sets.empty())
        ss << "pass";
    else
        ss << "FAIL (" << inactive_leader_sets.size() << " inactive leader sets)";
    ss << " lambda_split=" << (lambda_split_consistent ? "pass" : "FAIL");
    return ss.str();
}

PartySet load_parties(const std::filesystem::path& party_file) {
    auto lines = read_lines(party_file);
    if (lines.empty() || lines[0] != "party")
        throw InputError(party_file.string() + ":1: expected header 'party'");
    PartySet ps;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        if (ps.index_of(lines[i]) >= 0)
            throw InputError(party_file.string() + ":" + std::to_string(i + 1) +
                             ": duplicate party '" + lines[i] + "'");
        ps.labels.push_back(lines[i]);
    }
    if (ps.size() == 0) throw InputError(party_file.string() + ": no parties listed");
    return ps;
}

namespace {
std::string affiliation_code(const Affiliation& a, const PartySet& ps) {
    if (!a.known()) return "?";
    std::string code = ps.labels[a.first];
    if (a.dual()) code += "/" + ps.labels[a.second];
    return code;
}
}  // namespace

void write_parties_csv(const std::filesystem::path& path, const PartySet& parties) {
    std::string out = "party\n";
    for (const auto& l : parties.labels) out += l + "\n";
    io::atomic_write(path, out);
}

void write_users_csv(const std::filesystem::path& path, const UserGraph& graph) {
    std::string out = "user_id,affiliation\n";
    for (int i = 0; i < graph.num_users(); ++i)
        out += std::to_string(graph.original_ids[i]) + "," +
               affiliation_code(graph.affiliation[i], graph.parties) + "\n";
    io::atomic_write(path, out);
}

void write_edges_csv(const std::filesystem::path& path, const UserGraph& graph) {
    std::string out = "follower_id,leader_id\n";
    for (int f = 0; f < graph.num_users(); ++f)
        for (int l : graph.leaders_of(f))
            out += std::to_string(graph.original_ids[f]) + "," +
                   std::to_string(graph.original_ids[l]) + "\n";
    io::atomic_write(path, out);
}

void write_events_jsonl(const std::filesystem::path& path, const EventLog& log,
                        const PartySet& parties) {
    std::string out =
        "{\"t_start\":" + io::fmt(log.t_start) + ",\"t_end\":" + io::fmt(log.t_end) + "}\n";
    for (const auto& ev : log.events) {
        out += "{\"ts\":" + io::fmt(ev.ts) + ",\"user\":" + std::to_string(ev.user) + ",\"kind\":\"" +
               (ev.kind == EventKind::Selfpost ? "tweet" : "retweet") + "\",\"origin\":";
        if (ev.kind == EventKind::Repost && ev.origin_known)
            out += std::to_string(ev.origin);
        else if (ev.kind == EventKind::Repost)
            out += "\"?\"";
        else
            out += std::to_string(ev.user);
        if (ev.kind == EventKind::Repost)
            out += ",\"label\":\"" + affiliation_code(ev.label, parties) + "\"";
        out += "}\n";
    }
    io::atomic_write(path, out);
}

UserGraph load_graph_csv(const std::filesystem::path& users_path,
                         const std::filesystem::path& edges_path, const PartySet& parties) {
    const std::string ufile = users_path.string();
    auto ulines = read_lines(users_path);
    if (ulines.empty() || ulines[0] != "user_id,affiliation")
        throw InputError(ufile + ":1: expected header 'user_id,affiliation'");

    std::vector<std::int64_t> ids;
    std::unordered_map<std::int64_t, Affiliation> table;
    for (std::size_t i = 1; i < ulines.size(); ++i) {
        if (ulines[i].empty()) continue;
        auto fields = io::split(ulines[i], ',');
        if (fields.size() != 2)
            throw InputError(ufile + ":" + std::to_string(i + 1) + ": expected 2 fields");
        std::int64_t id = parse_id(fields[0], ufile, static_cast<int>(i + 1));
        Affiliation aff = parse_affiliation(fields[1], parties, ufile, static_cast<int>(i + 1));
        if (!aff.known())
            throw InputError(ufile + ":" + std::to_string(i + 1) +
                             ": unknown affiliation in preprocessed dataset");
        if (!table.emplace(id, aff).second)
            throw InputError(ufile + ":" + std::to_string(i + 1) + ": duplicate user id " +
                             std::to_string(id));
        ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    std::unordered_map<std::int64_t, int> dense;
    for (std::size_t i = 0; i < ids.size(); ++i) dense.emplace(ids[i], static_cast<int>(i));
    std::vector<Affiliation> affs(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) affs[i] = table[ids[i]];

    const std::string gfile = edges_path.string();
    auto glines = read_lines(edges_path);
    if (glines.empty() || glines[0] != "follower_id,leader_id")
        throw InputError(gfile + ":1: expected header 'follower_id,leader_id'");
    std::vector<std::vector<int>> leader_lists(ids.size());
    for (std::size_t i = 1; i < glines.size(); ++i) {
        if (glines[i].empty()) continue;
        auto fields = io::split(glines[i], ',');
        if (fields.size() != 2)
            throw InputError(gfile + ":" + std::to_string(i + 1) + ": expected 2 fields");
        std::int64_t f = parse_id(fields[0], gfile, static_cast<int>(i + 1));
        std::int64_t l = parse_id(fields[1], gfile, static_cast<int>(i + 1));
        auto fit = dense.find(f);
        auto lit = dense.find(l);
        if (fit == dense.end() || lit == dense.end())
            throw InputError(gfile + ":" + std::to_string(i + 1) + ": edge references unknown user");
        if (f == l)
            throw InputError(gfile + ":" + std::to_string(i + 1) + ": self-loop in preprocessed dataset");
        leader_lists[fit->second].push_back(lit->second);
    }
    return make_graph(parties, std::move(ids), std::move(affs), leader_lists);
}

EventLog load_events_jsonl(const std::filesystem::path& path, const UserGraph& graph) {
    const std::string efile = path.string();
    auto elines = read_lines(path);
    if (elines.empty()) throw InputError(efile + ": empty event log");
    EventLog log;
    try {
        auto header = nlohmann::json::parse(elines[0]);
        log.t_start = header.at("t_start").get<double>();
        log.t_end = header.at("t_end").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(efile + ":1: bad header line: " + e.what());
    }
    if (!(log.t_end > log.t_start)) throw InputError(efile + ": log span is empty");

    for (std::size_t i = 1; i < elines.size(); ++i) {
        if (elines[i].empty()) continue;
        Event ev;
        try {
            auto j = nlohmann::json::parse(elines[i]);
            ev.ts = j.at("ts").get<double>();
            ev.user = j.at("user").get<std::int64_t>();
            std::string kind = j.at("kind").get<std::string>();
            if (kind == "tweet")
                ev.kind = EventKind::Selfpost;
            else if (kind == "retweet")
                ev.kind = EventKind::Repost;
            else
                throw InputError(efile + ":" + std::to_string(i + 1) + ": unknown kind '" + kind + "'");
            if (ev.kind == EventKind::Repost && j.contains("origin") &&
                j["origin"].is_number_integer()) {
                ev.origin = j["origin"].get<std::int64_t>();
                ev.origin_known = true;
            }
            int actor = graph.dense_of(ev.user);
            if (actor < 0)
                throw InputError(efile + ":" + std::to_string(i + 1) +
                                 ": event references unknown user " + std::to_string(ev.user));
            if (ev.ts < log.t_start || ev.ts > log.t_end)
                throw InputError(efile + ":" + std::to_string(i + 1) + ": timestamp outside log span");
            if (j.contains("label")) {
                ev.label = parse_affiliation(j["label"].get<std::string>(), graph.parties, efile,
                                             static_cast<int>(i + 1));
            } else if (ev.kind == EventKind::Selfpost) {
                ev.label = graph.affiliation[actor];
            } else if (ev.origin_known) {
                int o = graph.dense_of(ev.origin);
                ev.label = o >= 0 ? graph.affiliation[o] : Affiliation::unknown();
            }
        } catch (const nlohmann::json::exception& e) {
            throw InputError(efile + ":" + std::to_string(i + 1) + ": bad event: " + e.what());
        }
        log.events.push_back(ev);
    }
    std::stable_sort(log.events.begin(), log.events.end(),
                     [](const Event& a, const Event& b) { return a.ts < b.ts; });
    return log;
}

void write_rates_csv(const std::filesystem::path& lambda_path,
                     const std::filesystem::path& mu_path, const UserGraph& graph,
                     const ActivityRates& rates) {
    const int S = graph.parties.size();
    std::string lout = "user_id,party,value\n";
    for (int i = 0; i < graph.num_users(); ++i)
        for (int s = 0; s < S; ++s)
            lout += std::to_string(graph.original_ids[i]) + "," + graph.parties.labels[s] + "," +
                    io::fmt(rates.lambda_of(i, s, S)) + "\n";
    io::atomic_write(lambda_path, lout);

    std::string mout = "user_id,value\n";
    for (int i = 0; i < graph.num_users(); ++i)
        mout += std::to_string(graph.original_ids[i]) + "," + io::fmt(rates.mu[i]) + "\n";
    io::atomic_write(mu_path, mout);
}

ActivityRates load_rates_csv(const std::filesystem::path& lambda_path,
                             const std::filesystem::path& mu_path, const UserGraph& graph) {
    const int n = graph.num_users();
    const int S = graph.parties.size();
    ActivityRates rates;
    rates.lambda.assign(n, 0.0);
    rates.mu.assign(n, 0.0);
    rates.lambda_s.assign(static_cast<std::size_t>(n) * S, 0.0);

    auto llines = read_lines(lambda_path);
    if (llines.empty() || llines[0] != "user_id,party,value")
        throw InputError(lambda_path.string() + ":1: expected header 'user_id,party,value'");
    for (std::size_t i = 1; i < llines.size(); ++i) {
        if (llines[i].empty()) continue;
        auto f = io::split(llines[i], ',');
        if (f.size() != 3)
            throw InputError(lambda_path.string() + ":" + std::to_string(i + 1) + ": expected 3 fields");
        int u = graph.dense_of(parse_id(f[0], lambda_path.string(), static_cast<int>(i + 1)));
        if (u < 0)
            throw InputError(lambda_path.string() + ":" + std::to_string(i + 1) +
                             ": unknown user " + f[0]);
        int s = graph.parties.index_of(f[1]);
        if (s < 0)
            throw InputError(lambda_path.string() + ":" + std::to_string(i + 1) +
                             ": unknown party '" + f[1] + "'");
        const double v = std::stod(f[2]);
        if (v < 0)
            throw InputError(lambda_path.string() + ":" + std::to_string(i + 1) +
                             ": negative rate");
        rates.lambda_s[static_cast<std::size_t>(u) * S + s] = v;
    }
    for (int u = 0; u < n; ++u) {
        double sum = 0;
        for (int s = 0; s < S; ++s) sum += rates.lambda_of(u, s, S);
        rates.lambda[u] = sum;
    }

    auto mlines = read_lines(mu_path);
    if (mlines.empty() || mlines[0] != "user_id,value")
        throw InputError(mu_path.string() + ":1: expected header 'user_id,value'");
    for (std::size_t i = 1; i < mlines.size(); ++i) {
        if (mlines[i].empty()) continue;
        auto f = io::split(mlines[i], ',');
        if (f.size() != 2)
            throw InputError(mu_path.string() + ":" + std::to_string(i + 1) + ": expected 2 fields");
        int u = graph.dense_of(parse_id(f[0], mu_path.string(), static_cast<int>(i + 1)));
        if (u < 0)
            throw InputError(mu_path.string() + ":" + std::to_string(i + 1) + ": unknown user " + f[0]);
        const double v = std::stod(f[1]);
        if (v < 0)
            throw InputError(mu_path.string() + ":" + std::to_string(i + 1) + ": negative rate");
        rates.mu[u] = v;
    }
    return rates;
}

}  // namespace feedflow
