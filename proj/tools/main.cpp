// feedflow: models how labelled content flows through a follower graph,
// measures newsfeed diversity, and computes budgeted recommendation rates
// that maximise it. See README.md for the subcommand tour.

#include <cmath>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "feedflow/dataset.hpp"
#include "feedflow/estimation.hpp"
#include "feedflow/equilibrium.hpp"
#include "feedflow/io.hpp"
#include "feedflow/metrics.hpp"
#include "feedflow/optimizer.hpp"
#include "feedflow/simulator.hpp"
#include "feedflow/synthetic.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using feedflow::io::fmt;
using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Manifest {
    std::string command;
    ojson inputs = ojson::object();
    ojson config = ojson::object();
    std::vector<std::string> outputs;

    void add_input(const std::string& name, const fs::path& path) {
        inputs[name] = {{"path", path.string()}, {"fnv1a", feedflow::io::fnv1a_hex(path)}};
    }
    void write(const fs::path& dir) {
        ojson m;
        m["tool"] = "feedflow";
        m["version"] = kVersion;
        m["command"] = command;
        m["inputs"] = inputs;
        m["config"] = config;
        m["outputs"] = outputs;
        feedflow::io::atomic_write(dir / "manifest.json", m.dump(2) + "\n");
    }
};

void ensure_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw feedflow::Error("io-error", "cannot create output directory '" + dir.string() + "'");
}

std::string budget_tag(double b) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", b);
    return buf;
}

// A canonical dataset directory: parties/users/edges plus optional events
// and rate tables.
struct Dataset {
    fs::path dir;
    feedflow::UserGraph graph;
    std::optional<feedflow::EventLog> events;
    std::optional<feedflow::ActivityRates> rates;
};

Dataset load_data_dir(const fs::path& dir, Manifest& manifest) {
    Dataset d;
    d.dir = dir;
    const fs::path parties_path = dir / "parties.csv";
    const fs::path users_path = dir / "users.csv";
    const fs::path edges_path = dir / "edges.csv";
    for (const auto& p : {parties_path, users_path, edges_path})
        if (!fs::exists(p))
            throw feedflow::InputError("missing dataset file '" + p.string() + "'");
    auto parties = feedflow::load_parties(parties_path);
    d.graph = feedflow::load_graph_csv(users_path, edges_path, parties);
    manifest.add_input("parties", parties_path);
    manifest.add_input("users", users_path);
    manifest.add_input("edges", edges_path);

    const fs::path events_path = dir / "events.jsonl";
    if (fs::exists(events_path)) {
        d.events = feedflow::load_events_jsonl(events_path, d.graph);
        manifest.add_input("events", events_path);
    }
    const fs::path lambda_path = dir / "lambda.csv";
    const fs::path mu_path = dir / "mu.csv";
    if (fs::exists(lambda_path) && fs::exists(mu_path)) {
        d.rates = feedflow::load_rates_csv(lambda_path, mu_path, d.graph);
        manifest.add_input("lambda", lambda_path);
        manifest.add_input("mu", mu_path);
    }
    return d;
}

// Rate tables, when present, take precedence over re-estimation from events.
feedflow::ActivityRates require_rates(const Dataset& d) {
    if (d.rates) return *d.rates;
    if (d.events) return feedflow::estimate_rates(*d.events, d.graph);
    throw feedflow::InputError("dataset '" + d.dir.string() +
                               "' has neither rate tables nor an event log");
}

void write_state_csv(const fs::path& path, const feedflow::NewsfeedState& state,
                     const feedflow::UserGraph& graph) {
    std::string out = "user_id,party,value\n";
    for (int u = 0; u < state.n_users; ++u) {
        if (!state.row_valid(u)) continue;
        for (int s = 0; s < state.n_parties; ++s)
            out += std::to_string(graph.original_ids[u]) + "," + graph.parties.labels[s] + "," +
                   fmt(state.at(u, s)) + "\n";
    }
    feedflow::io::atomic_write(path, out);
}

void write_policy_csv(const fs::path& path, const feedflow::RecommendationPolicy& policy,
                      const feedflow::UserGraph& graph) {
    std::string out = "user_id,party,rate\n";
    for (int u = 0; u < policy.n_users; ++u)
        for (int s = 0; s < policy.n_parties; ++s)
            out += std::to_string(graph.original_ids[u]) + "," + graph.parties.labels[s] + "," +
                   fmt(policy.at(u, s)) + "\n";
    feedflow::io::atomic_write(path, out);
}

feedflow::RecommendationPolicy load_policy_csv(const fs::path& path,
                                               const feedflow::UserGraph& graph, double budget) {
    auto content = feedflow::io::read_file(path);
    auto lines = feedflow::io::split(content, '\n');
    if (lines.empty() || lines[0] != "user_id,party,rate")
        throw feedflow::InputError(path.string() + ":1: expected header 'user_id,party,rate'");
    feedflow::RecommendationPolicy pol(graph.num_users(), graph.parties.size(), budget);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto f = feedflow::io::split(lines[i], ',');
        if (f.size() != 3)
            throw feedflow::InputError(path.string() + ":" + std::to_string(i + 1) +
                                       ": expected 3 fields");
        int u = graph.dense_of(std::stoll(f[0]));
        int s = graph.parties.index_of(f[1]);
        if (u < 0 || s < 0)
            throw feedflow::InputError(path.string() + ":" + std::to_string(i + 1) +
                                       ": unknown user or party");
        pol.at(u, s) = std::stod(f[2]);
    }
    return pol;
}

ojson hist_json(const feedflow::Histogram& h) {
    return {{"edges", h.edges}, {"counts", h.counts}};
}

ojson report_json(const feedflow::DiversityReport& rep, const feedflow::UserGraph& graph,
                  std::vector<std::string> notes) {
    ojson j;
    j["n_users"] = graph.num_users();
    j["n_parties"] = graph.parties.size();
    j["parties"] = graph.parties.labels;
    j["valid_rows"] = rep.valid_rows;
    j["masked_rows"] = rep.masked_rows;
    j["phi_bar"] = rep.phi_bar;
    j["mean_echo"] = rep.mean_echo;
    ojson content = ojson::object();
    for (int s = 0; s < graph.parties.size(); ++s)
        content[graph.parties.labels[s]] = rep.content_share[s];
    j["content_share"] = content;
    if (!rep.recommended_share.empty()) {
        ojson rec = ojson::object();
        for (int s = 0; s < graph.parties.size(); ++s)
            rec[graph.parties.labels[s]] = rep.recommended_share[s];
        j["recommended_share"] = rec;
    }
    ojson phi = ojson::array(), echo = ojson::array();
    for (int u = 0; u < graph.num_users(); ++u) {
        phi.push_back(std::isnan(rep.phi[u]) ? ojson(nullptr) : ojson(rep.phi[u]));
        echo.push_back(std::isnan(rep.echo[u]) ? ojson(nullptr) : ojson(rep.echo[u]));
    }
    j["phi"] = phi;
    j["echo"] = echo;
    j["phi_hist"] = hist_json(rep.phi_hist);
    j["echo_hist"] = hist_json(rep.echo_hist);
    j["notes"] = notes;
    return j;
}

void write_histograms_csv(const fs::path& path, const feedflow::DiversityReport& rep) {
    std::string out = "metric,bin_lo,bin_hi,count\n";
    auto emit = [&](const char* name, const feedflow::Histogram& h) {
        for (std::size_t i = 0; i < h.counts.size(); ++i)
            out += std::string(name) + "," + fmt(h.edges[i]) + "," + fmt(h.edges[i + 1]) + "," +
                   std::to_string(h.counts[i]) + "\n";
    };
    emit("phi", rep.phi_hist);
    emit("echo", rep.echo_hist);
    feedflow::io::atomic_write(path, out);
}

ojson comparison_json(const feedflow::ComparisonStats& st, const feedflow::UserGraph& graph,
                      const std::string& name_a, const std::string& name_b) {
    ojson j;
    j["a"] = name_a;
    j["b"] = name_b;
    j["mean_abs_error"] = st.mean_abs_error;
    ojson pearson = ojson::object();
    for (int s = 0; s < graph.parties.size(); ++s)
        pearson[graph.parties.labels[s]] =
            st.pearson[s] ? ojson(*st.pearson[s]) : ojson(nullptr);
    j["pearson"] = pearson;
    j["mean_echo_" + name_a] = st.mean_echo_a;
    j["mean_echo_" + name_b] = st.mean_echo_b;
    return j;
}

const std::vector<std::string> kEstimateNotes = {
    "dual-affiliation selfposts are split half per party, in rates and in replay labels",
};
const std::vector<std::string> kOptimizeNotes = {
    "recommended_share normalises each user's recommendation rates before averaging",
    "the optimal rate matrix may be non-unique; the objective and the feed state are unique",
};

// ---- subcommands ----------------------------------------------------------

int cmd_ingest(const fs::path& users, const fs::path& edges, const fs::path& events,
               const fs::path& parties_path, const fs::path& out) {
    ensure_out_dir(out);
    Manifest manifest;
    manifest.command = "ingest";
    manifest.add_input("users", users);
    manifest.add_input("edges", edges);
    manifest.add_input("events", events);
    manifest.add_input("parties", parties_path);

    auto parties = feedflow::load_parties(parties_path);
    auto [raw_graph, raw_log] = feedflow::load_dataset(users, edges, events, parties);
    auto graph = feedflow::largest_scc(raw_graph);
    auto log = feedflow::filter_events(raw_log, graph);

    feedflow::write_parties_csv(out / "parties.csv", parties);
    feedflow::write_users_csv(out / "users.csv", graph);
    feedflow::write_edges_csv(out / "edges.csv", graph);
    feedflow::write_events_jsonl(out / "events.jsonl", log, parties);

    ojson summary;
    summary["users_after_preprocess"] = raw_graph.num_users();
    summary["users"] = graph.num_users();
    summary["edges"] = graph.num_edges();
    summary["events"] = log.events.size();
    summary["t_start"] = log.t_start;
    summary["t_end"] = log.t_end;
    feedflow::io::atomic_write(out / "summary.json", summary.dump(2) + "\n");

    manifest.outputs = {"parties.csv", "users.csv", "edges.csv", "events.jsonl", "summary.json"};
    manifest.write(out);
    std::cout << "ingest: " << graph.num_users() << " users, " << graph.num_edges() << " edges, "
              << log.events.size() << " events\n";
    return 0;
}

int cmd_estimate(const fs::path& data, const fs::path& out) {
    ensure_out_dir(out);
    Manifest manifest;
    manifest.command = "estimate";
    Dataset d = load_data_dir(data, manifest);
    if (!d.events) throw feedflow::InputError("estimate needs an event log in the dataset");

    auto rates = feedflow::estimate_rates(*d.events, d.graph);
    auto replay = feedflow::replay_empirical(*d.events, d.graph);
    auto report = feedflow::aggregate(replay.state, d.graph);

    feedflow::write_rates_csv(out / "lambda.csv", out / "mu.csv", d.graph, rates);
    write_state_csv(out / "empirical_p.csv", replay.state, d.graph);
    std::string echo_csv = "user_id,value\n";
    for (int u = 0; u < d.graph.num_users(); ++u)
        if (!std::isnan(report.echo[u]))
            echo_csv += std::to_string(d.graph.original_ids[u]) + "," + fmt(report.echo[u]) + "\n";
    feedflow::io::atomic_write(out / "echo.csv", echo_csv);
    feedflow::io::atomic_write(out / "report.json",
                               report_json(report, d.graph, kEstimateNotes).dump(2) + "\n");

    manifest.outputs = {"lambda.csv", "mu.csv", "empirical_p.csv", "echo.csv", "report.json"};
    manifest.write(out);
    std::cout << "estimate: phi_bar=" << fmt(report.phi_bar) << " mean_echo=" << fmt(report.mean_echo)
              << " masked=" << report.masked_rows << "\n";
    return 0;
}

int cmd_equilibrium(const fs::path& data, const fs::path& out, double tol, long max_iter,
                    bool trace) {
    ensure_out_dir(out);
    Manifest manifest;
    manifest.command = "equilibrium";
    manifest.config = {{"tol", tol}, {"max_iter", max_iter}};
    Dataset d = load_data_dir(data, manifest);
    auto rates = require_rates(d);

    auto diag = feedflow::validate(d.graph, rates);
    if (!diag.passed()) throw feedflow::DataError("validation failed: " + diag.describe());

    feedflow::SolveOptions opts;
    opts.tol = tol;
    opts.max_iter = max_iter;
    opts.record_trace = trace;
    auto solved = feedflow::solve_equilibrium(d.graph, rates, opts);
    auto report = feedflow::aggregate(solved.state, d.graph);

    write_state_csv(out / "state_model.csv", solved.state, d.graph);
    feedflow::io::atomic_write(out / "report_model.json",
                               report_json(report, d.graph, {}).dump(2) + "\n");
    manifest.outputs = {"state_model.csv", "report_model.json"};

    if (trace) {
        ojson tr;
        tr["iterations"] = solved.info.iterations;
        tr["spectral_bound"] = solved.info.spectral_bound;
        tr["residual"] = solved.info.residual;
        tr["updates"] = solved.info.update_trace;
        feedflow::io::atomic_write(out / "solver_trace.json", tr.dump(2) + "\n");
        manifest.outputs.push_back("solver_trace.json");
    }

    if (d.events) {
        auto replay = feedflow::replay_empirical(*d.events, d.graph);
        auto st = feedflow::compare(solved.state, replay.state, d.graph);
        feedflow::io::atomic_write(out / "comparison.json",
                                   comparison_json(st, d.graph, "model", "empirical").dump(2) + "\n");
        manifest.outputs.push_back("comparison.json");
        std::cout << "equilibrium: phi_bar=" << fmt(report.phi_bar)
                  << " model_echo=" << fmt(st.mean_echo_a)
                  << " empirical_echo=" << fmt(st.mean_echo_b)
                  << " err=" << fmt(st.mean_abs_error) << "\n";
    } else {
        std::cout << "equilibrium: phi_bar=" << fmt(report.phi_bar)
                  << " mean_echo=" << fmt(report.mean_echo) << "\n";
    }
    manifest.write(out);
    return 0;
}

int cmd_optimize(const fs::path& data, const fs::path& out, std::vector<double> budgets,
                 double tol, long max_iter, double opt_tol, long opt_max_iter) {
    ensure_out_dir(out);
    Manifest manifest;
    manifest.command = "optimize";
    manifest.config = {{"budgets", budgets},
                       {"tol", tol},
                       {"max_iter", max_iter},
                       {"opt_tol", opt_tol},
                       {"opt_max_iter", opt_max_iter}};
    Dataset d = load_data_dir(data, manifest);
    auto rates = require_rates(d);
    auto diag = feedflow::validate(d.graph, rates);
    if (!diag.passed()) throw feedflow::DataError("validation failed: " + diag.describe());

    for (double b : budgets)
        if (b < 0 || b >= 1)
            throw feedflow::ConfigError("budget " + fmt(b) + " outside [0, 1)");

    // Pre-recommendation equilibrium anchors the no-diffusion baselines.
    feedflow::SolveOptions sopts;
    sopts.tol = tol;
    sopts.max_iter = max_iter;
    auto baseline = feedflow::solve_equilibrium(d.graph, rates, sopts);

    // Sweep entries are independent jobs: each writes its own files and
    // returns its summary line; results are joined in budget order.
    auto run_budget = [&](double b) {
        feedflow::OptimizerConfig cfg;
        cfg.budget = b;
        cfg.tol = opt_tol;
        cfg.max_outer = opt_max_iter;
        cfg.solve_tol = tol;
        cfg.solve_max_iter = max_iter;
        auto resu = feedflow::maximize_diversity(d.graph, rates, cfg);
        auto report = feedflow::aggregate(resu.state, d.graph,
                                          b > 0 ? &resu.policy : nullptr);

        const std::string tag = budget_tag(b);
        write_policy_csv(out / ("policy_" + tag + ".csv"), resu.policy, d.graph);
        write_state_csv(out / ("state_" + tag + ".csv"), resu.state, d.graph);
        write_histograms_csv(out / ("histograms_" + tag + ".csv"), report);

        ojson tr;
        tr["status"] = resu.trace.status;
        tr["iterations"] = ojson::array();
        for (const auto& it : resu.trace.iterations)
            tr["iterations"].push_back(
                {{"phi_bar", it.phi_bar}, {"step", it.step}, {"pg_norm", it.pg_norm}});
        feedflow::io::atomic_write(out / ("trace_" + tag + ".json"), tr.dump(2) + "\n");

        ojson rep = report_json(report, d.graph, kOptimizeNotes);
        ojson entry;
        entry["budget"] = b;
        entry["phi_bar"] = report.phi_bar;
        entry["mean_echo"] = report.mean_echo;
        entry["status"] = resu.trace.status;
        entry["iterations"] = resu.trace.iterations.size();
        if (b > 0) {
            // Same optimised policy pushed through the mixing-only model, plus
            // the best policy the mixing-only model itself admits.
            auto mix_same = feedflow::no_diffusion_mix(baseline.state, resu.policy);
            auto nd_policy = feedflow::optimize_no_diffusion(baseline.state, b);
            auto mix_opt = feedflow::no_diffusion_mix(baseline.state, nd_policy);
            ojson nd;
            nd["same_policy_phi_bar"] = feedflow::phi_bar(mix_same);
            nd["same_policy_mean_echo"] = feedflow::aggregate(mix_same, d.graph).mean_echo;
            nd["reoptimized_phi_bar"] = feedflow::phi_bar(mix_opt);
            entry["no_diffusion"] = nd;
            rep["no_diffusion"] = nd;
        }
        feedflow::io::atomic_write(out / ("report_" + tag + ".json"), rep.dump(2) + "\n");
        return entry;
    };

    std::vector<std::future<ojson>> jobs;
    jobs.reserve(budgets.size());
    for (double b : budgets)
        jobs.push_back(std::async(std::launch::async, run_budget, b));

    ojson sweep = ojson::array();
    for (std::size_t i = 0; i < budgets.size(); ++i) {
        ojson entry = jobs[i].get();
        const std::string tag = budget_tag(budgets[i]);
        manifest.outputs.push_back("policy_" + tag + ".csv");
        manifest.outputs.push_back("state_" + tag + ".csv");
        manifest.outputs.push_back("histograms_" + tag + ".csv");
        manifest.outputs.push_back("trace_" + tag + ".json");
        manifest.outputs.push_back("report_" + tag + ".json");
        std::cout << "optimize B=" << tag << ": phi_bar=" << fmt(entry["phi_bar"].get<double>())
                  << " mean_echo=" << fmt(entry["mean_echo"].get<double>())
                  << " status=" << entry["status"].get<std::string>() << "\n";
        sweep.push_back(std::move(entry));
    }
    feedflow::io::atomic_write(out / "sweep.json", sweep.dump(2) + "\n");
    manifest.outputs.push_back("sweep.json");
    manifest.write(out);
    return 0;
}

int cmd_simulate(const fs::path& data, const fs::path& out, const std::string& policy_file,
                 double budget, double horizon, int feed_size, double burn_in,
                 std::uint64_t seed, int batches) {
    ensure_out_dir(out);
    Manifest manifest;
    manifest.command = "simulate";
    manifest.config = {{"horizon", horizon}, {"feed_size", feed_size}, {"burn_in", burn_in},
                       {"seed", seed},       {"batches", batches},     {"budget", budget}};
    Dataset d = load_data_dir(data, manifest);
    auto rates = require_rates(d);
    auto diag = feedflow::validate(d.graph, rates);
    if (!diag.passed()) throw feedflow::DataError("validation failed: " + diag.describe());

    feedflow::SimConfig cfg;
    cfg.horizon = horizon;
    cfg.feed_size = feed_size;
    cfg.burn_in = burn_in;
    cfg.seed = seed;
    cfg.batches = batches;
    if (!policy_file.empty()) {
        manifest.add_input("policy", policy_file);
        cfg.policy = load_policy_csv(policy_file, d.graph, budget);
    }

    auto sim = feedflow::simulate(d.graph, rates, cfg);
    auto model = cfg.policy ? feedflow::solve_with_recommendations(d.graph, rates, *cfg.policy)
                            : feedflow::solve_equilibrium(d.graph, rates);

    double max_err = 0, sum_err = 0;
    long count = 0;
    for (int u = 0; u < d.graph.num_users(); ++u) {
        if (!sim.p_hat.row_valid(u)) continue;
        for (int s = 0; s < d.graph.parties.size(); ++s) {
            const double e = std::abs(sim.p_hat.at(u, s) - model.state.at(u, s));
            max_err = std::max(max_err, e);
            sum_err += e;
            ++count;
        }
    }

    write_state_csv(out / "p_hat.csv", sim.p_hat, d.graph);
    ojson diagj;
    diagj["selfposts"] = sim.selfposts;
    diagj["reposts"] = sim.reposts;
    diagj["skipped_reposts"] = sim.skipped_reposts;
    diagj["recommendations"] = sim.recommendations;
    diagj["min_events_per_user"] = sim.min_events_per_user;
    diagj["measured_time"] = sim.measured_time;
    double empty_total = 0;
    for (double t : sim.empty_feed_time) empty_total += t;
    diagj["empty_feed_time_total"] = empty_total;
    feedflow::io::atomic_write(out / "diagnostics.json", diagj.dump(2) + "\n");

    ojson cmp;
    cmp["max_abs_error"] = max_err;
    cmp["mean_abs_error"] = count ? sum_err / count : 0.0;
    cmp["compared_entries"] = count;
    feedflow::io::atomic_write(out / "comparison_model.json", cmp.dump(2) + "\n");

    manifest.outputs = {"p_hat.csv", "diagnostics.json", "comparison_model.json"};
    manifest.write(out);
    std::cout << "simulate: max_err=" << fmt(max_err) << " mean_err="
              << fmt(count ? sum_err / count : 0.0) << " events="
              << sim.selfposts + sim.reposts + sim.recommendations << "\n";
    return 0;
}

int cmd_synth(int n, int s, double intra, double inter, double lambda_min, double lambda_max,
              double mu_min, double mu_max, std::uint64_t seed, const fs::path& out) {
    ensure_out_dir(out);
    Manifest manifest;
    manifest.command = "synth";
    manifest.config = {{"n", n},
                       {"s", s},
                       {"intra", intra},
                       {"inter", inter},
                       {"lambda_min", lambda_min},
                       {"lambda_max", lambda_max},
                       {"mu_min", mu_min},
                       {"mu_max", mu_max},
                       {"seed", seed}};

    feedflow::SyntheticSpec spec;
    spec.n_users = n;
    spec.n_parties = s;
    spec.intra_p = intra;
    spec.inter_p = inter;
    spec.lambda_min = lambda_min;
    spec.lambda_max = lambda_max;
    spec.mu_min = mu_min;
    spec.mu_max = mu_max;
    spec.seed = seed;
    auto inst = feedflow::generate(spec);

    feedflow::write_parties_csv(out / "parties.csv", inst.graph.parties);
    feedflow::write_users_csv(out / "users.csv", inst.graph);
    feedflow::write_edges_csv(out / "edges.csv", inst.graph);
    feedflow::write_rates_csv(out / "lambda.csv", out / "mu.csv", inst.graph, inst.rates);

    ojson summary;
    summary["users"] = inst.graph.num_users();
    summary["edges"] = inst.graph.num_edges();
    summary["repair_edges"] = inst.repair_edges;
    feedflow::io::atomic_write(out / "summary.json", summary.dump(2) + "\n");

    manifest.outputs = {"parties.csv", "users.csv", "edges.csv", "lambda.csv", "mu.csv",
                        "summary.json"};
    manifest.write(out);
    std::cout << "synth: " << inst.graph.num_users() << " users, " << inst.graph.num_edges()
              << " edges (" << inst.repair_edges << " repair)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"feedflow: newsfeed content-flow model, diversity metrics and "
                 "budgeted recommendation optimisation"};
    app.require_subcommand(1);

    // ingest
    std::string users_file, edges_file, events_file, parties_file;
    auto* ingest = app.add_subcommand("ingest", "preprocess a raw dataset");
    fs::path out_dir;
    ingest->add_option("--users", users_file, "user table CSV")->required();
    ingest->add_option("--edges", edges_file, "edge table CSV")->required();
    ingest->add_option("--events", events_file, "event log JSONL")->required();
    ingest->add_option("--parties", parties_file, "party list CSV")->required();
    ingest->add_option("--out", out_dir, "output directory")->required();

    // estimate
    fs::path data_dir;
    auto* estimate = app.add_subcommand("estimate", "estimate rates and empirical feed state");
    estimate->add_option("--data", data_dir, "canonical dataset directory")->required();
    estimate->add_option("--out", out_dir, "output directory")->required();

    // equilibrium
    double tol = 1e-10;
    long max_iter = 100000;
    bool trace = false;
    auto* equilibrium = app.add_subcommand("equilibrium", "solve the steady state");
    equilibrium->add_option("--data", data_dir)->required();
    equilibrium->add_option("--out", out_dir)->required();
    equilibrium->add_option("--tol", tol, "solver update tolerance");
    equilibrium->add_option("--max-iter", max_iter, "solver iteration cap");
    equilibrium->add_flag("--trace", trace, "emit the solver trace");

    // optimize
    std::vector<double> budgets{0, 0.02, 0.05, 0.1, 0.2, 0.5};
    double opt_tol = 1e-8;
    long opt_max_iter = 2000;
    auto* optimize = app.add_subcommand("optimize", "maximise diversity over budgets");
    optimize->add_option("--data", data_dir)->required();
    optimize->add_option("--out", out_dir)->required();
    optimize->add_option("--budget", budgets, "budget list")->delimiter(',');
    optimize->add_option("--tol", tol, "equilibrium solver tolerance");
    optimize->add_option("--max-iter", max_iter, "equilibrium solver cap");
    optimize->add_option("--opt-tol", opt_tol, "projected-gradient tolerance");
    optimize->add_option("--opt-max-iter", opt_max_iter, "ascent iteration cap");

    // simulate
    std::string policy_file;
    double budget = 0.0, horizon = 1000.0, burn_in = 0.2;
    int feed_size = 10, batches = 1;
    std::uint64_t seed = 0;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo oracle run");
    simulate->add_option("--data", data_dir)->required();
    simulate->add_option("--out", out_dir)->required();
    simulate->add_option("--policy", policy_file, "recommendation policy CSV");
    simulate->add_option("--budget", budget, "budget the policy was built for");
    simulate->add_option("--horizon", horizon, "simulated time span");
    simulate->add_option("--feed-size", feed_size, "newsfeed capacity");
    simulate->add_option("--burn-in", burn_in, "burn-in fraction");
    simulate->add_option("--seed", seed, "random seed");
    simulate->add_option("--batches", batches, "batch count for batch means");

    // synth
    int synth_n = 100, synth_s = 2;
    double intra = 0.5, inter = 0.05;
    double lambda_min = 0.5, lambda_max = 1.5, mu_min = 0.5, mu_max = 1.5;
    auto* synth = app.add_subcommand("synth", "generate a synthetic instance");
    synth->add_option("--n", synth_n, "number of users");
    synth->add_option("--s", synth_s, "number of parties");
    synth->add_option("--intra", intra, "intra-party follow probability");
    synth->add_option("--inter", inter, "inter-party follow probability");
    synth->add_option("--lambda-min", lambda_min);
    synth->add_option("--lambda-max", lambda_max);
    synth->add_option("--mu-min", mu_min);
    synth->add_option("--mu-max", mu_max);
    synth->add_option("--seed", seed, "random seed");
    synth->add_option("--out", out_dir)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed())
            return cmd_ingest(users_file, edges_file, events_file, parties_file, out_dir);
        if (estimate->parsed()) return cmd_estimate(data_dir, out_dir);
        if (equilibrium->parsed())
            return cmd_equilibrium(data_dir, out_dir, tol, max_iter, trace);
        if (optimize->parsed())
            return cmd_optimize(data_dir, out_dir, budgets, tol, max_iter, opt_tol, opt_max_iter);
        if (simulate->parsed())
            return cmd_simulate(data_dir, out_dir, policy_file, budget, horizon, feed_size,
                                burn_in, seed, batches);
        if (synth->parsed())
            return cmd_synth(synth_n, synth_s, intra, inter, lambda_min, lambda_max, mu_min,
                             mu_max, seed, out_dir);
    } catch (const feedflow::Error& e) {
        std::cerr << e.error_class << ": " << e.what() << "\n";
        if (e.error_class == "input-error") return 2;
        if (e.error_class == "config-error") return 3;
        if (e.error_class == "data-error") return 4;
        if (e.error_class == "solve-error") return 5;
        return 6;
    } catch (const std::exception& e) {
        std::cerr << "internal-error: " << e.what() << "\n";
        return 10;
    }
    return 0;
}
