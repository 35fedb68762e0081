// Acceptance suite: one self-contained check per release criterion, each
// printed as a single [PASS]/[FAIL] line with its runtime. Exits nonzero if
// anything fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "feedflow/dataset.hpp"
#include "feedflow/equilibrium.hpp"
#include "feedflow/estimation.hpp"
#include "feedflow/metrics.hpp"
#include "feedflow/optimizer.hpp"
#include "feedflow/simulator.hpp"
#include "feedflow/synthetic.hpp"
#include "fixtures.hpp"

namespace fs = std::filesystem;
using namespace feedflow;

namespace {

int g_failures = 0;

// Runs one criterion; fn returns an empty string on success or a failure
// description. limit_s <= 0 means no runtime requirement.
void criterion(int id, const std::string& name, double limit_s,
               const std::function<std::string()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string failure;
    try {
        failure = fn();
    } catch (const std::exception& e) {
        failure = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (failure.empty() && limit_s > 0 && secs > limit_s) {
        std::ostringstream ss;
        ss << "runtime " << secs << " s exceeds the " << limit_s << " s limit";
        failure = ss.str();
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", secs);
    if (failure.empty()) {
        std::cout << "[PASS] criterion " << id << ": " << name << " (" << buf << " s)\n";
    } else {
        std::cout << "[FAIL] criterion " << id << ": " << name << " (" << buf
                  << " s) -- " << failure << "\n";
        ++g_failures;
    }
    std::cout.flush();
}

std::string fail_fmt(const char* what, double got, double want) {
    std::ostringstream ss;
    ss << what << ": got " << got << ", limit " << want;
    return ss.str();
}

// ---- criterion bodies ------------------------------------------------------

std::string k2_closed_forms() {
    auto inst = fixtures::k2();
    auto eq = solve_equilibrium(inst.graph, inst.rates);
    if (std::abs(eq.state.at(0, 0) - 1.0 / 3.0) > 1e-10 ||
        std::abs(eq.state.at(1, 0) - 2.0 / 3.0) > 1e-10)
        return "equilibrium state off the (1/3, 2/3) closed form";

    RecommendationPolicy pol(2, 2, 0.5);
    pol.at(0, 0) = 1.5;
    pol.at(0, 1) = 0.5;
    pol.at(1, 0) = 0.5;
    pol.at(1, 1) = 1.5;
    auto rec = solve_with_recommendations(inst.graph, inst.rates, pol);
    for (double v : rec.state.p)
        if (std::abs(v - 0.5) > 1e-10) return "recommended state off the uniform closed form";
    return "";
}

// shared with criterion 10
std::vector<std::pair<long, double>> g_iteration_log;  // (iterations, spectral bound)

std::string oracle_equivalence() {
    g_iteration_log.clear();
    const double tol = 1e-10;
    for (int i = 0; i < 20; ++i) {
        const int n = 20 + (i * 9) % 181;  // sizes across [20, 200]
        const int S = 2 + i % 4;
        auto inst = fixtures::random_instance(n, S, 500 + i);
        SolveOptions opts;
        opts.tol = tol;

        if (i % 2 == 0) {
            auto res = solve_equilibrium(inst.graph, inst.rates, opts);
            auto oracle = fixtures::dense_solve(inst.graph, inst.rates, 0.0, nullptr);
            for (std::size_t k = 0; k < res.state.p.size(); ++k)
                if (std::abs(res.state.p[k] - oracle.p[k]) > 1e-8)
                    return fail_fmt("entry error vs dense solve",
                                    std::abs(res.state.p[k] - oracle.p[k]), 1e-8);
            g_iteration_log.emplace_back(res.info.iterations, res.info.spectral_bound);
        } else {
            const double B = 0.05 + 0.15 * (i % 3);
            auto pol = fixtures::random_policy(inst.graph, inst.rates, B, 900 + i);
            auto res = solve_with_recommendations(inst.graph, inst.rates, pol, opts);
            auto oracle = fixtures::dense_solve(inst.graph, inst.rates, B, &pol);
            for (std::size_t k = 0; k < res.state.p.size(); ++k)
                if (std::abs(res.state.p[k] - oracle.p[k]) > 1e-8)
                    return fail_fmt("entry error vs dense solve (policy)",
                                    std::abs(res.state.p[k] - oracle.p[k]), 1e-8);
            g_iteration_log.emplace_back(res.info.iterations, res.info.spectral_bound);
            if (!res.info.budget_consistent) return "consistent policy flagged inconsistent";
            if (res.info.max_row_sum_dev > 1e-9)
                return fail_fmt("row sum deviation", res.info.max_row_sum_dev, 1e-9);
        }
    }
    return "";
}

std::string simulator_agreement() {
    auto inst = fixtures::random_instance(50, 3, 4242, 0.6, 0.15);
    SimConfig cfg;
    cfg.feed_size = 10;
    cfg.horizon = 25000;
    cfg.seed = 17;

    auto model = solve_equilibrium(inst.graph, inst.rates).state;
    auto sim = simulate(inst.graph, inst.rates, cfg);
    if (sim.min_events_per_user < 10000)
        return fail_fmt("events per user", static_cast<double>(sim.min_events_per_user), 10000);
    for (int u = 0; u < 50; ++u) {
        if (!sim.p_hat.row_valid(u)) return "masked simulator row";
        for (int s = 0; s < 3; ++s)
            if (std::abs(sim.p_hat.at(u, s) - model.at(u, s)) > 0.02)
                return fail_fmt("simulated vs model entry",
                                std::abs(sim.p_hat.at(u, s) - model.at(u, s)), 0.02);
    }

    auto pol = fixtures::random_policy(inst.graph, inst.rates, 0.2, 77);
    cfg.policy = pol;
    cfg.seed = 18;
    auto model5 = solve_with_recommendations(inst.graph, inst.rates, pol).state;
    auto sim5 = simulate(inst.graph, inst.rates, cfg);
    for (int u = 0; u < 50; ++u)
        for (int s = 0; s < 3; ++s)
            if (std::abs(sim5.p_hat.at(u, s) - model5.at(u, s)) > 0.02)
                return fail_fmt("simulated vs model entry (policy)",
                                std::abs(sim5.p_hat.at(u, s) - model5.at(u, s)), 0.02);
    return "";
}

std::string conservation() {
    for (int i = 0; i < 6; ++i) {
        auto inst = fixtures::random_instance(40 + 10 * i, 2 + i % 3, 2700 + i);
        const double B = 0.02 + 0.12 * i;
        auto pol = fixtures::random_policy(inst.graph, inst.rates, B, 3100 + i);
        auto res = solve_with_recommendations(inst.graph, inst.rates, pol);
        if (!res.info.budget_consistent) return "consistent policy flagged inconsistent";
        if (res.info.max_row_sum_dev > 1e-9)
            return fail_fmt("row sum deviation", res.info.max_row_sum_dev, 1e-9);
        for (double v : res.state.p)
            if (v < 0) return "negative entry in solution";
    }

    // a violated budget must be flagged and must not be silently normalised
    auto inst = fixtures::k2();
    RecommendationPolicy bad(2, 2, 0.5);
    bad.at(0, 0) = 5.0;
    bad.at(1, 1) = 2.0;
    auto res = solve_with_recommendations(inst.graph, inst.rates, bad);
    if (res.info.budget_consistent) return "violated budget not flagged";
    const double row0 = res.state.at(0, 0) + res.state.at(0, 1);
    if (std::abs(row0 - 1.0) < 1e-6) return "violated-budget state looks renormalised";
    return "";
}

std::string gradient_correctness() {
    const double h = 1e-5;
    for (int i = 0; i < 10; ++i) {
        const int n = 5 + (i * 3) % 16;  // up to 20
        const int S = 2 + i % 2;
        auto inst = fixtures::random_instance(n, S, 6000 + i);
        const double B = 0.05 + 0.08 * (i % 5);
        auto pol = fixtures::random_policy(inst.graph, inst.rates, B, 6600 + i);
        auto g = gradient(pol, inst.graph, inst.rates);

        double g_inf = 0;
        for (double v : g) g_inf = std::max(g_inf, std::abs(v));
        SolveOptions opts;
        opts.tol = 1e-12;
        for (int u = 0; u < n; ++u) {
            for (int s = 0; s < S; ++s) {
                auto hi = pol, lo = pol;
                hi.at(u, s) += h;
                lo.at(u, s) -= h;
                const double fhi =
                    phi_bar(solve_with_recommendations(inst.graph, inst.rates, hi, opts).state);
                const double flo =
                    phi_bar(solve_with_recommendations(inst.graph, inst.rates, lo, opts).state);
                const double fd = (fhi - flo) / (2 * h);
                const double rel = std::abs(fd - g[static_cast<std::size_t>(u) * S + s]) /
                                   std::max(g_inf, 1e-12);
                if (rel > 1e-4) return fail_fmt("gradient relative error", rel, 1e-4);
            }
        }
    }
    return "";
}

std::string optimizer_global_optimality() {
    for (std::uint64_t seed : {9001u, 9002u, 9003u}) {
        auto inst = fixtures::random_instance(3, 2, seed);
        const double B = 0.1;
        OptimizerConfig cfg;
        cfg.budget = B;
        auto res = maximize_diversity(inst.graph, inst.rates, cfg);
        const double opt = phi_bar(res.state);

        // Exhaustive grid over the three per-user budget segments, step 1e-3
        // of each segment. The state is affine in the per-user first-party
        // rates, so precompute the inverse system once and walk the grid with
        // incremental updates.
        auto totals = budget_totals(inst.graph, inst.rates, B);
        double c[3]{}, m[9]{}, inv[9]{}, q[3]{}, col[9]{};
        for (int u = 0; u < 3; ++u)
            for (int k : inst.graph.leaders_of(u))
                c[u] += inst.rates.lambda[k] + inst.rates.mu[k];
        for (int u = 0; u < 3; ++u) {
            m[u * 3 + u] = 1.0;
            for (int k : inst.graph.leaders_of(u))
                m[u * 3 + k] -= (1 - B) * inst.rates.mu[k] / c[u];
        }
        // Gauss-Jordan inverse of the 3x3 system
        for (int u = 0; u < 3; ++u) inv[u * 3 + u] = 1.0;
        for (int colx = 0; colx < 3; ++colx) {
            int piv = colx;
            for (int r = colx + 1; r < 3; ++r)
                if (std::abs(m[r * 3 + colx]) > std::abs(m[piv * 3 + colx])) piv = r;
            for (int k = 0; k < 3; ++k) {
                std::swap(m[colx * 3 + k], m[piv * 3 + k]);
                std::swap(inv[colx * 3 + k], inv[piv * 3 + k]);
            }
            const double d = m[colx * 3 + colx];
            for (int k = 0; k < 3; ++k) {
                m[colx * 3 + k] /= d;
                inv[colx * 3 + k] /= d;
            }
            for (int r = 0; r < 3; ++r) {
                if (r == colx) continue;
                const double f = m[r * 3 + colx];
                for (int k = 0; k < 3; ++k) {
                    m[r * 3 + k] -= f * m[colx * 3 + k];
                    inv[r * 3 + k] -= f * inv[colx * 3 + k];
                }
            }
        }
        // q = inv * b_party0 with x = 0; col[:,u] = inv[:,u] * (1-B)/c_u
        for (int u = 0; u < 3; ++u) {
            double b = 0;
            for (int k : inst.graph.leaders_of(u)) b += inst.rates.lambda_of(k, 0, 2);
            b *= (1 - B) / c[u];
            for (int r = 0; r < 3; ++r) q[r] += inv[r * 3 + u] * b;
        }
        for (int u = 0; u < 3; ++u)
            for (int r = 0; r < 3; ++r) col[r * 3 + u] = inv[r * 3 + u] * (1 - B) / c[u];

        const int steps = 1000;
        double best = 0;
        const double d0 = totals[0] / steps, d1 = totals[1] / steps, d2 = totals[2] / steps;
        for (int i0 = 0; i0 <= steps; ++i0) {
            const double t0 = d0 * i0;
            double base0[3];
            for (int r = 0; r < 3; ++r) base0[r] = q[r] + col[r * 3 + 0] * t0;
            for (int i1 = 0; i1 <= steps; ++i1) {
                const double t1 = d1 * i1;
                double p0 = base0[0] + col[0 * 3 + 1] * t1;
                double p1 = base0[1] + col[1 * 3 + 1] * t1;
                double p2 = base0[2] + col[2 * 3 + 1] * t1;
                const double s0 = col[0 * 3 + 2] * d2;
                const double s1 = col[1 * 3 + 2] * d2;
                const double s2 = col[2 * 3 + 2] * d2;
                for (int i2 = 0; i2 <= steps; ++i2) {
                    const double f =
                        p0 * (1 - p0) + p1 * (1 - p1) + p2 * (1 - p2);  // times 4/3 later
                    if (f > best) best = f;
                    p0 += s0;
                    p1 += s1;
                    p2 += s2;
                }
            }
        }
        best *= 4.0 / 3.0;
        if (std::abs(opt - best) > 1e-3)
            return fail_fmt("|optimizer - grid| objective gap", std::abs(opt - best), 1e-3);
    }
    return "";
}

// shared between criteria 7 and 8
struct SweepData {
    fixtures::Instance inst;
    std::vector<double> budgets{0.0, 0.02, 0.05, 0.1, 0.2, 0.5};
    std::vector<double> phi_star;
    NewsfeedState baseline;
    RecommendationPolicy policy_002;
};
SweepData g_sweep;

std::string budget_sweep_properties() {
    g_sweep.inst = fixtures::random_instance(300, 5, 12021, 0.5, 0.05);
    auto& inst = g_sweep.inst;
    g_sweep.phi_star.clear();

    for (double b : g_sweep.budgets) {
        OptimizerConfig cfg;
        cfg.budget = b;
        auto res = maximize_diversity(inst.graph, inst.rates, cfg);
        g_sweep.phi_star.push_back(phi_bar(res.state));
        if (b == 0.0) g_sweep.baseline = res.state;
        if (b == 0.02) g_sweep.policy_002 = res.policy;
    }

    for (std::size_t i = 1; i < g_sweep.phi_star.size(); ++i)
        if (g_sweep.phi_star[i] < g_sweep.phi_star[i - 1] - 1e-9)
            return "optimised objective decreased with the budget";

    // per-budget-unit gains shrink as the budget grows
    for (std::size_t i = 2; i < g_sweep.budgets.size(); ++i) {
        const double gain_prev =
            (g_sweep.phi_star[i - 1] - g_sweep.phi_star[0]) / g_sweep.budgets[i - 1];
        const double gain_cur = (g_sweep.phi_star[i] - g_sweep.phi_star[0]) / g_sweep.budgets[i];
        if (gain_cur > gain_prev + 1e-9) return "per-budget-unit gains increased";
    }

    // the large-budget limit floods every feed toward the uniform mix
    OptimizerConfig cfg;
    cfg.budget = 0.99;
    auto res = maximize_diversity(inst.graph, inst.rates, cfg);
    for (double v : res.state.p)
        if (std::abs(v - 0.2) > 0.01) return fail_fmt("p entry at B=0.99", std::abs(v - 0.2), 0.01);
    for (int u = 0; u < inst.graph.num_users(); ++u) {
        const double total = res.policy.row_sum(u);
        for (int s = 0; s < 5; ++s)
            if (std::abs(res.policy.at(u, s) / total - 0.2) > 0.02)
                return fail_fmt("recommendation share at B=0.99",
                                std::abs(res.policy.at(u, s) / total - 0.2), 0.02);
    }
    return "";
}

std::string diffusion_matters() {
    if (g_sweep.phi_star.empty()) return "sweep data unavailable (criterion 7 did not run)";
    const double diffusion_phi = g_sweep.phi_star[1];  // optimised at B = 0.02
    auto mixed = no_diffusion_mix(g_sweep.baseline, g_sweep.policy_002);
    const double mixing_phi = phi_bar(mixed);
    if (!(diffusion_phi > mixing_phi))
        return fail_fmt("diffusion-aware objective does not exceed mixing", diffusion_phi,
                        mixing_phi);
    return "";
}

std::string replay_golden() {
    // exercised through the file formats end to end
    fixtures::TmpDir dir{"feedflow-accept-replay"};
    fixtures::write_file(dir.path / "parties.csv", "party\nA\nB\n");
    fixtures::write_file(dir.path / "users.csv", "user_id,affiliation\n0,A\n1,B\n2,A/B\n3,B\n");
    fixtures::write_file(dir.path / "edges.csv",
                         "follower_id,leader_id\n0,3\n1,0\n1,2\n2,0\n2,1\n3,1\n");
    fixtures::write_file(dir.path / "events.jsonl",
                         "{\"t_start\":0,\"t_end\":10}\n"
                         "{\"ts\":1,\"user\":3,\"kind\":\"retweet\",\"origin\":\"?\"}\n"
                         "{\"ts\":2,\"user\":0,\"kind\":\"tweet\",\"origin\":0}\n"
                         "{\"ts\":4,\"user\":2,\"kind\":\"tweet\",\"origin\":2}\n"
                         "{\"ts\":5,\"user\":1,\"kind\":\"retweet\",\"origin\":2}\n"
                         "{\"ts\":7,\"user\":1,\"kind\":\"tweet\",\"origin\":1}\n"
                         "{\"ts\":8,\"user\":3,\"kind\":\"retweet\",\"origin\":\"?\"}\n");
    auto parties = load_parties(dir.path / "parties.csv");
    auto [raw, log] = load_dataset(dir.path / "users.csv", dir.path / "edges.csv",
                                   dir.path / "events.jsonl", parties);
    auto graph = largest_scc(raw);
    if (graph.num_users() != 4) return "golden graph lost users in preprocessing";
    auto res = replay_empirical(filter_events(log, graph), graph);

    // user 0 only ever saw '?' posts
    if (res.state.row_valid(graph.dense_of(0))) return "user 0 should be masked";
    // exact rational fractions (all arithmetic is dyadic until the division)
    struct Want {
        std::int64_t id;
        double a, b;
    };
    for (const Want& w : {Want{1, 5.0 / 8, 3.0 / 8}, Want{2, 0.5, 0.5}, Want{3, 1.0 / 5, 4.0 / 5}}) {
        const int u = graph.dense_of(w.id);
        if (!res.state.row_valid(u)) return "unexpected masked row";
        if (res.state.at(u, 0) != w.a || res.state.at(u, 1) != w.b) {
            std::ostringstream ss;
            ss << "user " << w.id << ": got (" << res.state.at(u, 0) << ", " << res.state.at(u, 1)
               << "), want (" << w.a << ", " << w.b << ")";
            return ss.str();
        }
    }
    return "";
}

std::string contraction_bound() {
    if (g_iteration_log.empty()) return "no iteration data (criterion 2 did not run)";
    const double tol = 1e-10;
    for (auto [iters, bound] : g_iteration_log) {
        if (!(bound < 1)) continue;
        const double cap = std::log(tol) / std::log(bound) + 2;
        if (static_cast<double>(iters) > cap)
            return fail_fmt("iteration count above the contraction cap", static_cast<double>(iters),
                            cap);
    }
    return "";
}

int run_cli(const std::string& args, const fs::path& log_dir, const std::string& tag) {
    const std::string cmd = std::string("\"") + FEEDFLOW_CLI_PATH + "\" " + args + " > \"" +
                            (log_dir / (tag + ".out")).string() + "\" 2> \"" +
                            (log_dir / (tag + ".err")).string() + "\"";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string determinism() {
    fixtures::TmpDir dir{"feedflow-accept-det"};
    const fs::path data = dir.path / "data";
    if (run_cli("synth --n 40 --s 3 --intra 0.5 --inter 0.1 --seed 6 --out \"" + data.string() +
                    "\"",
                dir.path, "synth") != 0)
        return "synth failed";

    auto run_pipeline = [&](const fs::path& out) -> bool {
        if (run_cli("optimize --data \"" + data.string() + "\" --budget 0,0.05 --out \"" +
                        (out / "opt").string() + "\"",
                    dir.path, "opt") != 0)
            return false;
        if (run_cli("simulate --data \"" + data.string() + "\" --horizon 400 --seed 3 --out \"" +
                        (out / "sim").string() + "\"",
                    dir.path, "sim") != 0)
            return false;
        return true;
    };
    if (!run_pipeline(dir.path / "run1")) return "first pipeline run failed";
    if (!run_pipeline(dir.path / "run2")) return "second pipeline run failed";

    int compared = 0;
    for (auto& entry : fs::recursive_directory_iterator(dir.path / "run1")) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), dir.path / "run1");
        const auto twin = dir.path / "run2" / rel;
        if (!fs::exists(twin)) return "missing twin output " + rel.string();
        if (slurp(entry.path()) != slurp(twin)) return "byte mismatch in " + rel.string();
        ++compared;
    }
    if (compared < 10) return "suspiciously few outputs compared";
    return "";
}

}  // namespace

int main() {
    std::cout << "feedflow acceptance suite\n";
    criterion(1, "K2 closed forms", 1.0, k2_closed_forms);
    criterion(2, "power iteration vs dense solve on 20 instances", 30.0, oracle_equivalence);
    criterion(3, "simulator agreement with the steady state", 120.0, simulator_agreement);
    criterion(4, "conservation and budget flagging", 0.0, conservation);
    criterion(5, "adjoint gradient vs finite differences", 60.0, gradient_correctness);
    criterion(6, "optimizer matches exhaustive grid search", 120.0, optimizer_global_optimality);
    criterion(7, "budget sweep: monotone, diminishing, uniform limit", 600.0,
              budget_sweep_properties);
    criterion(8, "diffusion-aware optimisation beats pure mixing", 0.0, diffusion_matters);
    criterion(9, "empirical replay golden log", 0.0, replay_golden);
    criterion(10, "power-iteration counts respect the contraction bound", 0.0, contraction_bound);
    criterion(11, "byte-identical reruns", 0.0, determinism);

    if (g_failures == 0) {
        std::cout << "all criteria passed\n";
        return 0;
    }
    std::cout << g_failures << " criteria failed\n";
    return 1;
}
