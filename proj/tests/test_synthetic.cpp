#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "feedflow/dataset.hpp"
#include "feedflow/equilibrium.hpp"
#include "feedflow/estimation.hpp"
#include "feedflow/synthetic.hpp"
#include "fixtures.hpp"

using namespace feedflow;

TEST_CASE("same seed reproduces the instance, different seed does not") {
    SyntheticSpec spec;
    spec.n_users = 30;
    spec.n_parties = 3;
    spec.seed = 77;
    auto a = generate(spec);
    auto b = generate(spec);
    REQUIRE(a.rates.lambda.size() == 30);
    REQUIRE(a.rates.lambda_s.size() == 90);
    CHECK(a.graph.leaders == b.graph.leaders);
    CHECK(a.rates.lambda == b.rates.lambda);
    CHECK(a.rates.mu == b.rates.mu);

    spec.seed = 78;
    auto c = generate(spec);
    CHECK(a.graph.leaders != c.graph.leaders);
}

TEST_CASE("single party with full intra probability gives the complete graph") {
    SyntheticSpec spec;
    spec.n_users = 8;
    spec.n_parties = 1;
    spec.intra_p = 1.0;
    spec.inter_p = 0.0;
    spec.seed = 5;
    auto inst = generate(spec);
    CHECK(inst.graph.num_edges() == 8u * 7u);
    CHECK(inst.repair_edges == 0);

    // single-label content: everyone sits in a perfect echo chamber
    auto state = solve_equilibrium(inst.graph, inst.rates).state;
    auto echo = compute_echo_profile(state, inst.graph);
    for (double e : echo) CHECK(e == doctest::Approx(1.0));
}

TEST_CASE("no homophily: equilibrium shares track party shares over seeds") {
    double mean_p0 = 0;
    const int reps = 20;
    for (int seed = 0; seed < reps; ++seed) {
        SyntheticSpec spec;
        spec.n_users = 40;
        spec.n_parties = 2;
        spec.intra_p = 0.3;
        spec.inter_p = 0.3;
        spec.seed = 1000 + seed;
        auto inst = generate(spec);
        auto state = solve_equilibrium(inst.graph, inst.rates).state;
        double m = 0;
        for (int u = 0; u < spec.n_users; ++u) m += state.at(u, 0);
        mean_p0 += m / spec.n_users;
    }
    mean_p0 /= reps;
    CHECK(std::abs(mean_p0 - 0.5) < 0.05);
}

TEST_CASE("stronger homophily raises the mean equilibrium echo") {
    auto mean_echo_at = [](double intra, double inter) {
        double total = 0;
        const int reps = 5;
        for (int seed = 0; seed < reps; ++seed) {
            SyntheticSpec spec;
            spec.n_users = 60;
            spec.n_parties = 3;
            spec.intra_p = intra;
            spec.inter_p = inter;
            spec.seed = 400 + seed;
            auto inst = generate(spec);
            auto state = solve_equilibrium(inst.graph, inst.rates).state;
            auto echo = compute_echo_profile(state, inst.graph);
            double m = 0;
            for (double e : echo) m += e;
            total += m / echo.size();
        }
        return total / reps;
    };
    const double r1 = mean_echo_at(0.3, 0.3);
    const double r3 = mean_echo_at(0.45, 0.15);
    const double r10 = mean_echo_at(0.6, 0.06);
    CHECK(r3 > r1);
    CHECK(r10 > r3);
}

TEST_CASE("repair cycle makes sparse instances strongly connected and is recorded") {
    SyntheticSpec spec;
    spec.n_users = 25;
    spec.n_parties = 2;
    spec.intra_p = 0.02;
    spec.inter_p = 0.0;
    spec.seed = 9;
    auto inst = generate(spec);
    CHECK(inst.repair_edges > 0);
    CHECK(validate(inst.graph, inst.rates).passed());
}

TEST_CASE("infeasible specs are rejected") {
    SyntheticSpec spec;
    spec.n_users = 5;
    spec.n_parties = 2;
    spec.intra_p = 0.0;
    spec.inter_p = 0.0;
    CHECK_THROWS_AS(generate(spec), ConfigError);

    SyntheticSpec bad;
    bad.n_users = 0;
    CHECK_THROWS_AS(generate(bad), ConfigError);

    SyntheticSpec shares;
    shares.n_users = 10;
    shares.n_parties = 2;
    shares.party_shares = {0.5, 0.3, 0.2};  // wrong arity
    CHECK_THROWS_AS(generate(shares), ConfigError);
}

TEST_CASE("party shares control the planted sizes") {
    SyntheticSpec spec;
    spec.n_users = 10;
    spec.n_parties = 2;
    spec.party_shares = {0.7, 0.3};
    spec.intra_p = 0.5;
    spec.inter_p = 0.5;
    spec.seed = 21;
    auto inst = generate(spec);
    int first = 0;
    for (const auto& a : inst.graph.affiliation)
        if (a.first == 0) ++first;
    CHECK(first == 7);
}

TEST_CASE("generated instances pass validation and round-trip the file formats") {
    SyntheticSpec spec;
    spec.n_users = 20;
    spec.n_parties = 3;
    spec.seed = 33;
    auto inst = generate(spec);
    CHECK(validate(inst.graph, inst.rates).passed());

    fixtures::TmpDir dir{"feedflow-synth"};
    write_parties_csv(dir.path / "parties.csv", inst.graph.parties);
    write_users_csv(dir.path / "users.csv", inst.graph);
    write_edges_csv(dir.path / "edges.csv", inst.graph);
    write_rates_csv(dir.path / "lambda.csv", dir.path / "mu.csv", inst.graph, inst.rates);

    auto parties = load_parties(dir.path / "parties.csv");
    auto graph = load_graph_csv(dir.path / "users.csv", dir.path / "edges.csv", parties);
    auto rates = load_rates_csv(dir.path / "lambda.csv", dir.path / "mu.csv", graph);
    CHECK(graph.leaders == inst.graph.leaders);
    for (int u = 0; u < 20; ++u) {
        CHECK(rates.mu[u] == doctest::Approx(inst.rates.mu[u]).epsilon(1e-11));
        CHECK(rates.lambda[u] == doctest::Approx(inst.rates.lambda[u]).epsilon(1e-11));
    }

    fixtures::write_file(dir.path / "mu.csv", "user_id,value\n0,-0.5\n");
    CHECK_THROWS_WITH_AS(load_rates_csv(dir.path / "lambda.csv", dir.path / "mu.csv", graph),
                         doctest::Contains("negative rate"), InputError);
}
