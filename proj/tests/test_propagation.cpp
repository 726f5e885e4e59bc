#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "ipof/error.hpp"
#include "ipof/evaluation.hpp"
#include "ipof/propagation.hpp"
#include "oracles.hpp"

using namespace ipof;

namespace {

// Random directed graph with k out-edges per node and random distances,
// not tied to any point set.
NeighborGraph random_graph(std::mt19937_64& rng, std::size_t n, std::size_t k) {
    std::uniform_real_distribution<double> len(0.1, 10.0);
    std::vector<Neighbor> edges;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> others;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) others.push_back(j);
        }
        std::shuffle(others.begin(), others.end(), rng);
        std::vector<Neighbor> row;
        for (std::size_t t = 0; t < k; ++t) row.push_back({static_cast<PointIndex>(others[t]), len(rng)});
        std::sort(row.begin(), row.end(), closer);
        edges.insert(edges.end(), row.begin(), row.end());
    }
    return NeighborGraph(n, k, Metric::euclidean, std::move(edges));
}

ScoreVector random_scores(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> s(0.5, 5.0);
    std::vector<double> v(n);
    for (double& x : v) x = s(rng);
    return ScoreVector(std::move(v), "random");
}

std::vector<std::vector<std::size_t>> sources_of(const PropagationGraph& g) {
    std::vector<std::vector<std::size_t>> out(g.size());
    for (std::size_t l = 0; l < g.size(); ++l) {
        for (const auto j : g.sources(l)) out[l].push_back(j);
    }
    return out;
}

CommonNeighborGraph cycle3() {
    // 0 -> 1 -> 2 -> 0, so each node's only common neighbor is its predecessor.
    return build_common_neighbors(NeighborGraph(3, 1, Metric::euclidean, {{1, 1.0}, {2, 1.0}, {0, 1.0}}));
}

}  // namespace

TEST_CASE("one step averages a node with its common neighbors") {
    const CommonNeighborGraph cng({0, 2, 2, 2}, {{1, 0.5}, {2, 0.7}});
    const auto next = propagate_step(ScoreVector({2.0, 1.0, 3.0}, "x"), cng, 10);
    CHECK(next[0] == 2.0);  // (1 + 3 + 2) / 3
    CHECK(next[1] == 1.0);
    CHECK(next[2] == 3.0);
    CHECK(next.iteration() == 1);
}

TEST_CASE("K truncates the averaged set") {
    const CommonNeighborGraph cng({0, 2, 2, 2}, {{1, 0.5}, {2, 0.7}});
    const auto next = propagate_step(ScoreVector({2.0, 1.0, 3.0}, "x"), cng, 1);
    CHECK(next[0] == 1.5);
}

TEST_CASE("constant scores are a fixed point on any graph") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng() % 60;
        const auto cng = build_common_neighbors(random_graph(rng, n, 1 + rng() % (n - 1)));
        const double c = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
        const ScoreVector constant(std::vector<double>(n, c), "c");
        const auto next = propagate_step(constant, cng, 1 + rng() % 12);
        for (std::size_t i = 0; i < n; ++i) CHECK(next[i] == c);
    }
    const ScoreVector tenths(std::vector<double>(3, 0.1), "c");
    CHECK(propagate_step(tenths, cycle3(), 1)[0] == 0.1);
}

TEST_CASE("size mismatch is an error") {
    CHECK_THROWS_AS(propagate_step(ScoreVector({1.0, 2.0}, "x"), cycle3(), 1), ValidationError);
    CHECK_THROWS_AS(propagate(ScoreVector({1.0, 2.0}, "x"), cycle3(), PropagationConfig{}), ValidationError);
}

TEST_CASE("outlier F with no common neighbors keeps its score exactly") {
    const auto toy = fixtures::common_neighbor_toy();
    const auto cng = build_common_neighbors(build_knn(toy, 2));
    const ScoreVector initial({1.1, 0.9, 1.0, 1.2, 0.95, 3.7, 1.05}, "init");
    PropagationConfig config;
    config.K = 2;
    config.record_trace = true;
    config.absolute_tolerance = true;
    config.tolerance = 1e-12;
    const auto result = propagate(initial, cng, config);
    CHECK(result.trace.converged);
    CHECK(result.trace.snapshots.size() == result.trace.iterations_run + 1);
    for (const auto& snap : result.trace.snapshots) CHECK(snap[fixtures::F] == 3.7);
}

TEST_CASE("constant initialization converges after one zero step") {
    const auto cng = build_common_neighbors(build_knn(fixtures::common_neighbor_toy(), 3));
    const auto result = propagate(ScoreVector(std::vector<double>(7, 2.0), "c"), cng, PropagationConfig{});
    CHECK(result.trace.converged);
    CHECK(result.trace.iterations_run == 1);
    CHECK(result.trace.step_deltas == std::vector<double>{0.0});
    CHECK(result.trace.snapshots.size() == 2);
}

TEST_CASE("three-node cycle reaches the matrix-power fixed point") {
    // Oracle: iterate the 3x3 row-stochastic matrix until it stops moving.
    const auto w = oracle::propagation_matrix({{2}, {0}, {1}});
    std::vector<double> s{0.0, 3.0, 6.0};
    for (int t = 0; t < 500; ++t) s = oracle::multiply(w, s);
    for (const double v : s) REQUIRE(v == doctest::Approx(3.0).epsilon(1e-12));

    PropagationConfig config;
    config.K = 1;
    config.absolute_tolerance = true;
    config.tolerance = 1e-12;
    const auto result = propagate(ScoreVector({0.0, 3.0, 6.0}, "x"), cycle3(), config);
    CHECK(result.trace.converged);
    for (std::size_t i = 0; i < 3; ++i) CHECK(result.scores[i] == doctest::Approx(s[i]).epsilon(1e-10));
}

TEST_CASE("non-convergence is reported, not thrown") {
    PropagationConfig config;
    config.K = 1;
    config.max_iterations = 3;
    config.absolute_tolerance = true;
    config.tolerance = 1e-15;
    const auto result = propagate(ScoreVector({0.0, 3.0, 6.0}, "x"), cycle3(), config);
    CHECK_FALSE(result.trace.converged);
    CHECK(result.trace.iterations_run == 3);
    CHECK(result.trace.snapshots.size() == 2);
    CHECK(result.scores.iteration() == 3);
}

TEST_CASE("relative tolerance scales with the initial score range") {
    PropagationConfig config;
    config.tolerance = 1e-3;
    CHECK(step_threshold(ScoreVector({1.0, 5.0, 3.0}, "x"), config) == doctest::Approx(4e-3));
    config.absolute_tolerance = true;
    CHECK(step_threshold(ScoreVector({1.0, 5.0, 3.0}, "x"), config) == 1e-3);
    CHECK_THROWS_AS((PropagationConfig{10, 0.0, 10, false, false}.validate()), ValidationError);
    CHECK_THROWS_AS((PropagationConfig{10, 1e-3, 0, false, false}.validate()), ValidationError);
    CHECK_THROWS_AS((PropagationConfig{0, 1e-3, 10, false, false}.validate()), ValidationError);
}

TEST_CASE("propagate_step equals multiplication by the row-stochastic matrix") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + rng() % 49;
        const auto cng = build_common_neighbors(random_graph(rng, n, 1 + rng() % (n - 1)));
        const PropagationGraph graph(cng, 1 + rng() % 10);
        const auto s = random_scores(rng, n);
        const auto expected = oracle::multiply(oracle::propagation_matrix(sources_of(graph)),
                                               std::vector<double>(s.values().begin(), s.values().end()));
        const auto got = propagate_step(s, graph);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(got[i] - expected[i]) <= 1e-12);
    }
}

TEST_CASE("parallel and serial kernels agree bit for bit") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 50 + rng() % 500;
        const PropagationGraph graph(build_common_neighbors(random_graph(rng, n, 1 + rng() % 20)), 1 + rng() % 15);
        auto s = random_scores(rng, n);
        for (int t = 0; t < 5; ++t) {
            const auto fast = propagate_step(s, graph);
            CHECK(fast == serial::propagate_step(s, graph));
            s = fast;
        }
    }
}

TEST_CASE("propagation is affine in the scores") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng() % 80;
        const PropagationGraph graph(build_common_neighbors(random_graph(rng, n, 1 + rng() % (n - 1))), 1 + rng() % 8);
        const auto s = random_scores(rng, n);
        const double a = std::uniform_real_distribution<double>(-4.0, 4.0)(rng);
        const double b = std::uniform_real_distribution<double>(-10.0, 10.0)(rng);
        std::vector<double> shifted(n);
        for (std::size_t i = 0; i < n; ++i) shifted[i] = a * s[i] + b;
        const auto lhs = propagate_step(ScoreVector(shifted, "x"), graph);
        const auto rhs = propagate_step(s, graph);
        for (std::size_t i = 0; i < n; ++i) CHECK(lhs[i] == doctest::Approx(a * rhs[i] + b).epsilon(1e-12).scale(10));
    }
}

TEST_CASE("AUC after propagation ignores a positive affine rescaling") {
    std::mt19937_64 rng(5);
    const auto ds = oracle::random_dataset(rng, 150, 2);
    const auto cng = build_common_neighbors(build_knn(ds, 20));
    const auto initial = lof_scores(ds, 10);
    std::vector<Label> labels(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) labels[i] = initial[i] > 1.2 ? 1 : 0;
    std::vector<double> rescaled(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) rescaled[i] = 7.0 * initial[i] + 3.0;

    const PropagationConfig config;
    const auto base = propagate(initial, cng, config);
    const auto scaled = propagate(ScoreVector(rescaled, "x"), cng, config);
    CHECK(base.trace.iterations_run == scaled.trace.iterations_run);
    CHECK(auc(base.scores.values(), labels) == auc(scaled.scores.values(), labels));
}

TEST_CASE("random graphs: bounded, monotone extremes, isolated nodes fixed, converged fixed point") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + rng() % 150;
        const auto ds = oracle::random_dataset(rng, n, 1 + rng() % 3);
        const auto cng = build_common_neighbors(build_knn(ds, 1 + rng() % std::min<std::size_t>(n - 1, 30)));
        PropagationConfig config;
        config.K = 1 + rng() % 20;
        config.record_trace = true;
        const PropagationGraph graph(cng, config.K);
        const auto initial = random_scores(rng, n);
        const auto result = propagate(initial, graph, config);
        REQUIRE(result.trace.converged);

        const auto& snaps = result.trace.snapshots;
        for (std::size_t t = 1; t < snaps.size(); ++t) {
            const auto [plo, phi] = std::minmax_element(snaps[t - 1].values().begin(), snaps[t - 1].values().end());
            const auto [lo, hi] = std::minmax_element(snaps[t].values().begin(), snaps[t].values().end());
            CHECK(*lo >= *plo);
            CHECK(*hi <= *phi);
        }
        for (std::size_t l = 0; l < n; ++l) {
            if (!graph.sources(l).empty()) continue;
            for (const auto& snap : snaps) CHECK(snap[l] == initial[l]);
        }
        for (const double d : result.trace.step_deltas) CHECK(d >= 0.0);
        CHECK(result.trace.step_deltas.back() <= result.trace.threshold);

        const auto again = propagate_step(result.scores, graph);
        for (std::size_t l = 0; l < n; ++l) CHECK(std::abs(again[l] - result.scores[l]) <= result.trace.threshold);
    }
}

TEST_CASE("connected components of the toy graph") {
    const auto cng = build_common_neighbors(build_knn(fixtures::common_neighbor_toy(), 2));
    const auto two = connected_components(cng, 2);
    REQUIRE(two.size() == 2);
    CHECK(two[0] == std::vector<PointIndex>{0, 1, 2, 3, 4, 6});
    CHECK(two[1] == std::vector<PointIndex>{5});
    // With K = 3, B's third common neighbor is F.
    CHECK(connected_components(cng, 3).size() == 1);
}

TEST_CASE("components with no edges and with all edges") {
    const CommonNeighborGraph empty({0, 0, 0, 0, 0}, {});
    CHECK(connected_components(empty, 5).size() == 4);
    std::mt19937_64 rng(7);
    const auto ds = oracle::random_dataset(rng, 30, 2);
    CHECK(connected_components(build_common_neighbors(build_knn(ds, 29)), 29).size() == 1);
}

TEST_CASE("trace writers") {
    const auto result = propagate(ScoreVector({0.0, 3.0, 6.0}, "x"), cycle3(), PropagationConfig{1, 1e-2, 100, true, false});
    std::ostringstream trace, snaps, comps;
    write_trace(trace, result.trace);
    write_snapshots(snaps, result.trace);
    write_component_ranges(comps, connected_components(cycle3(), 1), result.scores);
    CHECK(trace.str().rfind("t,max_delta\n1,", 0) == 0);
    CHECK(snaps.str().rfind("0,0,3,6\n", 0) == 0);
    CHECK(comps.str().find("0,3,") != std::string::npos);
}
