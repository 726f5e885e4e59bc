// Serial reference kernels against the OpenMP ones, plus propagation cost
// per iteration across K.
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <vector>

#include "CLI11.hpp"
#include "ipof/dataset.hpp"
#include "ipof/neighbor_graph.hpp"
#include "ipof/propagation.hpp"

using namespace ipof;

namespace {

template <class F>
double median_seconds(int reps, F&& body) {
    std::vector<double> samples;
    for (int r = 0; r < reps; ++r) {
        const auto start = std::chrono::steady_clock::now();
        body();
        const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
        samples.push_back(took.count());
    }
    std::sort(samples.begin(), samples.end());
    return samples[samples.size() / 2];
}

template <class Step>
double per_iteration(const std::vector<double>& initial, const PropagationGraph& graph, int reps, int steps,
                     Step&& step) {
    return median_seconds(reps, [&] {
               std::vector<double> a = initial, b(a.size());
               for (int t = 0; t < steps; ++t) {
                   step(a, b, graph);
                   a.swap(b);
               }
           }) /
           steps;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kernel benchmark: serial vs OpenMP"};
    std::size_t n = 10000;
    std::size_t dim = 2;
    std::size_t graph_k = 100;
    std::vector<std::size_t> Ks{5, 10, 20, 40, 80};
    int reps = 5;
    int steps = 100;
    std::uint64_t seed = 1;
    app.add_option("--n", n, "Number of points")->check(CLI::Range(100, 100000000));
    app.add_option("--dim", dim, "Dimension")->check(CLI::PositiveNumber);
    app.add_option("--graph-k", graph_k, "kNN size")->check(CLI::PositiveNumber);
    app.add_option("--K", Ks, "K values")->delimiter(',');
    app.add_option("--reps", reps, "Timed repetitions (median reported)")->check(CLI::PositiveNumber);
    app.add_option("--steps", steps, "Propagation steps per repetition")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Synthetic data seed");
    CLI11_PARSE(app, argc, argv);

    SyntheticConfig config;
    config.dimension = dim;
    config.outlier_count = n / 10;
    config.points_per_cluster = (n - config.outlier_count) / config.cluster_count;
    config.outlier_count = n - config.points_per_cluster * config.cluster_count;
    config.seed = seed;
    const auto ds = generate_synthetic(config);
    graph_k = std::min(graph_k, ds.size() - 1);

    std::printf("n=%zu dim=%zu graph_k=%zu threads=%d reps=%d\n\n", ds.size(), dim, graph_k, omp_get_max_threads(),
                reps);

    NeighborGraph graph = build_knn(ds, graph_k);
    const double knn_serial = median_seconds(reps, [&] { graph = serial::build_knn(ds, graph_k); });
    const double knn_omp = median_seconds(reps, [&] { graph = build_knn(ds, graph_k); });
    std::printf("%-22s %12s %12s %8s\n", "kernel", "serial ms", "openmp ms", "speedup");
    std::printf("%-22s %12.3f %12.3f %8.2f\n", "build_knn", knn_serial * 1e3, knn_omp * 1e3, knn_serial / knn_omp);

    const auto cng = build_common_neighbors(graph);
    std::vector<double> initial(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) initial[i] = graph.neighbors(i).back().distance;

    std::printf("\n%-6s %10s %14s %14s %8s %12s\n", "K", "edges", "serial us/it", "openmp us/it", "speedup",
                "ns/edge");
    double previous = 0.0;
    for (const std::size_t K : Ks) {
        const PropagationGraph pg(cng, K);
        const double s = per_iteration(initial, pg, reps, steps, [](auto& a, auto& b, auto& g) {
            serial::propagate_into(a, b, g);
        });
        const double p = per_iteration(initial, pg, reps, steps, [](auto& a, auto& b, auto& g) {
            ipof::propagate_into(a, b, g);
        });
        std::printf("%-6zu %10zu %14.2f %14.2f %8.2f %12.3f", K, pg.edge_count(), s * 1e6, p * 1e6, s / p,
                    p * 1e9 / static_cast<double>(std::max<std::size_t>(pg.edge_count(), 1)));
        if (previous > 0.0) std::printf("   x%.2f vs previous K", p / previous);
        std::printf("\n");
        previous = p;
    }
    return 0;
}
