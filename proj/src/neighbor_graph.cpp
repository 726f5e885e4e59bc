#include "ipof/neighbor_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "ipof/error.hpp"
#include "ipof/text.hpp"

namespace ipof {

Metric parse_metric(std::string_view name) {
    if (name == "euclidean") return Metric::euclidean;
    if (name == "manhattan") return Metric::manhattan;
    throw ValidationError("unknown metric '" + std::string(name) + "' (expected euclidean or manhattan)");
}

std::string_view metric_name(Metric metric) {
    switch (metric) {
        case Metric::euclidean: return "euclidean";
        case Metric::manhattan: return "manhattan";
    }
    return "unknown";
}

double distance(Metric metric, std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    if (metric == Metric::manhattan) {
        for (std::size_t k = 0; k < a.size(); ++k) acc += std::abs(a[k] - b[k]);
        return acc;
    }
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

NeighborGraph::NeighborGraph(std::size_t point_count, std::size_t k, Metric metric, std::vector<Neighbor> edges)
    : n_(point_count), k_(k), metric_(metric), edges_(std::move(edges)) {
    if (edges_.size() != n_ * k_) throw ValidationError("neighbor graph edge count does not equal n*k");
}

NeighborGraph NeighborGraph::truncated(std::size_t k) const {
    if (k == 0 || k > k_) {
        throw ValidationError("cannot truncate a k=" + std::to_string(k_) + " graph to k=" + std::to_string(k));
    }
    if (k == k_) return *this;
    std::vector<Neighbor> edges;
    edges.reserve(n_ * k);
    for (std::size_t i = 0; i < n_; ++i) {
        const auto row = neighbors(i);
        edges.insert(edges.end(), row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k));
    }
    return NeighborGraph(n_, k, metric_, std::move(edges));
}

CommonNeighborGraph::CommonNeighborGraph(std::vector<std::size_t> offsets, std::vector<InEdge> edges)
    : offsets_(std::move(offsets)), edges_(std::move(edges)) {
    if (offsets_.empty() || offsets_.front() != 0 || offsets_.back() != edges_.size() ||
        !std::is_sorted(offsets_.begin(), offsets_.end())) {
        throw ValidationError("malformed common-neighbor offsets");
    }
}

namespace {

void check_knn_args(const Dataset& dataset, std::size_t k) {
    const std::size_t n = dataset.size();
    if (n > std::numeric_limits<PointIndex>::max()) throw ValidationError("dataset too large for 32-bit indices");
    if (k < 1 || k > n - 1) {
        throw ValidationError("k=" + std::to_string(k) + " out of range [1, " + std::to_string(n - 1) + "]");
    }
}

const auto by_rank = [](const Neighbor& a, const Neighbor& b) { return closer(a, b); };

}  // namespace

namespace {

// Writes the k nearest neighbors of point i, ordered by rank, to out.
void nearest_row(const Dataset& dataset, std::size_t i, std::size_t k, Metric metric,
                 std::vector<Neighbor>& candidates, Neighbor* out) {
    const std::size_t n = dataset.size();
    const auto xi = dataset.row(i);
    std::size_t c = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        candidates[c++] = {static_cast<PointIndex>(j), distance(metric, xi, dataset.row(j))};
    }
    const auto kth = candidates.begin() + static_cast<std::ptrdiff_t>(k);
    if (k < n - 1) std::nth_element(candidates.begin(), kth - 1, candidates.end(), by_rank);
    std::sort(candidates.begin(), kth, by_rank);
    std::copy(candidates.begin(), kth, out);
}

}  // namespace

NeighborGraph build_knn(const Dataset& dataset, std::size_t k, Metric metric) {
    check_knn_args(dataset, k);
    const std::size_t n = dataset.size();
    std::vector<Neighbor> edges(n * k);

#pragma omp parallel
    {
        std::vector<Neighbor> candidates(n - 1);
#pragma omp for schedule(static)
        for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
            const auto i = static_cast<std::size_t>(ii);
            nearest_row(dataset, i, k, metric, candidates, edges.data() + i * k);
        }
    }
    return NeighborGraph(n, k, metric, std::move(edges));
}

namespace serial {

NeighborGraph build_knn(const Dataset& dataset, std::size_t k, Metric metric) {
    check_knn_args(dataset, k);
    const std::size_t n = dataset.size();
    std::vector<Neighbor> edges(n * k);
    std::vector<Neighbor> candidates(n - 1);
    for (std::size_t i = 0; i < n; ++i) nearest_row(dataset, i, k, metric, candidates, edges.data() + i * k);
    return NeighborGraph(n, k, metric, std::move(edges));
}

}  // namespace serial

CommonNeighborGraph build_common_neighbors(const NeighborGraph& graph) {
    const std::size_t n = graph.size();
    std::vector<std::size_t> offsets(n + 1, 0);
    for (std::size_t j = 0; j < n; ++j) {
        for (const auto& e : graph.neighbors(j)) {
            if (e.index >= n) throw ValidationError("neighbor index out of range");
            ++offsets[e.index + 1];
        }
    }
    for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];

    std::vector<InEdge> edges(offsets.back());
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (std::size_t j = 0; j < n; ++j) {
        for (const auto& e : graph.neighbors(j)) {
            edges[cursor[e.index]++] = {static_cast<PointIndex>(j), e.distance};
        }
    }

    const auto by_distance = [](const InEdge& a, const InEdge& b) {
        return a.distance < b.distance || (a.distance == b.distance && a.source < b.source);
    };

#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const auto first = edges.begin() + static_cast<std::ptrdiff_t>(offsets[i]);
        const auto last = edges.begin() + static_cast<std::ptrdiff_t>(offsets[i + 1]);
        std::sort(first, last, by_distance);
    }
    return CommonNeighborGraph(std::move(offsets), std::move(edges));
}

std::vector<PointIndex> top_k_in_edges(const CommonNeighborGraph& cng, std::size_t i, std::size_t K) {
    if (i >= cng.size()) {
        throw ValidationError("point index " + std::to_string(i) + " out of range for " +
                              std::to_string(cng.size()) + " points");
    }
    if (K < 1) throw ValidationError("K must be at least 1");
    const auto row = cng.in_edges(i);
    const std::size_t m = std::min(K, row.size());
    std::vector<PointIndex> out(m);
    for (std::size_t t = 0; t < m; ++t) out[t] = row[t].source;
    return out;
}

void write_edges(std::ostream& out, const NeighborGraph& graph, const std::vector<bool>& include_source) {
    if (include_source.size() != graph.size()) throw ValidationError("edge filter length does not match graph size");
    for (std::size_t i = 0; i < graph.size(); ++i) {
        if (!include_source[i]) continue;
        for (const auto& e : graph.neighbors(i)) {
            out << i << ',' << e.index << ',' << format_double(e.distance) << '\n';
        }
    }
}

void write_edges(std::ostream& out, const NeighborGraph& graph) {
    write_edges(out, graph, std::vector<bool>(graph.size(), true));
}

}  // namespace ipof
