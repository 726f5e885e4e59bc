#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ipof/dataset.hpp"

namespace ipof {

enum class Metric { euclidean, manhattan };

/// Throws ValidationError for names other than "euclidean" and "manhattan".
Metric parse_metric(std::string_view name);
std::string_view metric_name(Metric metric);

double distance(Metric metric, std::span<const double> a, std::span<const double> b);

using PointIndex = std::uint32_t;

struct Neighbor {
    PointIndex index;
    double distance;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Ranking used everywhere a neighbor list is ordered: distance, then index.
constexpr bool closer(const Neighbor& a, const Neighbor& b) noexcept {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
}

/// Exact kNN lists in CSR layout: row i holds the k closest other points,
/// sorted by `closer`. Row length is the same for every point.
class NeighborGraph {
public:
    NeighborGraph(std::size_t point_count, std::size_t k, Metric metric, std::vector<Neighbor> edges);

    std::size_t size() const noexcept { return n_; }
    std::size_t k() const noexcept { return k_; }
    Metric metric() const noexcept { return metric_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    std::span<const Neighbor> neighbors(std::size_t i) const noexcept { return {edges_.data() + i * k_, k_}; }

    /// The graph for a smaller k. Because rows are ranked deterministically
    /// this is a row prefix, identical to building with `k` directly.
    NeighborGraph truncated(std::size_t k) const;

    friend bool operator==(const NeighborGraph&, const NeighborGraph&) = default;

private:
    std::size_t n_;
    std::size_t k_;
    Metric metric_;
    std::vector<Neighbor> edges_;
};

/// An edge j -> i seen from i.
struct InEdge {
    PointIndex source;
    double distance;

    friend bool operator==(const InEdge&, const InEdge&) = default;
};

/// Transpose of a NeighborGraph: in_edges(i) lists every source j whose kNN
/// row contains i with that edge's distance, sorted by distance then source
/// index, so the first K entries are the K closest in-pointing points.
class CommonNeighborGraph {
public:
    CommonNeighborGraph(std::vector<std::size_t> offsets, std::vector<InEdge> edges);

    std::size_t size() const noexcept { return offsets_.size() - 1; }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    std::span<const InEdge> in_edges(std::size_t i) const noexcept {
        return {edges_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }
    std::size_t in_degree(std::size_t i) const noexcept { return offsets_[i + 1] - offsets_[i]; }

    friend bool operator==(const CommonNeighborGraph&, const CommonNeighborGraph&) = default;

private:
    std::vector<std::size_t> offsets_;
    std::vector<InEdge> edges_;
};

/// Exact kNN by full pairwise distance evaluation with per-row partial
/// selection; rows are computed in parallel. Requires 1 <= k <= n-1.
NeighborGraph build_knn(const Dataset& dataset, std::size_t k, Metric metric = Metric::euclidean);

CommonNeighborGraph build_common_neighbors(const NeighborGraph& graph);

/// Sources of the first min(K, in_degree(i)) in-edges of point i.
std::vector<PointIndex> top_k_in_edges(const CommonNeighborGraph& cng, std::size_t i, std::size_t K);

/// Edge dump: one "src,dst,distance" line per directed kNN edge, distances
/// at round-trip precision. `include_source` selects which rows are written.
void write_edges(std::ostream& out, const NeighborGraph& graph, const std::vector<bool>& include_source);
void write_edges(std::ostream& out, const NeighborGraph& graph);

namespace serial {

/// Single-threaded reference for build_knn; results are bit-identical.
NeighborGraph build_knn(const Dataset& dataset, std::size_t k, Metric metric = Metric::euclidean);

}  // namespace serial

}  // namespace ipof
