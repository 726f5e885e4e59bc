#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ipof/dataset.hpp"
#include "ipof/neighbor_graph.hpp"

namespace ipof {

/// Outlier scores (larger = more outlying) at propagation iteration `iteration`.
class ScoreVector {
public:
    /// Throws ValidationError if any score is non-finite.
    ScoreVector(std::vector<double> scores, std::string source, std::size_t iteration = 0);

    std::size_t size() const noexcept { return scores_.size(); }
    std::span<const double> values() const noexcept { return scores_; }
    double operator[](std::size_t i) const noexcept { return scores_[i]; }
    const std::string& source() const noexcept { return source_; }
    std::size_t iteration() const noexcept { return iteration_; }

    friend bool operator==(const ScoreVector&, const ScoreVector&) = default;

private:
    std::vector<double> scores_;
    std::string source_;
    std::size_t iteration_;
};

inline constexpr std::size_t kDefaultDetectorNeighbors = 10;

/// Added to the mean reachability distance so duplicate clusters get a large
/// but finite local reachability density.
inline constexpr double kLrdEpsilon = 1e-12;

/// Local Outlier Factor over the `neighbors` nearest points (tie-broken kNN,
/// not the distance ball). Requires 2 <= neighbors <= n-1.
ScoreVector lof_scores(const Dataset& dataset, std::size_t neighbors = kDefaultDetectorNeighbors,
                       Metric metric = Metric::euclidean);
/// Same, reusing a precomputed graph with graph.k() >= neighbors.
ScoreVector lof_scores(const NeighborGraph& graph, std::size_t neighbors);

/// Distance to the `neighbors`-th nearest point. Requires 1 <= neighbors <= n-1.
ScoreVector knn_distance_scores(const Dataset& dataset, std::size_t neighbors = kDefaultDetectorNeighbors,
                                Metric metric = Metric::euclidean);
ScoreVector knn_distance_scores(const NeighborGraph& graph, std::size_t neighbors);

/// Reads one score per line, or "index,score" lines with each index in
/// [0, expected_n) exactly once. Errors carry the line number.
ScoreVector load_scores(const std::filesystem::path& path, std::size_t expected_n);

/// Writes "index,score" lines at round-trip precision.
void write_scores(std::ostream& out, const ScoreVector& scores);

/// Affine map onto [0, 1]; a constant vector maps to all zeros.
ScoreVector min_max_normalize(const ScoreVector& scores);

}  // namespace ipof
