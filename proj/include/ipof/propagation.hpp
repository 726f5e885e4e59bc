#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "ipof/detectors.hpp"
#include "ipof/neighbor_graph.hpp"

namespace ipof {

/// Iteration stops once the max-norm step is at most `tolerance`, scaled by
/// the spread max(s) - min(s) of the initial scores unless
/// `absolute_tolerance` is set. The relative form makes the default
/// independent of the detector's score scale.
struct PropagationConfig {
    std::size_t K = 10;
    double tolerance = 1e-3;
    std::size_t max_iterations = 10000;
    bool record_trace = false;
    bool absolute_tolerance = false;

    void validate() const;
};

struct PropagationTrace {
    /// Every iterate (t = 0..iterations_run) when recording, else first and last.
    std::vector<ScoreVector> snapshots;
    /// step_deltas[t-1] is the max-norm change made by iteration t.
    std::vector<double> step_deltas;
    std::size_t iterations_run = 0;
    /// Absolute step threshold actually applied.
    double threshold = 0.0;
    bool converged = false;
};

/// The top-K in-edge sources of every point, frozen once before iterating.
class PropagationGraph {
public:
    PropagationGraph(const CommonNeighborGraph& cng, std::size_t K);

    std::size_t size() const noexcept { return offsets_.size() - 1; }
    std::size_t K() const noexcept { return K_; }
    std::size_t edge_count() const noexcept { return sources_.size(); }
    std::span<const PointIndex> sources(std::size_t i) const noexcept {
        return {sources_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }

private:
    std::size_t K_;
    std::vector<std::size_t> offsets_;
    std::vector<PointIndex> sources_;
};

/// One synchronous averaging update: each score becomes the mean of itself
/// and its top-K common neighbors' previous scores. The result is clamped to
/// the range of the averaged inputs, so rounding never leaves their hull.
ScoreVector propagate_step(const ScoreVector& scores, const PropagationGraph& graph);
ScoreVector propagate_step(const ScoreVector& scores, const CommonNeighborGraph& cng, std::size_t K);

/// In-place kernel behind propagate_step; returns max |next - current|.
double propagate_into(std::span<const double> current, std::span<double> next, const PropagationGraph& graph);

/// The absolute step threshold `config` implies for these initial scores.
double step_threshold(const ScoreVector& initial, const PropagationConfig& config);

struct PropagationResult {
    ScoreVector scores;
    PropagationTrace trace;
};

/// Iterates propagate_step until the max-norm step is <= the threshold or
/// max_iterations is reached. Non-convergence is reported, not thrown.
PropagationResult propagate(const ScoreVector& scores, const PropagationGraph& graph, const PropagationConfig& config);
PropagationResult propagate(const ScoreVector& scores, const CommonNeighborGraph& cng, const PropagationConfig& config);

/// Weakly connected components of the top-K in-edge graph, each sorted
/// ascending and ordered by smallest member.
std::vector<std::vector<PointIndex>> connected_components(const PropagationGraph& graph);
std::vector<std::vector<PointIndex>> connected_components(const CommonNeighborGraph& cng, std::size_t K);

/// "t,max_delta" per iteration.
void write_trace(std::ostream& out, const PropagationTrace& trace);
/// One row per snapshot: "t,s_0,...,s_{n-1}".
void write_snapshots(std::ostream& out, const PropagationTrace& trace);
/// "component,size,min_score,max_score" per component.
void write_component_ranges(std::ostream& out, const std::vector<std::vector<PointIndex>>& components,
                            const ScoreVector& scores);

namespace serial {

/// Single-threaded reference kernel; bit-identical to ipof::propagate_into.
double propagate_into(std::span<const double> current, std::span<double> next, const PropagationGraph& graph);
ScoreVector propagate_step(const ScoreVector& scores, const PropagationGraph& graph);

}  // namespace serial

}  // namespace ipof
