#include "ipof/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "ipof/error.hpp"
#include "ipof/text.hpp"

namespace ipof {

void PropagationConfig::validate() const {
    if (K < 1) throw ValidationError("K must be at least 1");
    if (!(tolerance > 0.0) || !std::isfinite(tolerance)) throw ValidationError("tolerance must be positive");
    if (max_iterations < 1) throw ValidationError("max_iterations must be at least 1");
}

PropagationGraph::PropagationGraph(const CommonNeighborGraph& cng, std::size_t K) : K_(K) {
    if (K < 1) throw ValidationError("K must be at least 1");
    const std::size_t n = cng.size();
    offsets_.resize(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + std::min(K, cng.in_degree(i));
    sources_.resize(offsets_.back());
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = cng.in_edges(i);
        for (std::size_t t = 0; t < offsets_[i + 1] - offsets_[i]; ++t) sources_[offsets_[i] + t] = row[t].source;
    }
}

namespace {

// Shared by the parallel and serial kernels so both do identical arithmetic.
inline double averaged(std::span<const double> current, std::span<const PointIndex> sources, double own) {
    if (sources.empty()) return own;
    double sum = 0.0;
    double lo = own;
    double hi = own;
    for (const PointIndex j : sources) {
        const double v = current[j];
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double mean = (sum + own) / static_cast<double>(sources.size() + 1);
    return std::clamp(mean, lo, hi);
}

void check_sizes(std::size_t scores, std::size_t graph) {
    if (scores != graph) {
        throw ValidationError("score vector has " + std::to_string(scores) + " entries but the graph has " +
                              std::to_string(graph) + " points");
    }
}

}  // namespace

double propagate_into(std::span<const double> current, std::span<double> next, const PropagationGraph& graph) {
    check_sizes(current.size(), graph.size());
    check_sizes(next.size(), graph.size());
    double delta = 0.0;
#pragma omp parallel for schedule(static) reduction(max : delta)
    for (std::ptrdiff_t ll = 0; ll < static_cast<std::ptrdiff_t>(graph.size()); ++ll) {
        const auto l = static_cast<std::size_t>(ll);
        const double value = averaged(current, graph.sources(l), current[l]);
        next[l] = value;
        delta = std::max(delta, std::abs(value - current[l]));
    }
    return delta;
}

ScoreVector propagate_step(const ScoreVector& scores, const PropagationGraph& graph) {
    check_sizes(scores.size(), graph.size());
    std::vector<double> next(scores.size());
    ipof::propagate_into(scores.values(), next, graph);
    return ScoreVector(std::move(next), scores.source(), scores.iteration() + 1);
}

ScoreVector propagate_step(const ScoreVector& scores, const CommonNeighborGraph& cng, std::size_t K) {
    return propagate_step(scores, PropagationGraph(cng, K));
}

namespace serial {

double propagate_into(std::span<const double> current, std::span<double> next, const PropagationGraph& graph) {
    check_sizes(current.size(), graph.size());
    check_sizes(next.size(), graph.size());
    double delta = 0.0;
    for (std::size_t l = 0; l < graph.size(); ++l) {
        next[l] = averaged(current, graph.sources(l), current[l]);
        delta = std::max(delta, std::abs(next[l] - current[l]));
    }
    return delta;
}

ScoreVector propagate_step(const ScoreVector& scores, const PropagationGraph& graph) {
    check_sizes(scores.size(), graph.size());
    std::vector<double> next(scores.size());
    serial::propagate_into(scores.values(), next, graph);
    return ScoreVector(std::move(next), scores.source(), scores.iteration() + 1);
}

}  // namespace serial

double step_threshold(const ScoreVector& initial, const PropagationConfig& config) {
    if (config.absolute_tolerance || initial.size() == 0) return config.tolerance;
    const auto [lo, hi] = std::minmax_element(initial.values().begin(), initial.values().end());
    return config.tolerance * (*hi - *lo);
}

PropagationResult propagate(const ScoreVector& scores, const PropagationGraph& graph, const PropagationConfig& config) {
    config.validate();
    check_sizes(scores.size(), graph.size());
    const double threshold = step_threshold(scores, config);

    std::vector<double> current(scores.values().begin(), scores.values().end());
    std::vector<double> next(current.size());
    PropagationTrace trace;
    trace.threshold = threshold;
    trace.snapshots.push_back(scores);

    std::size_t t = scores.iteration();
    while (trace.iterations_run < config.max_iterations) {
        const double delta = ipof::propagate_into(current, next, graph);
        current.swap(next);
        ++t;
        ++trace.iterations_run;
        trace.step_deltas.push_back(delta);
        if (config.record_trace) trace.snapshots.emplace_back(current, scores.source(), t);
        if (delta <= threshold) {
            trace.converged = true;
            break;
        }
    }

    ScoreVector final_scores(std::move(current), scores.source(), t);
    if (!config.record_trace) trace.snapshots.push_back(final_scores);
    return {std::move(final_scores), std::move(trace)};
}

PropagationResult propagate(const ScoreVector& scores, const CommonNeighborGraph& cng, const PropagationConfig& config) {
    config.validate();
    return propagate(scores, PropagationGraph(cng, config.K), config);
}

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

std::vector<std::vector<PointIndex>> connected_components(const PropagationGraph& graph) {
    const std::size_t n = graph.size();
    DisjointSets sets(n);
    for (std::size_t l = 0; l < n; ++l) {
        for (const PointIndex j : graph.sources(l)) sets.unite(l, j);
    }
    std::vector<std::vector<PointIndex>> components;
    std::vector<std::size_t> slot(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = sets.find(i);
        if (slot[root] == n) {
            slot[root] = components.size();
            components.emplace_back();
        }
        components[slot[root]].push_back(static_cast<PointIndex>(i));
    }
    return components;
}

std::vector<std::vector<PointIndex>> connected_components(const CommonNeighborGraph& cng, std::size_t K) {
    return connected_components(PropagationGraph(cng, K));
}

void write_trace(std::ostream& out, const PropagationTrace& trace) {
    out << "t,max_delta\n";
    for (std::size_t t = 0; t < trace.step_deltas.size(); ++t) {
        out << (t + 1) << ',' << format_double(trace.step_deltas[t]) << '\n';
    }
}

void write_snapshots(std::ostream& out, const PropagationTrace& trace) {
    for (const auto& snapshot : trace.snapshots) {
        out << snapshot.iteration();
        for (const double s : snapshot.values()) out << ',' << format_double(s);
        out << '\n';
    }
}

void write_component_ranges(std::ostream& out, const std::vector<std::vector<PointIndex>>& components,
                            const ScoreVector& scores) {
    out << "component,size,min_score,max_score\n";
    for (std::size_t c = 0; c < components.size(); ++c) {
        double lo = scores[components[c].front()];
        double hi = lo;
        for (const PointIndex i : components[c]) {
            lo = std::min(lo, scores[i]);
            hi = std::max(hi, scores[i]);
        }
        out << c << ',' << components[c].size() << ',' << format_double(lo) << ',' << format_double(hi) << '\n';
    }
}

}  // namespace ipof
