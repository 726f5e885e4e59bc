#include "ipof/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>

#include "ipof/error.hpp"
#include "ipof/text.hpp"

namespace ipof {

ScoreVector::ScoreVector(std::vector<double> scores, std::string source, std::size_t iteration)
    : scores_(std::move(scores)), source_(std::move(source)), iteration_(iteration) {
    for (std::size_t i = 0; i < scores_.size(); ++i) {
        if (!std::isfinite(scores_[i])) {
            throw ValidationError("non-finite score at point " + std::to_string(i) + " from '" + source_ + "'");
        }
    }
}

namespace {

void check_neighbor_count(const NeighborGraph& graph, std::size_t neighbors, std::size_t minimum) {
    if (neighbors < minimum || neighbors > graph.size() - 1) {
        throw ValidationError("detector neighbor count " + std::to_string(neighbors) + " out of range [" +
                              std::to_string(minimum) + ", " + std::to_string(graph.size() - 1) + "]");
    }
    if (neighbors > graph.k()) {
        throw ValidationError("detector needs " + std::to_string(neighbors) + " neighbors but the graph has k=" +
                              std::to_string(graph.k()));
    }
}

void check_dataset_range(const Dataset& dataset, std::size_t neighbors, std::size_t minimum) {
    if (neighbors < minimum || neighbors > dataset.size() - 1) {
        throw ValidationError("detector neighbor count " + std::to_string(neighbors) + " out of range [" +
                              std::to_string(minimum) + ", " + std::to_string(dataset.size() - 1) + "]");
    }
}

}  // namespace

ScoreVector lof_scores(const NeighborGraph& graph, std::size_t neighbors) {
    check_neighbor_count(graph, neighbors, 2);
    const std::size_t n = graph.size();
    const auto k = static_cast<std::ptrdiff_t>(neighbors);
    const auto kd = static_cast<double>(neighbors);

    std::vector<double> k_distance(n);
    for (std::size_t i = 0; i < n; ++i) k_distance[i] = graph.neighbors(i)[neighbors - 1].distance;

    std::vector<double> lrd(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(n); ++p) {
        const auto row = graph.neighbors(static_cast<std::size_t>(p));
        double reach_sum = 0.0;
        for (std::ptrdiff_t t = 0; t < k; ++t) {
            const auto& o = row[static_cast<std::size_t>(t)];
            reach_sum += std::max(k_distance[o.index], o.distance);
        }
        lrd[static_cast<std::size_t>(p)] = 1.0 / (reach_sum / kd + kLrdEpsilon);
    }

    std::vector<double> lof(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(n); ++p) {
        const auto row = graph.neighbors(static_cast<std::size_t>(p));
        const double own = lrd[static_cast<std::size_t>(p)];
        double ratio_sum = 0.0;
        for (std::ptrdiff_t t = 0; t < k; ++t) ratio_sum += lrd[row[static_cast<std::size_t>(t)].index] / own;
        lof[static_cast<std::size_t>(p)] = ratio_sum / kd;
    }
    return ScoreVector(std::move(lof), "lof");
}

ScoreVector lof_scores(const Dataset& dataset, std::size_t neighbors, Metric metric) {
    check_dataset_range(dataset, neighbors, 2);
    return lof_scores(build_knn(dataset, neighbors, metric), neighbors);
}

ScoreVector knn_distance_scores(const NeighborGraph& graph, std::size_t neighbors) {
    check_neighbor_count(graph, neighbors, 1);
    std::vector<double> scores(graph.size());
    for (std::size_t i = 0; i < graph.size(); ++i) scores[i] = graph.neighbors(i)[neighbors - 1].distance;
    return ScoreVector(std::move(scores), "knnd");
}

ScoreVector knn_distance_scores(const Dataset& dataset, std::size_t neighbors, Metric metric) {
    check_dataset_range(dataset, neighbors, 1);
    return knn_distance_scores(build_knn(dataset, neighbors, metric), neighbors);
}

ScoreVector load_scores(const std::filesystem::path& path, std::size_t expected_n) {
    const std::string source = path.string();
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open score file '" + source + "'");

    std::vector<double> scores;
    std::vector<std::optional<double>> indexed;
    std::optional<bool> two_field;
    std::size_t count = 0;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() > 2) throw ParseError(source, line_no, 0, "expected 'score' or 'index,score'");
        const bool this_two = fields.size() == 2;
        if (!two_field) {
            two_field = this_two;
            if (this_two) {
                indexed.assign(expected_n, std::nullopt);
                // Tolerate a textual header such as "index,score".
                if (!parse_double(fields[0]) && !parse_double(fields[1])) continue;
            }
        } else if (*two_field != this_two) {
            throw ParseError(source, line_no, 0, "mixed 'score' and 'index,score' lines");
        }

        const auto score_field = trim(fields.back());
        const auto value = parse_double(score_field);
        if (!value) throw ParseError(source, line_no, fields.size(), "cannot parse score '" + std::string(score_field) + "'");
        if (!std::isfinite(*value)) throw ParseError(source, line_no, fields.size(), "non-finite score");
        ++count;

        if (!this_two) {
            scores.push_back(*value);
            continue;
        }
        const auto index = parse_int(fields[0]);
        if (!index) throw ParseError(source, line_no, 1, "cannot parse index '" + std::string(trim(fields[0])) + "'");
        if (*index < 0 || static_cast<std::size_t>(*index) >= expected_n) {
            throw ParseError(source, line_no, 1, "index " + std::to_string(*index) + " out of range");
        }
        auto& slot = indexed[static_cast<std::size_t>(*index)];
        if (slot) throw ParseError(source, line_no, 1, "duplicate index " + std::to_string(*index));
        slot = *value;
    }
    if (count != expected_n) {
        throw ParseError(source, line_no, 0,
                         "expected " + std::to_string(expected_n) + " scores, found " + std::to_string(count));
    }
    if (two_field && *two_field) {
        scores.resize(expected_n);
        for (std::size_t i = 0; i < expected_n; ++i) scores[i] = *indexed[i];
    }
    return ScoreVector(std::move(scores), path.stem().string());
}

void write_scores(std::ostream& out, const ScoreVector& scores) {
    for (std::size_t i = 0; i < scores.size(); ++i) out << i << ',' << format_double(scores[i]) << '\n';
}

ScoreVector min_max_normalize(const ScoreVector& scores) {
    const auto values = scores.values();
    std::vector<double> out(values.size(), 0.0);
    if (!values.empty()) {
        const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        const double range = *hi - *lo;
        if (range > 0.0) {
            for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - *lo) / range;
        }
    }
    return ScoreVector(std::move(out), scores.source(), scores.iteration());
}

}  // namespace ipof
