#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ipof/dataset.hpp"
#include "ipof/detectors.hpp"
#include "ipof/evaluation.hpp"
#include "ipof/neighbor_graph.hpp"
#include "ipof/propagation.hpp"

namespace ipof {

inline constexpr const char* kVersion = "0.1.0";

struct DatasetFile {
    std::filesystem::path path;
    std::optional<std::string> label_column;
};

using DatasetSource = std::variant<DatasetFile, SyntheticConfig>;

enum class DetectorKind { lof, knn_distance, score_file };

struct DetectorSpec {
    DetectorKind kind = DetectorKind::lof;
    std::filesystem::path score_file;  // only for score_file
    std::size_t neighbors = kDefaultDetectorNeighbors;
};

/// Parses "lof", "knnd" or "file:<path>".
DetectorSpec parse_detector(const std::string& text, std::size_t neighbors = kDefaultDetectorNeighbors);
std::string detector_name(const DetectorSpec& detector);

struct ExperimentSpec {
    DatasetSource dataset = SyntheticConfig{};
    DetectorSpec detector;
    /// kNN size for the common-neighbor graph; n-1 when absent.
    std::optional<std::size_t> graph_k;
    std::vector<std::size_t> Ks{10};
    double tolerance = 1e-3;
    bool absolute_tolerance = false;
    std::size_t max_iterations = 10000;
    bool normalize = false;
    bool trace = false;
    Metric metric = Metric::euclidean;
    /// Overrides the synthetic config's seed when set.
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out_dir;

    /// Checks everything knowable without loading data: K-list non-empty and
    /// positive, tolerances, and that referenced files exist.
    void validate() const;
};

struct RunSummary {
    std::size_t K = 0;
    std::size_t iterations = 0;
    bool converged = false;
    double final_delta = 0.0;
    double threshold = 0.0;
    std::size_t component_count = 0;
    double propagation_seconds = 0.0;
};

struct StageTimings {
    double load_seconds = 0.0;
    double knn_seconds = 0.0;
    double detector_seconds = 0.0;
    double common_neighbor_seconds = 0.0;
    double propagation_seconds = 0.0;
    double total_seconds = 0.0;
    std::size_t knn_builds = 0;
    std::size_t detector_invocations = 0;
};

struct PropagationRun {
    std::size_t K = 0;
    PropagationResult result;
    std::vector<std::vector<PointIndex>> components;
};

struct BenchmarkReport {
    std::vector<EvalReport> rows;
    std::vector<RunSummary> runs;
    StageTimings timings;

    std::string dataset_name;
    std::size_t n = 0;
    std::size_t dimension = 0;
    std::optional<std::size_t> outliers;
    std::size_t graph_k = 0;
    std::optional<std::uint64_t> seed;

    std::optional<ScoreVector> initial_scores;
    std::vector<PropagationRun> propagation;
};

/// Everything that does not depend on K: data, initial scores, graphs.
struct PreparedExperiment {
    Dataset dataset;
    ScoreVector initial_scores;
    CommonNeighborGraph common_neighbors;
    std::size_t graph_k = 0;
    StageTimings timings;
};

PreparedExperiment prepare_experiment(const ExperimentSpec& spec);

/// Requires exactly one K in the spec.
BenchmarkReport run_single(const ExperimentSpec& spec);

/// One row per K in the given order; graphs and detector scores are
/// computed once and shared by every K.
BenchmarkReport run_k_sweep(const ExperimentSpec& spec);

/// Scores straight from a file, without propagation.
EvalReport evaluate_scores(const Dataset& dataset, const ScoreVector& scores);

/// kNN edges whose source is a labeled outlier, in the edge dump format.
/// Uses spec.graph_k, or the detector neighbor count when unset.
/// Throws StageError (invalid input) on unlabeled data.
void export_outlier_edges(const ExperimentSpec& spec, std::ostream& out);

Dataset load_source(const ExperimentSpec& spec);

/// report.csv and report.json are pure functions of the spec;
/// timings.json holds wall-clock data. Scores and, with spec.trace, traces
/// are written alongside.
void write_report(const BenchmarkReport& report, const ExperimentSpec& spec, const std::filesystem::path& dir);
void write_report_table(std::ostream& out, const BenchmarkReport& report);

}  // namespace ipof
