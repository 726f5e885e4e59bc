#include "ipof/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ipof/error.hpp"
#include "json.hpp"

namespace ipof {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename F>
auto run_stage(const char* name, F&& body) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const ValidationError& e) {
        throw StageError(name, e.what(), true);
    } catch (const ParseError& e) {
        throw StageError(name, e.what(), true);
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

}  // namespace

DetectorSpec parse_detector(const std::string& text, std::size_t neighbors) {
    DetectorSpec spec;
    spec.neighbors = neighbors;
    if (text == "lof") {
        spec.kind = DetectorKind::lof;
    } else if (text == "knnd") {
        spec.kind = DetectorKind::knn_distance;
    } else if (text.rfind("file:", 0) == 0 && text.size() > 5) {
        spec.kind = DetectorKind::score_file;
        spec.score_file = text.substr(5);
    } else {
        throw ValidationError("unknown detector '" + text + "' (expected lof, knnd or file:<path>)");
    }
    return spec;
}

std::string detector_name(const DetectorSpec& detector) {
    switch (detector.kind) {
        case DetectorKind::lof: return "lof";
        case DetectorKind::knn_distance: return "knnd";
        case DetectorKind::score_file: return "file:" + detector.score_file.stem().string();
    }
    return "unknown";
}

void ExperimentSpec::validate() const {
    if (Ks.empty()) throw ValidationError("K-list must not be empty");
    for (const auto K : Ks) {
        if (K < 1) throw ValidationError("every K must be at least 1");
    }
    PropagationConfig{Ks.front(), tolerance, max_iterations, trace, absolute_tolerance}.validate();
    if (graph_k && *graph_k < 1) throw ValidationError("graph-k must be at least 1");
    if (detector.kind != DetectorKind::score_file) {
        const std::size_t minimum = detector.kind == DetectorKind::lof ? 2 : 1;
        if (detector.neighbors < minimum) {
            throw ValidationError("detector-k must be at least " + std::to_string(minimum) + " for " +
                                  detector_name(detector));
        }
    } else if (!std::filesystem::is_regular_file(detector.score_file)) {
        throw ValidationError("score file '" + detector.score_file.string() + "' does not exist");
    }
    if (const auto* file = std::get_if<DatasetFile>(&dataset)) {
        if (!std::filesystem::is_regular_file(file->path)) {
            throw ValidationError("dataset file '" + file->path.string() + "' does not exist");
        }
    } else {
        std::get<SyntheticConfig>(dataset).validate();
    }
}

Dataset load_source(const ExperimentSpec& spec) {
    if (const auto* file = std::get_if<DatasetFile>(&spec.dataset)) return load_dataset(file->path, file->label_column);
    SyntheticConfig config = std::get<SyntheticConfig>(spec.dataset);
    if (spec.seed) config.seed = *spec.seed;
    return generate_synthetic(config);
}

PreparedExperiment prepare_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const auto started = Clock::now();
    StageTimings timings;

    auto t0 = Clock::now();
    Dataset dataset = run_stage("load dataset", [&] { return load_source(spec); });
    timings.load_seconds = seconds_since(t0);

    const std::size_t n = dataset.size();
    const std::size_t graph_k = spec.graph_k.value_or(n - 1);
    if (graph_k > n - 1) {
        throw StageError("build graph", "graph-k=" + std::to_string(graph_k) + " exceeds n-1=" + std::to_string(n - 1),
                         true);
    }
    const bool builtin = spec.detector.kind != DetectorKind::score_file;
    if (builtin && spec.detector.neighbors > n - 1) {
        throw StageError("detector", "detector-k=" + std::to_string(spec.detector.neighbors) + " exceeds n-1=" +
                                         std::to_string(n - 1), true);
    }
    const std::size_t knn_k = builtin ? std::max(graph_k, spec.detector.neighbors) : graph_k;

    t0 = Clock::now();
    NeighborGraph knn = run_stage("build graph", [&] { return build_knn(dataset, knn_k, spec.metric); });
    timings.knn_seconds = seconds_since(t0);
    ++timings.knn_builds;

    t0 = Clock::now();
    ScoreVector initial = run_stage("detector", [&] {
        switch (spec.detector.kind) {
            case DetectorKind::lof: return lof_scores(knn, spec.detector.neighbors);
            case DetectorKind::knn_distance: return knn_distance_scores(knn, spec.detector.neighbors);
            case DetectorKind::score_file: return load_scores(spec.detector.score_file, n);
        }
        throw std::logic_error("unhandled detector kind");
    });
    if (spec.normalize) initial = min_max_normalize(initial);
    timings.detector_seconds = seconds_since(t0);
    ++timings.detector_invocations;

    t0 = Clock::now();
    CommonNeighborGraph cng = run_stage("build graph", [&] {
        return build_common_neighbors(knn_k == graph_k ? knn : knn.truncated(graph_k));
    });
    timings.common_neighbor_seconds = seconds_since(t0);
    timings.total_seconds = seconds_since(started);

    return {std::move(dataset), std::move(initial), std::move(cng), graph_k, timings};
}

namespace {

BenchmarkReport run_prepared(const PreparedExperiment& prepared, const ExperimentSpec& spec) {
    const auto started = Clock::now();
    const Dataset& dataset = prepared.dataset;

    BenchmarkReport report;
    report.timings = prepared.timings;
    report.dataset_name = dataset.name();
    report.n = dataset.size();
    report.dimension = dataset.dimension();
    if (dataset.has_labels()) report.outliers = dataset.outlier_count();
    report.graph_k = prepared.graph_k;
    if (std::holds_alternative<SyntheticConfig>(spec.dataset)) {
        report.seed = spec.seed.value_or(std::get<SyntheticConfig>(spec.dataset).seed);
    } else {
        report.seed = spec.seed;
    }
    report.initial_scores = prepared.initial_scores;

    // AUC needs both classes; otherwise the columns stay empty.
    const bool evaluable = dataset.has_labels() && report.outliers && *report.outliers > 0 &&
                           *report.outliers < dataset.size();
    std::optional<double> auc_initial;
    if (evaluable) auc_initial = auc(prepared.initial_scores.values(), dataset.labels());

    for (const std::size_t K : spec.Ks) {
        const PropagationConfig config{K, spec.tolerance, spec.max_iterations, spec.trace, spec.absolute_tolerance};
        const auto t0 = Clock::now();
        PropagationGraph graph(prepared.common_neighbors, K);
        PropagationResult result = run_stage("propagate", [&] { return propagate(prepared.initial_scores, graph, config); });
        const double elapsed = seconds_since(t0);
        report.timings.propagation_seconds += elapsed;

        auto components = connected_components(graph);

        EvalReport row;
        row.dataset = dataset.name();
        row.detector = detector_name(spec.detector);
        row.K = K;
        row.iterations = result.trace.iterations_run;
        row.converged = result.trace.converged;
        if (evaluable) {
            row.auc_initial = auc_initial;
            row.auc_final = auc(result.scores.values(), dataset.labels());
            if (*auc_initial > 0.0) row.improvement_pct = improvement(*auc_initial, *row.auc_final);
            row.n_pos = *report.outliers;
            row.n_neg = dataset.size() - *report.outliers;
        }
        report.rows.push_back(row);

        RunSummary summary;
        summary.K = K;
        summary.iterations = result.trace.iterations_run;
        summary.converged = result.trace.converged;
        summary.final_delta = result.trace.step_deltas.empty() ? 0.0 : result.trace.step_deltas.back();
        summary.threshold = result.trace.threshold;
        summary.component_count = components.size();
        summary.propagation_seconds = elapsed;
        report.runs.push_back(summary);

        report.propagation.push_back({K, std::move(result), std::move(components)});
    }
    report.timings.total_seconds += seconds_since(started);
    return report;
}

}  // namespace

BenchmarkReport run_single(const ExperimentSpec& spec) {
    if (spec.Ks.size() != 1) throw ValidationError("run_single needs exactly one K; use a sweep for K-lists");
    return run_prepared(prepare_experiment(spec), spec);
}

BenchmarkReport run_k_sweep(const ExperimentSpec& spec) {
    return run_prepared(prepare_experiment(spec), spec);
}

EvalReport evaluate_scores(const Dataset& dataset, const ScoreVector& scores) {
    if (scores.size() != dataset.size()) {
        throw ValidationError("score file has " + std::to_string(scores.size()) + " scores for " +
                              std::to_string(dataset.size()) + " points");
    }
    EvalReport row;
    row.dataset = dataset.name();
    row.detector = "file:" + scores.source();
    row.auc_initial = auc(scores.values(), dataset.labels());
    row.auc_final = row.auc_initial;
    row.improvement_pct = 0.0;
    row.converged = true;
    row.n_pos = dataset.outlier_count();
    row.n_neg = dataset.size() - row.n_pos;
    return row;
}

void export_outlier_edges(const ExperimentSpec& spec, std::ostream& out) {
    spec.validate();
    const Dataset dataset = run_stage("load dataset", [&] { return load_source(spec); });
    if (!dataset.has_labels()) {
        throw StageError("export edges", "dataset has no labels; name the label column", true);
    }
    const std::size_t k = spec.graph_k.value_or(spec.detector.neighbors);
    const NeighborGraph graph = run_stage("build graph", [&] { return build_knn(dataset, k, spec.metric); });
    std::vector<bool> outliers(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) outliers[i] = dataset.labels()[i] == 1;
    write_edges(out, graph, outliers);
}

void write_report_table(std::ostream& out, const BenchmarkReport& report) {
    out << kReportHeader << '\n';
    for (const auto& row : report.rows) write_report_row(out, row);
}

void write_report(const BenchmarkReport& report, const ExperimentSpec& spec, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        auto out = open_output(dir / "report.csv");
        write_report_table(out, report);
    }

    nlohmann::ordered_json meta;
    meta["version"] = kVersion;
    meta["dataset"]["name"] = report.dataset_name;
    meta["dataset"]["n"] = report.n;
    meta["dataset"]["dimension"] = report.dimension;
    if (report.outliers) meta["dataset"]["outliers"] = *report.outliers;
    if (const auto* file = std::get_if<DatasetFile>(&spec.dataset)) {
        meta["dataset"]["path"] = file->path.string();
        if (file->label_column) meta["dataset"]["label_column"] = *file->label_column;
    } else {
        SyntheticConfig config = std::get<SyntheticConfig>(spec.dataset);
        if (spec.seed) config.seed = *spec.seed;
        meta["dataset"]["synthetic"] = nlohmann::ordered_json::parse(synthetic_config_to_json(config));
    }
    meta["seed"] = report.seed ? nlohmann::ordered_json(*report.seed) : nlohmann::ordered_json();
    meta["detector"] = detector_name(spec.detector);
    meta["detector_k"] = spec.detector.neighbors;
    meta["metric"] = std::string(metric_name(spec.metric));
    meta["graph_k"] = report.graph_k;
    meta["Ks"] = spec.Ks;
    meta["tolerance"] = spec.tolerance;
    meta["tolerance_mode"] = spec.absolute_tolerance ? "absolute" : "relative";
    meta["max_iterations"] = spec.max_iterations;
    meta["normalize"] = spec.normalize;
    auto& runs = meta["runs"] = nlohmann::ordered_json::array();
    const auto optional_number = [](const std::optional<double>& v) {
        return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    };
    for (std::size_t r = 0; r < report.runs.size(); ++r) {
        const auto& run = report.runs[r];
        const auto& row = report.rows.at(r);
        runs.push_back({{"K", run.K},
                        {"auc_initial", optional_number(row.auc_initial)},
                        {"auc_final", optional_number(row.auc_final)},
                        {"improvement_pct", optional_number(row.improvement_pct)},
                        {"iterations", run.iterations},
                        {"converged", run.converged},
                        {"final_delta", run.final_delta},
                        {"threshold", run.threshold},
                        {"components", run.component_count}});
    }
    {
        auto out = open_output(dir / "report.json");
        out << meta.dump(2) << '\n';
    }

    nlohmann::ordered_json timing;
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::ostringstream stamp;
    stamp << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
    timing["timestamp"] = stamp.str();
    timing["load_seconds"] = report.timings.load_seconds;
    timing["knn_seconds"] = report.timings.knn_seconds;
    timing["detector_seconds"] = report.timings.detector_seconds;
    timing["common_neighbor_seconds"] = report.timings.common_neighbor_seconds;
    timing["propagation_seconds"] = report.timings.propagation_seconds;
    timing["total_seconds"] = report.timings.total_seconds;
    timing["knn_builds"] = report.timings.knn_builds;
    timing["detector_invocations"] = report.timings.detector_invocations;
    auto& per_run = timing["propagation_seconds_by_K"] = nlohmann::ordered_json::array();
    for (const auto& run : report.runs) per_run.push_back({{"K", run.K}, {"seconds", run.propagation_seconds}});
    {
        auto out = open_output(dir / "timings.json");
        out << timing.dump(2) << '\n';
    }

    if (report.initial_scores) {
        auto out = open_output(dir / "scores_initial.csv");
        write_scores(out, *report.initial_scores);
    }
    for (const auto& run : report.propagation) {
        const std::string suffix = "_K" + std::to_string(run.K) + ".csv";
        {
            auto out = open_output(dir / ("scores" + suffix));
            write_scores(out, run.result.scores);
        }
        if (!spec.trace) continue;
        {
            auto out = open_output(dir / ("trace" + suffix));
            write_trace(out, run.result.trace);
        }
        {
            auto out = open_output(dir / ("snapshots" + suffix));
            write_snapshots(out, run.result.trace);
        }
        {
            auto out = open_output(dir / ("components" + suffix));
            write_component_ranges(out, run.components, run.result.scores);
        }
    }
}

}  // namespace ipof
