// ipof: score propagation experiments from the command line.
//
//   ipof run          one detector + propagation run, AUC before and after
//   ipof sweep        the same over a list of K values, graphs built once
//   ipof synth        write a synthetic dataset
//   ipof export-edges kNN edges leaving labeled outliers
//   ipof eval-scores  AUC of an external score file, no propagation
//
// Exit status: 0 success, 1 invalid input, 2 runtime failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ipof/error.hpp"
#include "ipof/experiment.hpp"
#include "ipof/text.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct CommonOptions {
    std::string dataset;
    std::optional<std::string> label_col;
    std::string detector = "lof";
    std::size_t detector_k = ipof::kDefaultDetectorNeighbors;
    std::optional<std::size_t> graph_k;
    std::string K = "10";
    double tol = 1e-3;
    bool abs_tol = false;
    std::size_t max_iters = 10000;
    bool normalize = false;
    bool trace = false;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::string metric = "euclidean";
};

void add_dataset_options(CLI::App& cmd, CommonOptions& opts) {
    cmd.add_option("--dataset", opts.dataset,
                   "CSV file, 'synthetic' for the default generator, or 'synthetic:<config.json>'")
        ->required();
    cmd.add_option("--label-col", opts.label_col, "Name of the 0/1 label column in the CSV header");
    cmd.add_option("--seed", opts.seed, "Seed for the synthetic generator (overrides the config)");
    cmd.add_option("--metric", opts.metric, "Distance: euclidean or manhattan")->capture_default_str();
}

void add_experiment_options(CLI::App& cmd, CommonOptions& opts, const std::string& k_help) {
    add_dataset_options(cmd, opts);
    cmd.add_option("--detector", opts.detector, "Initial scores: lof, knnd or file:<path>")->capture_default_str();
    cmd.add_option("--detector-k", opts.detector_k, "Neighbor count of the built-in detectors")->capture_default_str();
    cmd.add_option("--graph-k", opts.graph_k, "kNN size of the common-neighbor graph (default n-1)");
    cmd.add_option("--K", opts.K, k_help)->capture_default_str();
    cmd.add_option("--tol", opts.tol, "Stop when the max step <= tol * (score range)")->capture_default_str();
    cmd.add_flag("--abs-tol", opts.abs_tol, "Treat --tol as an absolute step threshold");
    cmd.add_option("--max-iters", opts.max_iters, "Iteration cap")->capture_default_str();
    cmd.add_flag("--normalize", opts.normalize, "Min-max normalize initial scores");
    cmd.add_flag("--trace", opts.trace, "Write per-iteration traces and snapshots");
    cmd.add_option("--out", opts.out, "Output directory for reports");
}

std::vector<std::size_t> parse_k_list(const std::string& text) {
    std::vector<std::size_t> Ks;
    for (const auto field : ipof::split(text, ',')) {
        const auto value = ipof::parse_int(field);
        if (!value || *value < 1) throw ipof::ValidationError("invalid K value '" + std::string(field) + "'");
        Ks.push_back(static_cast<std::size_t>(*value));
    }
    return Ks;
}

ipof::DatasetSource parse_dataset(const CommonOptions& opts) {
    if (opts.dataset == "synthetic") return ipof::SyntheticConfig{};
    if (opts.dataset.rfind("synthetic:", 0) == 0) return ipof::load_synthetic_config(opts.dataset.substr(10));
    return ipof::DatasetFile{opts.dataset, opts.label_col};
}

ipof::ExperimentSpec make_spec(const CommonOptions& opts) {
    ipof::ExperimentSpec spec;
    spec.dataset = parse_dataset(opts);
    spec.detector = ipof::parse_detector(opts.detector, opts.detector_k);
    spec.graph_k = opts.graph_k;
    spec.Ks = parse_k_list(opts.K);
    spec.tolerance = opts.tol;
    spec.absolute_tolerance = opts.abs_tol;
    spec.max_iterations = opts.max_iters;
    spec.normalize = opts.normalize;
    spec.trace = opts.trace;
    spec.metric = ipof::parse_metric(opts.metric);
    spec.seed = opts.seed;
    if (opts.out) spec.out_dir = *opts.out;
    spec.validate();
    return spec;
}

int run_experiment(const CommonOptions& opts, bool sweep) {
    const auto spec = make_spec(opts);
    if (!sweep && spec.Ks.size() != 1) throw ipof::ValidationError("run takes a single --K; use sweep for lists");
    const auto report = sweep ? ipof::run_k_sweep(spec) : ipof::run_single(spec);
    ipof::write_report_table(std::cout, report);
    if (spec.out_dir) ipof::write_report(report, spec, *spec.out_dir);
    return 0;
}

int synth(const std::optional<std::string>& config_path, const std::optional<std::uint64_t>& seed,
          const std::string& out) {
    auto config = config_path ? ipof::load_synthetic_config(*config_path) : ipof::SyntheticConfig{};
    if (seed) config.seed = *seed;
    config.validate();
    const auto dataset = ipof::generate_synthetic(config);
    std::filesystem::create_directories(out);
    ipof::write_dataset(dataset, std::filesystem::path(out) / "dataset.csv");
    std::ofstream(std::filesystem::path(out) / "config.json") << ipof::synthetic_config_to_json(config) << '\n';
    std::cout << "wrote " << dataset.size() << " points (" << dataset.outlier_count() << " outliers) to "
              << (std::filesystem::path(out) / "dataset.csv").string() << '\n';
    return 0;
}

int export_edges(const CommonOptions& opts) {
    ipof::ExperimentSpec spec;
    spec.dataset = parse_dataset(opts);
    spec.detector.neighbors = opts.detector_k;
    spec.graph_k = opts.graph_k;
    spec.metric = ipof::parse_metric(opts.metric);
    spec.seed = opts.seed;
    if (!opts.out) {
        ipof::export_outlier_edges(spec, std::cout);
        return 0;
    }
    std::filesystem::create_directories(*opts.out);
    const auto path = std::filesystem::path(*opts.out) / "outlier_edges.csv";
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot write '" + path.string() + "'");
    ipof::export_outlier_edges(spec, file);
    return 0;
}

int eval_scores(const CommonOptions& opts) {
    ipof::ExperimentSpec spec;
    spec.dataset = parse_dataset(opts);
    spec.detector = ipof::parse_detector(opts.detector);
    spec.seed = opts.seed;
    if (spec.detector.kind != ipof::DetectorKind::score_file) {
        throw ipof::ValidationError("eval-scores needs --detector file:<path>");
    }
    spec.validate();
    const auto dataset = ipof::load_source(spec);
    const auto scores = ipof::load_scores(spec.detector.score_file, dataset.size());
    const auto row = ipof::evaluate_scores(dataset, scores);
    std::cout << ipof::kReportHeader << '\n';
    ipof::write_report_row(std::cout, row);
    if (opts.out) {
        std::filesystem::create_directories(*opts.out);
        std::ofstream file(std::filesystem::path(*opts.out) / "report.csv", std::ios::binary);
        file << ipof::kReportHeader << '\n';
        ipof::write_report_row(file, row);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Outlier score propagation over common-neighbor graphs"};
    app.require_subcommand(1);

    CommonOptions run_opts, sweep_opts, edge_opts, eval_opts;
    auto* run = app.add_subcommand("run", "Detector + propagation on one dataset");
    add_experiment_options(*run, run_opts, "Common neighbors used per update");
    auto* sweep = app.add_subcommand("sweep", "Propagation over a comma-separated K list");
    add_experiment_options(*sweep, sweep_opts, "Comma-separated K values, e.g. 5,10,20,40");

    std::optional<std::string> synth_config;
    std::optional<std::uint64_t> synth_seed;
    std::string synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic dataset (dataset.csv, config.json)");
    synth_cmd->add_option("--config", synth_config, "JSON synthetic config");
    synth_cmd->add_option("--seed", synth_seed, "Generator seed");
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();

    auto* edges = app.add_subcommand("export-edges", "kNN edges whose source is a labeled outlier");
    add_dataset_options(*edges, edge_opts);
    edges->add_option("--graph-k", edge_opts.graph_k, "kNN size (default: --detector-k)");
    edges->add_option("--detector-k", edge_opts.detector_k, "Neighbor count")->capture_default_str();
    edges->add_option("--out", edge_opts.out, "Output directory (default: stdout)");

    auto* eval = app.add_subcommand("eval-scores", "AUC of an external score file");
    add_dataset_options(*eval, eval_opts);
    eval->add_option("--detector", eval_opts.detector, "file:<path> of the scores")->required();
    eval->add_option("--out", eval_opts.out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*run) return run_experiment(run_opts, false);
        if (*sweep) return run_experiment(sweep_opts, true);
        if (*synth_cmd) return synth(synth_config, synth_seed, synth_out);
        if (*edges) return export_edges(edge_opts);
        if (*eval) return eval_scores(eval_opts);
    } catch (const ipof::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ipof::StageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.invalid_input() ? kExitValidation : kExitRuntime;
    } catch (const ipof::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitRuntime;
}
