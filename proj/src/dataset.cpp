#include "ipof/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ipof/error.hpp"
#include "ipof/text.hpp"
#include "json.hpp"
#include "random.hpp"

namespace ipof {

Dataset::Dataset(std::vector<double> values, std::size_t dimension,
                 std::optional<std::vector<Label>> labels, std::string name)
    : values_(std::move(values)), d_(dimension), labels_(std::move(labels)), name_(std::move(name)) {
    if (d_ == 0) throw ValidationError("dataset dimension must be at least 1");
    if (values_.size() % d_ != 0) {
        throw ValidationError("feature count " + std::to_string(values_.size()) +
                              " is not a multiple of dimension " + std::to_string(d_));
    }
    n_ = values_.size() / d_;
    if (n_ < 2) throw ValidationError("dataset needs at least 2 points, got " + std::to_string(n_));
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw ValidationError("non-finite feature at point " + std::to_string(i / d_) +
                                  ", feature " + std::to_string(i % d_));
        }
    }
    if (labels_) {
        if (labels_->size() != n_) {
            throw ValidationError("label count " + std::to_string(labels_->size()) +
                                  " does not match point count " + std::to_string(n_));
        }
        for (std::size_t i = 0; i < n_; ++i) {
            if ((*labels_)[i] > 1) {
                throw ValidationError("label at point " + std::to_string(i) + " is not 0 or 1");
            }
        }
    }
}

const std::vector<Label>& Dataset::labels() const {
    if (!labels_) throw ValidationError("dataset '" + name_ + "' has no labels");
    return *labels_;
}

std::size_t Dataset::outlier_count() const {
    const auto& l = labels();
    return static_cast<std::size_t>(std::count(l.begin(), l.end(), Label{1}));
}

Dataset load_dataset(const std::filesystem::path& path, const std::optional<std::string>& label_column) {
    const std::string source = path.string();
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open dataset file '" + source + "'");

    std::vector<std::string> header;
    std::optional<std::size_t> label_index;
    std::size_t width = 0;
    std::vector<double> values;
    std::vector<Label> labels;
    std::size_t rows = 0;
    bool first_row = true;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');

        if (first_row) {
            first_row = false;
            width = fields.size();
            const bool is_header = std::any_of(fields.begin(), fields.end(), [](std::string_view f) {
                return !parse_double(f).has_value();
            });
            if (is_header) {
                for (auto f : fields) header.emplace_back(trim(f));
            }
            if (label_column) {
                const auto it = std::find(header.begin(), header.end(), *label_column);
                if (it == header.end()) {
                    throw ParseError(source, line_no, 0, "label column '" + *label_column + "' not found in header");
                }
                label_index = static_cast<std::size_t>(it - header.begin());
            }
            if (label_index && width < 2) {
                throw ParseError(source, line_no, 0, "no feature columns besides the label");
            }
            if (is_header) continue;
        }

        if (fields.size() != width) {
            throw ParseError(source, line_no, 0,
                             "expected " + std::to_string(width) + " fields, got " + std::to_string(fields.size()));
        }
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const auto field = trim(fields[c]);
            if (label_index && c == *label_index) {
                if (field == "0") {
                    labels.push_back(0);
                } else if (field == "1") {
                    labels.push_back(1);
                } else {
                    throw ParseError(source, line_no, c + 1, "label '" + std::string(field) + "' is not 0 or 1");
                }
                continue;
            }
            if (field.empty()) throw ParseError(source, line_no, c + 1, "missing value");
            const auto value = parse_double(field);
            if (!value) throw ParseError(source, line_no, c + 1, "non-numeric value '" + std::string(field) + "'");
            if (!std::isfinite(*value)) throw ParseError(source, line_no, c + 1, "non-finite value");
            values.push_back(*value);
        }
        ++rows;
    }
    if (rows < 2) throw ParseError(source, line_no, 0, "need at least 2 data rows, got " + std::to_string(rows));

    const std::size_t dimension = label_index ? width - 1 : width;
    std::optional<std::vector<Label>> maybe_labels;
    if (label_index) maybe_labels = std::move(labels);
    return Dataset(std::move(values), dimension, std::move(maybe_labels), path.stem().string());
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path, const std::string& label_column) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset file '" + path.string() + "'");
    const std::size_t d = dataset.dimension();
    for (std::size_t c = 0; c < d; ++c) out << (c ? "," : "") << 'x' << c;
    if (dataset.has_labels()) out << ',' << label_column;
    out << '\n';
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto row = dataset.row(i);
        for (std::size_t c = 0; c < d; ++c) out << (c ? "," : "") << format_double(row[c]);
        if (dataset.has_labels()) out << ',' << static_cast<int>(dataset.labels()[i]);
        out << '\n';
    }
    if (!out) throw std::runtime_error("failed writing dataset file '" + path.string() + "'");
}

void SyntheticConfig::validate() const {
    if (cluster_count == 0) throw ValidationError("cluster_count must be positive");
    if (points_per_cluster == 0) throw ValidationError("points_per_cluster must be positive");
    if (dimension == 0) throw ValidationError("dimension must be positive");
    if (cluster_spreads.size() != cluster_count) {
        throw ValidationError("cluster_spreads has " + std::to_string(cluster_spreads.size()) +
                              " entries, expected " + std::to_string(cluster_count));
    }
    for (double s : cluster_spreads) {
        if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("cluster spreads must be positive and finite");
    }
    if (cluster_count * points_per_cluster + outlier_count < 2) {
        throw ValidationError("synthetic dataset would have fewer than 2 points");
    }
}

SyntheticConfig parse_synthetic_config(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("synthetic config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("synthetic config must be a JSON object");

    SyntheticConfig config;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "cluster_count") {
                config.cluster_count = value.get<std::size_t>();
            } else if (key == "points_per_cluster") {
                config.points_per_cluster = value.get<std::size_t>();
            } else if (key == "outlier_count") {
                config.outlier_count = value.get<std::size_t>();
            } else if (key == "dimension") {
                config.dimension = value.get<std::size_t>();
            } else if (key == "cluster_spreads") {
                config.cluster_spreads = value.get<std::vector<double>>();
            } else if (key == "seed") {
                config.seed = value.get<std::uint64_t>();
            } else {
                throw ValidationError("unknown synthetic config key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("synthetic config has a field of the wrong type: ") + e.what());
    }
    // A cluster_count override without spreads gets the default spread pattern cycled.
    if (!j.contains("cluster_spreads") && config.cluster_spreads.size() != config.cluster_count) {
        const std::vector<double> base{0.5, 1.0, 2.0};
        config.cluster_spreads.resize(config.cluster_count);
        for (std::size_t c = 0; c < config.cluster_count; ++c) config.cluster_spreads[c] = base[c % base.size()];
    }
    config.validate();
    return config;
}

std::string synthetic_config_to_json(const SyntheticConfig& config) {
    nlohmann::ordered_json j;
    j["cluster_count"] = config.cluster_count;
    j["points_per_cluster"] = config.points_per_cluster;
    j["outlier_count"] = config.outlier_count;
    j["dimension"] = config.dimension;
    j["cluster_spreads"] = config.cluster_spreads;
    j["seed"] = config.seed;
    return j.dump(2);
}

SyntheticConfig load_synthetic_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open synthetic config '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_synthetic_config(buffer.str());
}

namespace {

constexpr double kCenterSeparation = 10.0;  // in units of the largest spread
constexpr double kBoxMargin = 6.0;
constexpr double kRejectRadius = 3.0;
constexpr std::size_t kAttemptsPerOutlier = 10000;

double max_spread(const SyntheticConfig& config) {
    return *std::max_element(config.cluster_spreads.begin(), config.cluster_spreads.end());
}

}  // namespace

std::vector<std::vector<double>> synthetic_centers(const SyntheticConfig& config) {
    config.validate();
    const std::size_t count = config.cluster_count;
    const double gap = kCenterSeparation * max_spread(config);
    std::vector<std::vector<double>> centers(count, std::vector<double>(config.dimension, 0.0));
    if (count == 1) return centers;
    if (config.dimension == 1) {
        for (std::size_t c = 0; c < count; ++c) centers[c][0] = gap * static_cast<double>(c);
        return centers;
    }
    // Regular polygon in the first two coordinates; adjacent centers are `gap` apart.
    const double radius = gap / (2.0 * std::sin(std::numbers::pi / static_cast<double>(count)));
    for (std::size_t c = 0; c < count; ++c) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(count);
        centers[c][0] = radius * std::cos(angle);
        centers[c][1] = radius * std::sin(angle);
    }
    return centers;
}

Dataset generate_synthetic(const SyntheticConfig& config) {
    config.validate();
    const std::size_t d = config.dimension;
    const auto centers = synthetic_centers(config);
    detail::Rng rng(config.seed);

    struct Point {
        std::vector<double> x;
        Label label;
    };
    std::vector<Point> points;
    points.reserve(config.cluster_count * config.points_per_cluster + config.outlier_count);

    for (std::size_t c = 0; c < config.cluster_count; ++c) {
        const double spread = config.cluster_spreads[c];
        for (std::size_t i = 0; i < config.points_per_cluster; ++i) {
            Point p{std::vector<double>(d), 0};
            for (std::size_t k = 0; k < d; ++k) p.x[k] = centers[c][k] + spread * rng.normal();
            points.push_back(std::move(p));
        }
    }

    const double margin = kBoxMargin * max_spread(config);
    std::vector<double> lo(d), hi(d);
    for (std::size_t k = 0; k < d; ++k) {
        lo[k] = hi[k] = centers[0][k];
        for (const auto& center : centers) {
            lo[k] = std::min(lo[k], center[k]);
            hi[k] = std::max(hi[k], center[k]);
        }
        lo[k] -= margin;
        hi[k] += margin;
    }

    const std::size_t budget = kAttemptsPerOutlier * (config.outlier_count + 1);
    std::size_t attempts = 0;
    for (std::size_t o = 0; o < config.outlier_count; ++o) {
        Point p{std::vector<double>(d), 1};
        while (true) {
            if (attempts++ >= budget) {
                throw std::runtime_error("outlier rejection sampling exceeded " + std::to_string(budget) +
                                         " attempts; the config leaves no room outside the clusters");
            }
            for (std::size_t k = 0; k < d; ++k) p.x[k] = rng.uniform(lo[k], hi[k]);
            bool accepted = true;
            for (std::size_t c = 0; c < centers.size() && accepted; ++c) {
                double sq = 0.0;
                for (std::size_t k = 0; k < d; ++k) sq += (p.x[k] - centers[c][k]) * (p.x[k] - centers[c][k]);
                accepted = std::sqrt(sq) > kRejectRadius * config.cluster_spreads[c];
            }
            if (accepted) break;
        }
        points.push_back(std::move(p));
    }

    rng.shuffle(points);

    std::vector<double> values;
    values.reserve(points.size() * d);
    std::vector<Label> labels;
    labels.reserve(points.size());
    for (const auto& p : points) {
        values.insert(values.end(), p.x.begin(), p.x.end());
        labels.push_back(p.label);
    }
    return Dataset(std::move(values), d, std::move(labels), "synthetic-seed" + std::to_string(config.seed));
}

}  // namespace ipof
