#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ipof {

using Label = std::uint8_t;  // 0 = inlier, 1 = outlier

/// Immutable n x d feature matrix (row-major) with optional binary labels.
class Dataset {
public:
    /// Throws ValidationError unless n >= 2, d >= 1, every value is finite,
    /// and labels (if given) have length n with entries in {0, 1}.
    Dataset(std::vector<double> values, std::size_t dimension,
            std::optional<std::vector<Label>> labels = std::nullopt, std::string name = {});

    std::size_t size() const noexcept { return n_; }
    std::size_t dimension() const noexcept { return d_; }
    const std::string& name() const noexcept { return name_; }

    std::span<const double> row(std::size_t i) const noexcept {
        return {values_.data() + i * d_, d_};
    }
    std::span<const double> values() const noexcept { return values_; }

    bool has_labels() const noexcept { return labels_.has_value(); }
    /// Throws ValidationError if the dataset is unlabeled.
    const std::vector<Label>& labels() const;
    std::size_t outlier_count() const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::vector<double> values_;
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::optional<std::vector<Label>> labels_;
    std::string name_;
};

/// Reads comma-delimited numeric text. A first row containing any
/// non-numeric field is taken as the header. When `label_column` is given,
/// that column is removed from the features and must hold "0" or "1".
Dataset load_dataset(const std::filesystem::path& path,
                     const std::optional<std::string>& label_column = std::nullopt);

/// Writes the canonical format: header "x0,..,x{d-1}[,label]", values at
/// round-trip precision.
void write_dataset(const Dataset& dataset, const std::filesystem::path& path,
                   const std::string& label_column = "label");

struct SyntheticConfig {
    std::size_t cluster_count = 3;
    std::size_t points_per_cluster = 500;
    std::size_t outlier_count = 150;
    std::size_t dimension = 2;
    std::vector<double> cluster_spreads{0.5, 1.0, 2.0};
    std::uint64_t seed = 42;

    void validate() const;
};

/// JSON object keyed by the SyntheticConfig field names; missing keys keep
/// their defaults, unknown keys are rejected.
SyntheticConfig parse_synthetic_config(const std::string& json_text);
std::string synthetic_config_to_json(const SyntheticConfig& config);
SyntheticConfig load_synthetic_config(const std::filesystem::path& path);

/// Cluster centers used by generate_synthetic for this config.
std::vector<std::vector<double>> synthetic_centers(const SyntheticConfig& config);

/// Gaussian clusters plus uniformly scattered outliers; a pure function of
/// the config. Throws std::runtime_error when rejection sampling for
/// outliers exhausts its attempt budget.
Dataset generate_synthetic(const SyntheticConfig& config);

}  // namespace ipof
