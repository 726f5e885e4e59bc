#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "ipof/dataset.hpp"

namespace ipof {

/// ROC-AUC as the Mann-Whitney statistic: the fraction of (outlier, inlier)
/// pairs where the outlier scores higher, ties counting one half.
/// O(n log n). Throws ValidationError on length mismatch or a missing class.
double auc(std::span<const double> scores, std::span<const Label> labels);

/// Percent change 100 * (after - before) / before. Requires before > 0.
double improvement(double before, double after);

struct EvalReport {
    std::string dataset;
    std::string detector;
    std::optional<std::size_t> K;
    // Absent when the dataset is unlabeled.
    std::optional<double> auc_initial;
    std::optional<double> auc_final;
    std::optional<double> improvement_pct;
    std::size_t iterations = 0;
    bool converged = false;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
};

inline constexpr const char* kReportHeader =
    "dataset,detector,K,auc_initial,auc_final,improvement_pct,iterations,converged";

/// One row of the report table; optional fields are left empty.
void write_report_row(std::ostream& out, const EvalReport& row);

}  // namespace ipof
