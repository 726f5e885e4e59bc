#include "ipof/evaluation.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <vector>

#include "ipof/error.hpp"
#include "ipof/text.hpp"

namespace ipof {

double auc(std::span<const double> scores, std::span<const Label> labels) {
    if (scores.size() != labels.size()) {
        throw ValidationError("auc: " + std::to_string(scores.size()) + " scores but " +
                              std::to_string(labels.size()) + " labels");
    }
    const std::size_t n = scores.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] > 1) throw ValidationError("auc: label at " + std::to_string(i) + " is not 0 or 1");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Twice the rank sum of positives stays integral under mid-rank ties.
    std::uint64_t twice_rank_sum = 0;
    std::uint64_t n_pos = 0;
    for (std::size_t start = 0; start < n;) {
        std::size_t end = start + 1;
        while (end < n && scores[order[end]] == scores[order[start]]) ++end;
        const std::uint64_t twice_mid_rank = (start + 1) + end;  // 2 * mean of ranks start+1..end
        for (std::size_t t = start; t < end; ++t) {
            if (labels[order[t]] == 1) {
                twice_rank_sum += twice_mid_rank;
                ++n_pos;
            }
        }
        start = end;
    }
    const std::uint64_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw ValidationError("auc needs at least one outlier and one inlier label");

    const std::uint64_t twice_u = twice_rank_sum - n_pos * (n_pos + 1);
    return 0.5 * static_cast<double>(twice_u) / static_cast<double>(n_pos * n_neg);
}

double improvement(double before, double after) {
    if (!(before > 0.0)) throw ValidationError("improvement needs a positive baseline, got " + format_double(before));
    return 100.0 * (after - before) / before;
}

void write_report_row(std::ostream& out, const EvalReport& row) {
    out << row.dataset << ',' << row.detector << ',';
    if (row.K) out << *row.K;
    out << ',';
    if (row.auc_initial) out << format_double(*row.auc_initial);
    out << ',';
    if (row.auc_final) out << format_double(*row.auc_final);
    out << ',';
    if (row.improvement_pct) out << format_double(*row.improvement_pct);
    out << ',' << row.iterations << ',' << (row.converged ? "true" : "false") << '\n';
}

}  // namespace ipof
