#pragma once

// Straight-from-definition reference computations. Deliberately naive and
// independent of the library's code paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "ipof/dataset.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline Matrix pairwise_euclidean(const ipof::Dataset& ds) {
    const std::size_t n = ds.size();
    Matrix dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double sq = 0.0;
            for (std::size_t c = 0; c < ds.dimension(); ++c) {
                const double diff = ds.row(i)[c] - ds.row(j)[c];
                sq += diff * diff;
            }
            dist[i][j] = std::sqrt(sq);
        }
    }
    return dist;
}

/// For each point, all other indices ordered by (distance, index), cut to k.
inline std::vector<std::vector<std::size_t>> brute_force_knn(const Matrix& dist, std::size_t k) {
    const std::size_t n = dist.size();
    std::vector<std::vector<std::size_t>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> others;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) others.push_back(j);
        }
        // Index order first, then a stable sort by distance keeps the lower
        // index ahead on ties.
        std::stable_sort(others.begin(), others.end(),
                         [&](std::size_t a, std::size_t b) { return dist[i][a] < dist[i][b]; });
        others.resize(k);
        out[i] = others;
    }
    return out;
}

/// LOF from the textbook definitions on top of brute_force_knn.
inline std::vector<double> naive_lof(const ipof::Dataset& ds, std::size_t k, double eps = 1e-12) {
    const auto dist = pairwise_euclidean(ds);
    const auto nn = brute_force_knn(dist, k);
    const std::size_t n = ds.size();
    auto k_distance = [&](std::size_t o) { return dist[o][nn[o].back()]; };
    auto reach_dist = [&](std::size_t p, std::size_t o) { return std::max(k_distance(o), dist[p][o]); };
    std::vector<double> lrd(n);
    for (std::size_t p = 0; p < n; ++p) {
        double total = 0.0;
        for (std::size_t o : nn[p]) total += reach_dist(p, o);
        lrd[p] = 1.0 / (total / static_cast<double>(k) + eps);
    }
    std::vector<double> lof(n);
    for (std::size_t p = 0; p < n; ++p) {
        double total = 0.0;
        for (std::size_t o : nn[p]) total += lrd[o] / lrd[p];
        lof[p] = total / static_cast<double>(k);
    }
    return lof;
}

/// Mann-Whitney by enumerating every (positive, negative) pair.
inline double pairwise_auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
    double wins = 0.0;
    std::uint64_t pairs = 0;
    for (std::size_t p = 0; p < scores.size(); ++p) {
        if (labels[p] != 1) continue;
        for (std::size_t q = 0; q < scores.size(); ++q) {
            if (labels[q] != 0) continue;
            ++pairs;
            if (scores[p] > scores[q]) {
                wins += 1.0;
            } else if (scores[p] == scores[q]) {
                wins += 0.5;
            }
        }
    }
    return wins / static_cast<double>(pairs);
}

/// Dense row-stochastic propagation matrix: W[l][l] = W[l][j] = 1/(m+1)
/// for each of the m sources j of l.
inline Matrix propagation_matrix(const std::vector<std::vector<std::size_t>>& sources) {
    const std::size_t n = sources.size();
    Matrix w(n, std::vector<double>(n, 0.0));
    for (std::size_t l = 0; l < n; ++l) {
        const double weight = 1.0 / static_cast<double>(sources[l].size() + 1);
        w[l][l] += weight;
        for (std::size_t j : sources[l]) w[l][j] += weight;
    }
    return w;
}

inline std::vector<double> multiply(const Matrix& w, const std::vector<double>& s) {
    std::vector<double> out(s.size(), 0.0);
    for (std::size_t l = 0; l < s.size(); ++l) {
        for (std::size_t j = 0; j < s.size(); ++j) out[l] += w[l][j] * s[j];
    }
    return out;
}

inline ipof::Dataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t d, bool with_ties = false) {
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    std::uniform_int_distribution<int> grid(0, 4);
    std::vector<double> values(n * d);
    for (double& v : values) v = with_ties ? static_cast<double>(grid(rng)) : coord(rng);
    return ipof::Dataset(std::move(values), d);
}

}  // namespace oracle
