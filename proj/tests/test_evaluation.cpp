#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "ipof/error.hpp"
#include "ipof/evaluation.hpp"
#include "oracles.hpp"

using namespace ipof;

namespace {

double auc_of(const std::vector<double>& s, const std::vector<Label>& y) { return auc(s, y); }

std::vector<Label> random_labels(std::mt19937_64& rng, std::size_t n) {
    std::vector<Label> y(n);
    for (auto& v : y) v = rng() % 4 == 0 ? 1 : 0;
    y[0] = 1;
    y[1] = 0;
    std::shuffle(y.begin(), y.end(), rng);
    return y;
}

}  // namespace

TEST_CASE("AUC worked examples") {
    CHECK(auc_of({1, 2, 3, 9}, {0, 0, 0, 1}) == 1.0);
    CHECK(auc_of({9, 2, 3, 1}, {0, 1, 1, 1}) == 0.0);
    CHECK(auc_of({4, 4, 4, 4}, {0, 1, 0, 1}) == 0.5);
    CHECK(auc_of({2, 3, 1}, {1, 0, 0}) == 0.5);
    CHECK(auc_of({0.3, 0.3, 0.1, 0.9}, {1, 0, 0, 1}) == doctest::Approx(0.875));
}

TEST_CASE("AUC rejects bad input") {
    CHECK_THROWS_AS(auc_of({1, 2}, {0}), ValidationError);
    CHECK_THROWS_AS(auc_of({1, 2}, {0, 0}), ValidationError);
    CHECK_THROWS_AS(auc_of({1, 2}, {1, 1}), ValidationError);
    CHECK_THROWS_AS(auc_of({1, 2}, {0, 2}), ValidationError);
    CHECK_THROWS_AS(auc_of({}, {}), ValidationError);
}

TEST_CASE("improvement percentages") {
    CHECK(std::abs(improvement(0.6450, 0.7657) - 18.71) <= 0.01);
    CHECK(std::abs(improvement(0.6709, 0.9294) - 38.53) <= 0.05);
    CHECK(improvement(0.8, 0.8) == 0.0);
    CHECK(improvement(0.8, 0.4) == doctest::Approx(-50.0));
    CHECK_THROWS_AS(improvement(0.0, 0.5), ValidationError);
}

TEST_CASE("AUC matches the pairwise oracle, including ties") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 300;
        const auto y = random_labels(rng, n);
        std::vector<double> s(n);
        const bool ties = trial % 2 == 0;
        for (auto& v : s) v = ties ? static_cast<double>(rng() % 5) : std::uniform_real_distribution<double>(-1, 1)(rng);
        CHECK(auc(s, y) == doctest::Approx(oracle::pairwise_auc(s, y)).epsilon(1e-15));
    }
}

TEST_CASE("AUC invariances") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 200;
        const auto y = random_labels(rng, n);
        std::vector<double> s(n);
        for (auto& v : s) v = static_cast<double>(rng() % 20) * 0.25;
        const double base = auc(s, y);

        std::vector<double> neg(n), mono(n);
        std::transform(s.begin(), s.end(), neg.begin(), [](double v) { return -v; });
        std::transform(s.begin(), s.end(), mono.begin(), [](double v) { return std::exp(v) * 3.0 + 1.0; });
        CHECK(std::abs(base + auc(neg, y) - 1.0) <= 1e-15);
        CHECK(auc(mono, y) == base);

        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> ps(n);
        std::vector<Label> py(n);
        for (std::size_t i = 0; i < n; ++i) {
            ps[i] = s[perm[i]];
            py[i] = y[perm[i]];
        }
        CHECK(auc(ps, py) == base);
        CHECK(base >= 0.0);
        CHECK(base <= 1.0);
    }
}

TEST_CASE("report rows leave absent values empty") {
    EvalReport full{"toy", "lof", 10, 0.75, 0.9, 20.0, 12, true, 3, 30};
    EvalReport bare{"toy", "lof", std::nullopt, std::nullopt, std::nullopt, std::nullopt, 0, false, 0, 0};
    std::ostringstream out;
    write_report_row(out, full);
    write_report_row(out, bare);
    CHECK(out.str() == "toy,lof,10,0.75,0.9,20,12,true\ntoy,lof,,,,,0,false\n");
}
