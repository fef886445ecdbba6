#pragma once

// Shared statistical kernels: Pearson chi-square tests (independence and
// goodness of fit), Cohen's w, relative change, and pointwise mutual
// information. All kernels are pure functions; regression fits live in
// regression.hpp under the same namespace.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "bioaudit/dist.hpp"

namespace bioaudit::statkit {

struct ContingencyTable {
    std::vector<std::vector<double>> rows;  // non-negative counts
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_cols() const { return rows.empty() ? 0 : rows[0].size(); }
};

struct TestResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    double effect_size_w = 0.0;  // sqrt(statistic / N)
};

inline void validate_table(const ContingencyTable& t) {
    if (t.n_rows() < 2 || t.n_cols() < 2)
        throw std::invalid_argument("contingency table needs at least 2 rows and 2 columns");
    for (const auto& row : t.rows) {
        if (row.size() != t.n_cols())
            throw std::invalid_argument("ragged contingency table");
        for (double v : row)
            if (v < 0.0 || !std::isfinite(v))
                throw std::invalid_argument("contingency cells must be non-negative counts");
    }
}

// Pearson independence test with expectations from the marginals.
// A zero row/column total makes the expectation undefined; the error names
// the offending label so callers can merge categories.
inline TestResult chi_square_independence(const ContingencyTable& t) {
    validate_table(t);
    const std::size_t r = t.n_rows(), c = t.n_cols();
    std::vector<double> row_tot(r, 0.0), col_tot(c, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            row_tot[i] += t.rows[i][j];
            col_tot[j] += t.rows[i][j];
            grand += t.rows[i][j];
        }
    if (grand <= 0.0) throw std::invalid_argument("contingency table is empty");
    for (std::size_t i = 0; i < r; ++i)
        if (row_tot[i] == 0.0)
            throw std::invalid_argument(
                "zero marginal in row '" +
                (i < t.row_labels.size() ? t.row_labels[i] : std::to_string(i)) + "'");
    for (std::size_t j = 0; j < c; ++j)
        if (col_tot[j] == 0.0)
            throw std::invalid_argument(
                "zero marginal in column '" +
                (j < t.col_labels.size() ? t.col_labels[j] : std::to_string(j)) + "'");

    double stat = 0.0;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            const double expected = row_tot[i] * col_tot[j] / grand;
            const double d = t.rows[i][j] - expected;
            stat += d * d / expected;
        }
    TestResult out;
    out.statistic = stat;
    out.dof = static_cast<int>((r - 1) * (c - 1));
    out.p_value = chi2_survival(stat, out.dof);
    out.effect_size_w = std::sqrt(stat / grand);
    return out;
}

inline TestResult chi_square_goodness(const std::vector<double>& observed,
                                      const std::vector<double>& expected_proportions) {
    if (observed.size() != expected_proportions.size() || observed.size() < 2)
        throw std::invalid_argument("observed and expected proportions must align (>= 2 cells)");
    double psum = 0.0;
    for (double p : expected_proportions) psum += p;
    if (std::fabs(psum - 1.0) > 1e-9)
        throw std::invalid_argument("expected proportions must sum to 1");
    const double n = std::accumulate(observed.begin(), observed.end(), 0.0);
    if (n <= 0.0) throw std::invalid_argument("observed counts are all zero");

    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double expected = n * expected_proportions[i];
        if (expected <= 0.0)
            throw std::invalid_argument("expected count is zero in cell " + std::to_string(i));
        const double d = observed[i] - expected;
        stat += d * d / expected;
    }
    TestResult out;
    out.statistic = stat;
    out.dof = static_cast<int>(observed.size()) - 1;
    out.p_value = chi2_survival(stat, out.dof);
    out.effect_size_w = std::sqrt(stat / n);
    return out;
}

// Percent change of `other` relative to `base`: 100 * (base - other) / base.
inline double relative_change(double base, double other) {
    if (base == 0.0) throw std::invalid_argument("relative_change: base is zero");
    return 100.0 * (base - other) / base;
}

// Base-2 pointwise mutual information of two outcomes with joint count
// `joint` out of `total` trials. Zero iff independent. All counts must be
// positive; callers pre-filter terms seen in only one group.
inline double pmi(double joint, double x_count, double y_count, double total) {
    if (joint <= 0.0 || x_count <= 0.0 || y_count <= 0.0 || total <= 0.0)
        throw std::invalid_argument("pmi: counts must be positive");
    const double min_xy = x_count < y_count ? x_count : y_count;
    if (joint > min_xy + 1e-9 || min_xy > total + 1e-9)
        throw std::invalid_argument("pmi: requires joint <= min(x, y) <= total");
    return std::log2((joint * total) / (x_count * y_count));
}

}  // namespace bioaudit::statkit
