#pragma once

// Entry-barrier audit: men/women ratio per edition-count bin with a
// gender-reshuffle baseline, negative-binomial regression of edition
// counts on gender + class + birth decade, OLS on external attention
// counts, and mean editions per birth year.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bioaudit/corpus.hpp"
#include "bioaudit/csv.hpp"
#include "bioaudit/regression.hpp"
#include "bioaudit/rng.hpp"

namespace bioaudit::notability {

// --- ratio curve ----------------------------------------------------------

enum class Bucketing : std::uint8_t { per_count, log_buckets };

inline const char* to_string(Bucketing b) {
    return b == Bucketing::log_buckets ? "log_buckets" : "per_count";
}

struct RatioBin {
    std::string label;                  // "1".."30", "31+" or power-of-two ranges
    std::size_t men = 0;
    std::size_t women = 0;
    std::optional<double> observed_ratio;        // null when women == 0
    std::optional<double> baseline_ratio_mean;   // over reshuffles with women > 0
    std::optional<double> baseline_ratio_ci_low;
    std::optional<double> baseline_ratio_ci_high;
};

struct RatioCurve {
    Bucketing bucketing = Bucketing::per_count;
    std::size_t reshuffles = 0;
    std::vector<RatioBin> bins;
};

namespace detail {

// per_count: one bin per edition count 1..30, then a pooled 31+ bin.
// log_buckets: [1], [2,3], [4,7], [8,15], ...
inline std::size_t bin_index(int edition_count, Bucketing bucketing) {
    if (bucketing == Bucketing::per_count)
        return static_cast<std::size_t>(std::min(edition_count, 31) - 1);
    std::size_t idx = 0;
    int low = 1;
    while (edition_count >= 2 * low) {
        low *= 2;
        ++idx;
    }
    return idx;
}

inline std::vector<std::string> bin_labels(Bucketing bucketing, std::size_t count) {
    std::vector<std::string> labels;
    if (bucketing == Bucketing::per_count) {
        for (int c = 1; c <= 30; ++c) labels.push_back(std::to_string(c));
        labels.push_back("31+");
    } else {
        int low = 1;
        for (std::size_t i = 0; i < count; ++i) {
            labels.push_back(std::to_string(low) + "-" + std::to_string(2 * low - 1));
            low *= 2;
        }
    }
    return labels;
}

inline double percentile(std::vector<double>& sorted_values, double q) {
    const std::size_t m = sorted_values.size();
    if (m == 1) return sorted_values[0];
    const double pos = q * static_cast<double>(m - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, m - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted_values[lo] * (1.0 - frac) + sorted_values[hi] * frac;
}

}  // namespace detail

// Observed men/women ratio per bin plus a permutation baseline: gender
// labels are reshuffled over the cohort (edition counts fixed) in
// `reshuffles` independent iterations, each on its own seed substream, so
// the result is identical no matter how iterations are scheduled.
inline RatioCurve ratio_curve(const corpus::CohortView& view,
                              Bucketing bucketing = Bucketing::per_count,
                              std::size_t reshuffles = 1000, std::uint64_t seed = 0) {
    if (view.empty()) throw std::invalid_argument("ratio_curve: empty cohort");
    if (reshuffles < 1) throw std::invalid_argument("ratio_curve: reshuffles must be >= 1");

    const std::size_t n = view.size();
    std::vector<std::size_t> bin_of(n);
    std::size_t n_bins = 0;
    for (std::size_t i = 0; i < n; ++i) {
        bin_of[i] = detail::bin_index(view[i].edition_count, bucketing);
        n_bins = std::max(n_bins, bin_of[i] + 1);
    }
    if (bucketing == Bucketing::per_count) n_bins = 31;

    RatioCurve curve;
    curve.bucketing = bucketing;
    curve.reshuffles = reshuffles;
    curve.bins.resize(n_bins);
    const auto labels = detail::bin_labels(bucketing, n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) curve.bins[b].label = labels[b];

    std::size_t total_women = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto& bin = curve.bins[bin_of[i]];
        if (view[i].gender == corpus::Gender::female) {
            ++bin.women;
            ++total_women;
        } else {
            ++bin.men;
        }
    }
    for (auto& bin : curve.bins)
        if (bin.women > 0)
            bin.observed_ratio = static_cast<double>(bin.men) / static_cast<double>(bin.women);

    // Baseline: one label permutation per iteration; a bin left with zero
    // women in an iteration contributes no ratio sample for that iteration.
    std::vector<std::size_t> bin_sizes(n_bins, 0);
    for (std::size_t i = 0; i < n; ++i) ++bin_sizes[bin_of[i]];

    const std::uint64_t stream_root = derive_seed(seed, "ratio_curve");
    auto run_block = [&](std::size_t first, std::size_t last, std::vector<double>& samples) {
        // samples laid out [bin * reshuffles + iteration]; NaN = undefined.
        std::vector<std::uint8_t> labels_f(n);
        for (std::size_t it = first; it < last; ++it) {
            for (std::size_t i = 0; i < n; ++i) labels_f[i] = i < total_women ? 1 : 0;
            Rng rng(derive_seed(stream_root, static_cast<std::uint64_t>(it)));
            rng.shuffle(labels_f);
            std::vector<std::size_t> women_in(n_bins, 0);
            for (std::size_t i = 0; i < n; ++i)
                if (labels_f[i]) ++women_in[bin_of[i]];
            for (std::size_t b = 0; b < n_bins; ++b) {
                const std::size_t w = women_in[b];
                samples[b * reshuffles + it] =
                    w > 0 ? static_cast<double>(bin_sizes[b] - w) / static_cast<double>(w)
                          : std::numeric_limits<double>::quiet_NaN();
            }
        }
    };

    std::vector<double> samples(n_bins * reshuffles);
    const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    const std::size_t n_threads = std::min(hw, reshuffles);
    const std::size_t block = (reshuffles + n_threads - 1) / n_threads;
    std::vector<std::future<void>> futures;
    for (std::size_t t = 0; t < n_threads; ++t) {
        const std::size_t first = t * block;
        const std::size_t last = std::min(first + block, reshuffles);
        if (first >= last) break;
        futures.push_back(std::async(std::launch::async, [&, first, last] {
            run_block(first, last, samples);
        }));
    }
    for (auto& f : futures) f.get();

    std::vector<double> usable;
    for (std::size_t b = 0; b < n_bins; ++b) {
        usable.clear();
        double sum = 0.0;
        for (std::size_t it = 0; it < reshuffles; ++it) {
            const double v = samples[b * reshuffles + it];
            if (!std::isnan(v)) {
                usable.push_back(v);
                sum += v;
            }
        }
        if (usable.empty()) continue;
        auto& bin = curve.bins[b];
        bin.baseline_ratio_mean = sum / static_cast<double>(usable.size());
        std::sort(usable.begin(), usable.end());
        bin.baseline_ratio_ci_low = detail::percentile(usable, 0.025);
        bin.baseline_ratio_ci_high = detail::percentile(usable, 0.975);
    }
    return curve;
}

// --- edition-count regression ----------------------------------------------

struct NotabilityRegression {
    statkit::RegressionFit fit;
    std::vector<std::string> warnings;
};

// edition_count ~ gender + class + birth_decade, NB2 with log link.
// Reference levels mirror the reporting convention: gender "male", class
// "Person" (falling back to the alphabetically first class when Person is
// absent). Class dummies with fewer than 10 cohort rows are folded into
// the reference.
inline NotabilityRegression notability_regression(const corpus::CohortView& view) {
    NotabilityRegression out;
    const std::size_t n = view.size();
    if (n == 0) throw std::invalid_argument("notability_regression: empty cohort");

    std::map<std::string, std::size_t> class_counts;
    for (std::size_t i = 0; i < n; ++i) {
        if (!view[i].birth_year)
            throw std::invalid_argument("notability_regression: cohort contains undated records");
        ++class_counts[view[i].ontology_class];
    }
    std::string reference = "Person";
    if (!class_counts.count("Person")) {
        reference = class_counts.begin()->first;
        out.warnings.push_back("class 'Person' absent; using reference '" + reference + "'");
    }

    statkit::DesignBuilder d(n);
    d.add_intercept();
    std::vector<double> female(n);
    for (std::size_t i = 0; i < n; ++i)
        female[i] = view[i].gender == corpus::Gender::female ? 1.0 : 0.0;
    d.add_numeric("gender[T.female]", std::move(female));

    std::vector<std::string> classes(n);
    for (const auto& [cls, cnt] : class_counts)
        if (cnt < 10 && cls != reference)
            out.warnings.push_back("class '" + cls + "' has fewer than 10 rows; folded into '" +
                                   reference + "'");
    for (std::size_t i = 0; i < n; ++i) {
        const auto& cls = view[i].ontology_class;
        classes[i] = class_counts[cls] < 10 ? reference : cls;
    }
    d.add_categorical("class", classes, reference);

    std::vector<double> decade(n);
    for (std::size_t i = 0; i < n; ++i)
        decade[i] = std::floor(static_cast<double>(*view[i].birth_year) / 10.0) * 10.0;
    const bool decade_varies =
        std::any_of(decade.begin(), decade.end(), [&](double v) { return v != decade.front(); });
    if (decade_varies)
        d.add_numeric("birth_decade", std::move(decade));
    else
        out.warnings.push_back("birth_decade is constant over the cohort; dropped");

    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i)
        y[static_cast<Eigen::Index>(i)] = static_cast<double>(view[i].edition_count);
    out.fit = statkit::negbin_fit(y, d.matrix(), d.names());
    return out;
}

// --- external attention -------------------------------------------------------

struct GenderStats {
    double mean_male = 0.0, mean_female = 0.0;
    double median_male = 0.0, median_female = 0.0;
};

struct AttentionResult {
    statkit::RegressionFit regions_fit;
    statkit::RegressionFit months_fit;
    GenderStats regions;
    GenderStats months;
    std::size_t n_used = 0;
    std::size_t n_unresolved = 0;
    std::size_t n_invalid = 0;  // negative counts or months beyond the window
};

namespace detail {

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    return m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

}  // namespace detail

// Attention CSV (`id,regions,months`) joined to the corpus by id; two OLS
// fits of the counts on gender. Rows whose id does not resolve are
// counted and skipped; more than 50% unresolved is an error.
inline AttentionResult attention_regression(const std::string& attention_csv_path,
                                            const corpus::Corpus& corpus,
                                            int observation_months = 142) {
    const std::string content = read_file(attention_csv_path);
    AttentionResult out;

    std::vector<double> regions, months, female;
    std::size_t line_no = 0, start = 0;
    while (start < content.size()) {
        std::size_t end = content.find('\n', start);
        if (end == std::string::npos) end = content.size();
        std::string line(chomp(std::string_view(content).substr(start, end - start)));
        start = end + 1;
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != "id,regions,months")
                throw std::runtime_error(attention_csv_path +
                                         ": expected header 'id,regions,months'");
            continue;
        }
        const auto fields = split_on(line, ',');
        if (fields.size() != 3)
            throw std::runtime_error(attention_csv_path + ":" + std::to_string(line_no) +
                                     ": expected three columns");
        const auto idx = corpus.index_of(fields[0]);
        if (!idx) {
            ++out.n_unresolved;
            continue;
        }
        double r = 0.0, m = 0.0;
        try {
            r = std::stod(fields[1]);
            m = std::stod(fields[2]);
        } catch (const std::exception&) {
            throw std::runtime_error(attention_csv_path + ":" + std::to_string(line_no) +
                                     ": non-numeric count");
        }
        if (r < 0.0 || m < 0.0 || m > static_cast<double>(observation_months)) {
            ++out.n_invalid;
            continue;
        }
        regions.push_back(r);
        months.push_back(m);
        female.push_back(corpus.records[*idx].gender == corpus::Gender::female ? 1.0 : 0.0);
    }

    const std::size_t resolved = regions.size() + out.n_invalid;
    if (resolved + out.n_unresolved == 0)
        throw std::runtime_error(attention_csv_path + ": no data rows");
    if (out.n_unresolved * 2 > resolved + out.n_unresolved)
        throw std::runtime_error(attention_csv_path + ": more than 50% of ids are unresolved");
    out.n_used = regions.size();

    statkit::DesignBuilder d(out.n_used);
    d.add_intercept();
    d.add_numeric("gender[T.female]", female);
    const Eigen::MatrixXd X = d.matrix();

    Eigen::VectorXd yr(out.n_used), ym(out.n_used);
    for (std::size_t i = 0; i < out.n_used; ++i) {
        yr[static_cast<Eigen::Index>(i)] = regions[i];
        ym[static_cast<Eigen::Index>(i)] = months[i];
    }
    out.regions_fit = statkit::ols_fit(yr, X, d.names());
    out.months_fit = statkit::ols_fit(ym, X, d.names());

    std::vector<double> rm, rf, mm, mf;
    for (std::size_t i = 0; i < out.n_used; ++i) {
        if (female[i] > 0.5) {
            rf.push_back(regions[i]);
            mf.push_back(months[i]);
        } else {
            rm.push_back(regions[i]);
            mm.push_back(months[i]);
        }
    }
    auto mean = [](const std::vector<double>& v) {
        return v.empty() ? 0.0
                         : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    out.regions = {mean(rm), mean(rf), detail::median(rm), detail::median(rf)};
    out.months = {mean(mm), mean(mf), detail::median(mm), detail::median(mf)};
    return out;
}

// --- mean editions per birth year ----------------------------------------------

struct YearMeans {
    int year = 0;
    std::optional<double> mean_editions_male;
    std::optional<double> mean_editions_female;
};

// Per-year per-gender mean edition count, optionally smoothed with a
// centered moving average over calendar years (window must be odd; years
// without data contribute nothing to the window).
inline std::vector<YearMeans> notability_by_birthyear(const corpus::CohortView& view,
                                                      int smoothing_window = 1) {
    if (view.empty()) throw std::invalid_argument("notability_by_birthyear: empty cohort");
    if (smoothing_window < 1 || smoothing_window % 2 == 0)
        throw std::invalid_argument("smoothing window must be odd and positive");

    struct Cell {
        double sum_m = 0.0, sum_f = 0.0;
        std::size_t n_m = 0, n_f = 0;
    };
    std::map<int, Cell> by_year;
    for (std::size_t i = 0; i < view.size(); ++i) {
        const auto& bio = view[i];
        if (!bio.birth_year) continue;
        auto& cell = by_year[*bio.birth_year];
        if (bio.gender == corpus::Gender::female) {
            cell.sum_f += bio.edition_count;
            ++cell.n_f;
        } else {
            cell.sum_m += bio.edition_count;
            ++cell.n_m;
        }
    }

    std::map<int, std::pair<std::optional<double>, std::optional<double>>> means;
    for (const auto& [year, cell] : by_year)
        means[year] = {cell.n_m > 0 ? std::optional(cell.sum_m / cell.n_m) : std::nullopt,
                       cell.n_f > 0 ? std::optional(cell.sum_f / cell.n_f) : std::nullopt};

    const int half = smoothing_window / 2;
    std::vector<YearMeans> out;
    for (const auto& [year, mean_pair] : means) {
        YearMeans ym;
        ym.year = year;
        double sm = 0.0, sf = 0.0;
        std::size_t cm = 0, cf = 0;
        for (int y = year - half; y <= year + half; ++y) {
            auto it = means.find(y);
            if (it == means.end()) continue;
            if (it->second.first) {
                sm += *it->second.first;
                ++cm;
            }
            if (it->second.second) {
                sf += *it->second.second;
                ++cf;
            }
        }
        if (cm > 0) ym.mean_editions_male = sm / static_cast<double>(cm);
        if (cf > 0) ym.mean_editions_female = sf / static_cast<double>(cf);
        out.push_back(ym);
    }
    return out;
}

}  // namespace bioaudit::notability
