#pragma once

// Linguistic-bias audit. Evaluative tokens are matched against a
// subjectivity lexicon; a match counts as abstract when it is an
// adjective, taken from the token's POS tag when the corpus is tagged and
// from the lexicon's adjective prior otherwise. Per-biography ratios
// r+ = A+/W+ and r- = A-/W- feed an aggregate one-tailed test pair and
// per-biography regressions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "bioaudit/corpus.hpp"
#include "bioaudit/csv.hpp"
#include "bioaudit/regression.hpp"
#include "bioaudit/statkit.hpp"
#include "bioaudit/tokenize.hpp"

namespace bioaudit::lingbias {

enum class Polarity : std::uint8_t { positive, negative };

struct LexiconEntry {
    Polarity polarity = Polarity::positive;
    bool adjective_prior = false;
};

class SubjectivityLexicon {
public:
    void add(const std::string& word, Polarity polarity, bool adjective_prior) {
        terms_.emplace(ascii_lower(word), LexiconEntry{polarity, adjective_prior});
    }

    const LexiconEntry* find(const std::string& lowercased) const {
        auto it = terms_.find(lowercased);
        return it == terms_.end() ? nullptr : &it->second;
    }

    std::size_t size() const { return terms_.size(); }
    std::size_t dropped_neutral = 0;
    std::size_t dropped_duplicates = 0;

    // Line-oriented key=value records (word1=..., pos1=..., priorpolarity=...).
    // Polarities other than positive/negative are dropped; the first record
    // for a word wins.
    static SubjectivityLexicon from_file(const std::string& path) {
        SubjectivityLexicon lex;
        const std::string content = read_file(path);
        std::size_t start = 0, line_no = 0;
        while (start < content.size()) {
            std::size_t end = content.find('\n', start);
            if (end == std::string::npos) end = content.size();
            std::string line(chomp(std::string_view(content).substr(start, end - start)));
            start = end + 1;
            ++line_no;
            if (line.empty() || line[0] == '#') continue;

            std::string word, pos, polarity;
            for (const auto& field : split_on(line, ' ')) {
                const auto eq = field.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = field.substr(0, eq);
                const std::string value = field.substr(eq + 1);
                if (key == "word1") word = value;
                else if (key == "pos1") pos = value;
                else if (key == "priorpolarity") polarity = value;
            }
            if (word.empty())
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": record without word1 field");
            if (polarity != "positive" && polarity != "negative") {
                ++lex.dropped_neutral;
                continue;
            }
            const std::string key = ascii_lower(word);
            if (lex.terms_.count(key)) {
                ++lex.dropped_duplicates;
                continue;
            }
            lex.terms_.emplace(key, LexiconEntry{polarity == "positive" ? Polarity::positive
                                                                        : Polarity::negative,
                                                 pos == "adj"});
        }
        return lex;
    }

private:
    std::unordered_map<std::string, LexiconEntry> terms_;
};

inline bool is_adjective_tag(const std::string& pos) {
    return pos.size() >= 2 && (pos[0] == 'J' || pos[0] == 'j') && (pos[1] == 'J' || pos[1] == 'j');
}

struct BioEvaluativeCounts {
    std::string id;
    std::int64_t w_plus = 0;
    std::int64_t w_minus = 0;
    std::int64_t a_plus = 0;
    std::int64_t a_minus = 0;

    std::optional<double> r_plus() const {
        if (w_plus == 0) return std::nullopt;
        return static_cast<double>(a_plus) / static_cast<double>(w_plus);
    }
    std::optional<double> r_minus() const {
        if (w_minus == 0) return std::nullopt;
        return static_cast<double>(a_minus) / static_cast<double>(w_minus);
    }
};

inline BioEvaluativeCounts score_biography(const corpus::Biography& bio,
                                           const SubjectivityLexicon& lexicon) {
    BioEvaluativeCounts out;
    out.id = bio.id;
    for (const auto& sentence : bio.sentences)
        for (const auto& token : sentence) {
            const auto* entry = lexicon.find(ascii_lower(token.surface));
            if (!entry) continue;
            const bool adjective =
                token.pos.empty() ? entry->adjective_prior
                                  : (is_adjective_tag(token.pos) || token.pos == "adj");
            if (entry->polarity == Polarity::positive) {
                ++out.w_plus;
                if (adjective) ++out.a_plus;
            } else {
                ++out.w_minus;
                if (adjective) ++out.a_minus;
            }
        }
    return out;
}

// One pooled row per gender plus a directional test per polarity. The
// predicted directions: abstract positivity higher for men, abstract
// negativity higher for women. One-tailed p is half the two-tailed
// chi-square p when the observed direction matches the prediction,
// otherwise one minus that half.
struct PooledRow {
    std::int64_t w_plus = 0, a_plus = 0, w_minus = 0, a_minus = 0;
    double pct_abstract_positive = 0.0;
    double pct_abstract_negative = 0.0;
};

struct DirectionalTest {
    statkit::TestResult chi_square;
    double one_tailed_p = 0.5;
    bool direction_matches_prediction = false;
};

struct AggregateLibResult {
    PooledRow men;
    PooledRow women;
    DirectionalTest positive;
    DirectionalTest negative;
    std::optional<double> pct_change_positive;  // men as base; null when base is 0
    std::optional<double> pct_change_negative;
};

namespace detail {

inline DirectionalTest directional_2x2(double a_men, double w_men, double a_women,
                                       double w_women, bool predict_men_higher) {
    DirectionalTest out;
    if (a_men + a_women == 0.0 || (w_men - a_men) + (w_women - a_women) == 0.0) {
        // Both genders all-abstract or all-concrete: ratios identical by
        // construction, nothing to test.
        out.chi_square = {0.0, 1, 1.0, 0.0};
        out.one_tailed_p = 0.5;
        return out;
    }
    statkit::ContingencyTable t;
    t.row_labels = {"men", "women"};
    t.col_labels = {"adjective", "non_adjective"};
    t.rows = {{a_men, w_men - a_men}, {a_women, w_women - a_women}};
    out.chi_square = statkit::chi_square_independence(t);
    const double ratio_men = a_men / w_men;
    const double ratio_women = a_women / w_women;
    out.direction_matches_prediction =
        predict_men_higher ? ratio_men > ratio_women : ratio_women > ratio_men;
    out.one_tailed_p = out.direction_matches_prediction ? out.chi_square.p_value / 2.0
                                                        : 1.0 - out.chi_square.p_value / 2.0;
    return out;
}

}  // namespace detail

inline AggregateLibResult aggregate_ratio_test(const corpus::CohortView& view,
                                               const SubjectivityLexicon& lexicon) {
    AggregateLibResult out;
    for (std::size_t i = 0; i < view.size(); ++i) {
        const auto& bio = view[i];
        const auto counts = score_biography(bio, lexicon);
        auto& row = bio.gender == corpus::Gender::female ? out.women : out.men;
        row.w_plus += counts.w_plus;
        row.a_plus += counts.a_plus;
        row.w_minus += counts.w_minus;
        row.a_minus += counts.a_minus;
    }
    if (out.men.w_plus == 0 || out.women.w_plus == 0 || out.men.w_minus == 0 ||
        out.women.w_minus == 0)
        throw std::runtime_error(
            "aggregate_ratio_test: a gender has no evaluative tokens of some polarity");

    for (PooledRow* row : {&out.men, &out.women}) {
        row->pct_abstract_positive = 100.0 * static_cast<double>(row->a_plus) / row->w_plus;
        row->pct_abstract_negative = 100.0 * static_cast<double>(row->a_minus) / row->w_minus;
    }
    out.positive = detail::directional_2x2(
        static_cast<double>(out.men.a_plus), static_cast<double>(out.men.w_plus),
        static_cast<double>(out.women.a_plus), static_cast<double>(out.women.w_plus),
        /*predict_men_higher=*/true);
    out.negative = detail::directional_2x2(
        static_cast<double>(out.men.a_minus), static_cast<double>(out.men.w_minus),
        static_cast<double>(out.women.a_minus), static_cast<double>(out.women.w_minus),
        /*predict_men_higher=*/false);
    if (out.men.pct_abstract_positive != 0.0)
        out.pct_change_positive = statkit::relative_change(out.men.pct_abstract_positive,
                                                           out.women.pct_abstract_positive);
    if (out.men.pct_abstract_negative != 0.0)
        out.pct_change_negative = statkit::relative_change(out.men.pct_abstract_negative,
                                                           out.women.pct_abstract_negative);
    return out;
}

enum class Transform : std::uint8_t { identity, logit };

inline const char* to_string(Transform t) { return t == Transform::logit ? "logit" : "identity"; }

struct IndividualRegressions {
    statkit::RegressionFit positive;
    statkit::RegressionFit negative;
    std::vector<std::string> warnings;
};

// OLS of r+ (and separately r-) on gender, class dummies, and century of
// birth over biographies with >= min_words tokens and at least one
// evaluative term of the fitted polarity. Class dummies with fewer than 10
// qualifying rows are folded into the reference with a warning.
inline IndividualRegressions individual_regressions(const corpus::CohortView& view,
                                                    const SubjectivityLexicon& lexicon,
                                                    std::size_t min_words = 250,
                                                    Transform transform = Transform::identity) {
    IndividualRegressions out;

    struct Row {
        double r = 0.0;
        bool female = false;
        std::string cls;
        double century = 0.0;
    };

    auto fit_for = [&](Polarity polarity) {
        std::vector<Row> rows;
        for (std::size_t i = 0; i < view.size(); ++i) {
            const auto& bio = view[i];
            if (!bio.birth_year || bio.token_count < min_words) continue;
            const auto counts = score_biography(bio, lexicon);
            const auto r = polarity == Polarity::positive ? counts.r_plus() : counts.r_minus();
            if (!r) continue;
            Row row;
            row.r = *r;
            if (transform == Transform::logit) {
                const double clamped = std::clamp(*r, 1e-3, 1.0 - 1e-3);
                row.r = std::log(clamped / (1.0 - clamped));
            }
            row.female = bio.gender == corpus::Gender::female;
            row.cls = bio.ontology_class;
            row.century = std::floor(static_cast<double>(*bio.birth_year) / 100.0) + 1.0;
            rows.push_back(std::move(row));
        }

        std::map<std::string, std::size_t> class_counts;
        for (const auto& row : rows) ++class_counts[row.cls];
        std::string reference;
        for (const auto& [cls, cnt] : class_counts)
            if (cnt >= 10) { reference = cls; break; }  // alphabetically first usable level
        if (reference.empty() && !class_counts.empty()) reference = class_counts.begin()->first;

        statkit::DesignBuilder d(rows.size());
        d.add_intercept();
        std::vector<double> female_col(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) female_col[i] = rows[i].female ? 1.0 : 0.0;
        d.add_numeric("gender[T.female]", std::move(female_col));

        std::vector<std::string> class_col(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& cls = rows[i].cls;
            const bool rare = class_counts[cls] < 10;
            if (rare && cls != reference)
                out.warnings.push_back("class '" + cls + "' has fewer than 10 rows; folded into '" +
                                       reference + "'");
            class_col[i] = rare ? reference : cls;
        }
        d.add_categorical("class", class_col, reference);

        std::vector<double> century_col(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) century_col[i] = rows[i].century;
        const bool century_varies =
            !century_col.empty() &&
            std::any_of(century_col.begin(), century_col.end(),
                        [&](double v) { return v != century_col.front(); });
        if (century_varies)
            d.add_numeric("century", std::move(century_col));
        else
            out.warnings.push_back("century is constant over qualifying rows; dropped");

        Eigen::VectorXd y(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) y[static_cast<Eigen::Index>(i)] = rows[i].r;
        return statkit::ols_fit(y, d.matrix(), d.names());
    };

    out.positive = fit_for(Polarity::positive);
    out.negative = fit_for(Polarity::negative);
    std::sort(out.warnings.begin(), out.warnings.end());
    out.warnings.erase(std::unique(out.warnings.begin(), out.warnings.end()), out.warnings.end());
    return out;
}

}  // namespace bioaudit::lingbias
