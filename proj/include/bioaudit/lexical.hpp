#pragma once

// Topical-bias audit: unigram/bigram extraction from summary overviews,
// per-gender PMI ranking, and topic-lexicon categorization of the top
// terms. Bigrams never cross sentence boundaries. Terms seen in only one
// gender are excluded (their PMI for the other gender is undefined), as
// are terms below the document-fraction floor in both genders.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "bioaudit/corpus.hpp"
#include "bioaudit/csv.hpp"
#include "bioaudit/statkit.hpp"
#include "bioaudit/tokenize.hpp"

namespace bioaudit::lexical {

enum class Topic : std::uint8_t { family, gender, relationship, other };

inline const char* to_string(Topic t) {
    switch (t) {
        case Topic::family: return "family";
        case Topic::gender: return "gender";
        case Topic::relationship: return "relationship";
        default: return "other";
    }
}

class TopicLexicon {
public:
    void add(const std::string& term, Topic topic) {
        if (topic == Topic::other) return;
        auto [it, inserted] = terms_.emplace(ascii_lower(term), topic);
        if (!inserted && it->second != topic)
            throw std::invalid_argument("term '" + term + "' mapped to two categories");
    }

    // Whole-term match wins; otherwise the first token with a mapping
    // assigns the category (covers bigrams like "her husband").
    Topic categorize(const std::string& term) const {
        if (auto it = terms_.find(term); it != terms_.end()) return it->second;
        for (const auto& tok : split_on(term, ' '))
            if (auto it = terms_.find(tok); it != terms_.end()) return it->second;
        return Topic::other;
    }

    std::size_t size() const { return terms_.size(); }

    // `term<TAB>category` lines; '#' comments allowed.
    static TopicLexicon from_file(const std::string& path) {
        TopicLexicon lex;
        const std::string content = read_file(path);
        std::size_t start = 0, line_no = 0;
        while (start < content.size()) {
            std::size_t end = content.find('\n', start);
            if (end == std::string::npos) end = content.size();
            std::string line(chomp(std::string_view(content).substr(start, end - start)));
            start = end + 1;
            ++line_no;
            if (line.empty() || line[0] == '#') continue;
            const auto fields = split_on(line, '\t');
            if (fields.size() != 2)
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": expected term<TAB>category");
            Topic topic;
            if (fields[1] == "family") topic = Topic::family;
            else if (fields[1] == "gender") topic = Topic::gender;
            else if (fields[1] == "relationship") topic = Topic::relationship;
            else
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": unknown category '" + fields[1] + "'");
            lex.add(fields[0], topic);
        }
        return lex;
    }

    static TopicLexicon bundled_default() {
        TopicLexicon lex;
        for (const char* t : {"man", "women", "mr", "mrs", "lady", "gentleman", "gay", "lesbian"})
            lex.add(t, Topic::gender);
        for (const char* t : {"married", "divorced", "couple", "husband", "wife"})
            lex.add(t, Topic::relationship);
        for (const char* t : {"kids", "children", "mother", "grandmother"})
            lex.add(t, Topic::family);
        return lex;
    }

private:
    std::unordered_map<std::string, Topic> terms_;
};

struct NgramStats {
    std::string ngram;        // lowercased; bigrams joined with one space
    std::int64_t count_male = 0;
    std::int64_t count_female = 0;
    std::int64_t docs_male = 0;
    std::int64_t docs_female = 0;
    double doc_frac_male = 0.0;
    double doc_frac_female = 0.0;
};

struct NgramCollection {
    std::vector<NgramStats> terms;  // sorted by ngram for determinism
    std::int64_t docs_male = 0;
    std::int64_t docs_female = 0;
    std::int64_t mass_male = 0;    // total n-gram occurrences, n in {1,2}
    std::int64_t mass_female = 0;
};

inline NgramCollection extract_ngrams(const corpus::CohortView& view) {
    struct Counts {
        std::int64_t c_m = 0, c_f = 0, d_m = 0, d_f = 0;
    };
    std::unordered_map<std::string, Counts> counts;
    NgramCollection out;

    std::unordered_map<std::string, std::int64_t> doc_counts;
    for (std::size_t r = 0; r < view.size(); ++r) {
        const auto& bio = view[r];
        if (bio.sentences.empty()) continue;
        const bool female = bio.gender == corpus::Gender::female;
        (female ? out.docs_female : out.docs_male) += 1;

        doc_counts.clear();
        for (const auto& sentence : bio.sentences) {
            std::vector<std::string> lower;
            lower.reserve(sentence.size());
            for (const auto& tok : sentence) lower.push_back(ascii_lower(tok.surface));
            for (std::size_t i = 0; i < lower.size(); ++i) {
                ++doc_counts[lower[i]];
                if (i + 1 < lower.size()) ++doc_counts[lower[i] + " " + lower[i + 1]];
            }
        }
        for (const auto& [term, c] : doc_counts) {
            auto& cell = counts[term];
            if (female) {
                cell.c_f += c;
                cell.d_f += 1;
                out.mass_female += c;
            } else {
                cell.c_m += c;
                cell.d_m += 1;
                out.mass_male += c;
            }
        }
    }

    out.terms.reserve(counts.size());
    for (auto& [term, c] : counts) {
        NgramStats s;
        s.ngram = term;
        s.count_male = c.c_m;
        s.count_female = c.c_f;
        s.docs_male = c.d_m;
        s.docs_female = c.d_f;
        s.doc_frac_male = out.docs_male > 0 ? static_cast<double>(c.d_m) / out.docs_male : 0.0;
        s.doc_frac_female =
            out.docs_female > 0 ? static_cast<double>(c.d_f) / out.docs_female : 0.0;
        out.terms.push_back(std::move(s));
    }
    std::sort(out.terms.begin(), out.terms.end(),
              [](const NgramStats& a, const NgramStats& b) { return a.ngram < b.ngram; });
    return out;
}

// P(gender) and P(term) estimators behind the ranking.
//   document: probabilities from biography counts containing the term
//   token:    probabilities from pooled n-gram occurrence mass
enum class PmiMode : std::uint8_t { document, token };

inline const char* to_string(PmiMode m) { return m == PmiMode::token ? "token" : "document"; }

struct RankedTerm {
    std::string term;
    double pmi = 0.0;
    std::int64_t count_male = 0;
    std::int64_t count_female = 0;
};

struct RankedList {
    corpus::Gender gender = corpus::Gender::male;
    std::vector<RankedTerm> terms;
    std::vector<std::string> warnings;
};

inline RankedList rank_by_pmi(const NgramCollection& stats, corpus::Gender gender,
                              double min_doc_frac = 0.01, std::size_t top_k = 200,
                              PmiMode mode = PmiMode::document) {
    RankedList out;
    out.gender = gender;
    const bool female = gender == corpus::Gender::female;
    for (const auto& s : stats.terms) {
        if (s.count_male == 0 || s.count_female == 0) continue;  // single-gender term
        if (s.doc_frac_male < min_doc_frac && s.doc_frac_female < min_doc_frac) continue;
        RankedTerm t;
        t.term = s.ngram;
        t.count_male = s.count_male;
        t.count_female = s.count_female;
        if (mode == PmiMode::document) {
            const double joint = static_cast<double>(female ? s.docs_female : s.docs_male);
            const double term_total = static_cast<double>(s.docs_male + s.docs_female);
            const double gender_total =
                static_cast<double>(female ? stats.docs_female : stats.docs_male);
            const double total = static_cast<double>(stats.docs_male + stats.docs_female);
            if (joint == 0.0) continue;
            t.pmi = statkit::pmi(joint, term_total, gender_total, total);
        } else {
            const double joint = static_cast<double>(female ? s.count_female : s.count_male);
            const double term_total = static_cast<double>(s.count_male + s.count_female);
            const double gender_total =
                static_cast<double>(female ? stats.mass_female : stats.mass_male);
            const double total = static_cast<double>(stats.mass_male + stats.mass_female);
            t.pmi = statkit::pmi(joint, term_total, gender_total, total);
        }
        out.terms.push_back(std::move(t));
    }
    std::sort(out.terms.begin(), out.terms.end(), [](const RankedTerm& a, const RankedTerm& b) {
        if (a.pmi != b.pmi) return a.pmi > b.pmi;
        return a.term < b.term;
    });
    if (out.terms.size() < top_k)
        out.warnings.push_back("only " + std::to_string(out.terms.size()) +
                               " eligible terms (requested " + std::to_string(top_k) + ")");
    else
        out.terms.resize(top_k);
    return out;
}

struct CategoryRow {
    corpus::Gender gender = corpus::Gender::male;
    // family, gender, relationship, other
    std::array<std::int64_t, 4> counts{0, 0, 0, 0};
    std::array<double, 4> proportions{0, 0, 0, 0};  // percent of the list
};

struct CategoryTable {
    CategoryRow men;
    CategoryRow women;
    statkit::TestResult test;
};

inline CategoryRow tally_categories(const RankedList& list, const TopicLexicon& lexicon) {
    CategoryRow row;
    row.gender = list.gender;
    for (const auto& t : list.terms)
        ++row.counts[static_cast<std::size_t>(lexicon.categorize(t.term))];
    const double n = static_cast<double>(list.terms.size());
    if (n > 0)
        for (std::size_t i = 0; i < 4; ++i)
            row.proportions[i] = 100.0 * static_cast<double>(row.counts[i]) / n;
    return row;
}

inline CategoryTable categorize_top_terms(const RankedList& men, const RankedList& women,
                                          const TopicLexicon& lexicon) {
    if (men.terms.empty() || women.terms.empty())
        throw std::invalid_argument("categorize_top_terms: both ranked lists must be non-empty");
    CategoryTable out;
    out.men = tally_categories(men, lexicon);
    out.women = tally_categories(women, lexicon);

    // Degenerate but legal case: every term lands in "other" for both
    // genders. The categories carry no information; report a zero test.
    statkit::ContingencyTable table;
    table.row_labels = {"men", "women"};
    std::vector<double> row_m, row_f;
    for (std::size_t i = 0; i < 4; ++i) {
        if (out.men.counts[i] + out.women.counts[i] == 0) continue;
        table.col_labels.push_back(to_string(static_cast<Topic>(i)));
        row_m.push_back(static_cast<double>(out.men.counts[i]));
        row_f.push_back(static_cast<double>(out.women.counts[i]));
    }
    if (table.col_labels.size() < 2) {
        out.test.statistic = 0.0;
        out.test.dof = 0;
        out.test.p_value = 1.0;
        out.test.effect_size_w = 0.0;
        return out;
    }
    table.rows = {row_m, row_f};
    out.test = statkit::chi_square_independence(table);
    return out;
}

// CSV artifact: term,gender,pmi,category,count_m,count_f sorted by
// descending PMI (term, then gender, breaks ties).
inline void emit_term_table(const RankedList& men, const RankedList& women,
                            const TopicLexicon& lexicon, std::ostream& out) {
    struct Row {
        const RankedTerm* t;
        const char* gender;
    };
    std::vector<Row> rows;
    for (const auto& t : men.terms) rows.push_back({&t, "male"});
    for (const auto& t : women.terms) rows.push_back({&t, "female"});
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.t->pmi != b.t->pmi) return a.t->pmi > b.t->pmi;
        if (a.t->term != b.t->term) return a.t->term < b.t->term;
        return std::string_view(a.gender) > std::string_view(b.gender);  // female first
    });
    out << "term,gender,pmi,category,count_m,count_f\n";
    for (const auto& row : rows)
        out << row.t->term << ',' << row.gender << ',' << format_double(row.t->pmi) << ','
            << to_string(lexicon.categorize(row.t->term)) << ',' << row.t->count_male << ','
            << row.t->count_female << '\n';
}

}  // namespace bioaudit::lexical
