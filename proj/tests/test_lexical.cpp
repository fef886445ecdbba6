#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <sstream>

#include "bioaudit/lexical.hpp"
#include "support/fixtures.hpp"

using namespace bioaudit;
using namespace fixtures;
using Catch::Approx;

namespace {

// Corpus with controlled summaries; returns (corpus, view over everything).
struct LexFixture {
    TempDir dir{"lexical"};
    corpus::Corpus c;

    LexFixture(std::initializer_list<std::pair<std::string, std::string>> rows)
        : LexFixture(std::vector<std::pair<std::string, std::string>>(rows)) {}

    explicit LexFixture(const std::vector<std::pair<std::string, std::string>>& gender_summary) {
        std::string content;
        int i = 0;
        for (const auto& [gender, summary] : gender_summary) {
            content += bio_line("bio" + std::to_string(i), gender, 1900, "Person", 1, summary);
            content += "\n";
            ++i;
        }
        const std::string path = dir.write("bios.jsonl", content);
        auto [loaded, diag] = corpus::load_corpus(path);
        c = std::move(loaded);
    }

    corpus::CohortView view() {
        corpus::Cohort all;
        return corpus::split_cohort(c, all);
    }
};

}  // namespace

TEST_CASE("extract_ngrams: tokenizer contract on a single summary") {
    LexFixture fx({{"female", "She married John."}});
    auto stats = lexical::extract_ngrams(fx.view());
    std::map<std::string, lexical::NgramStats> by_term;
    for (const auto& s : stats.terms) by_term[s.ngram] = s;
    CHECK(by_term.count("she"));
    CHECK(by_term.count("married"));
    CHECK(by_term.count("john"));
    CHECK(by_term.count("she married"));
    CHECK(by_term.count("married john"));
    CHECK(by_term.size() == 5);
}

TEST_CASE("extract_ngrams: bigrams do not cross sentence boundaries") {
    LexFixture fx({{"male", "He won. Late he lost."}});
    auto stats = lexical::extract_ngrams(fx.view());
    for (const auto& s : stats.terms) CHECK(s.ngram != "won late");
}

TEST_CASE("extract_ngrams: document fractions") {
    std::vector<std::pair<std::string, std::string>> rows;
    for (int i = 0; i < 3; ++i) rows.push_back({"female", "actress on stage"});
    for (int i = 0; i < 7; ++i) rows.push_back({"female", "writer of books"});
    rows.push_back({"male", "actor actress friend"});
    LexFixture fx(rows);
    auto stats = lexical::extract_ngrams(fx.view());
    for (const auto& s : stats.terms)
        if (s.ngram == "actress") {
            CHECK(s.doc_frac_female == Approx(0.3));
            CHECK(s.doc_frac_male == Approx(1.0));
        }
}

TEST_CASE("extract_ngrams: counts match a brute-force recount on 20 documents") {
    std::vector<std::pair<std::string, std::string>> rows;
    const char* words[] = {"apple", "banana", "cherry", "date"};
    for (int i = 0; i < 20; ++i) {
        std::string summary;
        for (int j = 0; j < 6; ++j) {
            if (j) summary += " ";
            summary += words[(i * 7 + j * 3) % 4];
        }
        rows.push_back({i % 3 == 0 ? "female" : "male", summary});
    }
    LexFixture fx(rows);
    auto stats = lexical::extract_ngrams(fx.view());

    // Independent recount.
    std::map<std::string, std::pair<long, long>> expected;  // term -> (male, female)
    for (const auto& [gender, summary] : rows) {
        std::vector<std::string> toks;
        std::string cur;
        for (char ch : summary + " ") {
            if (ch == ' ') {
                if (!cur.empty()) toks.push_back(cur);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        const bool female = gender == "female";
        for (std::size_t i = 0; i < toks.size(); ++i) {
            auto& cell = expected[toks[i]];
            (female ? cell.second : cell.first) += 1;
            if (i + 1 < toks.size()) {
                auto& bcell = expected[toks[i] + " " + toks[i + 1]];
                (female ? bcell.second : bcell.first) += 1;
            }
        }
    }
    REQUIRE(stats.terms.size() == expected.size());
    for (const auto& s : stats.terms) {
        CHECK(s.count_male == expected[s.ngram].first);
        CHECK(s.count_female == expected[s.ngram].second);
    }
}

TEST_CASE("rank_by_pmi: single-gender terms are excluded") {
    std::vector<std::pair<std::string, std::string>> rows;
    for (int i = 0; i < 10; ++i) rows.push_back({"male", "soldier battle shared"});
    for (int i = 0; i < 10; ++i) rows.push_back({"female", "painter canvas shared"});
    LexFixture fx(rows);
    auto stats = lexical::extract_ngrams(fx.view());
    auto ranked = lexical::rank_by_pmi(stats, corpus::Gender::female, 0.01, 200);
    for (const auto& t : ranked.terms) {
        CHECK(t.term != "painter");  // only in female bios
        CHECK(t.term != "soldier");
        CHECK(t.count_male > 0);
        CHECK(t.count_female > 0);
    }
}

TEST_CASE("rank_by_pmi: balanced terms trail positively associated terms") {
    std::vector<std::pair<std::string, std::string>> rows;
    // "actress" appears in 10 of 10 female and 1 of 10 male docs; "common"
    // appears everywhere.
    for (int i = 0; i < 10; ++i) rows.push_back({"female", "actress common"});
    rows.push_back({"male", "actress common"});
    for (int i = 0; i < 9; ++i) rows.push_back({"male", "other common"});
    LexFixture fx(rows);
    auto stats = lexical::extract_ngrams(fx.view());
    auto ranked = lexical::rank_by_pmi(stats, corpus::Gender::female, 0.01, 200);
    REQUIRE(!ranked.terms.empty());
    CHECK(ranked.terms[0].term == "actress");

    // Brute-force document-mode PMI for the top term.
    const double n_docs = 20, docs_f = 10, actress_docs = 11, actress_f = 10;
    const double expected =
        std::log2((actress_f / n_docs) / ((actress_docs / n_docs) * (docs_f / n_docs)));
    CHECK(ranked.terms[0].pmi == Approx(expected).margin(1e-12));

    double common_pmi = 0.0;
    for (const auto& t : ranked.terms)
        if (t.term == "common") common_pmi = t.pmi;
    CHECK(common_pmi == Approx(0.0).margin(1e-12));
    CHECK(ranked.terms[0].pmi > common_pmi);
}

TEST_CASE("rank_by_pmi: document-fraction floor excludes rare terms") {
    std::vector<std::pair<std::string, std::string>> rows;
    for (int i = 0; i < 200; ++i) rows.push_back({i % 2 ? "male" : "female", "ubiquitous words"});
    rows.push_back({"male", "rare ubiquitous"});
    rows.push_back({"female", "rare ubiquitous"});
    LexFixture fx(rows);
    auto stats = lexical::extract_ngrams(fx.view());
    auto strict = lexical::rank_by_pmi(stats, corpus::Gender::female, 0.015, 200);
    for (const auto& t : strict.terms) CHECK(t.term.find("rare") == std::string::npos);
    auto loose = lexical::rank_by_pmi(stats, corpus::Gender::female, 0.001, 200);
    bool found = false;
    for (const auto& t : loose.terms)
        if (t.term == "rare") found = true;
    CHECK(found);
    // Raising the floor never adds terms.
    CHECK(strict.terms.size() <= loose.terms.size());
}

TEST_CASE("rank_by_pmi: ranking is invariant under the log base") {
    std::vector<std::pair<std::string, std::string>> rows;
    const char* vocab[] = {"alpha", "beta", "gamma", "delta", "epsilon", "zeta"};
    for (int i = 0; i < 60; ++i) {
        std::string summary;
        for (int j = 0; j < 3; ++j) {
            if (j) summary += " ";
            summary += vocab[(i + j * (1 + i % 5)) % 6];
        }
        rows.push_back({i % 3 == 0 ? "female" : "male", summary});
    }
    LexFixture fx(rows);
    auto stats = lexical::extract_ngrams(fx.view());
    auto ranked = lexical::rank_by_pmi(stats, corpus::Gender::female, 0.01, 1000);

    // Natural-log recomputation preserves the ordering.
    auto nat_pmi = [&](const lexical::NgramStats& s) {
        const double joint = s.docs_female, x = s.docs_male + s.docs_female;
        const double y = stats.docs_female, total = stats.docs_male + stats.docs_female;
        return std::log((joint * total) / (x * y));
    };
    std::map<std::string, double> nat;
    for (const auto& s : stats.terms)
        if (s.count_male > 0 && s.count_female > 0) nat[s.ngram] = nat_pmi(s);
    for (std::size_t i = 1; i < ranked.terms.size(); ++i)
        CHECK(nat[ranked.terms[i - 1].term] >= nat[ranked.terms[i].term] - 1e-12);
}

TEST_CASE("rank_by_pmi: token mode uses occurrence mass") {
    std::vector<std::pair<std::string, std::string>> rows;
    rows.push_back({"female", "star star star film"});
    rows.push_back({"male", "star film film film"});
    LexFixture fx(rows);
    auto stats = lexical::extract_ngrams(fx.view());
    auto ranked =
        lexical::rank_by_pmi(stats, corpus::Gender::female, 0.01, 10, lexical::PmiMode::token);
    REQUIRE(!ranked.terms.empty());
    // mass per gender: each doc has 4 unigrams + 3 bigrams = 7.
    // P(star|f-mass) = 3/14 vs independent (4/14)(7/14) -> positive PMI.
    for (const auto& t : ranked.terms)
        if (t.term == "star")
            CHECK(t.pmi == Approx(std::log2((3.0 / 14.0) / ((4.0 / 14.0) * (7.0 / 14.0)))));
}

TEST_CASE("categorize_top_terms: manual tally on a 20-term fixture") {
    lexical::RankedList men, women;
    men.gender = corpus::Gender::male;
    women.gender = corpus::Gender::female;
    auto mk = [](const std::string& term) {
        lexical::RankedTerm t;
        t.term = term;
        t.pmi = 1.0;
        t.count_male = 1;
        t.count_female = 1;
        return t;
    };
    for (const char* t : {"served", "elected", "politician", "general", "league",
                          "football", "played", "army", "navy", "officer"})
        men.terms.push_back(mk(t));
    for (const char* t : {"her husband", "women", "actress", "married", "mother",
                          "children", "lady", "singer", "dancer", "novelist"})
        women.terms.push_back(mk(t));

    auto lex = lexical::TopicLexicon::bundled_default();
    auto table = lexical::categorize_top_terms(men, women, lex);
    // women: husband+married -> relationship(2), mother+children -> family(2),
    // women's+lady -> gender(2), rest other(4).
    CHECK(table.women.counts[0] == 2);
    CHECK(table.women.counts[1] == 2);
    CHECK(table.women.counts[2] == 2);
    CHECK(table.women.counts[3] == 4);
    CHECK(table.men.counts[3] == 10);
    CHECK(table.women.proportions[0] == Approx(20.0));
}

TEST_CASE("categorize_top_terms: all-other lists give a zero statistic") {
    lexical::RankedList men, women;
    men.gender = corpus::Gender::male;
    women.gender = corpus::Gender::female;
    lexical::RankedTerm t;
    t.term = "neutral";
    t.pmi = 0.5;
    men.terms.push_back(t);
    women.terms.push_back(t);
    auto table =
        lexical::categorize_top_terms(men, women, lexical::TopicLexicon::bundled_default());
    CHECK(table.test.statistic == 0.0);
    CHECK(table.men.proportions[3] == Approx(100.0));
    CHECK(table.women.proportions[3] == Approx(100.0));
}

TEST_CASE("topic lexicon: whole-term match beats token match; file round trip") {
    TempDir dir("lexicon");
    const std::string path =
        dir.write("topics.tsv", "# comment\nher husband\trelationship\nhusband\tfamily\n");
    CHECK_THROWS(lexical::TopicLexicon::from_file(dir.write("bad.tsv", "term\tnope\n")));
    // Conflicting duplicate category is an error too.
    CHECK_THROWS(lexical::TopicLexicon::from_file(
        dir.write("dup.tsv", "wife\trelationship\nwife\tfamily\n")));
    auto lex = lexical::TopicLexicon::from_file(path);
    CHECK(lex.categorize("her husband") == lexical::Topic::relationship);
    CHECK(lex.categorize("husband") == lexical::Topic::family);
    CHECK(lex.categorize("the husband") == lexical::Topic::family);
    CHECK(lex.categorize("unknown") == lexical::Topic::other);
}

TEST_CASE("emit_term_table: CSV rows sorted by PMI, values round-trip") {
    lexical::RankedList men, women;
    men.gender = corpus::Gender::male;
    women.gender = corpus::Gender::female;
    auto mk = [](const std::string& term, double pmi) {
        lexical::RankedTerm t;
        t.term = term;
        t.pmi = pmi;
        t.count_male = 3;
        t.count_female = 4;
        return t;
    };
    men.terms = {mk("served", 0.75), mk("played", 0.25)};
    women.terms = {mk("actress", 1.0 / 3.0)};
    std::ostringstream out;
    lexical::emit_term_table(men, women, lexical::TopicLexicon::bundled_default(), out);

    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "term,gender,pmi,category,count_m,count_f");
    std::getline(in, line);
    CHECK(line.substr(0, 7) == "served,");
    std::getline(in, line);
    REQUIRE(line.substr(0, 8) == "actress,");
    const auto fields = split_on(line, ',');
    CHECK(std::stod(fields[2]) == 1.0 / 3.0);  // exact round trip
    std::getline(in, line);
    CHECK(line.substr(0, 7) == "played,");
}

TEST_CASE("emit_term_table: empty lists produce a header-only file") {
    lexical::RankedList men, women;
    std::ostringstream out;
    lexical::emit_term_table(men, women, lexical::TopicLexicon::bundled_default(), out);
    CHECK(out.str() == "term,gender,pmi,category,count_m,count_f\n");
}

TEST_CASE("tokenization determinism: identical summary, identical multiset") {
    LexFixture fx({{"female", "A b c. A b c."}, {"male", "A b c. A b c."}});
    auto stats = lexical::extract_ngrams(fx.view());
    for (const auto& s : stats.terms) CHECK(s.count_male == s.count_female);
}
