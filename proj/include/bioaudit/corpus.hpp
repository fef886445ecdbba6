#pragma once

// Biography corpus: loading, validation, indexing, cohort views.
//
// Input is JSON-lines (one biography per line) plus an optional TSV edge
// list between biography ids. Records missing a usable gender, violating
// the year ordering, or carrying a non-positive edition count are rejected
// with per-reason counts in the load diagnostics. The corpus is immutable
// after load and safe for concurrent reads.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "bioaudit/csv.hpp"
#include "bioaudit/rng.hpp"
#include "bioaudit/tokenize.hpp"

namespace bioaudit::corpus {

enum class Gender : std::uint8_t { male, female };

inline const char* to_string(Gender g) { return g == Gender::male ? "male" : "female"; }

struct Token {
    std::string surface;
    std::string pos;  // empty when the corpus is untagged
};

struct Biography {
    std::string id;
    std::string name;
    Gender gender = Gender::male;
    std::optional<int> birth_year;
    std::optional<int> death_year;
    std::string ontology_class;  // "Person" fallback
    int edition_count = 1;
    std::vector<std::string> attributes;        // sorted, unique
    std::vector<std::vector<Token>> sentences;  // summary, sentence-segmented
    std::size_t token_count = 0;
};

struct Edge {
    std::uint32_t source = 0;
    std::uint32_t target = 0;
};

struct LoadDiagnostics {
    std::map<std::string, std::size_t> rejected;  // reason -> count
    std::map<std::string, std::size_t> edge_issues;
    std::vector<std::string> warnings;

    std::size_t rejected_count(const std::string& reason) const {
        auto it = rejected.find(reason);
        return it == rejected.end() ? 0 : it->second;
    }
    std::size_t edge_count(const std::string& reason) const {
        auto it = edge_issues.find(reason);
        return it == edge_issues.end() ? 0 : it->second;
    }
};

struct SchemaOptions {
    bool skip_duplicates = false;  // keep first record instead of failing
};

class Corpus {
public:
    std::vector<Biography> records;
    std::vector<Edge> edges;  // first-occurrence order, deduplicated
    std::uint64_t content_hash = 0;

    std::optional<std::uint32_t> index_of(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    void rebuild_index() {
        index_.clear();
        index_.reserve(records.size());
        for (std::uint32_t i = 0; i < records.size(); ++i) index_.emplace(records[i].id, i);
    }

private:
    std::unordered_map<std::string, std::uint32_t> index_;
};

// --- cohorts ---------------------------------------------------------------

enum class Era : std::uint8_t { all, pre1900, post1900 };

inline const char* to_string(Era e) {
    switch (e) {
        case Era::pre1900: return "pre1900";
        case Era::post1900: return "post1900";
        default: return "all";
    }
}

struct Cohort {
    Era era = Era::all;
    int birth_year_min = 1;
    int birth_year_max = 2015;
    // Lexical/metadata/network audits may keep undated records (era=all only).
    bool include_undated = false;

    bool contains(const Biography& b) const {
        if (!b.birth_year) return era == Era::all && include_undated;
        const int y = *b.birth_year;
        if (y < birth_year_min || y > birth_year_max) return false;
        switch (era) {
            case Era::pre1900: return y < 1900;
            case Era::post1900: return y >= 1900;
            default: return true;
        }
    }
};

class CohortView {
public:
    CohortView(const Corpus& corpus, std::vector<std::uint32_t> idx, Cohort cohort)
        : corpus_(&corpus), indices_(std::move(idx)), cohort_(cohort) {}

    const Corpus& corpus() const { return *corpus_; }
    const Cohort& cohort() const { return cohort_; }
    const std::vector<std::uint32_t>& indices() const { return indices_; }
    std::size_t size() const { return indices_.size(); }
    bool empty() const { return indices_.empty(); }

    const Biography& operator[](std::size_t i) const { return corpus_->records[indices_[i]]; }

    std::size_t women() const {
        std::size_t w = 0;
        for (auto i : indices_)
            if (corpus_->records[i].gender == Gender::female) ++w;
        return w;
    }
    std::size_t men() const { return size() - women(); }
    double women_fraction() const {
        return empty() ? 0.0 : static_cast<double>(women()) / static_cast<double>(size());
    }

private:
    const Corpus* corpus_;
    std::vector<std::uint32_t> indices_;
    Cohort cohort_;
};

inline CohortView split_cohort(const Corpus& corpus, const Cohort& cohort) {
    std::vector<std::uint32_t> idx;
    for (std::uint32_t i = 0; i < corpus.records.size(); ++i)
        if (cohort.contains(corpus.records[i])) idx.push_back(i);
    return CohortView(corpus, std::move(idx), cohort);
}

// --- summaries --------------------------------------------------------------

struct CohortSummary {
    std::string era;
    std::size_t n = 0;
    std::size_t n_women = 0;
    double women_fraction = 0.0;
};

struct CorpusSummary {
    std::vector<CohortSummary> cohorts;  // all, pre1900, post1900
    // birth year -> (men, women), dated in-bounds records only
    std::map<int, std::pair<std::size_t, std::size_t>> birth_histogram;
};

inline CorpusSummary corpus_summary(const Corpus& corpus) {
    CorpusSummary out;
    for (Era era : {Era::all, Era::pre1900, Era::post1900}) {
        Cohort c;
        c.era = era;
        auto view = split_cohort(corpus, c);
        CohortSummary s;
        s.era = to_string(era);
        s.n = view.size();
        s.n_women = view.women();
        s.women_fraction = view.women_fraction();
        out.cohorts.push_back(s);
        if (era == Era::all) {
            for (std::size_t i = 0; i < view.size(); ++i) {
                const auto& b = view[i];
                auto& cell = out.birth_histogram[*b.birth_year];
                if (b.gender == Gender::female) ++cell.second; else ++cell.first;
            }
        }
    }
    return out;
}

// --- loading ----------------------------------------------------------------

namespace detail {

inline void parse_summary_string(Biography& bio, const std::string& text) {
    for (auto& sent : tokenize_sentences(text)) {
        std::vector<Token> tokens;
        tokens.reserve(sent.size());
        for (auto& surface : sent) tokens.push_back({std::move(surface), ""});
        bio.token_count += tokens.size();
        bio.sentences.push_back(std::move(tokens));
    }
}

inline bool is_sentence_final(const Token& t) {
    return t.pos == "." || t.surface == "." || t.surface == "!" || t.surface == "?";
}

// Pre-tagged summaries arrive as a flat [token, pos] stream; sentence-final
// punctuation tokens delimit sentences and are dropped.
inline void parse_summary_tagged(Biography& bio, const nlohmann::json& arr) {
    std::vector<Token> current;
    for (const auto& pair : arr) {
        if (!pair.is_array() || pair.size() < 1 || !pair[0].is_string())
            throw std::invalid_argument("summary_tagged entries must be [token, pos] pairs");
        Token t;
        t.surface = pair[0].get<std::string>();
        if (pair.size() > 1 && pair[1].is_string()) t.pos = pair[1].get<std::string>();
        if (is_sentence_final(t)) {
            if (!current.empty()) {
                bio.token_count += current.size();
                bio.sentences.push_back(std::move(current));
                current.clear();
            }
            continue;
        }
        current.push_back(std::move(t));
    }
    if (!current.empty()) {
        bio.token_count += current.size();
        bio.sentences.push_back(std::move(current));
    }
}

inline void check_sidecar_manifest(const std::string& path) {
    const std::string sidecar = path + ".manifest.json";
    if (!std::filesystem::exists(sidecar)) return;
    nlohmann::json manifest = nlohmann::json::parse(read_file(sidecar));
    const int version = manifest.value("schema_version", -1);
    if (version != 1)
        throw std::runtime_error(sidecar + ": unsupported schema_version " +
                                 std::to_string(version) + " (expected 1)");
}

inline const std::unordered_set<std::string>& known_keys() {
    static const std::unordered_set<std::string> keys{
        "id",         "name",      "gender",     "birth_year", "death_year",
        "class",      "edition_count", "attributes", "summary", "summary_tagged"};
    return keys;
}

}  // namespace detail

inline void load_links(Corpus& corpus, const std::string& links_path, LoadDiagnostics& diag);

// Loads the JSON-lines biography file (and optionally the TSV link file).
// Structurally malformed lines are fatal; schema-valid records that violate
// an invariant are rejected and counted.
inline std::pair<Corpus, LoadDiagnostics> load_corpus(
    const std::string& biographies_path,
    const std::optional<std::string>& links_path = std::nullopt,
    const SchemaOptions& options = {}) {
    Corpus corpus;
    LoadDiagnostics diag;

    detail::check_sidecar_manifest(biographies_path);
    const std::string content = read_file(biographies_path);
    corpus.content_hash = fnv1a64(content.data(), content.size());

    std::unordered_map<std::string, std::uint32_t> seen;
    std::size_t line_no = 0;
    std::size_t start = 0;
    std::size_t unknown_keys = 0;
    while (start < content.size()) {
        std::size_t end = content.find('\n', start);
        if (end == std::string::npos) end = content.size();
        std::string_view line = chomp(std::string_view(content).substr(start, end - start));
        start = end + 1;
        ++line_no;
        if (line.empty()) continue;

        nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object())
            throw std::runtime_error(biographies_path + ":" + std::to_string(line_no) +
                                     ": malformed JSON record");
        for (auto it = rec.begin(); it != rec.end(); ++it)
            if (!detail::known_keys().count(it.key())) ++unknown_keys;

        if (!rec.contains("id") || !rec["id"].is_string())
            throw std::runtime_error(biographies_path + ":" + std::to_string(line_no) +
                                     ": record without string id");

        Biography bio;
        bio.id = rec["id"].get<std::string>();
        bio.name = rec.value("name", bio.id);

        const std::string gender = rec.contains("gender") && rec["gender"].is_string()
                                       ? rec["gender"].get<std::string>()
                                       : "";
        if (gender == "male") {
            bio.gender = Gender::male;
        } else if (gender == "female") {
            bio.gender = Gender::female;
        } else {
            ++diag.rejected["missing_gender"];
            continue;
        }

        if (rec.contains("birth_year") && rec["birth_year"].is_number_integer())
            bio.birth_year = rec["birth_year"].get<int>();
        if (rec.contains("death_year") && rec["death_year"].is_number_integer())
            bio.death_year = rec["death_year"].get<int>();
        if (bio.birth_year && bio.death_year && *bio.birth_year > *bio.death_year) {
            ++diag.rejected["bad_year"];
            continue;
        }

        bio.ontology_class = rec.value("class", std::string("Person"));
        if (bio.ontology_class.empty()) bio.ontology_class = "Person";

        bio.edition_count = rec.value("edition_count", 0);
        if (bio.edition_count < 1) {
            ++diag.rejected["bad_edition_count"];
            continue;
        }

        if (rec.contains("attributes") && rec["attributes"].is_array()) {
            for (const auto& a : rec["attributes"])
                if (a.is_string()) bio.attributes.push_back(a.get<std::string>());
            std::sort(bio.attributes.begin(), bio.attributes.end());
            bio.attributes.erase(std::unique(bio.attributes.begin(), bio.attributes.end()),
                                 bio.attributes.end());
        }

        if (rec.contains("summary_tagged") && rec["summary_tagged"].is_array())
            detail::parse_summary_tagged(bio, rec["summary_tagged"]);
        else if (rec.contains("summary") && rec["summary"].is_string())
            detail::parse_summary_string(bio, rec["summary"].get<std::string>());

        auto [it, inserted] = seen.emplace(bio.id, static_cast<std::uint32_t>(corpus.records.size()));
        if (!inserted) {
            ++diag.rejected["duplicate_id"];
            if (!options.skip_duplicates)
                throw std::runtime_error(biographies_path + ":" + std::to_string(line_no) +
                                         ": duplicate id '" + bio.id +
                                         "' (pass skip_duplicates to keep the first record)");
            continue;
        }
        corpus.records.push_back(std::move(bio));
    }
    if (unknown_keys > 0)
        diag.warnings.push_back("ignored " + std::to_string(unknown_keys) +
                                " unknown key(s) in biography records");
    corpus.rebuild_index();

    if (links_path) load_links(corpus, *links_path, diag);
    return {std::move(corpus), std::move(diag)};
}

// TSV edge list: a required first-line pragma `#schema_version=1`, then
// `source_id<TAB>target_id` rows; further `#` lines are comments.
inline void load_links(Corpus& corpus, const std::string& links_path, LoadDiagnostics& diag) {
    const std::string content = read_file(links_path);
    corpus.content_hash = fnv1a64(content.data(), content.size(), corpus.content_hash);

    static const std::regex pragma_re(R"(^#\s*schema_version\s*=\s*(\d+)\s*$)");

    std::unordered_set<std::uint64_t> seen_edges;
    std::size_t line_no = 0;
    std::size_t start = 0;
    bool pragma_seen = false;
    while (start <= content.size()) {
        if (start == content.size()) break;
        std::size_t end = content.find('\n', start);
        if (end == std::string::npos) end = content.size();
        std::string line(chomp(std::string_view(content).substr(start, end - start)));
        start = end + 1;
        ++line_no;
        if (line_no == 1) {
            std::smatch m;
            if (!std::regex_match(line, m, pragma_re))
                throw std::runtime_error(links_path +
                                         ": malformed header; first line must be "
                                         "'#schema_version=1'");
            if (m[1] != "1")
                throw std::runtime_error(links_path + ": unsupported schema_version " +
                                         std::string(m[1]) + " (expected 1)");
            pragma_seen = true;
            continue;
        }
        if (line.empty() || line[0] == '#') continue;

        const auto fields = split_on(line, '\t');
        if (fields.size() != 2)
            throw std::runtime_error(links_path + ":" + std::to_string(line_no) +
                                     ": expected two tab-separated columns");
        const auto src = corpus.index_of(fields[0]);
        const auto dst = corpus.index_of(fields[1]);
        if (!src || !dst) {
            ++diag.edge_issues["dangling_edges"];
            continue;
        }
        if (*src == *dst) {
            ++diag.edge_issues["self_loops"];
            continue;
        }
        const std::uint64_t key = (static_cast<std::uint64_t>(*src) << 32) | *dst;
        if (!seen_edges.insert(key).second) {
            ++diag.edge_issues["duplicate_edges"];
            continue;
        }
        corpus.edges.push_back({*src, *dst});
    }
    if (!pragma_seen)
        throw std::runtime_error(links_path + ": malformed header; empty file");
}

}  // namespace bioaudit::corpus
