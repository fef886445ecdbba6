#pragma once

// Run orchestration behind the command line: configuration, dry-run
// validation, audit execution, artifact writing, and the run manifest.
//
// Reports are pure functions of (input bytes, config, seed): every
// stochastic audit draws from a substream named after the audit, and all
// emitted sequences are explicitly ordered. The manifest additionally
// records wall-clock timings, so it is the one artifact excluded from the
// byte-identity contract.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "bioaudit/corpus.hpp"
#include "bioaudit/csv.hpp"
#include "bioaudit/lexical.hpp"
#include "bioaudit/lingbias.hpp"
#include "bioaudit/metadata.hpp"
#include "bioaudit/netstruct.hpp"
#include "bioaudit/notability.hpp"
#include "bioaudit/report.hpp"
#include "bioaudit/version.hpp"

namespace bioaudit::runner {

using nlohmann::json;

// Exit code categories (first failing category wins).
enum ExitCode : int {
    exit_ok = 0,
    exit_config = 2,
    exit_load = 3,
    exit_audit = 4,
    exit_output = 5,
};

inline const std::vector<std::string>& dimension_audits() {
    static const std::vector<std::string> names{"notability", "lexical", "lingbias", "metadata",
                                                "network"};
    return names;
}

inline const std::vector<std::string>& known_audits() {
    static const std::vector<std::string> names{"summary",  "notability", "lexical",
                                                "lingbias", "metadata",   "network"};
    return names;
}

struct RunConfig {
    std::string biographies;
    std::optional<std::string> links;
    std::optional<std::string> topic_lexicon;
    std::optional<std::string> subjectivity;
    std::optional<std::string> attention;

    corpus::Era era = corpus::Era::all;
    bool include_undated = false;
    std::vector<std::string> audits;  // executed in declared order
    std::optional<std::uint64_t> seed;
    std::string out_dir = "reports";

    std::size_t reshuffles = 1000;
    notability::Bucketing bucketing = notability::Bucketing::per_count;
    std::vector<netstruct::NullModelKind> null_models = {
        netstruct::NullModelKind::random_shuffle, netstruct::NullModelKind::degree_sequence,
        netstruct::NullModelKind::small_world};
    lexical::PmiMode pmi_mode = lexical::PmiMode::document;
    double min_doc_frac = 0.01;
    std::size_t top_k = 200;
    std::size_t min_words = 250;
    lingbias::Transform transform = lingbias::Transform::identity;
    double min_presence_pct = 1.0;
    double damping = 0.85;
    int smoothing_window = 1;
    bool drop_singletons = true;

    bool fail_fast = false;
    bool parallel = false;
    bool skip_duplicates = false;

    bool wants(const std::string& audit) const {
        return std::find(audits.begin(), audits.end(), audit) != audits.end();
    }
    bool has_stochastic_audit() const { return wants("notability") || wants("network"); }
};

// --- config (de)serialization ---------------------------------------------

inline corpus::Era era_from_string(const std::string& s) {
    if (s == "all") return corpus::Era::all;
    if (s == "pre1900") return corpus::Era::pre1900;
    if (s == "post1900") return corpus::Era::post1900;
    throw std::invalid_argument("unknown era '" + s + "' (expected all|pre1900|post1900)");
}

inline netstruct::NullModelKind null_model_from_string(const std::string& s) {
    if (s == "random") return netstruct::NullModelKind::random_shuffle;
    if (s == "degree_sequence") return netstruct::NullModelKind::degree_sequence;
    if (s == "small_world") return netstruct::NullModelKind::small_world;
    throw std::invalid_argument("unknown null model '" + s +
                                "' (expected random|degree_sequence|small_world)");
}

inline json config_to_json(const RunConfig& c) {
    json out{{"biographies", c.biographies},
             {"era", corpus::to_string(c.era)},
             {"include_undated", c.include_undated},
             {"audits", c.audits},
             {"out", c.out_dir},
             {"reshuffles", c.reshuffles},
             {"bucketing", notability::to_string(c.bucketing)},
             {"pmi_mode", lexical::to_string(c.pmi_mode)},
             {"min_doc_frac", c.min_doc_frac},
             {"top_k", c.top_k},
             {"min_words", c.min_words},
             {"transform", lingbias::to_string(c.transform)},
             {"min_presence_pct", c.min_presence_pct},
             {"damping", c.damping},
             {"smoothing_window", c.smoothing_window},
             {"drop_singletons", c.drop_singletons},
             {"fail_fast", c.fail_fast},
             {"parallel", c.parallel},
             {"skip_duplicates", c.skip_duplicates}};
    if (c.seed) out["seed"] = *c.seed;
    if (c.links) out["links"] = *c.links;
    if (c.topic_lexicon) out["lexicon"] = *c.topic_lexicon;
    if (c.subjectivity) out["subjectivity"] = *c.subjectivity;
    if (c.attention) out["attention"] = *c.attention;
    json models = json::array();
    for (auto m : c.null_models) models.push_back(netstruct::to_string(m));
    out["null_models"] = std::move(models);
    return out;
}

inline RunConfig config_from_json(const json& j) {
    RunConfig c;
    c.biographies = j.value("biographies", "");
    if (j.contains("links")) c.links = j["links"].get<std::string>();
    if (j.contains("lexicon")) c.topic_lexicon = j["lexicon"].get<std::string>();
    if (j.contains("subjectivity")) c.subjectivity = j["subjectivity"].get<std::string>();
    if (j.contains("attention")) c.attention = j["attention"].get<std::string>();
    if (j.contains("era")) c.era = era_from_string(j["era"].get<std::string>());
    c.include_undated = j.value("include_undated", false);
    if (j.contains("audits")) c.audits = j["audits"].get<std::vector<std::string>>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    c.out_dir = j.value("out", std::string("reports"));
    c.reshuffles = j.value("reshuffles", std::size_t{1000});
    if (j.contains("bucketing"))
        c.bucketing = j["bucketing"] == "log_buckets" ? notability::Bucketing::log_buckets
                                                      : notability::Bucketing::per_count;
    if (j.contains("null_models")) {
        c.null_models.clear();
        for (const auto& m : j["null_models"])
            c.null_models.push_back(null_model_from_string(m.get<std::string>()));
    }
    if (j.contains("pmi_mode"))
        c.pmi_mode =
            j["pmi_mode"] == "token" ? lexical::PmiMode::token : lexical::PmiMode::document;
    c.min_doc_frac = j.value("min_doc_frac", 0.01);
    c.top_k = j.value("top_k", std::size_t{200});
    c.min_words = j.value("min_words", std::size_t{250});
    if (j.contains("transform"))
        c.transform = j["transform"] == "logit" ? lingbias::Transform::logit
                                                : lingbias::Transform::identity;
    c.min_presence_pct = j.value("min_presence_pct", 1.0);
    c.damping = j.value("damping", 0.85);
    c.smoothing_window = j.value("smoothing_window", 1);
    c.drop_singletons = j.value("drop_singletons", true);
    c.fail_fast = j.value("fail_fast", false);
    c.parallel = j.value("parallel", false);
    c.skip_duplicates = j.value("skip_duplicates", false);
    return c;
}

// --- validation -------------------------------------------------------------

struct Diagnostic {
    std::string severity;  // "error" | "warning"
    std::string location;  // file, file:line, or option name
    std::string message;
    std::string suggestion;
};

namespace detail {

inline std::size_t levenshtein(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1,
                               prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        prev.swap(cur);
    }
    return prev[b.size()];
}

inline std::string closest_audit_name(const std::string& name) {
    std::string best;
    std::size_t best_d = name.size() + 1;
    for (const auto& candidate : known_audits()) {
        const auto d = levenshtein(name, candidate);
        if (d < best_d) {
            best_d = d;
            best = candidate;
        }
    }
    return best_d <= 3 ? best : "";
}

}  // namespace detail

// Dry-run checks: schema and file problems located by row, unknown audit
// names with a suggestion, missing seeds. No audit computation happens.
inline std::vector<Diagnostic> validate(const RunConfig& config) {
    std::vector<Diagnostic> out;
    auto error = [&](std::string location, std::string message, std::string suggestion = "") {
        out.push_back({"error", std::move(location), std::move(message), std::move(suggestion)});
    };
    auto warning = [&](std::string location, std::string message) {
        out.push_back({"warning", std::move(location), std::move(message), ""});
    };

    for (const auto& audit : config.audits)
        if (std::find(known_audits().begin(), known_audits().end(), audit) ==
            known_audits().end()) {
            const auto hint = detail::closest_audit_name(audit);
            error("--audits", "unknown audit '" + audit + "'",
                  hint.empty() ? "" : "did you mean '" + hint + "'?");
        }
    if (config.audits.empty()) error("--audits", "no audits requested");
    if (config.has_stochastic_audit() && !config.seed)
        error("--seed", "a seed is required for stochastic audits (notability, network)",
              "pass --seed N or set AUDITOR_SEED");

    if (config.biographies.empty()) {
        error("--biographies", "no biographies file configured");
        return out;
    }
    if (!std::filesystem::exists(config.biographies)) {
        error(config.biographies, "file does not exist");
        return out;
    }

    // Row-level scan of the biography file.
    std::ifstream in(config.biographies, std::ios::binary);
    std::string line;
    std::size_t line_no = 0;
    std::unordered_set<std::string> ids;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        json rec = json::parse(line, nullptr, false);
        const std::string location = config.biographies + ":" + std::to_string(line_no);
        if (rec.is_discarded() || !rec.is_object()) {
            error(location, "malformed JSON record");
            continue;
        }
        if (!rec.contains("id") || !rec["id"].is_string()) {
            error(location, "record without string id");
            continue;
        }
        const std::string id = rec["id"].get<std::string>();
        if (!ids.insert(id).second) {
            const std::string message = "duplicate id '" + id + "'";
            if (config.skip_duplicates) warning(location, message);
            else error(location, message);
        }
        const std::string gender =
            rec.contains("gender") && rec["gender"].is_string() ? rec["gender"] : "";
        if (gender != "male" && gender != "female")
            warning(location, "record will be rejected: gender '" + gender +
                                  "' is not male|female");
        if (rec.contains("birth_year") && rec["birth_year"].is_number_integer() &&
            rec.contains("death_year") && rec["death_year"].is_number_integer() &&
            rec["birth_year"].get<int>() > rec["death_year"].get<int>())
            warning(location, "record will be rejected: birth_year after death_year");
        if (rec.value("edition_count", 0) < 1)
            warning(location, "record will be rejected: edition_count < 1");
    }

    auto check_file = [&](const std::optional<std::string>& path, const char* flag,
                          bool required_for, const std::string& audit) {
        if (path && !std::filesystem::exists(*path))
            error(*path, "file does not exist");
        else if (!path && required_for && config.wants(audit))
            error(flag, std::string("required for the ") + audit + " audit");
    };
    check_file(config.links, "--links", true, "network");
    check_file(config.subjectivity, "--subjectivity", true, "lingbias");
    check_file(config.topic_lexicon, "--lexicon", false, "");
    check_file(config.attention, "--attention", false, "");

    if (config.links && std::filesystem::exists(*config.links)) {
        std::ifstream links_in(*config.links, std::ios::binary);
        std::string first;
        std::getline(links_in, first);
        if (!first.empty() && first.back() == '\r') first.pop_back();
        if (first.rfind("#", 0) != 0 || first.find("schema_version") == std::string::npos)
            error(*config.links + ":1", "missing '#schema_version=1' pragma");
    }
    return out;
}

// --- audit execution ----------------------------------------------------------

struct AuditOutcome {
    std::string name;
    bool ok = false;
    std::string error;
    double seconds = 0.0;
    std::vector<std::string> artifacts;
    json extras;  // small per-audit facts echoed into the manifest
};

struct RunOutcome {
    int exit_code = exit_ok;
    std::vector<AuditOutcome> audits;
    std::vector<std::string> artifacts;
    std::string manifest_path;
};

namespace detail {

inline std::string hash_hex(std::uint64_t h) {
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

inline void write_json(const std::filesystem::path& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

inline std::string maybe(const std::optional<double>& v) {
    return v ? format_double(*v) : "";
}

struct AuditContext {
    const RunConfig& config;
    const corpus::Corpus& corpus_data;
    const corpus::LoadDiagnostics& load_diag;
    std::filesystem::path out_dir;

    corpus::CohortView view(bool allow_undated) const {
        corpus::Cohort cohort;
        cohort.era = config.era;
        cohort.include_undated = allow_undated && config.include_undated;
        return corpus::split_cohort(corpus_data, cohort);
    }
    std::uint64_t audit_seed(const std::string& audit) const {
        return derive_seed(config.seed.value_or(0), audit);
    }
};

inline AuditOutcome run_summary(const AuditContext& ctx) {
    AuditOutcome out;
    out.name = "summary";
    const auto summary = corpus::corpus_summary(ctx.corpus_data);

    const auto json_path = ctx.out_dir / "summary.json";
    write_json(json_path, report::to_json(summary));
    out.artifacts.push_back(json_path.string());

    CsvWriter csv((ctx.out_dir / "birth_histogram.csv").string());
    csv.row({"year", "men", "women"});
    for (const auto& [year, cell] : summary.birth_histogram)
        csv.row({std::to_string(year), std::to_string(cell.first), std::to_string(cell.second)});
    out.artifacts.push_back((ctx.out_dir / "birth_histogram.csv").string());
    out.ok = true;
    return out;
}

inline AuditOutcome run_notability(const AuditContext& ctx) {
    AuditOutcome out;
    out.name = "notability";
    // Always dated: the entry-barrier analyses condition on birth year.
    const auto view = ctx.view(/*allow_undated=*/false);
    if (view.empty()) throw std::runtime_error("notability: cohort is empty");

    const auto curve = notability::ratio_curve(view, ctx.config.bucketing, ctx.config.reshuffles,
                                               ctx.audit_seed("notability"));
    const auto regression = notability::notability_regression(view);
    const auto by_year = notability::notability_by_birthyear(view, ctx.config.smoothing_window);

    json j{{"cohort",
            {{"era", corpus::to_string(view.cohort().era)},
             {"n", view.size()},
             {"women_fraction", view.women_fraction()}}},
           {"ratio_curve", report::to_json(curve)},
           {"regression", report::to_json(regression.fit)},
           {"warnings", regression.warnings}};
    if (ctx.config.attention) {
        const auto attention =
            notability::attention_regression(*ctx.config.attention, ctx.corpus_data);
        j["attention"] = report::to_json(attention);
    }
    const auto json_path = ctx.out_dir / "notability.json";
    write_json(json_path, j);
    out.artifacts.push_back(json_path.string());

    {
        CsvWriter csv((ctx.out_dir / "ratio_curve.csv").string());
        csv.row({"bin", "men", "women", "observed_ratio", "baseline_mean", "baseline_ci_low",
                 "baseline_ci_high"});
        for (const auto& b : curve.bins)
            csv.row({b.label, std::to_string(b.men), std::to_string(b.women),
                     maybe(b.observed_ratio), maybe(b.baseline_ratio_mean),
                     maybe(b.baseline_ratio_ci_low), maybe(b.baseline_ratio_ci_high)});
        out.artifacts.push_back((ctx.out_dir / "ratio_curve.csv").string());
    }
    {
        CsvWriter csv((ctx.out_dir / "editions_by_birthyear.csv").string());
        csv.row({"year", "mean_editions_men", "mean_editions_women"});
        for (const auto& ym : by_year)
            csv.row({std::to_string(ym.year), maybe(ym.mean_editions_male),
                     maybe(ym.mean_editions_female)});
        out.artifacts.push_back((ctx.out_dir / "editions_by_birthyear.csv").string());
    }
    out.ok = true;
    return out;
}

inline AuditOutcome run_lexical(const AuditContext& ctx) {
    AuditOutcome out;
    out.name = "lexical";
    const auto view = ctx.view(/*allow_undated=*/true);
    if (view.empty()) throw std::runtime_error("lexical: cohort is empty");

    const auto lexicon = ctx.config.topic_lexicon
                             ? lexical::TopicLexicon::from_file(*ctx.config.topic_lexicon)
                             : lexical::TopicLexicon::bundled_default();
    const auto stats = lexical::extract_ngrams(view);
    const auto men = lexical::rank_by_pmi(stats, corpus::Gender::male, ctx.config.min_doc_frac,
                                          ctx.config.top_k, ctx.config.pmi_mode);
    const auto women = lexical::rank_by_pmi(stats, corpus::Gender::female, ctx.config.min_doc_frac,
                                            ctx.config.top_k, ctx.config.pmi_mode);
    const auto table = lexical::categorize_top_terms(men, women, lexicon);

    json j{{"pmi_mode", lexical::to_string(ctx.config.pmi_mode)},
           {"top_k", ctx.config.top_k},
           {"min_doc_frac", ctx.config.min_doc_frac},
           {"categories", report::to_json(table)},
           {"top_terms_male", report::to_json(men)},
           {"top_terms_female", report::to_json(women)},
           {"warnings", json::array()}};
    for (const auto& w : men.warnings) j["warnings"].push_back("male: " + w);
    for (const auto& w : women.warnings) j["warnings"].push_back("female: " + w);
    const auto json_path = ctx.out_dir / "lexical.json";
    write_json(json_path, j);
    out.artifacts.push_back(json_path.string());

    std::ofstream csv(ctx.out_dir / "terms.csv", std::ios::binary);
    lexical::emit_term_table(men, women, lexicon, csv);
    out.artifacts.push_back((ctx.out_dir / "terms.csv").string());
    out.ok = true;
    return out;
}

inline AuditOutcome run_lingbias(const AuditContext& ctx) {
    AuditOutcome out;
    out.name = "lingbias";
    if (!ctx.config.subjectivity)
        throw std::runtime_error("lingbias: --subjectivity lexicon is required");
    const auto lexicon = lingbias::SubjectivityLexicon::from_file(*ctx.config.subjectivity);
    const auto view = ctx.view(/*allow_undated=*/true);
    if (view.empty()) throw std::runtime_error("lingbias: cohort is empty");

    const auto aggregate = lingbias::aggregate_ratio_test(view, lexicon);
    const auto fits = lingbias::individual_regressions(view, lexicon, ctx.config.min_words,
                                                       ctx.config.transform);

    json j{{"aggregate", report::to_json(aggregate)},
           {"transform", lingbias::to_string(ctx.config.transform)},
           {"min_words", ctx.config.min_words},
           {"regression_positive", report::to_json(fits.positive)},
           {"regression_negative", report::to_json(fits.negative)},
           {"warnings", fits.warnings}};
    const auto json_path = ctx.out_dir / "lingbias.json";
    write_json(json_path, j);
    out.artifacts.push_back(json_path.string());
    out.ok = true;
    return out;
}

inline AuditOutcome run_metadata(const AuditContext& ctx) {
    AuditOutcome out;
    out.name = "metadata";
    const auto view = ctx.view(/*allow_undated=*/true);
    if (view.empty()) throw std::runtime_error("metadata: cohort is empty");
    const auto audits = metadata::audit_attributes(view, ctx.config.min_presence_pct);

    json rows = json::array();
    for (const auto& a : audits) rows.push_back(report::to_json(a));
    const auto json_path = ctx.out_dir / "metadata.json";
    write_json(json_path, json{{"attributes", std::move(rows)},
                               {"min_presence_pct", ctx.config.min_presence_pct}});
    out.artifacts.push_back(json_path.string());

    std::ofstream csv(ctx.out_dir / "metadata.csv", std::ios::binary);
    metadata::emit_attribute_csv(audits, csv);
    out.artifacts.push_back((ctx.out_dir / "metadata.csv").string());
    out.ok = true;
    return out;
}

inline AuditOutcome run_network(const AuditContext& ctx) {
    AuditOutcome out;
    out.name = "network";
    if (!ctx.config.links) throw std::runtime_error("network: --links file is required");
    const auto view = ctx.view(/*allow_undated=*/true);
    if (view.empty()) throw std::runtime_error("network: cohort is empty");

    netstruct::BuildDiagnostics build_diag;
    const auto graph = netstruct::build_graph(view, ctx.config.drop_singletons, &build_diag);
    const auto scores = netstruct::pagerank(graph, ctx.config.damping);
    const auto in_deg = graph.in_degrees();
    std::vector<double> indegree_scores(in_deg.begin(), in_deg.end());

    const auto ks = netstruct::default_topk_ks(graph.node_count());
    const auto topk_pr = netstruct::topk_fraction(scores, graph, ks);
    const auto topk_in = netstruct::topk_fraction(indegree_scores, graph, ks);

    const auto observed_mix = netstruct::edge_mix(graph);
    const double observed_clustering =
        netstruct::clustering_coefficient(netstruct::undirected_projection(graph));

    struct NullRow {
        std::string name;
        netstruct::EdgeMix mix;
        double clustering = 0.0;
        netstruct::MixComparison comparison;
        json diagnostics;
    };
    std::vector<NullRow> nulls;
    for (const auto kind : ctx.config.null_models) {
        auto model = netstruct::generate_null(graph, kind, ctx.audit_seed("network"));
        NullRow row;
        row.name = netstruct::to_string(kind);
        row.mix = netstruct::edge_mix(model.graph);
        row.clustering =
            netstruct::clustering_coefficient(netstruct::undirected_projection(model.graph));
        row.comparison = netstruct::compare_mix(observed_mix, row.mix);
        row.diagnostics = json::object();
        for (const auto& [k, v] : model.diagnostics) row.diagnostics[k] = v;
        nulls.push_back(std::move(row));
    }

    json null_json = json::array();
    for (const auto& row : nulls) {
        json entry{{"model", row.name},
                   {"edge_mix", report::to_json(row.mix)},
                   {"clustering", row.clustering},
                   {"diagnostics", row.diagnostics}};
        entry["chi2_m_to_w"] =
            row.comparison.m_to_w ? report::to_json(*row.comparison.m_to_w) : json(nullptr);
        entry["chi2_w_to_w"] =
            row.comparison.w_to_w ? report::to_json(*row.comparison.w_to_w) : json(nullptr);
        null_json.push_back(std::move(entry));
    }
    json j{{"graph",
            {{"nodes", graph.node_count()},
             {"edges", graph.edge_count()},
             {"women_fraction",
              static_cast<double>(graph.women()) / static_cast<double>(graph.node_count())},
             {"singletons_removed", build_diag.singletons_removed},
             {"singletons_removed_female_share", build_diag.removed_female_share},
             {"clustering", observed_clustering}}},
           {"observed_mix", report::to_json(observed_mix)},
           {"null_models", std::move(null_json)},
           {"topk_pagerank", report::to_json(topk_pr)},
           {"topk_indegree", report::to_json(topk_in)}};
    const auto json_path = ctx.out_dir / "network.json";
    write_json(json_path, j);
    out.artifacts.push_back(json_path.string());

    {
        CsvWriter csv((ctx.out_dir / "topk_fraction.csv").string());
        csv.row({"k", "fraction_women", "ranking"});
        for (const auto& p : topk_pr.curve)
            csv.row({std::to_string(p.k), format_double(p.fraction_women), "pagerank"});
        for (const auto& p : topk_in.curve)
            csv.row({std::to_string(p.k), format_double(p.fraction_women), "indegree"});
        out.artifacts.push_back((ctx.out_dir / "topk_fraction.csv").string());
    }
    {
        CsvWriter csv((ctx.out_dir / "edge_mix.csv").string());
        csv.row({"network", "edges", "clust_coeff", "pct_m_to_m", "pct_m_to_w", "chi2_m_to_w",
                 "p_m_to_w", "pct_w_to_m", "pct_w_to_w", "chi2_w_to_w", "p_w_to_w"});
        auto mix_row = [&](const std::string& name, const netstruct::EdgeMix& mix,
                           double clustering, const netstruct::MixComparison* cmp) {
            std::vector<std::string> row{name,
                                         std::to_string(mix.edge_count),
                                         format_double(clustering),
                                         format_double(mix.pct_mm),
                                         format_double(mix.pct_mw)};
            row.push_back(cmp && cmp->m_to_w ? format_double(cmp->m_to_w->statistic) : "");
            row.push_back(cmp && cmp->m_to_w ? format_double(cmp->m_to_w->p_value) : "");
            row.push_back(format_double(mix.pct_wm));
            row.push_back(format_double(mix.pct_ww));
            row.push_back(cmp && cmp->w_to_w ? format_double(cmp->w_to_w->statistic) : "");
            row.push_back(cmp && cmp->w_to_w ? format_double(cmp->w_to_w->p_value) : "");
            csv.row(row);
        };
        mix_row("observed", observed_mix, observed_clustering, nullptr);
        for (const auto& row : nulls) mix_row(row.name, row.mix, row.clustering, &row.comparison);
        out.artifacts.push_back((ctx.out_dir / "edge_mix.csv").string());
    }
    out.extras = {{"nodes", graph.node_count()}, {"edges", graph.edge_count()}};
    out.ok = true;
    return out;
}

inline AuditOutcome dispatch_audit(const std::string& name, const AuditContext& ctx) {
    const auto started = std::chrono::steady_clock::now();
    AuditOutcome out;
    try {
        if (name == "summary") out = run_summary(ctx);
        else if (name == "notability") out = run_notability(ctx);
        else if (name == "lexical") out = run_lexical(ctx);
        else if (name == "lingbias") out = run_lingbias(ctx);
        else if (name == "metadata") out = run_metadata(ctx);
        else if (name == "network") out = run_network(ctx);
        else {
            out.name = name;
            out.error = "unknown audit";
        }
    } catch (const std::exception& e) {
        out.name = name;
        out.ok = false;
        out.error = e.what();
    }
    out.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return out;
}

}  // namespace detail

// Executes the configured audits and writes one manifest plus per-audit
// artifacts under config.out_dir. The manifest is written even when
// loading or an audit fails.
inline RunOutcome run(const RunConfig& config) {
    RunOutcome outcome;
    json manifest{{"schema_version", 1},
                  {"artifact", {{"name", "bioaudit"}, {"version", version_string()}}},
                  {"config", config_to_json(config)}};

    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    const auto manifest_path = std::filesystem::path(config.out_dir) / "manifest.json";
    outcome.manifest_path = manifest_path.string();

    auto finish = [&](int code) {
        manifest["exit_code"] = code;
        try {
            detail::write_json(manifest_path, manifest);
        } catch (const std::exception&) {
            code = code == exit_ok ? exit_output : code;
        }
        outcome.exit_code = code;
        return outcome;
    };

    if (ec) {
        manifest["error"] = "cannot create output directory: " + config.out_dir;
        return finish(exit_output);
    }
    if (config.audits.empty()) {
        manifest["error"] = "no audits requested";
        return finish(exit_config);
    }
    for (const auto& audit : config.audits)
        if (std::find(known_audits().begin(), known_audits().end(), audit) ==
            known_audits().end()) {
            manifest["error"] = "unknown audit '" + audit + "'";
            return finish(exit_config);
        }
    if (config.has_stochastic_audit() && !config.seed) {
        manifest["error"] = "a seed is required for stochastic audits";
        return finish(exit_config);
    }

    corpus::Corpus corpus_data;
    corpus::LoadDiagnostics load_diag;
    try {
        corpus::SchemaOptions opts;
        opts.skip_duplicates = config.skip_duplicates;
        auto loaded = corpus::load_corpus(config.biographies, config.links, opts);
        corpus_data = std::move(loaded.first);
        load_diag = std::move(loaded.second);
    } catch (const std::exception& e) {
        manifest["error"] = std::string("load failed: ") + e.what();
        return finish(exit_load);
    }
    manifest["corpus"] = {{"hash", detail::hash_hex(corpus_data.content_hash)},
                          {"records", corpus_data.records.size()},
                          {"edges", corpus_data.edges.size()},
                          {"diagnostics", report::to_json(load_diag)}};

    detail::AuditContext ctx{config, corpus_data, load_diag,
                             std::filesystem::path(config.out_dir)};

    std::vector<AuditOutcome> results;
    if (config.parallel) {
        std::vector<std::future<AuditOutcome>> futures;
        for (const auto& name : config.audits)
            futures.push_back(std::async(std::launch::async,
                                         [&, name] { return detail::dispatch_audit(name, ctx); }));
        for (auto& f : futures) results.push_back(f.get());
    } else {
        for (const auto& name : config.audits) {
            results.push_back(detail::dispatch_audit(name, ctx));
            if (!results.back().ok && config.fail_fast) break;
        }
    }

    json audit_json = json::array();
    bool any_error = false;
    for (const auto& r : results) {
        any_error = any_error || !r.ok;
        json entry{{"name", r.name},
                   {"status", r.ok ? "ok" : "error"},
                   {"seconds", r.seconds},
                   {"artifacts", r.artifacts}};
        if (!r.ok) entry["error"] = r.error;
        if (!r.extras.is_null()) entry["details"] = r.extras;
        audit_json.push_back(std::move(entry));
        for (const auto& a : r.artifacts) outcome.artifacts.push_back(a);
    }
    manifest["audits"] = std::move(audit_json);
    outcome.audits = std::move(results);
    return finish(any_error ? exit_audit : exit_ok);
}

}  // namespace bioaudit::runner
