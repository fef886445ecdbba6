// bioaudit command line: audits a biography corpus for gender asymmetries
// along five dimensions (notability, topical focus, linguistic
// abstraction, meta-data coverage, hyperlink-network structure) and
// writes deterministic CSV/JSON reports plus a run manifest.
//
// Subcommands: summary, notability, lexical, lingbias, metadata, network,
// all (the five dimension audits), validate (dry-run checks only).

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "bioaudit/runner.hpp"
#include "bioaudit/version.hpp"

namespace {

using bioaudit::runner::RunConfig;

struct CliOptions {
    RunConfig config;
    std::optional<std::string> config_path;

    // Raw flag values; only applied over the config file when the user
    // actually passed them (flags win).
    std::string era = "all";
    std::string bucketing = "per_count";
    std::string pmi_mode = "document";
    std::string transform = "identity";
    std::vector<std::string> null_models;
    std::optional<std::uint64_t> seed;
};

void add_common_options(CLI::App* cmd, CliOptions& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file (flags override it)");
    cmd->add_option("--biographies", opts.config.biographies, "biographies JSON-lines file");
    cmd->add_option("--links", opts.config.links, "hyperlink TSV (source_id<TAB>target_id)");
    cmd->add_option("--lexicon", opts.config.topic_lexicon,
                    "topic lexicon TSV (term<TAB>category)");
    cmd->add_option("--subjectivity", opts.config.subjectivity,
                    "subjectivity lexicon (word1=... pos1=... priorpolarity=...)");
    cmd->add_option("--attention", opts.config.attention, "attention CSV (id,regions,months)");
    cmd->add_option("--era", opts.era, "cohort: all|pre1900|post1900")
        ->check(CLI::IsMember({"all", "pre1900", "post1900"}));
    cmd->add_flag("--include-undated", opts.config.include_undated,
                  "keep records without a birth year (era=all text/metadata/network audits)");
    cmd->add_option("--seed", opts.seed, "root seed for stochastic audits");
    cmd->add_option("--out", opts.config.out_dir, "output directory (default: reports)");
    cmd->add_option("--reshuffles", opts.config.reshuffles,
                    "gender reshuffles for the ratio baseline (default 1000)");
    cmd->add_option("--null-models", opts.null_models,
                    "comma list: random,degree_sequence,small_world")
        ->delimiter(',');
    cmd->add_option("--bucketing", opts.bucketing, "ratio bins: per_count|log_buckets")
        ->check(CLI::IsMember({"per_count", "log_buckets"}));
    cmd->add_option("--pmi-mode", opts.pmi_mode, "PMI estimator: document|token")
        ->check(CLI::IsMember({"document", "token"}));
    cmd->add_option("--min-doc-frac", opts.config.min_doc_frac,
                    "n-gram document-fraction floor (default 0.01)");
    cmd->add_option("--top-k", opts.config.top_k, "ranked terms per gender (default 200)");
    cmd->add_option("--min-words", opts.config.min_words,
                    "token floor for per-biography regressions (default 250)");
    cmd->add_option("--transform", opts.transform, "abstractness ratio transform: identity|logit")
        ->check(CLI::IsMember({"identity", "logit"}));
    cmd->add_option("--min-presence-pct", opts.config.min_presence_pct,
                    "attribute qualifying threshold in percent (default 1.0)");
    cmd->add_option("--damping", opts.config.damping, "PageRank damping (default 0.85)");
    cmd->add_option("--smoothing-window", opts.config.smoothing_window,
                    "odd moving-average window for editions-by-year (default 1)");
    cmd->add_flag("--fail-fast", opts.config.fail_fast, "stop at the first failing audit");
    cmd->add_flag("--parallel", opts.config.parallel, "run independent audits concurrently");
    cmd->add_flag("--skip-duplicates", opts.config.skip_duplicates,
                  "keep the first record for duplicate ids instead of failing");
}

RunConfig materialize(const CLI::App& cmd, CliOptions& opts) {
    RunConfig config;
    if (opts.config_path) {
        const auto text = bioaudit::read_file(*opts.config_path);
        config = bioaudit::runner::config_from_json(nlohmann::json::parse(text));
    }
    auto passed = [&](const std::string& flag) { return cmd.count(flag) > 0; };

    if (passed("--biographies")) config.biographies = opts.config.biographies;
    if (passed("--links")) config.links = opts.config.links;
    if (passed("--lexicon")) config.topic_lexicon = opts.config.topic_lexicon;
    if (passed("--subjectivity")) config.subjectivity = opts.config.subjectivity;
    if (passed("--attention")) config.attention = opts.config.attention;
    if (passed("--era")) config.era = bioaudit::runner::era_from_string(opts.era);
    if (passed("--include-undated")) config.include_undated = opts.config.include_undated;
    if (passed("--seed")) config.seed = opts.seed;
    if (passed("--out")) config.out_dir = opts.config.out_dir;
    if (passed("--reshuffles")) config.reshuffles = opts.config.reshuffles;
    if (passed("--null-models")) {
        config.null_models.clear();
        for (const auto& name : opts.null_models)
            config.null_models.push_back(bioaudit::runner::null_model_from_string(name));
    }
    if (passed("--bucketing"))
        config.bucketing = opts.bucketing == "log_buckets"
                               ? bioaudit::notability::Bucketing::log_buckets
                               : bioaudit::notability::Bucketing::per_count;
    if (passed("--pmi-mode"))
        config.pmi_mode = opts.pmi_mode == "token" ? bioaudit::lexical::PmiMode::token
                                                   : bioaudit::lexical::PmiMode::document;
    if (passed("--min-doc-frac")) config.min_doc_frac = opts.config.min_doc_frac;
    if (passed("--top-k")) config.top_k = opts.config.top_k;
    if (passed("--min-words")) config.min_words = opts.config.min_words;
    if (passed("--transform"))
        config.transform = opts.transform == "logit" ? bioaudit::lingbias::Transform::logit
                                                     : bioaudit::lingbias::Transform::identity;
    if (passed("--min-presence-pct")) config.min_presence_pct = opts.config.min_presence_pct;
    if (passed("--damping")) config.damping = opts.config.damping;
    if (passed("--smoothing-window")) config.smoothing_window = opts.config.smoothing_window;
    if (passed("--fail-fast")) config.fail_fast = opts.config.fail_fast;
    if (passed("--parallel")) config.parallel = opts.config.parallel;
    if (passed("--skip-duplicates")) config.skip_duplicates = opts.config.skip_duplicates;

    if (!config.seed)
        if (const char* env = std::getenv("AUDITOR_SEED"))
            config.seed = std::strtoull(env, nullptr, 10);
    return config;
}

int run_audits(RunConfig config, const std::vector<std::string>& audits) {
    if (!audits.empty()) config.audits = audits;
    const auto outcome = bioaudit::runner::run(config);
    for (const auto& audit : outcome.audits) {
        if (audit.ok)
            std::cout << "[ok]    " << audit.name << " (" << audit.artifacts.size()
                      << " artifacts)\n";
        else
            std::cerr << "[error] " << audit.name << ": " << audit.error << "\n";
    }
    std::cout << "manifest: " << outcome.manifest_path << "\n";
    return outcome.exit_code;
}

int run_validate(const RunConfig& config) {
    const auto diagnostics = bioaudit::runner::validate(config);
    bool any_error = false;
    for (const auto& d : diagnostics) {
        any_error = any_error || d.severity == "error";
        std::cout << d.severity << ": " << d.location << ": " << d.message;
        if (!d.suggestion.empty()) std::cout << " (" << d.suggestion << ")";
        std::cout << "\n";
    }
    if (diagnostics.empty()) std::cout << "configuration valid\n";
    return any_error ? bioaudit::runner::exit_config : bioaudit::runner::exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bioaudit: gender-asymmetry audits over a biography corpus"};
    app.set_version_flag("--version", bioaudit::version_string());
    app.require_subcommand(1);

    CliOptions opts;
    struct Sub {
        CLI::App* cmd;
        std::vector<std::string> audits;
        bool validate_only = false;
    };
    std::vector<Sub> subs;
    auto add = [&](const std::string& name, const std::string& desc,
                   std::vector<std::string> audits, bool validate_only = false) {
        auto* cmd = app.add_subcommand(name, desc);
        add_common_options(cmd, opts);
        subs.push_back({cmd, std::move(audits), validate_only});
    };
    add("summary", "corpus counts, women fraction, birth-year histogram", {"summary"});
    add("notability", "edition-count ratios, reshuffle baseline, NB regression", {"notability"});
    add("lexical", "n-gram PMI ranking and topic categorization", {"lexical"});
    add("lingbias", "abstractness ratios and per-biography regressions", {"lingbias"});
    add("metadata", "infobox attribute presence tests", {"metadata"});
    add("network", "PageRank, null models, edge mix, top-k curves", {"network"});
    add("all", "the five dimension audits", bioaudit::runner::dimension_audits());
    add("validate", "dry-run schema and file checks", {}, true);

    CLI11_PARSE(app, argc, argv);

    for (const auto& sub : subs) {
        if (!sub.cmd->parsed()) continue;
        try {
            RunConfig config = materialize(*sub.cmd, opts);
            if (sub.validate_only) {
                if (config.audits.empty()) config.audits = bioaudit::runner::dimension_audits();
                return run_validate(config);
            }
            return run_audits(std::move(config), sub.audits);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return bioaudit::runner::exit_config;
        }
    }
    return bioaudit::runner::exit_config;
}
