#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "bioaudit/runner.hpp"
#include "support/fixtures.hpp"

using namespace bioaudit;
using namespace fixtures;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtureDir = fs::path(BIOAUDIT_SOURCE_DIR) / "data" / "synthetic";

runner::RunConfig fixture_config(const fs::path& out_dir) {
    runner::RunConfig config;
    config.biographies = (kFixtureDir / "biographies.jsonl").string();
    config.links = (kFixtureDir / "links.tsv").string();
    config.subjectivity = (kFixtureDir / "subjectivity.tsv").string();
    config.attention = (kFixtureDir / "attention.csv").string();
    config.audits = runner::dimension_audits();
    config.seed = 42;
    config.reshuffles = 100;
    config.out_dir = out_dir.string();
    return config;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("run: the five dimension audits write five reports plus a manifest") {
    TempDir dir("runner_all");
    auto outcome = runner::run(fixture_config(dir.path() / "out"));
    CHECK(outcome.exit_code == runner::exit_ok);

    std::size_t report_jsons = 0;
    for (const char* name :
         {"notability.json", "lexical.json", "lingbias.json", "metadata.json", "network.json"})
        if (fs::exists(dir.path() / "out" / name)) ++report_jsons;
    CHECK(report_jsons == 5);
    CHECK(fs::exists(dir.path() / "out" / "manifest.json"));

    const auto manifest = nlohmann::json::parse(slurp(dir.path() / "out" / "manifest.json"));
    CHECK(manifest["exit_code"] == 0);
    CHECK(manifest["audits"].size() == 5);
    CHECK(manifest["corpus"]["records"] == 200);
    CHECK(manifest["schema_version"] == 1);
}

TEST_CASE("run: identical config and seed produce byte-identical artifacts") {
    TempDir dir("runner_det");
    auto a = runner::run(fixture_config(dir.path() / "a"));
    auto b = runner::run(fixture_config(dir.path() / "b"));
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    REQUIRE(a.artifacts.size() == b.artifacts.size());
    for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
        const auto rel = fs::path(a.artifacts[i]).filename();
        INFO(rel.string());
        CHECK(slurp(a.artifacts[i]) == slurp(dir.path() / "b" / rel));
    }
}

TEST_CASE("run: parallel execution produces the same artifacts as sequential") {
    TempDir dir("runner_par");
    auto seq_config = fixture_config(dir.path() / "seq");
    auto seq = runner::run(seq_config);
    auto par_config = fixture_config(dir.path() / "par");
    par_config.parallel = true;
    auto par = runner::run(par_config);
    REQUIRE(seq.exit_code == 0);
    REQUIRE(par.exit_code == 0);
    for (const auto& artifact : seq.artifacts) {
        const auto rel = fs::path(artifact).filename();
        INFO(rel.string());
        CHECK(slurp(artifact) == slurp(dir.path() / "par" / rel));
    }
}

TEST_CASE("run: network audit without links fails with a manifest error entry") {
    TempDir dir("runner_nolinks");
    auto config = fixture_config(dir.path() / "out");
    config.links.reset();
    auto outcome = runner::run(config);
    CHECK(outcome.exit_code == runner::exit_audit);
    const auto manifest = nlohmann::json::parse(slurp(dir.path() / "out" / "manifest.json"));
    bool network_error = false;
    for (const auto& audit : manifest["audits"])
        if (audit["name"] == "network" && audit["status"] == "error" &&
            audit.contains("error"))
            network_error = true;
    CHECK(network_error);
    // Other audits were still attempted.
    CHECK(manifest["audits"].size() == 5);
}

TEST_CASE("run: fail-fast stops after the first failing audit") {
    TempDir dir("runner_failfast");
    auto config = fixture_config(dir.path() / "out");
    config.links.reset();
    config.audits = {"network", "metadata"};
    config.fail_fast = true;
    auto outcome = runner::run(config);
    CHECK(outcome.exit_code == runner::exit_audit);
    CHECK(outcome.audits.size() == 1);
}

TEST_CASE("run: stochastic audits demand a seed") {
    TempDir dir("runner_seed");
    auto config = fixture_config(dir.path() / "out");
    config.seed.reset();
    auto outcome = runner::run(config);
    CHECK(outcome.exit_code == runner::exit_config);
    CHECK(fs::exists(dir.path() / "out" / "manifest.json"));

    config.audits = {"metadata"};
    auto ok = runner::run(config);
    CHECK(ok.exit_code == runner::exit_ok);  // metadata is deterministic
}

TEST_CASE("run: manifest is written even when loading fails") {
    TempDir dir("runner_loadfail");
    auto config = fixture_config(dir.path() / "out");
    config.biographies = (dir.path() / "missing.jsonl").string();
    auto outcome = runner::run(config);
    CHECK(outcome.exit_code == runner::exit_load);
    const auto manifest = nlohmann::json::parse(slurp(dir.path() / "out" / "manifest.json"));
    CHECK(manifest.contains("error"));
    CHECK(manifest["exit_code"] == runner::exit_load);
}

TEST_CASE("run: unknown audit is a config error") {
    TempDir dir("runner_unknown");
    auto config = fixture_config(dir.path() / "out");
    config.audits = {"metdata"};
    auto outcome = runner::run(config);
    CHECK(outcome.exit_code == runner::exit_config);
}

TEST_CASE("validate: clean fixture config has no errors") {
    TempDir dir("validate_ok");
    auto diagnostics = runner::validate(fixture_config(dir.path() / "out"));
    for (const auto& d : diagnostics) {
        INFO(d.location + ": " + d.message);
        CHECK(d.severity != "error");
    }
}

TEST_CASE("validate: bad gender value is located by row") {
    TempDir dir("validate_gender");
    std::string content;
    for (int i = 0; i < 4; ++i) content += bio_line("b" + std::to_string(i), "male", 1900) + "\n";
    content +=
        "{\"id\":\"b5\",\"name\":\"b5\",\"gender\":\"robot\",\"birth_year\":1950,"
        "\"death_year\":null,\"class\":\"Person\",\"edition_count\":1,\"attributes\":[],"
        "\"summary\":\"\"}\n";
    const std::string path = dir.write("bios.jsonl", content);
    runner::RunConfig config;
    config.biographies = path;
    config.audits = {"metadata"};
    auto diagnostics = runner::validate(config);
    bool located = false;
    for (const auto& d : diagnostics)
        if (d.location == path + ":5" && d.message.find("gender") != std::string::npos)
            located = true;
    CHECK(located);
}

TEST_CASE("validate: unknown audit name comes back with a suggestion") {
    TempDir dir("validate_suggest");
    runner::RunConfig config;
    config.biographies = (kFixtureDir / "biographies.jsonl").string();
    config.audits = {"lexcal"};
    auto diagnostics = runner::validate(config);
    bool suggested = false;
    for (const auto& d : diagnostics)
        if (d.suggestion.find("lexical") != std::string::npos) suggested = true;
    CHECK(suggested);
}

TEST_CASE("validate: missing seed and missing links are flagged") {
    runner::RunConfig config;
    config.biographies = (kFixtureDir / "biographies.jsonl").string();
    config.audits = {"network"};
    auto diagnostics = runner::validate(config);
    bool seed_flagged = false, links_flagged = false;
    for (const auto& d : diagnostics) {
        if (d.location == "--seed") seed_flagged = true;
        if (d.location == "--links") links_flagged = true;
    }
    CHECK(seed_flagged);
    CHECK(links_flagged);
}

TEST_CASE("config: JSON round trip preserves every field") {
    runner::RunConfig config;
    config.biographies = "bios.jsonl";
    config.links = "links.tsv";
    config.subjectivity = "subj.tsv";
    config.era = corpus::Era::pre1900;
    config.include_undated = true;
    config.audits = {"lexical", "network"};
    config.seed = 99;
    config.out_dir = "out";
    config.reshuffles = 123;
    config.bucketing = notability::Bucketing::log_buckets;
    config.null_models = {netstruct::NullModelKind::degree_sequence};
    config.pmi_mode = lexical::PmiMode::token;
    config.min_doc_frac = 0.05;
    config.top_k = 50;
    config.min_words = 100;
    config.transform = lingbias::Transform::logit;
    config.min_presence_pct = 2.5;
    config.damping = 0.9;
    config.smoothing_window = 3;
    config.fail_fast = true;
    config.parallel = true;
    config.skip_duplicates = true;

    auto round = runner::config_from_json(runner::config_to_json(config));
    CHECK(round.biographies == config.biographies);
    CHECK(round.links == config.links);
    CHECK(round.era == config.era);
    CHECK(round.include_undated == config.include_undated);
    CHECK(round.audits == config.audits);
    CHECK(round.seed == config.seed);
    CHECK(round.reshuffles == config.reshuffles);
    CHECK(round.bucketing == config.bucketing);
    CHECK(round.null_models == config.null_models);
    CHECK(round.pmi_mode == config.pmi_mode);
    CHECK(round.min_doc_frac == config.min_doc_frac);
    CHECK(round.top_k == config.top_k);
    CHECK(round.min_words == config.min_words);
    CHECK(round.transform == config.transform);
    CHECK(round.min_presence_pct == config.min_presence_pct);
    CHECK(round.damping == config.damping);
    CHECK(round.smoothing_window == config.smoothing_window);
    CHECK(round.fail_fast == config.fail_fast);
    CHECK(round.parallel == config.parallel);
    CHECK(round.skip_duplicates == config.skip_duplicates);
}

TEST_CASE("seed substreams: audits draw from independent named streams") {
    CHECK(derive_seed(42, "notability") != derive_seed(42, "network"));
    CHECK(derive_seed(42, "notability") != derive_seed(43, "notability"));
    CHECK(derive_seed(42, "notability") == derive_seed(42, "notability"));
}
