#include <catch2/catch_amalgamated.hpp>

#include "bioaudit/corpus.hpp"
#include "support/fixtures.hpp"

using namespace bioaudit;
using namespace fixtures;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("load: missing gender is rejected and counted") {
    TempDir dir("missing_gender");
    const std::string path = dir.write(
        "bios.jsonl",
        bio_line("a", "male", 1901) + "\n" +
            "{\"id\":\"b\",\"name\":\"b\",\"gender\":\"unknown\",\"birth_year\":1950,"
            "\"death_year\":null,\"class\":\"Person\",\"edition_count\":2,"
            "\"attributes\":[],\"summary\":\"\"}\n" +
            bio_line("c", "female", 1930) + "\n");
    auto [corpus, diag] = corpus::load_corpus(path);
    CHECK(corpus.records.size() == 2);
    CHECK(diag.rejected_count("missing_gender") == 1);
}

TEST_CASE("load: pre-year-1 birth dates stay in the raw corpus but leave cohorts") {
    TempDir dir("bounds");
    const std::string path = dir.write("bios.jsonl", bio_line("a", "male", -50) + "\n" +
                                                         bio_line("b", "female", 1800) + "\n");
    auto [corpus, diag] = corpus::load_corpus(path);
    CHECK(corpus.records.size() == 2);
    corpus::Cohort all;
    auto view = corpus::split_cohort(corpus, all);
    CHECK(view.size() == 1);
    CHECK(view[0].id == "b");
}

TEST_CASE("load: dangling edges are dropped and counted") {
    TempDir dir("dangling");
    const std::string bios = dir.write("bios.jsonl", bio_line("a", "male", 1900) + "\n" +
                                                         bio_line("b", "female", 1900) + "\n");
    const std::string links =
        dir.write("links.tsv", "#schema_version=1\na\tb\na\tnobody\n");
    auto [corpus, diag] = corpus::load_corpus(bios, links);
    CHECK(corpus.edges.size() == 1);
    CHECK(diag.edge_count("dangling_edges") == 1);
}

TEST_CASE("load: duplicate edges and self-loops are removed with counts") {
    TempDir dir("dupedges");
    const std::string bios = dir.write("bios.jsonl", bio_line("a", "male", 1900) + "\n" +
                                                         bio_line("b", "female", 1900) + "\n");
    const std::string links = dir.write(
        "links.tsv", "#schema_version=1\na\tb\na\tb\nb\tb\nb\ta\n");
    auto [corpus, diag] = corpus::load_corpus(bios, links);
    CHECK(corpus.edges.size() == 2);
    CHECK(diag.edge_count("duplicate_edges") == 1);
    CHECK(diag.edge_count("self_loops") == 1);
}

TEST_CASE("load: duplicate ids are fatal unless skipped") {
    TempDir dir("dupids");
    const std::string path = dir.write("bios.jsonl", bio_line("a", "male", 1900) + "\n" +
                                                         bio_line("a", "male", 1901) + "\n");
    CHECK_THROWS_WITH(corpus::load_corpus(path), ContainsSubstring("duplicate id"));
    corpus::SchemaOptions opts;
    opts.skip_duplicates = true;
    auto [corpus, diag] = corpus::load_corpus(path, std::nullopt, opts);
    CHECK(corpus.records.size() == 1);
    CHECK(diag.rejected_count("duplicate_id") == 1);
    CHECK(corpus.records[0].birth_year == 1900);
}

TEST_CASE("load: links file without the schema pragma is a malformed header") {
    TempDir dir("nopragma");
    const std::string bios = dir.write("bios.jsonl", bio_line("a", "male", 1900) + "\n");
    const std::string links = dir.write("links.tsv", "a\ta\n");
    CHECK_THROWS_WITH(corpus::load_corpus(bios, links), ContainsSubstring("malformed header"));
    const std::string links2 = dir.write("links2.tsv", "#schema_version=2\n");
    CHECK_THROWS_WITH(corpus::load_corpus(bios, links2),
                      ContainsSubstring("unsupported schema_version"));
}

TEST_CASE("load: sidecar manifest schema version is enforced when present") {
    TempDir dir("sidecar");
    const std::string path = dir.write("bios.jsonl", bio_line("a", "male", 1900) + "\n");
    dir.write("bios.jsonl.manifest.json", "{\"schema_version\": 3}");
    CHECK_THROWS_WITH(corpus::load_corpus(path), ContainsSubstring("schema_version"));
}

TEST_CASE("load: birth year after death year is rejected") {
    TempDir dir("years");
    const std::string path = dir.write(
        "bios.jsonl",
        "{\"id\":\"a\",\"name\":\"a\",\"gender\":\"male\",\"birth_year\":1900,"
        "\"death_year\":1890,\"class\":\"Person\",\"edition_count\":1,"
        "\"attributes\":[],\"summary\":\"\"}\n");
    auto [corpus, diag] = corpus::load_corpus(path);
    CHECK(corpus.records.empty());
    CHECK(diag.rejected_count("bad_year") == 1);
}

TEST_CASE("load: deterministic content hash") {
    TempDir dir("hash");
    const std::string content = bio_line("a", "male", 1900) + "\n";
    const std::string p1 = dir.write("one.jsonl", content);
    const std::string p2 = dir.write("two.jsonl", content);
    auto [c1, d1] = corpus::load_corpus(p1);
    auto [c2, d2] = corpus::load_corpus(p2);
    CHECK(c1.content_hash == c2.content_hash);
    const std::string p3 = dir.write("three.jsonl", bio_line("a", "male", 1901) + "\n");
    auto [c3, d3] = corpus::load_corpus(p3);
    CHECK(c1.content_hash != c3.content_hash);
}

TEST_CASE("cohorts: 1899 goes before the 1900 boundary, 1900 after") {
    TempDir dir("boundary");
    const std::string path = dir.write("bios.jsonl", bio_line("a", "male", 1899) + "\n" +
                                                         bio_line("b", "male", 1900) + "\n");
    auto [corpus, diag] = corpus::load_corpus(path);
    corpus::Cohort pre;
    pre.era = corpus::Era::pre1900;
    auto view = corpus::split_cohort(corpus, pre);
    REQUIRE(view.size() == 1);
    CHECK(view[0].id == "a");
    corpus::Cohort post;
    post.era = corpus::Era::post1900;
    auto post_view = corpus::split_cohort(corpus, post);
    REQUIRE(post_view.size() == 1);
    CHECK(post_view[0].id == "b");
}

TEST_CASE("cohorts: women fraction reporting") {
    TempDir dir("fraction");
    std::string content;
    for (int i = 0; i < 922; ++i) content += bio_line("m" + std::to_string(i), "male", 1850) + "\n";
    for (int i = 0; i < 78; ++i) content += bio_line("f" + std::to_string(i), "female", 1850) + "\n";
    const std::string path = dir.write("bios.jsonl", content);
    auto [corpus, diag] = corpus::load_corpus(path);
    corpus::Cohort pre;
    pre.era = corpus::Era::pre1900;
    auto view = corpus::split_cohort(corpus, pre);
    CHECK(view.women_fraction() == Approx(0.078));
}

TEST_CASE("cohorts: pre plus post partition the dated view") {
    TempDir dir("partition");
    std::string content;
    int years[] = {-10, 500, 1850, 1899, 1900, 1950, 2012, 2015, 2016};
    for (int i = 0; i < 9; ++i)
        content += bio_line("p" + std::to_string(i), i % 2 ? "male" : "female", years[i]) + "\n";
    const std::string path = dir.write("bios.jsonl", content);
    auto [corpus, diag] = corpus::load_corpus(path);
    corpus::Cohort all, pre, post;
    pre.era = corpus::Era::pre1900;
    post.era = corpus::Era::post1900;
    const auto n_all = corpus::split_cohort(corpus, all).size();
    const auto n_pre = corpus::split_cohort(corpus, pre).size();
    const auto n_post = corpus::split_cohort(corpus, post).size();
    CHECK(n_pre + n_post == n_all);
    CHECK(n_all == 7);  // -10 and 2016 are out of bounds
}

TEST_CASE("cohorts: undated records only enter era=all with the flag") {
    TempDir dir("undated");
    const std::string path = dir.write(
        "bios.jsonl",
        "{\"id\":\"a\",\"name\":\"a\",\"gender\":\"male\",\"birth_year\":null,"
        "\"death_year\":null,\"class\":\"Person\",\"edition_count\":1,"
        "\"attributes\":[],\"summary\":\"\"}\n" +
            bio_line("b", "female", 1950) + "\n");
    auto [corpus, diag] = corpus::load_corpus(path);
    corpus::Cohort all;
    CHECK(corpus::split_cohort(corpus, all).size() == 1);
    all.include_undated = true;
    CHECK(corpus::split_cohort(corpus, all).size() == 2);
    corpus::Cohort pre;
    pre.era = corpus::Era::pre1900;
    pre.include_undated = true;
    CHECK(corpus::split_cohort(corpus, pre).size() == 0);
}

TEST_CASE("summary: counts, fraction, and histogram conservation") {
    TempDir dir("summary");
    std::string content;
    for (int i = 0; i < 8; ++i) content += bio_line("m" + std::to_string(i), "male", 1900 + i) + "\n";
    content += bio_line("f0", "female", 1900) + "\n";
    content += bio_line("f1", "female", 1905) + "\n";
    const std::string path = dir.write("bios.jsonl", content);
    auto [corpus, diag] = corpus::load_corpus(path);
    auto summary = corpus::corpus_summary(corpus);
    REQUIRE(summary.cohorts.size() == 3);
    CHECK(summary.cohorts[0].era == "all");
    CHECK(summary.cohorts[0].n == 10);
    CHECK(summary.cohorts[0].women_fraction == Approx(0.2));

    std::size_t men = 0, women = 0;
    for (const auto& [year, cell] : summary.birth_histogram) {
        men += cell.first;
        women += cell.second;
    }
    CHECK(men == 8);
    CHECK(women == 2);
}

TEST_CASE("summary strings are sentence-split and tokenized at load") {
    TempDir dir("tok");
    const std::string path = dir.write(
        "bios.jsonl",
        bio_line("a", "female", 1900, "Person", 1, "She married John. They had kids.") + "\n");
    auto [corpus, diag] = corpus::load_corpus(path);
    REQUIRE(corpus.records.size() == 1);
    const auto& b = corpus.records[0];
    REQUIRE(b.sentences.size() == 2);
    CHECK(b.sentences[0].size() == 3);
    CHECK(b.sentences[0][1].surface == "married");
    CHECK(b.token_count == 6);
}

TEST_CASE("tagged summaries keep POS tags and split on sentence punctuation") {
    TempDir dir("tagged");
    const std::string path = dir.write(
        "bios.jsonl",
        "{\"id\":\"a\",\"name\":\"a\",\"gender\":\"male\",\"birth_year\":1900,"
        "\"death_year\":null,\"class\":\"Person\",\"edition_count\":1,\"attributes\":[],"
        "\"summary_tagged\":[[\"He\",\"PRP\"],[\"failed\",\"VBD\"],[\".\",\".\"],"
        "[\"brilliant\",\"JJ\"]]}\n");
    auto [corpus, diag] = corpus::load_corpus(path);
    const auto& b = corpus.records[0];
    REQUIRE(b.sentences.size() == 2);
    CHECK(b.sentences[0][1].pos == "VBD");
    CHECK(b.sentences[1][0].surface == "brilliant");
}
