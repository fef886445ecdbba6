// Regenerates the bundled synthetic corpus under data/synthetic/. The
// fixture is deterministic (fixed seed) and sized so every audit runs
// with its default options: four ontology classes with >= 10 records
// each, summaries above the 250-token regression floor, a link graph
// whose clustering sits inside the band reachable by a degree-4 lattice,
// and an attention sample for the OLS fits.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bioaudit/netstruct.hpp"
#include "bioaudit/rng.hpp"

using bioaudit::Rng;

namespace {

struct Record {
    std::string id;
    bool female = false;
    int birth_year = 1900;
    bool undated = false;
    std::string cls;
    int editions = 1;
    std::vector<std::string> attributes;
    std::string summary;
};

const char* kPositiveAdj[] = {"brilliant", "acclaimed", "influential", "celebrated"};
const char* kPositiveOther[] = {"succeeded", "triumph", "praised"};
const char* kNegativeAdj[] = {"controversial", "hostile", "notorious"};
const char* kNegativeOther[] = {"failed", "scandal", "criticized"};

std::string make_summary(Rng& rng, bool female, const std::string& cls) {
    static const char* openers_f[] = {
        "She was born into a prominent family and married early.",
        "Her husband supported her public career.",
        "She raised three children while touring widely.",
        "As a young woman she moved to the capital.",
    };
    static const char* openers_m[] = {
        "He was born in a small town and studied law.",
        "He served in the national assembly for a decade.",
        "As a young man he joined the provincial league.",
        "He was elected to public office twice.",
    };
    static const char* profession_bits[] = {
        "The early work attracted wide attention across the region.",
        "Critics described the output as original and demanding.",
        "Several journeys abroad shaped the later period.",
        "Collaborations with contemporaries were frequent and productive.",
        "Archives preserve extensive correspondence from this period.",
        "Public lectures drew considerable audiences in later years.",
    };
    static const char* closers[] = {
        "Later biographies reassessed the whole body of work.",
        "The legacy remains a subject of active research.",
        "Commemorations continue in the place of birth.",
    };

    std::ostringstream out;
    out << (female ? openers_f[rng.below(4)] : openers_m[rng.below(4)]) << ' ';
    out << "The " << cls << " career began in earnest after a long apprenticeship. ";

    // Evaluative material drives the abstractness ratios; both polarities
    // appear for both genders so the pooled tests are defined.
    const double adj_pos = female ? 0.45 : 0.55;
    const double adj_neg = female ? 0.55 : 0.45;
    for (int s = 0; s < 4; ++s) {
        const char* pos = rng.uniform01() < adj_pos ? kPositiveAdj[rng.below(4)]
                                                    : kPositiveOther[rng.below(3)];
        const char* neg = rng.uniform01() < adj_neg ? kNegativeAdj[rng.below(3)]
                                                    : kNegativeOther[rng.below(3)];
        out << "Observers called the work " << pos << " although one episode was " << neg << ". ";
    }
    // Topic words are shared across genders (single-gender terms are
    // excluded from the PMI ranking) but skewed toward women.
    if (female) {
        if (rng.uniform01() < 0.55)
            out << "She married young and her husband encouraged the work while the children "
                   "traveled along. ";
        if (rng.uniform01() < 0.35) out << "Essays about women of the period cite the work. ";
        if (rng.uniform01() < 0.25) out << "Her mother kept the family records. ";
    } else {
        if (rng.uniform01() < 0.18)
            out << "He married late and raised children away from public life. ";
        if (rng.uniform01() < 0.10) out << "His essays about women of the period drew notice. ";
        if (rng.uniform01() < 0.08) out << "His mother kept the family records. ";
        if (rng.uniform01() < 0.5) out << "He played in the league and later served as a coach. ";
    }

    while (true) {
        out << profession_bits[rng.below(6)] << ' ';
        // Rough token floor: 250 words with headroom.
        if (out.str().size() > 1900) break;
    }
    out << closers[rng.below(3)];
    return out.str();
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string out_dir = argc > 1 ? argv[1] : "data/synthetic";
    std::filesystem::create_directories(out_dir);
    Rng rng(20160101);

    const char* classes[] = {"Person", "Artist", "Scientist", "Athlete"};
    std::vector<Record> records;
    for (int i = 0; i < 200; ++i) {
        Record r;
        std::ostringstream id;
        id << "bio" << (i < 10 ? "00" : i < 100 ? "0" : "") << i;
        r.id = id.str();
        r.female = rng.uniform01() < 0.3;
        r.cls = classes[i % 4];
        if (i == 7) {
            r.undated = true;  // kept only under --include-undated
        } else if (i == 13) {
            r.birth_year = -50;  // out of cohort bounds, retained raw
        } else {
            r.birth_year = 1700 + static_cast<int>(rng.below(310));
        }
        const double mu = 2.0 + (r.cls == std::string("Scientist") ? 2.0 : 0.0) +
                          (r.female ? 0.8 : 0.0);
        r.editions = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(2.0 * mu)));

        r.attributes.push_back("birthPlace");
        const double death_p =
            r.birth_year < 1900 ? (r.female ? 0.45 : 0.65) : 0.40;
        if (rng.uniform01() < death_p) r.attributes.push_back("deathDate");
        if (r.cls == std::string("Athlete")) {
            r.attributes.push_back("team");
            if (rng.uniform01() < 0.7) r.attributes.push_back("position");
        }
        if (r.female && rng.uniform01() < 0.35) r.attributes.push_back("spouse");
        if (!r.female && rng.uniform01() < 0.12) r.attributes.push_back("spouse");
        if (r.cls == std::string("Artist") && rng.uniform01() < 0.5)
            r.attributes.push_back("occupation");
        r.summary = make_summary(rng, r.female, r.cls);
        records.push_back(std::move(r));
    }

    {
        std::ofstream bios(out_dir + "/biographies.jsonl", std::ios::binary);
        for (const auto& r : records) {
            bios << "{\"id\":\"" << r.id << "\",\"name\":\"" << r.id << "\",\"gender\":\""
                 << (r.female ? "female" : "male") << "\",\"birth_year\":";
            if (r.undated) bios << "null";
            else bios << r.birth_year;
            bios << ",\"death_year\":null,\"class\":\"" << r.cls
                 << "\",\"edition_count\":" << r.editions << ",\"attributes\":[";
            for (std::size_t a = 0; a < r.attributes.size(); ++a) {
                if (a) bios << ',';
                bios << '"' << r.attributes[a] << '"';
            }
            bios << "],\"summary\":\"" << json_escape(r.summary) << "\"}\n";
        }
    }

    {
        // Partly rewired lattice, one direction per undirected edge: mean
        // total degree 4, clustering well inside the k=4 band.
        const auto adj = bioaudit::netstruct::watts_strogatz(200, 4, 0.45, 77);
        std::ofstream links(out_dir + "/links.tsv", std::ios::binary);
        links << "#schema_version=1\n";
        for (std::uint32_t i = 0; i < adj.size(); ++i)
            for (auto j : adj[i])
                if (i < j) {
                    const bool flip = rng.below(2) == 1;
                    links << records[flip ? j : i].id << '\t' << records[flip ? i : j].id << '\n';
                }
    }

    {
        std::ofstream attention(out_dir + "/attention.csv", std::ios::binary);
        attention << "id,regions,months\n";
        for (const auto& r : records) {
            if (r.undated || r.birth_year < 1900) continue;
            if (rng.uniform01() > 0.5) continue;
            const int regions = static_cast<int>(rng.below(9)) + (r.female ? 1 : 0);
            const int months = static_cast<int>(rng.below(120));
            attention << r.id << ',' << regions << ',' << months << '\n';
        }
    }

    {
        std::ofstream subj(out_dir + "/subjectivity.tsv", std::ios::binary);
        auto entry = [&](const char* word, const char* pos, const char* polarity) {
            subj << "type=strongsubj len=1 word1=" << word << " pos1=" << pos
                 << " stemmed1=n priorpolarity=" << polarity << "\n";
        };
        for (const char* w : kPositiveAdj) entry(w, "adj", "positive");
        entry("succeeded", "verb", "positive");
        entry("triumph", "noun", "positive");
        entry("praised", "verb", "positive");
        for (const char* w : kNegativeAdj) entry(w, "adj", "negative");
        entry("failed", "verb", "negative");
        entry("scandal", "noun", "negative");
        entry("criticized", "verb", "negative");
        entry("original", "adj", "neutral");  // dropped by the loader
    }

    {
        std::ofstream topics(out_dir + "/topics.tsv", std::ios::binary);
        topics << "# bundled defaults plus corpus-specific additions\n";
        for (const char* t : {"man", "women", "mr", "mrs", "lady", "gentleman", "gay", "lesbian",
                              "woman"})
            topics << t << "\tgender\n";
        for (const char* t : {"married", "divorced", "couple", "husband", "wife", "marriage"})
            topics << t << "\trelationship\n";
        for (const char* t : {"kids", "children", "mother", "grandmother", "family"})
            topics << t << "\tfamily\n";
    }

    std::cout << "fixture written to " << out_dir << "\n";
    return 0;
}
