#pragma once

// Infobox-attribute asymmetry audit. For every attribute present anywhere
// in the cohort: per-gender presence percentages, a 2x2 chi-square
// (gender x has/has-not), and a qualifying flag for attributes present in
// at least min_presence_pct of either gender. No multiple-testing
// correction is applied to the primary p-values; a Bonferroni-adjusted
// significance flag is carried as an extra, clearly labeled field.
// Effect size is the standard Cohen's w = sqrt(chi2/N); on a 2x2 table it
// cannot exceed 1.

#include <algorithm>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "bioaudit/corpus.hpp"
#include "bioaudit/csv.hpp"
#include "bioaudit/statkit.hpp"

namespace bioaudit::metadata {

struct AttributeAudit {
    std::string attribute;
    std::size_t present_male = 0;
    std::size_t present_female = 0;
    double pct_male = 0.0;
    double pct_female = 0.0;
    statkit::TestResult test;
    bool qualifies = false;
    bool bonferroni_significant = false;  // alpha 0.01 over all audited attributes
};

inline std::vector<AttributeAudit> audit_attributes(const corpus::CohortView& view,
                                                    double min_presence_pct = 1.0,
                                                    double bonferroni_alpha = 0.01) {
    if (view.empty()) throw std::invalid_argument("audit_attributes: empty cohort");
    const double n_m = static_cast<double>(view.men());
    const double n_f = static_cast<double>(view.women());

    std::map<std::string, std::pair<std::size_t, std::size_t>> presence;  // attr -> (men, women)
    for (std::size_t i = 0; i < view.size(); ++i) {
        const auto& bio = view[i];
        for (const auto& attr : bio.attributes) {
            auto& cell = presence[attr];
            if (bio.gender == corpus::Gender::female) ++cell.second; else ++cell.first;
        }
    }

    std::vector<AttributeAudit> out;
    out.reserve(presence.size());
    for (const auto& [attr, cell] : presence) {
        AttributeAudit a;
        a.attribute = attr;
        a.present_male = cell.first;
        a.present_female = cell.second;
        a.pct_male = n_m > 0 ? 100.0 * static_cast<double>(cell.first) / n_m : 0.0;
        a.pct_female = n_f > 0 ? 100.0 * static_cast<double>(cell.second) / n_f : 0.0;

        const double absent_m = n_m - static_cast<double>(cell.first);
        const double absent_f = n_f - static_cast<double>(cell.second);
        if ((absent_m == 0.0 && absent_f == 0.0) || (cell.first == 0 && cell.second == 0)) {
            // Attribute present in all (or no) records of both genders: the
            // proportions are identical by construction, statistic 0.
            a.test = {0.0, 1, 1.0, 0.0};
        } else {
            statkit::ContingencyTable t;
            t.row_labels = {"men", "women"};
            t.col_labels = {"has", "has_not"};
            t.rows = {{static_cast<double>(cell.first), absent_m},
                      {static_cast<double>(cell.second), absent_f}};
            a.test = statkit::chi_square_independence(t);
        }
        a.qualifies = std::max(a.pct_male, a.pct_female) >= min_presence_pct;
        out.push_back(std::move(a));
    }
    const double adjusted =
        out.empty() ? bonferroni_alpha : bonferroni_alpha / static_cast<double>(out.size());
    for (auto& a : out) a.bonferroni_significant = a.test.p_value <= adjusted;
    return out;  // std::map iteration already sorted by attribute name
}

inline void emit_attribute_csv(const std::vector<AttributeAudit>& audits, std::ostream& out) {
    out << "attribute,pct_m,pct_f,chi2,dof,p,w,qualifies,bonferroni_significant\n";
    for (const auto& a : audits)
        out << a.attribute << ',' << format_double(a.pct_male) << ',' << format_double(a.pct_female)
            << ',' << format_double(a.test.statistic) << ',' << a.test.dof << ','
            << format_double(a.test.p_value) << ',' << format_double(a.test.effect_size_w) << ','
            << (a.qualifies ? "true" : "false") << ','
            << (a.bonferroni_significant ? "true" : "false") << '\n';
}

}  // namespace bioaudit::metadata
