#pragma once

// JSON serialization for the result types that land in report artifacts.
// Field order is normalized (nlohmann::json sorts keys) and doubles take
// their shortest round-trip form, so identical runs serialize to
// identical bytes.

#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "bioaudit/corpus.hpp"
#include "bioaudit/lexical.hpp"
#include "bioaudit/lingbias.hpp"
#include "bioaudit/metadata.hpp"
#include "bioaudit/netstruct.hpp"
#include "bioaudit/notability.hpp"
#include "bioaudit/regression.hpp"
#include "bioaudit/statkit.hpp"

namespace bioaudit::report {

using nlohmann::json;

inline json to_json(const statkit::TestResult& r) {
    return {{"statistic", r.statistic},
            {"dof", r.dof},
            {"p_value", r.p_value},
            {"effect_size_w", r.effect_size_w}};
}

inline json to_json(const statkit::RegressionFit& fit) {
    json terms = json::array();
    for (const auto& t : fit.terms) {
        json term{{"name", t.name},
                  {"beta", t.beta},
                  {"std_err", t.std_err},
                  {"p_value", t.p_value}};
        if (fit.family == statkit::Family::negative_binomial) term["irr"] = t.irr;
        terms.push_back(std::move(term));
    }
    json out{{"family", fit.family == statkit::Family::ols ? "ols" : "negative_binomial"},
             {"n_obs", fit.n_obs},
             {"aic", fit.aic},
             {"log_likelihood", fit.log_likelihood},
             {"terms", std::move(terms)}};
    if (fit.dispersion) out["dispersion"] = *fit.dispersion;
    if (fit.r_squared) out["r_squared"] = *fit.r_squared;
    return out;
}

inline json to_json(const corpus::LoadDiagnostics& d) {
    json rejected = json::object();
    for (const auto& [k, v] : d.rejected) rejected[k] = v;
    json edges = json::object();
    for (const auto& [k, v] : d.edge_issues) edges[k] = v;
    return {{"rejected_records", rejected}, {"edge_issues", edges}, {"warnings", d.warnings}};
}

inline json to_json(const corpus::CorpusSummary& s) {
    json cohorts = json::object();
    for (const auto& c : s.cohorts)
        cohorts[c.era] = {{"n", c.n}, {"women", c.n_women}, {"women_fraction", c.women_fraction}};
    return {{"cohorts", cohorts}};
}

inline json to_json(const notability::RatioCurve& curve) {
    json bins = json::array();
    for (const auto& b : curve.bins) {
        json bin{{"bin", b.label}, {"men", b.men}, {"women", b.women}};
        bin["observed_ratio"] = b.observed_ratio ? json(*b.observed_ratio) : json(nullptr);
        bin["baseline_ratio_mean"] =
            b.baseline_ratio_mean ? json(*b.baseline_ratio_mean) : json(nullptr);
        bin["baseline_ratio_ci_low"] =
            b.baseline_ratio_ci_low ? json(*b.baseline_ratio_ci_low) : json(nullptr);
        bin["baseline_ratio_ci_high"] =
            b.baseline_ratio_ci_high ? json(*b.baseline_ratio_ci_high) : json(nullptr);
        bins.push_back(std::move(bin));
    }
    return {{"bucketing", notability::to_string(curve.bucketing)},
            {"reshuffles", curve.reshuffles},
            {"bins", std::move(bins)}};
}

inline json to_json(const notability::AttentionResult& a) {
    auto stats = [](const notability::GenderStats& s) {
        return json{{"mean_male", s.mean_male},
                    {"mean_female", s.mean_female},
                    {"median_male", s.median_male},
                    {"median_female", s.median_female}};
    };
    return {{"regions_fit", to_json(a.regions_fit)},
            {"months_fit", to_json(a.months_fit)},
            {"regions", stats(a.regions)},
            {"months", stats(a.months)},
            {"n_used", a.n_used},
            {"n_unresolved", a.n_unresolved},
            {"n_invalid", a.n_invalid}};
}

inline json to_json(const lexical::CategoryTable& table) {
    auto row = [](const lexical::CategoryRow& r) {
        json out = json::object();
        for (std::size_t i = 0; i < 4; ++i) {
            const auto* name = lexical::to_string(static_cast<lexical::Topic>(i));
            out[name] = {{"count", r.counts[i]}, {"pct", r.proportions[i]}};
        }
        return out;
    };
    return {{"men", row(table.men)}, {"women", row(table.women)}, {"test", to_json(table.test)}};
}

inline json to_json(const lexical::RankedList& list, std::size_t head = 30) {
    json terms = json::array();
    for (std::size_t i = 0; i < list.terms.size() && i < head; ++i)
        terms.push_back({{"term", list.terms[i].term}, {"pmi", list.terms[i].pmi}});
    return terms;
}

inline json to_json(const lingbias::AggregateLibResult& agg) {
    auto row = [](const lingbias::PooledRow& r) {
        return json{{"w_plus", r.w_plus},
                    {"a_plus", r.a_plus},
                    {"w_minus", r.w_minus},
                    {"a_minus", r.a_minus},
                    {"pct_abstract_positive", r.pct_abstract_positive},
                    {"pct_abstract_negative", r.pct_abstract_negative}};
    };
    auto direction = [](const lingbias::DirectionalTest& t) {
        return json{{"chi_square", to_json(t.chi_square)},
                    {"one_tailed_p", t.one_tailed_p},
                    {"direction_matches_prediction", t.direction_matches_prediction}};
    };
    json out{{"men", row(agg.men)},
             {"women", row(agg.women)},
             {"positive", direction(agg.positive)},
             {"negative", direction(agg.negative)}};
    out["pct_change_positive"] =
        agg.pct_change_positive ? json(*agg.pct_change_positive) : json(nullptr);
    out["pct_change_negative"] =
        agg.pct_change_negative ? json(*agg.pct_change_negative) : json(nullptr);
    return out;
}

inline json to_json(const metadata::AttributeAudit& a) {
    return {{"attribute", a.attribute},
            {"pct_male", a.pct_male},
            {"pct_female", a.pct_female},
            {"present_male", a.present_male},
            {"present_female", a.present_female},
            {"test", to_json(a.test)},
            {"qualifies", a.qualifies},
            {"bonferroni_significant", a.bonferroni_significant}};
}

inline json to_json(const netstruct::EdgeMix& mix) {
    return {{"edges", mix.edge_count},
            {"m_to_m", mix.mm},
            {"m_to_w", mix.mw},
            {"w_to_m", mix.wm},
            {"w_to_w", mix.ww},
            {"pct_m_to_m", mix.pct_mm},
            {"pct_m_to_w", mix.pct_mw},
            {"pct_w_to_m", mix.pct_wm},
            {"pct_w_to_w", mix.pct_ww}};
}

inline json to_json(const netstruct::TopkResult& topk) {
    json curve = json::array();
    for (const auto& p : topk.curve)
        curve.push_back({{"k", p.k}, {"fraction_women", p.fraction_women}});
    auto listing = [](const std::vector<std::pair<std::string, double>>& rows) {
        json out = json::array();
        for (const auto& [id, score] : rows) out.push_back({{"id", id}, {"score", score}});
        return out;
    };
    return {{"curve", std::move(curve)},
            {"top30_male", listing(topk.top_male)},
            {"top30_female", listing(topk.top_female)},
            {"warnings", topk.warnings}};
}

}  // namespace bioaudit::report
