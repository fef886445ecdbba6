#pragma once

// Hyperlink-network audit: PageRank centrality, gender edge-mix against
// three null models (uniform edge shuffle, degree-preserving double edge
// swap, Watts-Strogatz small world tuned by Brent root finding to match
// the observed clustering coefficient), and women-fraction-at-top-k curves.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "bioaudit/brent.hpp"
#include "bioaudit/corpus.hpp"
#include "bioaudit/rng.hpp"
#include "bioaudit/statkit.hpp"

namespace bioaudit::netstruct {

struct DirectedGraph {
    std::vector<std::string> ids;            // node -> biography id
    std::vector<corpus::Gender> genders;     // node -> gender label
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

    std::size_t node_count() const { return ids.size(); }
    std::size_t edge_count() const { return edges.size(); }

    std::vector<std::size_t> out_degrees() const {
        std::vector<std::size_t> deg(node_count(), 0);
        for (const auto& [u, v] : edges) ++deg[u];
        return deg;
    }
    std::vector<std::size_t> in_degrees() const {
        std::vector<std::size_t> deg(node_count(), 0);
        for (const auto& [u, v] : edges) ++deg[v];
        return deg;
    }

    std::size_t women() const {
        std::size_t w = 0;
        for (auto g : genders)
            if (g == corpus::Gender::female) ++w;
        return w;
    }
};

struct BuildDiagnostics {
    std::size_t singletons_removed = 0;
    std::size_t singletons_removed_female = 0;
    double removed_female_share = 0.0;
};

// Nodes are the cohort members; edges are the corpus links with both
// endpoints inside the cohort. Singletons are nodes with total degree 0.
inline DirectedGraph build_graph(const corpus::CohortView& view, bool drop_singletons = true,
                                 BuildDiagnostics* diagnostics = nullptr) {
    const auto& corpus_ref = view.corpus();
    std::vector<std::int64_t> node_of(corpus_ref.records.size(), -1);
    for (std::size_t i = 0; i < view.size(); ++i) node_of[view.indices()[i]] = static_cast<std::int64_t>(i);

    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const auto& e : corpus_ref.edges) {
        const auto u = node_of[e.source], v = node_of[e.target];
        if (u < 0 || v < 0) continue;
        edges.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
    }

    std::vector<bool> keep(view.size(), !drop_singletons);
    if (drop_singletons)
        for (const auto& [u, v] : edges) keep[u] = keep[v] = true;

    DirectedGraph g;
    std::vector<std::int64_t> remap(view.size(), -1);
    std::size_t removed = 0, removed_female = 0;
    for (std::size_t i = 0; i < view.size(); ++i) {
        const auto& bio = view[i];
        if (!keep[i]) {
            ++removed;
            if (bio.gender == corpus::Gender::female) ++removed_female;
            continue;
        }
        remap[i] = static_cast<std::int64_t>(g.ids.size());
        g.ids.push_back(bio.id);
        g.genders.push_back(bio.gender);
    }
    for (const auto& [u, v] : edges)
        g.edges.emplace_back(static_cast<std::uint32_t>(remap[u]),
                             static_cast<std::uint32_t>(remap[v]));

    if (diagnostics) {
        diagnostics->singletons_removed = removed;
        diagnostics->singletons_removed_female = removed_female;
        diagnostics->removed_female_share =
            removed > 0 ? static_cast<double>(removed_female) / static_cast<double>(removed) : 0.0;
    }
    if (g.node_count() == 0) throw std::runtime_error("graph is empty after filtering");
    return g;
}

// --- PageRank ----------------------------------------------------------------

// Power iteration with uniform teleport; dangling mass is redistributed
// uniformly, so the scores always sum to one.
inline std::vector<double> pagerank(const DirectedGraph& g, double damping = 0.85,
                                    double tol = 1e-10, int max_iter = 200) {
    const std::size_t n = g.node_count();
    if (n == 0) throw std::invalid_argument("pagerank: empty graph");
    const auto outdeg = g.out_degrees();
    std::vector<double> x(n, 1.0 / static_cast<double>(n)), next(n);

    double delta = 0.0;
    for (int iter = 0; iter < max_iter; ++iter) {
        double dangling = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (outdeg[i] == 0) dangling += x[i];
        const double base =
            (1.0 - damping) / static_cast<double>(n) + damping * dangling / static_cast<double>(n);
        std::fill(next.begin(), next.end(), base);
        for (const auto& [u, v] : g.edges)
            next[v] += damping * x[u] / static_cast<double>(outdeg[u]);

        delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) delta += std::fabs(next[i] - x[i]);
        x.swap(next);
        if (delta < tol) return x;
    }
    throw std::runtime_error("pagerank did not converge within " + std::to_string(max_iter) +
                             " iterations (last L1 delta " + std::to_string(delta) + ")");
}

// --- clustering ---------------------------------------------------------------

// Average local clustering coefficient; nodes of degree < 2 contribute 0.
inline double clustering_coefficient(const std::vector<std::vector<std::uint32_t>>& adj) {
    const std::size_t n = adj.size();
    if (n == 0) return 0.0;
    auto has = [&](std::uint32_t a, std::uint32_t b) {
        return std::binary_search(adj[a].begin(), adj[a].end(), b);
    };
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& nb = adj[i];
        const std::size_t k = nb.size();
        if (k < 2) continue;
        std::size_t closed = 0;
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a + 1; b < k; ++b)
                if (has(nb[a], nb[b])) ++closed;
        total += 2.0 * static_cast<double>(closed) /
                 (static_cast<double>(k) * static_cast<double>(k - 1));
    }
    return total / static_cast<double>(n);
}

// Undirected projection of the directed edge set, as sorted adjacency.
inline std::vector<std::vector<std::uint32_t>> undirected_projection(const DirectedGraph& g) {
    std::vector<std::vector<std::uint32_t>> adj(g.node_count());
    for (const auto& [u, v] : g.edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    for (auto& nb : adj) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    return adj;
}

// --- Watts-Strogatz -----------------------------------------------------------

// Ring lattice over n nodes with even degree k, each lattice edge rewired
// with probability beta. Edge e draws its decisions from its own seed
// substream, so for a fixed seed the rewired edge set grows monotonically
// with beta; that keeps clustering(beta) a well-behaved deterministic
// function for the Brent solve.
inline std::vector<std::vector<std::uint32_t>> watts_strogatz(std::size_t n, std::size_t k,
                                                              double beta, std::uint64_t seed) {
    if (k < 2 || k % 2 != 0) throw std::invalid_argument("watts_strogatz: k must be even, >= 2");
    if (n <= k) throw std::invalid_argument("watts_strogatz: need n > k");

    std::vector<std::unordered_set<std::uint32_t>> adj(n);
    auto add_edge = [&](std::uint32_t a, std::uint32_t b) {
        adj[a].insert(b);
        adj[b].insert(a);
    };
    auto remove_edge = [&](std::uint32_t a, std::uint32_t b) {
        adj[a].erase(b);
        adj[b].erase(a);
    };
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t d = 1; d <= k / 2; ++d)
            add_edge(i, static_cast<std::uint32_t>((i + d) % n));

    std::size_t edge_index = 0;
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t d = 1; d <= k / 2; ++d, ++edge_index) {
            const auto j = static_cast<std::uint32_t>((i + d) % n);
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(edge_index)));
            if (rng.uniform01() >= beta) continue;
            if (!adj[i].count(j)) continue;
            std::uint32_t target = i;
            bool found = false;
            for (std::size_t attempt = 0; attempt < 4 * n; ++attempt) {
                target = static_cast<std::uint32_t>(rng.below(n));
                if (target != i && !adj[i].count(target)) {
                    found = true;
                    break;
                }
            }
            if (!found) continue;  // node saturated; keep the lattice edge
            remove_edge(i, j);
            add_edge(i, target);
        }

    std::vector<std::vector<std::uint32_t>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].assign(adj[i].begin(), adj[i].end());
        std::sort(out[i].begin(), out[i].end());
    }
    return out;
}

// Closed form for the beta = 0 ring lattice: 3(k-2) / (4(k-1)).
inline double ring_lattice_clustering(std::size_t k) {
    return 3.0 * (static_cast<double>(k) - 2.0) / (4.0 * (static_cast<double>(k) - 1.0));
}

// --- null models --------------------------------------------------------------

enum class NullModelKind : std::uint8_t { random_shuffle, degree_sequence, small_world };

inline const char* to_string(NullModelKind k) {
    switch (k) {
        case NullModelKind::random_shuffle: return "random";
        case NullModelKind::degree_sequence: return "degree_sequence";
        default: return "small_world";
    }
}

struct NullModel {
    DirectedGraph graph;
    std::map<std::string, double> diagnostics;
};

namespace detail {

inline std::uint64_t edge_key(std::uint32_t u, std::uint32_t v) {
    return (static_cast<std::uint64_t>(u) << 32) | v;
}

inline NullModel random_shuffle_null(const DirectedGraph& g, std::uint64_t seed) {
    NullModel out;
    out.graph.ids = g.ids;
    out.graph.genders = g.genders;
    const std::size_t n = g.node_count();
    Rng rng(derive_seed(seed, "random_shuffle"));

    // One replacement candidate per original edge; self-loops are dropped
    // and duplicates collapsed afterwards, with the deviation reported.
    std::unordered_set<std::uint64_t> seen;
    std::size_t self_loops = 0, duplicates = 0;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const auto u = static_cast<std::uint32_t>(rng.below(n));
        const auto v = static_cast<std::uint32_t>(rng.below(n));
        if (u == v) {
            ++self_loops;
            continue;
        }
        if (!seen.insert(edge_key(u, v)).second) {
            ++duplicates;
            continue;
        }
        out.graph.edges.emplace_back(u, v);
    }
    out.diagnostics["candidates_drawn"] = static_cast<double>(g.edge_count());
    out.diagnostics["dropped_self_loops"] = static_cast<double>(self_loops);
    out.diagnostics["collapsed_duplicates"] = static_cast<double>(duplicates);
    return out;
}

inline NullModel degree_sequence_null(const DirectedGraph& g, std::uint64_t seed) {
    NullModel out;
    out.graph.ids = g.ids;
    out.graph.genders = g.genders;
    out.graph.edges = g.edges;
    auto& edges = out.graph.edges;
    const std::size_t m = edges.size();
    Rng rng(derive_seed(seed, "degree_sequence"));

    std::unordered_set<std::uint64_t> present;
    present.reserve(m * 2);
    for (const auto& [u, v] : edges) present.insert(edge_key(u, v));

    // One swap attempt per edge; attempts that would create a self-loop or
    // a duplicate leave the graph unchanged and the next attempt draws a
    // fresh pair. In/out degrees are invariant under every accepted swap.
    std::size_t successes = 0;
    for (std::size_t attempt = 0; attempt < m; ++attempt) {
        const std::size_t e1 = static_cast<std::size_t>(rng.below(m));
        const std::size_t e2 = static_cast<std::size_t>(rng.below(m));
        if (e1 == e2) continue;
        const auto [u, v] = edges[e1];
        const auto [i, j] = edges[e2];
        if (u == j || i == v) continue;
        if (present.count(edge_key(u, j)) || present.count(edge_key(i, v))) continue;
        present.erase(edge_key(u, v));
        present.erase(edge_key(i, j));
        present.insert(edge_key(u, j));
        present.insert(edge_key(i, v));
        edges[e1] = {u, j};
        edges[e2] = {i, v};
        ++successes;
    }
    out.diagnostics["swap_attempts"] = static_cast<double>(m);
    out.diagnostics["successful_swaps"] = static_cast<double>(successes);
    return out;
}

inline NullModel small_world_null(const DirectedGraph& g, std::uint64_t seed) {
    const std::size_t n = g.node_count();
    const double mean_out = static_cast<double>(g.edge_count()) / static_cast<double>(n);
    const std::size_t k =
        std::max<std::size_t>(2, 2 * static_cast<std::size_t>(std::llround(mean_out)));
    if (n <= k)
        throw std::runtime_error("small_world: graph too small for lattice degree " +
                                 std::to_string(k));

    const double target = clustering_coefficient(undirected_projection(g));
    const std::uint64_t ws_seed = derive_seed(seed, "small_world");

    auto clustering_at = [&](double beta) {
        return clustering_coefficient(watts_strogatz(n, k, beta, ws_seed));
    };
    const double c_lattice = clustering_at(0.0);
    const double c_random = clustering_at(1.0);
    constexpr double f_tol = 0.005;

    double beta;
    if (std::fabs(c_lattice - target) <= f_tol) {
        beta = 0.0;
    } else if (std::fabs(c_random - target) <= f_tol) {
        beta = 1.0;
    } else if ((c_lattice - target) * (c_random - target) > 0.0) {
        throw std::runtime_error(
            "small_world: target clustering " + std::to_string(target) +
            " outside the achievable interval [" + std::to_string(std::min(c_random, c_lattice)) +
            ", " + std::to_string(std::max(c_random, c_lattice)) + "]");
    } else {
        auto objective = [&](double b) { return clustering_at(b) - target; };
        const auto root = brent_root(objective, 0.0, 1.0, 1e-4, f_tol);
        beta = root.x;
    }

    const auto adj = watts_strogatz(n, k, beta, ws_seed);

    NullModel out;
    out.graph.ids = g.ids;
    out.graph.genders = g.genders;
    Rng label_rng(derive_seed(seed, "small_world_labels"));
    label_rng.shuffle(out.graph.genders);  // same multiset, proportions preserved

    for (std::uint32_t i = 0; i < adj.size(); ++i)
        for (auto j : adj[i]) {
            out.graph.edges.emplace_back(i, j);  // both directions appear as i runs over nodes
        }
    out.diagnostics["beta"] = beta;
    out.diagnostics["lattice_degree"] = static_cast<double>(k);
    out.diagnostics["target_clustering"] = target;
    out.diagnostics["achieved_clustering"] = clustering_coefficient(adj);
    return out;
}

}  // namespace detail

inline NullModel generate_null(const DirectedGraph& g, NullModelKind kind, std::uint64_t seed) {
    switch (kind) {
        case NullModelKind::random_shuffle: return detail::random_shuffle_null(g, seed);
        case NullModelKind::degree_sequence: return detail::degree_sequence_null(g, seed);
        default: return detail::small_world_null(g, seed);
    }
}

// --- edge mix -----------------------------------------------------------------

struct EdgeMix {
    std::size_t mm = 0, mw = 0, wm = 0, ww = 0;
    double pct_mm = 0.0, pct_mw = 0.0, pct_wm = 0.0, pct_ww = 0.0;  // row percentages
    std::size_t edge_count = 0;
};

inline EdgeMix edge_mix(const DirectedGraph& g) {
    EdgeMix mix;
    for (const auto& [u, v] : g.edges) {
        const bool fu = g.genders[u] == corpus::Gender::female;
        const bool fv = g.genders[v] == corpus::Gender::female;
        if (!fu && !fv) ++mix.mm;
        else if (!fu && fv) ++mix.mw;
        else if (fu && !fv) ++mix.wm;
        else ++mix.ww;
    }
    mix.edge_count = g.edge_count();
    const double m_total = static_cast<double>(mix.mm + mix.mw);
    const double w_total = static_cast<double>(mix.wm + mix.ww);
    if (m_total > 0) {
        mix.pct_mm = 100.0 * static_cast<double>(mix.mm) / m_total;
        mix.pct_mw = 100.0 * static_cast<double>(mix.mw) / m_total;
    }
    if (w_total > 0) {
        mix.pct_wm = 100.0 * static_cast<double>(mix.wm) / w_total;
        mix.pct_ww = 100.0 * static_cast<double>(mix.ww) / w_total;
    }
    return mix;
}

struct MixComparison {
    // Target-gender split of male-sourced edges, observed vs baseline.
    std::optional<statkit::TestResult> m_to_w;
    // Same for female-sourced edges.
    std::optional<statkit::TestResult> w_to_w;
};

inline MixComparison compare_mix(const EdgeMix& observed, const EdgeMix& baseline) {
    MixComparison out;
    auto row_test = [](double obs_same, double obs_cross, double base_same,
                       double base_cross) -> std::optional<statkit::TestResult> {
        if (obs_same + obs_cross == 0.0 || base_same + base_cross == 0.0) return std::nullopt;
        statkit::ContingencyTable t;
        t.row_labels = {"observed", "baseline"};
        t.col_labels = {"same_gender", "cross_gender"};
        t.rows = {{obs_same, obs_cross}, {base_same, base_cross}};
        // A zero column (e.g. no cross-gender edges anywhere) carries no
        // information for the 2x2; report a zero-statistic result.
        if (obs_same + base_same == 0.0 || obs_cross + base_cross == 0.0)
            return statkit::TestResult{0.0, 1, 1.0, 0.0};
        return statkit::chi_square_independence(t);
    };
    out.m_to_w = row_test(static_cast<double>(observed.mm), static_cast<double>(observed.mw),
                          static_cast<double>(baseline.mm), static_cast<double>(baseline.mw));
    out.w_to_w = row_test(static_cast<double>(observed.wm), static_cast<double>(observed.ww),
                          static_cast<double>(baseline.wm), static_cast<double>(baseline.ww));
    return out;
}

// --- top-k women fraction -----------------------------------------------------

struct TopkPoint {
    std::size_t k = 0;
    double fraction_women = 0.0;
};

struct TopkResult {
    std::vector<TopkPoint> curve;
    std::vector<std::pair<std::string, double>> top_male;    // up to 30, by rank
    std::vector<std::pair<std::string, double>> top_female;
    std::vector<std::string> warnings;
};

inline std::vector<std::size_t> default_topk_ks(std::size_t n) {
    std::vector<std::size_t> ks;
    for (std::size_t decade = 1;; decade *= 10) {
        for (std::size_t mult : {1, 2, 5}) {
            const std::size_t k = decade * mult;
            if (k >= n) {
                ks.push_back(n);
                return ks;
            }
            ks.push_back(k);
        }
        if (decade > n) break;
    }
    ks.push_back(n);
    return ks;
}

// Ties broken by descending score then ascending id, so rankings are
// deterministic across runs and platforms.
inline TopkResult topk_fraction(const std::vector<double>& scores, const DirectedGraph& g,
                                std::vector<std::size_t> ks) {
    const std::size_t n = g.node_count();
    if (scores.size() != n) throw std::invalid_argument("topk_fraction: score/node mismatch");

    std::vector<std::uint32_t> order(n);
    for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return g.ids[a] < g.ids[b];
    });

    TopkResult out;
    std::vector<std::size_t> women_prefix(n + 1, 0);
    for (std::size_t r = 0; r < n; ++r)
        women_prefix[r + 1] =
            women_prefix[r] + (g.genders[order[r]] == corpus::Gender::female ? 1 : 0);

    for (auto k : ks) {
        if (k == 0) continue;
        if (k > n) {
            out.warnings.push_back("k=" + std::to_string(k) + " clamped to n=" + std::to_string(n));
            k = n;
        }
        out.curve.push_back(
            {k, static_cast<double>(women_prefix[k]) / static_cast<double>(k)});
    }

    for (std::size_t r = 0; r < n; ++r) {
        auto& bucket =
            g.genders[order[r]] == corpus::Gender::female ? out.top_female : out.top_male;
        if (bucket.size() < 30) bucket.emplace_back(g.ids[order[r]], scores[order[r]]);
        if (out.top_male.size() >= 30 && out.top_female.size() >= 30) break;
    }
    return out;
}

}  // namespace bioaudit::netstruct
