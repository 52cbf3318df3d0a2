#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "heightlab/enrichment.hpp"
#include "heightlab/error.hpp"
#include "heightlab/gibbs.hpp"
#include "heightlab/lattice.hpp"

namespace heightlab {

enum class EdgeState : std::uint8_t { unknown, plain, excited };

enum class BoundaryType { positive_unrevealed_state, zero_excited_plus_half };

inline const char* to_string(BoundaryType t) {
    return t == BoundaryType::positive_unrevealed_state ? "positive_unrevealed_state" : "zero_excited_plus_half";
}

enum class Direction { below, above };

/// Directed boundary edge x -> y: x revealed, y in R_n.
struct BoundaryEdge {
    int x;
    int y;
    int edge;
    std::optional<BoundaryType> type; // nullopt: matches neither type (a violation)

    bool operator==(const BoundaryEdge&) const = default;
};

struct ExplorationResult {
    std::vector<std::uint8_t> revealed; // per vertex
    std::vector<int> unrevealed;        // R_n, ascending
    bool root_unrevealed = false;       // event A_n
    std::vector<BoundaryEdge> boundary_edges;
    std::vector<EdgeState> edge_states;
    std::vector<std::optional<HalfInt>> revealed_midpoints;
    std::vector<int> reveal_order; // vertices revealed after the initial complement, in order
    std::vector<int> edge_order;   // edges selected (enriched mode), in order
    long steps = 0;
    long violations = 0;          // boundary edges of neither type
    int edge_budget = 0;          // |E(Lambda_n)|

    bool operator==(const ExplorationResult&) const = default;
};

namespace detail {

/// Vertices within distance n of the root.
inline std::vector<std::uint8_t> ball_mask(const PlanarPatch& p, int n) {
    const auto d = p.distances_from({p.root()});
    std::vector<std::uint8_t> in(p.vertex_count(), 0);
    for (int v = 0; v < p.vertex_count(); ++v) in[v] = (d[v] >= 0 && d[v] <= n) ? 1 : 0;
    return in;
}

inline int edges_touching(const PlanarPatch& p, const std::vector<std::uint8_t>& in) {
    int k = 0;
    for (const auto& e : p.edges()) k += (in[e.a] || in[e.b]) ? 1 : 0;
    return k;
}

inline void finish_result(ExplorationResult& r, const PlanarPatch& p) {
    for (int v = 0; v < p.vertex_count(); ++v)
        if (!r.revealed[v]) r.unrevealed.push_back(v);
    r.root_unrevealed = !r.revealed[p.root()];
}

} // namespace detail

/// Reveals the complement of Lambda_n, then repeatedly any unrevealed vertex
/// next to a revealed vertex with phi < a (phi > a for `above`). Default
/// order is FIFO by (generation, vertex id); with `order_rng` set, each step
/// picks a uniformly random eligible vertex instead.
inline ExplorationResult explore_plain(const HeightConfig& c, const PlanarPatch& p, int n, int a, Direction dir,
                                       Rng* order_rng = nullptr) {
    if (dir == Direction::above) return explore_plain(negated(c), p, n, -a, Direction::below, order_rng);
    const auto in = detail::ball_mask(p, n);
    ExplorationResult r;
    r.edge_budget = detail::edges_touching(p, in);
    r.revealed.assign(p.vertex_count(), 0);
    r.edge_states.assign(p.edge_count(), EdgeState::unknown);
    r.revealed_midpoints.assign(p.edge_count(), std::nullopt);
    for (int v = 0; v < p.vertex_count(); ++v) r.revealed[v] = in[v] ? 0 : 1;

    auto eligible = [&](int y) {
        if (r.revealed[y]) return false;
        for (const auto& inc : p.rotation(y))
            if (r.revealed[inc.neighbour] && c.heights[inc.neighbour] < a) return true;
        return false;
    };
    if (order_rng) {
        for (;;) {
            std::vector<int> cand;
            for (int v = 0; v < p.vertex_count(); ++v)
                if (eligible(v)) cand.push_back(v);
            if (cand.empty()) break;
            const int y = cand[std::uniform_int_distribution<std::size_t>(0, cand.size() - 1)(*order_rng)];
            r.revealed[y] = 1;
            r.reveal_order.push_back(y);
            ++r.steps;
        }
    } else {
        std::vector<int> generation;
        for (int v = 0; v < p.vertex_count(); ++v)
            if (eligible(v)) generation.push_back(v);
        while (!generation.empty()) {
            std::set<int> next;
            for (int y : generation) {
                r.revealed[y] = 1;
                r.reveal_order.push_back(y);
                ++r.steps;
            }
            for (int y : generation) {
                if (c.heights[y] >= a) continue;
                for (const auto& inc : p.rotation(y))
                    if (!r.revealed[inc.neighbour]) next.insert(inc.neighbour);
            }
            generation.assign(next.begin(), next.end());
        }
    }
    detail::finish_result(r, p);
    for (int y : r.unrevealed)
        for (const auto& inc : p.rotation(y))
            if (r.revealed[inc.neighbour]) {
                BoundaryEdge b{inc.neighbour, y, inc.edge, std::nullopt};
                if (c.heights[inc.neighbour] >= a) b.type = BoundaryType::positive_unrevealed_state;
                r.boundary_edges.push_back(b);
            }
    std::sort(r.boundary_edges.begin(), r.boundary_edges.end(),
              [](const BoundaryEdge& l, const BoundaryEdge& q) { return std::pair(l.edge, l.x) < std::pair(q.edge, q.x); });
    for (const auto& b : r.boundary_edges) r.violations += b.type ? 0 : 1;
    return r;
}

/// Enriched exploration driven by a fully sampled enriched configuration
/// (coins attached). Directed edges x -> y are selected FIFO as they become
/// eligible: x revealed with phi(x) <= 0, y unrevealed, edge not yet
/// selected. phi(x) < 0 reveals y; phi(x) = 0 reveals the edge state, and
/// then y unless the edge is excited with midpoint +1/2.
inline ExplorationResult explore_enriched(const EnrichedConfig& e, const PlanarPatch& p, int n) {
    if (!e.coins) fail(ErrorCode::invalid_argument, "enriched exploration needs the coin field");
    const auto& phi = e.base.heights;
    const auto in = detail::ball_mask(p, n);
    ExplorationResult r;
    r.edge_budget = detail::edges_touching(p, in);
    r.revealed.assign(p.vertex_count(), 0);
    r.edge_states.assign(p.edge_count(), EdgeState::unknown);
    r.revealed_midpoints.assign(p.edge_count(), std::nullopt);
    std::vector<std::uint8_t> selected(p.edge_count(), 0);
    std::deque<std::pair<int, int>> queue; // (x, dart from x)

    auto push_from = [&](int x) {
        if (phi[x] > 0) return;
        for (const auto& inc : p.rotation(x))
            if (!r.revealed[inc.neighbour] && !selected[inc.edge]) queue.push_back({x, inc.dart});
    };
    auto reveal = [&](int y) {
        r.revealed[y] = 1;
        r.reveal_order.push_back(y);
        push_from(y);
    };
    for (int v = 0; v < p.vertex_count(); ++v) r.revealed[v] = in[v] ? 0 : 1;
    for (int v = 0; v < p.vertex_count(); ++v)
        if (r.revealed[v]) push_from(v);

    while (!queue.empty()) {
        const auto [x, dart] = queue.front();
        queue.pop_front();
        const int edge = dart / 2;
        const int y = p.head(dart);
        if (selected[edge] || r.revealed[y]) continue;
        selected[edge] = 1;
        r.edge_order.push_back(edge);
        ++r.steps;
        if (phi[x] < 0) {
            reveal(y);
            continue;
        }
        // phi(x) == 0
        if (!e.excited[edge]) {
            r.edge_states[edge] = EdgeState::plain;
            reveal(y);
            continue;
        }
        r.edge_states[edge] = EdgeState::excited;
        r.revealed_midpoints[edge] = e.midpoint[edge];
        if (e.midpoint[edge] && e.midpoint[edge]->twice == -1) reveal(y);
    }
    detail::finish_result(r, p);
    for (int y : r.unrevealed)
        for (const auto& inc : p.rotation(y)) {
            const int x = inc.neighbour;
            if (!r.revealed[x]) continue;
            BoundaryEdge b{x, y, inc.edge, std::nullopt};
            const bool state_hidden = r.edge_states[inc.edge] == EdgeState::unknown;
            if (phi[x] > 0 && state_hidden) {
                b.type = BoundaryType::positive_unrevealed_state;
            } else if (phi[x] == 0 && r.edge_states[inc.edge] == EdgeState::excited && r.revealed_midpoints[inc.edge] &&
                       r.revealed_midpoints[inc.edge]->twice == 1) {
                b.type = BoundaryType::zero_excited_plus_half;
            }
            r.boundary_edges.push_back(b);
        }
    std::sort(r.boundary_edges.begin(), r.boundary_edges.end(),
              [](const BoundaryEdge& l, const BoundaryEdge& q) { return std::pair(l.edge, l.x) < std::pair(q.edge, q.x); });
    for (const auto& b : r.boundary_edges) r.violations += b.type ? 0 : 1;
    return r;
}

inline ExplorationResult explore_enriched(const HeightConfig& c, const PlanarPatch& p, const PotentialAssignment& pots,
                                          int n, Rng& rng) {
    return explore_enriched(enrich(c, p, pots, rng, true), p, n);
}

/// H_{R_n, E_n*}: V_*(phi(y) - 1/2) for every type-2 boundary edge, plus V on
/// every other edge touching R_n. Revealed heights are held fixed.
inline LocalHamiltonian conditional_hamiltonian(const ExplorationResult& r, const PlanarPatch& p,
                                                const PotentialAssignment& pots, const HeightConfig& c) {
    std::vector<std::uint8_t> free(p.vertex_count(), 0);
    for (int v : r.unrevealed) free[v] = 1;
    std::set<int> type2_edges;
    std::vector<FieldTerm> fields;
    for (const auto& b : r.boundary_edges) {
        if (b.type == BoundaryType::zero_excited_plus_half) {
            type2_edges.insert(b.edge);
            fields.push_back({b.y, HalfInt::half(1)});
        }
    }
    std::vector<PairTerm> pairs;
    for (int k = 0; k < p.edge_count(); ++k) {
        const auto& ed = p.edges()[k];
        if (!free[ed.a] && !free[ed.b]) continue;
        if (type2_edges.contains(k)) continue;
        for (int x : {ed.a, ed.b}) {
            if (!free[x] && c.heights[x] <= 0)
                fail(ErrorCode::inconsistent_boundary,
                     "boundary vertex " + std::to_string(x) + " with height <= 0 contributes a V-term");
        }
        pairs.push_back({ed.a, ed.b, pots.id(k)});
    }
    std::vector<int> parity(p.vertex_count(), -1);
    if (c.parity_constraint)
        for (int v = 0; v < p.vertex_count(); ++v) parity[v] = parity_value(p, v);
    return LocalHamiltonian(pots.potentials(), c.heights, std::move(free), std::move(pairs), std::move(fields),
                            std::move(parity));
}

/// Whether r reaches the boundary set through edges with sigma = -1 together
/// with the edges at r.
inline bool blocking_connectivity(const std::vector<int>& sigma, const PlanarPatch& p, int r,
                                  const std::vector<int>& boundary_set) {
    if (static_cast<int>(sigma.size()) != p.edge_count()) fail(ErrorCode::invalid_argument, "sigma must cover every edge");
    std::vector<std::uint8_t> target(p.vertex_count(), 0), seen(p.vertex_count(), 0);
    for (int v : boundary_set) target[v] = 1;
    std::deque<int> q{r};
    seen[r] = 1;
    while (!q.empty()) {
        const int u = q.front();
        q.pop_front();
        if (target[u]) return true;
        for (const auto& inc : p.rotation(u)) {
            if (seen[inc.neighbour]) continue;
            if (sigma[inc.edge] != -1 && u != r) continue;
            seen[inc.neighbour] = 1;
            q.push_back(inc.neighbour);
        }
    }
    return false;
}

/// Vertices at distance exactly n + 1 from the root.
inline std::vector<int> shell(const PlanarPatch& p, int n) {
    const auto d = p.distances_from({p.root()});
    std::vector<int> out;
    for (int v = 0; v < p.vertex_count(); ++v)
        if (d[v] == n + 1) out.push_back(v);
    return out;
}

} // namespace heightlab
