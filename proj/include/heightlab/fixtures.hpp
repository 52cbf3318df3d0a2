#pragma once

#include <map>
#include <string>
#include <vector>

#include "heightlab/error.hpp"
#include "heightlab/lattice.hpp"

namespace heightlab::fixtures {

/// Centre vertex 0 (interior, even) joined to three leaves (odd).
inline PlanarPatch star() {
    ExplicitGraph g;
    g.positions = {{0, 0}, {1, 0}, {-0.5, 0.866}, {-0.5, -0.866}};
    g.parities = {Parity::even, Parity::odd, Parity::odd, Parity::odd};
    g.edges = {{0, 1}, {0, 2}, {0, 3}};
    g.interior = {0};
    g.root = 0;
    return build_explicit(g);
}

/// Path v0 - v1 - ... - v_{n-1} with the given interior, rooted at `root`.
inline PlanarPatch path(int n, std::vector<int> interior, int root) {
    ExplicitGraph g;
    for (int i = 0; i < n; ++i) {
        g.positions.push_back({static_cast<double>(i), 0.0});
        g.parities.push_back(i % 2 == 0 ? Parity::even : Parity::odd);
        if (i + 1 < n) g.edges.push_back({i, i + 1});
    }
    g.interior = std::move(interior);
    g.root = root;
    return build_explicit(g);
}

/// One honeycomb hexagon as the interior (6 vertices), its 6 outer
/// neighbours as the boundary.
inline PlanarPatch hexagon() {
    const auto spec = LatticeSpec::honeycomb();
    const auto ball = build_ball(spec, 3);
    for (const auto& f : ball.faces()) {
        if (f.outer || f.vertices.size() != 6) continue;
        bool has_root = false;
        for (int v : f.vertices) has_root = has_root || v == ball.root();
        if (!has_root) continue;
        std::vector<LatticeSite> sites;
        for (int v : f.vertices) sites.push_back(ball.vertices()[v].site);
        return build_region(spec, sites, ball.vertices()[ball.root()].site);
    }
    return ball;
}

/// Boundary values keyed by boundary position (0, 1, ...) in patch order.
inline std::map<int, int> boundary_values(const PlanarPatch& p, const std::vector<int>& values) {
    std::map<int, int> out;
    for (std::size_t i = 0; i < p.boundary().size() && i < values.size(); ++i) out[p.boundary()[i]] = values[i];
    return out;
}

/// Named fixture patches for the audit suites.
inline PlanarPatch by_name(const std::string& name) {
    if (name == "star") return star();
    if (name == "hexagon") return hexagon();
    if (name == "honeycomb_ball1") return build_ball(LatticeSpec::honeycomb(), 1);
    if (name == "truncated_square_ball0") return build_ball(LatticeSpec::truncated_square(), 0);
    if (name == "path5") return path(5, {1, 2, 3}, 2);
    fail(ErrorCode::fixture_missing, "unknown fixture '" + name + "'");
}

} // namespace heightlab::fixtures
