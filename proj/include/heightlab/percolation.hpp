#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <string_view>
#include <vector>

#include "heightlab/derived_graph.hpp"
#include "heightlab/error.hpp"
#include "heightlab/gibbs.hpp"
#include "heightlab/lattice.hpp"
#include "heightlab/potentials.hpp"

namespace heightlab {

enum class LevelDirection { geq, leq };

constexpr std::string_view to_string(LevelDirection d) { return d == LevelDirection::geq ? "geq" : "leq"; }

/// Vertex mask of {phi >= a} or {phi <= a}.
inline std::vector<std::uint8_t> level_set(const HeightConfig& c, int a, LevelDirection dir) {
    std::vector<std::uint8_t> m(c.heights.size(), 0);
    for (std::size_t v = 0; v < c.heights.size(); ++v)
        m[v] = dir == LevelDirection::geq ? c.heights[v] >= a : c.heights[v] <= a;
    return m;
}

enum class SpinCarrier { odd_vertices, edges };

constexpr std::string_view to_string(SpinCarrier c) { return c == SpinCarrier::edges ? "edges" : "odd_vertices"; }

/// Spins indexed like the nodes of the matching derived graph: odd vertices
/// in id order (odd_vertex_graph) or edge ids (line_graph).
struct SpinField {
    SpinCarrier carrier = SpinCarrier::odd_vertices;
    std::vector<int> elements;
    std::vector<int> spins; // +1 / -1

    std::vector<std::uint8_t> mask(int sign) const {
        std::vector<std::uint8_t> m(spins.size());
        for (std::size_t i = 0; i < spins.size(); ++i) m[i] = spins[i] == sign;
        return m;
    }
};

inline SpinField odd_spin_field(const HeightConfig& c, const PlanarPatch& p) {
    SpinField s;
    s.carrier = SpinCarrier::odd_vertices;
    for (const auto& v : p.vertices()) {
        if (v.parity != Parity::odd) continue;
        const int h = c.heights[v.id];
        if (h % 2 == 0) fail(ErrorCode::parity_violation, "even height on an odd vertex");
        s.elements.push_back(v.id);
        s.spins.push_back(h >= 1 ? 1 : -1);
    }
    return s;
}

inline SpinField edge_spin_field(const HeightConfig& c, const PlanarPatch& p, const std::vector<HalfInt>& coins) {
    if (static_cast<int>(coins.size()) != p.edge_count()) fail(ErrorCode::invalid_argument, "one coin per edge");
    SpinField s;
    s.carrier = SpinCarrier::edges;
    for (int k = 0; k < p.edge_count(); ++k) {
        const auto& e = p.edges()[k];
        if (std::abs(coins[k].twice) != 1) fail(ErrorCode::invalid_argument, "coins must be +-1/2");
        const int twice = 2 * (c.heights[e.a] + c.heights[e.b]) + coins[k].twice;
        if (twice == 0) fail(ErrorCode::invalid_argument, "zero spin total"); // odd, so unreachable
        s.elements.push_back(k);
        s.spins.push_back(twice > 0 ? 1 : -1);
    }
    return s;
}

struct PercolationReport {
    int cluster_count = 0;
    std::vector<int> cluster_sizes; // descending
    double largest_fraction = 0.0;
    std::vector<std::array<bool, 2>> wrap_flags; // torus only, aligned with cluster_sizes
    std::vector<bool> boundary_touching;         // non-torus only, aligned with cluster_sizes
    int trifurcation_boxes = 0;
    int trifurcation_box_radius = -1; // -1: not computed
    int large_threshold = 0;          // torus size threshold used for trifurcations

    bool wraps(int axis) const {
        return std::any_of(wrap_flags.begin(), wrap_flags.end(), [axis](const auto& f) { return f[axis]; });
    }
    int wrapping_clusters() const {
        return static_cast<int>(std::count_if(wrap_flags.begin(), wrap_flags.end(),
                                              [](const auto& f) { return f[0] || f[1]; }));
    }
};

/// Union-find over carrier nodes. `offset[v]` is the cover displacement from
/// v's parent to v; after find(), from the root to v.
class WindingUnionFind {
public:
    explicit WindingUnionFind(int n) : parent_(n), size_(n, 1), offset_(n, {0, 0}), winding_(n, {false, false}) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    int find(int v) {
        if (parent_[v] == v) return v;
        const int up = parent_[v];
        const int r = find(up);
        offset_[v] = {offset_[v][0] + offset_[up][0], offset_[v][1] + offset_[up][1]};
        parent_[v] = r;
        return r;
    }

    /// Joins u and v, where stepping u -> v crosses seams `w`.
    void unite(int u, int v, std::array<int, 2> w) {
        int ru = find(u), rv = find(v);
        // position(v) relative to ru via this step
        const std::array<int, 2> via{offset_[u][0] + w[0], offset_[u][1] + w[1]};
        if (ru == rv) {
            if (via[0] != offset_[v][0]) winding_[ru][0] = true;
            if (via[1] != offset_[v][1]) winding_[ru][1] = true;
            return;
        }
        // shift of rv's frame inside ru's frame
        std::array<int, 2> d{via[0] - offset_[v][0], via[1] - offset_[v][1]};
        if (size_[ru] < size_[rv]) {
            std::swap(ru, rv);
            d = {-d[0], -d[1]};
        }
        parent_[rv] = ru;
        offset_[rv] = d;
        size_[ru] += size_[rv];
        winding_[ru][0] = winding_[ru][0] || winding_[rv][0];
        winding_[ru][1] = winding_[ru][1] || winding_[rv][1];
    }

    int size(int v) { return size_[find(v)]; }
    std::array<bool, 2> winding(int v) { return winding_[find(v)]; }

private:
    std::vector<int> parent_;
    std::vector<int> size_;
    std::vector<std::array<int, 2>> offset_;
    std::vector<std::array<bool, 2>> winding_;
};

/// Components of the subgraph of `g` induced by `subset`.
inline PercolationReport clusters(const CarrierGraph& g, const std::vector<std::uint8_t>& subset) {
    if (static_cast<int>(subset.size()) != g.size()) fail(ErrorCode::invalid_argument, "subset size differs from carrier");
    WindingUnionFind uf(g.size());
    for (int u = 0; u < g.size(); ++u) {
        if (!subset[u]) continue;
        for (const auto& s : g.adjacency[u])
            if (subset[s.to]) uf.unite(u, s.to, s.wind);
    }
    struct Info {
        int size;
        int first;
        std::array<bool, 2> wrap;
        bool touch;
    };
    std::vector<int> slot(g.size(), -1);
    std::vector<Info> info;
    for (int v = 0; v < g.size(); ++v) {
        if (!subset[v]) continue;
        const int r = uf.find(v);
        if (slot[r] < 0) {
            slot[r] = static_cast<int>(info.size());
            info.push_back({uf.size(r), v, uf.winding(r), false});
        }
        if (g.on_boundary[v]) info[slot[r]].touch = true;
    }
    std::stable_sort(info.begin(), info.end(), [](const Info& a, const Info& b) { return a.size > b.size; });
    PercolationReport rep;
    rep.cluster_count = static_cast<int>(info.size());
    for (const auto& c : info) {
        rep.cluster_sizes.push_back(c.size);
        if (g.topology == TopologyKind::torus)
            rep.wrap_flags.push_back(c.wrap);
        else
            rep.boundary_touching.push_back(c.touch);
    }
    if (!info.empty() && g.size() > 0) rep.largest_fraction = static_cast<double>(info.front().size) / g.size();
    return rep;
}

inline PercolationReport clusters(const PlanarPatch& p, const std::vector<std::uint8_t>& subset) {
    return clusters(carrier_of(p), subset);
}

inline PercolationReport clusters(const PlanarPatch& p, const DerivedGraph& g, const std::vector<std::uint8_t>& subset) {
    return clusters(g.carrier(p.topology().kind), subset);
}

/// Graph diameter proxy: eccentricity of the root.
inline int patch_diameter(const PlanarPatch& p) {
    const auto d = p.distances_from({p.root()});
    int m = 0;
    for (int x : d) m = std::max(m, x);
    return m;
}

/// Counts boxes (graph balls of radius `box_radius` around translates of the
/// root) whose removal splits some subset cluster meeting the box into at
/// least three large pieces. Large: touches the patch boundary (ball and
/// region patches) or has at least `large_threshold` vertices (torus;
/// default the root eccentricity). Boxes containing boundary vertices are
/// skipped on non-torus patches.
inline int trifurcation_count(const std::vector<std::uint8_t>& subset, const PlanarPatch& p, int box_radius,
                              int large_threshold = 0) {
    const bool torus = p.topology().kind == TopologyKind::torus;
    if (torus && large_threshold <= 0) large_threshold = std::max(1, patch_diameter(p));
    const int n = p.vertex_count();
    const int root_k = p.vertices()[p.root()].site.k;
    std::vector<int> mark(n, -1), seen(n, -1), dist(n, 0);
    std::vector<int> stack;
    int boxes = 0;
    for (int c = 0; c < n; ++c) {
        if (p.vertices()[c].site.k != root_k) continue;
        // box: BFS ball
        std::vector<int> box{c};
        mark[c] = c;
        dist[c] = 0;
        for (std::size_t i = 0; i < box.size(); ++i) {
            if (dist[box[i]] >= box_radius) continue;
            for (const auto& inc : p.rotation(box[i])) {
                if (mark[inc.neighbour] == c) continue;
                mark[inc.neighbour] = c;
                dist[inc.neighbour] = dist[box[i]] + 1;
                box.push_back(inc.neighbour);
            }
        }
        if (!torus && std::any_of(box.begin(), box.end(), [&](int v) { return !p.is_interior(v); })) continue;
        // Pieces of subset \ box adjacent to the box; pieces from one cluster
        // are grouped by the cluster they belong to through the box.
        std::vector<int> piece_of(n, -1);
        std::vector<int> piece_large;
        for (int b : box) {
            for (const auto& inc : p.rotation(b)) {
                const int s = inc.neighbour;
                if (!subset[s] || mark[s] == c || piece_of[s] >= 0) continue;
                const int id = static_cast<int>(piece_large.size());
                int size = 0;
                bool touch = false;
                stack.assign(1, s);
                piece_of[s] = id;
                while (!stack.empty()) {
                    const int u = stack.back();
                    stack.pop_back();
                    ++size;
                    touch = touch || !p.is_interior(u);
                    for (const auto& j : p.rotation(u)) {
                        const int w = j.neighbour;
                        if (!subset[w] || mark[w] == c || piece_of[w] >= 0) continue;
                        piece_of[w] = id;
                        stack.push_back(w);
                    }
                }
                piece_large.push_back(torus ? size >= large_threshold : touch);
            }
        }
        // Join pieces through subset vertices inside the box.
        std::vector<int> group(piece_large.size());
        std::iota(group.begin(), group.end(), 0);
        auto root_of = [&](int x) {
            while (group[x] != x) x = group[x] = group[group[x]];
            return x;
        };
        for (int b : box) {
            if (!subset[b] || seen[b] == c) continue;
            // component of subset inside the box
            std::vector<int> comp{b};
            seen[b] = c;
            std::vector<int> touched;
            for (std::size_t i = 0; i < comp.size(); ++i) {
                for (const auto& inc : p.rotation(comp[i])) {
                    const int w = inc.neighbour;
                    if (!subset[w]) continue;
                    if (mark[w] == c) {
                        if (seen[w] != c) {
                            seen[w] = c;
                            comp.push_back(w);
                        }
                    } else {
                        touched.push_back(piece_of[w]);
                    }
                }
            }
            for (std::size_t i = 1; i < touched.size(); ++i) group[root_of(touched[i])] = root_of(touched[0]);
        }
        std::vector<int> large_count(piece_large.size(), 0);
        bool hit = false;
        for (std::size_t i = 0; i < piece_large.size(); ++i)
            if (piece_large[i] && ++large_count[root_of(static_cast<int>(i))] >= 3) hit = true;
        boxes += hit;
    }
    return boxes;
}

} // namespace heightlab
