#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "heightlab/error.hpp"
#include "heightlab/lattice.hpp"

namespace heightlab {

/// Neighbour in a carrier graph, with the torus winding of the step.
struct CarrierStep {
    int to;
    std::array<int, 2> wind;
};

/// Graph view shared by base patches and derived graphs: whatever the
/// percolation census runs on.
struct CarrierGraph {
    std::vector<std::vector<CarrierStep>> adjacency;
    std::vector<std::uint8_t> on_boundary; // touches the patch boundary (ball/region patches)
    TopologyKind topology = TopologyKind::region;

    int size() const { return static_cast<int>(adjacency.size()); }
};

inline CarrierGraph carrier_of(const PlanarPatch& p) {
    CarrierGraph g;
    g.topology = p.topology().kind;
    g.adjacency.resize(p.vertex_count());
    g.on_boundary.assign(p.vertex_count(), 0);
    for (int v = 0; v < p.vertex_count(); ++v) {
        g.on_boundary[v] = p.is_interior(v) ? 0 : 1;
        for (const Incidence& inc : p.rotation(v)) g.adjacency[v].push_back({inc.neighbour, p.dart_wind(inc.dart)});
    }
    return g;
}

enum class DerivedKind { line_graph, odd_vertex_graph };

struct DerivedEdge {
    int a; // node indices
    int b;
    int witness_face;
    std::array<int, 2> wind; // from a's anchor to b's anchor
};

struct DerivedGraph {
    DerivedKind kind = DerivedKind::line_graph;
    std::vector<int> nodes; // base edge ids (line graph) or base vertex ids (odd-vertex graph)
    std::vector<DerivedEdge> edges;
    std::vector<std::uint8_t> on_boundary;

    int node_count() const { return static_cast<int>(nodes.size()); }

    std::vector<int> degrees() const {
        std::vector<int> d(nodes.size(), 0);
        for (const auto& e : edges) {
            ++d[e.a];
            ++d[e.b];
        }
        return d;
    }

    CarrierGraph carrier(TopologyKind topology) const {
        CarrierGraph g;
        g.topology = topology;
        g.adjacency.resize(nodes.size());
        g.on_boundary = on_boundary;
        for (const auto& e : edges) {
            g.adjacency[e.a].push_back({e.b, e.wind});
            g.adjacency[e.b].push_back({e.a, {-e.wind[0], -e.wind[1]}});
        }
        return g;
    }
};

namespace detail {

inline bool face_has_vertex(const Face& f, int v) {
    return std::find(f.vertices.begin(), f.vertices.end(), v) != f.vertices.end();
}

inline bool face_has_edge(const Face& f, int edge) {
    return std::any_of(f.darts.begin(), f.darts.end(), [edge](int d) { return d / 2 == edge; });
}

/// Face around `pivot` containing both targets, preferring bounded faces.
template <typename Pred>
int witness_around(const PlanarPatch& p, int pivot, Pred contains_both) {
    int fallback = -1;
    for (const Incidence& inc : p.rotation(pivot)) {
        for (int dart : {inc.dart, inc.dart ^ 1}) {
            const int fid = p.dart_face(dart);
            if (!contains_both(p.faces()[fid])) continue;
            if (!p.faces()[fid].outer) return fid;
            fallback = fid;
        }
    }
    return fallback;
}

} // namespace detail

/// Graph on the patch edges; two edges are adjacent iff they share an endpoint.
inline DerivedGraph line_graph(const PlanarPatch& p) {
    if (p.max_degree() > 3) fail(ErrorCode::invalid_argument, "line graph requires max degree <= 3");
    DerivedGraph g;
    g.kind = DerivedKind::line_graph;
    g.nodes.resize(p.edge_count());
    g.on_boundary.assign(p.edge_count(), 0);
    for (int e = 0; e < p.edge_count(); ++e) {
        g.nodes[e] = e;
        const auto& ed = p.edges()[e];
        g.on_boundary[e] = (!p.is_interior(ed.a) || !p.is_interior(ed.b)) ? 1 : 0;
    }
    // Each node is anchored at its `a` endpoint; windings are measured between anchors.
    for (int v = 0; v < p.vertex_count(); ++v) {
        const auto& rot = p.rotation(v);
        for (std::size_t i = 0; i < rot.size(); ++i) {
            for (std::size_t j = i + 1; j < rot.size(); ++j) {
                const int e1 = std::min(rot[i].edge, rot[j].edge);
                const int e2 = std::max(rot[i].edge, rot[j].edge);
                const int fid = detail::witness_around(p, v, [&](const Face& f) {
                    return detail::face_has_edge(f, e1) && detail::face_has_edge(f, e2);
                });
                if (fid < 0) fail(ErrorCode::no_witness_face, "adjacent edges share no face");
                // anchor(e1) -> v -> anchor(e2)
                auto to_v = [&](int e) {
                    const auto& ed = p.edges()[e];
                    return ed.a == v ? std::array<int, 2>{0, 0} : ed.wind;
                };
                const auto w1 = to_v(e1);
                const auto w2 = to_v(e2);
                g.edges.push_back({e1, e2, fid, {w1[0] - w2[0], w1[1] - w2[1]}});
            }
        }
    }
    std::sort(g.edges.begin(), g.edges.end(),
              [](const DerivedEdge& l, const DerivedEdge& r) { return std::pair(l.a, l.b) < std::pair(r.a, r.b); });
    return g;
}

/// Graph on the odd vertices; two are adjacent iff at distance exactly two.
inline DerivedGraph odd_vertex_graph(const PlanarPatch& p) {
    if (!p.bipartite()) fail(ErrorCode::not_bipartite, "odd-vertex graph needs a bipartite patch");
    DerivedGraph g;
    g.kind = DerivedKind::odd_vertex_graph;
    std::vector<int> node_of(p.vertex_count(), -1);
    for (const auto& v : p.vertices()) {
        if (v.parity != Parity::odd) continue;
        node_of[v.id] = static_cast<int>(g.nodes.size());
        g.nodes.push_back(v.id);
        g.on_boundary.push_back(p.is_interior(v.id) ? 0 : 1);
    }
    std::map<std::pair<int, int>, DerivedEdge> found;
    for (int mid = 0; mid < p.vertex_count(); ++mid) {
        const auto& rot = p.rotation(mid);
        for (std::size_t i = 0; i < rot.size(); ++i) {
            for (std::size_t j = i + 1; j < rot.size(); ++j) {
                int x = rot[i].neighbour, y = rot[j].neighbour;
                if (x == y) continue;
                auto wx = p.dart_wind(rot[i].dart);
                auto wy = p.dart_wind(rot[j].dart);
                if (node_of[x] > node_of[y]) {
                    std::swap(x, y);
                    std::swap(wx, wy);
                }
                if (node_of[x] < 0) continue;
                const auto key = std::pair(node_of[x], node_of[y]);
                if (found.contains(key)) continue;
                const int fid = detail::witness_around(p, mid, [&](const Face& f) {
                    return detail::face_has_vertex(f, x) && detail::face_has_vertex(f, y);
                });
                if (fid < 0) fail(ErrorCode::no_witness_face, "distance-two pair shares no face");
                // x -> mid -> y
                found.emplace(key, DerivedEdge{key.first, key.second, fid, {wy[0] - wx[0], wy[1] - wx[1]}});
            }
        }
    }
    for (auto& [key, e] : found) g.edges.push_back(e);
    return g;
}

/// Number of derived edges whose recorded witness face does not contain both
/// endpoints (zero for a sound construction).
inline int witness_failures(const PlanarPatch& p, const DerivedGraph& g) {
    int bad = 0;
    for (const auto& e : g.edges) {
        if (e.witness_face < 0 || e.witness_face >= static_cast<int>(p.faces().size())) {
            ++bad;
            continue;
        }
        const Face& f = p.faces()[e.witness_face];
        const bool ok = g.kind == DerivedKind::line_graph
                            ? detail::face_has_edge(f, g.nodes[e.a]) && detail::face_has_edge(f, g.nodes[e.b])
                            : detail::face_has_vertex(f, g.nodes[e.a]) && detail::face_has_vertex(f, g.nodes[e.b]);
        if (!ok) ++bad;
    }
    return bad;
}

} // namespace heightlab
