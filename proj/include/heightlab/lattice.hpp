#pragma once

// Finite patches of periodic cubic planar lattices.
//
// A lattice is described by a stencil: vertices of one fundamental domain
// (with their offsets in the plane) and the edges leaving that domain, each
// tagged with the cell shift (di, dj) of its far endpoint. Patches are built
// from the stencil either as graph balls around a root or as w x h tori.

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "heightlab/error.hpp"

namespace heightlab {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
};

enum class Parity : std::uint8_t { even = 0, odd = 1 };

inline Parity flip(Parity p) { return p == Parity::even ? Parity::odd : Parity::even; }

struct StencilVertex {
    Vec2 offset;
    Parity parity = Parity::even;
};

/// Edge from stencil vertex `from` in cell (i, j) to `to` in cell (i + di, j + dj).
struct StencilEdge {
    int from = 0;
    int to = 0;
    int di = 0;
    int dj = 0;
};

enum class LatticeFamily { honeycomb, truncated_square, series_expanded, custom };

/// A vertex of the infinite periodic graph: cell (i, j), stencil index k.
struct LatticeSite {
    int i = 0;
    int j = 0;
    int k = 0;
    auto operator<=>(const LatticeSite&) const = default;
};

class LatticeSpec {
public:
    /// Hexagonal lattice, two vertices per cell (even A at the origin, odd B above it).
    static LatticeSpec honeycomb() {
        LatticeSpec s;
        s.family_ = LatticeFamily::honeycomb;
        s.name_ = "honeycomb";
        const double r3 = std::numbers::sqrt3;
        s.basis_ = {Vec2{r3, 0.0}, Vec2{r3 / 2.0, 1.5}};
        s.vertices_ = {{Vec2{0.0, 0.0}, Parity::even}, {Vec2{0.0, 1.0}, Parity::odd}};
        s.edges_ = {{0, 1, 0, 0}, {0, 1, 1, -1}, {0, 1, 0, -1}};
        s.bipartite_ = true;
        s.finalise();
        return s;
    }

    /// Truncated square (4.8.8) tiling with regular octagons: a diamond of four
    /// vertices per unit cell. The bipartition alternates between neighbouring
    /// cells, so the parity of a vertex also depends on (i + j) mod 2.
    static LatticeSpec truncated_square() {
        LatticeSpec s;
        s.family_ = LatticeFamily::truncated_square;
        s.name_ = "truncated_square";
        const double d = 1.0 / (2.0 + std::numbers::sqrt2);
        s.basis_ = {Vec2{1.0, 0.0}, Vec2{0.0, 1.0}};
        s.vertices_ = {{Vec2{d, 0.0}, Parity::even},
                       {Vec2{0.0, d}, Parity::odd},
                       {Vec2{-d, 0.0}, Parity::even},
                       {Vec2{0.0, -d}, Parity::odd}};
        s.edges_ = {{0, 1, 0, 0}, {1, 2, 0, 0}, {2, 3, 0, 0}, {3, 0, 0, 0}, {0, 2, 1, 0}, {1, 3, 0, 1}};
        s.parity_flip_ = {1, 1};
        s.bipartite_ = true;
        s.finalise();
        return s;
    }

    /// Replaces every edge of `base` by `n_series` edges linked in series,
    /// inserting n_series - 1 degree-2 vertices along the segment.
    static LatticeSpec series_expanded(const LatticeSpec& base, int n_series) {
        if (n_series < 1) fail(ErrorCode::invalid_argument, "series expansion needs n_series >= 1");
        if (n_series == 1) return base;
        LatticeSpec s;
        s.family_ = LatticeFamily::series_expanded;
        s.name_ = base.name_ + "@" + std::to_string(n_series);
        s.basis_ = base.basis_;
        s.n_series_ = n_series;
        s.base_family_ = base.family_ == LatticeFamily::series_expanded ? base.base_family_ : base.family_;
        const bool even_chain = n_series % 2 == 0;
        s.bipartite_ = base.bipartite_ || even_chain;
        // With an even number of segments all original vertices share a class.
        s.parity_flip_ = even_chain ? std::array<int, 2>{0, 0} : base.parity_flip_;
        s.vertices_ = base.vertices_;
        if (even_chain)
            for (auto& v : s.vertices_) v.parity = Parity::even;
        for (const StencilEdge& e : base.edges_) {
            const Vec2 a = base.vertices_[e.from].offset;
            const Vec2 b = base.vertices_[e.to].offset + static_cast<double>(e.di) * base.basis_[0] +
                           static_cast<double>(e.dj) * base.basis_[1];
            int prev = e.from;
            Parity p = s.vertices_[e.from].parity;
            for (int t = 1; t < n_series; ++t) {
                p = flip(p);
                const double frac = static_cast<double>(t) / n_series;
                s.vertices_.push_back({a + frac * (b - a), p});
                const int id = static_cast<int>(s.vertices_.size()) - 1;
                s.edges_.push_back({prev, id, 0, 0});
                prev = id;
            }
            s.edges_.push_back({prev, e.to, e.di, e.dj});
        }
        s.finalise();
        return s;
    }

    /// Any other periodic stencil. Bipartiteness is declared by the caller and
    /// validated against the stencil parities.
    static LatticeSpec custom(std::string name, std::array<Vec2, 2> basis, std::vector<StencilVertex> vertices,
                              std::vector<StencilEdge> edges, bool bipartite, std::array<int, 2> parity_flip = {0, 0}) {
        LatticeSpec s;
        s.family_ = LatticeFamily::custom;
        s.name_ = std::move(name);
        s.basis_ = basis;
        s.vertices_ = std::move(vertices);
        s.edges_ = std::move(edges);
        s.bipartite_ = bipartite;
        s.parity_flip_ = parity_flip;
        s.finalise();
        return s;
    }

    LatticeFamily family() const { return family_; }
    LatticeFamily base_family() const { return base_family_; }
    const std::string& name() const { return name_; }
    int n_series() const { return n_series_; }
    const std::array<Vec2, 2>& basis() const { return basis_; }
    const std::vector<StencilVertex>& vertices() const { return vertices_; }
    const std::vector<StencilEdge>& edges() const { return edges_; }
    bool bipartite() const { return bipartite_; }
    const std::array<int, 2>& parity_flip() const { return parity_flip_; }
    int stencil_size() const { return static_cast<int>(vertices_.size()); }

    Vec2 position(const LatticeSite& s) const {
        return static_cast<double>(s.i) * basis_[0] + static_cast<double>(s.j) * basis_[1] + vertices_[s.k].offset;
    }

    Parity parity(const LatticeSite& s) const {
        const int shift = parity_flip_[0] * s.i + parity_flip_[1] * s.j;
        const int p = static_cast<int>(vertices_[s.k].parity) + shift;
        return ((p % 2) + 2) % 2 == 0 ? Parity::even : Parity::odd;
    }

    struct Step {
        int to;
        int di;
        int dj;
        int orbit; // index of the generating stencil edge
        bool forward;
    };

    /// Edges at stencil vertex k of the infinite graph, as cell steps.
    const std::vector<Step>& steps(int k) const { return steps_[k]; }

    std::vector<std::pair<LatticeSite, int>> neighbours(const LatticeSite& s) const {
        std::vector<std::pair<LatticeSite, int>> out;
        for (const Step& st : steps_[s.k]) out.push_back({{s.i + st.di, s.j + st.dj, st.to}, st.orbit});
        return out;
    }

private:
    void finalise() {
        steps_.assign(vertices_.size(), {});
        for (std::size_t idx = 0; idx < edges_.size(); ++idx) {
            const StencilEdge& e = edges_[idx];
            if (e.from < 0 || e.to < 0 || e.from >= stencil_size() || e.to >= stencil_size())
                fail(ErrorCode::invalid_argument, "stencil edge refers to unknown vertex");
            if (e.from == e.to && e.di == 0 && e.dj == 0) fail(ErrorCode::invalid_argument, "stencil self-loop");
            steps_[e.from].push_back({e.to, e.di, e.dj, static_cast<int>(idx), true});
            steps_[e.to].push_back({e.from, -e.di, -e.dj, static_cast<int>(idx), false});
        }
        for (const auto& st : steps_)
            if (st.size() > 3) fail(ErrorCode::invalid_argument, "stencil vertex of degree > 3");
        if (bipartite_) {
            for (const StencilEdge& e : edges_) {
                const Parity a = parity({0, 0, e.from});
                const Parity b = parity({e.di, e.dj, e.to});
                if (a == b) fail(ErrorCode::not_bipartite, "stencil parities do not form a bipartition");
            }
        }
    }

    LatticeFamily family_ = LatticeFamily::custom;
    LatticeFamily base_family_ = LatticeFamily::custom;
    std::string name_;
    int n_series_ = 1;
    std::array<Vec2, 2> basis_{};
    std::vector<StencilVertex> vertices_;
    std::vector<StencilEdge> edges_;
    std::array<int, 2> parity_flip_{0, 0};
    bool bipartite_ = false;
    std::vector<std::vector<Step>> steps_;
};

enum class TopologyKind { ball, torus, region };

struct Topology {
    TopologyKind kind = TopologyKind::region;
    int radius = 0; // ball
    int w = 0;      // torus
    int h = 0;
};

struct PatchVertex {
    int id = 0;
    Vec2 position;
    Parity parity = Parity::even;
    LatticeSite site; // (0, 0, 0) for hand-built fixtures
    bool interior = false;
};

/// Undirected edge a-b. `wind` counts the torus seams crossed going from a to b.
struct PatchEdge {
    int a = 0;
    int b = 0;
    std::array<int, 2> wind{0, 0};
    int orbit = -1;
};

/// Dart `2 * edge + 0` runs a -> b, `2 * edge + 1` runs b -> a.
struct Incidence {
    int neighbour;
    int edge;
    int dart;
};

struct Face {
    std::vector<int> darts;
    std::vector<int> vertices;
    bool outer = false;
};

/// Input for hand-built fixture patches.
struct ExplicitGraph {
    std::vector<Vec2> positions;
    std::vector<Parity> parities;
    std::vector<std::pair<int, int>> edges;
    std::vector<int> interior;
    int root = 0;
};

class PlanarPatch {
public:
    const std::vector<PatchVertex>& vertices() const { return vertices_; }
    const std::vector<PatchEdge>& edges() const { return edges_; }
    const std::vector<int>& interior() const { return interior_; }
    const std::vector<int>& boundary() const { return boundary_; }
    int root() const { return root_; }
    const Topology& topology() const { return topology_; }
    const std::vector<Face>& faces() const { return faces_; }
    int dart_face(int dart) const { return dart_face_[dart]; }
    int vertex_count() const { return static_cast<int>(vertices_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    bool is_interior(int v) const { return vertices_[v].interior; }
    bool bipartite() const { return bipartite_; }
    const std::string& lattice_name() const { return lattice_name_; }
    std::array<Vec2, 2> period() const { return period_; }

    /// Neighbours of v sorted counter-clockwise: the rotation system.
    const std::vector<Incidence>& rotation(int v) const { return rotation_[v]; }
    int degree(int v) const { return static_cast<int>(rotation_[v].size()); }
    int max_degree() const {
        int d = 0;
        for (const auto& r : rotation_) d = std::max(d, static_cast<int>(r.size()));
        return d;
    }

    static int dart_tail(const PlanarPatch& p, int dart) {
        const PatchEdge& e = p.edges_[dart / 2];
        return dart % 2 == 0 ? e.a : e.b;
    }
    static int dart_head(const PlanarPatch& p, int dart) {
        const PatchEdge& e = p.edges_[dart / 2];
        return dart % 2 == 0 ? e.b : e.a;
    }
    int tail(int dart) const { return dart_tail(*this, dart); }
    int head(int dart) const { return dart_head(*this, dart); }
    std::array<int, 2> dart_wind(int dart) const {
        const auto& w = edges_[dart / 2].wind;
        return dart % 2 == 0 ? w : std::array<int, 2>{-w[0], -w[1]};
    }

    int euler_characteristic() const {
        return vertex_count() - edge_count() + static_cast<int>(faces_.size());
    }

    /// Edge id joining u and v, if any.
    std::optional<int> edge_between(int u, int v) const {
        for (const Incidence& inc : rotation_[u])
            if (inc.neighbour == v) return inc.edge;
        return std::nullopt;
    }

    /// BFS distances within the patch from a set of sources (-1 if unreachable).
    std::vector<int> distances_from(const std::vector<int>& sources) const {
        std::vector<int> dist(vertices_.size(), -1);
        std::deque<int> queue;
        for (int s : sources) {
            if (dist[s] != 0) {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (const Incidence& inc : rotation_[u]) {
                if (dist[inc.neighbour] < 0) {
                    dist[inc.neighbour] = dist[u] + 1;
                    queue.push_back(inc.neighbour);
                }
            }
        }
        return dist;
    }

    friend PlanarPatch build_ball(const LatticeSpec&, int, int);
    friend PlanarPatch build_region(const LatticeSpec&, const std::vector<LatticeSite>&, LatticeSite);
    friend PlanarPatch build_torus(const LatticeSpec&, int, int);
    friend PlanarPatch build_explicit(const ExplicitGraph&);

private:
    void finish() {
        build_rotation();
        trace_faces();
        interior_.clear();
        boundary_.clear();
        for (const auto& v : vertices_) (v.interior ? interior_ : boundary_).push_back(v.id);
        bipartite_ = true;
        for (const auto& e : edges_)
            if (vertices_[e.a].parity == vertices_[e.b].parity) bipartite_ = false;
    }

    Vec2 dart_vector(int dart) const {
        const std::array<int, 2> w = dart_wind(dart);
        return vertices_[head(dart)].position + static_cast<double>(w[0]) * period_[0] +
               static_cast<double>(w[1]) * period_[1] - vertices_[tail(dart)].position;
    }

    void build_rotation() {
        rotation_.assign(vertices_.size(), {});
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            const int id = static_cast<int>(e);
            rotation_[edges_[e].a].push_back({edges_[e].b, id, 2 * id});
            rotation_[edges_[e].b].push_back({edges_[e].a, id, 2 * id + 1});
        }
        for (auto& rot : rotation_) {
            std::sort(rot.begin(), rot.end(), [this](const Incidence& l, const Incidence& r) {
                const Vec2 a = dart_vector(l.dart);
                const Vec2 b = dart_vector(r.dart);
                return std::atan2(a.y, a.x) < std::atan2(b.y, b.x);
            });
        }
    }

    // Faces are orbits of dart -> (next dart clockwise around the head from
    // the reversed dart). Bounded faces come out counter-clockwise.
    void trace_faces() {
        const int n_darts = 2 * edge_count();
        dart_face_.assign(n_darts, -1);
        faces_.clear();
        std::vector<int> slot(n_darts, 0);
        for (const auto& rot : rotation_)
            for (std::size_t i = 0; i < rot.size(); ++i) slot[rot[i].dart] = static_cast<int>(i);
        auto next = [&](int dart) {
            const int v = head(dart);
            const int back = dart ^ 1;
            const auto& rot = rotation_[v];
            const int deg = static_cast<int>(rot.size());
            return rot[(slot[back] + deg - 1) % deg].dart;
        };
        for (int start = 0; start < n_darts; ++start) {
            if (dart_face_[start] >= 0) continue;
            Face f;
            const int fid = static_cast<int>(faces_.size());
            int d = start;
            do {
                dart_face_[d] = fid;
                f.darts.push_back(d);
                f.vertices.push_back(tail(d));
                d = next(d);
            } while (d != start);
            faces_.push_back(std::move(f));
        }
        if (topology_.kind == TopologyKind::torus || faces_.empty()) return;
        // The unique face of non-positive signed area is the outer face.
        int outer = 0;
        double min_area = std::numeric_limits<double>::infinity();
        for (std::size_t fi = 0; fi < faces_.size(); ++fi) {
            double area = 0.0;
            const auto& vs = faces_[fi].vertices;
            for (std::size_t i = 0; i < vs.size(); ++i) {
                const Vec2 a = vertices_[vs[i]].position;
                const Vec2 b = vertices_[vs[(i + 1) % vs.size()]].position;
                area += a.x * b.y - a.y * b.x;
            }
            if (area < min_area) {
                min_area = area;
                outer = static_cast<int>(fi);
            }
        }
        faces_[outer].outer = true;
    }

    std::vector<PatchVertex> vertices_;
    std::vector<PatchEdge> edges_;
    std::vector<int> interior_;
    std::vector<int> boundary_;
    std::vector<std::vector<Incidence>> rotation_;
    std::vector<Face> faces_;
    std::vector<int> dart_face_;
    int root_ = 0;
    Topology topology_;
    bool bipartite_ = false;
    std::string lattice_name_;
    std::array<Vec2, 2> period_{};
};

/// Patch with the given interior sites; the boundary is every lattice
/// neighbour of the interior outside it. Edges are those of the induced
/// subgraph on interior and boundary.
inline PlanarPatch build_region(const LatticeSpec& spec, const std::vector<LatticeSite>& interior_sites,
                                LatticeSite root) {
    std::set<LatticeSite> interior(interior_sites.begin(), interior_sites.end());
    if (!interior.contains(root)) fail(ErrorCode::invalid_argument, "root must be an interior site");
    std::set<LatticeSite> all = interior;
    for (const LatticeSite& s : interior)
        for (const auto& [nb, orbit] : spec.neighbours(s)) all.insert(nb);
    std::vector<LatticeSite> sites(all.begin(), all.end()); // lexicographic
    std::map<LatticeSite, int> index;
    for (std::size_t i = 0; i < sites.size(); ++i) index[sites[i]] = static_cast<int>(i);

    PlanarPatch p;
    p.lattice_name_ = spec.name();
    p.topology_ = {TopologyKind::region, 0, 0, 0};
    for (std::size_t i = 0; i < sites.size(); ++i) {
        p.vertices_.push_back({static_cast<int>(i), spec.position(sites[i]), spec.parity(sites[i]), sites[i],
                               interior.contains(sites[i])});
    }
    for (std::size_t i = 0; i < sites.size(); ++i) {
        for (const auto& st : spec.steps(sites[i].k)) {
            if (!st.forward) continue;
            const LatticeSite nb{sites[i].i + st.di, sites[i].j + st.dj, st.to};
            auto it = index.find(nb);
            if (it == index.end()) continue;
            p.edges_.push_back({static_cast<int>(i), it->second, {0, 0}, st.orbit});
        }
    }
    p.root_ = index.at(root);
    p.finish();
    return p;
}

/// Graph ball of radius n around the root site (0, 0, root_choice): the
/// interior holds the vertices within distance n, the boundary those at n + 1.
inline PlanarPatch build_ball(const LatticeSpec& spec, int n, int root_choice = 0) {
    if (n < 0) fail(ErrorCode::invalid_argument, "ball radius must be nonnegative");
    if (root_choice < 0 || root_choice >= spec.stencil_size())
        fail(ErrorCode::invalid_argument, "root choice outside the stencil");
    const LatticeSite root{0, 0, root_choice};
    std::map<LatticeSite, int> dist{{root, 0}};
    std::deque<LatticeSite> queue{root};
    std::vector<LatticeSite> interior;
    while (!queue.empty()) {
        const LatticeSite s = queue.front();
        queue.pop_front();
        const int d = dist.at(s);
        if (d > n) continue;
        interior.push_back(s);
        for (const auto& [nb, orbit] : spec.neighbours(s)) {
            if (!dist.contains(nb)) {
                dist[nb] = d + 1;
                queue.push_back(nb);
            }
        }
    }
    PlanarPatch p = build_region(spec, interior, root);
    p.topology_ = {TopologyKind::ball, n, 0, 0};
    return p;
}

/// Quotient of the lattice by (w a1, h a2). Every vertex is interior.
inline PlanarPatch build_torus(const LatticeSpec& spec, int w, int h) {
    if (w < 1 || h < 1) fail(ErrorCode::invalid_argument, "torus dimensions must be positive");
    if (spec.bipartite() && ((spec.parity_flip()[0] != 0 && w % 2 != 0) || (spec.parity_flip()[1] != 0 && h % 2 != 0)))
        fail(ErrorCode::quotient_breaks_parity, "torus dimensions must be even for this bipartition");
    const int K = spec.stencil_size();
    auto id_of = [&](int i, int j, int k) { return (i * h + j) * K + k; };
    auto floordiv = [](int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); };

    PlanarPatch p;
    p.lattice_name_ = spec.name();
    p.topology_ = {TopologyKind::torus, 0, w, h};
    p.period_ = {static_cast<double>(w) * spec.basis()[0], static_cast<double>(h) * spec.basis()[1]};
    for (int i = 0; i < w; ++i)
        for (int j = 0; j < h; ++j)
            for (int k = 0; k < K; ++k) {
                const LatticeSite s{i, j, k};
                p.vertices_.push_back({id_of(i, j, k), spec.position(s), spec.parity(s), s, true});
            }
    std::set<std::pair<int, int>> seen;
    for (int i = 0; i < w; ++i)
        for (int j = 0; j < h; ++j)
            for (std::size_t ei = 0; ei < spec.edges().size(); ++ei) {
                const StencilEdge& e = spec.edges()[ei];
                const int ti = i + e.di, tj = j + e.dj;
                const int a = id_of(i, j, e.from);
                const int b = id_of(((ti % w) + w) % w, ((tj % h) + h) % h, e.to);
                if (a == b) fail(ErrorCode::quotient_too_small, "torus quotient creates a self-loop");
                if (!seen.insert({std::min(a, b), std::max(a, b)}).second)
                    fail(ErrorCode::quotient_too_small, "torus quotient creates parallel edges");
                p.edges_.push_back({a, b, {floordiv(ti, w), floordiv(tj, h)}, static_cast<int>(ei)});
            }
    p.root_ = 0;
    p.finish();
    return p;
}

/// Hand-built patch for fixtures (paths, stars, small cycles). Positions must
/// describe a planar straight-line drawing.
inline PlanarPatch build_explicit(const ExplicitGraph& g) {
    PlanarPatch p;
    p.lattice_name_ = "explicit";
    p.topology_ = {TopologyKind::region, 0, 0, 0};
    const std::set<int> interior(g.interior.begin(), g.interior.end());
    for (std::size_t i = 0; i < g.positions.size(); ++i) {
        const Parity par = i < g.parities.size() ? g.parities[i] : Parity::even;
        p.vertices_.push_back({static_cast<int>(i), g.positions[i], par, {0, 0, 0}, interior.contains(static_cast<int>(i))});
    }
    for (const auto& [a, b] : g.edges) {
        if (a == b || a < 0 || b < 0 || a >= static_cast<int>(g.positions.size()) ||
            b >= static_cast<int>(g.positions.size()))
            fail(ErrorCode::invalid_argument, "bad fixture edge");
        p.edges_.push_back({a, b, {0, 0}, -1});
    }
    p.root_ = g.root;
    p.finish();
    return p;
}

/// Proper 2-colouring of the patch graph, if one exists.
inline bool two_colourable(const PlanarPatch& p) {
    std::vector<int> colour(p.vertex_count(), -1);
    for (int s = 0; s < p.vertex_count(); ++s) {
        if (colour[s] >= 0) continue;
        colour[s] = 0;
        std::deque<int> q{s};
        while (!q.empty()) {
            const int u = q.front();
            q.pop_front();
            for (const Incidence& inc : p.rotation(u)) {
                if (colour[inc.neighbour] < 0) {
                    colour[inc.neighbour] = 1 - colour[u];
                    q.push_back(inc.neighbour);
                } else if (colour[inc.neighbour] == colour[u]) {
                    return false;
                }
            }
        }
    }
    return true;
}

} // namespace heightlab
