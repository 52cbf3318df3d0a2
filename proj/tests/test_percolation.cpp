#include <gtest/gtest.h>

#include "heightlab/enrichment.hpp"
#include "heightlab/fixtures.hpp"
#include "heightlab/percolation.hpp"

using namespace heightlab;

namespace {

struct Oracle {
    int count = 0;
    std::vector<int> sizes;
    std::vector<std::array<bool, 2>> wraps;
};

// Plain DFS with lifted coordinates; a non-tree edge whose lift disagrees
// marks a wrap on that axis.
Oracle dfs_census(const CarrierGraph& g, const std::vector<std::uint8_t>& subset) {
    Oracle o;
    std::vector<int> comp(g.size(), -1);
    std::vector<std::array<int, 2>> lift(g.size());
    for (int s = 0; s < g.size(); ++s) {
        if (!subset[s] || comp[s] >= 0) continue;
        std::array<bool, 2> w{false, false};
        int size = 0;
        std::vector<int> st{s};
        comp[s] = o.count;
        lift[s] = {0, 0};
        while (!st.empty()) {
            const int u = st.back();
            st.pop_back();
            ++size;
            for (const auto& e : g.adjacency[u]) {
                if (!subset[e.to]) continue;
                const std::array<int, 2> want{lift[u][0] + e.wind[0], lift[u][1] + e.wind[1]};
                if (comp[e.to] < 0) {
                    comp[e.to] = o.count;
                    lift[e.to] = want;
                    st.push_back(e.to);
                } else {
                    w[0] = w[0] || want[0] != lift[e.to][0];
                    w[1] = w[1] || want[1] != lift[e.to][1];
                }
            }
        }
        o.sizes.push_back(size);
        o.wraps.push_back(w);
        ++o.count;
    }
    return o;
}

void expect_census(const CarrierGraph& g, const std::vector<std::uint8_t>& subset) {
    const auto r = clusters(g, subset);
    auto o = dfs_census(g, subset);
    ASSERT_EQ(r.cluster_count, o.count);
    std::vector<std::pair<int, std::array<bool, 2>>> a, b;
    for (int i = 0; i < o.count; ++i) b.push_back({o.sizes[i], o.wraps[i]});
    for (int i = 0; i < r.cluster_count; ++i)
        a.push_back({r.cluster_sizes[i], g.topology == TopologyKind::torus ? r.wrap_flags[i] : std::array<bool, 2>{}});
    if (g.topology != TopologyKind::torus)
        for (auto& x : b) x.second = {};
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b);
    int total = 0;
    for (int s : r.cluster_sizes) total += s;
    EXPECT_EQ(total, static_cast<int>(std::count(subset.begin(), subset.end(), 1)));
    EXPECT_TRUE(std::is_sorted(r.cluster_sizes.rbegin(), r.cluster_sizes.rend()));
}

std::vector<std::uint8_t> random_mask(int n, double p, std::mt19937_64& rng) {
    std::bernoulli_distribution b(p);
    std::vector<std::uint8_t> m(n);
    for (auto& x : m) x = b(rng);
    return m;
}

HeightConfig random_heights(const PlanarPatch& p, int lo, int hi, std::mt19937_64& rng) {
    HeightConfig c = zero_boundary(p, false);
    std::uniform_int_distribution<int> u(lo, hi);
    for (int& h : c.heights) h = u(rng);
    return c;
}

} // namespace

TEST(LevelSet, Examples) {
    const auto ball = build_ball(LatticeSpec::honeycomb(), 3);
    const auto c = zero_boundary(ball, true);
    HeightConfig alt = c;
    for (const auto& v : ball.vertices()) alt.heights[v.id] = v.parity == Parity::odd ? 1 : 0;
    const auto m = level_set(alt, 1, LevelDirection::geq);
    for (const auto& v : ball.vertices()) EXPECT_EQ(m[v.id], v.parity == Parity::odd);
    const auto all = level_set(alt, -1000, LevelDirection::geq);
    EXPECT_EQ(std::count(all.begin(), all.end(), 1), ball.vertex_count());
}

TEST(LevelSet, FilterOracleAndMonotonicity) {
    const auto ball = build_ball(LatticeSpec::truncated_square(), 4);
    std::mt19937_64 rng(4);
    for (int t = 0; t < 50; ++t) {
        const auto c = random_heights(ball, -4, 4, rng);
        for (int a = -5; a <= 5; ++a) {
            const auto ge = level_set(c, a, LevelDirection::geq);
            const auto le = level_set(c, a, LevelDirection::leq);
            const auto ge1 = level_set(c, a + 1, LevelDirection::geq);
            for (int v = 0; v < ball.vertex_count(); ++v) {
                EXPECT_EQ(ge[v], c.heights[v] >= a);
                EXPECT_EQ(le[v], c.heights[v] <= a);
                EXPECT_LE(ge1[v], ge[v]);
            }
        }
    }
}

TEST(OddSpin, Examples) {
    const auto ball = build_ball(LatticeSpec::honeycomb(), 3);
    HeightConfig c = zero_boundary(ball, true);
    for (const auto& v : ball.vertices()) c.heights[v.id] = v.parity == Parity::odd ? 1 : 0;
    auto s = odd_spin_field(c, ball);
    EXPECT_TRUE(std::all_of(s.spins.begin(), s.spins.end(), [](int x) { return x == 1; }));
    for (const auto& v : ball.vertices()) c.heights[v.id] = v.parity == Parity::odd ? -1 : 0;
    s = odd_spin_field(c, ball);
    EXPECT_TRUE(std::all_of(s.spins.begin(), s.spins.end(), [](int x) { return x == -1; }));
    const auto odd = odd_vertex_graph(ball);
    EXPECT_EQ(s.elements, odd.nodes);
}

TEST(OddSpin, MixedMatchesSignAndRejectsEvenHeights) {
    const auto ball = build_ball(LatticeSpec::honeycomb(), 4);
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> u(-3, 2);
    HeightConfig c = zero_boundary(ball, true);
    for (const auto& v : ball.vertices()) c.heights[v.id] = v.parity == Parity::odd ? 2 * u(rng) + 1 : 2 * u(rng);
    const auto s = odd_spin_field(c, ball);
    for (std::size_t i = 0; i < s.elements.size(); ++i)
        EXPECT_EQ(s.spins[i], c.heights[s.elements[i]] > 0 ? 1 : -1);
    c.heights[s.elements[0]] = 2;
    try {
        odd_spin_field(c, ball);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::parity_violation);
    }
}

TEST(EdgeSpin, Examples) {
    const auto p = fixtures::path(2, {0}, 0);
    HeightConfig c = zero_boundary(p, false);
    auto spin = [&](int x, int y, int coin_twice) {
        c.heights = {x, y};
        return edge_spin_field(c, p, {HalfInt{coin_twice}}).spins[0];
    };
    EXPECT_EQ(spin(0, 0, 1), 1);
    EXPECT_EQ(spin(1, 0, -1), 1);
    EXPECT_EQ(spin(-1, 0, 1), -1);
    EXPECT_EQ(spin(0, 0, -1), -1);
}

TEST(Spins, MonotoneInEachHeight) {
    const auto ball = build_ball(LatticeSpec::honeycomb(), 4);
    std::mt19937_64 rng(12);
    Rng coin_rng(3);
    for (int t = 0; t < 20; ++t) {
        const auto c = random_heights(ball, -3, 3, rng);
        const auto coins = draw_coins(ball.edge_count(), coin_rng);
        const auto base = edge_spin_field(c, ball, coins);
        HeightConfig odd = c;
        for (const auto& v : ball.vertices())
            if (v.parity == Parity::odd && odd.heights[v.id] % 2 == 0) odd.heights[v.id] += 1;
        const auto obase = odd_spin_field(odd, ball);
        for (int v = 0; v < ball.vertex_count(); ++v) {
            HeightConfig up = c;
            up.heights[v] += 1;
            const auto s = edge_spin_field(up, ball, coins);
            for (std::size_t k = 0; k < s.spins.size(); ++k) EXPECT_GE(s.spins[k], base.spins[k]);
            // odd carrier: raise by 2 to stay on the parity class
            HeightConfig oup = odd;
            oup.heights[v] += 2;
            const auto os = odd_spin_field(oup, ball);
            for (std::size_t k = 0; k < os.spins.size(); ++k) EXPECT_GE(os.spins[k], obase.spins[k]);
        }
    }
}

TEST(Clusters, TrivialCases) {
    const auto ball = build_ball(LatticeSpec::honeycomb(), 3);
    const auto e = clusters(ball, std::vector<std::uint8_t>(ball.vertex_count(), 0));
    EXPECT_EQ(e.cluster_count, 0);
    EXPECT_EQ(e.largest_fraction, 0.0);
    const auto a = clusters(ball, std::vector<std::uint8_t>(ball.vertex_count(), 1));
    EXPECT_EQ(a.cluster_count, 1);
    EXPECT_EQ(a.largest_fraction, 1.0);
    EXPECT_EQ(a.boundary_touching, std::vector<bool>{true});
}

TEST(Clusters, OddClassIsIndependentInTheBaseGraph) {
    for (const auto& p : {build_ball(LatticeSpec::honeycomb(), 5), build_torus(LatticeSpec::honeycomb(), 6, 6)}) {
        std::vector<std::uint8_t> m(p.vertex_count(), 0);
        int odd = 0;
        for (const auto& v : p.vertices()) odd += m[v.id] = v.parity == Parity::odd;
        const auto r = clusters(p, m);
        EXPECT_EQ(r.cluster_count, odd);
        EXPECT_EQ(r.cluster_sizes.front(), 1);
    }
}

TEST(Clusters, TorusWraps) {
    const auto t = build_torus(LatticeSpec::honeycomb(), 6, 4);
    const auto all = clusters(t, std::vector<std::uint8_t>(t.vertex_count(), 1));
    ASSERT_EQ(all.wrap_flags.size(), 1u);
    EXPECT_TRUE(all.wrap_flags[0][0]);
    EXPECT_TRUE(all.wrap_flags[0][1]);
    EXPECT_TRUE(all.boundary_touching.empty());
    std::vector<std::uint8_t> one(t.vertex_count(), 0);
    one[0] = 1;
    EXPECT_EQ(clusters(t, one).wrapping_clusters(), 0);
}

TEST(Clusters, MatchesDfsOracle) {
    std::mt19937_64 rng(21);
    const std::vector<PlanarPatch> patches{build_ball(LatticeSpec::honeycomb(), 6),
                                           build_ball(LatticeSpec::truncated_square(), 4),
                                           build_torus(LatticeSpec::honeycomb(), 6, 6),
                                           build_torus(LatticeSpec::honeycomb(), 4, 8),
                                           build_torus(LatticeSpec::truncated_square(), 4, 4)};
    for (const auto& p : patches) {
        std::vector<CarrierGraph> carriers{carrier_of(p), line_graph(p).carrier(p.topology().kind)};
        if (p.bipartite()) carriers.push_back(odd_vertex_graph(p).carrier(p.topology().kind));
        for (const auto& g : carriers) {
            ASSERT_LE(g.size(), 200);
            for (double q : {0.3, 0.5, 0.6, 0.7, 0.9})
                for (int t = 0; t < 20; ++t) expect_census(g, random_mask(g.size(), q, rng));
        }
    }
}

TEST(Clusters, LevelSetsOfSampledConfigs) {
    const auto t = build_torus(LatticeSpec::honeycomb(), 6, 6);
    const auto pots = PotentialAssignment::uniform(t, Potential::homomorphism());
    const auto bc = zero_boundary(t, true);
    const auto H = specification(t, pots, bc);
    SamplerConfig cfg;
    cfg.sweeps = 2000;
    cfg.thinning = 20;
    const auto odd = odd_vertex_graph(t).carrier(TopologyKind::torus);
    const auto base = carrier_of(t);
    run_chain(H, find_admissible(H, pinned_range(H)), cfg, {}, [&](long, std::span<const int> phi) {
        HeightConfig c = bc;
        c.heights.assign(phi.begin(), phi.end());
        for (int a = -2; a <= 2; ++a) {
            expect_census(base, level_set(c, a, LevelDirection::geq));
            expect_census(base, level_set(c, a - 1, LevelDirection::leq));
        }
        const auto s = odd_spin_field(c, t);
        expect_census(odd, s.mask(1));
        expect_census(odd, s.mask(-1));
    });
}

TEST(Trifurcation, PathAndEmpty) {
    const auto p = fixtures::path(9, {1, 2, 3, 4, 5, 6, 7}, 4);
    EXPECT_EQ(trifurcation_count(std::vector<std::uint8_t>(9, 1), p, 0), 0);
    EXPECT_EQ(trifurcation_count(std::vector<std::uint8_t>(9, 1), p, 1), 0);
    EXPECT_EQ(trifurcation_count(std::vector<std::uint8_t>(9, 0), p, 1), 0);
}

TEST(Trifurcation, YShapedTree) {
    // centre 0, three arms of length 4; arm tips are boundary vertices
    ExplicitGraph g;
    g.positions.push_back({0, 0});
    g.parities.push_back(Parity::even);
    const double dirs[3][2] = {{1, 0}, {-0.5, 0.866}, {-0.5, -0.866}};
    for (int a = 0; a < 3; ++a) {
        int prev = 0;
        for (int s = 1; s <= 4; ++s) {
            const int id = static_cast<int>(g.positions.size());
            g.positions.push_back({s * dirs[a][0], s * dirs[a][1]});
            g.parities.push_back(s % 2 ? Parity::odd : Parity::even);
            g.edges.push_back({prev, id});
            if (s < 4) g.interior.push_back(id);
            prev = id;
        }
    }
    g.interior.push_back(0);
    const auto p = build_explicit(g);
    std::vector<std::uint8_t> all(p.vertex_count(), 1);
    EXPECT_EQ(trifurcation_count(all, p, 0), 1);
    EXPECT_EQ(trifurcation_count(all, p, 1), 4); // centre box and the three boxes at arm distance one
    std::vector<std::uint8_t> cut = all;
    cut[4] = 0; // tip of the first arm
    EXPECT_EQ(trifurcation_count(cut, p, 0), 0);
}

TEST(Trifurcation, TorusUsesSizeThreshold) {
    const auto t = build_torus(LatticeSpec::honeycomb(), 8, 8);
    std::vector<std::uint8_t> all(t.vertex_count(), 1);
    // removing one small box leaves one connected piece
    EXPECT_EQ(trifurcation_count(all, t, 1), 0);
}
