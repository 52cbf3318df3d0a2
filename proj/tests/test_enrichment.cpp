#include <gtest/gtest.h>

#include <cmath>

#include "heightlab/enrichment.hpp"
#include "heightlab/fixtures.hpp"

using namespace heightlab;

namespace {

std::vector<Potential> excited_suite() {
    return {Potential::k_lipschitz(1), Potential::k_lipschitz(3), Potential::discrete_gaussian(kLog2),
            Potential::discrete_gaussian(0.2), Potential::solid_on_solid(0.6), Potential::star(),
            Potential::table({{0, 0.0}, {1, 0.4}, {2, 1.5}}, {TailKind::linear, 1.5})};
}

} // namespace

TEST(Excitation, Probabilities) {
    for (const auto& V : excited_suite()) EXPECT_EQ(excitation_probability(V, 0), 1.0) << V.describe();
    EXPECT_DOUBLE_EQ(excitation_probability(Potential::k_lipschitz(1), 1), 0.5);
    EXPECT_EQ(excitation_probability(Potential::discrete_gaussian(kLog2), 1), 1.0);
    EXPECT_EQ(excitation_probability(Potential::k_lipschitz(3), 2), 0.0);
    EXPECT_THROW(excitation_probability(Potential::k_lipschitz(1), 2), Error);
}

TEST(Midpoint, Distribution) {
    const auto a = midpoint_distribution(0, 0);
    ASSERT_EQ(a.size(), 2u);
    EXPECT_EQ(a.at(HalfInt::half(-1)), 0.5);
    EXPECT_EQ(a.at(HalfInt::half(1)), 0.5);
    const auto b = midpoint_distribution(0, 1);
    ASSERT_EQ(b.size(), 1u);
    EXPECT_EQ(b.at(HalfInt::half(1)), 1.0);
    const auto c = midpoint_distribution(3, 2);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c.begin()->first.twice, 5);
    try {
        midpoint_distribution(0, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::gap_too_large);
    }
}

TEST(Invariance, ClosedFormSums) {
    const auto r = marginal_invariance_check(Potential::k_lipschitz(1), -2, 2);
    EXPECT_LT(r.max_abs_deviation, 1e-14);
    EXPECT_EQ(r.rows.size(), 5u);
    const auto z = marginal_invariance_check(Potential::discrete_gaussian(0.3), 0, 0);
    EXPECT_DOUBLE_EQ(z.rows[0].enriched_sum, 1.0);
    const auto V = Potential::solid_on_solid(0.5);
    const auto t = marginal_invariance_check(V, 3, 3);
    EXPECT_DOUBLE_EQ(t.rows[0].enriched_sum, std::exp(-V(3)));
}

TEST(Invariance, SingleEdgeExhaustiveSum) {
    for (const auto& V : excited_suite()) {
        const auto r = marginal_invariance_check(V, -5, 5);
        EXPECT_LE(r.max_rel_deviation, 1e-14) << V.describe();
        for (const auto& row : r.rows) {
            if (row.target != 0.0) continue;
            EXPECT_EQ(row.enriched_sum, 0.0);
        }
    }
}

TEST(Enrich, ForcingRulesOnSampledConfigs) {
    const auto ball = build_ball(LatticeSpec::honeycomb(), 4);
    for (const auto& V : {Potential::k_lipschitz(2), Potential::discrete_gaussian(kLog2), Potential::solid_on_solid(0.5)}) {
        const auto pots = PotentialAssignment::uniform(ball, V);
        const auto bc = zero_boundary(ball, false);
        const auto H = specification(ball, pots, bc);
        SamplerConfig cfg;
        cfg.sweeps = 2000;
        cfg.thinning = 10;
        Rng er(42);
        long edges = 0, excited = 0;
        run_chain(H, bc.heights, cfg, {}, [&](long, std::span<const int> phi) {
            HeightConfig c = bc;
            c.heights.assign(phi.begin(), phi.end());
            const auto e = enrich(c, ball, pots, er, true);
            EXPECT_EQ(forcing_violations(e, ball).total(), 0);
            EXPECT_EQ(collapse(e), c);
            edges += ball.edge_count();
            for (auto x : e.excited) excited += x;
        });
        EXPECT_GT(excited, 0);
        EXPECT_LE(excited, edges);
    }
}

TEST(Enrich, RejectsNonExcitedPotentials) {
    const auto hex = fixtures::hexagon();
    Rng rng(1);
    try {
        enrich(zero_boundary(hex, false), hex, PotentialAssignment::uniform(hex, Potential::solid_on_solid(1.0)), rng);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::not_excited);
    }
}

TEST(Enrich, ForcingCheckerCatchesViolations) {
    const auto p = fixtures::path(3, {1}, 1);
    EnrichedConfig e;
    e.base = zero_boundary(p, false);
    e.base.heights = {0, 0, 3};
    e.excited = {0, 1};
    e.midpoint = {std::nullopt, HalfInt{1}};
    const auto r = forcing_violations(e, p);
    EXPECT_EQ(r.flat_not_excited, 1);
    EXPECT_EQ(r.steep_excited, 1);
    EXPECT_EQ(r.bad_midpoint, 1);
}

TEST(Enrich, EmpiricalExcitationFrequency) {
    // Single edge with gradient 1 under k_lipschitz(1): epsilon ~ Bernoulli(1/2).
    const auto p = fixtures::path(2, {0}, 0);
    HeightConfig c = zero_boundary(p, false);
    c.heights = {0, 1};
    const auto pots = PotentialAssignment::uniform(p, Potential::k_lipschitz(1));
    Rng rng(9);
    const int n = 100000;
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += enrich(c, p, pots, rng).excited[0];
    EXPECT_NEAR(hits / double(n), 0.5, 4 * std::sqrt(0.25 / n));
}

TEST(Enrich, SampleEnrichCollapseIsBitwiseIdentity) {
    const auto hex = fixtures::hexagon();
    const auto pots = PotentialAssignment::uniform(hex, Potential::k_lipschitz(1));
    const auto bc = zero_boundary(hex, false);
    const auto H = specification(hex, pots, bc);
    SamplerConfig cfg;
    cfg.sweeps = 20000;
    cfg.seed = 31;
    std::vector<std::vector<int>> plain, collapsed;
    run_chain(H, bc.heights, cfg, {}, [&](long, std::span<const int> phi) { plain.emplace_back(phi.begin(), phi.end()); });
    Rng er(derive_seed(cfg.seed, 1));
    run_chain(H, bc.heights, cfg, {}, [&](long, std::span<const int> phi) {
        HeightConfig c = bc;
        c.heights.assign(phi.begin(), phi.end());
        collapsed.push_back(collapse(enrich(c, hex, pots, er, true)).heights);
    });
    EXPECT_EQ(plain, collapsed);
}

TEST(Coins, FairAndIndependentOfHeights) {
    const auto hex = fixtures::hexagon();
    const auto pots = PotentialAssignment::uniform(hex, Potential::k_lipschitz(1));
    const auto bc = zero_boundary(hex, false);
    const auto H = specification(hex, pots, bc);
    SamplerConfig cfg;
    cfg.sweeps = 100000;
    cfg.seed = 5;
    Rng er(derive_seed(cfg.seed, 7));
    // rows: coin -1/+1; columns: phi(x) + phi(y) in {-2..2} on a fixed interior edge
    std::vector<std::vector<double>> table(2, std::vector<double>(5, 0.0));
    std::vector<double> counts(2, 0.0);
    int edge = -1;
    for (int k = 0; k < hex.edge_count(); ++k)
        if (hex.is_interior(hex.edges()[k].a) && hex.is_interior(hex.edges()[k].b)) edge = k;
    ASSERT_GE(edge, 0);
    long mismatches = 0;
    run_chain(H, bc.heights, cfg, {}, [&](long, std::span<const int> phi) {
        HeightConfig c = bc;
        c.heights.assign(phi.begin(), phi.end());
        const auto e = enrich(c, hex, pots, er, true);
        mismatches += forcing_violations(e, hex).coin_mismatch;
        const int coin = (*e.coins)[edge].twice > 0 ? 1 : 0;
        const int s = phi[hex.edges()[edge].a] + phi[hex.edges()[edge].b];
        table[coin][s + 2] += 1;
        counts[coin] += 1;
    });
    EXPECT_EQ(mismatches, 0);
    EXPECT_GT(chi_square_uniform(counts).p_value, 1e-3);
    EXPECT_GT(chi_square_independence(table).p_value, 1e-3);
}

TEST(Coins, ChiSquareDetectsDependence) {
    EXPECT_LT(chi_square_independence({{900, 100}, {100, 900}}).p_value, 1e-3);
    EXPECT_LT(chi_square_uniform({700, 300}).p_value, 1e-3);
    EXPECT_NEAR(chi_square_uniform({500, 500}).p_value, 1.0, 1e-12);
}
