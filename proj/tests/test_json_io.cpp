#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "heightlab/fixtures.hpp"
#include "heightlab/json_io.hpp"

using namespace heightlab;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(PatchJson, GoldenFiles) {
    for (const auto& [name, patch] : {std::pair{"honeycomb_ball1", build_ball(LatticeSpec::honeycomb(), 1)},
                                      std::pair{"star", fixtures::star()}}) {
        const auto want = slurp(std::string(HEIGHTLAB_TEST_DATA) + "/patch_" + name + ".json");
        ASSERT_FALSE(want.empty()) << name;
        EXPECT_EQ(patch_to_json(patch).dump(2) + "\n", want) << name;
    }
}

TEST(PatchJson, FieldOrderAndDeterminism) {
    const auto a = patch_to_json(build_torus(LatticeSpec::truncated_square(), 2, 2));
    const auto b = patch_to_json(build_torus(LatticeSpec::truncated_square(), 2, 2));
    EXPECT_EQ(a.dump(), b.dump());
    std::vector<std::string> keys;
    for (const auto& [k, v] : a.items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"vertices", "edges", "interior", "boundary", "root", "topology"}));
    EXPECT_EQ(a["topology"]["kind"], "torus");
    EXPECT_EQ(a["vertices"][0].size(), 4u);
}

TEST(PotentialJson, RoundTrip) {
    const std::vector<Potential> pots{Potential::discrete_gaussian(0.6931),
                                      Potential::solid_on_solid(3.0),
                                      Potential::k_lipschitz(2),
                                      Potential::homomorphism(),
                                      Potential::star(),
                                      Potential::table({{0, 0.5}, {1, 0.7}, {2, kInfinity}}),
                                      Potential::table({{0, 0.0}, {1, 0.4}}, {TailKind::quadratic, 0.25}),
                                      Potential::parity_table({{1, 0.0}, {3, 2.0}}, {TailKind::linear, 1.0}),
                                      Potential::discrete_gaussian(0.2).with_window(20)};
    for (const auto& V : pots) {
        const auto W = potential_from_json(Json::parse(potential_to_json(V).dump()));
        EXPECT_EQ(W.kind(), V.kind()) << V.describe();
        EXPECT_EQ(W.window(), V.window());
        for (int x = -8; x <= 8; ++x) EXPECT_EQ(W(x), V(x)) << V.describe() << " x=" << x;
    }
}

TEST(PotentialJson, ParsesConfigSyntax) {
    const auto V = potential_from_json(Json::parse(R"({"kind": "table", "values": [[0, 0], [1, 0.5], [2, "inf"]]})"));
    EXPECT_EQ(V(1), 0.5);
    EXPECT_TRUE(std::isinf(V(2)));
    EXPECT_TRUE(std::isinf(V(3)));
    EXPECT_EQ(potential_from_json(Json::parse(R"({"kind": "discrete_gaussian", "beta": 0.6931})")).beta(), 0.6931);
    for (const char* bad : {R"({"kind": "nope"})", R"({"beta": 1})", R"({"kind": "solid_on_solid"})",
                            R"({"kind": "table", "values": [[0, "infinity"]]})"}) {
        try {
            potential_from_json(Json::parse(bad));
            FAIL() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::config_error) << bad;
        }
    }
}

TEST(EnrichedJson, RoundTrip) {
    const auto hex = fixtures::hexagon();
    const auto pots = PotentialAssignment::uniform(hex, Potential::k_lipschitz(1));
    const auto bc = zero_boundary(hex, false);
    SamplerConfig cfg;
    cfg.sweeps = 50;
    Rng rng(4);
    run_chain(specification(hex, pots, bc), bc.heights, cfg, {}, [&](long, std::span<const int> phi) {
        HeightConfig c = bc;
        c.heights.assign(phi.begin(), phi.end());
        const auto e = enrich(c, hex, pots, rng, true);
        const auto j = enriched_to_json(e);
        EXPECT_EQ(enriched_from_json(Json::parse(j.dump())), e);
        EXPECT_TRUE(j.contains("coin_x2"));
    });
}

TEST(ExplorationJson, BitsetAndTypes) {
    const auto p = fixtures::path(2, {1}, 1);
    EnrichedConfig e;
    e.base = zero_boundary(p, false);
    e.excited = {1};
    e.midpoint = {HalfInt{1}};
    e.coins = std::vector<HalfInt>{HalfInt{1}};
    const auto j = exploration_to_json(explore_enriched(e, p, 0));
    EXPECT_EQ(j["revealed"], "10");
    EXPECT_EQ(j["boundary_edges"][0]["type"], "zero_excited_plus_half");
    EXPECT_EQ(j["unrevealed"], Json::array({1}));
}

TEST(PercolationJson, Fields) {
    const auto t = build_torus(LatticeSpec::honeycomb(), 4, 4);
    const auto j = percolation_to_json(clusters(t, std::vector<std::uint8_t>(t.vertex_count(), 1)));
    EXPECT_EQ(j["cluster_count"], 1);
    EXPECT_EQ(j["largest_fraction"], 1.0);
    EXPECT_EQ(j["wrap_flags"][0], Json::array({true, true}));
}

TEST(Csv, SeriesAndSummary) {
    ObservableSeries s;
    s.ids = {"a", "b"};
    s.sweeps = {10, 20};
    s.values = {{0.1, 2.0}, {1.0 / 3.0, -1.0}};
    s.summary = {{}, {}};
    s.seed = 7;
    std::ostringstream out;
    write_series_csv(out, s);
    EXPECT_EQ(out.str(),
              "sweep,observable_id,value\n10,a,0.10000000000000001\n10,b,0.33333333333333331\n20,a,2\n20,b,-1\n");
    const auto j = series_summary_json(s);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j[0].items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"observable", "mean", "stderr", "variance", "n_samples", "seed"}));
    EXPECT_EQ(std::stod(format_double(0.1)), 0.1);
}
