#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "heightlab/potentials.hpp"

using namespace heightlab;

namespace {

std::vector<Potential> shipped_excited() {
    return {Potential::discrete_gaussian(kLog2), Potential::discrete_gaussian(0.25), Potential::k_lipschitz(1),
            Potential::k_lipschitz(2), Potential::k_lipschitz(5), Potential::solid_on_solid(0.5),
            Potential::solid_on_solid(kLog2), Potential::star(),
            Potential::table({{0, 0.0}, {1, 0.5}, {2, 2.0}}, {TailKind::quadratic, 1.0})};
}

// Brute-force second differences over an explicit window.
bool brute_convex(const Potential& V, int w) {
    std::vector<int> finite;
    for (int x = -w; x <= w; ++x)
        if (std::isfinite(V(x))) finite.push_back(x);
    if (finite.empty()) return false;
    if (finite.back() - finite.front() + 1 != static_cast<int>(finite.size())) return false;
    for (int x = finite.front() + 1; x < finite.back(); ++x)
        if (V(x + 1) - 2 * V(x) + V(x - 1) < -1e-9) return false;
    return true;
}

} // namespace

TEST(Evaluate, Homomorphism) {
    const auto V = Potential::homomorphism();
    EXPECT_EQ(V(1), 0.0);
    EXPECT_EQ(V(-1), 0.0);
    EXPECT_TRUE(std::isinf(V(0)));
    EXPECT_TRUE(std::isinf(V(2)));
}

TEST(Evaluate, DiscreteGaussianAndLipschitz) {
    EXPECT_DOUBLE_EQ(Potential::discrete_gaussian(kLog2)(2), 4 * std::log(2.0));
    const auto L = Potential::k_lipschitz(2);
    EXPECT_EQ(L(-2), 0.0);
    EXPECT_TRUE(std::isinf(L(3)));
}

TEST(Evaluate, TableTailsAndMirroring) {
    const auto q = Potential::table({{0, 1.0}, {1, 1.5}, {2, 3.0}}, {TailKind::quadratic, 0.5});
    EXPECT_DOUBLE_EQ(q.normalisation_offset(), 1.0);
    EXPECT_DOUBLE_EQ(q(0), 0.0);
    EXPECT_DOUBLE_EQ(q(-1), 0.5);
    EXPECT_DOUBLE_EQ(q(3), 2.0 + 0.5 * (9 - 4));
    const auto l = Potential::table({{0, 0.0}, {1, 0.5}}, {TailKind::linear, 2.0});
    EXPECT_DOUBLE_EQ(l(-4), 0.5 + 2.0 * 3);
    const auto f = Potential::table({{0, 0.0}, {1, 0.5}});
    EXPECT_TRUE(std::isinf(f(2)));
}

TEST(Evaluate, ParityTableNormalisesOnOddMinimum) {
    const auto p = Potential::parity_table({{1, 2.0}, {3, 5.0}}, {TailKind::quadratic, 1.0});
    EXPECT_DOUBLE_EQ(p.normalisation_offset(), 2.0);
    EXPECT_DOUBLE_EQ(p(1), 0.0);
    EXPECT_DOUBLE_EQ(p(-3), 3.0);
    EXPECT_TRUE(std::isinf(p(0)));
    EXPECT_TRUE(std::isinf(p(4)));
    EXPECT_TRUE(std::isfinite(p(5)));
    EXPECT_THROW(Potential::parity_table({{2, 0.0}}), Error);
}

TEST(Classify, Examples) {
    EXPECT_TRUE(classify(Potential::discrete_gaussian(kLog2)).excited);
    const auto sos = classify(Potential::solid_on_solid(1.0));
    EXPECT_FALSE(sos.excited);
    EXPECT_TRUE(sos.convex);
    const auto hom = classify(Potential::homomorphism());
    EXPECT_TRUE(hom.parity);
    EXPECT_FALSE(hom.excited);
    EXPECT_FALSE(hom.convex);
}

TEST(Classify, EvenExcited) {
    const auto v = Potential::table({{0, 0.0}, {2, 0.5}, {4, 2.0}}, {});
    const auto c = classify(v);
    EXPECT_TRUE(c.even_excited);
    EXPECT_FALSE(c.excited);
    EXPECT_FALSE(c.parity);
}

TEST(Classify, InfiniteMassIsNotAPotential) {
    const auto flat = Potential::table({{0, 0.0}, {1, 0.1}}, {TailKind::linear, 0.0});
    EXPECT_FALSE(classify(flat).finite_mass);
    EXPECT_FALSE(classify(flat).excited);
    EXPECT_FALSE(classify(Potential::solid_on_solid(0.0)).finite_mass);
}

TEST(Classify, AsymmetricTableIsRejected) {
    // mirroring only fills missing entries; explicit asymmetric values survive
    const auto v = Potential::table({{0, 0.0}, {1, 0.2}, {-1, 0.4}});
    EXPECT_FALSE(classify(v).symmetric);
    EXPECT_FALSE(classify(v).excited);
}

TEST(Classify, ConvexityMatchesBruteForceOnRandomTables) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    std::bernoulli_distribution hole(0.15);
    int agreements = 0;
    for (int t = 0; t < 400; ++t) {
        std::vector<std::pair<int, double>> vals;
        for (int x = 0; x <= 5; ++x) vals.push_back({x, hole(rng) ? kInfinity : u(rng) * x});
        vals[0].second = 0.0;
        const auto V = Potential::table(vals);
        EXPECT_EQ(classify(V).convex, brute_convex(V, V.check_radius())) << t;
        ++agreements;
    }
    EXPECT_EQ(agreements, 400);
}

TEST(StarPotential, ValuesAndMass) {
    const auto s = star_potential();
    EXPECT_EQ(s(0), 0.0);
    EXPECT_DOUBLE_EQ(s(1), std::log(2.0));
    EXPECT_TRUE(std::isinf(s(-2)));
    double mass = 0.0;
    for (int x = -5; x <= 5; ++x) mass += std::exp(-s(x));
    EXPECT_NEAR(mass, 2.0, 1e-15);
    EXPECT_TRUE(classify(s).excited);
}

TEST(Midpoint, Values) {
    const auto m = midpoint_potential();
    EXPECT_EQ(m(HalfInt::half(1)), 0.0);
    EXPECT_EQ(m(HalfInt::half(-1)), m(HalfInt::half(1)));
    EXPECT_TRUE(std::isinf(m(HalfInt::half(3))));
    EXPECT_TRUE(std::isinf(m(HalfInt::from_int(0))));
}

TEST(Decompose, Examples) {
    for (const auto& V : shipped_excited()) {
        const auto w = decompose_weight(V, 0);
        EXPECT_EQ(w.excited, 1.0);
        EXPECT_EQ(w.plain, 0.0);
    }
    const auto a = decompose_weight(Potential::k_lipschitz(1), 1);
    EXPECT_DOUBLE_EQ(a.excited, 0.5);
    EXPECT_DOUBLE_EQ(a.plain, 0.5);
    const auto b = decompose_weight(Potential::k_lipschitz(2), 2);
    EXPECT_EQ(b.excited, 0.0);
    EXPECT_EQ(b.plain, 1.0);
    EXPECT_THROW(decompose_weight(Potential::solid_on_solid(1.0), 1), Error);
    try {
        decompose_weight(Potential::homomorphism(), 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::not_excited);
    }
}

TEST(Decompose, IdentityAndNonnegativity) {
    for (const auto& V : shipped_excited()) {
        for (int h = -5; h <= 5; ++h) {
            const auto w = decompose_weight(V, h);
            const double target = std::exp(-V(h));
            EXPECT_GE(w.excited, 0.0);
            EXPECT_GE(w.plain, 0.0);
            if (target == 0.0)
                EXPECT_EQ(w.excited + w.plain, 0.0);
            else
                EXPECT_LE(std::abs(w.excited + w.plain - target) / target, 1e-14) << V.describe() << " h=" << h;
        }
    }
}

TEST(Decompose, DominanceByStar) {
    const auto s = star_potential();
    for (const auto& V : shipped_excited())
        for (int x = -10; x <= 10; ++x) EXPECT_LE(V(x), s(x) + 1e-12) << V.describe() << " x=" << x;
}

TEST(Scaling, ExcitedClosureUnderTemperature) {
    const std::vector<Potential> bases = {
        Potential::solid_on_solid(1.0), Potential::solid_on_solid(3.0), Potential::discrete_gaussian(2.0),
        Potential::table({{0, 0.0}, {1, 1.3}, {2, 4.0}, {3, 9.5}}, {TailKind::quadratic, 1.0}),
        Potential::table({{0, 0.0}, {1, 2.0}, {2, 4.0}}, {TailKind::linear, 2.0})};
    for (const auto& V : bases) {
        ASSERT_TRUE(classify(V).convex);
        const double bmax = kLog2 / V(1);
        for (double f : {0.01, 0.1, 0.5, 0.9, 0.999, 1.0}) {
            const auto scaled = V.scaled(f * bmax);
            EXPECT_TRUE(classify(scaled).excited) << V.describe() << " f=" << f;
        }
        EXPECT_FALSE(classify(V.scaled(1.01 * bmax)).excited);
    }
}

TEST(Scaling, PreservesKindWhereClosed) {
    const auto dg = Potential::discrete_gaussian(2.0).scaled(0.5);
    EXPECT_EQ(dg.kind(), PotentialKind::discrete_gaussian);
    EXPECT_DOUBLE_EQ(dg(3), 9.0);
    EXPECT_EQ(Potential::homomorphism().scaled(3.0).kind(), PotentialKind::homomorphism);
    const auto st = Potential::star().scaled(0.5);
    EXPECT_DOUBLE_EQ(st(1), 0.5 * kLog2);
    EXPECT_TRUE(std::isinf(st(2)));
}

TEST(Window, TailMassBoundsAndValidation) {
    EXPECT_THROW(Potential::discrete_gaussian(1.0).with_window(1), Error);
    const auto V = Potential::solid_on_solid(1.0);
    double direct = 0.0;
    for (int x = 11; x < 2000; ++x) direct += std::exp(-V(x));
    EXPECT_NEAR(tail_mass(V, 10), direct, 1e-15);
    EXPECT_EQ(tail_mass(Potential::k_lipschitz(3), 3), 0.0);
    EXPECT_TRUE(std::isinf(tail_mass(Potential::table({{0, 0.0}}, {TailKind::linear, 0.0}), 5)));
}

TEST(Assignment, ByOrbit) {
    const auto patch = build_ball(LatticeSpec::honeycomb(), 2);
    const auto a = PotentialAssignment::by_orbit(
        patch, {Potential::k_lipschitz(1), Potential::discrete_gaussian(0.5), Potential::star()});
    for (int e = 0; e < patch.edge_count(); ++e) EXPECT_EQ(a.id(e), patch.edges()[e].orbit);
    EXPECT_TRUE(a.all_excited());
    EXPECT_FALSE(a.any_parity());
    EXPECT_THROW(PotentialAssignment::by_orbit(patch, {Potential::star()}), Error);
}
