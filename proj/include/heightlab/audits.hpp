#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "heightlab/derived_graph.hpp"
#include "heightlab/enrichment.hpp"
#include "heightlab/exploration.hpp"
#include "heightlab/fixtures.hpp"
#include "heightlab/gibbs.hpp"
#include "heightlab/json_io.hpp"
#include "heightlab/percolation.hpp"
#include "heightlab/potentials.hpp"
#include "heightlab/studies.hpp"

namespace heightlab {

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double tolerance = 0.0;
    double seconds = 0.0;
    std::string detail;
};

inline Json check_to_json(const CheckResult& c) {
    return Json{{"name", c.name},           {"passed", c.passed},   {"measured", c.measured},
                {"tolerance", c.tolerance}, {"seconds", c.seconds}, {"detail", c.detail}};
}

struct SuiteResult {
    std::string suite;
    std::vector<CheckResult> checks;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
    }
    Json to_json() const {
        Json arr = Json::array();
        for (const auto& c : checks) arr.push_back(check_to_json(c));
        return Json{{"suite", suite}, {"passed", passed()}, {"checks", arr}};
    }
};

/// Times `body`, which fills measured/passed/detail.
inline CheckResult timed(std::string name, double tolerance, const std::function<void(CheckResult&)>& body) {
    CheckResult c;
    c.name = std::move(name);
    c.tolerance = tolerance;
    const auto t0 = std::chrono::steady_clock::now();
    body(c);
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return c;
}

inline std::vector<Potential> shipped_excited_potentials() {
    return {Potential::k_lipschitz(1),
            Potential::k_lipschitz(2),
            Potential::k_lipschitz(3),
            Potential::discrete_gaussian(kLog2),
            Potential::discrete_gaussian(0.3),
            Potential::solid_on_solid(kLog2),
            Potential::solid_on_solid(0.4),
            Potential::star(),
            Potential::table({{0, 0.0}, {1, 0.5}, {2, 1.6}}, {TailKind::quadratic, 0.8})};
}

namespace detail {

inline std::string short_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

inline double rel_dev(double got, double want) {
    if (want == 0.0) return got == 0.0 ? 0.0 : kInfinity;
    return std::abs(got - want) / want;
}

template <typename F>
void sample_ball(const PlanarPatch& p, const Potential& V, long n, int thinning, std::uint64_t seed, F&& f) {
    const auto bc = default_boundary(p, V);
    const auto H = specification(p, PotentialAssignment::uniform(p, V), bc);
    SamplerConfig cfg;
    cfg.sweeps = n * thinning;
    cfg.thinning = thinning;
    cfg.seed = seed;
    run_chain(H, starting_heights(H, bc), cfg, {}, [&](long, std::span<const int> phi) {
        HeightConfig c = bc;
        c.heights.assign(phi.begin(), phi.end());
        f(c);
    });
}

inline double root_mean(const std::map<int, double>& m) {
    double s = 0.0;
    for (const auto& [k, q] : m) s += k * q;
    return s;
}

} // namespace detail

/// w_excited + w_plain = e^{-V(h)} for |h| <= 5.
inline CheckResult check_decomposition(double tol = 1e-14) {
    return timed("decomposition_identity", tol, [&](CheckResult& c) {
        double worst = 0.0;
        for (const auto& V : shipped_excited_potentials())
            for (int h = -5; h <= 5; ++h) {
                const auto w = decompose_weight(V, h);
                worst = std::max(worst, detail::rel_dev(w.excited + w.plain, std::exp(-V(h))));
            }
        c.measured = worst;
        c.passed = worst <= tol;
        c.detail = std::to_string(shipped_excited_potentials().size()) + " potentials, h in [-5, 5]";
    });
}

/// Exhaustive single-edge sums and the sample -> enrich -> collapse identity.
inline CheckResult check_enrichment_invariance(long sweeps = 20000, double tol = 1e-14) {
    return timed("enrichment_marginal_invariance", tol, [&](CheckResult& c) {
        double worst = 0.0;
        for (const auto& V : shipped_excited_potentials())
            worst = std::max(worst, marginal_invariance_check(V, -5, 5).max_rel_deviation);
        const auto hex = fixtures::hexagon();
        const auto pots = PotentialAssignment::uniform(hex, Potential::k_lipschitz(1));
        const auto bc = zero_boundary(hex, false);
        const auto H = specification(hex, pots, bc);
        SamplerConfig cfg;
        cfg.sweeps = sweeps;
        cfg.seed = 77;
        std::vector<std::vector<int>> plain;
        run_chain(H, bc.heights, cfg, {}, [&](long, std::span<const int> phi) { plain.emplace_back(phi.begin(), phi.end()); });
        Rng er(derive_seed(cfg.seed, 1));
        long mismatches = 0, k = 0;
        run_chain(H, bc.heights, cfg, {}, [&](long, std::span<const int> phi) {
            HeightConfig cc = bc;
            cc.heights.assign(phi.begin(), phi.end());
            const auto e = enrich(cc, hex, pots, er, true);
            mismatches += forcing_violations(e, hex).total() != 0;
            mismatches += collapse(e).heights != plain[static_cast<std::size_t>(k++)];
        });
        c.measured = worst;
        c.passed = worst <= tol && mismatches == 0;
        c.detail = "collapse mismatches " + std::to_string(mismatches) + " over " + std::to_string(k) + " samples";
    });
}

struct OracleFixture {
    std::string label;
    Potential V;
    std::vector<int> boundary; // offsets for parity potentials
    bool parity;
};

inline std::vector<OracleFixture> oracle_fixtures() {
    return {{"homomorphism", Potential::homomorphism(), {0, -1, 0, 1, 0, 0}, true},
            {"k_lipschitz(1)", Potential::k_lipschitz(1), {0, 1, 2, -1, 0, 1}, false},
            {"discrete_gaussian(log2)", Potential::discrete_gaussian(kLog2), {0, 0, 1, 0, -1, 0}, false}};
}

inline HeightConfig fixture_boundary(const PlanarPatch& p, const OracleFixture& f) {
    auto values = f.boundary;
    for (std::size_t i = 0; f.parity && i < values.size(); ++i)
        values[i] = parity_value(p, p.boundary()[i]) + 2 * values[i];
    return with_boundary(p, fixtures::boundary_values(p, values), f.parity);
}

/// Heat-bath root marginal vs exhaustive enumeration on the 6-site hexagon.
inline CheckResult check_exact_oracle(long sweeps = 1'000'000, double tol = 0.01) {
    return timed("exact_sampler_oracle", tol, [&](CheckResult& c) {
        const auto hex = fixtures::hexagon();
        double worst = 0.0;
        std::uint64_t label = 0;
        for (const auto& f : oracle_fixtures()) {
            const auto bc = fixture_boundary(hex, f);
            const auto H = specification(hex, PotentialAssignment::uniform(hex, f.V), bc);
            const auto exact = exact_marginal(H, hex.root(), {-6, 7});
            SamplerConfig cfg;
            cfg.sweeps = sweeps;
            cfg.burn_in = 1000;
            cfg.seed = derive_seed(2024, ++label);
            std::vector<int> draws;
            draws.reserve(static_cast<std::size_t>(sweeps));
            run_chain(H, starting_heights(H, bc), cfg, {},
                      [&](long, std::span<const int> phi) { draws.push_back(phi[hex.root()]); });
            const double tv = total_variation(exact, empirical_distribution(draws));
            worst = std::max(worst, tv);
            c.detail += f.label + " TV=" + detail::short_num(tv) + "; ";
        }
        c.measured = worst;
        c.passed = worst <= tol;
    });
}

/// Lattice condition and root log-concavity on enumerable fixtures.
inline CheckResult check_fkg(double tol = 1e-12) {
    return timed("fkg_and_log_concavity", tol, [&](CheckResult& c) {
        struct Case {
            PlanarPatch patch;
            OracleFixture f;
            HeightRange range;
        };
        const auto hex = fixtures::hexagon();
        const auto ball1 = build_ball(LatticeSpec::honeycomb(), 1);
        std::vector<Case> cases{
            {ball1, {"homomorphism ball1", Potential::homomorphism(), std::vector<int>(6, 0), true}, {-5, 5}},
            {hex, {"homomorphism hexagon", Potential::homomorphism(), {0, -1, 0, 1, 0, 0}, true}, {-5, 5}},
            {hex, {"k_lipschitz(1)", Potential::k_lipschitz(1), {0, 1, 2, -1, 0, 1}, false}, {-4, 4}},
            {hex, {"discrete_gaussian(log2)", Potential::discrete_gaussian(kLog2), {0, 0, 1, 0, -1, 0}, false}, {-2, 2}},
            {hex, {"solid_on_solid(0.8)", Potential::solid_on_solid(0.8), {0, 2, 0, 0, 1, 0}, false}, {-1, 2}},
        };
        double worst = -kInfinity;
        for (const auto& k : cases) {
            const auto bc = fixture_boundary(k.patch, k.f);
            const auto d = exact_distribution(k.patch, PotentialAssignment::uniform(k.patch, k.f.V), bc, k.range);
            const double fkg = fkg_violation(d);
            const double lc = log_concavity_violation(d.marginal(k.patch.root()), k.f.parity ? 2 : 1);
            worst = std::max({worst, fkg, lc});
            c.detail += k.f.label + " support=" + std::to_string(d.support.size()) + "; ";
        }
        c.measured = worst;
        c.passed = worst <= tol;
    });
}

/// Exact laws under psi and -psi are negations of each other.
inline CheckResult check_flip_symmetry(double tol = 1e-12) {
    return timed("flip_symmetry", tol, [&](CheckResult& c) {
        const auto hex = fixtures::hexagon();
        std::mt19937_64 rng(4);
        std::uniform_int_distribution<int> u(-2, 2);
        double worst = 0.0;
        for (const auto& V : {Potential::k_lipschitz(2), Potential::discrete_gaussian(0.4), Potential::solid_on_solid(0.7),
                              Potential::discrete_gaussian(kLog2)}) {
            std::vector<int> b(6);
            for (int& x : b) x = u(rng);
            const auto bc = with_boundary(hex, fixtures::boundary_values(hex, b), false);
            const auto pots = PotentialAssignment::uniform(hex, V);
            const auto d1 = exact_distribution(hex, pots, bc, {-3, 3});
            const auto d2 = exact_distribution(hex, pots, negated(bc), {-3, 3});
            worst = std::max(worst, flip_asymmetry(d1, d2));
        }
        c.measured = worst;
        c.passed = worst <= tol;
    });
}

/// Nonnegative boundaries give E[phi(r)] >= 0; enriched conditional laws
/// give E[phi(x)] >= 1/2 on R_n. `measured` is the smallest margin.
inline CheckResult check_mean_bounds(long samples = 400, double tol = 1e-12) {
    return timed("monotone_boundary_mean_bounds", tol, [&](CheckResult& c) {
        double margin = kInfinity;
        const auto hex = fixtures::hexagon();
        std::mt19937_64 rng(12);
        std::uniform_int_distribution<int> u(0, 2);
        int plain_cases = 0, enriched_cases = 0;
        for (int t = 0; t < 5; ++t) {
            std::vector<int> b(6);
            for (int& x : b) x = u(rng);
            for (const auto& V : {Potential::k_lipschitz(1), Potential::discrete_gaussian(kLog2)}) {
                const auto bc = with_boundary(hex, fixtures::boundary_values(hex, b), false);
                const auto H = specification(hex, PotentialAssignment::uniform(hex, V), bc);
                margin = std::min(margin, detail::root_mean(exact_marginal(H, hex.root(), {-4, 5})));
                ++plain_cases;
            }
        }
        const auto ball = build_ball(LatticeSpec::honeycomb(), 2);
        for (const auto& V : {Potential::k_lipschitz(1), Potential::discrete_gaussian(kLog2)}) {
            const auto pots = PotentialAssignment::uniform(ball, V);
            Rng er(12);
            const std::size_t cap = V.kind() == PotentialKind::k_lipschitz ? 10 : 5;
            detail::sample_ball(ball, V, samples, 1, 13, [&](const HeightConfig& cfg) {
                const auto r = explore_enriched(enrich(cfg, ball, pots, er, true), ball, 2);
                if (r.unrevealed.empty() || r.unrevealed.size() > cap) return;
                const auto d = exact_distribution(conditional_hamiltonian(r, ball, pots, cfg), {-3, 4});
                for (int x : r.unrevealed) margin = std::min(margin, d.mean(x) - 0.5);
                ++enriched_cases;
            });
        }
        c.measured = margin;
        c.passed = margin >= -tol && enriched_cases > 0;
        c.detail = std::to_string(plain_cases) + " plain fixtures, " + std::to_string(enriched_cases) + " enriched fixtures";
    });
}

/// Order invariance (10 orders), the step bound and zero boundary-type
/// violations over `samples` enriched explorations.
inline CheckResult check_exploration(long samples = 10000) {
    return timed("exploration_properties", 0.0, [&](CheckResult& c) {
        const auto ball = build_ball(LatticeSpec::honeycomb(), 6);
        long order_mismatch = 0, over_budget = 0, violations = 0, runs = 0;
        Rng order(17);
        detail::sample_ball(ball, Potential::discrete_gaussian(0.5), 200, 5, 3, [&](const HeightConfig& cfg) {
            const auto fifo = explore_plain(cfg, ball, 5, 0, Direction::below);
            over_budget += fifo.steps > fifo.edge_budget;
            for (int t = 0; t < 10; ++t)
                order_mismatch += explore_plain(cfg, ball, 5, 0, Direction::below, &order).unrevealed != fifo.unrevealed;
        });
        const long half = samples / 2;
        std::uint64_t label = 0;
        for (const auto& V : {Potential::k_lipschitz(1), Potential::discrete_gaussian(kLog2)}) {
            const auto pots = PotentialAssignment::uniform(ball, V);
            Rng er(derive_seed(8, ++label));
            detail::sample_ball(ball, V, label == 1 ? half : samples - half, 5, derive_seed(21, label), [&](const HeightConfig& cfg) {
                const auto r = explore_enriched(enrich(cfg, ball, pots, er, true), ball, 5);
                violations += r.violations;
                over_budget += r.steps > r.edge_budget;
                ++runs;
            });
        }
        c.measured = static_cast<double>(order_mismatch + over_budget + violations);
        c.passed = c.measured == 0.0 && runs == samples;
        c.detail = "order mismatches " + std::to_string(order_mismatch) + ", over budget " + std::to_string(over_budget) +
                   ", boundary violations " + std::to_string(violations) + " in " + std::to_string(runs) +
                   " enriched explorations";
    });
}

/// Witness faces everywhere; interior torus degrees 6 (odd-vertex graph,
/// honeycomb) and 4 (line graph). The truncated square odd-vertex degree is
/// compared with a brute-force distance-two count instead.
inline CheckResult check_derived_geometry() {
    return timed("derived_graph_geometry", 0.0, [&](CheckResult& c) {
        long bad = 0;
        std::string note;
        for (const auto& spec : {LatticeSpec::honeycomb(), LatticeSpec::truncated_square()}) {
            for (const auto& p : {build_ball(spec, 4), build_torus(spec, 6, 6)}) {
                const auto lg = line_graph(p);
                const auto og = odd_vertex_graph(p);
                bad += witness_failures(p, lg) + witness_failures(p, og);
                if (p.topology().kind != TopologyKind::torus) continue;
                for (int d : lg.degrees()) bad += d != 4;
                const auto od = og.degrees();
                for (std::size_t i = 0; i < od.size(); ++i) {
                    const auto dist = p.distances_from({og.nodes[i]});
                    int brute = 0;
                    for (int x : dist) brute += x == 2;
                    const int want = spec.family() == LatticeFamily::honeycomb ? 6 : brute;
                    bad += od[i] != want || od[i] != brute;
                }
                if (spec.family() != LatticeFamily::honeycomb && !od.empty())
                    note = "truncated_square odd-vertex degree " + std::to_string(od[0]) + " (brute force)";
            }
        }
        c.measured = static_cast<double>(bad);
        c.passed = bad == 0;
        c.detail = note;
    });
}

/// Union-find census against a DFS oracle; edge spin totals never vanish.
inline CheckResult check_percolation_census(int masks_per_carrier = 100) {
    return timed("percolation_census", 0.0, [&](CheckResult& c) {
        long mismatches = 0, evaluations = 0;
        std::mt19937_64 rng(21);
        auto dfs_count = [](const CarrierGraph& g, const std::vector<std::uint8_t>& m) {
            std::vector<std::uint8_t> seen(g.size(), 0);
            std::vector<int> sizes;
            for (int s = 0; s < g.size(); ++s) {
                if (!m[s] || seen[s]) continue;
                int size = 0;
                std::vector<int> st{s};
                seen[s] = 1;
                while (!st.empty()) {
                    const int u = st.back();
                    st.pop_back();
                    ++size;
                    for (const auto& e : g.adjacency[u])
                        if (m[e.to] && !seen[e.to]) {
                            seen[e.to] = 1;
                            st.push_back(e.to);
                        }
                }
                sizes.push_back(size);
            }
            std::sort(sizes.rbegin(), sizes.rend());
            return sizes;
        };
        const std::vector<PlanarPatch> patches{build_ball(LatticeSpec::honeycomb(), 6), build_ball(LatticeSpec::truncated_square(), 4),
                                               build_torus(LatticeSpec::honeycomb(), 6, 6),
                                               build_torus(LatticeSpec::truncated_square(), 4, 4)};
        for (const auto& p : patches) {
            std::vector<CarrierGraph> carriers{carrier_of(p), line_graph(p).carrier(p.topology().kind),
                                               odd_vertex_graph(p).carrier(p.topology().kind)};
            for (const auto& g : carriers) {
                if (g.size() > 200) continue;
                for (int t = 0; t < masks_per_carrier; ++t) {
                    std::bernoulli_distribution b(0.2 + 0.7 * (t % 8) / 7.0);
                    std::vector<std::uint8_t> m(g.size());
                    for (auto& x : m) x = b(rng);
                    mismatches += clusters(g, m).cluster_sizes != dfs_count(g, m);
                }
            }
        }
        // every spin evaluation throws on a zero total
        const auto ball = build_ball(LatticeSpec::honeycomb(), 4);
        Rng coins(5);
        try {
            detail::sample_ball(ball, Potential::k_lipschitz(1), 500, 2, 31, [&](const HeightConfig& cfg) {
                edge_spin_field(cfg, ball, draw_coins(ball.edge_count(), coins));
                ++evaluations;
            });
        } catch (const Error&) {
            ++mismatches;
        }
        c.measured = static_cast<double>(mismatches);
        c.passed = mismatches == 0;
        c.detail = std::to_string(evaluations) + " edge spin fields evaluated";
    });
}

struct VarianceCheck {
    CheckResult result;
    std::vector<VariancePoint> growth;
    std::vector<VariancePoint> contrast;
};

/// Homomorphism: strictly increasing Var(phi(r)) with gaps > 2 joint stderr.
/// SOS(beta=3): var(32) - var(16) within 2 joint stderr of 0, all var < 1.
inline VarianceCheck check_variance_signature(long sweeps_growth = 200000, long sweeps_contrast = 50000,
                                              std::uint64_t master = 1) {
    VarianceCheck out;
    out.result = timed("delocalisation_signature", 2.0, [&](CheckResult& c) {
        const auto spec = LatticeSpec::honeycomb();
        SamplerConfig cfg;
        cfg.burn_in = 2000;
        std::uint64_t label = 0;
        bool ok = true;
        double worst_gap = kInfinity; // smallest gap / joint stderr
        for (int n : {4, 8, 16, 32}) {
            cfg.sweeps = sweeps_growth;
            cfg.seed = derive_seed(master, 1, ++label);
            out.growth.push_back(variance_point(spec, Potential::homomorphism(), n, cfg));
        }
        for (std::size_t i = 1; i < out.growth.size(); ++i) {
            const auto& a = out.growth[i - 1];
            const auto& b = out.growth[i];
            const double joint = std::hypot(a.stderr_var, b.stderr_var);
            worst_gap = std::min(worst_gap, (b.var_root - a.var_root) / joint);
            ok = ok && b.var_root - a.var_root > 2.0 * joint;
        }
        for (int n : {8, 16, 32}) {
            cfg.sweeps = sweeps_contrast;
            cfg.seed = derive_seed(master, 2, ++label);
            out.contrast.push_back(variance_point(spec, Potential::solid_on_solid(3.0), n, cfg));
        }
        const auto& s16 = out.contrast[1];
        const auto& s32 = out.contrast[2];
        const double joint = std::hypot(s16.stderr_var, s32.stderr_var);
        const double sat = std::abs(s32.var_root - s16.var_root);
        const bool saturated = joint > 0.0 ? sat <= 2.0 * joint : sat == 0.0;
        const bool small = std::all_of(out.contrast.begin(), out.contrast.end(), [](const auto& p) { return p.var_root < 1.0; });
        c.measured = worst_gap;
        c.passed = ok && saturated && small;
        for (const auto& p : out.growth)
            c.detail += "hom n=" + std::to_string(p.n) + " var=" + detail::short_num(p.var_root) + "+-" +
                        detail::short_num(p.stderr_var) + "; ";
        for (const auto& p : out.contrast)
            c.detail += "sos n=" + std::to_string(p.n) + " var=" + detail::short_num(p.var_root) + "; ";
        c.detail += "sos |var32-var16|/joint=" + detail::short_num(joint > 0 ? sat / joint : 0.0);
    });
    return out;
}

/// Suites behind `heightlab audit <suite>`.
inline SuiteResult run_suite(const std::string& suite) {
    SuiteResult s{suite, {}};
    if (suite == "enrichment") {
        s.checks = {check_decomposition(), check_enrichment_invariance()};
    } else if (suite == "fkg") {
        s.checks = {check_fkg(), check_flip_symmetry(), check_mean_bounds()};
    } else if (suite == "exploration") {
        s.checks = {check_exploration(2000)};
    } else if (suite == "geometry") {
        s.checks = {check_derived_geometry()};
    } else if (suite == "percolation") {
        s.checks = {check_percolation_census()};
    } else {
        fail(ErrorCode::fixture_missing, "unknown audit suite '" + suite + "'");
    }
    return s;
}

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"enrichment", "fkg", "exploration", "geometry", "percolation"};
    return names;
}

} // namespace heightlab
