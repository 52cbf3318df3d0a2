#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "heightlab/error.hpp"
#include "heightlab/gibbs.hpp"
#include "heightlab/lattice.hpp"
#include "heightlab/potentials.hpp"
#include "heightlab/stats.hpp"

namespace heightlab {

/// Base heights plus per-edge excitation bits, midpoints and (optionally)
/// the coin field. A midpoint is std::nullopt exactly when the edge is not
/// excited.
struct EnrichedConfig {
    HeightConfig base;
    std::vector<std::uint8_t> excited;
    std::vector<std::optional<HalfInt>> midpoint;
    std::optional<std::vector<HalfInt>> coins; // each +-1/2

    friend bool operator==(const EnrichedConfig&, const EnrichedConfig&) = default;
};

/// Probability that an edge with gradient h is excited: e^{-V*(h)} / e^{-V(h)}.
inline double excitation_probability(const Potential& V, int h) {
    const auto w = decompose_weight(V, h);
    const double total = w.excited + w.plain;
    if (!(total > 0.0)) fail(ErrorCode::infeasible, "edge gradient has infinite energy");
    return w.excited / total;
}

/// Law of the midpoint given the endpoint heights.
inline std::map<HalfInt, double> midpoint_distribution(int phix, int phiy) {
    const int h = phiy - phix;
    if (std::abs(h) >= 2) fail(ErrorCode::gap_too_large, "no midpoint is 1/2-close to both heights");
    if (h == 0) return {{HalfInt{2 * phix - 1}, 0.5}, {HalfInt{2 * phix + 1}, 0.5}};
    return {{HalfInt{phix + phiy}, 1.0}};
}

inline std::vector<HalfInt> draw_coins(int edges, Rng& rng) {
    std::vector<HalfInt> c(static_cast<std::size_t>(edges));
    std::bernoulli_distribution fair(0.5);
    for (auto& x : c) x = HalfInt{fair(rng) ? 1 : -1};
    return c;
}

/// Samples (epsilon, midpoint) for every edge independently given phi. With
/// coins enabled they are drawn first, for all edges, and override the
/// midpoint on excited edges whose endpoints are both at height 0.
inline EnrichedConfig enrich(const HeightConfig& c, const PlanarPatch& p, const PotentialAssignment& pots, Rng& rng,
                             bool with_coins = false) {
    for (const auto& V : pots.potentials())
        if (!classify(V).excited) fail(ErrorCode::not_excited, V.describe() + " is not an excited potential");
    EnrichedConfig e;
    e.base = c;
    e.excited.assign(static_cast<std::size_t>(p.edge_count()), 0);
    e.midpoint.assign(static_cast<std::size_t>(p.edge_count()), std::nullopt);
    if (with_coins) e.coins = draw_coins(p.edge_count(), rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::bernoulli_distribution fair(0.5);
    for (int k = 0; k < p.edge_count(); ++k) {
        const auto& ed = p.edges()[k];
        const int x = c.heights[ed.a], y = c.heights[ed.b];
        const double prob = excitation_probability(pots.at(k), y - x);
        if (!(prob >= 1.0) && !(u(rng) < prob)) continue;
        e.excited[k] = 1;
        if (x == y) {
            const bool up = fair(rng);
            if (e.coins && x == 0)
                e.midpoint[k] = (*e.coins)[k];
            else
                e.midpoint[k] = HalfInt{2 * x + (up ? 1 : -1)};
        } else {
            e.midpoint[k] = HalfInt{x + y};
        }
    }
    return e;
}

inline HeightConfig collapse(const EnrichedConfig& e) { return e.base; }

struct ForcingReport {
    long flat_not_excited = 0;     // h = 0 but epsilon = 0
    long steep_excited = 0;        // |h| > 1 but epsilon = 1
    long bad_midpoint = 0;         // excited without a 1/2-close midpoint, or plain with one
    long coin_mismatch = 0;        // phi(x) = phi(y) = 0, excited, midpoint != coin
    long total() const { return flat_not_excited + steep_excited + bad_midpoint + coin_mismatch; }
};

inline ForcingReport forcing_violations(const EnrichedConfig& e, const PlanarPatch& p) {
    ForcingReport r;
    for (int k = 0; k < p.edge_count(); ++k) {
        const auto& ed = p.edges()[k];
        const int x = e.base.heights[ed.a], y = e.base.heights[ed.b];
        const bool exc = e.excited[k] != 0;
        if (x == y && !exc) ++r.flat_not_excited;
        if (std::abs(y - x) > 1 && exc) ++r.steep_excited;
        const auto& m = e.midpoint[k];
        if (exc != m.has_value()) {
            ++r.bad_midpoint;
        } else if (m && (std::abs(m->twice - 2 * x) != 1 || std::abs(m->twice - 2 * y) != 1)) {
            ++r.bad_midpoint;
        }
        if (e.coins && exc && x == 0 && y == 0 && (!m || *m != (*e.coins)[k])) ++r.coin_mismatch;
    }
    return r;
}

/// Enriched weight of one edge state: e^{-V(h)} - e^{-V*(h)} when plain, and
/// (1/2) e^{-V_*(z - phix)} e^{-V_*(phiy - z)} when excited with midpoint z.
inline double enriched_edge_weight(const Potential& V, int phix, int phiy, bool excited, std::optional<HalfInt> z) {
    if (!excited) return z ? 0.0 : decompose_weight(V, phiy - phix).plain;
    if (!z) return 0.0;
    const auto vs = midpoint_potential();
    return 0.5 * std::exp(-vs(*z - HalfInt::from_int(phix))) * std::exp(-vs(HalfInt::from_int(phiy) - *z));
}

struct InvarianceRow {
    int h;
    double enriched_sum;
    double target; // e^{-V(h)}
    double abs_deviation;
};

struct InvarianceReport {
    std::vector<InvarianceRow> rows;
    double max_abs_deviation = 0.0;
    double max_rel_deviation = 0.0;
};

/// Sums the enriched single-edge weights over epsilon and every half-integer
/// midpoint, for phi(x) = 0 and phi(y) = h, and compares with e^{-V(h)}.
inline InvarianceReport marginal_invariance_check(const Potential& V, int h_lo, int h_hi) {
    InvarianceReport rep;
    for (int h = h_lo; h <= h_hi; ++h) {
        CompensatedSum s;
        s += enriched_edge_weight(V, 0, h, false, std::nullopt);
        for (int twice = -2 * std::abs(h) - 5; twice <= 2 * std::abs(h) + 5; twice += 2)
            s += enriched_edge_weight(V, 0, h, true, HalfInt{twice});
        const double target = std::exp(-V(h));
        const double dev = std::abs(s.value() - target);
        rep.rows.push_back({h, s.value(), target, dev});
        rep.max_abs_deviation = std::max(rep.max_abs_deviation, dev);
        if (target > 0.0) rep.max_rel_deviation = std::max(rep.max_rel_deviation, dev / target);
    }
    return rep;
}

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

/// Pearson test of independence on a contingency table (rows x columns).
inline ChiSquareResult chi_square_independence(const std::vector<std::vector<double>>& table) {
    ChiSquareResult r;
    std::vector<double> rs(table.size(), 0.0), cs(table.empty() ? 0 : table[0].size(), 0.0);
    double n = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i)
        for (std::size_t j = 0; j < table[i].size(); ++j) {
            rs[i] += table[i][j];
            cs[j] += table[i][j];
            n += table[i][j];
        }
    int nr = 0, nc = 0;
    for (double x : rs) nr += x > 0;
    for (double x : cs) nc += x > 0;
    r.dof = (nr - 1) * (nc - 1);
    if (r.dof <= 0) return r;
    for (std::size_t i = 0; i < table.size(); ++i)
        for (std::size_t j = 0; j < table[i].size(); ++j) {
            const double expct = rs[i] * cs[j] / n;
            if (expct > 0) r.statistic += (table[i][j] - expct) * (table[i][j] - expct) / expct;
        }
    r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.dof), r.statistic));
    return r;
}

/// Goodness of fit of counts against a uniform law.
inline ChiSquareResult chi_square_uniform(const std::vector<double>& counts) {
    ChiSquareResult r;
    double n = 0.0;
    for (double c : counts) n += c;
    r.dof = static_cast<int>(counts.size()) - 1;
    if (r.dof <= 0 || n <= 0) return r;
    const double expct = n / static_cast<double>(counts.size());
    for (double c : counts) r.statistic += (c - expct) * (c - expct) / expct;
    r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.dof), r.statistic));
    return r;
}

} // namespace heightlab
