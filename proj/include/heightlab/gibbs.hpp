#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "heightlab/error.hpp"
#include "heightlab/lattice.hpp"
#include "heightlab/potentials.hpp"
#include "heightlab/stats.hpp"

namespace heightlab {

/// Heights on every patch vertex. Pinned vertices (the boundary, or the root
/// of a torus) are never resampled.
struct HeightConfig {
    std::vector<int> heights;
    std::vector<std::uint8_t> pinned;
    bool parity_constraint = false;

    int size() const { return static_cast<int>(heights.size()); }

    std::map<int, int> boundary_condition() const {
        std::map<int, int> out;
        for (int v = 0; v < size(); ++v)
            if (pinned[v]) out[v] = heights[v];
        return out;
    }

    friend bool operator==(const HeightConfig&, const HeightConfig&) = default;
};

/// 0 on even vertices, 1 on odd ones.
inline int parity_value(const PlanarPatch& p, int v) { return p.vertices()[v].parity == Parity::odd ? 1 : 0; }

/// Boundary pinned at zero (or at the parity-correct value in {0, 1}); the
/// interior starts from the same flat profile.
inline HeightConfig zero_boundary(const PlanarPatch& p, bool parity_adjusted) {
    HeightConfig c;
    c.parity_constraint = parity_adjusted;
    c.heights.resize(p.vertex_count());
    c.pinned.resize(p.vertex_count());
    for (int v = 0; v < p.vertex_count(); ++v) {
        c.heights[v] = parity_adjusted ? parity_value(p, v) : 0;
        c.pinned[v] = p.is_interior(v) ? 0 : 1;
    }
    if (p.topology().kind == TopologyKind::torus) c.pinned[p.root()] = 1;
    return c;
}

/// Flat start with explicit boundary values.
inline HeightConfig with_boundary(const PlanarPatch& p, const std::map<int, int>& values, bool parity_adjusted) {
    HeightConfig c = zero_boundary(p, parity_adjusted);
    for (const auto& [v, h] : values) {
        if (p.is_interior(v) && p.topology().kind != TopologyKind::torus)
            fail(ErrorCode::invalid_argument, "boundary value given for an interior vertex");
        c.heights[v] = h;
        c.pinned[v] = 1;
    }
    return c;
}

inline HeightConfig negated(HeightConfig c) {
    for (int& h : c.heights) h = -h;
    return c;
}

struct PairTerm {
    int a;
    int b;
    int potential; // energy V(phi(b) - phi(a))
};

struct FieldTerm {
    int site;
    HalfInt offset; // energy V_*(phi(site) - offset)
};

/// Energy functional over heights of the free sites, with everything else
/// held fixed. Both the specification on a patch and the conditional
/// Hamiltonian of an exploration reduce to this.
class LocalHamiltonian {
public:
    struct Link {
        int other;     // -1 for a field term
        int potential; // index into potentials(), or field offset (doubled) for field terms
        int sign;      // gradient = sign * (h - phi(other))
    };

    LocalHamiltonian() = default;

    LocalHamiltonian(std::vector<Potential> potentials, std::vector<int> fixed_heights, std::vector<std::uint8_t> free,
                     std::vector<PairTerm> pairs, std::vector<FieldTerm> fields, std::vector<int> site_parity)
        : potentials_(std::move(potentials)), heights_(std::move(fixed_heights)), free_(std::move(free)),
          pairs_(std::move(pairs)), fields_(std::move(fields)), site_parity_(std::move(site_parity)) {
        const int n = static_cast<int>(heights_.size());
        if (static_cast<int>(free_.size()) != n || static_cast<int>(site_parity_.size()) != n)
            fail(ErrorCode::invalid_argument, "hamiltonian arrays disagree in size");
        links_.resize(n);
        for (const auto& t : pairs_) {
            if (free_[t.a]) links_[t.a].push_back({t.b, t.potential, -1});
            if (free_[t.b]) links_[t.b].push_back({t.a, t.potential, +1});
        }
        for (const auto& f : fields_) {
            if (!free_[f.site]) fail(ErrorCode::invalid_argument, "field term on a fixed site");
            links_[f.site].push_back({-1, f.offset.twice, 0});
        }
        for (int v = 0; v < n; ++v)
            if (free_[v]) sites_.push_back(v);
    }

    const std::vector<Potential>& potentials() const { return potentials_; }
    const std::vector<int>& initial_heights() const { return heights_; }
    const std::vector<std::uint8_t>& free_mask() const { return free_; }
    const std::vector<int>& sites() const { return sites_; }
    const std::vector<PairTerm>& pairs() const { return pairs_; }
    const std::vector<FieldTerm>& fields() const { return fields_; }
    const std::vector<Link>& links(int v) const { return links_[v]; }
    /// -1 when unconstrained, else the required height parity (0 or 1).
    int site_parity(int v) const { return site_parity_[v]; }
    int vertex_count() const { return static_cast<int>(heights_.size()); }

    bool allowed(int v, int h) const { return site_parity_[v] < 0 || ((h % 2) + 2) % 2 == site_parity_[v]; }

    double link_energy(const Link& l, int h, std::span<const int> phi) const {
        if (l.other < 0) return midpoint_potential()(HalfInt::from_int(h) - HalfInt::half(l.potential));
        return potentials_[l.potential](l.sign * (h - phi[l.other]));
    }

    /// Energy of the terms touching site v if it held height h.
    double site_energy(int v, int h, std::span<const int> phi) const {
        double e = 0.0;
        for (const Link& l : links_[v]) e += link_energy(l, h, phi);
        return e;
    }

    double energy(std::span<const int> phi) const {
        CompensatedSum e;
        for (const auto& t : pairs_) e += potentials_[t.potential](phi[t.b] - phi[t.a]);
        for (const auto& f : fields_) e += midpoint_potential()(HalfInt::from_int(phi[f.site]) - f.offset);
        return e.value();
    }

    bool admissible(std::span<const int> phi) const {
        for (int v : sites_)
            if (!allowed(v, phi[v])) return false;
        return std::isfinite(energy(phi));
    }

private:
    std::vector<Potential> potentials_;
    std::vector<int> heights_;
    std::vector<std::uint8_t> free_;
    std::vector<PairTerm> pairs_;
    std::vector<FieldTerm> fields_;
    std::vector<int> site_parity_;
    std::vector<std::vector<Link>> links_;
    std::vector<int> sites_;
};

/// H_Lambda for the patch: every edge with at least one free endpoint.
inline LocalHamiltonian specification(const PlanarPatch& p, const PotentialAssignment& pots, const HeightConfig& c) {
    if (c.size() != p.vertex_count()) fail(ErrorCode::invalid_argument, "config does not match the patch");
    std::vector<std::uint8_t> free(p.vertex_count());
    std::vector<int> parity(p.vertex_count(), -1);
    for (int v = 0; v < p.vertex_count(); ++v) {
        free[v] = c.pinned[v] ? 0 : 1;
        if (c.parity_constraint) parity[v] = parity_value(p, v);
    }
    std::vector<PairTerm> pairs;
    for (int e = 0; e < p.edge_count(); ++e) {
        const auto& ed = p.edges()[e];
        if (free[ed.a] || free[ed.b]) pairs.push_back({ed.a, ed.b, pots.id(e)});
    }
    return LocalHamiltonian(pots.potentials(), c.heights, std::move(free), std::move(pairs), {}, std::move(parity));
}

struct HeightRange {
    int lo = -3;
    int hi = 3;
};

/// Exact law of the free heights: support rows follow `sites`.
struct JointDistribution {
    std::vector<int> sites;
    std::vector<std::vector<int>> support;
    std::vector<double> probabilities;
    double log_Z = 0.0;

    int column(int vertex) const {
        auto it = std::find(sites.begin(), sites.end(), vertex);
        if (it == sites.end()) fail(ErrorCode::invalid_argument, "vertex is not a free site");
        return static_cast<int>(it - sites.begin());
    }

    std::map<int, double> marginal(int vertex) const {
        const int c = column(vertex);
        std::map<int, CompensatedSum> acc;
        for (std::size_t i = 0; i < support.size(); ++i) acc[support[i][c]] += probabilities[i];
        std::map<int, double> out;
        for (auto& [k, s] : acc) out[k] = s.value();
        return out;
    }

    double mean(int vertex) const {
        const int c = column(vertex);
        CompensatedSum s;
        for (std::size_t i = 0; i < support.size(); ++i) s += probabilities[i] * support[i][c];
        return s.value();
    }

    double variance(int vertex) const {
        const int c = column(vertex);
        const double m = mean(vertex);
        CompensatedSum s;
        for (std::size_t i = 0; i < support.size(); ++i) {
            const double d = support[i][c] - m;
            s += probabilities[i] * d * d;
        }
        return s.value();
    }
};

struct EnumerationLimits {
    int max_sites = 12;
    std::size_t max_support = 4'000'000;
};

namespace detail {

/// Depth-first enumeration of all finite-energy assignments of the free
/// sites within the range; calls visit(heights, energy) for each.
template <typename Visit>
void enumerate(const LocalHamiltonian& H, HeightRange range, const EnumerationLimits& limits, Visit&& visit) {
    const auto& sites = H.sites();
    if (static_cast<int>(sites.size()) > limits.max_sites)
        fail(ErrorCode::too_large, "too many free sites for exact enumeration");
    if (range.lo > range.hi) fail(ErrorCode::invalid_window, "empty height range");
    // Order sites so that each one is linked to an earlier or fixed site where possible.
    std::vector<int> order;
    std::vector<std::uint8_t> placed(H.vertex_count(), 0);
    for (int v = 0; v < H.vertex_count(); ++v) placed[v] = H.free_mask()[v] ? 0 : 1;
    while (order.size() < sites.size()) {
        int best = -1, best_links = -1;
        for (int v : sites) {
            if (placed[v]) continue;
            int k = 0;
            for (const auto& l : H.links(v)) k += (l.other < 0 || placed[l.other]) ? 1 : 0;
            if (k > best_links) {
                best = v;
                best_links = k;
            }
        }
        placed[best] = 1;
        order.push_back(best);
    }
    std::vector<int> pos(H.vertex_count(), -1);
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
    // Links of order[i] whose other end is fixed or placed before i.
    std::vector<std::vector<LocalHamiltonian::Link>> active(order.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        for (const auto& l : H.links(order[i]))
            if (l.other < 0 || pos[l.other] < static_cast<int>(i)) active[i].push_back(l);

    std::vector<int> phi = H.initial_heights();
    std::vector<double> partial(order.size() + 1, 0.0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == order.size()) {
            visit(std::span<const int>(phi), partial[i]);
            return;
        }
        const int v = order[i];
        for (int h = range.lo; h <= range.hi; ++h) {
            if (!H.allowed(v, h)) continue;
            double e = partial[i];
            for (const auto& l : active[i]) e += H.link_energy(l, h, phi);
            if (!std::isfinite(e)) continue;
            phi[v] = h;
            partial[i + 1] = e;
            rec(i + 1);
        }
        phi[v] = H.initial_heights()[v];
    };
    rec(0);
}

} // namespace detail

inline JointDistribution exact_distribution(const LocalHamiltonian& H, HeightRange range,
                                            const EnumerationLimits& limits = {}) {
    JointDistribution d;
    d.sites = H.sites();
    std::vector<double> energies;
    detail::enumerate(H, range, limits, [&](std::span<const int> phi, double e) {
        if (d.support.size() >= limits.max_support) fail(ErrorCode::too_large, "support exceeds the enumeration cap");
        std::vector<int> row;
        row.reserve(d.sites.size());
        for (int v : d.sites) row.push_back(phi[v]);
        d.support.push_back(std::move(row));
        energies.push_back(e);
    });
    if (d.support.empty()) fail(ErrorCode::infeasible, "every configuration has infinite energy");
    const double emin = *std::min_element(energies.begin(), energies.end());
    CompensatedSum z;
    for (double e : energies) z += std::exp(-(e - emin));
    d.log_Z = std::log(z.value()) - emin;
    d.probabilities.reserve(energies.size());
    for (double e : energies) d.probabilities.push_back(std::exp(-(e - emin)) / z.value());
    return d;
}

inline JointDistribution exact_distribution(const PlanarPatch& p, const PotentialAssignment& pots,
                                            const HeightConfig& bc, HeightRange range,
                                            const EnumerationLimits& limits = {}) {
    return exact_distribution(specification(p, pots, bc), range, limits);
}

/// First admissible assignment found by depth-first search, starting from
/// the Hamiltonian's stored heights when those are already admissible.
inline std::vector<int> find_admissible(const LocalHamiltonian& H, HeightRange range,
                                        const EnumerationLimits& limits = {64, 0}) {
    if (H.admissible(H.initial_heights())) return H.initial_heights();
    struct Found {
        std::vector<int> phi;
    };
    try {
        detail::enumerate(H, range, limits, [](std::span<const int> phi, double) {
            throw Found{std::vector<int>(phi.begin(), phi.end())};
        });
    } catch (Found& f) {
        return std::move(f.phi);
    }
    fail(ErrorCode::infeasible, "no admissible configuration in the height range");
}

/// Range spanned by the fixed heights, widened by one on each side.
inline HeightRange pinned_range(const LocalHamiltonian& H) {
    int lo = 0, hi = 0;
    bool any = false;
    for (int v = 0; v < H.vertex_count(); ++v) {
        if (H.free_mask()[v]) continue;
        const int h = H.initial_heights()[v];
        lo = any ? std::min(lo, h) : h;
        hi = any ? std::max(hi, h) : h;
        any = true;
    }
    return {lo - 1, hi + 1};
}

/// Marginal of one free site without storing the support.
inline std::map<int, double> exact_marginal(const LocalHamiltonian& H, int vertex, HeightRange range,
                                            EnumerationLimits limits = {}) {
    double emin = kInfinity;
    detail::enumerate(H, range, limits, [&](std::span<const int>, double e) { emin = std::min(emin, e); });
    if (!std::isfinite(emin)) fail(ErrorCode::infeasible, "every configuration has infinite energy");
    std::map<int, CompensatedSum> acc;
    CompensatedSum z;
    detail::enumerate(H, range, limits, [&](std::span<const int> phi, double e) {
        const double w = std::exp(-(e - emin));
        acc[phi[vertex]] += w;
        z += w;
    });
    std::map<int, double> out;
    for (auto& [k, s] : acc) out[k] = s.value() / z.value();
    return out;
}

/// Smallest half-width whose single-edge tail mass, relative to the total,
/// is below the tolerance.
inline int minimal_window(const Potential& V, double tolerance = 1e-12) {
    const int step = classify(V).parity ? 2 : 1;
    const double total = total_mass(V);
    for (int w = 1; w <= V.check_radius(); ++w)
        if (tail_mass(V, w, step) < tolerance * total) return w;
    fail(ErrorCode::invalid_window, "no window inside the evaluation range meets the tail tolerance");
}

struct SamplerConfig {
    long sweeps = 1000;
    long burn_in = 100;
    int thinning = 1;
    std::uint64_t seed = 1;
    int height_window = 0; // 0 picks the minimal valid half-width
};

/// Single-site heat-bath dynamics in fixed (vertex id) scan order. Each site
/// draws from its exact conditional over [min neighbour - W, max neighbour + W],
/// which contains the half-width-W window around the neighbour mean.
class HeatBath {
public:
    static constexpr int kTableRadius = 256;

    explicit HeatBath(const LocalHamiltonian& H, int half_width = 0) : H_(&H) {
        int need = 1;
        for (const auto& V : H.potentials()) need = std::max(need, minimal_window(V));
        if (half_width == 0) half_width = need;
        if (half_width < need)
            fail(ErrorCode::invalid_window, "height window leaves tail mass above 1e-12 (need " +
                                                std::to_string(need) + ")");
        W_ = half_width;
        tables_.resize(H.potentials().size());
        for (std::size_t i = 0; i < tables_.size(); ++i) {
            tables_[i].resize(2 * kTableRadius + 1);
            for (int x = -kTableRadius; x <= kTableRadius; ++x)
                tables_[i][x + kTableRadius] = std::exp(-H.potentials()[i](x));
        }
    }

    int half_width() const { return W_; }

    double weight(const LocalHamiltonian::Link& l, int h, std::span<const int> phi) const {
        if (l.other < 0) return std::abs(2 * h - l.potential) == 1 ? 1.0 : 0.0;
        const int x = l.sign * (h - phi[l.other]);
        if (x >= -kTableRadius && x <= kTableRadius) return tables_[l.potential][x + kTableRadius];
        return std::exp(-H_->potentials()[l.potential](x));
    }

    /// Candidate heights for site v given the others.
    std::pair<int, int> candidate_range(int v, std::span<const int> phi) const {
        int lo = std::numeric_limits<int>::max(), hi = std::numeric_limits<int>::min();
        for (const auto& l : H_->links(v)) {
            int a, b;
            if (l.other < 0) {
                // integers at distance 1/2 from offset / 2
                a = (l.potential - 1 >= 0) ? (l.potential - 1) / 2 : -((2 - l.potential) / 2);
                b = a + 1;
            } else {
                a = b = phi[l.other];
            }
            lo = std::min(lo, a);
            hi = std::max(hi, b);
        }
        if (lo > hi) fail(ErrorCode::stuck_site, "isolated free site has no conditional law");
        return {lo - W_, hi + W_};
    }

    /// Exact conditional law at site v (over the candidate range).
    std::map<int, double> conditional(int v, std::span<const int> phi) const {
        const auto [lo, hi] = candidate_range(v, phi);
        std::map<int, double> out;
        double z = 0.0;
        for (int h = lo; h <= hi; ++h) {
            if (!H_->allowed(v, h)) continue;
            double w = 1.0;
            for (const auto& l : H_->links(v)) w *= weight(l, h, phi);
            if (w > 0.0) out[h] = w;
            z += w;
        }
        if (!(z > 0.0)) fail(ErrorCode::stuck_site, "site " + std::to_string(v) + " has zero conditional mass");
        for (auto& [h, w] : out) w /= z;
        return out;
    }

    void update(int v, std::vector<int>& phi, Rng& rng) const {
        const auto [lo, hi] = candidate_range(v, phi);
        buf_.clear();
        double z = 0.0;
        for (int h = lo; h <= hi; ++h) {
            double w = 0.0;
            if (H_->allowed(v, h)) {
                w = 1.0;
                for (const auto& l : H_->links(v)) w *= weight(l, h, phi);
            }
            z += w;
            buf_.push_back(w);
        }
        if (!(z > 0.0)) {
            // Products may underflow far from the bulk; retry in the log domain.
            log_update(v, phi, rng, lo, hi);
            return;
        }
        double u = std::uniform_real_distribution<double>(0.0, z)(rng);
        int pick = hi;
        for (int i = 0; i < static_cast<int>(buf_.size()); ++i) {
            if (buf_[i] > 0.0) pick = lo + i;
            if (u < buf_[i]) break;
            u -= buf_[i];
        }
        phi[v] = pick;
    }

    void sweep(std::vector<int>& phi, Rng& rng) const {
        for (int v : H_->sites()) update(v, phi, rng);
    }

private:
    void log_update(int v, std::vector<int>& phi, Rng& rng, int lo, int hi) const {
        std::vector<double> e;
        double emin = kInfinity;
        for (int h = lo; h <= hi; ++h) {
            const double x = H_->allowed(v, h) ? H_->site_energy(v, h, phi) : kInfinity;
            e.push_back(x);
            emin = std::min(emin, x);
        }
        if (!std::isfinite(emin)) fail(ErrorCode::stuck_site, "site " + std::to_string(v) + " has zero conditional mass");
        for (double& x : e) x = std::exp(-(x - emin));
        std::discrete_distribution<int> pick(e.begin(), e.end());
        phi[v] = lo + pick(rng);
    }

    const LocalHamiltonian* H_;
    int W_ = 1;
    std::vector<std::vector<double>> tables_;
    mutable std::vector<double> buf_;
};

inline void heat_bath_sweep(HeightConfig& c, const PlanarPatch& p, const PotentialAssignment& pots, int window,
                            Rng& rng) {
    const auto H = specification(p, pots, c);
    HeatBath(H, window).sweep(c.heights, rng);
}

struct Observable {
    std::string id;
    std::function<double(std::span<const int>)> eval;
};

inline Observable height_at(int v, std::string id = {}) {
    if (id.empty()) id = "height[" + std::to_string(v) + "]";
    return {id, [v](std::span<const int> phi) { return static_cast<double>(phi[v]); }};
}

inline Observable mean_height(std::vector<int> set, std::string id) {
    return {std::move(id), [set = std::move(set)](std::span<const int> phi) {
                double s = 0.0;
                for (int v : set) s += phi[v];
                return set.empty() ? 0.0 : s / static_cast<double>(set.size());
            }};
}

inline Observable level_indicator(int v, int a, std::string id = {}) {
    if (id.empty()) id = "level[" + std::to_string(v) + ">=" + std::to_string(a) + "]";
    return {id, [v, a](std::span<const int> phi) { return phi[v] >= a ? 1.0 : 0.0; }};
}

struct ObservableSeries {
    std::vector<std::string> ids;
    std::vector<long> sweeps;
    std::vector<std::vector<double>> values; // values[observable][sample]
    std::vector<SeriesSummary> summary;
    std::uint64_t seed = 0;
    std::vector<int> final_heights;
};

/// Runs one chain. `observer`, if set, sees every recorded configuration.
inline ObservableSeries run_chain(const LocalHamiltonian& H, std::vector<int> phi, const SamplerConfig& cfg,
                                  const std::vector<Observable>& observables,
                                  const std::function<void(long, std::span<const int>)>& observer = {}) {
    if (cfg.sweeps <= 0 || cfg.burn_in < 0 || cfg.thinning <= 0)
        fail(ErrorCode::config_error, "sweeps and thinning must be positive, burn_in nonnegative");
    if (!H.admissible(phi)) fail(ErrorCode::infeasible, "initial configuration is not admissible");
    const HeatBath hb(H, cfg.height_window);
    Rng rng(cfg.seed);
    ObservableSeries out;
    out.seed = cfg.seed;
    out.values.resize(observables.size());
    for (const auto& o : observables) out.ids.push_back(o.id);
    for (long s = 1; s <= cfg.burn_in + cfg.sweeps; ++s) {
        hb.sweep(phi, rng);
        if (s <= cfg.burn_in || (s - cfg.burn_in) % cfg.thinning != 0) continue;
        out.sweeps.push_back(s - cfg.burn_in);
        for (std::size_t i = 0; i < observables.size(); ++i) out.values[i].push_back(observables[i].eval(phi));
        if (observer) observer(s - cfg.burn_in, phi);
    }
    for (const auto& v : out.values) out.summary.push_back(batch_means(v));
    out.final_heights = std::move(phi);
    return out;
}

inline ObservableSeries run_chain(const PlanarPatch& p, const PotentialAssignment& pots, const HeightConfig& bc,
                                  const SamplerConfig& cfg, const std::vector<Observable>& observables) {
    const auto H = specification(p, pots, bc);
    return run_chain(H, find_admissible(H, pinned_range(H)), cfg, observables);
}

/// phi_n = max(phi, psi_n) with psi_n = m_n + d(x, boundary of Lambda_n) on
/// Lambda_{n+1}, m_n the minimum of phi over that boundary, and -infinity
/// elsewhere. Distances are taken from the patch root.
inline HeightConfig pushup(const HeightConfig& c, const PlanarPatch& p, int n) {
    const auto from_root = p.distances_from({p.root()});
    std::vector<int> shell;
    for (int v = 0; v < p.vertex_count(); ++v)
        if (from_root[v] == n + 1) shell.push_back(v);
    if (shell.empty()) fail(ErrorCode::invalid_argument, "patch does not reach distance n + 1");
    int m = std::numeric_limits<int>::max();
    for (int v : shell) m = std::min(m, c.heights[v]);
    const auto to_shell = p.distances_from(shell);
    HeightConfig out = c;
    for (int v = 0; v < p.vertex_count(); ++v) {
        if (from_root[v] < 0 || from_root[v] > n + 1) continue;
        out.heights[v] = std::max(c.heights[v], m + to_shell[v]);
    }
    return out;
}

/// Largest violation of p(a v b) p(a ^ b) >= p(a) p(b) over all support pairs
/// (nonpositive when the lattice condition holds). Comparable pairs are
/// skipped since there the inequality is an identity.
inline double fkg_violation(const JointDistribution& d) {
    if (d.support.size() < 2) return 0.0;
    const std::size_t n = d.sites.size();
    std::vector<int> lo(n, std::numeric_limits<int>::max()), hi(n, std::numeric_limits<int>::min());
    for (const auto& r : d.support)
        for (std::size_t k = 0; k < n; ++k) {
            lo[k] = std::min(lo[k], r[k]);
            hi[k] = std::max(hi[k], r[k]);
        }
    // Mixed-radix index over the bounding box of the support.
    std::vector<std::uint64_t> stride(n, 1);
    std::uint64_t cells = 1;
    for (std::size_t k = 0; k < n; ++k) {
        stride[k] = cells;
        cells *= static_cast<std::uint64_t>(hi[k] - lo[k] + 1);
        if (cells > 50'000'000ULL) fail(ErrorCode::too_large, "support box too large for the FKG check");
    }
    std::vector<double> dense(cells, 0.0);
    for (std::size_t i = 0; i < d.support.size(); ++i) {
        std::uint64_t c = 0;
        for (std::size_t k = 0; k < n; ++k) c += stride[k] * static_cast<std::uint64_t>(d.support[i][k] - lo[k]);
        dense[c] = d.probabilities[i];
    }
    double worst = -kInfinity;
    for (std::size_t i = 0; i < d.support.size(); ++i) {
        const auto& a = d.support[i];
        for (std::size_t j = i + 1; j < d.support.size(); ++j) {
            const auto& b = d.support[j];
            std::uint64_t join = 0, meet = 0;
            bool a_le = true, b_le = true;
            for (std::size_t k = 0; k < n; ++k) {
                const int x = a[k], y = b[k];
                a_le = a_le && x <= y;
                b_le = b_le && y <= x;
                join += stride[k] * static_cast<std::uint64_t>(std::max(x, y) - lo[k]);
                meet += stride[k] * static_cast<std::uint64_t>(std::min(x, y) - lo[k]);
            }
            if (a_le || b_le) continue;
            worst = std::max(worst, d.probabilities[i] * d.probabilities[j] - dense[join] * dense[meet]);
        }
    }
    return std::isfinite(worst) ? worst : 0.0;
}

/// Largest violation of pi(k)^2 >= pi(k - s) pi(k + s) over the hull of the
/// support (s = 2 when heights are confined to one parity class).
inline double log_concavity_violation(const std::map<int, double>& pi, int step) {
    if (pi.empty()) return 0.0;
    auto at = [&](int k) {
        auto it = pi.find(k);
        return it == pi.end() ? 0.0 : it->second;
    };
    double worst = -kInfinity;
    const int lo = pi.begin()->first, hi = pi.rbegin()->first;
    for (int k = lo; k <= hi; k += step) worst = std::max(worst, at(k - step) * at(k + step) - at(k) * at(k));
    return worst;
}

/// Largest |P_a(x) - P_b(-x)| over the union of supports.
inline double flip_asymmetry(const JointDistribution& a, const JointDistribution& b) {
    if (a.sites != b.sites) fail(ErrorCode::invalid_argument, "distributions on different sites");
    std::map<std::vector<int>, double> pa, pb;
    for (std::size_t i = 0; i < a.support.size(); ++i) pa[a.support[i]] = a.probabilities[i];
    for (std::size_t i = 0; i < b.support.size(); ++i) {
        auto r = b.support[i];
        for (int& x : r) x = -x;
        pb[r] = b.probabilities[i];
    }
    double worst = 0.0;
    for (const auto& [r, p] : pa) worst = std::max(worst, std::abs(p - (pb.contains(r) ? pb[r] : 0.0)));
    for (const auto& [r, p] : pb)
        if (!pa.contains(r)) worst = std::max(worst, p);
    return worst;
}

} // namespace heightlab
