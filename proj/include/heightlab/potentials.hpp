#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "heightlab/error.hpp"
#include "heightlab/lattice.hpp"

namespace heightlab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kLog2 = std::numbers::ln2;
/// Slack allowed on V(1) - V(0) <= log 2 when classifying excited potentials.
inline constexpr double kExcitedSlack = 1e-12;

/// A value in (1/2)Z, stored doubled so that arithmetic stays exact.
struct HalfInt {
    int twice = 0;

    static constexpr HalfInt from_int(int x) { return {2 * x}; }
    static constexpr HalfInt half(int numerator) { return {numerator}; }
    constexpr double value() const { return twice / 2.0; }
    constexpr bool is_integer() const { return twice % 2 == 0; }
    constexpr HalfInt operator-() const { return {-twice}; }
    friend constexpr HalfInt operator+(HalfInt a, HalfInt b) { return {a.twice + b.twice}; }
    friend constexpr HalfInt operator-(HalfInt a, HalfInt b) { return {a.twice - b.twice}; }
    friend constexpr bool operator==(HalfInt, HalfInt) = default;
    friend constexpr auto operator<=>(HalfInt a, HalfInt b) { return a.twice <=> b.twice; }
};

enum class PotentialKind { table, discrete_gaussian, solid_on_solid, k_lipschitz, homomorphism, parity_table, star };

enum class TailKind { infinite, quadratic, linear };

/// Continuation of a table potential beyond its last listed point M:
/// V(x) = V(M) + beta (x^2 - M^2) or V(M) + beta (|x| - M).
struct Tail {
    TailKind kind = TailKind::infinite;
    double beta = 0.0;
};

struct PotentialClass {
    bool convex = false;
    bool symmetric = false;
    bool finite_mass = false;
    bool excited = false;
    bool parity = false;
    bool even_excited = false;
};

/// Symmetric nearest-neighbour potential on integer gradients, normalised at
/// construction so that V(0) = 0 (or min over odd integers = 0 when V(0) is
/// infinite). Infinity is a first-class value.
class Potential {
public:
    static constexpr int kDefaultWindow = 64;

    static Potential discrete_gaussian(double beta) { return analytic(PotentialKind::discrete_gaussian, beta, 0); }
    static Potential solid_on_solid(double beta) { return analytic(PotentialKind::solid_on_solid, beta, 0); }
    static Potential k_lipschitz(int k) {
        if (k < 0) fail(ErrorCode::invalid_argument, "k_lipschitz needs K >= 0");
        return analytic(PotentialKind::k_lipschitz, 0.0, k);
    }
    /// V(x) = infinity * 1{|x| != 1}: uniformly random graph homomorphisms.
    static Potential homomorphism() { return analytic(PotentialKind::homomorphism, 0.0, 0); }
    /// V*(0) = 0, V*(+-1) = log 2, infinite elsewhere.
    static Potential star() { return analytic(PotentialKind::star, 0.0, 0); }

    /// Explicit values; a missing -x mirrors x, and gaps inside the listed
    /// range are infinite.
    static Potential table(const std::vector<std::pair<int, double>>& values, Tail tail = {}) {
        return make_table(PotentialKind::table, values, tail);
    }

    /// Table over odd integers; every even integer gets infinity.
    static Potential parity_table(const std::vector<std::pair<int, double>>& odd_values, Tail tail = {}) {
        for (const auto& [x, v] : odd_values)
            if (x % 2 == 0) fail(ErrorCode::invalid_argument, "parity table lists an even integer");
        return make_table(PotentialKind::parity_table, odd_values, tail);
    }

    /// beta * V, kind-preserving where the family is closed under scaling.
    Potential scaled(double beta) const {
        if (!(beta > 0.0)) fail(ErrorCode::invalid_argument, "scale must be positive");
        switch (kind_) {
        case PotentialKind::discrete_gaussian:
        case PotentialKind::solid_on_solid: return analytic(kind_, beta_ * beta, 0).with_window(window_);
        case PotentialKind::k_lipschitz:
        case PotentialKind::homomorphism: return *this;
        default: break;
        }
        std::vector<std::pair<int, double>> vals;
        const int m = kind_ == PotentialKind::star ? 1 : table_radius_;
        for (int x = 0; x <= m; ++x) {
            const double v = value(x);
            if (kind_ == PotentialKind::parity_table && x % 2 == 0) continue;
            vals.push_back({x, std::isinf(v) ? kInfinity : beta * v});
        }
        Tail t = kind_ == PotentialKind::star ? Tail{} : tail_;
        t.beta *= beta;
        return make_table(kind_ == PotentialKind::parity_table ? PotentialKind::parity_table : PotentialKind::table,
                          vals, t)
            .with_window(window_);
    }

    Potential with_window(int window) const {
        if (window < 2) fail(ErrorCode::invalid_window, "evaluation window must be at least 2");
        Potential p = *this;
        p.window_ = window;
        p.normalise();
        return p;
    }

    /// Normalised V(x).
    double operator()(int x) const {
        const double r = raw(x);
        return std::isinf(r) ? kInfinity : r - offset_;
    }
    double value(int x) const { return (*this)(x); }

    /// Value before normalisation.
    double raw(int x) const {
        const int ax = std::abs(x);
        switch (kind_) {
        case PotentialKind::discrete_gaussian: return beta_ * static_cast<double>(x) * static_cast<double>(x);
        case PotentialKind::solid_on_solid: return beta_ * static_cast<double>(ax);
        case PotentialKind::k_lipschitz: return ax <= k_ ? 0.0 : kInfinity;
        case PotentialKind::homomorphism: return ax == 1 ? 0.0 : kInfinity;
        case PotentialKind::star: return ax == 0 ? 0.0 : (ax == 1 ? kLog2 : kInfinity);
        case PotentialKind::table:
        case PotentialKind::parity_table: {
            if (ax <= table_radius_) return table_[static_cast<std::size_t>(x + table_radius_)];
            if (kind_ == PotentialKind::parity_table && ax % 2 == 0) return kInfinity;
            const double edge = table_[static_cast<std::size_t>((x > 0 ? table_radius_ : -table_radius_) + table_radius_)];
            if (tail_.kind == TailKind::infinite || std::isinf(edge)) return kInfinity;
            const double m = table_radius_;
            if (tail_.kind == TailKind::quadratic) return edge + tail_.beta * (static_cast<double>(ax) * ax - m * m);
            return edge + tail_.beta * (static_cast<double>(ax) - m);
        }
        }
        return kInfinity;
    }

    PotentialKind kind() const { return kind_; }
    double beta() const { return beta_; }
    int k() const { return k_; }
    int window() const { return window_; }
    double normalisation_offset() const { return offset_; }
    const Tail& tail() const { return tail_; }
    int table_radius() const { return table_radius_; }

    /// Largest |x| the evaluation window and listed values can reach.
    int check_radius() const { return std::max(window_, table_radius_) + 2; }

    std::string describe() const {
        switch (kind_) {
        case PotentialKind::discrete_gaussian: return "discrete_gaussian(beta=" + std::to_string(beta_) + ")";
        case PotentialKind::solid_on_solid: return "solid_on_solid(beta=" + std::to_string(beta_) + ")";
        case PotentialKind::k_lipschitz: return "k_lipschitz(K=" + std::to_string(k_) + ")";
        case PotentialKind::homomorphism: return "homomorphism";
        case PotentialKind::star: return "star";
        case PotentialKind::table: return "table";
        case PotentialKind::parity_table: return "parity_table";
        }
        return "unknown";
    }

    const std::vector<double>& table_values() const { return table_; }

private:
    static Potential analytic(PotentialKind kind, double beta, int k) {
        if ((kind == PotentialKind::discrete_gaussian || kind == PotentialKind::solid_on_solid) && !(beta >= 0.0))
            fail(ErrorCode::invalid_argument, "inverse temperature must be nonnegative");
        Potential p;
        p.kind_ = kind;
        p.beta_ = beta;
        p.k_ = k;
        p.normalise();
        return p;
    }

    static Potential make_table(PotentialKind kind, const std::vector<std::pair<int, double>>& values, Tail tail) {
        if (values.empty()) fail(ErrorCode::invalid_argument, "empty potential table");
        std::map<int, double> v;
        for (const auto& [x, val] : values) {
            auto [it, inserted] = v.emplace(x, val);
            if (!inserted && it->second != val) fail(ErrorCode::invalid_argument, "duplicate table entry");
        }
        for (const auto& [x, val] : std::map<int, double>(v)) v.emplace(-x, val);
        int m = 0;
        for (const auto& [x, val] : v) m = std::max(m, std::abs(x));
        Potential p;
        p.kind_ = kind;
        p.tail_ = tail;
        p.table_radius_ = m;
        p.table_.assign(static_cast<std::size_t>(2 * m + 1), kInfinity);
        for (const auto& [x, val] : v) p.table_[static_cast<std::size_t>(x + m)] = val;
        p.normalise();
        return p;
    }

    void normalise() {
        offset_ = 0.0;
        const double at0 = raw(0);
        if (std::isfinite(at0)) {
            offset_ = at0;
            return;
        }
        double best = kInfinity;
        for (int x = 1; x <= check_radius(); x += 2) best = std::min(best, raw(x));
        if (std::isfinite(best)) offset_ = best;
    }

    PotentialKind kind_ = PotentialKind::table;
    double beta_ = 0.0;
    int k_ = 0;
    Tail tail_;
    int table_radius_ = 0;
    std::vector<double> table_;
    int window_ = kDefaultWindow;
    double offset_ = 0.0;
};

/// V_* on the half-integers: zero at +-1/2, infinite elsewhere.
class MidpointPotential {
public:
    double operator()(HalfInt x) const { return std::abs(x.twice) == 1 ? 0.0 : kInfinity; }
};

inline Potential star_potential() { return Potential::star(); }
inline MidpointPotential midpoint_potential() { return {}; }

namespace detail {

inline bool close(double a, double b) {
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::abs(a - b) <= 1e-12 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

/// Convexity of x -> V(x) along {start, start + step, ...}: the finite set is
/// a run of consecutive points and second differences are nonnegative.
inline bool convex_along(const Potential& V, int lo, int hi, int step) {
    std::vector<double> vals;
    for (int x = lo; x <= hi; x += step) vals.push_back(V(x));
    std::size_t first = vals.size(), last = 0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (std::isfinite(vals[i])) {
            first = std::min(first, i);
            last = i;
        }
    }
    if (first == vals.size()) return false;
    for (std::size_t i = first; i <= last; ++i)
        if (!std::isfinite(vals[i])) return false;
    for (std::size_t i = first + 1; i + 1 <= last; ++i) {
        const double d2 = vals[i + 1] - 2.0 * vals[i] + vals[i - 1];
        const double scale = std::max({1.0, std::abs(vals[i + 1]), std::abs(vals[i]), std::abs(vals[i - 1])});
        if (d2 < -1e-12 * scale) return false;
    }
    return true;
}

} // namespace detail

/// Upper bound on the sum of e^{-V(x)} over x > from (on the lattice of the
/// given step), by the geometric series implied by a convex tail.
inline double tail_mass(const Potential& V, int from, int step = 1) {
    int x1 = from + 1;
    if (step == 2 && V(x1) == kInfinity && std::isfinite(V(x1 + 1))) ++x1;
    const double v1 = V(x1);
    if (std::isinf(v1)) {
        // Finite support ends here provided nothing finite follows.
        for (int x = x1; x <= x1 + 2 * step + 2; ++x)
            if (std::isfinite(V(x))) return kInfinity;
        return 0.0;
    }
    const double inc = V(x1 + step) - v1;
    if (!(inc > 0.0)) return kInfinity;
    return std::exp(-v1) / (-std::expm1(-inc));
}

/// Sum of e^{-V} over all integers (window plus bounded tails).
inline double total_mass(const Potential& V) {
    const int w = V.check_radius();
    double acc = 0.0;
    for (int x = -w; x <= w; ++x) acc += std::exp(-V(x));
    return acc + 2.0 * tail_mass(V, w);
}

inline PotentialClass classify(const Potential& V) {
    PotentialClass c;
    const int w = V.check_radius();
    c.symmetric = true;
    for (int x = 1; x <= w; ++x)
        if (!detail::close(V.raw(x), V.raw(-x))) c.symmetric = false;
    const double mass = total_mass(V);
    c.finite_mass = std::isfinite(mass) && mass > 0.0;
    c.convex = detail::convex_along(V, -w, w, 1);
    c.excited = c.convex && c.symmetric && c.finite_mass && std::isfinite(V.raw(0)) &&
                V.raw(1) - V.raw(0) <= kLog2 + kExcitedSlack;

    bool evens_infinite = true, odds_infinite = true;
    for (int x = -w; x <= w; ++x) {
        if (std::isfinite(V(x))) (x % 2 == 0 ? evens_infinite : odds_infinite) = false;
    }
    const int wo = (w % 2 == 0) ? w - 1 : w;
    c.parity = c.symmetric && c.finite_mass && evens_infinite && detail::convex_along(V, -wo, wo, 2);
    const int we = (w % 2 == 0) ? w : w - 1;
    c.even_excited = c.symmetric && c.finite_mass && odds_infinite && detail::convex_along(V, -we, we, 2) &&
                     std::isfinite(V.raw(0)) && V.raw(2) - V.raw(0) <= kLog2 + kExcitedSlack;
    return c;
}

struct WeightSplit {
    double excited = 0.0; // e^{-V*(h)}
    double plain = 0.0;   // e^{-V(h)} - e^{-V*(h)}
};

/// Splits the edge weight e^{-V(h)} into the excited and plain parts.
inline WeightSplit decompose_weight(const Potential& V, int h) {
    if (!classify(V).excited) fail(ErrorCode::not_excited, V.describe() + " is not an excited potential");
    const double total = std::exp(-V(h));
    const double star = std::exp(-Potential::star()(h));
    // V(1) may exceed log 2 by the classification slack; never report a negative weight.
    return {star, std::max(0.0, total - star)};
}

/// Per-edge potential assignment. Potentials are shared by id; on lattice
/// patches the assignment is constant on edge orbits.
class PotentialAssignment {
public:
    static PotentialAssignment uniform(const PlanarPatch& patch, Potential v) {
        PotentialAssignment a;
        a.potentials_.push_back(std::move(v));
        a.edge_ids_.assign(static_cast<std::size_t>(patch.edge_count()), 0);
        return a;
    }

    /// One potential per stencil edge (orbit) of the generating lattice.
    static PotentialAssignment by_orbit(const PlanarPatch& patch, std::vector<Potential> per_orbit) {
        PotentialAssignment a;
        a.potentials_ = std::move(per_orbit);
        for (const auto& e : patch.edges()) {
            if (e.orbit < 0 || e.orbit >= static_cast<int>(a.potentials_.size()))
                fail(ErrorCode::invalid_argument, "edge orbit without an assigned potential");
            a.edge_ids_.push_back(e.orbit);
        }
        return a;
    }

    const Potential& at(int edge) const { return potentials_[static_cast<std::size_t>(edge_ids_[static_cast<std::size_t>(edge)])]; }
    int id(int edge) const { return edge_ids_[static_cast<std::size_t>(edge)]; }
    const std::vector<Potential>& potentials() const { return potentials_; }
    int edge_count() const { return static_cast<int>(edge_ids_.size()); }

    bool all_excited() const {
        return std::all_of(potentials_.begin(), potentials_.end(), [](const Potential& p) { return classify(p).excited; });
    }
    bool any_parity() const {
        return std::any_of(potentials_.begin(), potentials_.end(), [](const Potential& p) { return classify(p).parity; });
    }

private:
    std::vector<Potential> potentials_;
    std::vector<int> edge_ids_;
};

} // namespace heightlab
