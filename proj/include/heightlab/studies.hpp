#pragma once

#include <chrono>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "heightlab/derived_graph.hpp"
#include "heightlab/enrichment.hpp"
#include "heightlab/gibbs.hpp"
#include "heightlab/json_io.hpp"
#include "heightlab/lattice.hpp"
#include "heightlab/percolation.hpp"
#include "heightlab/potentials.hpp"

namespace heightlab {

/// Zero boundary, shifted to the parity class for parity potentials.
inline HeightConfig default_boundary(const PlanarPatch& p, const Potential& V) { return zero_boundary(p, classify(V).parity); }

inline std::vector<int> starting_heights(const LocalHamiltonian& H, const HeightConfig& bc) {
    if (H.admissible(bc.heights)) return bc.heights;
    return find_admissible(H, pinned_range(H));
}

struct VariancePoint {
    int n = 0;
    int sites = 0;
    double var_root = 0.0;
    double stderr_var = 0.0;
    double mean_root = 0.0;
    double stderr_mean = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    int window = 0;
    double seconds = 0.0;
};

/// Var(phi(root)) on the radius-n ball with the default boundary.
inline VariancePoint variance_point(const LatticeSpec& spec, const Potential& V, int n, const SamplerConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto ball = build_ball(spec, n);
    const auto bc = default_boundary(ball, V);
    const auto H = specification(ball, PotentialAssignment::uniform(ball, V), bc);
    const auto s = run_chain(H, starting_heights(H, bc), cfg, {height_at(ball.root(), "phi_root")});
    VariancePoint r;
    r.n = n;
    r.sites = static_cast<int>(H.sites().size());
    r.var_root = s.summary[0].variance;
    r.stderr_var = s.summary[0].stderr_variance;
    r.mean_root = s.summary[0].mean;
    r.stderr_mean = s.summary[0].stderr_mean;
    r.samples = s.summary[0].n_samples;
    r.seed = cfg.seed;
    r.window = cfg.height_window > 0 ? cfg.height_window : HeatBath(H, 0).half_width();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

inline void write_variance_csv(std::ostream& out, const std::vector<VariancePoint>& rows) {
    out << "n,var_root,stderr\n";
    for (const auto& r : rows) out << r.n << ',' << format_double(r.var_root) << ',' << format_double(r.stderr_var) << '\n';
}

struct PercolationRow {
    long sample = 0;
    int level = 0;
    std::string direction; // geq: {phi >= level}; leq: {phi <= level - 1}; plus/minus: spin classes
    std::string carrier;   // vertices, odd_vertices, edges
    int clusters = 0;
    double largest_fraction = 0.0;
    bool wraps_h = false;
    bool wraps_v = false;
    int trifurcations = -1; // -1: not computed
};

inline void write_percolation_csv(std::ostream& out, const std::vector<PercolationRow>& rows) {
    out << "sample,level,direction,carrier,clusters,largest_fraction,wraps_h,wraps_v,trifurcations\n";
    for (const auto& r : rows)
        out << r.sample << ',' << r.level << ',' << r.direction << ',' << r.carrier << ',' << r.clusters << ','
            << format_double(r.largest_fraction) << ',' << int(r.wraps_h) << ',' << int(r.wraps_v) << ','
            << r.trifurcations << '\n';
}

/// Per-sample census on a torus: level sets on the base graph, plus the
/// odd-vertex spin field (parity models) or the edge spin field (otherwise,
/// from fresh coins).
class PercolationScanner {
public:
    PercolationScanner(const PlanarPatch& torus, bool parity_model, int trifurcation_radius)
        : patch_(torus), base_(carrier_of(torus)), parity_(parity_model), tri_radius_(trifurcation_radius) {
        if (parity_) odd_ = odd_vertex_graph(torus).carrier(torus.topology().kind);
        else line_ = line_graph(torus).carrier(torus.topology().kind);
    }

    std::vector<PercolationRow> rows(const HeightConfig& c, const std::vector<int>& levels, long sample, Rng& coin_rng) const {
        std::vector<PercolationRow> out;
        auto add = [&](int level, const char* dir, const char* carrier, const CarrierGraph& g,
                       const std::vector<std::uint8_t>& mask, bool tri) {
            const auto rep = clusters(g, mask);
            PercolationRow r;
            r.sample = sample;
            r.level = level;
            r.direction = dir;
            r.carrier = carrier;
            r.clusters = rep.cluster_count;
            r.largest_fraction = rep.largest_fraction;
            r.wraps_h = rep.wraps(0);
            r.wraps_v = rep.wraps(1);
            if (tri && tri_radius_ >= 0) r.trifurcations = trifurcation_count(mask, patch_, tri_radius_);
            out.push_back(r);
        };
        for (int a : levels) {
            add(a, "geq", "vertices", base_, level_set(c, a, LevelDirection::geq), true);
            add(a, "leq", "vertices", base_, level_set(c, a - 1, LevelDirection::leq), true);
        }
        if (parity_) {
            const auto s = odd_spin_field(c, patch_);
            add(0, "plus", "odd_vertices", *odd_, s.mask(1), false);
            add(0, "minus", "odd_vertices", *odd_, s.mask(-1), false);
        } else {
            const auto s = edge_spin_field(c, patch_, draw_coins(patch_.edge_count(), coin_rng));
            add(0, "plus", "edges", *line_, s.mask(1), false);
            add(0, "minus", "edges", *line_, s.mask(-1), false);
        }
        return out;
    }

private:
    const PlanarPatch& patch_;
    CarrierGraph base_;
    std::optional<CarrierGraph> odd_;
    std::optional<CarrierGraph> line_;
    bool parity_;
    int tri_radius_;
};

} // namespace heightlab
