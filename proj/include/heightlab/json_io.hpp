#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "heightlab/enrichment.hpp"
#include "heightlab/error.hpp"
#include "heightlab/exploration.hpp"
#include "heightlab/gibbs.hpp"
#include "heightlab/lattice.hpp"
#include "heightlab/percolation.hpp"
#include "heightlab/potentials.hpp"

namespace heightlab {

using Json = nlohmann::ordered_json;

/// %.17g, so doubles survive a text round trip.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string_view to_string(TopologyKind k) {
    switch (k) {
    case TopologyKind::ball: return "ball";
    case TopologyKind::torus: return "torus";
    case TopologyKind::region: return "region";
    }
    return "region";
}

inline Json topology_json(const PlanarPatch& p) {
    const auto& t = p.topology();
    Json j;
    j["kind"] = to_string(t.kind);
    j["lattice"] = p.lattice_name();
    if (t.kind == TopologyKind::ball) j["radius"] = t.radius;
    if (t.kind == TopologyKind::torus) {
        j["w"] = t.w;
        j["h"] = t.h;
    }
    return j;
}

inline Json patch_to_json(const PlanarPatch& p) {
    Json j;
    Json vs = Json::array();
    for (const auto& v : p.vertices())
        vs.push_back(Json{{"id", v.id}, {"x", v.position.x}, {"y", v.position.y}, {"parity", v.parity == Parity::odd ? 1 : 0}});
    j["vertices"] = std::move(vs);
    Json es = Json::array();
    for (const auto& e : p.edges()) es.push_back(Json::array({e.a, e.b}));
    j["edges"] = std::move(es);
    j["interior"] = p.interior();
    j["boundary"] = p.boundary();
    j["root"] = p.root();
    j["topology"] = topology_json(p);
    return j;
}

// ---- potentials

inline Json value_or_inf(double v) { return std::isinf(v) ? Json("inf") : Json(v); }

inline double parse_value(const Json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return kInfinity;
        fail(ErrorCode::config_error, "potential value must be a number or \"inf\"");
    }
    if (!j.is_number()) fail(ErrorCode::config_error, "potential value must be a number or \"inf\"");
    return j.get<double>();
}

inline std::string_view to_string(TailKind k) {
    switch (k) {
    case TailKind::infinite: return "infinite";
    case TailKind::quadratic: return "quadratic";
    case TailKind::linear: return "linear";
    }
    return "infinite";
}

inline Json potential_to_json(const Potential& V) {
    Json j;
    switch (V.kind()) {
    case PotentialKind::discrete_gaussian: j["kind"] = "discrete_gaussian"; j["beta"] = V.beta(); break;
    case PotentialKind::solid_on_solid: j["kind"] = "solid_on_solid"; j["beta"] = V.beta(); break;
    case PotentialKind::k_lipschitz: j["kind"] = "k_lipschitz"; j["k"] = V.k(); break;
    case PotentialKind::homomorphism: j["kind"] = "homomorphism"; break;
    case PotentialKind::star: j["kind"] = "star"; break;
    case PotentialKind::table:
    case PotentialKind::parity_table: {
        const bool parity = V.kind() == PotentialKind::parity_table;
        j["kind"] = parity ? "parity_table" : "table";
        Json vals = Json::array();
        for (int x = -V.table_radius(); x <= V.table_radius(); ++x) {
            if (parity && x % 2 == 0) continue;
            vals.push_back(Json::array({x, value_or_inf(V.raw(x))}));
        }
        j["values"] = std::move(vals);
        j["tail"] = Json{{"kind", to_string(V.tail().kind)}, {"beta", V.tail().beta}};
        break;
    }
    }
    if (V.window() != Potential::kDefaultWindow) j["window"] = V.window();
    return j;
}

inline Potential potential_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind")) fail(ErrorCode::config_error, "potential needs a \"kind\"");
    const auto kind = j.at("kind").get<std::string>();
    auto num = [&](const char* key) {
        if (!j.contains(key)) fail(ErrorCode::config_error, kind + " needs \"" + key + "\"");
        return j.at(key).get<double>();
    };
    Potential V = Potential::homomorphism();
    if (kind == "discrete_gaussian") V = Potential::discrete_gaussian(num("beta"));
    else if (kind == "solid_on_solid") V = Potential::solid_on_solid(num("beta"));
    else if (kind == "k_lipschitz") V = Potential::k_lipschitz(static_cast<int>(num("k")));
    else if (kind == "homomorphism") V = Potential::homomorphism();
    else if (kind == "star") V = Potential::star();
    else if (kind == "table" || kind == "parity_table") {
        if (!j.contains("values") || !j.at("values").is_array()) fail(ErrorCode::config_error, "table needs \"values\"");
        std::vector<std::pair<int, double>> vals;
        for (const auto& row : j.at("values")) {
            if (!row.is_array() || row.size() != 2) fail(ErrorCode::config_error, "table rows are [x, value]");
            vals.push_back({row[0].get<int>(), parse_value(row[1])});
        }
        Tail t;
        if (j.contains("tail")) {
            const auto& tj = j.at("tail");
            const auto tk = tj.value("kind", std::string("infinite"));
            if (tk == "infinite") t.kind = TailKind::infinite;
            else if (tk == "quadratic") t.kind = TailKind::quadratic;
            else if (tk == "linear") t.kind = TailKind::linear;
            else fail(ErrorCode::config_error, "unknown tail kind '" + tk + "'");
            t.beta = tj.value("beta", 0.0);
        }
        V = kind == "table" ? Potential::table(vals, t) : Potential::parity_table(vals, t);
    } else {
        fail(ErrorCode::config_error, "unknown potential kind '" + kind + "'");
    }
    if (j.contains("window")) V = V.with_window(j.at("window").get<int>());
    return V;
}

// ---- configurations

inline Json height_config_to_json(const HeightConfig& c) {
    Json j;
    j["heights"] = c.heights;
    std::vector<int> pinned;
    for (std::size_t v = 0; v < c.pinned.size(); ++v)
        if (c.pinned[v]) pinned.push_back(static_cast<int>(v));
    j["pinned"] = pinned;
    j["parity_constraint"] = c.parity_constraint;
    return j;
}

inline HeightConfig height_config_from_json(const Json& j) {
    HeightConfig c;
    c.heights = j.at("heights").get<std::vector<int>>();
    c.pinned.assign(c.heights.size(), 0);
    for (int v : j.at("pinned").get<std::vector<int>>()) {
        if (v < 0 || v >= static_cast<int>(c.heights.size())) fail(ErrorCode::config_error, "pinned vertex out of range");
        c.pinned[v] = 1;
    }
    c.parity_constraint = j.value("parity_constraint", false);
    return c;
}

inline Json enriched_to_json(const EnrichedConfig& e) {
    Json j = height_config_to_json(e.base);
    Json ex = Json::array(), mid = Json::array();
    for (std::size_t k = 0; k < e.excited.size(); ++k) {
        ex.push_back(Json::array({k, e.excited[k]}));
        mid.push_back(Json::array({k, e.midpoint[k] ? Json(e.midpoint[k]->twice) : Json(nullptr)}));
    }
    j["excited"] = std::move(ex);
    j["midpoint_x2"] = std::move(mid);
    if (e.coins) {
        Json co = Json::array();
        for (std::size_t k = 0; k < e.coins->size(); ++k) co.push_back(Json::array({k, (*e.coins)[k].twice}));
        j["coin_x2"] = std::move(co);
    }
    return j;
}

inline EnrichedConfig enriched_from_json(const Json& j) {
    EnrichedConfig e;
    e.base = height_config_from_json(j);
    const auto& ex = j.at("excited");
    e.excited.assign(ex.size(), 0);
    e.midpoint.assign(ex.size(), std::nullopt);
    auto slot = [&](const Json& row) {
        const auto k = row.at(0).get<std::size_t>();
        if (k >= ex.size()) fail(ErrorCode::config_error, "edge index out of range");
        return k;
    };
    for (const auto& row : ex) e.excited[slot(row)] = row.at(1).get<int>() != 0;
    for (const auto& row : j.at("midpoint_x2"))
        if (!row.at(1).is_null()) e.midpoint[slot(row)] = HalfInt{row.at(1).get<int>()};
    if (j.contains("coin_x2")) {
        e.coins = std::vector<HalfInt>(ex.size(), HalfInt{1});
        for (const auto& row : j.at("coin_x2")) (*e.coins)[slot(row)] = HalfInt{row.at(1).get<int>()};
    }
    return e;
}

// ---- exploration and percolation

inline Json exploration_to_json(const ExplorationResult& r) {
    Json j;
    std::string bits;
    for (auto b : r.revealed) bits.push_back(b ? '1' : '0');
    j["revealed"] = bits;
    j["unrevealed"] = r.unrevealed;
    j["root_unrevealed"] = r.root_unrevealed;
    Json be = Json::array();
    for (const auto& b : r.boundary_edges)
        be.push_back(Json{{"x", b.x},
                          {"y", b.y},
                          {"edge", b.edge},
                          {"type", b.type ? Json(std::string(to_string(*b.type))) : Json(nullptr)}});
    j["boundary_edges"] = std::move(be);
    j["reveal_order"] = r.reveal_order;
    j["edge_order"] = r.edge_order;
    j["steps"] = r.steps;
    j["edge_budget"] = r.edge_budget;
    j["violations"] = r.violations;
    return j;
}

inline Json percolation_to_json(const PercolationReport& r) {
    Json j;
    j["cluster_count"] = r.cluster_count;
    j["cluster_sizes"] = r.cluster_sizes;
    j["largest_fraction"] = r.largest_fraction;
    Json w = Json::array();
    for (const auto& f : r.wrap_flags) w.push_back(Json::array({f[0], f[1]}));
    j["wrap_flags"] = std::move(w);
    j["boundary_touching"] = r.boundary_touching;
    j["trifurcation_boxes"] = r.trifurcation_boxes;
    j["trifurcation_box_radius"] = r.trifurcation_box_radius;
    j["large_threshold"] = r.large_threshold;
    return j;
}

// ---- CSV

/// Long format: one row per (recorded sweep, observable).
inline void write_series_csv(std::ostream& out, const ObservableSeries& s) {
    out << "sweep,observable_id,value\n";
    for (std::size_t i = 0; i < s.sweeps.size(); ++i)
        for (std::size_t o = 0; o < s.ids.size(); ++o)
            out << s.sweeps[i] << ',' << s.ids[o] << ',' << format_double(s.values[o][i]) << '\n';
}

inline Json series_summary_json(const ObservableSeries& s) {
    Json arr = Json::array();
    for (std::size_t o = 0; o < s.ids.size(); ++o) {
        const auto& m = s.summary[o];
        arr.push_back(Json{{"observable", s.ids[o]},
                           {"mean", m.mean},
                           {"stderr", m.stderr_mean},
                           {"variance", m.variance},
                           {"n_samples", m.n_samples},
                           {"seed", s.seed}});
    }
    return arr;
}

} // namespace heightlab
