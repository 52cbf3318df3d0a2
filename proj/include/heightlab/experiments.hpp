#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <openssl/evp.h>

#include "heightlab/audits.hpp"
#include "heightlab/json_io.hpp"
#include "heightlab/studies.hpp"

#ifndef HEIGHTLAB_VERSION
#define HEIGHTLAB_VERSION "0.0.0"
#endif

namespace heightlab {

inline constexpr int kSchemaVersion = 1;

enum class ExperimentKind { variance_growth, phase_contrast, percolation_scan, enrichment_audit, fkg_audit, exploration_audit };

inline std::string_view to_string(ExperimentKind k) {
    switch (k) {
    case ExperimentKind::variance_growth: return "variance_growth";
    case ExperimentKind::phase_contrast: return "phase_contrast";
    case ExperimentKind::percolation_scan: return "percolation_scan";
    case ExperimentKind::enrichment_audit: return "enrichment_audit";
    case ExperimentKind::fkg_audit: return "fkg_audit";
    case ExperimentKind::exploration_audit: return "exploration_audit";
    }
    return "variance_growth";
}

inline ExperimentKind experiment_from_string(const std::string& s) {
    for (auto k : {ExperimentKind::variance_growth, ExperimentKind::phase_contrast, ExperimentKind::percolation_scan,
                   ExperimentKind::enrichment_audit, ExperimentKind::fkg_audit, ExperimentKind::exploration_audit})
        if (to_string(k) == s) return k;
    fail(ErrorCode::config_error, "unknown experiment '" + s + "'");
}

struct LatticeParams {
    std::string family = "honeycomb";
    int n_series = 1;

    LatticeSpec spec() const {
        LatticeSpec base = LatticeSpec::honeycomb();
        if (family == "truncated_square") base = LatticeSpec::truncated_square();
        else if (family != "honeycomb") fail(ErrorCode::config_error, "unknown lattice family '" + family + "'");
        return LatticeSpec::series_expanded(base, n_series);
    }
};

struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    ExperimentKind experiment = ExperimentKind::variance_growth;
    LatticeParams lattice;
    Potential potential = Potential::homomorphism();
    std::vector<std::array<int, 2>> sizes; // {n, 0} for balls, {w, h} for tori
    SamplerConfig sampler;
    std::vector<int> levels;
    int trifurcation_radius = -1;
    std::string output_dir = "out";
    Json source; // the parsed document, echoed into the manifest
};

inline ExperimentConfig parse_config(const Json& j) {
    try {
        ExperimentConfig c;
        c.source = j;
        c.schema_version = j.value("schema_version", -1);
        if (c.schema_version != kSchemaVersion)
            fail(ErrorCode::config_error, "schema_version must be " + std::to_string(kSchemaVersion));
        c.experiment = experiment_from_string(j.at("experiment").get<std::string>());
        if (j.contains("lattice")) {
            c.lattice.family = j["lattice"].value("family", std::string("honeycomb"));
            c.lattice.n_series = j["lattice"].value("n_series", 1);
            c.lattice.spec();
        }
        if (j.contains("potential")) c.potential = potential_from_json(j["potential"]);
        const bool torus = c.experiment == ExperimentKind::percolation_scan;
        if (j.contains("sizes")) {
            for (const auto& s : j["sizes"]) {
                if (s.is_number_integer()) c.sizes.push_back({s.get<int>(), 0});
                else if (s.is_array() && s.size() == 2) c.sizes.push_back({s[0].get<int>(), s[1].get<int>()});
                else fail(ErrorCode::config_error, "sizes are integers (balls) or [w, h] (tori)");
            }
        }
        const bool audit = c.experiment == ExperimentKind::enrichment_audit || c.experiment == ExperimentKind::fkg_audit ||
                           c.experiment == ExperimentKind::exploration_audit;
        if (!audit) {
            if (c.sizes.empty()) fail(ErrorCode::config_error, "sizes must be nonempty");
            for (std::size_t i = 0; i < c.sizes.size(); ++i) {
                if (torus && (c.sizes[i][0] < 1 || c.sizes[i][1] < 1))
                    fail(ErrorCode::config_error, "percolation_scan sizes are [w, h]");
                if (!torus && (c.sizes[i][0] < 0 || c.sizes[i][1] != 0))
                    fail(ErrorCode::config_error, "ball sizes are nonnegative integers");
                if (i > 0 && c.sizes[i][0] * std::max(1, c.sizes[i][1]) <= c.sizes[i - 1][0] * std::max(1, c.sizes[i - 1][1]))
                    fail(ErrorCode::config_error, "sizes must be increasing");
            }
        }
        if (j.contains("sampler")) {
            const auto& s = j["sampler"];
            c.sampler.sweeps = s.value("sweeps", c.sampler.sweeps);
            c.sampler.burn_in = s.value("burn_in", c.sampler.burn_in);
            c.sampler.thinning = s.value("thinning", c.sampler.thinning);
            c.sampler.seed = s.value("seed", c.sampler.seed);
            c.sampler.height_window = s.value("height_window", c.sampler.height_window);
            if (c.sampler.sweeps <= 0 || c.sampler.burn_in < 0 || c.sampler.thinning <= 0)
                fail(ErrorCode::config_error, "sampler needs sweeps > 0, burn_in >= 0, thinning > 0");
        }
        c.levels = j.value("levels", std::vector<int>{});
        if (torus && c.levels.empty()) fail(ErrorCode::config_error, "percolation_scan needs levels");
        c.trifurcation_radius = j.value("trifurcation_radius", -1);
        c.output_dir = j.value("output_dir", std::string("out"));
        return c;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::config_error, std::string("malformed config: ") + e.what());
    }
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::config_error, "cannot open " + path.string());
    try {
        return parse_config(Json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::config_error, std::string("malformed config: ") + e.what());
    }
}

inline std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return out.str();
}

inline std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Outputs collected in memory; only the coordinator touches the disk.
struct RunOutput {
    std::vector<std::pair<std::string, std::string>> files; // name, content
    Json diagnostics = Json::array();
    bool checks_passed = true;
};

struct RunManifest {
    Json config;
    std::uint64_t master_seed = 0;
    std::string code_version = HEIGHTLAB_VERSION;
    std::string started_at;
    std::string finished_at;
    Json diagnostics = Json::array();
    Json files = Json::array();

    Json to_json() const {
        return Json{{"schema_version", kSchemaVersion},
                    {"config", config},
                    {"master_seed", master_seed},
                    {"code_version", code_version},
                    {"started_at", started_at},
                    {"finished_at", finished_at},
                    {"boundary_condition", "zero, parity-shifted for parity potentials; torus root pinned"},
                    {"diagnostics", diagnostics},
                    {"files", files}};
    }
};

/// Runs `job(i)` for i in [0, n) on up to `threads` workers.
template <typename Job>
void parallel_for(int n, int threads, Job&& job) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) job(i);
        });
    for (auto& th : pool) th.join();
}

inline RunOutput run_variance_growth(const ExperimentConfig& cfg, std::uint64_t master, int threads) {
    const auto spec = cfg.lattice.spec();
    const int n = static_cast<int>(cfg.sizes.size());
    std::vector<std::optional<VariancePoint>> points(n);
    std::vector<std::string> errors(n);
    parallel_for(n, threads, [&](int i) {
        SamplerConfig s = cfg.sampler;
        s.seed = derive_seed(master, static_cast<int>(cfg.experiment), cfg.sizes[i][0], 0);
        try {
            points[i] = variance_point(spec, cfg.potential, cfg.sizes[i][0], s);
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });
    RunOutput out;
    std::vector<VariancePoint> rows;
    for (int i = 0; i < n; ++i) {
        if (points[i]) {
            const auto& p = *points[i];
            rows.push_back(p);
            out.diagnostics.push_back(Json{{"n", p.n}, {"status", "ok"}, {"sites", p.sites}, {"seed", p.seed},
                                           {"samples", p.samples}, {"mean_root", p.mean_root}, {"stderr_mean", p.stderr_mean},
                                           {"height_window", p.window}, {"seconds", p.seconds}});
        } else {
            out.checks_passed = false;
            out.diagnostics.push_back(Json{{"n", cfg.sizes[i][0]}, {"status", "failed"}, {"error", errors[i]}});
        }
    }
    std::ostringstream csv;
    write_variance_csv(csv, rows);
    out.files.push_back({std::string(to_string(cfg.experiment)) + ".csv", csv.str()});
    return out;
}

inline RunOutput run_percolation_scan(const ExperimentConfig& cfg, std::uint64_t master, int threads) {
    const auto spec = cfg.lattice.spec();
    const int n = static_cast<int>(cfg.sizes.size());
    const bool parity = classify(cfg.potential).parity;
    std::vector<std::string> csvs(n), errors(n);
    std::vector<Json> diag(n);
    parallel_for(n, threads, [&](int i) {
        const int w = cfg.sizes[i][0], h = cfg.sizes[i][1];
        try {
            const auto t = build_torus(spec, w, h);
            const auto bc = default_boundary(t, cfg.potential);
            const auto H = specification(t, PotentialAssignment::uniform(t, cfg.potential), bc);
            const PercolationScanner scan(t, parity, cfg.trifurcation_radius);
            SamplerConfig s = cfg.sampler;
            s.seed = derive_seed(master, static_cast<int>(cfg.experiment), w, h);
            Rng coins(derive_seed(s.seed, 1));
            std::vector<PercolationRow> rows;
            long sample = 0, both_wrap = 0;
            run_chain(H, starting_heights(H, bc), s, {}, [&](long, std::span<const int> phi) {
                HeightConfig c = bc;
                c.heights.assign(phi.begin(), phi.end());
                auto r = scan.rows(c, cfg.levels, sample++, coins);
                const auto& plus = r[r.size() - 2];
                const auto& minus = r[r.size() - 1];
                both_wrap += (plus.wraps_h || plus.wraps_v) && (minus.wraps_h || minus.wraps_v);
                rows.insert(rows.end(), r.begin(), r.end());
            });
            std::ostringstream csv;
            write_percolation_csv(csv, rows);
            csvs[i] = csv.str();
            Json freq = Json::object();
            for (int a : cfg.levels) {
                long geq = 0, leq = 0;
                for (const auto& r : rows) {
                    if (r.level != a || r.carrier != "vertices") continue;
                    const bool wraps = r.wraps_h || r.wraps_v;
                    (r.direction == "geq" ? geq : leq) += wraps;
                }
                freq[std::to_string(a)] = Json{{"geq_wraps", static_cast<double>(geq) / sample},
                                               {"leq_wraps", static_cast<double>(leq) / sample}};
            }
            diag[i] = Json{{"size", {w, h}},
                           {"status", "ok"},
                           {"seed", s.seed},
                           {"samples", sample},
                           {"spin_carrier", parity ? "odd_vertices" : "edges"},
                           {"both_spin_classes_wrap_frequency", static_cast<double>(both_wrap) / sample},
                           {"wrap_frequency_by_level", freq},
                           {"trifurcation_box_radius", cfg.trifurcation_radius},
                           {"trifurcation_large_threshold", cfg.trifurcation_radius >= 0 ? patch_diameter(t) : 0}};
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });
    RunOutput out;
    for (int i = 0; i < n; ++i) {
        const auto tag = std::to_string(cfg.sizes[i][0]) + "x" + std::to_string(cfg.sizes[i][1]);
        if (errors[i].empty()) {
            out.files.push_back({"percolation_scan_" + tag + ".csv", csvs[i]});
            out.diagnostics.push_back(diag[i]);
        } else {
            out.checks_passed = false;
            out.diagnostics.push_back(Json{{"size", {cfg.sizes[i][0], cfg.sizes[i][1]}}, {"status", "failed"}, {"error", errors[i]}});
        }
    }
    return out;
}

inline RunOutput run_audits(const std::vector<std::string>& suites) {
    RunOutput out;
    Json all = Json::array();
    for (const auto& s : suites) {
        const auto r = run_suite(s);
        out.checks_passed = out.checks_passed && r.passed();
        all.push_back(r.to_json());
        out.diagnostics.push_back(Json{{"suite", s}, {"passed", r.passed()}});
    }
    out.files.push_back({"audits.json", all.dump(2) + "\n"});
    return out;
}

inline RunOutput run_experiment(const ExperimentConfig& cfg, std::uint64_t master, int threads) {
    switch (cfg.experiment) {
    case ExperimentKind::variance_growth:
    case ExperimentKind::phase_contrast: return run_variance_growth(cfg, master, threads);
    case ExperimentKind::percolation_scan: return run_percolation_scan(cfg, master, threads);
    case ExperimentKind::enrichment_audit: return run_audits({"enrichment"});
    case ExperimentKind::fkg_audit: return run_audits({"fkg"});
    case ExperimentKind::exploration_audit: return run_audits({"exploration"});
    }
    return {};
}

/// Runs the experiment and writes its files plus manifest.json into `dir`.
inline RunManifest execute(const ExperimentConfig& cfg, std::optional<std::uint64_t> seed, const std::filesystem::path& dir,
                           int threads, bool* checks_passed = nullptr) {
    RunManifest m;
    m.config = cfg.source;
    m.master_seed = seed.value_or(cfg.sampler.seed);
    m.started_at = utc_now();
    auto out = run_experiment(cfg, m.master_seed, threads);
    m.finished_at = utc_now();
    m.diagnostics = out.diagnostics;
    std::filesystem::create_directories(dir);
    for (const auto& [name, content] : out.files) {
        std::ofstream(dir / name, std::ios::binary) << content;
        m.files.push_back(Json{{"path", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
    }
    std::ofstream(dir / "manifest.json") << m.to_json().dump(2) << "\n";
    if (checks_passed) *checks_passed = out.checks_passed;
    return m;
}

} // namespace heightlab
