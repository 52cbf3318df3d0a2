#include <iostream>
#include <regex>

#include "CLI11.hpp"
#include "heightlab/experiments.hpp"

using namespace heightlab;

namespace {

constexpr int kOk = 0, kCheckFailed = 1, kUsage = 2;

/// family[@N]:ball:n or family[@N]:torus:WxH
PlanarPatch patch_from_spec(const std::string& s) {
    static const std::regex re(R"(^([a-z_]+)(?:@(\d+))?:(ball|torus):(\d+)(?:x(\d+))?$)");
    std::smatch m;
    if (!std::regex_match(s, m, re)) fail(ErrorCode::config_error, "patch spec is family[@N]:ball:n or family[@N]:torus:WxH");
    LatticeParams lp;
    lp.family = m[1];
    if (m[2].matched) lp.n_series = std::stoi(m[2]);
    const auto spec = lp.spec();
    if (m[3] == "ball") {
        if (m[5].matched) fail(ErrorCode::config_error, "ball takes a single radius");
        return build_ball(spec, std::stoi(m[4]));
    }
    if (!m[5].matched) fail(ErrorCode::config_error, "torus needs WxH");
    return build_torus(spec, std::stoi(m[4]), std::stoi(m[5]));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"heightlab: integer height functions on cubic planar lattices"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run an experiment config");
    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    run->add_option("config", config_path, "experiment config (JSON)")->required();
    run->add_option("--seed", seed, "master seed (overrides sampler.seed)");
    run->add_option("--out", out_dir, "output directory (overrides output_dir)");
    run->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

    auto* audit = app.add_subcommand("audit", "run an invariant suite and print JSON verdicts");
    std::string suite;
    audit->add_option("suite", suite, "enrichment | fkg | exploration | geometry | percolation | all")->required();

    auto* patch = app.add_subcommand("patch", "emit a patch");
    std::string patch_spec, emit = "json";
    patch->add_option("spec", patch_spec, "family[@N]:ball:n or family[@N]:torus:WxH")->required();
    patch->add_option("--emit", emit, "output format")->check(CLI::IsMember({"json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*run) {
            auto cfg = load_config(config_path);
            const std::filesystem::path dir = out_dir.empty() ? cfg.output_dir : out_dir;
            bool ok = true;
            const auto m = execute(cfg, seed, dir, threads, &ok);
            std::cout << "wrote " << m.files.size() << " file(s) and manifest.json to " << dir.string() << "\n";
            return ok ? kOk : kCheckFailed;
        }
        if (*audit) {
            std::vector<std::string> suites{suite};
            if (suite == "all") suites = suite_names();
            Json all = Json::array();
            bool ok = true;
            for (const auto& s : suites) {
                const auto r = run_suite(s);
                ok = ok && r.passed();
                all.push_back(r.to_json());
            }
            std::cout << all.dump(2) << "\n";
            return ok ? kOk : kCheckFailed;
        }
        if (*patch) {
            std::cout << patch_to_json(patch_from_spec(patch_spec)).dump(2) << "\n";
            return kOk;
        }
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        const bool usage = e.code() == ErrorCode::config_error || e.code() == ErrorCode::fixture_missing ||
                           e.code() == ErrorCode::invalid_argument || e.code() == ErrorCode::quotient_breaks_parity ||
                           e.code() == ErrorCode::quotient_too_small;
        return usage ? kUsage : kCheckFailed;
    }
    return kUsage;
}
