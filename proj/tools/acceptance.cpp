#include <cstdio>
#include <cstdlib>
#include <string>

#include "heightlab/audits.hpp"

using namespace heightlab;

namespace {

int failures = 0;

void report(const char* label, const CheckResult& c, double time_limit) {
    const bool in_time = c.seconds < time_limit;
    const bool ok = c.passed && in_time;
    failures += !ok;
    std::string detail = c.detail;
    while (!detail.empty() && (detail.back() == ' ' || detail.back() == ';')) detail.pop_back();
    std::printf("%s  %-34s measured=%-12.4g tol=%-8.3g time=%.1fs/%.0fs  %s\n", ok ? "PASS" : "FAIL", label, c.measured,
                c.tolerance, c.seconds, time_limit, detail.c_str());
    std::fflush(stdout);
}

} // namespace

int main(int argc, char** argv) {
    // --quick shrinks the Monte Carlo budgets; the tolerances stay the same.
    const bool quick = argc > 1 && std::string(argv[1]) == "--quick";
    report("decomposition identity", check_decomposition(1e-14), 1.0);
    report("enrichment marginal invariance", check_enrichment_invariance(quick ? 5000 : 20000, 1e-14), 10.0);
    report("exact-sampler oracle", check_exact_oracle(quick ? 100000 : 1000000, 0.01), 300.0);
    report("FKG and log-concavity", check_fkg(1e-12), 60.0);
    report("flip symmetry", check_flip_symmetry(1e-12), 60.0);
    report("monotone-boundary mean bounds", check_mean_bounds(400, 1e-12), 60.0);
    report("exploration properties", check_exploration(quick ? 2000 : 10000), 120.0);
    const auto v = check_variance_signature(quick ? 50000 : 200000, quick ? 20000 : 50000);
    report("delocalisation signature", v.result, 900.0);
    report("derived-graph geometry", check_derived_geometry(), 5.0);
    report("percolation census", check_percolation_census(), 10.0);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
