// One line per acceptance criterion; exit status is nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "pentatrope/experiments.hpp"

namespace pt = pentatrope;

namespace {

struct Criterion {
    int id;
    std::string title;
    double limit_seconds;
    std::function<pt::ExperimentReport()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "phi is a cyclic shift of y on rational B_n points, phi^n = id (exact)", 5,
         [] { return pt::run_lemma21({5, 6, 7}, 1000); }},
        {2, "quasi-recursiveness |log ratio| <= log(4) P_5(5), n=5 k=5 t in {2,4,10}", 30,
         [] { return pt::run_thm22(5, 5, {2.0, 4.0, 10.0}, 200); }},
        {3, "iterated dequantization |phi^l - phi_t^l| <= P_l(5) log_t 4, l <= 12", 20,
         [] { return pt::run_prop33(5, 12, {2.0, 10.0, 100.0}, 500); }},
        {4, "Log_t F^l t^x = phi_t^l x to rel 1e-9, l <= 10, t=2", 10,
         [] { return pt::run_conjugacy(5, 10, 2.0, 200); }},
        {5, "O_k, E_k conserved under T to rel 1e-8 with the oracle-selected convention", 30,
         [] { return pt::run_conservation({5, 6, 7, 8}, 50, 10); }},
        {6, "tropical invariants conserved exactly along phi, E max-pair on generic orbits", 20,
         [] { return pt::run_tropical_conservation({5, 6, 7}, 200, 30); }},
        {7, "generic invariant rank 2[n/2]+2 at >= 95% of generic points (exact rank)", 30,
         [] { return pt::run_thm23({5, 6, 7}, 200); }},
        {8, "geometric step commutes with T through canonical coordinates to rel 1e-7", 20,
         [] { return pt::run_crosschecks({5, 6, 7, 8}, 100); }},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        bool pass = false;
        std::string summary;
        try {
            const auto r = c.run();
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            const bool in_time = secs < c.limit_seconds;
            pass = r.pass && in_time;
            char buf[256];
            std::snprintf(buf, sizeof buf, "max_observed=%.6g bound=%.6g samples=%llu time=%.2fs/%.0fs%s",
                          r.max_observed, r.bound, static_cast<unsigned long long>(r.samples), secs, c.limit_seconds,
                          in_time ? "" : " (over time limit)");
            summary = buf;
            if (!r.pass) {
                summary += " details=" + r.details.dump();
            }
        } catch (const std::exception& e) {
            summary = std::string("exception: ") + e.what();
        }
        std::printf("%s criterion %d: %s | %s\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(), summary.c_str());
        std::fflush(stdout);
        failures += pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
