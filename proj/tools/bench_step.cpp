// Times the per-step sensing/control kernels: serial reference vs the
// OpenMP-parallel path, on chains wide enough for the parallel loop to matter.
// Both paths must produce identical metrics; the run aborts if they diverge.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "lfsim/scenario.hpp"
#include "lfsim/simulation.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

lfsim::ScenarioConfig wide_chain(int n_agents) {
    lfsim::ScenarioConfig cfg;
    cfg.n_agents = n_agents;
    cfg.stages.push_back({10.0, {{1.5, 0.0}}});
    cfg.leader_script.push_back({0.0, 0.5, 0.0});
    cfg.perception_enabled = true;
    cfg.safety_filter_enabled = true;
    cfg.bearing_model.misclass_rate = 0.1;
    cfg.bearing_model.misclass_spread = 3;
    cfg.depth_model.patch_size = 4096;  // heavy sensing load per follower
    cfg.depth_model.noise_sigma = 0.05;
    cfg.depth_model.outlier_rate = 0.2;
    cfg.seed = 7;
    return cfg;
}

double time_run(const lfsim::ScenarioConfig& cfg, lfsim::RunResult& out) {
    const auto t0 = std::chrono::steady_clock::now();
    out = lfsim::run_scenario(cfg);
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

bool same_metrics(const lfsim::RunMetrics& a, const lfsim::RunMetrics& b) {
    if (a.total_steps != b.total_steps || a.pairs.size() != b.pairs.size()) return false;
    for (std::size_t i = 0; i < a.pairs.size(); ++i) {
        const lfsim::PairMetrics& x = a.pairs[i];
        const lfsim::PairMetrics& y = b.pairs[i];
        if (x.fov_violation_steps != y.fov_violation_steps ||
            x.blind_steps != y.blind_steps ||
            x.infeasible_qp_steps != y.infeasible_qp_steps ||
            x.filter_active_steps != y.filter_active_steps) {
            return false;
        }
        for (std::size_t c = 0; c < 4; ++c) {
            if (x.min_h[c] != y.min_h[c]) return false;  // bitwise
        }
    }
    return true;
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both modes run serially\n");
#endif
    std::printf("%-10s %12s %12s %8s\n", "followers", "serial [s]", "parallel [s]", "speedup");

    for (int n_agents : {9, 33, 65}) {
        lfsim::ScenarioConfig cfg = wide_chain(n_agents);

        cfg.exec = lfsim::ExecMode::serial;
        lfsim::RunResult serial;
        const double ts = time_run(cfg, serial);

        cfg.exec = lfsim::ExecMode::parallel;
        lfsim::RunResult parallel;
        const double tp = time_run(cfg, parallel);

        if (!same_metrics(serial.metrics, parallel.metrics)) {
            std::fprintf(stderr, "serial and parallel runs diverged at %d agents\n", n_agents);
            return 1;
        }
        std::printf("%-10d %12.3f %12.3f %7.2fx\n", n_agents - 1, ts, tp, ts / tp);
    }
    return 0;
}
