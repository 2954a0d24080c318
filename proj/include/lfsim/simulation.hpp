#pragma once

#include <array>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "lfsim/scenario.hpp"

namespace lfsim {

// What a follower knows about its leader this step: the leader's input and
// heading as communicated over the (possibly delayed) channel.
struct NeighborMessage {
    int sender = 0;
    ControlInput u;
    double theta = 0.0;
    double stamp = 0.0;  // seconds, <= current simulation time
};

// Delivers each pushed message exactly delay_steps steps later; until the
// first delivery the receiver sees the sender's step-0 values.
class MessageChannel {
public:
    explicit MessageChannel(int delay_steps = 0) : delay_(delay_steps) {}

    void push(const NeighborMessage& msg) {
        buf_.push_back(msg);
        if (buf_.size() > static_cast<std::size_t>(delay_) + 1) buf_.pop_front();
    }

    const NeighborMessage& current() const { return buf_.front(); }

private:
    int delay_;
    std::deque<NeighborMessage> buf_;
};

// Chain configuration at one instant; pair i links agents i and i+1 and its
// stored relative state always equals the recomputation from the poses.
struct ChainState {
    double time = 0.0;
    std::vector<AgentState> agents;
    std::vector<PairState> pairs;
};

enum class StepStatus { off, blind, nominal, filtered, infeasible };

const char* to_string(StepStatus s);

// Everything logged for one pair at one step.
struct StepRecord {
    double t = 0.0;

    double L_true = 0.0;
    double alpha_true = 0.0;
    double phi_true = 0.0;
    std::array<double, 4> h_true = {0, 0, 0, 0};

    EstimateSample estimate;  // raw/filtered streams and the visibility flag

    ControlInput u_nom;
    ControlInput u_safe;
    StepStatus status = StepStatus::off;

    bool filter_ran = false;
    std::array<double, 4> h_filter = {0, 0, 0, 0};  // the h the QP saw
    std::vector<int> active_set;

    AgentState leader_pose;    // at step start
    AgentState follower_pose;  // at step start
};

struct PairLog {
    std::vector<StepRecord> rows;
};

struct TrajectoryLog {
    std::vector<PairLog> pairs;
    double dt = 0.0;
    std::size_t n_stages = 0;
};

struct StageMetrics {
    double rmse_L = 0.0;
    double rmse_alpha = 0.0;
};

struct PairMetrics {
    std::array<double, 4> min_h = {0, 0, 0, 0};
    long fov_violation_steps = 0;
    long blind_steps = 0;
    long infeasible_qp_steps = 0;
    long filter_active_steps = 0;
    long first_violation_step = -1;  // -1 when no violation occurred
    std::vector<StageMetrics> stages;
};

struct RunMetrics {
    std::vector<PairMetrics> pairs;
    long total_steps = 0;
    bool degenerate_fault = false;
};

struct RunResult {
    TrajectoryLog log;
    RunMetrics metrics;
    ChainState final_state;  // chain configuration after the last step
};

/// Runs one chain simulation. Per step and per pair: derive the true pair
/// state, run the perception models and temporal filters, compute the nominal
/// control from the estimates and the neighbor message, pass it through the
/// CBF-QP when enabled, clamp to the box, then advance all agents
/// synchronously. Deterministic for a given config.
RunResult run_scenario(const ScenarioConfig& cfg);

// True when the run must report a nonzero exit code.
bool run_flagged(const RunMetrics& m);

/// Writes per-pair CSVs (trajectory, estimate stream, filter log) plus a
/// run-level metrics file under out_dir, file names starting with prefix.
/// Output bytes depend only on the run result.
void export_csv(const RunResult& result, const std::string& out_dir, const std::string& prefix);

struct CompareResult {
    RunResult with_filter;
    RunResult without_filter;
};

// Runs the scenario twice with identical seeds, safety filter on and off.
CompareResult compare_scenarios(const ScenarioConfig& cfg);

// Writes both runs plus a side-by-side metrics summary; returns the summary path.
std::string export_compare_csv(const CompareResult& cmp, const std::string& out_dir);

}  // namespace lfsim
