#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lfsim/cbf.hpp"
#include "lfsim/controller.hpp"
#include "lfsim/dynamics.hpp"
#include "lfsim/perception.hpp"

namespace lfsim {

// One stage: how long it lasts and the setpoint of every pair during it.
// A single setpoint is broadcast to all pairs.
struct StageConfig {
    double duration = 0.0;  // seconds, > 0
    std::vector<FormationSetpoint> setpoints;
};

// Piecewise-constant leader schedule entry: from t_start onward apply (v, omega).
struct LeaderScriptEntry {
    double t_start = 0.0;
    double v = 0.0;
    double omega = 0.0;
};

enum class ExecMode { serial, parallel };

/// Complete description of one chain run. Scenario files use one
/// `key = value` line per field with these exact names; `stage`,
/// `leader_script` and `initial_pose` repeat. Unknown keys are errors.
struct ScenarioConfig {
    int n_agents = 2;
    std::vector<StageConfig> stages;
    std::vector<LeaderScriptEntry> leader_script;
    bool safety_filter_enabled = true;
    bool perception_enabled = true;

    BearingClassifierModel bearing_model;
    DepthEstimatorModel depth_model;
    double K_f = 0.55;

    IntegratorConfig integrator;
    ControllerGains gains;
    SafetySet safety;
    VehicleGeometry geometry;
    InputBounds input_bounds;
    Mat2 P = Mat2::identity();  // QP cost weight

    std::uint64_t seed = 0;
    int message_delay_steps = 0;
    ExecMode exec = ExecMode::parallel;

    // Optional explicit start poses (one per agent, leader first). When empty
    // the chain starts collinear at the stage-1 distance setpoints.
    std::vector<AgentState> initial_poses;
};

// Parses and validates; throws ConfigError with the offending line.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& text);

// Applies one `key = value` override on top of an existing config (sweep
// support). Throws ConfigError for unknown keys or bad values.
void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value);

// Re-checks every invariant; throws ConfigError on the first violation.
void validate(const ScenarioConfig& cfg);

}  // namespace lfsim
