#include "lfsim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace lfsim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

double to_double(const std::string& s, const std::string& key) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value '" + s + "' for " + key);
    }
    if (pos != s.size() || !std::isfinite(v)) {
        throw ConfigError("bad numeric value '" + s + "' for " + key);
    }
    return v;
}

long to_long(const std::string& s, const std::string& key) {
    const double v = to_double(s, key);
    if (v != std::floor(v)) throw ConfigError("expected integer value for " + key);
    return static_cast<long>(v);
}

bool to_bool(const std::string& s, const std::string& key) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError("expected true/false for " + key);
}

void set_key(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    const std::vector<std::string> parts = split_ws(value);
    auto want = [&](std::size_t n) {
        if (parts.size() != n) {
            throw ConfigError(key + " expects " + std::to_string(n) + " value(s)");
        }
    };

    if (key == "n_agents") {
        want(1);
        cfg.n_agents = static_cast<int>(to_long(value, key));
    } else if (key == "stage") {
        if (parts.size() < 3 || parts.size() % 2 == 0) {
            throw ConfigError("stage expects: duration L_d alpha_d [L_d alpha_d ...]");
        }
        StageConfig st;
        st.duration = to_double(parts[0], key);
        for (std::size_t i = 1; i + 1 < parts.size(); i += 2) {
            st.setpoints.push_back(
                {to_double(parts[i], key), to_double(parts[i + 1], key)});
        }
        cfg.stages.push_back(st);
    } else if (key == "leader_script") {
        want(3);
        cfg.leader_script.push_back({to_double(parts[0], key), to_double(parts[1], key),
                                     to_double(parts[2], key)});
    } else if (key == "initial_pose") {
        want(3);
        AgentState a;
        a.x = to_double(parts[0], key);
        a.y = to_double(parts[1], key);
        a.theta = to_double(parts[2], key);
        cfg.initial_poses.push_back(a);
    } else if (key == "safety_filter_enabled") {
        want(1);
        cfg.safety_filter_enabled = to_bool(parts[0], key);
    } else if (key == "perception_enabled") {
        want(1);
        cfg.perception_enabled = to_bool(parts[0], key);
    } else if (key == "dt") {
        want(1);
        cfg.integrator.dt = to_double(parts[0], key);
    } else if (key == "scheme") {
        want(1);
        if (parts[0] == "euler") {
            cfg.integrator.scheme = IntegrationScheme::euler;
        } else if (parts[0] == "rk4") {
            cfg.integrator.scheme = IntegrationScheme::rk4;
        } else {
            throw ConfigError("scheme must be euler or rk4");
        }
    } else if (key == "K_L") {
        want(1);
        cfg.gains.K_L = to_double(parts[0], key);
    } else if (key == "K_alpha") {
        want(1);
        cfg.gains.K_alpha = to_double(parts[0], key);
    } else if (key == "K_f") {
        want(1);
        cfg.K_f = to_double(parts[0], key);
    } else if (key == "D_min") {
        want(1);
        cfg.safety.D_min = to_double(parts[0], key);
    } else if (key == "D_max") {
        want(1);
        cfg.safety.D_max = to_double(parts[0], key);
    } else if (key == "psi_max") {
        want(1);
        cfg.safety.psi_max = to_double(parts[0], key);
        cfg.bearing_model.psi_max = cfg.safety.psi_max;
    } else if (key == "gamma") {
        if (parts.size() == 1) {
            const double g = to_double(parts[0], key);
            cfg.safety.gamma = {g, g, g, g};
        } else {
            want(4);
            for (int i = 0; i < 4; ++i) {
                cfg.safety.gamma[static_cast<std::size_t>(i)] =
                    to_double(parts[static_cast<std::size_t>(i)], key);
            }
        }
    } else if (key == "d") {
        want(1);
        cfg.geometry.d = to_double(parts[0], key);
    } else if (key == "v_min") {
        want(1);
        cfg.input_bounds.v_min = to_double(parts[0], key);
    } else if (key == "v_max") {
        want(1);
        cfg.input_bounds.v_max = to_double(parts[0], key);
    } else if (key == "omega_min") {
        want(1);
        cfg.input_bounds.omega_min = to_double(parts[0], key);
    } else if (key == "omega_max") {
        want(1);
        cfg.input_bounds.omega_max = to_double(parts[0], key);
    } else if (key == "P") {
        want(4);
        cfg.P = {to_double(parts[0], key), to_double(parts[1], key), to_double(parts[2], key),
                 to_double(parts[3], key)};
    } else if (key == "n_classes_in_fov") {
        want(1);
        cfg.bearing_model.n_classes_in_fov = static_cast<int>(to_long(parts[0], key));
    } else if (key == "misclass_rate") {
        want(1);
        cfg.bearing_model.misclass_rate = to_double(parts[0], key);
    } else if (key == "misclass_spread") {
        want(1);
        cfg.bearing_model.misclass_spread = static_cast<int>(to_long(parts[0], key));
    } else if (key == "patch_size") {
        want(1);
        cfg.depth_model.patch_size = static_cast<int>(to_long(parts[0], key));
    } else if (key == "noise_sigma") {
        want(1);
        cfg.depth_model.noise_sigma = to_double(parts[0], key);
    } else if (key == "outlier_rate") {
        want(1);
        cfg.depth_model.outlier_rate = to_double(parts[0], key);
    } else if (key == "outlier_offset_min") {
        want(1);
        cfg.depth_model.outlier_offset_min = to_double(parts[0], key);
    } else if (key == "outlier_offset_max") {
        want(1);
        cfg.depth_model.outlier_offset_max = to_double(parts[0], key);
    } else if (key == "sigma_clip_k") {
        want(1);
        cfg.depth_model.sigma_clip_k = to_double(parts[0], key);
    } else if (key == "seed") {
        want(1);
        const long s = to_long(parts[0], key);
        if (s < 0) throw ConfigError("seed must be nonnegative");
        cfg.seed = static_cast<std::uint64_t>(s);
    } else if (key == "message_delay_steps") {
        want(1);
        cfg.message_delay_steps = static_cast<int>(to_long(parts[0], key));
    } else if (key == "exec") {
        want(1);
        if (parts[0] == "serial") {
            cfg.exec = ExecMode::serial;
        } else if (parts[0] == "parallel") {
            cfg.exec = ExecMode::parallel;
        } else {
            throw ConfigError("exec must be serial or parallel");
        }
    } else {
        throw ConfigError("unknown key '" + key + "'");
    }
}

}  // namespace

void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    set_key(cfg, key, value);
    validate(cfg);
}

ScenarioConfig parse_scenario(const std::string& text) {
    ScenarioConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            set_key(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    validate(cfg);
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

void validate(const ScenarioConfig& cfg) {
    if (cfg.n_agents < 2) throw ConfigError("n_agents must be >= 2");
    const std::size_t n_pairs = static_cast<std::size_t>(cfg.n_agents) - 1;
    for (const StageConfig& st : cfg.stages) {
        if (!(st.duration > 0.0)) throw ConfigError("stage duration must be > 0");
        if (st.setpoints.size() != 1 && st.setpoints.size() != n_pairs) {
            throw ConfigError("stage needs 1 or n_agents-1 setpoints");
        }
        for (const FormationSetpoint& sp : st.setpoints) {
            if (!(sp.L_d > 0.0)) throw ConfigError("L_d must be > 0");
        }
    }
    for (std::size_t i = 1; i < cfg.leader_script.size(); ++i) {
        if (cfg.leader_script[i].t_start < cfg.leader_script[i - 1].t_start) {
            throw ConfigError("leader_script entries must be ordered by t_start");
        }
    }
    if (!cfg.initial_poses.empty() &&
        cfg.initial_poses.size() != static_cast<std::size_t>(cfg.n_agents)) {
        throw ConfigError("initial_pose must appear once per agent");
    }
    if (!(cfg.integrator.dt > 0.0 && cfg.integrator.dt <= 0.1)) {
        throw ConfigError("dt must be in (0, 0.1]");
    }
    if (!(cfg.gains.K_L > 0.0 && cfg.gains.K_alpha > 0.0)) {
        throw ConfigError("controller gains must be > 0");
    }
    if (!(cfg.K_f > 0.0 && cfg.K_f < 1.0)) throw ConfigError("K_f must be in (0, 1)");
    if (!(cfg.safety.D_min > 0.0 && cfg.safety.D_min < cfg.safety.D_max)) {
        throw ConfigError("need 0 < D_min < D_max");
    }
    if (!(cfg.safety.psi_max > 0.0 && cfg.safety.psi_max < kPi / 2.0)) {
        throw ConfigError("psi_max must be in (0, pi/2)");
    }
    for (double g : cfg.safety.gamma) {
        if (!(g > 0.0)) throw ConfigError("gamma must be > 0");
    }
    if (!(cfg.geometry.d > 0.0)) throw ConfigError("d must be > 0");
    if (cfg.input_bounds.v_min > cfg.input_bounds.v_max ||
        cfg.input_bounds.omega_min > cfg.input_bounds.omega_max) {
        throw ConfigError("input bounds are empty");
    }
    if (std::abs(cfg.P.a12 - cfg.P.a21) > 1e-12) {
        throw ConfigError("P must be symmetric");
    }
    const double tr = cfg.P.a11 + cfg.P.a22;
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det(cfg.P)));
    if (!(0.5 * (tr - disc) >= 1e-9)) {
        throw ConfigError("P must be positive definite");
    }
    if (cfg.bearing_model.n_classes_in_fov < 1) {
        throw ConfigError("n_classes_in_fov must be >= 1");
    }
    if (cfg.bearing_model.misclass_rate < 0.0 || cfg.bearing_model.misclass_rate >= 1.0) {
        throw ConfigError("misclass_rate must be in [0, 1)");
    }
    if (cfg.bearing_model.misclass_spread < 0) {
        throw ConfigError("misclass_spread must be >= 0");
    }
    if (cfg.depth_model.patch_size < 4) throw ConfigError("patch_size must be >= 4");
    if (!(cfg.depth_model.sigma_clip_k > 0.0)) throw ConfigError("sigma_clip_k must be > 0");
    if (cfg.depth_model.outlier_rate < 0.0 || cfg.depth_model.outlier_rate > 1.0) {
        throw ConfigError("outlier_rate must be in [0, 1]");
    }
    if (cfg.depth_model.outlier_offset_min > cfg.depth_model.outlier_offset_max) {
        throw ConfigError("outlier offset range is empty");
    }
    if (cfg.message_delay_steps < 0) throw ConfigError("message_delay_steps must be >= 0");
}

}  // namespace lfsim
