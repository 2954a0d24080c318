#include "lfsim/simulation.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "lfsim/rng.hpp"

namespace lfsim {

namespace {

// Per-pair mutable simulation state (estimator streams, channel, last command).
struct PairRuntime {
    Rng bearing_rng{0};
    Rng depth_rng{0};
    TemporalFilter phi_filter{0.5};
    TemporalFilter L_filter{0.5};
    MessageChannel channel{0};
    ControlInput last_cmd;
};

// Results of the sensing phase for one pair at one step.
struct SensedState {
    PairState p_true;
    std::array<double, 4> h_true;
    bool degenerate = false;
    EstimateSample est;
};

ControlInput leader_input(const std::vector<LeaderScriptEntry>& script, double t) {
    ControlInput u;
    for (const LeaderScriptEntry& e : script) {
        if (e.t_start <= t + 1e-12) {
            u = {e.v, e.omega};
        } else {
            break;
        }
    }
    return u;
}

std::vector<AgentState> initial_chain(const ScenarioConfig& cfg) {
    if (!cfg.initial_poses.empty()) {
        std::vector<AgentState> agents = cfg.initial_poses;
        for (AgentState& a : agents) a.theta = wrap_angle(a.theta);
        return agents;
    }
    std::vector<AgentState> agents(static_cast<std::size_t>(cfg.n_agents));
    double x = 0.0;
    for (std::size_t i = 1; i < agents.size(); ++i) {
        double L_d = 1.5;
        if (!cfg.stages.empty()) {
            const StageConfig& st = cfg.stages.front();
            L_d = st.setpoints.size() == 1 ? st.setpoints[0].L_d : st.setpoints[i - 1].L_d;
        }
        x -= L_d + cfg.geometry.d;
        agents[i].x = x;
    }
    return agents;
}

FormationSetpoint setpoint_for(const StageConfig& st, std::size_t pair_idx) {
    return st.setpoints.size() == 1 ? st.setpoints[0] : st.setpoints[pair_idx];
}

bool is_visible(const PairState& p, const SafetySet& set) {
    return p.phi >= -set.psi_max && p.phi < set.psi_max && p.L >= set.D_min &&
           p.L <= set.D_max;
}

bool is_fov_violation(const PairState& p, const SafetySet& set) {
    return std::abs(p.phi) > set.psi_max || p.L < set.D_min || p.L > set.D_max;
}

// Sensing phase: true relative state, visibility, perception models, temporal
// filters. Touches only pair-owned state, so pairs can run in parallel.
SensedState sense_pair(const ScenarioConfig& cfg, double t, const AgentState& leader,
                       const AgentState& follower, PairRuntime& rt) {
    SensedState s;
    s.est.t = t;
    try {
        s.p_true = pair_state_from_global(leader, follower, cfg.geometry);
    } catch (const DegenerateGeometry&) {
        s.degenerate = true;
        return s;
    }
    const BarrierValues hv = barrier_values(s.p_true, leader.theta, follower.theta, cfg.safety);
    s.h_true = hv.h;
    s.est.visible = is_visible(s.p_true, cfg.safety);

    if (!cfg.perception_enabled) {
        // Idealized sensing: the controller sees the exact state.
        s.est.phi_raw = s.p_true.phi;
        s.est.L_raw = s.p_true.L;
        s.est.phi_filtered = s.p_true.phi;
        s.est.L_filtered = s.p_true.L;
        return s;
    }

    if (s.est.visible) {
        const BearingMeasurement bm = measure_bearing(s.p_true.phi, cfg.bearing_model,
                                                      rt.bearing_rng);
        s.est.phi_raw = bm.phi_hat;
        if (bm.phi_hat) s.est.phi_filtered = rt.phi_filter.step(*bm.phi_hat);

        try {
            s.est.L_raw = measure_depth(s.p_true.L, cfg.depth_model, rt.depth_rng);
            s.est.L_filtered = rt.L_filter.step(*s.est.L_raw);
        } catch (const AllClipped&) {
            s.est.L_filtered = rt.L_filter.state();  // hold
        }
    } else {
        s.est.phi_filtered = rt.phi_filter.state();  // hold
        s.est.L_filtered = rt.L_filter.state();
    }
    return s;
}

}  // namespace

const char* to_string(StepStatus s) {
    switch (s) {
        case StepStatus::off: return "off";
        case StepStatus::blind: return "blind";
        case StepStatus::nominal: return "nominal_feasible";
        case StepStatus::filtered: return "filtered";
        case StepStatus::infeasible: return "infeasible";
    }
    return "?";
}

RunResult run_scenario(const ScenarioConfig& cfg) {
    validate(cfg);

    const std::size_t n_pairs = static_cast<std::size_t>(cfg.n_agents) - 1;
    const double dt = cfg.integrator.dt;

    // Fixed step counts per stage; stage s covers steps [bounds[s], bounds[s+1]).
    std::vector<long> stage_bounds{0};
    for (const StageConfig& st : cfg.stages) {
        stage_bounds.push_back(stage_bounds.back() +
                               std::max(1l, std::lround(st.duration / dt)));
    }
    const long n_steps = stage_bounds.back();

    ChainState chain;
    chain.agents = initial_chain(cfg);
    chain.pairs.resize(n_pairs);
    const ControlInput u0 = leader_input(cfg.leader_script, 0.0);
    chain.agents[0].v = u0.v;
    chain.agents[0].omega = u0.omega;

    std::vector<PairRuntime> rts;
    rts.reserve(n_pairs);
    for (std::size_t i = 0; i < n_pairs; ++i) {
        PairRuntime rt;
        rt.bearing_rng = Rng(Rng::derive(cfg.seed + cfg.bearing_model.rng_seed, i + 1, 1));
        rt.depth_rng = Rng(Rng::derive(cfg.seed + cfg.depth_model.rng_seed, i + 1, 2));
        rt.phi_filter = TemporalFilter(cfg.K_f);
        rt.L_filter = TemporalFilter(cfg.K_f);
        rt.channel = MessageChannel(cfg.message_delay_steps);
        rts.push_back(std::move(rt));
    }

    RunResult out;
    out.log.dt = dt;
    out.log.n_stages = cfg.stages.size();
    out.log.pairs.resize(n_pairs);
    out.metrics.pairs.resize(n_pairs);
    for (PairMetrics& pm : out.metrics.pairs) {
        pm.min_h.fill(std::numeric_limits<double>::infinity());
        pm.stages.resize(cfg.stages.size());
    }
    std::vector<std::vector<double>> se_L(n_pairs), se_alpha(n_pairs);
    for (std::size_t i = 0; i < n_pairs; ++i) {
        se_L[i].assign(cfg.stages.size(), 0.0);
        se_alpha[i].assign(cfg.stages.size(), 0.0);
    }
    std::vector<long> stage_steps(cfg.stages.size(), 0);

    std::vector<SensedState> sensed(n_pairs);
    std::vector<ControlInput> applied(static_cast<std::size_t>(cfg.n_agents));

    std::size_t stage = 0;
    for (long k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        chain.time = t;
        while (stage + 1 < cfg.stages.size() && k >= stage_bounds[stage + 1]) ++stage;

        const ControlInput u_leader = leader_input(cfg.leader_script, t);
        applied[0] = u_leader;

        // Sensing phase: independent per pair.
        const bool parallel = cfg.exec == ExecMode::parallel;
#pragma omp parallel for schedule(static) if (parallel)
        for (long ip = 0; ip < static_cast<long>(n_pairs); ++ip) {
            const std::size_t i = static_cast<std::size_t>(ip);
            sensed[i] = sense_pair(cfg, t, chain.agents[i], chain.agents[i + 1], rts[i]);
        }

        bool degenerate = false;
        for (const SensedState& s : sensed) degenerate = degenerate || s.degenerate;
        if (degenerate) {
            out.metrics.degenerate_fault = true;
            break;
        }
        for (std::size_t i = 0; i < n_pairs; ++i) chain.pairs[i] = sensed[i].p_true;

        // Control phase, leaders first: with a zero-delay channel each
        // follower needs the input its own leader computed this very step.
        for (std::size_t i = 0; i < n_pairs; ++i) {
            const SensedState& s = sensed[i];
            PairRuntime& rt = rts[i];
            const FormationSetpoint sp =
                cfg.stages.empty() ? FormationSetpoint{} : setpoint_for(cfg.stages[stage], i);

            rt.channel.push({static_cast<int>(i), applied[i], chain.agents[i].theta, t});
            const NeighborMessage msg = rt.channel.current();

            StepRecord rec;
            rec.t = t;
            rec.L_true = s.p_true.L;
            rec.alpha_true = s.p_true.alpha;
            rec.phi_true = s.p_true.phi;
            rec.h_true = s.h_true;
            rec.estimate = s.est;
            rec.leader_pose = chain.agents[i];
            rec.follower_pose = chain.agents[i + 1];

            const bool blind = cfg.perception_enabled &&
                               (!s.est.visible || !s.est.phi_filtered || !s.est.L_filtered);

            ControlInput u_cmd;
            if (blind) {
                // Hold the last safe command, bleeding off speed.
                u_cmd = {0.9 * rt.last_cmd.v, rt.last_cmd.omega};
                rec.status = StepStatus::blind;
                rec.u_nom = u_cmd;
            } else {
                PairState p_est = s.p_true;
                if (cfg.perception_enabled) {
                    p_est.L = *s.est.L_filtered;
                    p_est.phi = *s.est.phi_filtered;
                    p_est.alpha = wrap_angle(msg.theta - chain.agents[i + 1].theta - p_est.phi);
                }
                rec.u_nom = nominal_control(p_est, msg.u, sp, cfg.gains, cfg.geometry);
                if (cfg.safety_filter_enabled) {
                    const FilterResult fr =
                        safety_filter(p_est, msg.u, rec.u_nom, msg.theta,
                                      chain.agents[i + 1].theta, cfg.safety, cfg.geometry,
                                      cfg.P, cfg.input_bounds);
                    rec.filter_ran = true;
                    rec.h_filter = fr.h.h;
                    rec.active_set = fr.solution.active_set;
                    u_cmd = fr.solution.u_safe;
                    switch (fr.solution.status) {
                        case QpStatus::nominal_feasible:
                            rec.status = StepStatus::nominal;
                            break;
                        case QpStatus::filtered:
                            rec.status = StepStatus::filtered;
                            break;
                        case QpStatus::infeasible:
                            rec.status = StepStatus::infeasible;
                            break;
                    }
                } else {
                    rec.status = StepStatus::off;
                    u_cmd = rec.u_nom;
                }
            }
            u_cmd = clamp_to(u_cmd, cfg.input_bounds);
            rec.u_safe = u_cmd;
            rt.last_cmd = u_cmd;
            applied[i + 1] = u_cmd;

            // Metrics.
            PairMetrics& pm = out.metrics.pairs[i];
            for (std::size_t c = 0; c < 4; ++c) {
                pm.min_h[c] = std::min(pm.min_h[c], s.h_true[c]);
            }
            if (is_fov_violation(s.p_true, cfg.safety)) {
                ++pm.fov_violation_steps;
                if (pm.first_violation_step < 0) pm.first_violation_step = k;
            }
            if (!s.est.visible) ++pm.blind_steps;
            if (rec.status == StepStatus::infeasible) ++pm.infeasible_qp_steps;
            if (rec.status == StepStatus::filtered || rec.status == StepStatus::infeasible) {
                ++pm.filter_active_steps;
            }
            if (!cfg.stages.empty()) {
                const double eL = s.p_true.L - sp.L_d;
                const double ea = wrap_angle(s.p_true.alpha - sp.alpha_d);
                se_L[i][stage] += eL * eL;
                se_alpha[i][stage] += ea * ea;
            }

            out.log.pairs[i].rows.push_back(std::move(rec));
        }
        if (!cfg.stages.empty()) ++stage_steps[stage];

        // Actuation: all agents advance synchronously.
        for (std::size_t a = 0; a < chain.agents.size(); ++a) {
            chain.agents[a] = step_agent(chain.agents[a], applied[a], cfg.integrator);
        }
        chain.time = static_cast<double>(k + 1) * dt;
        ++out.metrics.total_steps;
    }

    for (std::size_t i = 0; i < n_pairs; ++i) {
        for (std::size_t s = 0; s < cfg.stages.size(); ++s) {
            const double n = static_cast<double>(std::max(1l, stage_steps[s]));
            out.metrics.pairs[i].stages[s].rmse_L = std::sqrt(se_L[i][s] / n);
            out.metrics.pairs[i].stages[s].rmse_alpha = std::sqrt(se_alpha[i][s] / n);
        }
        // A run with no steps leaves min_h at +inf; normalize for output.
        for (double& h : out.metrics.pairs[i].min_h) {
            if (!std::isfinite(h)) h = 0.0;
        }
    }
    if (!out.metrics.degenerate_fault) {
        for (std::size_t i = 0; i < n_pairs; ++i) {
            try {
                chain.pairs[i] =
                    pair_state_from_global(chain.agents[i], chain.agents[i + 1], cfg.geometry);
            } catch (const DegenerateGeometry&) {
                out.metrics.degenerate_fault = true;
            }
        }
    }
    out.final_state = std::move(chain);
    return out;
}

bool run_flagged(const RunMetrics& m) {
    if (m.degenerate_fault) return true;
    for (const PairMetrics& pm : m.pairs) {
        if (pm.infeasible_qp_steps > 0) return true;
    }
    return false;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p);
    if (!f) throw IoError("cannot write '" + p.string() + "'");
    return f;
}

void write_pair_files(const RunResult& r, const std::filesystem::path& dir,
                      const std::string& prefix) {
    for (std::size_t i = 0; i < r.log.pairs.size(); ++i) {
        const std::string tag = "pair" + std::to_string(i + 1);

        std::ofstream traj = open_out(dir / (prefix + tag + ".csv"));
        traj << "t,L_true,alpha_true,phi_true,L_filt,phi_filt,h1,h2,h3,h4,"
                "v_nom,w_nom,v_safe,w_safe,status,visible\n";
        std::ofstream est = open_out(dir / (prefix + "estimates_" + tag + ".csv"));
        est << "t,phi_raw,phi_filtered,L_raw,L_filtered,visible\n";
        std::ofstream flt = open_out(dir / (prefix + "filter_" + tag + ".csv"));
        flt << "t,h1,h2,h3,h4,status,active_set,v_nom,w_nom,v_safe,w_safe\n";

        for (const StepRecord& rec : r.log.pairs[i].rows) {
            traj << fmt(rec.t) << ',' << fmt(rec.L_true) << ',' << fmt(rec.alpha_true) << ','
                 << fmt(rec.phi_true) << ',' << fmt_opt(rec.estimate.L_filtered) << ','
                 << fmt_opt(rec.estimate.phi_filtered) << ',' << fmt(rec.h_true[0]) << ','
                 << fmt(rec.h_true[1]) << ',' << fmt(rec.h_true[2]) << ','
                 << fmt(rec.h_true[3]) << ',' << fmt(rec.u_nom.v) << ','
                 << fmt(rec.u_nom.omega) << ',' << fmt(rec.u_safe.v) << ','
                 << fmt(rec.u_safe.omega) << ',' << to_string(rec.status) << ','
                 << (rec.estimate.visible ? 1 : 0) << '\n';

            est << fmt(rec.estimate.t) << ',' << fmt_opt(rec.estimate.phi_raw) << ','
                << fmt_opt(rec.estimate.phi_filtered) << ',' << fmt_opt(rec.estimate.L_raw)
                << ',' << fmt_opt(rec.estimate.L_filtered) << ','
                << (rec.estimate.visible ? 1 : 0) << '\n';

            if (rec.filter_ran) {
                std::string active;
                for (std::size_t a = 0; a < rec.active_set.size(); ++a) {
                    if (a) active += ';';
                    active += std::to_string(rec.active_set[a]);
                }
                flt << fmt(rec.t) << ',' << fmt(rec.h_filter[0]) << ',' << fmt(rec.h_filter[1])
                    << ',' << fmt(rec.h_filter[2]) << ',' << fmt(rec.h_filter[3]) << ','
                    << to_string(rec.status) << ',' << active << ',' << fmt(rec.u_nom.v) << ','
                    << fmt(rec.u_nom.omega) << ',' << fmt(rec.u_safe.v) << ','
                    << fmt(rec.u_safe.omega) << '\n';
            }
        }
    }
}

void append_pair_metrics(std::ostream& os, std::size_t pair_idx, const PairMetrics& pm) {
    const std::string p = std::to_string(pair_idx + 1);
    for (std::size_t c = 0; c < 4; ++c) {
        os << p << ",min_h" << (c + 1) << ',' << fmt(pm.min_h[c]) << '\n';
    }
    os << p << ",fov_violation_steps," << pm.fov_violation_steps << '\n';
    os << p << ",blind_steps," << pm.blind_steps << '\n';
    os << p << ",infeasible_qp_steps," << pm.infeasible_qp_steps << '\n';
    os << p << ",filter_active_steps," << pm.filter_active_steps << '\n';
    os << p << ",first_violation_step," << pm.first_violation_step << '\n';
    for (std::size_t s = 0; s < pm.stages.size(); ++s) {
        os << p << ",rmse_L_stage" << (s + 1) << ',' << fmt(pm.stages[s].rmse_L) << '\n';
        os << p << ",rmse_alpha_stage" << (s + 1) << ',' << fmt(pm.stages[s].rmse_alpha)
           << '\n';
    }
}

}  // namespace

void export_csv(const RunResult& result, const std::string& out_dir,
                const std::string& prefix) {
    const std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + out_dir + "'");

    write_pair_files(result, dir, prefix);

    std::ofstream metrics = open_out(dir / (prefix + "metrics.csv"));
    metrics << "pair,metric,value\n";
    metrics << "run,total_steps," << result.metrics.total_steps << '\n';
    metrics << "run,degenerate_fault," << (result.metrics.degenerate_fault ? 1 : 0) << '\n';
    for (std::size_t i = 0; i < result.metrics.pairs.size(); ++i) {
        append_pair_metrics(metrics, i, result.metrics.pairs[i]);
    }
}

CompareResult compare_scenarios(const ScenarioConfig& cfg) {
    CompareResult cmp;
    ScenarioConfig on = cfg;
    on.safety_filter_enabled = true;
    ScenarioConfig off = cfg;
    off.safety_filter_enabled = false;
    cmp.with_filter = run_scenario(on);
    cmp.without_filter = run_scenario(off);
    return cmp;
}

std::string export_compare_csv(const CompareResult& cmp, const std::string& out_dir) {
    export_csv(cmp.with_filter, out_dir, "on_");
    export_csv(cmp.without_filter, out_dir, "off_");

    const std::filesystem::path summary = std::filesystem::path(out_dir) / "compare_summary.csv";
    std::ofstream os = open_out(summary);
    os << "pair,metric,filter_on,filter_off\n";
    const std::size_t n = cmp.with_filter.metrics.pairs.size();
    for (std::size_t i = 0; i < n; ++i) {
        const PairMetrics& a = cmp.with_filter.metrics.pairs[i];
        const PairMetrics& b = cmp.without_filter.metrics.pairs[i];
        const std::string p = std::to_string(i + 1);
        for (std::size_t c = 0; c < 4; ++c) {
            os << p << ",min_h" << (c + 1) << ',' << fmt(a.min_h[c]) << ',' << fmt(b.min_h[c])
               << '\n';
        }
        os << p << ",fov_violation_steps," << a.fov_violation_steps << ','
           << b.fov_violation_steps << '\n';
        os << p << ",first_violation_step," << a.first_violation_step << ','
           << b.first_violation_step << '\n';
        os << p << ",blind_steps," << a.blind_steps << ',' << b.blind_steps << '\n';
        os << p << ",infeasible_qp_steps," << a.infeasible_qp_steps << ','
           << b.infeasible_qp_steps << '\n';
        os << p << ",filter_active_steps," << a.filter_active_steps << ','
           << b.filter_active_steps << '\n';
        for (std::size_t s = 0; s < a.stages.size(); ++s) {
            os << p << ",rmse_L_stage" << (s + 1) << ',' << fmt(a.stages[s].rmse_L) << ','
               << fmt(b.stages[s].rmse_L) << '\n';
            os << p << ",rmse_alpha_stage" << (s + 1) << ',' << fmt(a.stages[s].rmse_alpha)
               << ',' << fmt(b.stages[s].rmse_alpha) << '\n';
        }
    }
    return summary.string();
}

}  // namespace lfsim
