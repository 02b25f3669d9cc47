#pragma once

#include "dscp/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dscp {

/**
 * World description for the carbon-aware scheduler: per-step traces plus the
 * optimizer's discount and horizon. One step is one hour; power is kW, so a
 * step's energy in kWh equals its kW figure.
 */
struct EnergyScenario {
    Eigen::VectorXd renewable_kw;
    Eigen::VectorXd load_kw;   // flexible work arriving per step
    Eigen::VectorXd price;
    double gamma = 0.95;       // per-step discount on future cost
    int window_n = 8;          // planning horizon n
    double carbon_intensity = 0.4;  // kg CO2 per brown kWh

    Eigen::Index size() const { return renewable_kw.size(); }
    double p_max() const { return price.size() ? price.maxCoeff() : 0.0; }
};

/** Grid draw when demand exceeds the renewable estimate: max(w_d + w_l - w_re, 0). */
double brown_energy(double w_d, double w_l, double w_re);

/** A window plan: in-window commitments plus the mass deferred past it. */
struct SchedulePlan {
    std::int64_t tau = 0;      // first step the plan covers
    Eigen::VectorXd alloc;     // alloc[k] commits to step tau+k
    double deferred = 0.0;
    double demand = 0.0;       // load estimates + incoming backlog

    double committed() const { return alloc.size() ? alloc.sum() : 0.0; }
};

/**
 * Discounted plan cost: sum_k brown(alloc_k, running_k, est_k) * price_{tau+k}
 * * gamma^k, plus the deferral penalty deferred * P_max * gamma^L for a plan
 * of L in-window steps. Throws InfeasiblePlan when commitments plus deferral
 * miss the plan's demand by more than 1e-9, ShapeMismatch on length
 * disagreements.
 */
double plan_cost(const SchedulePlan& plan, const EnergyScenario& sc,
                 const Eigen::VectorXd& renewable_est, const Eigen::VectorXd& running_load);

/** How far to trust interval forecasts: 0 is most conservative, 1 most aggressive. */
struct RiskPolicy {
    double lambda_risk = 0.25;
};

/** Bound-blended point estimates fed to the solver. */
struct EffectiveForecast {
    Eigen::VectorXd renewable;  // lower + lambda * (upper - lower)
    Eigen::VectorXd load;       // upper - lambda * (upper - lower)
};

/** Blends interval bounds per the risk policy and clamps at zero. */
EffectiveForecast effective_forecast(const IntervalSeries& renewable_iv, const IntervalSeries& load_iv,
                                     const RiskPolicy& policy);

/**
 * Greedy exact solver for one window: free renewable headroom first, then
 * the whole remainder to the cheapest discounted slot, deferring only when
 * the deferral penalty beats every in-window marginal price. Ties prefer the
 * earlier slot, and an in-window tie with deferral allocates. Linearity of
 * the objective makes this optimal.
 */
SchedulePlan solve_window(const EffectiveForecast& est, double backlog, const EnergyScenario& sc,
                          std::int64_t tau, const Eigen::VectorXd& running_load);

enum class ForecasterKind { perfect, none_cp, dscp };
enum class PackStrategy { first_fit, round_robin };

ForecasterKind forecaster_from_name(const std::string& name);
PackStrategy strategy_from_name(const std::string& name);

/** Simulation knobs beyond the scenario itself. */
struct SimConfig {
    ForecasterKind forecaster = ForecasterKind::dscp;
    PackStrategy strategy = PackStrategy::first_fit;
    double lambda_risk = 0.25;
    double alpha = 0.1;
    int task_duration = 1;     // steps a committed task keeps running
    int machines = 4;
    double machine_cap_kw = 100.0;
    int a = 48;                // forecaster input length
    int period = 24;           // seasonal_naive period for the trace predictors
    double theta = 0.05;
    int n_max = 6;
    double gamma_dtw = 1.0;
    std::uint64_t seed = 0;
};

struct SimStepLog {
    std::int64_t tau = 0;
    double committed = 0.0;
    double backlog = 0.0;      // after this step
    double phi_true = 0.0;     // realized brown power
    double emissions_cum = 0.0;
    Eigen::VectorXd machine_kw;
};

struct SimResult {
    double emissions_kg = 0.0;
    double total_arrived = 0.0;
    double total_executed = 0.0;
    double final_backlog = 0.0;
    std::int64_t sim_start = 0;  // first simulated step
    std::vector<SimStepLog> log;
};

/**
 * Rolling-horizon run over the last quarter of the scenario: the first half
 * trains the trace predictors, the next quarter calibrates them (dscp), and
 * each simulated step plans a fresh window, commits only its first step, then
 * realizes the truth. Backlog absorbs under-commitment; only work that
 * actually arrived can run. Totals satisfy
 * executed + final backlog = arrived.
 */
SimResult simulate(const EnergyScenario& sc, const SimConfig& cfg);

/** Bundled solar-like scenario: daylight renewable hump, evening load peak, flat tariff. */
EnergyScenario make_solar_scenario(int days, std::uint64_t seed);

EnergyScenario read_energy_csv(const std::string& path);
void write_energy_csv(const EnergyScenario& sc, const std::string& path);

std::string schedule_log_csv(const SimResult& result);
std::string emissions_json(const SimResult& result, const SimConfig& cfg);
void write_sim_outputs(const SimResult& result, const SimConfig& cfg, const std::string& out_dir);

}  // namespace dscp
