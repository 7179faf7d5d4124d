#pragma once

#include <array>
#include <vector>

#include "tas/rtas.hpp"
#include "tas/trajectory.hpp"

namespace tas {

/// Two reflective agents with shear-projection perception, coupled through
/// each other's model state. Agent i's effective target is
///   dc_i - kappa * m_j * (0, cos u_i^1),
/// optionally only for agent 1 (information asymmetry).

struct AgentState {
    Eigen::Vector2d u = Eigen::Vector2d::Zero();
    double m = 0.0;
};

struct CouplingConfig {
    double kappa = 0.0;
    bool info_asymmetry = false;
};

/// The fixed perceptual distortion field g(u) = (0, cos u^1).
Eigen::Vector2d perceptual_field(const Eigen::Vector2d& u);

/// One coupled instant: effective targets from the partner's model state,
/// then independent per-agent reflective lifts.
std::array<ReflectiveLiftResult, 2> coupled_step(const std::array<AgentState, 2>& states,
                                                 const std::array<Eigen::Vector2d, 2>& raw_targets,
                                                 const std::array<double, 2>& lambda,
                                                 const CouplingConfig& coupling);

enum class TaskKind { Formation, PursuitEvasion, CircleDiag };

struct TwoAgentConfig {
    TaskKind task = TaskKind::CircleDiag;
    double T = 2.0 * EIGEN_PI;
    double dt = 2.0 * EIGEN_PI / 400.0;
    std::array<double, 2> lambda = {1.0, 1.0};
    CouplingConfig coupling;
    std::array<AgentState, 2> init = {AgentState{{1.0, 0.0}, 0.0},
                                      AgentState{{1.0, 0.0}, 0.0}};
    double divergence_threshold = 1e6;
    Quadrature rule = Quadrature::Trapezoid;

    // task constants
    double circle_radius = 1.0;
    double figure8_a = 1.0;
    double figure8_b = 0.5;
    Eigen::Vector2d formation_offset = {0.0, 0.25};  // +/- for the two agents
    double pursuit_speed = 1.0;
    double evader_speed = 1.0;
    double evader_wobble = 0.2;

    /// Default initial placement for the chosen task (on-reference starts).
    static TwoAgentConfig for_task(TaskKind task);
};

struct TwoAgentResult {
    std::vector<double> times;
    std::array<std::vector<Eigen::Vector2d>, 2> u;
    std::array<std::vector<double>, 2> m;
    std::array<EnergyLedger, 2> ledger;
    double total_energy = 0.0;
    double decomposition_residual = 0.0;  // total - (phys + sum lambda_i model_i)
    std::array<double, 2> model_activity = {0.0, 0.0};  // int mdot^2 dt, unweighted
    std::array<double, 2> holonomy_proxy = {0.0, 0.0};  // int cos(u^1) m dt
    std::array<double, 2> max_abs_m = {0.0, 0.0};
    double model_divergence = 0.0;  // mean |m1 - m2|
    double stability = 0.0;         // mean over agents of Var(m_i)
    double synchrony = 0.0;         // Pearson corr(m1, m2)
    double formation_error = 0.0;   // mean projected distance to reference
    std::vector<double> distance;   // inter-agent physical distance
    double distance_trend = 0.0;    // least-squares slope of distance vs t
    bool diverged = false;
};

TwoAgentResult run_two_agent(const TwoAgentConfig& config);

struct ScanCell {
    double lambda1 = 0.0, lambda2 = 0.0;
    double total_energy = 0.0;
    double physical_energy = 0.0;
    std::array<double, 2> model_energy = {0.0, 0.0};
    double model_divergence = 0.0;
    double stability = 0.0;
    double synchrony = 0.0;
    std::array<double, 2> holonomy_proxy = {0.0, 0.0};
    bool diverged = false;
    bool nash_like = false;  // strict 3x3 local minimum of total energy
};

struct ScanResult {
    std::vector<double> lambda1_grid, lambda2_grid;
    std::vector<ScanCell> cells;  // row-major over (lambda1, lambda2)

    const ScanCell& at(std::size_t i, std::size_t j) const {
        return cells[i * lambda2_grid.size() + j];
    }
};

/// Full grid of coupled runs at fixed coupling. Cells run in parallel
/// (capped by TAS_THREADS) and are written by index, so results are
/// deterministic regardless of scheduling.
ScanResult lambda_grid_scan(const std::vector<double>& lambda1_grid,
                            const std::vector<double>& lambda2_grid, double kappa,
                            const TwoAgentConfig& base);

struct KappaScanPoint {
    double kappa = 0.0;
    double lambda1_star = 0.0, lambda2_star = 0.0;
    double e_min = 0.0, e_max = 0.0;
    double decomposition_residual = 0.0;
    bool any_diverged = false;
};

struct KappaScanResult {
    std::vector<KappaScanPoint> points;
    std::vector<double> jump_metric;  // between consecutive kappa points
    double kappa_c = 0.0;
    int jump_index = -1;  // index into jump_metric
    bool jump_found = false;
};

/// For each coupling value, minimize total energy over the lambda grid and
/// track how the argmin moves in log space; the dominant jump marks the
/// critical coupling. jump_found is false when no jump exceeds twice the
/// median jump.
KappaScanResult kappa_transition_scan(const std::vector<double>& kappa_grid,
                                      const std::vector<double>& lambda_grid,
                                      const TwoAgentConfig& base);

/// Log-spaced grid helper, inclusive of both endpoints.
std::vector<double> log_grid(double lo, double hi, int points);

/// Uniform grid helper, inclusive of both endpoints.
std::vector<double> linear_grid(double lo, double hi, int points);

}  // namespace tas
