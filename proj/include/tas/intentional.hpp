#pragma once

#include <functional>
#include <vector>

#include "tas/geometry.hpp"

namespace tas {

/// Gains and goal data for cost-aware goal dynamics on a scalar goal
/// coordinate s with quadratic potential (s - s_star)^2 / 2.
struct IntentionalConfig {
    double mu_I = 1.0;    // goal gain, > 0
    double eta_P = 0.0;   // cost push-back gain, >= 0
    double s_star = 1.0;  // goal value
    MetricTensor g_C = MetricTensor::identity(2);
    MetricTensor g_I = MetricTensor::identity(1);
};

/// Push-forward operator M = dpsi g_C^{-1} dpsi^T g_I on the goal tangent
/// space. Symmetric positive definite for full-row-rank dpsi; the worked
/// dynamics use the scalar case k = 1.
Eigen::MatrixXd pushforward_operator(const JacobianMap& dpsi, const MetricTensor& g_C,
                                     const MetricTensor& g_I);

struct LocalCost {
    double value = 0.0;
    Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
};

/// Trace surrogate for the local lift cost of the shear projection:
/// tr((DPhi DPhi^T)^{-1}) = 2 + kappa^2 cos^2(c1), with analytic gradient
/// (-kappa^2 sin(2 c1), 0).
LocalCost local_cost(const Eigen::Vector2d& c, double kappa);

struct GoalSample {
    double t = 0.0;
    double s = 0.0;
};

/// RK4 integration of the scalar goal dynamics
///   ds/dt = -mu_I (s - s_star) / (4 s) + 2 eta_P kappa^2 c1 sin(2 c1)
/// driven by the cognitive path c(t). The 1/(4s) preconditioner is
/// singular at s = 0; trajectories must stay above s_min = 1e-6.
std::vector<GoalSample> integrate_goal(const IntentionalConfig& config,
                                       const std::function<Eigen::Vector2d(double)>& c_path,
                                       double kappa, double s0, double T, double dt);

}  // namespace tas
