#include "tas/intentional.hpp"

#include <cmath>

namespace tas {

namespace {
constexpr double kGoalFloor = 1e-6;
}

Eigen::MatrixXd pushforward_operator(const JacobianMap& dpsi, const MetricTensor& g_C,
                                     const MetricTensor& g_I) {
    if (dpsi.cols() != g_C.dim() || dpsi.rows() != g_I.dim()) {
        throw BadParams("pushforward operator dimension mismatch");
    }
    const Eigen::MatrixXd& d = dpsi.entries();
    Eigen::MatrixXd m = d * g_C.solve(d.transpose()) * g_I.entries();
    if (m.rows() == 1 && m(0, 0) <= 0.0) {
        throw NotPositiveDefinite("pushforward operator is not positive");
    }
    return m;
}

LocalCost local_cost(const Eigen::Vector2d& c, double kappa) {
    const double cu = std::cos(c.x());
    LocalCost out;
    out.value = 2.0 + kappa * kappa * cu * cu;
    out.gradient = Eigen::Vector2d(-kappa * kappa * std::sin(2.0 * c.x()), 0.0);
    return out;
}

std::vector<GoalSample> integrate_goal(const IntentionalConfig& config,
                                       const std::function<Eigen::Vector2d(double)>& c_path,
                                       double kappa, double s0, double T, double dt) {
    if (config.mu_I <= 0.0) throw BadParams("mu_I must be positive");
    if (s0 <= kGoalFloor) {
        throw SingularGoalState("initial goal value " + std::to_string(s0) +
                                " at or below the floor " + std::to_string(kGoalFloor));
    }
    if (dt <= 0.0 || T <= 0.0) throw BadParams("T and dt must be positive");

    const int steps = static_cast<int>(std::lround(T / dt));
    const double h = T / steps;

    auto rate = [&](double s, double t) {
        const double c1 = c_path(t).x();
        const double pushback =
            2.0 * config.eta_P * kappa * kappa * c1 * std::sin(2.0 * c1);
        return -config.mu_I * (s - config.s_star) / (4.0 * s) + pushback;
    };

    std::vector<GoalSample> out;
    out.reserve(steps + 1);
    double s = s0;
    out.push_back({0.0, s});
    for (int i = 0; i < steps; ++i) {
        const double t = i * h;
        const double k1 = rate(s, t);
        const double k2 = rate(s + 0.5 * h * k1, t + 0.5 * h);
        const double k3 = rate(s + 0.5 * h * k2, t + 0.5 * h);
        const double k4 = rate(s + h * k3, t + h);
        s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(s) || s <= kGoalFloor) {
            throw SingularGoalState("goal state hit the floor at t = " + std::to_string(t + h));
        }
        out.push_back({(i + 1) * h, s});
    }
    return out;
}

}  // namespace tas
