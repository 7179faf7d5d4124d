#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tas/geometry.hpp"

#include <nlohmann/json_fwd.hpp>

namespace tas {

enum class LoopKind { Circle, OffCenterCircle, Figure8, CustomSamples, CustomAnalytic };

/// Parametrized closed curve in the 2-D cognitive plane with analytic
/// position/velocity and a signed-area oracle. Circles may wind several
/// times; the area oracle counts multiplicity. Custom-sample loops are
/// closed polylines (linear interpolation, shoelace area).
class LoopSpec {
public:
    static LoopSpec circle(double radius, double period,
                           const Eigen::Vector2d& center = Eigen::Vector2d::Zero(),
                           bool clockwise = false, int winding = 1);
    static LoopSpec figure8(double a, double b, double period,
                            const Eigen::Vector2d& center = Eigen::Vector2d::Zero());
    static LoopSpec from_samples(std::vector<double> times,
                                 std::vector<Eigen::Vector2d> points);
    /// Closed curve given by explicit callables plus a signed-area oracle.
    static LoopSpec analytic(std::function<Eigen::Vector2d(double)> position,
                             std::function<Eigen::Vector2d(double)> velocity, double period,
                             double signed_area);

    Eigen::Vector2d position(double t) const;
    Eigen::Vector2d velocity(double t) const;

    LoopKind kind() const { return kind_; }
    double period() const { return period_; }
    double radius() const { return radius_; }
    const Eigen::Vector2d& center() const { return center_; }
    int winding() const { return winding_; }
    bool clockwise() const { return clockwise_; }

    /// Signed enclosed area, positive for counterclockwise traversal.
    double signed_area() const;

    bool is_origin_centered_circle(double tol = 1e-12) const;

    /// Same geometric loop traversed in the opposite direction.
    LoopSpec reversed() const;

private:
    LoopSpec() = default;

    LoopKind kind_ = LoopKind::Circle;
    Eigen::Vector2d center_ = Eigen::Vector2d::Zero();
    double radius_ = 1.0;
    double a_ = 1.0, b_ = 0.5;  // figure-8 semi-axes
    double period_ = 2.0 * EIGEN_PI;
    bool clockwise_ = false;
    int winding_ = 1;
    std::vector<double> sample_times_;
    std::vector<Eigen::Vector2d> sample_points_;
    std::function<Eigen::Vector2d(double)> position_fn_;
    std::function<Eigen::Vector2d(double)> velocity_fn_;
    double analytic_area_ = 0.0;
};

/// String-keyed loop factory used by the CLI. Throws BadParams for unknown
/// kinds or invalid numbers.
LoopSpec make_loop(const std::string& kind, const std::map<std::string, double>& params);

/// Named slice of the state vector. Model-role blocks are weighted by
/// lambda in the total energy; physical blocks enter unweighted.
struct CoordinateBlock {
    enum class Role { Physical, Model };
    std::string name;
    int offset = 0;
    int size = 0;
    Role role = Role::Physical;
};

struct IntegrateOptions {
    Quadrature rule = Quadrature::Trapezoid;
    double lambda = 1.0;
    double divergence_threshold = 1e6;
    std::vector<CoordinateBlock> blocks;  // default: one physical block "state"
};

/// Sampled lifted trajectory with per-block closure bookkeeping and an
/// energy ledger.
struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    std::vector<Eigen::VectorXd> velocities;  // policy value at each node
    std::vector<CoordinateBlock> blocks;
    EnergyLedger ledger;
    std::map<std::string, double> closure_gap;          // |x_block(T) - x_block(0)|
    std::map<std::string, Eigen::VectorXd> displacement;  // signed x_block(T) - x_block(0)
    bool diverged = false;
    double dt = 0.0;

    /// Energy of one block with the record's quadrature rule.
    double block_energy(const std::string& name) const;

    void write_csv(std::ostream& os) const;
    nlohmann::json summary_json() const;

    Quadrature rule = Quadrature::Trapezoid;
};

/// Velocity field driven by a cognitive curve: state x (c, dc) -> dstate.
using LiftPolicy = std::function<Eigen::VectorXd(
    const Eigen::VectorXd& state, const Eigen::Vector2d& c, const Eigen::Vector2d& dc)>;

/// Classic fourth-order Runge-Kutta step for a generic time-dependent field.
Eigen::VectorXd rk4_step(const std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>& f,
                         const Eigen::VectorXd& x, double t, double dt);

/// Fixed-step RK4 integration of a lift policy along a closed cognitive
/// loop. The step count is round(T/dt) and the actual step is T/N so the
/// final node lands exactly on T. Non-finite or out-of-range states stop
/// the integration and flag the partial record as diverged.
TrajectoryRecord integrate(const LiftPolicy& policy, const Eigen::VectorXd& x0,
                           const LoopSpec& loop, double dt,
                           const IntegrateOptions& options = {});

}  // namespace tas
