#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tas/geometry.hpp"
#include "tas/trajectory.hpp"

namespace tas {

/// Family of projections indexed by a model state, with both partial
/// differentials evaluated at a point: jac_p = D_p Phi_m, jac_m = d_m Phi_m.
struct ReflectiveProjection {
    std::function<Eigen::VectorXd(const Eigen::VectorXd& p, const Eigen::VectorXd& m)> phi;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd& p, const Eigen::VectorXd& m)> jac_p;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd& p, const Eigen::VectorXd& m)> jac_m;
};

struct ReflectiveLiftResult {
    Eigen::VectorXd u_dot;
    Eigen::VectorXd m_dot;
    double physical_power = 0.0;       // |u_dot|_G^2
    double model_power = 0.0;          // |m_dot|_H^2, unweighted
    double constraint_residual = 0.0;  // |jac_p u_dot + jac_m m_dot - dc|
};

/// Minimum of |u_dot|_G^2 + lambda |m_dot|_H^2 subject to
/// jac_p u_dot + jac_m m_dot = dc: the least-norm solve of the stacked
/// system [jac_p jac_m] under the block weight diag(G, lambda H).
/// jac_m may have zero columns, in which case the plain metric lift is
/// recovered exactly.
ReflectiveLiftResult reflective_lift(const Eigen::MatrixXd& jac_p,
                                     const Eigen::MatrixXd& jac_m, const MetricTensor& g,
                                     const MetricTensor& h, double lambda,
                                     const Eigen::VectorXd& dc);

ReflectiveLiftResult reflective_lift(const ReflectiveProjection& proj,
                                     const Eigen::VectorXd& p, const Eigen::VectorXd& m,
                                     const MetricTensor& g, const MetricTensor& h,
                                     double lambda, const Eigen::VectorXd& dc);

/// Shear projection with a learnable shear magnitude:
/// Phi_m(u, v) = (u, v + m sin u). Model motion can absorb part of the
/// requested cognitive velocity through the sin(u) column.
struct ProjectiveChannel {
    double m0 = 0.0;

    ReflectiveProjection projection() const;

    /// Closed-form split used as a test oracle:
    /// u_dot = dc1, (v_dot, m_dot) = (lambda, sin u) w / (lambda + sin^2 u)
    /// with w = dc2 - m cos(u) dc1.
    static Eigen::Vector3d analytic_split(double u, double m, const Eigen::Vector2d& dc,
                                          double lambda);
};

/// Planar fibration whose connection strength is modulated by the model
/// state: fibre rate alpha(m) (x dy - y dx), with an optional coupling
/// gamma that lets model motion trade against fibre motion inside the
/// horizontality constraint. gamma = 0 freezes the model.
struct ConnectionChannel {
    std::function<double(double)> alpha = [](double) { return 0.3; };
    double gamma = 0.0;
    double m0 = 0.0;
};

struct ReflectiveRunResult {
    TrajectoryRecord record;
    double lambda = 1.0;
    double delta_m = 0.0;
    double delta_z = 0.0;          // connection channel fibre displacement
    double visible_closure = 0.0;  // base-plane closure gap
    double physical_energy = 0.0;  // unweighted
    double model_energy = 0.0;     // unweighted
    double total_cost = 0.0;       // physical + lambda * model
    double e_tas = 0.0;            // same-grid quadrature of |dc|^2
    double max_abs_m = 0.0;
    double max_constraint_residual = 0.0;
};

ReflectiveRunResult run_reflective_loop(const ProjectiveChannel& channel, const LoopSpec& loop,
                                        double lambda, double dt,
                                        Quadrature rule = Quadrature::Trapezoid);
ReflectiveRunResult run_reflective_loop(const ConnectionChannel& channel, const LoopSpec& loop,
                                        double lambda, double dt,
                                        Quadrature rule = Quadrature::Trapezoid);

struct BlockHolonomyRow {
    double area = 0.0;
    double physical_displacement = 0.0;  // visible-gap (projective) or fibre z
    double model_displacement = 0.0;
};

/// Least-squares slopes of the per-loop displacements against enclosed
/// area, over a family of loops. A channel counts as active when its
/// slope magnitude exceeds 5% of the largest slope magnitude.
struct BlockHolonomySummary {
    std::vector<BlockHolonomyRow> rows;
    double physical_slope = 0.0;
    double model_slope = 0.0;
    bool physical_active = false;
    bool model_active = false;
};

template <typename Channel>
BlockHolonomySummary block_holonomy(const Channel& channel, std::span<const LoopSpec> loops,
                                    double lambda, double dt);

/// One feasible trajectory reduced to its affine cost data: cost(lambda) =
/// physical_cost + lambda * model_cost.
struct LiftCandidate {
    double physical_cost = 0.0;
    double model_cost = 0.0;
    double max_constraint_residual = 0.0;
    std::string label;

    double cost_at(double lambda) const { return physical_cost + lambda * model_cost; }
};

LiftCandidate candidate_from_run(const ReflectiveRunResult& run, std::string label = {});

/// Pointwise minimum of the candidates' affine costs over the lambda grid.
/// Candidates with constraint residual above 1e-8 are rejected.
std::vector<double> value_envelope(std::span<const LiftCandidate> candidates,
                                   std::span<const double> lambda_grid);

struct EnvelopeDiagnostics {
    double monotonicity_violation = 0.0;  // max increase-breaking defect
    double concavity_violation = 0.0;     // max slope increase between segments
};

EnvelopeDiagnostics check_envelope(std::span<const double> envelope,
                                   std::span<const double> lambda_grid);

}  // namespace tas
