#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tas/errors.hpp"

namespace tas {

enum class Quadrature { Trapezoid, LeftRiemann };

/// Symmetric positive definite metric on a tangent space. Factorized once
/// (Cholesky) so repeated solves and norms are cheap; the factorization
/// doubles as the positive-definiteness check.
class MetricTensor {
public:
    explicit MetricTensor(Eigen::MatrixXd entries);

    static MetricTensor identity(int dim);
    /// Block metric diag(G, weight * H). Either block may have dimension 0.
    static MetricTensor block_diagonal(const MetricTensor& g, const MetricTensor& h,
                                       double weight);

    int dim() const { return static_cast<int>(g_.rows()); }
    const Eigen::MatrixXd& entries() const { return g_; }

    Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return g_ * v; }

    /// G^{-1} * rhs through the stored Cholesky factor.
    template <typename Derived>
    auto solve(const Eigen::MatrixBase<Derived>& rhs) const {
        return llt_.solve(rhs).eval();
    }

    double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
        return a.dot(g_ * b);
    }
    double squared_norm(const Eigen::VectorXd& v) const { return inner(v, v); }

private:
    Eigen::MatrixXd g_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Differential of a projection map at a point: n x m with full row rank
/// (n <= m). Rank is checked at construction via singular values with
/// threshold 1e-10 * sigma_max.
class JacobianMap {
public:
    explicit JacobianMap(Eigen::MatrixXd entries);

    int rows() const { return static_cast<int>(j_.rows()); }
    int cols() const { return static_cast<int>(j_.cols()); }
    const Eigen::MatrixXd& entries() const { return j_; }

    double sigma_min() const { return sigma_min_; }
    double sigma_max() const { return sigma_max_; }
    double condition() const { return sigma_max_ / sigma_min_; }

    /// Orthonormal basis of ker(J), m x (m - n). Computed on demand.
    Eigen::MatrixXd kernel_basis() const;

private:
    Eigen::MatrixXd j_;
    double sigma_min_ = 0.0;
    double sigma_max_ = 0.0;
};

/// Velocity split into a horizontal part (metric-lift image) and a vertical
/// part (kernel of the projection). velocity == horizontal_part +
/// vertical_part holds by construction.
struct LiftResult {
    Eigen::VectorXd velocity;
    Eigen::VectorXd horizontal_part;
    Eigen::VectorXd vertical_part;
    double instantaneous_power = 0.0;  // squared G-norm of velocity
};

/// Accumulated trajectory cost. `total` is always physical + lambda * model.
struct EnergyLedger {
    double physical_energy = 0.0;
    double model_energy = 0.0;
    double lambda = 1.0;
    double total = 0.0;

    static EnergyLedger make(double physical, double model, double lambda) {
        return {physical, model, lambda, physical + lambda * model};
    }
};

/// W-least-norm solution of A y = b: W^{-1} A^T (A W^{-1} A^T)^{-1} b.
/// The Cholesky factorization of the moment matrix doubles as the rank
/// check; failure raises RankDeficient.
Eigen::VectorXd weighted_least_norm(const Eigen::MatrixXd& a, const MetricTensor& w,
                                    const Eigen::VectorXd& b);

/// Minimum-G-norm solution of jac * du = dc (weighted pseudoinverse,
/// G^{-1} J^T (J G^{-1} J^T)^{-1} dc), solved through a Cholesky
/// factorization of the moment matrix J G^{-1} J^T.
LiftResult metric_lift(const JacobianMap& jac, const MetricTensor& g,
                       const Eigen::VectorXd& dc);

/// Unique lift for an invertible square jacobian: du = jac^{-1} dc.
/// Throws Singular when the condition number exceeds 1e12.
LiftResult geometric_lift(const JacobianMap& jac, const Eigen::VectorXd& dc);

/// G-orthogonal split of an arbitrary velocity du into horizontal part
/// (the metric lift of jac * du) and vertical remainder.
LiftResult decompose(const JacobianMap& jac, const MetricTensor& g,
                     const Eigen::VectorXd& du);

/// One sampled velocity plus the duration of the interval that starts at
/// this sample. The final sample of a path may carry dt = 0; its velocity
/// then only serves as the right endpoint of the trapezoid rule.
struct VelocitySample {
    Eigen::VectorXd velocity;
    double dt = 0.0;
};

/// Integrated squared G-norm of the sampled velocities. Empty input gives 0.
double path_energy(std::span<const VelocitySample> samples, const MetricTensor& g,
                   Quadrature rule = Quadrature::Trapezoid);

/// Quadrature of an already-evaluated scalar power series over a uniform
/// grid with spacing dt (values at the N+1 grid nodes of N steps).
double quadrature(std::span<const double> node_values, double dt, Quadrature rule);

}  // namespace tas
