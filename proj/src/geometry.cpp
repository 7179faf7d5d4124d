#include "tas/geometry.hpp"

#include <cmath>

namespace tas {

namespace {
constexpr double kRankThreshold = 1e-10;        // sigma_min / sigma_max cutoff
constexpr double kConditionLimit = 1e12;        // geometric lift invertibility
constexpr double kSymmetryTolerance = 1e-12;
}  // namespace

// ---------------------------------------------------------------------------
// MetricTensor

MetricTensor::MetricTensor(Eigen::MatrixXd entries) : g_(std::move(entries)) {
    if (g_.rows() != g_.cols()) {
        throw NotPositiveDefinite("metric must be square, got " +
                                  std::to_string(g_.rows()) + "x" +
                                  std::to_string(g_.cols()));
    }
    if (g_.size() > 0) {
        const double scale = std::max(1.0, g_.cwiseAbs().maxCoeff());
        const double asym = (g_ - g_.transpose()).cwiseAbs().maxCoeff();
        if (asym > kSymmetryTolerance * scale) {
            throw NotPositiveDefinite("metric is not symmetric (max asymmetry " +
                                      std::to_string(asym) + ")");
        }
        llt_.compute(g_);
        if (llt_.info() != Eigen::Success) {
            throw NotPositiveDefinite("Cholesky factorization failed");
        }
    }
}

MetricTensor MetricTensor::identity(int dim) {
    return MetricTensor(Eigen::MatrixXd::Identity(dim, dim));
}

MetricTensor MetricTensor::block_diagonal(const MetricTensor& g, const MetricTensor& h,
                                          double weight) {
    const int p = g.dim();
    const int q = h.dim();
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p + q, p + q);
    w.topLeftCorner(p, p) = g.entries();
    w.bottomRightCorner(q, q) = weight * h.entries();
    return MetricTensor(std::move(w));
}

// ---------------------------------------------------------------------------
// JacobianMap

JacobianMap::JacobianMap(Eigen::MatrixXd entries) : j_(std::move(entries)) {
    if (j_.rows() <= 0 || j_.cols() <= 0 || j_.rows() > j_.cols()) {
        throw RankDeficient("jacobian must be n x m with 1 <= n <= m, got " +
                            std::to_string(j_.rows()) + "x" + std::to_string(j_.cols()));
    }
    if (!j_.allFinite()) {
        throw NonFinite("jacobian has non-finite entries");
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(j_);
    sigma_max_ = svd.singularValues()(0);
    sigma_min_ = svd.singularValues()(j_.rows() - 1);
    if (sigma_min_ <= kRankThreshold * sigma_max_ || sigma_max_ == 0.0) {
        throw RankDeficient("smallest singular value " + std::to_string(sigma_min_) +
                            " below threshold relative to " + std::to_string(sigma_max_));
    }
}

Eigen::MatrixXd JacobianMap::kernel_basis() const {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(j_, Eigen::ComputeFullV);
    return svd.matrixV().rightCols(cols() - rows());
}

// ---------------------------------------------------------------------------
// Lifts

Eigen::VectorXd weighted_least_norm(const Eigen::MatrixXd& a, const MetricTensor& w,
                                    const Eigen::VectorXd& b) {
    const Eigen::MatrixXd wa = w.solve(a.transpose());  // W^{-1} A^T
    const Eigen::MatrixXd moment = a * wa;              // A W^{-1} A^T, SPD

    Eigen::LLT<Eigen::MatrixXd> llt(moment);
    if (llt.info() != Eigen::Success) {
        throw RankDeficient("moment matrix A W^{-1} A^T is not positive definite");
    }
    return wa * llt.solve(b);
}

LiftResult metric_lift(const JacobianMap& jac, const MetricTensor& g,
                       const Eigen::VectorXd& dc) {
    if (dc.size() != jac.rows()) {
        throw BadParams("cognitive velocity has size " + std::to_string(dc.size()) +
                        ", expected " + std::to_string(jac.rows()));
    }
    if (!dc.allFinite()) {
        throw NonFinite("cognitive velocity has non-finite entries");
    }

    LiftResult out;
    out.velocity = weighted_least_norm(jac.entries(), g, dc);
    out.horizontal_part = out.velocity;
    out.vertical_part = Eigen::VectorXd::Zero(jac.cols());
    out.instantaneous_power = g.squared_norm(out.velocity);
    return out;
}

LiftResult geometric_lift(const JacobianMap& jac, const Eigen::VectorXd& dc) {
    if (jac.rows() != jac.cols()) {
        throw BadParams("geometric lift needs a square jacobian, got " +
                        std::to_string(jac.rows()) + "x" + std::to_string(jac.cols()));
    }
    if (jac.condition() >= kConditionLimit) {
        throw Singular("jacobian condition number " + std::to_string(jac.condition()) +
                       " exceeds limit");
    }
    LiftResult out;
    out.velocity = jac.entries().partialPivLu().solve(dc);
    out.horizontal_part = out.velocity;
    out.vertical_part = Eigen::VectorXd::Zero(jac.cols());
    out.instantaneous_power = out.velocity.squaredNorm();
    return out;
}

LiftResult decompose(const JacobianMap& jac, const MetricTensor& g,
                     const Eigen::VectorXd& du) {
    if (du.size() != jac.cols()) {
        throw BadParams("velocity has size " + std::to_string(du.size()) +
                        ", expected " + std::to_string(jac.cols()));
    }
    const LiftResult horizontal = metric_lift(jac, g, jac.entries() * du);
    LiftResult out;
    out.velocity = du;
    out.horizontal_part = horizontal.velocity;
    out.vertical_part = du - horizontal.velocity;
    out.instantaneous_power = g.squared_norm(du);
    return out;
}

// ---------------------------------------------------------------------------
// Energy quadrature

double path_energy(std::span<const VelocitySample> samples, const MetricTensor& g,
                   Quadrature rule) {
    if (samples.empty()) return 0.0;

    std::vector<double> power(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        power[i] = g.squared_norm(samples[i].velocity);
    }

    double energy = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double dt = samples[i].dt;
        if (dt <= 0.0) continue;
        if (rule == Quadrature::LeftRiemann || i + 1 == samples.size()) {
            energy += power[i] * dt;
        } else {
            energy += 0.5 * (power[i] + power[i + 1]) * dt;
        }
    }
    return energy;
}

double quadrature(std::span<const double> node_values, double dt, Quadrature rule) {
    if (node_values.size() < 2 || dt <= 0.0) return 0.0;
    double sum = 0.0;
    if (rule == Quadrature::LeftRiemann) {
        for (std::size_t i = 0; i + 1 < node_values.size(); ++i) sum += node_values[i];
    } else {
        sum = 0.5 * (node_values.front() + node_values.back());
        for (std::size_t i = 1; i + 1 < node_values.size(); ++i) sum += node_values[i];
    }
    return sum * dt;
}

}  // namespace tas
