#include "tas/rtas.hpp"

#include <cmath>

namespace tas {

namespace {

// Least-squares slope of y against x.
double fit_slope(const std::vector<BlockHolonomyRow>& rows, double BlockHolonomyRow::*field) {
    const double n = static_cast<double>(rows.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& row : rows) {
        sx += row.area;
        sy += row.*field;
        sxx += row.area * row.area;
        sxy += row.area * (row.*field);
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

ReflectiveLiftResult reflective_lift(const Eigen::MatrixXd& jac_p,
                                     const Eigen::MatrixXd& jac_m, const MetricTensor& g,
                                     const MetricTensor& h, double lambda,
                                     const Eigen::VectorXd& dc) {
    if (lambda <= 0.0) {
        throw NonPositiveLambda("lambda = " + std::to_string(lambda));
    }
    if (jac_p.rows() != jac_m.rows() || jac_p.rows() != dc.size()) {
        throw BadParams("reflective lift row mismatch");
    }
    const int mp = static_cast<int>(jac_p.cols());
    const int mm = static_cast<int>(jac_m.cols());

    Eigen::MatrixXd stacked(jac_p.rows(), mp + mm);
    stacked << jac_p, jac_m;
    const MetricTensor weight = MetricTensor::block_diagonal(g, h, lambda);

    const Eigen::VectorXd y = weighted_least_norm(stacked, weight, dc);

    ReflectiveLiftResult out;
    out.u_dot = y.head(mp);
    out.m_dot = y.tail(mm);
    out.physical_power = g.squared_norm(out.u_dot);
    out.model_power = mm > 0 ? h.squared_norm(out.m_dot) : 0.0;
    out.constraint_residual = (jac_p * out.u_dot + jac_m * out.m_dot - dc).norm();
    return out;
}

ReflectiveLiftResult reflective_lift(const ReflectiveProjection& proj,
                                     const Eigen::VectorXd& p, const Eigen::VectorXd& m,
                                     const MetricTensor& g, const MetricTensor& h,
                                     double lambda, const Eigen::VectorXd& dc) {
    return reflective_lift(proj.jac_p(p, m), proj.jac_m(p, m), g, h, lambda, dc);
}

// ---------------------------------------------------------------------------
// Projective channel

ReflectiveProjection ProjectiveChannel::projection() const {
    ReflectiveProjection proj;
    proj.phi = [](const Eigen::VectorXd& p, const Eigen::VectorXd& m) -> Eigen::VectorXd {
        return Eigen::Vector2d(p(0), p(1) + m(0) * std::sin(p(0)));
    };
    proj.jac_p = [](const Eigen::VectorXd& p, const Eigen::VectorXd& m) {
        Eigen::MatrixXd j(2, 2);
        j << 1.0, 0.0, m(0) * std::cos(p(0)), 1.0;
        return j;
    };
    proj.jac_m = [](const Eigen::VectorXd& p, const Eigen::VectorXd&) {
        Eigen::MatrixXd b(2, 1);
        b << 0.0, std::sin(p(0));
        return b;
    };
    return proj;
}

Eigen::Vector3d ProjectiveChannel::analytic_split(double u, double m,
                                                  const Eigen::Vector2d& dc, double lambda) {
    const double s = std::sin(u);
    const double w = dc.y() - m * std::cos(u) * dc.x();
    const double denom = lambda + s * s;
    return {dc.x(), lambda * w / denom, s * w / denom};
}

ReflectiveRunResult run_reflective_loop(const ProjectiveChannel& channel, const LoopSpec& loop,
                                        double lambda, double dt, Quadrature rule) {
    const ReflectiveProjection proj = channel.projection();
    const MetricTensor g2 = MetricTensor::identity(2);
    const MetricTensor h1 = MetricTensor::identity(1);

    double worst_residual = 0.0;
    LiftPolicy policy = [&, proj](const Eigen::VectorXd& state, const Eigen::Vector2d&,
                                  const Eigen::Vector2d& dc) -> Eigen::VectorXd {
        const ReflectiveLiftResult lift =
            reflective_lift(proj, state.head<2>(), state.tail<1>(), g2, h1, lambda, dc);
        worst_residual = std::max(worst_residual, lift.constraint_residual);
        Eigen::Vector3d v;
        v << lift.u_dot, lift.m_dot;
        return v;
    };

    IntegrateOptions opt;
    opt.rule = rule;
    opt.lambda = lambda;
    opt.blocks = {{"visible", 0, 2, CoordinateBlock::Role::Physical},
                  {"model", 2, 1, CoordinateBlock::Role::Model}};

    // The model starts at m0; with m = m0 = 0 the projection is the
    // identity, so the physical start is the loop start itself.
    Eigen::Vector3d x0;
    const Eigen::Vector2d c0 = loop.position(0.0);
    x0 << c0.x(), c0.y() - channel.m0 * std::sin(c0.x()), channel.m0;

    ReflectiveRunResult out;
    out.record = integrate(policy, x0, loop, dt, opt);
    out.lambda = lambda;
    out.delta_m = out.record.displacement.at("model")(0);
    out.visible_closure = out.record.closure_gap.at("visible");
    out.physical_energy = out.record.ledger.physical_energy;
    out.model_energy = out.record.ledger.model_energy;
    out.total_cost = out.record.ledger.total;
    out.max_constraint_residual = worst_residual;

    std::vector<double> base_power(out.record.times.size());
    for (std::size_t i = 0; i < out.record.times.size(); ++i) {
        base_power[i] = loop.velocity(out.record.times[i]).squaredNorm();
        out.max_abs_m = std::max(out.max_abs_m, std::abs(out.record.states[i](2)));
    }
    out.e_tas = quadrature(base_power, out.record.dt, rule);
    return out;
}

// ---------------------------------------------------------------------------
// Connection channel

ReflectiveRunResult run_reflective_loop(const ConnectionChannel& channel, const LoopSpec& loop,
                                        double lambda, double dt, Quadrature rule) {
    const MetricTensor g3 = MetricTensor::identity(3);
    const MetricTensor h1 = MetricTensor::identity(1);

    double worst_residual = 0.0;
    // Stacked constraints on (x, y, z, m): the base tracks dc and the
    // horizontality row couples fibre and model motion,
    //   zdot - alpha(m)(x ydot - y xdot) + gamma mdot = 0.
    LiftPolicy policy = [&](const Eigen::VectorXd& state, const Eigen::Vector2d&,
                            const Eigen::Vector2d& dc) -> Eigen::VectorXd {
        const double x = state(0), y = state(1), m = state(3);
        const double a = channel.alpha(m);
        Eigen::MatrixXd jac_p(3, 3);
        jac_p << 1.0, 0.0, 0.0,
                 0.0, 1.0, 0.0,
                 a * y, -a * x, 1.0;
        Eigen::MatrixXd jac_m(3, 1);
        jac_m << 0.0, 0.0, channel.gamma;
        Eigen::Vector3d rhs(dc.x(), dc.y(), 0.0);

        const ReflectiveLiftResult lift = reflective_lift(jac_p, jac_m, g3, h1, lambda, rhs);
        worst_residual = std::max(worst_residual, lift.constraint_residual);
        Eigen::Vector4d v;
        v << lift.u_dot, lift.m_dot;
        return v;
    };

    IntegrateOptions opt;
    opt.rule = rule;
    opt.lambda = lambda;
    opt.blocks = {{"base", 0, 2, CoordinateBlock::Role::Physical},
                  {"fibre", 2, 1, CoordinateBlock::Role::Physical},
                  {"model", 3, 1, CoordinateBlock::Role::Model}};

    Eigen::Vector4d x0;
    x0 << loop.position(0.0), 0.0, channel.m0;

    ReflectiveRunResult out;
    out.record = integrate(policy, x0, loop, dt, opt);
    out.lambda = lambda;
    out.delta_m = out.record.displacement.at("model")(0);
    out.delta_z = out.record.displacement.at("fibre")(0);
    out.visible_closure = out.record.closure_gap.at("base");
    out.physical_energy = out.record.ledger.physical_energy;
    out.model_energy = out.record.ledger.model_energy;
    out.total_cost = out.record.ledger.total;
    out.max_constraint_residual = worst_residual;

    std::vector<double> base_power(out.record.times.size());
    for (std::size_t i = 0; i < out.record.times.size(); ++i) {
        base_power[i] = loop.velocity(out.record.times[i]).squaredNorm();
        out.max_abs_m = std::max(out.max_abs_m, std::abs(out.record.states[i](3)));
    }
    out.e_tas = quadrature(base_power, out.record.dt, rule);
    return out;
}

// ---------------------------------------------------------------------------
// Block holonomy slopes

template <typename Channel>
BlockHolonomySummary block_holonomy(const Channel& channel, std::span<const LoopSpec> loops,
                                    double lambda, double dt) {
    BlockHolonomySummary out;
    for (const LoopSpec& loop : loops) {
        const ReflectiveRunResult run = run_reflective_loop(channel, loop, lambda, dt);
        BlockHolonomyRow row;
        row.area = loop.signed_area();
        row.model_displacement = run.delta_m;
        if constexpr (std::is_same_v<Channel, ConnectionChannel>) {
            row.physical_displacement = run.delta_z;
        } else {
            row.physical_displacement = run.visible_closure;
        }
        out.rows.push_back(row);
    }
    out.physical_slope = fit_slope(out.rows, &BlockHolonomyRow::physical_displacement);
    out.model_slope = fit_slope(out.rows, &BlockHolonomyRow::model_displacement);
    const double scale =
        std::max(std::abs(out.physical_slope), std::abs(out.model_slope));
    out.physical_active = scale > 0.0 && std::abs(out.physical_slope) > 0.05 * scale;
    out.model_active = scale > 0.0 && std::abs(out.model_slope) > 0.05 * scale;
    return out;
}

template BlockHolonomySummary block_holonomy(const ProjectiveChannel&,
                                             std::span<const LoopSpec>, double, double);
template BlockHolonomySummary block_holonomy(const ConnectionChannel&,
                                             std::span<const LoopSpec>, double, double);

// ---------------------------------------------------------------------------
// Value-function probe

LiftCandidate candidate_from_run(const ReflectiveRunResult& run, std::string label) {
    LiftCandidate out;
    out.physical_cost = run.physical_energy;
    out.model_cost = run.model_energy;
    out.max_constraint_residual = run.max_constraint_residual;
    out.label = std::move(label);
    return out;
}

std::vector<double> value_envelope(std::span<const LiftCandidate> candidates,
                                   std::span<const double> lambda_grid) {
    if (candidates.empty()) throw BadParams("value envelope needs candidates");
    for (const auto& candidate : candidates) {
        if (candidate.max_constraint_residual > 1e-8) {
            throw InfeasibleCandidate("candidate '" + candidate.label +
                                      "' violates the reflective constraint by " +
                                      std::to_string(candidate.max_constraint_residual));
        }
        if (candidate.model_cost < 0.0) {
            throw InfeasibleCandidate("candidate '" + candidate.label +
                                      "' has negative model cost");
        }
    }
    std::vector<double> envelope;
    envelope.reserve(lambda_grid.size());
    for (double lambda : lambda_grid) {
        double best = candidates[0].cost_at(lambda);
        for (const auto& candidate : candidates.subspan(1)) {
            best = std::min(best, candidate.cost_at(lambda));
        }
        envelope.push_back(best);
    }
    return envelope;
}

EnvelopeDiagnostics check_envelope(std::span<const double> envelope,
                                   std::span<const double> lambda_grid) {
    EnvelopeDiagnostics out;
    for (std::size_t i = 0; i + 1 < envelope.size(); ++i) {
        out.monotonicity_violation =
            std::max(out.monotonicity_violation, envelope[i] - envelope[i + 1]);
    }
    double previous_slope = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < envelope.size(); ++i) {
        const double slope =
            (envelope[i + 1] - envelope[i]) / (lambda_grid[i + 1] - lambda_grid[i]);
        out.concavity_violation = std::max(out.concavity_violation, slope - previous_slope);
        previous_slope = slope;
    }
    return out;
}

}  // namespace tas
