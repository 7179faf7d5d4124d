#include <doctest.h>

#include <cmath>
#include <random>

#include "tas/rtas.hpp"

using namespace tas;

namespace {
constexpr double kTwoPi = 2.0 * EIGEN_PI;

ReflectiveRunResult run_projective(double lambda, double dt = kTwoPi / 4000.0,
                                   const LoopSpec& loop = LoopSpec::circle(1.0, kTwoPi)) {
    return run_reflective_loop(ProjectiveChannel{}, loop, lambda, dt);
}

double linear_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_SUITE_BEGIN("rtas");

TEST_CASE("reflective lift reproduces the closed-form split") {
    const ProjectiveChannel channel;
    const ReflectiveProjection proj = channel.projection();
    const MetricTensor g = MetricTensor::identity(2);
    const MetricTensor h = MetricTensor::identity(1);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double u = 2.0 * normal(rng), m = 0.7 * normal(rng);
        const double lambda = std::exp(normal(rng));
        const Eigen::Vector2d dc(normal(rng), normal(rng));
        const Eigen::Vector2d p(u, normal(rng));

        const ReflectiveLiftResult lift =
            reflective_lift(proj, p, Eigen::VectorXd::Constant(1, m), g, h, lambda, dc);
        const Eigen::Vector3d expected = ProjectiveChannel::analytic_split(u, m, dc, lambda);
        CHECK(lift.u_dot(0) == doctest::Approx(expected(0)).epsilon(1e-12));
        CHECK(lift.u_dot(1) == doctest::Approx(expected(1)).epsilon(1e-12));
        CHECK(lift.m_dot(0) == doctest::Approx(expected(2)).epsilon(1e-12));
        CHECK(lift.constraint_residual <= 1e-10);
    }
}

TEST_CASE("degenerate cases of the reflective lift") {
    const MetricTensor g = MetricTensor::identity(2);
    const MetricTensor h = MetricTensor::identity(1);
    Eigen::MatrixXd jac_p(2, 2);
    jac_p << 1.0, 0.0, 0.4, 1.0;
    const Eigen::Vector2d dc(0.8, -0.5);

    SUBCASE("vanishing model column freezes the model") {
        const ReflectiveLiftResult lift =
            reflective_lift(jac_p, Eigen::MatrixXd::Zero(2, 1), g, h, 1.0, dc);
        CHECK(lift.m_dot(0) == 0.0);
        const LiftResult tas = metric_lift(JacobianMap(jac_p), g, dc);
        CHECK((lift.u_dot - tas.velocity).norm() < 1e-12);
    }
    SUBCASE("an empty model block reproduces the plain metric lift") {
        const ReflectiveLiftResult lift =
            reflective_lift(jac_p, Eigen::MatrixXd::Zero(2, 0), g, MetricTensor::identity(0),
                            1.0, dc);
        const LiftResult tas = metric_lift(JacobianMap(jac_p), g, dc);
        CHECK((lift.u_dot - tas.velocity).norm() <= 1e-12);
        CHECK(lift.m_dot.size() == 0);
        CHECK(lift.model_power == 0.0);
    }
    SUBCASE("sin u = 0 kills the model rate regardless of lambda") {
        for (double lambda : {0.1, 1.0, 100.0}) {
            const Eigen::Vector3d split =
                ProjectiveChannel::analytic_split(0.0, 0.4, dc, lambda);
            CHECK(split(2) == 0.0);
        }
    }
    SUBCASE("lambda must be positive") {
        CHECK_THROWS_AS(
            reflective_lift(jac_p, Eigen::MatrixXd::Zero(2, 1), g, h, 0.0, dc),
            NonPositiveLambda);
        CHECK_THROWS_AS(
            reflective_lift(jac_p, Eigen::MatrixXd::Zero(2, 1), g, h, -2.0, dc),
            NonPositiveLambda);
    }
}

TEST_CASE("block Pythagorean identity for feasible perturbations") {
    const ProjectiveChannel channel;
    const ReflectiveProjection proj = channel.projection();
    const MetricTensor g = MetricTensor::identity(2);
    const MetricTensor h = MetricTensor::identity(1);

    std::mt19937_64 rng(17);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double u = 2.0 * normal(rng), m = normal(rng);
        const double lambda = std::exp(0.5 * normal(rng));
        const Eigen::Vector2d p(u, normal(rng));
        const Eigen::Vector2d dc(normal(rng), normal(rng));
        const ReflectiveLiftResult star =
            reflective_lift(proj, p, Eigen::VectorXd::Constant(1, m), g, h, lambda, dc);

        // kernel of [jac_p jac_m] is spanned by (0, -sin u, 1)
        const double scale = normal(rng);
        const Eigen::Vector2d du(0.0, -std::sin(u) * scale);
        const double dm = scale;

        const double star_cost = star.physical_power + lambda * star.model_power;
        const Eigen::Vector2d u_dot = star.u_dot + du;
        const double m_dot = star.m_dot(0) + dm;
        const double cost = u_dot.squaredNorm() + lambda * m_dot * m_dot;
        const double gap = du.squaredNorm() + lambda * dm * dm;
        CHECK(std::abs(cost - star_cost - gap) <= 1e-10 * std::max(1.0, cost));
        CHECK(cost >= star_cost - 1e-12);
    }
}

TEST_CASE("projective loop runs") {
    SUBCASE("large lambda reaches the frozen-model limit") {
        const ReflectiveRunResult run = run_projective(1e9);
        CHECK(std::abs(run.delta_m) <= 1e-6);
        CHECK(run.visible_closure <= 1e-6);
    }
    SUBCASE("model displacement shrinks as lambda grows") {
        const ReflectiveRunResult a = run_projective(0.2);
        const ReflectiveRunResult b = run_projective(1.0);
        const ReflectiveRunResult c = run_projective(5.0);
        CHECK(std::abs(a.delta_m) > std::abs(b.delta_m));
        CHECK(std::abs(b.delta_m) > std::abs(c.delta_m));
    }
    SUBCASE("reflective cost stays below the frozen-model baseline plus K / lambda") {
        const ReflectiveRunResult at_one = run_projective(1.0);
        const double k = (at_one.total_cost - at_one.e_tas) * 1.0;
        for (double lambda : {1.0, 10.0, 100.0}) {
            const ReflectiveRunResult run = run_projective(lambda);
            CHECK(run.total_cost <=
                  run.e_tas + k / lambda + 1e-9 * std::max(1.0, run.total_cost));
        }
    }
    SUBCASE("model suppression scales as 1 / lambda") {
        std::vector<double> log_lambda, log_peak;
        for (double lambda : {1.0, 10.0, 100.0, 1000.0}) {
            log_lambda.push_back(std::log(lambda));
            log_peak.push_back(std::log(run_projective(lambda).max_abs_m));
        }
        const double slope = linear_slope(log_lambda, log_peak);
        CHECK(slope == doctest::Approx(-1.0).epsilon(0.1));
    }
}

TEST_CASE("extended cost lower bound on unit-time loops") {
    // Arbitrary feasible lifts cost at least the optimal cost plus the
    // squared holonomy mismatch, for loops parametrized on [0, 1].
    const ProjectiveChannel channel;
    const ReflectiveProjection proj = channel.projection();
    const MetricTensor g = MetricTensor::identity(2);
    const MetricTensor h = MetricTensor::identity(1);
    const LoopSpec loop = LoopSpec::circle(0.25, 1.0, Eigen::Vector2d(0.6, 0.1));
    const double lambda = 1.3, dt = 1.0 / 1000.0;

    auto run_with_perturbation = [&](double gain) {
        LiftPolicy policy = [&, gain](const Eigen::VectorXd& state, const Eigen::Vector2d& c,
                                      const Eigen::Vector2d& dc) -> Eigen::VectorXd {
            const ReflectiveLiftResult lift =
                reflective_lift(proj, state.head<2>(), state.tail<1>(), g, h, lambda, dc);
            Eigen::Vector3d v;
            v << lift.u_dot, lift.m_dot;
            // feasible perturbation along the constraint kernel
            const double eps = gain * (0.3 + std::sin(3.0 * c.x()));
            v += eps * Eigen::Vector3d(0.0, -std::sin(state(0)), 1.0);
            return v;
        };
        IntegrateOptions opt;
        opt.lambda = lambda;
        opt.blocks = {{"visible", 0, 2, CoordinateBlock::Role::Physical},
                      {"model", 2, 1, CoordinateBlock::Role::Model}};
        Eigen::Vector3d x0;
        x0 << loop.position(0.0), 0.0;
        return integrate(policy, x0, loop, dt, opt);
    };

    const TrajectoryRecord star = run_with_perturbation(0.0);
    const TrajectoryRecord bent = run_with_perturbation(0.35);

    const Eigen::Vector2d du_gap = bent.displacement.at("visible") -
                                   star.displacement.at("visible");
    const double dm_gap =
        bent.displacement.at("model")(0) - star.displacement.at("model")(0);
    const double excess = bent.ledger.total - star.ledger.total;
    CHECK(excess >= du_gap.squaredNorm() + lambda * dm_gap * dm_gap - 1e-6);
    CHECK(excess > 0.0);
}

TEST_CASE("block holonomy slopes identify the active channels") {
    SUBCASE("model-independent connection reduces to the constant-curvature case") {
        ConnectionChannel channel;
        channel.alpha = [](double) { return 0.3; };
        channel.gamma = 0.0;
        std::vector<LoopSpec> loops;
        for (double radius : {0.3, 0.45, 0.6, 0.75, 0.9}) {
            loops.push_back(LoopSpec::circle(radius, kTwoPi));
        }
        const BlockHolonomySummary summary =
            block_holonomy(channel, loops, 1.0, kTwoPi / 2000.0);
        CHECK(summary.physical_slope == doctest::Approx(0.6).epsilon(1e-3));
        CHECK(std::abs(summary.model_slope) < 1e-9);
        CHECK(summary.physical_active);
        CHECK_FALSE(summary.model_active);
    }
    SUBCASE("projective channel stores memory in the model block") {
        std::vector<LoopSpec> loops;
        for (double radius : {0.02, 0.03, 0.04, 0.05, 0.06}) {
            loops.push_back(LoopSpec::circle(radius, kTwoPi));
        }
        const BlockHolonomySummary summary =
            block_holonomy(ProjectiveChannel{}, loops, 1.0, kTwoPi / 2000.0);
        CHECK(summary.model_active);
        CHECK(std::abs(summary.model_slope) > 10.0 * std::abs(summary.physical_slope));
    }
    SUBCASE("a degenerate zero-area loop moves nothing") {
        // back-and-forth sweep along a segment, smoothly parametrized
        const Eigen::Vector2d a(0.2, -0.1), b(1.1, 0.6);
        const LoopSpec segment = LoopSpec::analytic(
            [=](double t) -> Eigen::Vector2d {
                const double s = std::sin(EIGEN_PI * t / kTwoPi);
                return a + (s * s) * (b - a);
            },
            [=](double t) -> Eigen::Vector2d {
                const double w = EIGEN_PI / kTwoPi;
                return (2.0 * std::sin(w * t) * std::cos(w * t) * w) * (b - a);
            },
            kTwoPi, 0.0);
        const ReflectiveRunResult run =
            run_reflective_loop(ProjectiveChannel{}, segment, 1.0, kTwoPi / 4000.0);
        CHECK(std::abs(run.delta_m) <= 1e-9);
        CHECK(run.visible_closure <= 1e-9);
    }
}

TEST_CASE("value envelope over candidate lifts") {
    SUBCASE("single candidate gives an affine envelope") {
        const LiftCandidate only{2.0, 0.5, 0.0, "only"};
        const std::vector<double> grid = {0.1, 1.0, 10.0};
        const std::vector<double> envelope = value_envelope(std::vector{only}, grid);
        CHECK(envelope[0] == doctest::Approx(2.05));
        CHECK(envelope[2] == doctest::Approx(7.0));
        const EnvelopeDiagnostics diag = check_envelope(envelope, grid);
        CHECK(diag.monotonicity_violation <= 0.0);
        CHECK(diag.concavity_violation <= 1e-12);
    }
    SUBCASE("two crossing affine costs give one concave kink") {
        const std::vector<LiftCandidate> candidates = {{1.0, 1.0, 0.0, "steep"},
                                                       {3.0, 0.1, 0.0, "flat"}};
        std::vector<double> grid;
        for (int i = 0; i < 21; ++i) grid.push_back(0.2 * (i + 1));
        const std::vector<double> envelope = value_envelope(candidates, grid);
        const EnvelopeDiagnostics diag = check_envelope(envelope, grid);
        CHECK(diag.monotonicity_violation <= 1e-12);
        CHECK(diag.concavity_violation <= 1e-12);
        // the crossing lives at lambda = 2 / 0.9
        CHECK(envelope.front() == doctest::Approx(candidates[0].cost_at(grid.front())));
        CHECK(envelope.back() == doctest::Approx(candidates[1].cost_at(grid.back())));
    }
    SUBCASE("policy-generated candidates give a nondecreasing concave envelope") {
        const LoopSpec loop = LoopSpec::circle(1.0, kTwoPi);
        std::vector<LiftCandidate> candidates;
        for (double lambda_gen : {0.1, 1.0, 10.0}) {
            candidates.push_back(candidate_from_run(
                run_projective(lambda_gen, kTwoPi / 2000.0, loop),
                "lambda=" + std::to_string(lambda_gen)));
        }
        std::vector<double> grid;
        for (int i = 0; i < 20; ++i) grid.push_back(std::pow(10.0, -1.0 + 2.0 * i / 19.0));
        const std::vector<double> envelope = value_envelope(candidates, grid);
        const EnvelopeDiagnostics diag = check_envelope(envelope, grid);
        CHECK(diag.monotonicity_violation <= 1e-12);
        CHECK(diag.concavity_violation <= 1e-12);
    }
    SUBCASE("infeasible candidates are rejected") {
        const LiftCandidate bad{1.0, 0.5, 1e-3, "bad"};
        const std::vector<double> grid = {1.0};
        CHECK_THROWS_AS(value_envelope(std::vector{bad}, grid), InfeasibleCandidate);
    }
}

TEST_CASE("connection channel with model coupling trades fibre against model motion") {
    ConnectionChannel channel;
    channel.alpha = [](double m) { return 0.3 + 0.2 * std::tanh(m); };
    channel.gamma = 1.0;
    const LoopSpec loop = LoopSpec::circle(1.0, kTwoPi);

    double previous = 1e9;
    for (double lambda : {0.2, 1.0, 5.0}) {
        const ReflectiveRunResult run =
            run_reflective_loop(channel, loop, lambda, kTwoPi / 2000.0);
        CHECK(std::abs(run.delta_m) < previous);
        previous = std::abs(run.delta_m);
        CHECK(run.delta_m != 0.0);
        CHECK(run.max_constraint_residual <= 1e-10);
    }
}

TEST_SUITE_END();
