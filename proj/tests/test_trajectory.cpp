#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tas/systems.hpp"
#include "tas/trajectory.hpp"

using namespace tas;

namespace {

constexpr double kTwoPi = 2.0 * EIGEN_PI;

// Shoelace area from dense loop samples; oracle for the analytic area fields.
double shoelace_area(const LoopSpec& loop, int n = 20000) {
    double twice = 0.0;
    for (int i = 0; i < n; ++i) {
        const Eigen::Vector2d p = loop.position(loop.period() * i / n);
        const Eigen::Vector2d q = loop.position(loop.period() * (i + 1) / n);
        twice += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * twice;
}

}  // namespace

TEST_SUITE_BEGIN("trajectory");

TEST_CASE("loop factories validate their parameters") {
    CHECK_THROWS_AS(LoopSpec::circle(-1.0, kTwoPi), BadParams);
    CHECK_THROWS_AS(LoopSpec::circle(1.0, 0.0), BadParams);
    CHECK_THROWS_AS(LoopSpec::figure8(1.0, -0.5, kTwoPi), BadParams);
    CHECK_THROWS_AS(make_loop("hexagon", {}), BadParams);
}

TEST_CASE("circle loop geometry") {
    const LoopSpec ccw = LoopSpec::circle(1.0, kTwoPi);
    CHECK(ccw.signed_area() == doctest::Approx(EIGEN_PI).epsilon(1e-14));
    CHECK(shoelace_area(ccw) == doctest::Approx(EIGEN_PI).epsilon(1e-6));
    CHECK((ccw.position(0.0) - ccw.position(kTwoPi)).norm() < 1e-12);

    const LoopSpec cw = LoopSpec::circle(1.0, kTwoPi, Eigen::Vector2d::Zero(), true);
    CHECK(cw.signed_area() == doctest::Approx(-EIGEN_PI).epsilon(1e-14));

    // velocity consistent with finite differences of position
    const double t = 1.234, h = 1e-6;
    const Eigen::Vector2d fd = (ccw.position(t + h) - ccw.position(t - h)) / (2.0 * h);
    CHECK((ccw.velocity(t) - fd).norm() < 1e-8);
}

TEST_CASE("figure-8 loop has cancelling lobes") {
    const LoopSpec loop = LoopSpec::figure8(1.0, 0.5, kTwoPi);
    CHECK(loop.signed_area() == 0.0);
    CHECK(std::abs(shoelace_area(loop)) < 1e-9);

    // per-lobe signed areas from the two halves of the parametrization
    auto lobe_area = [&](double t0, double t1) {
        const int n = 20000;
        double twice = 0.0;
        for (int i = 0; i < n; ++i) {
            const Eigen::Vector2d p = loop.position(t0 + (t1 - t0) * i / n);
            const Eigen::Vector2d q = loop.position(t0 + (t1 - t0) * (i + 1) / n);
            twice += p.x() * q.y() - q.x() * p.y();
        }
        return 0.5 * twice;
    };
    const double first = lobe_area(0.0, kTwoPi / 2.0);
    const double second = lobe_area(kTwoPi / 2.0, kTwoPi);
    CHECK(std::abs(first) > 0.1);
    CHECK(first == doctest::Approx(-second).epsilon(1e-6));
}

TEST_CASE("custom sample loops interpolate and close") {
    std::vector<double> times;
    std::vector<Eigen::Vector2d> pts;
    const int n = 500;
    for (int i = 0; i <= n; ++i) {
        const double t = kTwoPi * i / n;
        times.push_back(t);
        pts.push_back(Eigen::Vector2d(std::cos(t), std::sin(t)));
    }
    pts.back() = pts.front();
    const LoopSpec loop = LoopSpec::from_samples(times, pts);
    CHECK(loop.signed_area() == doctest::Approx(EIGEN_PI).epsilon(1e-4));
    CHECK((loop.position(1.0) - Eigen::Vector2d(std::cos(1.0), std::sin(1.0))).norm() < 1e-4);
}

TEST_CASE("integration of the geometric strip-sine lift closes visibly") {
    const StripSineSystem sys{0.5, 0.3};
    const LoopSpec loop = LoopSpec::circle(1.0, kTwoPi);
    IntegrateOptions opt;
    opt.blocks = StripSineSystem::blocks();

    Eigen::Vector3d x0(loop.position(0.0).x(), loop.position(0.0).y(), 0.0);
    x0.y() -= sys.kappa * std::sin(x0.x());  // v such that the projection hits c(0)

    const TrajectoryRecord rec =
        integrate(sys.geometric_policy(), x0, loop, kTwoPi / 4000.0, opt);
    CHECK(rec.closure_gap.at("visible") < 1e-9);
    CHECK(rec.closure_gap.at("hidden") == 0.0);
    CHECK_FALSE(rec.diverged);
}

TEST_CASE("prescribed strip-sine run stores the loop area in the hidden fibre") {
    const StripSineSystem sys{0.5, 0.3};
    const LoopSpec loop = LoopSpec::circle(1.0, kTwoPi);
    IntegrateOptions opt;
    opt.blocks = StripSineSystem::blocks();

    Eigen::Vector3d x0(1.0, -sys.kappa * std::sin(1.0), 0.0);
    const TrajectoryRecord rec =
        integrate(sys.prescribed_policy(), x0, loop, kTwoPi / 4000.0, opt);
    CHECK(rec.closure_gap.at("visible") < 1e-9);
    CHECK(rec.displacement.at("hidden")(0) == doctest::Approx(1.88496).epsilon(1e-3));
}

TEST_CASE("zero loop produces a zero-energy record") {
    const LoopSpec loop = LoopSpec::circle(1e-12, kTwoPi);
    const StripSineSystem sys{0.5, 0.3};
    IntegrateOptions opt;
    opt.blocks = StripSineSystem::blocks();
    Eigen::Vector3d x0(1e-12, 0.0, 0.0);
    const TrajectoryRecord rec =
        integrate(sys.prescribed_policy(), x0, loop, kTwoPi / 1000.0, opt);
    CHECK(rec.ledger.total < 1e-20);
    CHECK(rec.closure_gap.at("visible") < 1e-15);
}

TEST_CASE("dt guard") {
    const LoopSpec loop = LoopSpec::circle(1.0, kTwoPi);
    const StripSineSystem sys{0.5, 0.3};
    CHECK_THROWS_AS(
        integrate(sys.geometric_policy(), Eigen::Vector3d::Zero(), loop, kTwoPi / 10.0, {}),
        StepTooLarge);
}

TEST_CASE("divergent policies stop early and are flagged") {
    const LoopSpec loop = LoopSpec::circle(1.0, kTwoPi);
    LiftPolicy blowup = [](const Eigen::VectorXd& x, const Eigen::Vector2d&,
                           const Eigen::Vector2d&) -> Eigen::VectorXd {
        return 10.0 * x.cwiseMax(1.0);
    };
    IntegrateOptions opt;
    opt.divergence_threshold = 1e3;
    const TrajectoryRecord rec =
        integrate(blowup, Eigen::VectorXd::Ones(2), loop, kTwoPi / 200.0, opt);
    CHECK(rec.diverged);
    CHECK(rec.states.size() < 201);
}

TEST_CASE("metric lift energy never exceeds prescribed energy") {
    const StripSineSystem sys{0.5, 0.3};
    for (double radius : {0.5, 1.0, 1.7}) {
        const LoopSpec loop = LoopSpec::circle(radius, kTwoPi);
        IntegrateOptions opt;
        opt.blocks = StripSineSystem::blocks();
        Eigen::Vector3d x0(radius, -sys.kappa * std::sin(radius), 0.0);
        const double dt = kTwoPi / 4000.0;
        const double geo =
            integrate(sys.geometric_policy(), x0, loop, dt, opt).ledger.total;
        const double pre =
            integrate(sys.prescribed_policy(), x0, loop, dt, opt).ledger.total;
        CHECK(geo <= pre + 1e-12);
    }
}

TEST_CASE("refining dt changes holonomy and energy only at the expected order") {
    // off-center circle so the vertical rate varies along the loop
    const StripSineSystem sys{0.5, 0.3};
    const LoopSpec loop = LoopSpec::circle(1.0, kTwoPi, Eigen::Vector2d(0.4, 0.2));
    IntegrateOptions opt;
    opt.blocks = StripSineSystem::blocks();
    const Eigen::Vector2d c0 = loop.position(0.0);
    Eigen::Vector3d x0(c0.x(), c0.y() - sys.kappa * std::sin(c0.x()), 0.0);

    auto run = [&](double dt) { return integrate(sys.prescribed_policy(), x0, loop, dt, opt); };

    // default settings: relative change under halving stays below 1e-4
    const TrajectoryRecord fine = run(kTwoPi / 4000.0);
    const TrajectoryRecord finer = run(kTwoPi / 8000.0);
    const double dh_fine = fine.displacement.at("hidden")(0);
    const double dh_finer = finer.displacement.at("hidden")(0);
    CHECK(std::abs(dh_fine - dh_finer) <= 1e-4 * std::abs(dh_finer));
    CHECK(std::abs(fine.ledger.total - finer.ledger.total) <= 1e-4 * finer.ledger.total);

    // on full periodic loops the error cancels beyond fourth order; the
    // refinement deltas must at least decay at the fourth-order rate
    const Eigen::VectorXd a = run(kTwoPi / 100.0).states.back();
    const Eigen::VectorXd b = run(kTwoPi / 200.0).states.back();
    const Eigen::VectorXd c = run(kTwoPi / 400.0).states.back();
    CHECK((a - b).norm() / (b - c).norm() > 12.0);
}

TEST_CASE("the stepper itself is fourth order on a nonlinear problem") {
    // dy/dt = y^2, y(0) = 1, exact solution 1/(1 - t); no periodic error
    // cancellation, so the halving ratio sits at the clean 2^4.
    auto f = [](const Eigen::VectorXd& y, double) -> Eigen::VectorXd {
        return y.array().square().matrix();
    };
    auto solve = [&](int n) {
        Eigen::VectorXd y = Eigen::VectorXd::Ones(1);
        const double h = 0.5 / n;
        for (int i = 0; i < n; ++i) y = rk4_step(f, y, i * h, h);
        return y(0);
    };
    const double exact = 2.0;
    const double e1 = std::abs(solve(64) - exact);
    const double e2 = std::abs(solve(128) - exact);
    const double ratio = e1 / e2;
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("records serialize to CSV and JSON") {
    const StripSineSystem sys{0.5, 0.3};
    const LoopSpec loop = LoopSpec::circle(1.0, kTwoPi);
    IntegrateOptions opt;
    opt.blocks = StripSineSystem::blocks();
    Eigen::Vector3d x0(1.0, -sys.kappa * std::sin(1.0), 0.0);
    const TrajectoryRecord rec =
        integrate(sys.prescribed_policy(), x0, loop, kTwoPi / 400.0, opt);

    std::ostringstream csv;
    rec.write_csv(csv);
    const std::string text = csv.str();
    CHECK(text.substr(0, text.find('\n')) ==
          "t,visible0,visible1,hidden,power_visible,power_hidden");
    CHECK(std::count(text.begin(), text.end(), '\n') == 402);

    const nlohmann::json summary = rec.summary_json();
    CHECK(summary["diverged"] == false);
    CHECK(summary["closure_gap"].contains("visible"));
    CHECK(summary["energy"]["total"].get<double>() > 0.0);
}

TEST_SUITE_END();
