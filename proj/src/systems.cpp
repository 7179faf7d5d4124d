#include "tas/systems.hpp"

#include <cmath>

namespace tas {

// ---------------------------------------------------------------------------
// Strip-sine

Eigen::Matrix2d StripSineSystem::visible_jacobian(double u) const {
    Eigen::Matrix2d j;
    j << 1.0, 0.0, kappa * std::cos(u), 1.0;
    return j;
}

Eigen::Matrix<double, 2, 3> StripSineSystem::full_jacobian(double u) const {
    Eigen::Matrix<double, 2, 3> j;
    j << 1.0, 0.0, 0.0, kappa * std::cos(u), 1.0, 0.0;
    return j;
}

Eigen::Vector3d StripSineSystem::geometric_step(const Eigen::Vector3d& state,
                                                const Eigen::Vector2d&,
                                                const Eigen::Vector2d& dc) const {
    return {dc.x(), dc.y() - kappa * std::cos(state.x()) * dc.x(), 0.0};
}

Eigen::Vector3d StripSineSystem::prescribed_step(const Eigen::Vector3d& state,
                                                 const Eigen::Vector2d& c,
                                                 const Eigen::Vector2d& dc) const {
    Eigen::Vector3d v = geometric_step(state, c, dc);
    v.z() = alpha * (c.x() * dc.y() - c.y() * dc.x());
    return v;
}

LiftPolicy StripSineSystem::geometric_policy() const {
    return [sys = *this](const Eigen::VectorXd& state, const Eigen::Vector2d& c,
                         const Eigen::Vector2d& dc) -> Eigen::VectorXd {
        return sys.geometric_step(state.head<3>(), c, dc);
    };
}

LiftPolicy StripSineSystem::prescribed_policy() const {
    return [sys = *this](const Eigen::VectorXd& state, const Eigen::Vector2d& c,
                         const Eigen::Vector2d& dc) -> Eigen::VectorXd {
        return sys.prescribed_step(state.head<3>(), c, dc);
    };
}

std::vector<CoordinateBlock> StripSineSystem::blocks() {
    return {{"visible", 0, 2, CoordinateBlock::Role::Physical},
            {"hidden", 2, 1, CoordinateBlock::Role::Physical}};
}

SystemDescriptor StripSineSystem::descriptor(const std::array<double, 4>& box) const {
    SystemDescriptor d;
    d.is_fibration = false;
    d.prescribed_vertical_magnitude = [a = alpha](const Eigen::Vector2d& c,
                                                  const Eigen::Vector2d& dc) {
        return std::abs(a * (c.x() * dc.y() - c.y() * dc.x()));
    };
    d.box = box;
    return d;
}

// ---------------------------------------------------------------------------
// Helical

ConnectionSpec HelicalSystem::connection() const {
    ConnectionSpec conn;
    conn.fibre_dim = 1;
    conn.coefficient = [a = alpha](double x, double y) {
        Eigen::MatrixXd m(1, 2);
        m << -a * y, a * x;
        return m;
    };
    conn.curvature = [a = alpha](double, double) {
        return Eigen::VectorXd::Constant(1, 2.0 * a);
    };
    return conn;
}

SystemDescriptor HelicalSystem::descriptor(const std::array<double, 4>& box) const {
    SystemDescriptor d;
    d.is_fibration = true;
    d.curvature = connection().curvature.value();
    d.box = box;
    return d;
}

// ---------------------------------------------------------------------------
// Cylindrical

ConnectionSpec CylindricalSystem::connection() const {
    ConnectionSpec conn;
    conn.fibre_dim = 1;
    conn.coefficient = [](double, double) { return Eigen::MatrixXd::Zero(1, 2); };
    conn.curvature = [](double, double) { return Eigen::VectorXd::Zero(1); };
    return conn;
}

SystemDescriptor CylindricalSystem::descriptor(const std::array<double, 4>& box) const {
    SystemDescriptor d;
    d.is_fibration = true;
    d.curvature = connection().curvature.value();
    d.box = box;
    return d;
}

// ---------------------------------------------------------------------------
// Twisted

ConnectionSpec TwistedSystem::connection() const {
    ConnectionSpec conn;
    conn.fibre_dim = 1;
    // (alpha + beta cos theta)(x dy - y dx): the angular factor is written
    // as beta x / r so the whole coefficient vanishes at the origin.
    conn.coefficient = [a = alpha, b = beta](double x, double y) {
        const double r = std::hypot(x, y);
        const double gain = a + (r > 0.0 ? b * x / r : 0.0);
        Eigen::MatrixXd m(1, 2);
        m << -gain * y, gain * x;
        return m;
    };
    conn.curvature = [a = alpha, b = beta](double x, double y) {
        const double r = std::hypot(x, y);
        const double f = 2.0 * (a + (r > 0.0 ? b * x / r : 0.0));
        return Eigen::VectorXd::Constant(1, f);
    };
    return conn;
}

SystemDescriptor TwistedSystem::descriptor(const std::array<double, 4>& box) const {
    SystemDescriptor d;
    d.is_fibration = true;
    d.curvature = connection().curvature.value();
    d.box = box;
    return d;
}

// ---------------------------------------------------------------------------
// Analytic oracles

double analytic_holonomy(const StripSineSystem& system, const LoopSpec& loop) {
    return 2.0 * system.alpha * loop.signed_area();
}

double analytic_holonomy(const HelicalSystem& system, const LoopSpec& loop) {
    return 2.0 * system.alpha * loop.signed_area();
}

double analytic_holonomy(const CylindricalSystem&, const LoopSpec&) {
    return 0.0;
}

double analytic_holonomy(const TwistedSystem& system, const LoopSpec& loop) {
    if (!loop.is_origin_centered_circle()) {
        throw NoClosedForm(
            "twisted holonomy has a closed form only for origin-centered circles");
    }
    return 2.0 * system.alpha * loop.signed_area();
}

double analytic_excess_energy(const StripSineSystem& system, const LoopSpec& loop) {
    if (!loop.is_origin_centered_circle()) {
        throw UnsupportedLoop(
            "excess-energy closed form requires an origin-centered circle");
    }
    // The vertical rate is constant on a constant-rate centered circle, so
    // the excess integrates exactly to (delta h)^2 / T.
    const double delta_h = analytic_holonomy(system, loop);
    return delta_h * delta_h / loop.period();
}

}  // namespace tas
