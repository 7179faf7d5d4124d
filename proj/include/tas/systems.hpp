#pragma once

#include "tas/connection.hpp"
#include "tas/trajectory.hpp"

namespace tas {

/// Shear-projection system on P = R^2_(u,v) x R_h with a hidden actuator
/// coordinate h. The visible projection (u, v) -> (u, v + kappa sin u) is a
/// global diffeomorphism; memory is engineered by the prescribed vertical
/// rate dh/dt = alpha (c1 dc2 - c2 dc1), which accumulates twice the swept
/// area of the cognitive loop.
struct StripSineSystem {
    double kappa = 0.5;
    double alpha = 0.0;

    Eigen::Vector2d project(double u, double v) const {
        return {u, v + kappa * std::sin(u)};
    }
    Eigen::Matrix2d visible_jacobian(double u) const;
    Eigen::Matrix<double, 2, 3> full_jacobian(double u) const;

    /// (dc1, dc2 - kappa cos u dc1, 0): the unique lift of the visible
    /// diffeomorphism, extended by a frozen hidden fibre.
    Eigen::Vector3d geometric_step(const Eigen::Vector3d& state, const Eigen::Vector2d& c,
                                   const Eigen::Vector2d& dc) const;

    /// Geometric lift plus the area-rate vertical component alpha (c1 dc2 - c2 dc1).
    Eigen::Vector3d prescribed_step(const Eigen::Vector3d& state, const Eigen::Vector2d& c,
                                    const Eigen::Vector2d& dc) const;

    LiftPolicy geometric_policy() const;
    LiftPolicy prescribed_policy() const;

    /// Blocks for integrate(): visible (u, v) and hidden (h).
    static std::vector<CoordinateBlock> blocks();

    SystemDescriptor descriptor(const std::array<double, 4>& box = {-2, 2, -2, 2}) const;
};

/// Fibration R^3 -> R^2 with constant-curvature connection; the fibre
/// coordinate picks up twice the enclosed area, scaled by alpha. Curvature
/// F = 2 alpha. alpha = 0 is the metric (flat) connection.
struct HelicalSystem {
    double alpha = 0.3;

    ConnectionSpec connection() const;
    SystemDescriptor descriptor(const std::array<double, 4>& box = {-2, 2, -2, 2}) const;
};

/// Trivial circle bundle over the punctured plane with the flat connection
/// omega = d theta: no holonomy for any loop regardless of winding.
struct CylindricalSystem {
    ConnectionSpec connection() const;
    SystemDescriptor descriptor(const std::array<double, 4>& box = {0.5, 2.0, 0.5, 2.0}) const;
};

/// Variable-curvature fibration: F = 2 (alpha + beta cos theta). The
/// coefficient is kept in Cartesian form so it stays bounded at the origin.
struct TwistedSystem {
    double alpha = 0.3;
    double beta = 0.5;

    ConnectionSpec connection() const;
    SystemDescriptor descriptor(const std::array<double, 4>& box = {-2, 2, -2, 2}) const;
};

/// Closed-form fibre displacement for a loop, where one exists.
/// Strip-sine and helical obey the area law 2 alpha Area(gamma) for any
/// loop; cylindrical is identically zero; twisted has a closed form only
/// for origin-centered circles (the angular term averages out).
double analytic_holonomy(const StripSineSystem& system, const LoopSpec& loop);
double analytic_holonomy(const HelicalSystem& system, const LoopSpec& loop);
double analytic_holonomy(const CylindricalSystem& system, const LoopSpec& loop);
double analytic_holonomy(const TwistedSystem& system, const LoopSpec& loop);

/// Excess energy of the prescribed strip-sine dynamics over the geometric
/// lift for a constant-rate circle: (delta h)^2 / T. Throws UnsupportedLoop
/// for anything that is not a circle.
double analytic_excess_energy(const StripSineSystem& system, const LoopSpec& loop);

}  // namespace tas
