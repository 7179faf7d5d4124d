#pragma once

#include <array>
#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "tas/trajectory.hpp"

namespace tas {

/// Abelian connection on a trivial bundle over the plane, written as
/// omega = dz - A(x, y) (dx, dy)^T with A a fibre_dim x 2 coefficient
/// matrix. The curvature coefficient (of dx ^ dy) is then the mechanical
/// curl F = d_x A_2 - d_y A_1, supplied analytically when available.
struct ConnectionSpec {
    int fibre_dim = 1;
    std::function<Eigen::MatrixXd(double, double)> coefficient;
    std::optional<std::function<Eigen::VectorXd(double, double)>> curvature;
};

/// Net fibre displacement after traversing a closed base loop.
struct HolonomyResult {
    Eigen::VectorXd fibre_displacement;
    double closure_gap_base = 0.0;
    double enclosed_area = 0.0;
};

/// Horizontal lift of a base velocity: (dc, A(x, y) dc). The connection
/// one-form annihilates the result by construction.
Eigen::VectorXd horizontal_velocity(const ConnectionSpec& conn, const Eigen::Vector2d& base,
                                    const Eigen::Vector2d& dc);

/// Holonomy by integrating the horizontal lift along the loop (fixed-step
/// RK4 on the full (base, fibre) state).
HolonomyResult holonomy_by_path(const ConnectionSpec& conn, const LoopSpec& loop, double dt);

struct AreaIntegralOptions {
    int line_panels = 8000;   // composite Gauss--Legendre panels along the loop
    int inner_nodes = 32;     // nodes for the curvature primitive per evaluation
};

/// Holonomy as the surface integral of the curvature over the enclosed
/// region, evaluated without meshing: the primitive P(x, y) = int_0^x
/// F(s, y) ds is built by quadrature and the surface integral becomes the
/// loop integral of P dy (Green's theorem). Requires an analytic curvature.
HolonomyResult holonomy_by_area(const ConnectionSpec& conn, const LoopSpec& loop,
                                const AreaIntegralOptions& options = {});

/// Max |analytic curvature - central-difference curl of the coefficient|
/// over an n x n grid of the box {xmin, xmax, ymin, ymax}.
double curvature_residual(const ConnectionSpec& conn, const std::array<double, 4>& box,
                          int n = 11, double step = 1e-5);

enum class Archetype {
    IntrinsicallyConservative,
    ConditionallyConservative,
    GeometricallyNonconservative,
    DynamicallyNonconservative,
};

const char* archetype_name(Archetype a);

/// What a system declares about itself for classification. Curvature is
/// sampled over the box for fibrations; the prescribed vertical field is
/// sampled over the box times a set of unit cognitive velocities for
/// diffeomorphic projections.
struct SystemDescriptor {
    bool is_fibration = false;
    std::function<Eigen::VectorXd(double, double)> curvature;  // fibration only
    std::function<double(const Eigen::Vector2d& c, const Eigen::Vector2d& dc)>
        prescribed_vertical_magnitude;  // diffeo only (norm of the vertical rate)
    std::array<double, 4> box = {-1.0, 1.0, -1.0, 1.0};
};

/// Four-archetype classification. Throws AmbiguousDescriptor when both a
/// nonzero curvature and a nonzero prescribed field are declared; the
/// message reports the sampled pair.
Archetype classify(const SystemDescriptor& descriptor);

}  // namespace tas
