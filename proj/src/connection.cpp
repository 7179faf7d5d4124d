#include "tas/connection.hpp"

#include <cmath>

namespace tas {

namespace {

constexpr double kFlatTolerance = 1e-9;

// 4-point Gauss--Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 4> kGl4Nodes = {-0.8611363115940526, -0.3399810435848563,
                                             0.3399810435848563, 0.8611363115940526};
constexpr std::array<double, 4> kGl4Weights = {0.3478548451374538, 0.6521451548625461,
                                               0.6521451548625461, 0.3478548451374538};

// Gauss--Legendre nodes/weights on [0, 1] for arbitrary n via Newton on
// Legendre polynomials. n stays small, so no caching subtleties.
void gauss_legendre01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(EIGEN_PI * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        nodes[n - 1 - i] = 0.5 * (x + 1.0);
        weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
}

}  // namespace

Eigen::VectorXd horizontal_velocity(const ConnectionSpec& conn, const Eigen::Vector2d& base,
                                    const Eigen::Vector2d& dc) {
    const Eigen::MatrixXd a = conn.coefficient(base.x(), base.y());
    if (a.rows() != conn.fibre_dim || a.cols() != 2) {
        throw BadParams("connection coefficient must be fibre_dim x 2");
    }
    if (!a.allFinite()) {
        throw NonFinite("connection coefficient is non-finite at (" +
                        std::to_string(base.x()) + ", " + std::to_string(base.y()) + ")");
    }
    Eigen::VectorXd out(2 + conn.fibre_dim);
    out.head<2>() = dc;
    out.tail(conn.fibre_dim) = a * dc;
    return out;
}

HolonomyResult holonomy_by_path(const ConnectionSpec& conn, const LoopSpec& loop, double dt) {
    const double T = loop.period();
    if ((loop.position(0.0) - loop.position(T)).norm() > 1e-12) {
        throw LoopNotClosed("loop endpoints differ");
    }
    if (dt > T / 100.0) {
        throw StepTooLarge("dt = " + std::to_string(dt) + " exceeds T/100");
    }

    const int steps = static_cast<int>(std::lround(T / dt));
    const double h = T / steps;

    auto field = [&](const Eigen::VectorXd& x, double t) {
        const Eigen::Vector2d dc = loop.velocity(t);
        Eigen::VectorXd v(x.size());
        v.head<2>() = dc;
        v.tail(conn.fibre_dim) = conn.coefficient(x(0), x(1)) * dc;
        return v;
    };

    Eigen::VectorXd x = Eigen::VectorXd::Zero(2 + conn.fibre_dim);
    x.head<2>() = loop.position(0.0);
    for (int i = 0; i < steps; ++i) x = rk4_step(field, x, i * h, h);

    HolonomyResult out;
    out.fibre_displacement = x.tail(conn.fibre_dim);
    out.closure_gap_base = (x.head<2>() - loop.position(0.0)).norm();
    out.enclosed_area = loop.signed_area();
    return out;
}

HolonomyResult holonomy_by_area(const ConnectionSpec& conn, const LoopSpec& loop,
                                const AreaIntegralOptions& options) {
    if (!conn.curvature) {
        throw NoAnalyticCurvature("connection carries no analytic curvature");
    }
    const auto& curvature = *conn.curvature;

    std::vector<double> inner_nodes, inner_weights;
    gauss_legendre01(options.inner_nodes, inner_nodes, inner_weights);

    // P(x, y) = int_0^x F(s, y) ds, so that  iint F dx dy = oint P dy.
    auto primitive = [&](double x, double y) {
        Eigen::VectorXd p = Eigen::VectorXd::Zero(conn.fibre_dim);
        for (int k = 0; k < options.inner_nodes; ++k) {
            p += inner_weights[k] * curvature(inner_nodes[k] * x, y);
        }
        return (x * p).eval();
    };

    const double T = loop.period();
    const double panel = T / options.line_panels;
    Eigen::VectorXd total = Eigen::VectorXd::Zero(conn.fibre_dim);
    for (int i = 0; i < options.line_panels; ++i) {
        const double t0 = i * panel;
        for (int k = 0; k < 4; ++k) {
            const double t = t0 + 0.5 * panel * (1.0 + kGl4Nodes[k]);
            const Eigen::Vector2d c = loop.position(t);
            const double dy = loop.velocity(t).y();
            total += (0.5 * panel * kGl4Weights[k] * dy) * primitive(c.x(), c.y());
        }
    }

    HolonomyResult out;
    out.fibre_displacement = total;
    out.closure_gap_base = 0.0;
    out.enclosed_area = loop.signed_area();
    return out;
}

double curvature_residual(const ConnectionSpec& conn, const std::array<double, 4>& box,
                          int n, double step) {
    if (!conn.curvature) {
        throw NoAnalyticCurvature("connection carries no analytic curvature");
    }
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double x = box[0] + (box[1] - box[0]) * i / (n - 1.0);
            const double y = box[2] + (box[3] - box[2]) * j / (n - 1.0);
            const Eigen::MatrixXd axp = conn.coefficient(x + step, y);
            const Eigen::MatrixXd axm = conn.coefficient(x - step, y);
            const Eigen::MatrixXd ayp = conn.coefficient(x, y + step);
            const Eigen::MatrixXd aym = conn.coefficient(x, y - step);
            const Eigen::VectorXd curl =
                (axp.col(1) - axm.col(1) - ayp.col(0) + aym.col(0)) / (2.0 * step);
            const Eigen::VectorXd f = (*conn.curvature)(x, y);
            worst = std::max(worst, (curl - f).cwiseAbs().maxCoeff());
        }
    }
    return worst;
}

const char* archetype_name(Archetype a) {
    switch (a) {
        case Archetype::IntrinsicallyConservative: return "intrinsically_conservative";
        case Archetype::ConditionallyConservative: return "conditionally_conservative";
        case Archetype::GeometricallyNonconservative: return "geometrically_nonconservative";
        case Archetype::DynamicallyNonconservative: return "dynamically_nonconservative";
    }
    return "unknown";
}

Archetype classify(const SystemDescriptor& descriptor) {
    constexpr int kGrid = 17;
    const auto& box = descriptor.box;

    double max_curvature = 0.0;
    if (descriptor.curvature) {
        for (int i = 0; i < kGrid; ++i) {
            for (int j = 0; j < kGrid; ++j) {
                const double x = box[0] + (box[1] - box[0]) * i / (kGrid - 1.0);
                const double y = box[2] + (box[3] - box[2]) * j / (kGrid - 1.0);
                max_curvature =
                    std::max(max_curvature, descriptor.curvature(x, y).cwiseAbs().maxCoeff());
            }
        }
    }

    double max_prescribed = 0.0;
    if (descriptor.prescribed_vertical_magnitude) {
        const std::array<Eigen::Vector2d, 4> directions = {
            Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0),
            Eigen::Vector2d(M_SQRT1_2, M_SQRT1_2), Eigen::Vector2d(-M_SQRT1_2, M_SQRT1_2)};
        for (int i = 0; i < kGrid; ++i) {
            for (int j = 0; j < kGrid; ++j) {
                const Eigen::Vector2d c(box[0] + (box[1] - box[0]) * i / (kGrid - 1.0),
                                        box[2] + (box[3] - box[2]) * j / (kGrid - 1.0));
                for (const auto& dc : directions) {
                    max_prescribed =
                        std::max(max_prescribed,
                                 std::abs(descriptor.prescribed_vertical_magnitude(c, dc)));
                }
            }
        }
    }

    const bool curved = max_curvature > kFlatTolerance;
    const bool prescribed = max_prescribed > kFlatTolerance;
    if (curved && prescribed) {
        throw AmbiguousDescriptor("both mechanisms active: max |F| = " +
                                  std::to_string(max_curvature) + ", max |X_vert| = " +
                                  std::to_string(max_prescribed));
    }
    if (descriptor.is_fibration) {
        return curved ? Archetype::GeometricallyNonconservative
                      : Archetype::ConditionallyConservative;
    }
    return prescribed ? Archetype::DynamicallyNonconservative
                      : Archetype::IntrinsicallyConservative;
}

}  // namespace tas
