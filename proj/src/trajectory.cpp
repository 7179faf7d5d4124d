#include "tas/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <nlohmann/json.hpp>

namespace tas {

namespace {

constexpr double kTwoPi = 2.0 * EIGEN_PI;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// LoopSpec

LoopSpec LoopSpec::circle(double radius, double period, const Eigen::Vector2d& center,
                          bool clockwise, int winding) {
    if (radius <= 0.0) throw BadParams("circle radius must be positive");
    if (period <= 0.0) throw BadParams("loop period must be positive");
    if (winding < 1) throw BadParams("winding number must be >= 1");
    LoopSpec loop;
    loop.kind_ = center.norm() > 0.0 ? LoopKind::OffCenterCircle : LoopKind::Circle;
    loop.center_ = center;
    loop.radius_ = radius;
    loop.period_ = period;
    loop.clockwise_ = clockwise;
    loop.winding_ = winding;
    return loop;
}

LoopSpec LoopSpec::figure8(double a, double b, double period, const Eigen::Vector2d& center) {
    if (a <= 0.0 || b <= 0.0) throw BadParams("figure-8 semi-axes must be positive");
    if (period <= 0.0) throw BadParams("loop period must be positive");
    LoopSpec loop;
    loop.kind_ = LoopKind::Figure8;
    loop.center_ = center;
    loop.a_ = a;
    loop.b_ = b;
    loop.period_ = period;
    return loop;
}

LoopSpec LoopSpec::analytic(std::function<Eigen::Vector2d(double)> position,
                            std::function<Eigen::Vector2d(double)> velocity, double period,
                            double signed_area) {
    if (period <= 0.0) throw BadParams("loop period must be positive");
    if ((position(0.0) - position(period)).norm() > 1e-12) {
        throw LoopNotClosed("analytic loop endpoints differ");
    }
    LoopSpec loop;
    loop.kind_ = LoopKind::CustomAnalytic;
    loop.period_ = period;
    loop.position_fn_ = std::move(position);
    loop.velocity_fn_ = std::move(velocity);
    loop.analytic_area_ = signed_area;
    return loop;
}

LoopSpec LoopSpec::from_samples(std::vector<double> times, std::vector<Eigen::Vector2d> points) {
    if (times.size() != points.size() || times.size() < 3) {
        throw BadParams("custom loop needs >= 3 matching (t, c) samples");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (times[i] <= times[i - 1]) throw BadParams("sample times must be increasing");
    }
    if ((points.front() - points.back()).norm() > 1e-12) {
        throw LoopNotClosed("custom loop endpoints differ by " +
                            std::to_string((points.front() - points.back()).norm()));
    }
    LoopSpec loop;
    loop.kind_ = LoopKind::CustomSamples;
    loop.period_ = times.back() - times.front();
    loop.sample_times_ = std::move(times);
    loop.sample_points_ = std::move(points);
    return loop;
}

Eigen::Vector2d LoopSpec::position(double t) const {
    if (kind_ == LoopKind::CustomAnalytic) return position_fn_(t);
    switch (kind_) {
        case LoopKind::Circle:
        case LoopKind::OffCenterCircle: {
            const double sign = clockwise_ ? -1.0 : 1.0;
            const double theta = sign * winding_ * kTwoPi * t / period_;
            return center_ + radius_ * Eigen::Vector2d(std::cos(theta), std::sin(theta));
        }
        case LoopKind::Figure8: {
            const double theta = kTwoPi * t / period_;
            return center_ + Eigen::Vector2d(a_ * std::sin(theta), b_ * std::sin(2.0 * theta));
        }
        case LoopKind::CustomSamples: {
            const double t0 = sample_times_.front();
            double tc = std::clamp(t, t0, sample_times_.back());
            auto it = std::upper_bound(sample_times_.begin(), sample_times_.end(), tc);
            std::size_t i = std::min<std::size_t>(
                sample_times_.size() - 1,
                static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - sample_times_.begin())));
            const double ta = sample_times_[i - 1], tb = sample_times_[i];
            const double s = (tc - ta) / (tb - ta);
            return (1.0 - s) * sample_points_[i - 1] + s * sample_points_[i];
        }
        case LoopKind::CustomAnalytic:
            break;  // handled above
    }
    return Eigen::Vector2d::Zero();
}

Eigen::Vector2d LoopSpec::velocity(double t) const {
    if (kind_ == LoopKind::CustomAnalytic) return velocity_fn_(t);
    switch (kind_) {
        case LoopKind::Circle:
        case LoopKind::OffCenterCircle: {
            const double sign = clockwise_ ? -1.0 : 1.0;
            const double omega = sign * winding_ * kTwoPi / period_;
            const double theta = omega * t;
            return radius_ * omega * Eigen::Vector2d(-std::sin(theta), std::cos(theta));
        }
        case LoopKind::Figure8: {
            const double omega = kTwoPi / period_;
            const double theta = omega * t;
            return Eigen::Vector2d(a_ * omega * std::cos(theta),
                                   2.0 * b_ * omega * std::cos(2.0 * theta));
        }
        case LoopKind::CustomSamples: {
            const double tc = std::clamp(t, sample_times_.front(), sample_times_.back());
            auto it = std::upper_bound(sample_times_.begin(), sample_times_.end(), tc);
            std::size_t i = std::min<std::size_t>(
                sample_times_.size() - 1,
                static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - sample_times_.begin())));
            const double ta = sample_times_[i - 1], tb = sample_times_[i];
            return (sample_points_[i] - sample_points_[i - 1]) / (tb - ta);
        }
        case LoopKind::CustomAnalytic:
            break;  // handled above
    }
    return Eigen::Vector2d::Zero();
}

double LoopSpec::signed_area() const {
    if (kind_ == LoopKind::CustomAnalytic) return analytic_area_;
    switch (kind_) {
        case LoopKind::Circle:
        case LoopKind::OffCenterCircle: {
            const double sign = clockwise_ ? -1.0 : 1.0;
            return sign * winding_ * EIGEN_PI * radius_ * radius_;
        }
        case LoopKind::Figure8:
            return 0.0;  // lobes cancel
        case LoopKind::CustomSamples: {
            double twice = 0.0;
            for (std::size_t i = 0; i + 1 < sample_points_.size(); ++i) {
                const auto& p = sample_points_[i];
                const auto& q = sample_points_[i + 1];
                twice += p.x() * q.y() - q.x() * p.y();
            }
            return 0.5 * twice;
        }
        case LoopKind::CustomAnalytic:
            break;  // handled above
    }
    return 0.0;
}

bool LoopSpec::is_origin_centered_circle(double tol) const {
    return (kind_ == LoopKind::Circle || kind_ == LoopKind::OffCenterCircle) &&
           center_.norm() <= tol;
}

LoopSpec LoopSpec::reversed() const {
    LoopSpec loop = *this;
    if (kind_ == LoopKind::CustomAnalytic) {
        loop.position_fn_ = [fn = position_fn_, T = period_](double t) { return fn(T - t); };
        loop.velocity_fn_ = [fn = velocity_fn_, T = period_](double t) {
            return (-fn(T - t)).eval();
        };
        loop.analytic_area_ = -analytic_area_;
        return loop;
    }
    if (kind_ == LoopKind::CustomSamples) {
        std::reverse(loop.sample_points_.begin(), loop.sample_points_.end());
        std::vector<double> times(sample_times_.size());
        const double t0 = sample_times_.front(), t1 = sample_times_.back();
        for (std::size_t i = 0; i < times.size(); ++i) {
            times[i] = t0 + (t1 - sample_times_[sample_times_.size() - 1 - i]);
        }
        loop.sample_times_ = std::move(times);
    } else if (kind_ == LoopKind::Figure8) {
        // gamma(T - t) flips the sign of both sine terms
        loop.a_ = -a_;
        loop.b_ = -b_;
    } else {
        loop.clockwise_ = !clockwise_;
    }
    return loop;
}

LoopSpec make_loop(const std::string& kind, const std::map<std::string, double>& params) {
    auto get = [&](const std::string& key, double fallback) {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };
    const double period = get("T", kTwoPi);
    const Eigen::Vector2d center(get("cx", 0.0), get("cy", 0.0));
    if (kind == "circle" || kind == "off_center_circle") {
        return LoopSpec::circle(get("radius", 1.0), period, center,
                                get("clockwise", 0.0) != 0.0,
                                static_cast<int>(get("winding", 1.0)));
    }
    if (kind == "figure8") {
        return LoopSpec::figure8(get("a", 1.0), get("b", 0.5), period, center);
    }
    throw BadParams("unknown loop kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Integration

Eigen::VectorXd rk4_step(const std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>& f,
                         const Eigen::VectorXd& x, double t, double dt) {
    const Eigen::VectorXd k1 = f(x, t);
    const Eigen::VectorXd k2 = f(x + 0.5 * dt * k1, t + 0.5 * dt);
    const Eigen::VectorXd k3 = f(x + 0.5 * dt * k2, t + 0.5 * dt);
    const Eigen::VectorXd k4 = f(x + dt * k3, t + dt);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

TrajectoryRecord integrate(const LiftPolicy& policy, const Eigen::VectorXd& x0,
                           const LoopSpec& loop, double dt, const IntegrateOptions& options) {
    const double T = loop.period();
    if (dt <= 0.0) throw BadParams("dt must be positive");
    if (dt > T / 100.0) {
        throw StepTooLarge("dt = " + std::to_string(dt) + " exceeds T/100 = " +
                           std::to_string(T / 100.0));
    }

    const int steps = static_cast<int>(std::lround(T / dt));
    const double h = T / steps;

    TrajectoryRecord rec;
    rec.dt = h;
    rec.rule = options.rule;
    rec.blocks = options.blocks;
    if (rec.blocks.empty()) {
        rec.blocks.push_back({"state", 0, static_cast<int>(x0.size()),
                              CoordinateBlock::Role::Physical});
    }

    auto field = [&](const Eigen::VectorXd& x, double t) {
        return policy(x, loop.position(t), loop.velocity(t));
    };

    rec.times.reserve(steps + 1);
    rec.states.reserve(steps + 1);
    rec.velocities.reserve(steps + 1);

    Eigen::VectorXd x = x0;
    for (int i = 0; i <= steps; ++i) {
        const double t = i * h;
        const Eigen::VectorXd v = field(x, t);
        rec.times.push_back(t);
        rec.states.push_back(x);
        rec.velocities.push_back(v);

        const bool bad = !x.allFinite() || !v.allFinite() ||
                         x.cwiseAbs().maxCoeff() > options.divergence_threshold;
        if (bad) {
            rec.diverged = true;
            break;
        }
        if (i < steps) x = rk4_step(field, x, t, h);
    }

    // Per-block displacement, closure and energy, computed on whatever
    // portion of the trajectory exists.
    double physical = 0.0;
    double model = 0.0;
    const Eigen::VectorXd& first = rec.states.front();
    const Eigen::VectorXd& last = rec.states.back();
    for (const auto& block : rec.blocks) {
        const Eigen::VectorXd delta =
            last.segment(block.offset, block.size) - first.segment(block.offset, block.size);
        rec.displacement[block.name] = delta;
        rec.closure_gap[block.name] = delta.norm();

        std::vector<double> power(rec.velocities.size());
        for (std::size_t i = 0; i < rec.velocities.size(); ++i) {
            power[i] = rec.velocities[i].segment(block.offset, block.size).squaredNorm();
        }
        const double e = quadrature(power, h, options.rule);
        if (block.role == CoordinateBlock::Role::Model) {
            model += e;
        } else {
            physical += e;
        }
    }
    rec.ledger = EnergyLedger::make(physical, model, options.lambda);
    return rec;
}

double TrajectoryRecord::block_energy(const std::string& name) const {
    for (const auto& block : blocks) {
        if (block.name != name) continue;
        std::vector<double> power(velocities.size());
        for (std::size_t i = 0; i < velocities.size(); ++i) {
            power[i] = velocities[i].segment(block.offset, block.size).squaredNorm();
        }
        return quadrature(power, dt, rule);
    }
    throw BadParams("no coordinate block named '" + name + "'");
}

void TrajectoryRecord::write_csv(std::ostream& os) const {
    os << "t";
    for (const auto& block : blocks) {
        for (int k = 0; k < block.size; ++k) {
            os << "," << block.name << (block.size > 1 ? std::to_string(k) : "");
        }
    }
    for (const auto& block : blocks) os << ",power_" << block.name;
    os << "\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        os << format_double(times[i]);
        for (const auto& block : blocks) {
            for (int k = 0; k < block.size; ++k) {
                os << "," << format_double(states[i](block.offset + k));
            }
        }
        for (const auto& block : blocks) {
            os << ","
               << format_double(velocities[i].segment(block.offset, block.size).squaredNorm());
        }
        os << "\n";
    }
}

nlohmann::json TrajectoryRecord::summary_json() const {
    nlohmann::json j;
    j["dt"] = dt;
    j["duration"] = times.empty() ? 0.0 : times.back();
    j["diverged"] = diverged;
    j["quadrature"] = rule == Quadrature::Trapezoid ? "trapezoid" : "left_riemann";
    j["energy"] = {{"physical", ledger.physical_energy},
                   {"model", ledger.model_energy},
                   {"lambda", ledger.lambda},
                   {"total", ledger.total}};
    for (const auto& [name, gap] : closure_gap) j["closure_gap"][name] = gap;
    for (const auto& [name, delta] : displacement) {
        j["displacement"][name] = std::vector<double>(delta.data(), delta.data() + delta.size());
    }
    return j;
}

}  // namespace tas
