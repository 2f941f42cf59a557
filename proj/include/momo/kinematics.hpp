#pragma once
/**
 * @file kinematics.hpp
 * @brief Geometry and kinematics primitives shared by every mobility model.
 *
 * Positions are planar (meters), speed vectors are polar (magnitude in m/s,
 * direction in radians). Stored directions are always normalized to [-pi, pi).
 * All functions here are pure.
 */

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace momo {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Absolute tolerance used when comparing against kinematic bounds.
inline constexpr double kBoundTolerance = 1e-9;

/// Raised when a caller breaks a documented precondition.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Position {
    double x{0.0};
    double y{0.0};

    friend bool operator==(const Position&, const Position&) = default;
};

struct Displacement {
    double dx{0.0};
    double dy{0.0};

    [[nodiscard]] double norm() const noexcept { return std::hypot(dx, dy); }
    [[nodiscard]] double heading() const noexcept { return std::atan2(dy, dx); }
};

/// Wrap an angle into the canonical range [-pi, pi).
[[nodiscard]] inline double normalize_angle(double a) noexcept
{
    if (a >= -kPi && a < kPi)
        return a;
    double r = std::fmod(a + kPi, kTwoPi);
    if (r < 0.0)
        r += kTwoPi;
    double out = r - kPi;
    if (out >= kPi)
        out -= kTwoPi;
    return out;
}

/// Signed smallest rotation in (-pi, pi] taking `from` onto `to`.
[[nodiscard]] inline double angular_difference(double from, double to) noexcept
{
    double d = normalize_angle(to - from);
    return d == -kPi ? kPi : d;
}

struct SpeedVector {
    double v{0.0};      ///< magnitude, m/s
    double theta{0.0};  ///< direction, radians in [-pi, pi)

    SpeedVector() = default;
    SpeedVector(double magnitude, double direction) : v(magnitude), theta(normalize_angle(direction)) {}

    [[nodiscard]] static SpeedVector from_components(double vx, double vy)
    {
        return {std::hypot(vx, vy), std::atan2(vy, vx)};
    }
    [[nodiscard]] double vx() const noexcept { return v * std::cos(theta); }
    [[nodiscard]] double vy() const noexcept { return v * std::sin(theta); }

    friend bool operator==(const SpeedVector&, const SpeedVector&) = default;
};

struct KinematicLimits {
    double v_max{5.0};              ///< m/s
    double v_min{0.001};            ///< m/s
    double a_max{5.0};              ///< m/s^2
    double gamma_max{kPi / 2.0};    ///< rad/s

    void validate() const
    {
        if (!(v_min >= 0.0 && v_min < v_max))
            throw PreconditionError("kinematic limits: require 0 <= v_min < v_max");
        if (!(a_max > 0.0))
            throw PreconditionError("kinematic limits: require a_max > 0");
        if (!(gamma_max > 0.0))
            throw PreconditionError("kinematic limits: require gamma_max > 0");
    }
};

struct NodeKinematicState {
    Position position;
    SpeedVector speed;
    double t_lu{0.0};  ///< time of the last speed-vector update, s
};

enum class BoundaryPolicy { reflect, torus };

[[nodiscard]] inline std::string to_string(BoundaryPolicy p)
{
    return p == BoundaryPolicy::reflect ? "reflect" : "torus";
}

struct Playground {
    double width{5000.0};
    double height{5000.0};
    BoundaryPolicy boundary{BoundaryPolicy::reflect};

    void validate() const
    {
        if (!(width > 0.0 && height > 0.0))
            throw PreconditionError("playground: width and height must be positive");
    }

    [[nodiscard]] bool contains(const Position& p) const noexcept
    {
        return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
    }

    /// Displacement from `a` to `b`; minimum-image on a torus.
    [[nodiscard]] Displacement displacement(const Position& a, const Position& b) const noexcept
    {
        double dx = b.x - a.x;
        double dy = b.y - a.y;
        if (boundary == BoundaryPolicy::torus) {
            dx -= width * std::round(dx / width);
            dy -= height * std::round(dy / height);
        }
        return {dx, dy};
    }

    [[nodiscard]] double distance(const Position& a, const Position& b) const noexcept
    {
        return displacement(a, b).norm();
    }
};

/// Straight-line position after `tau` seconds with the state's speed vector.
[[nodiscard]] inline Position interpolate_position(const NodeKinematicState& state, double tau)
{
    if (tau < 0.0)
        throw PreconditionError("interpolate_position: tau must be non-negative");
    return {state.position.x + state.speed.v * std::cos(state.speed.theta) * tau,
            state.position.y + state.speed.v * std::sin(state.speed.theta) * tau};
}

namespace detail {
// Mirror a coordinate into [0, extent]; returns true when the velocity
// component along this axis must flip.
inline bool mirror_into(double& c, double extent) noexcept
{
    bool flipped = false;
    while (c < 0.0 || c > extent) {
        c = c < 0.0 ? -c : 2.0 * extent - c;
        flipped = !flipped;
    }
    return flipped;
}

inline double wrap_into(double c, double extent) noexcept
{
    double r = std::fmod(c, extent);
    if (r < 0.0)
        r += extent;
    return r >= extent ? 0.0 : r;
}
}  // namespace detail

/// Bring a position that left the playground back inside it.
[[nodiscard]] inline std::pair<Position, SpeedVector> apply_boundary(Position pos, SpeedVector speed,
                                                                     const Playground& playground)
{
    if (playground.contains(pos))
        return {pos, speed};
    if (playground.boundary == BoundaryPolicy::torus) {
        pos.x = detail::wrap_into(pos.x, playground.width);
        pos.y = detail::wrap_into(pos.y, playground.height);
        return {pos, speed};
    }
    double vx = speed.vx();
    double vy = speed.vy();
    if (detail::mirror_into(pos.x, playground.width))
        vx = -vx;
    if (detail::mirror_into(pos.y, playground.height))
        vy = -vy;
    return {pos, SpeedVector{speed.v, std::atan2(vy, vx)}};
}

struct Disc {
    Position center;
    double radius{1.0};
};

/// Specular reflection off a circular fence; used for reference points
/// constrained to a disc.
[[nodiscard]] inline std::pair<Position, SpeedVector> reflect_in_disc(Position pos, SpeedVector speed,
                                                                      const Position& center, double radius)
{
    double dx = pos.x - center.x;
    double dy = pos.y - center.y;
    double d = std::hypot(dx, dy);
    if (d <= radius)
        return {pos, speed};
    double ux = dx / d;
    double uy = dy / d;
    double r = std::max(0.0, 2.0 * radius - d);
    pos = {center.x + r * ux, center.y + r * uy};
    double vx = speed.vx();
    double vy = speed.vy();
    double dot = vx * ux + vy * uy;
    if (dot > 0.0) {
        vx -= 2.0 * dot * ux;
        vy -= 2.0 * dot * uy;
    }
    return {pos, SpeedVector{speed.v, std::atan2(vy, vx)}};
}

/// min(max(v + dv, floor), v_max). The default floor of zero is the literal
/// bounded-speed update; callers pass v_min to enforce the lower bound.
[[nodiscard]] inline double clamp_speed(double v, double dv, const KinematicLimits& limits, double floor = 0.0) noexcept
{
    return std::min(std::max(v + dv, floor), limits.v_max);
}

}  // namespace momo
