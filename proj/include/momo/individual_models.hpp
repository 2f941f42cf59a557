#pragma once
/**
 * @file individual_models.hpp
 * @brief Individual mobility models: pure update rules plus the per-node
 *        movers that fire them on their model-specific triggers.
 *
 * Each model has a free function computing a new speed vector (the update
 * rule) and a mover class that owns the model's timers and advances one
 * node's kinematic state over a position-update interval [t0, t1]. Movers
 * split the interval at internal events (timer expiry, leg completion,
 * waypoint arrival, boundary contact) and move in straight lines between
 * them, so positions between events follow the straight-line law exactly.
 *
 * Movers follow a two-call protocol per interval: plan(t0) lets the model
 * refresh the vector it is about to use, then advance(t0, t1) moves the node.
 * After advance the state holds the vector that applies from t1 onward.
 */

#include "momo/kinematics.hpp"
#include "momo/rng.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace momo {

// ---------------------------------------------------------------------------
// Parameters

enum class WalkTrigger { timer, distance };

struct RandomWalkParams {
    WalkTrigger trigger{WalkTrigger::timer};
    double period_s{5.0};      ///< timer variant
    double distance_m{50.0};   ///< distance variant
    std::optional<Disc> fence; ///< keeps the walker inside a disc instead of the playground
};

struct KoVaidyaParams {
    double mean_leg_m{50.0};
};

struct RandomWaypointParams {
    double pause_s{0.0};
};

struct RandomDirectionParams {
    double pause_s{0.0};
};

struct InertiaParams {
    double period_s{5.0};
    double rho{0.5};  ///< probability of re-selecting the speed vector at each update
};

struct GaussMarkovParams {
    double period_s{5.0};
    double beta{0.1};  ///< 1/s, memory decay
    double mu_x{0.0};
    double mu_y{0.0};
    double sigma_x{1.0};
    double sigma_y{1.0};
};

struct BoundlessParams {
    double period_s{5.0};
};

struct StaticParams {};

using ModelParams = std::variant<RandomWalkParams, KoVaidyaParams, RandomWaypointParams, RandomDirectionParams,
                                 InertiaParams, GaussMarkovParams, BoundlessParams, StaticParams>;

[[nodiscard]] inline std::string model_name(const ModelParams& p)
{
    constexpr const char* names[] = {"random_walk", "ko_vaidya", "random_waypoint", "random_direction",
                                     "inertia",     "gauss_markov", "boundless",     "static"};
    return names[p.index()];
}

inline void validate(const ModelParams& params)
{
    auto fail = [](const char* what) { throw PreconditionError(what); };
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, RandomWalkParams>) {
                if (p.trigger == WalkTrigger::timer && !(p.period_s > 0.0))
                    fail("random_walk: period must be positive");
                if (p.trigger == WalkTrigger::distance && !(p.distance_m > 0.0))
                    fail("random_walk: distance must be positive");
                if (p.fence && !(p.fence->radius > 0.0))
                    fail("random_walk: fence radius must be positive");
            } else if constexpr (std::is_same_v<P, KoVaidyaParams>) {
                if (!(p.mean_leg_m > 0.0))
                    fail("ko_vaidya: mean leg must be positive");
            } else if constexpr (std::is_same_v<P, RandomWaypointParams> || std::is_same_v<P, RandomDirectionParams>) {
                if (!(p.pause_s >= 0.0))
                    fail("pause must be non-negative");
            } else if constexpr (std::is_same_v<P, InertiaParams>) {
                if (!(p.period_s > 0.0))
                    fail("inertia: period must be positive");
                if (!(p.rho >= 0.0 && p.rho <= 1.0))
                    fail("inertia: rho must lie in [0, 1]");
            } else if constexpr (std::is_same_v<P, GaussMarkovParams>) {
                if (!(p.period_s > 0.0))
                    fail("gauss_markov: period must be positive");
                if (!(p.beta >= 0.0))
                    fail("gauss_markov: beta must be non-negative");
                if (!(p.sigma_x >= 0.0 && p.sigma_y >= 0.0))
                    fail("gauss_markov: sigma must be non-negative");
            } else if constexpr (std::is_same_v<P, BoundlessParams>) {
                if (!(p.period_s > 0.0))
                    fail("boundless: period must be positive");
            }
        },
        params);
}

// ---------------------------------------------------------------------------
// Update rules

/// Fresh speed vector: v ~ U[v_min, v_max], theta ~ U[0, 2pi).
[[nodiscard]] inline SpeedVector random_walk_update(const KinematicLimits& limits, RngStream& rng)
{
    double v = rng.uniform(limits.v_min, limits.v_max);
    double theta = rng.uniform(0.0, kTwoPi);
    return {v, theta};
}

struct KoVaidyaLeg {
    SpeedVector speed;
    double next_leg_m;
};

/// New speed for the next leg; the direction chosen at start-up is kept.
[[nodiscard]] inline KoVaidyaLeg ko_vaidya_update(const NodeKinematicState& state, const KinematicLimits& limits,
                                                  const KoVaidyaParams& params, RngStream& rng)
{
    double v = rng.uniform(limits.v_min, limits.v_max);
    double leg = rng.exponential(params.mean_leg_m);
    return {{v, state.speed.theta}, leg};
}

struct Waypoint {
    Position destination;
    double v;
    double pause_s;
};

[[nodiscard]] inline Waypoint random_waypoint_update(const Playground& playground, const KinematicLimits& limits,
                                                     const RandomWaypointParams& params, RngStream& rng)
{
    Position dest{rng.uniform(0.0, playground.width), rng.uniform(0.0, playground.height)};
    double v = rng.uniform(limits.v_min, limits.v_max);
    return {dest, v, params.pause_s};
}

namespace detail {
struct InwardNormals {
    double nx{0.0};
    double ny{0.0};
    bool left{false}, right{false}, bottom{false}, top{false};
    [[nodiscard]] bool any() const noexcept { return left || right || bottom || top; }
};

inline InwardNormals boundary_contact(const Position& p, const Playground& pg, double eps = 1e-9)
{
    InwardNormals n;
    n.left = p.x <= eps;
    n.right = p.x >= pg.width - eps;
    n.bottom = p.y <= eps;
    n.top = p.y >= pg.height - eps;
    return n;
}
}  // namespace detail

/// New direction drawn uniformly among those pointing back into the
/// playground. A node not touching any edge keeps its vector.
[[nodiscard]] inline SpeedVector random_direction_update(const NodeKinematicState& state, const Playground& playground,
                                                         RngStream& rng)
{
    auto contact = detail::boundary_contact(state.position, playground);
    if (!contact.any())
        return state.speed;
    for (;;) {
        double theta = rng.uniform(0.0, kTwoPi);
        double cx = std::cos(theta);
        double cy = std::sin(theta);
        if ((contact.left && cx <= 0.0) || (contact.right && cx >= 0.0) || (contact.bottom && cy <= 0.0) ||
            (contact.top && cy >= 0.0))
            continue;
        return {state.speed.v, theta};
    }
}

/// With probability rho a fresh random-walk vector, otherwise the current one.
[[nodiscard]] inline SpeedVector inertia_update(const NodeKinematicState& state, const KinematicLimits& limits,
                                                const InertiaParams& params, RngStream& rng)
{
    if (rng.bernoulli(params.rho))
        return random_walk_update(limits, rng);
    return state.speed;
}

/// Per-axis velocity components of the Gauss-Markov process.
struct GaussMarkovState {
    double vx{0.0};
    double vy{0.0};
};

/// Draw from the stationary distribution of the process.
[[nodiscard]] inline GaussMarkovState gauss_markov_initial(const GaussMarkovParams& p, RngStream& rng)
{
    return {rng.normal(p.mu_x, p.sigma_x), rng.normal(p.mu_y, p.sigma_y)};
}

/// One period of the exact discretization of a process with autocorrelation
/// sigma^2 exp(-beta |tau|) + mu^2: v <- a v + (1 - a) mu + sigma sqrt(1 - a^2) w,
/// with a = exp(-beta T).
[[nodiscard]] inline GaussMarkovState gauss_markov_step(const GaussMarkovState& s, const GaussMarkovParams& p,
                                                        RngStream& rng)
{
    const double a = std::exp(-p.beta * p.period_s);
    const double k = std::sqrt(std::max(0.0, 1.0 - a * a));
    double wx = rng.normal(0.0, 1.0);
    double wy = rng.normal(0.0, 1.0);
    return {a * s.vx + (1.0 - a) * p.mu_x + p.sigma_x * k * wx, a * s.vy + (1.0 - a) * p.mu_y + p.sigma_y * k * wy};
}

/// Speed vector emitted for a component pair: direction from the components,
/// magnitude clamped into [v_min, v_max].
[[nodiscard]] inline SpeedVector gauss_markov_vector(const GaussMarkovState& s, const KinematicLimits& limits)
{
    double v = std::clamp(std::hypot(s.vx, s.vy), limits.v_min, limits.v_max);
    return {v, std::atan2(s.vy, s.vx)};
}

/// Advance the components by one period and return the emitted vector.
[[nodiscard]] inline SpeedVector gauss_markov_update(GaussMarkovState& s, const KinematicLimits& limits,
                                                     const GaussMarkovParams& params, RngStream& rng)
{
    s = gauss_markov_step(s, params, rng);
    return gauss_markov_vector(s, limits);
}

struct BoundlessDelta {
    double dv;
    double dtheta;
};

/// dv ~ U[-a_max T, a_max T], dtheta ~ U[-gamma_max T, gamma_max T].
[[nodiscard]] inline BoundlessDelta boundless_draw(const KinematicLimits& limits, double period_s, RngStream& rng)
{
    double dv = rng.uniform(-limits.a_max * period_s, limits.a_max * period_s);
    double dtheta = rng.uniform(-limits.gamma_max * period_s, limits.gamma_max * period_s);
    return {dv, dtheta};
}

/// v' = min(max(v + dv, floor), v_max), theta' = theta + dtheta.
[[nodiscard]] inline SpeedVector boundless_apply(const SpeedVector& s, const BoundlessDelta& d,
                                                 const KinematicLimits& limits, double floor = 0.0)
{
    return {clamp_speed(s.v, d.dv, limits, floor), s.theta + d.dtheta};
}

[[nodiscard]] inline SpeedVector boundless_update(const SpeedVector& s, const KinematicLimits& limits,
                                                  const BoundlessParams& params, RngStream& rng, double floor = 0.0)
{
    return boundless_apply(s, boundless_draw(limits, params.period_s, rng), limits, floor);
}

// ---------------------------------------------------------------------------
// Movers

struct MotionContext {
    const Playground& playground;
    const KinematicLimits& limits;
    RngStream& rng;
    double speed_floor{0.0};  ///< lower speed bound enforced by bounded-acceleration models
};

inline constexpr double kEventEpsilon = 1e-9;

/// Move along the current vector for tau seconds and fold the result back
/// into the playground (or the fence disc). Returns true when the direction
/// changed because of a reflection.
inline bool move_straight(NodeKinematicState& s, double tau, const Playground& pg,
                          const std::optional<Disc>& fence = std::nullopt)
{
    if (tau <= 0.0)
        return false;
    Position p = interpolate_position(s, tau);
    auto [np, ns] = fence ? reflect_in_disc(p, s.speed, fence->center, fence->radius) : apply_boundary(p, s.speed, pg);
    bool turned = ns.theta != s.speed.theta;
    s.position = np;
    s.speed = ns;
    return turned;
}

class RandomWalkMover {
public:
    explicit RandomWalkMover(RandomWalkParams p) : params_(std::move(p)) {}

    void start(NodeKinematicState& s, double t, MotionContext& ctx)
    {
        redraw(s, t, ctx);
        epoch_ = 1;
        epoch_origin_ = t;
    }
    void plan(NodeKinematicState&, double, MotionContext&) {}

    void advance(NodeKinematicState& s, double t0, double t1, MotionContext& ctx)
    {
        double now = t0;
        for (;;) {
            double next = next_event(s, now);
            if (next > t1 + kEventEpsilon)
                break;
            next = std::max(next, now);
            travel(s, next - now, ctx);
            now = next;
            redraw(s, now, ctx);
            if (params_.trigger == WalkTrigger::timer)
                ++epoch_;
        }
        travel(s, t1 - now, ctx);
    }

    [[nodiscard]] const RandomWalkParams& params() const noexcept { return params_; }

private:
    double next_event(const NodeKinematicState& s, double now) const
    {
        if (params_.trigger == WalkTrigger::timer)
            return epoch_origin_ + static_cast<double>(epoch_) * params_.period_s;
        if (s.speed.v <= 0.0)
            return std::numeric_limits<double>::infinity();
        return now + remaining_m_ / s.speed.v;
    }
    void travel(NodeKinematicState& s, double tau, MotionContext& ctx)
    {
        if (tau <= 0.0)
            return;
        remaining_m_ -= s.speed.v * tau;
        move_straight(s, tau, ctx.playground, params_.fence);
    }
    void redraw(NodeKinematicState& s, double t, MotionContext& ctx)
    {
        s.speed = random_walk_update(ctx.limits, ctx.rng);
        s.t_lu = t;
        remaining_m_ = params_.distance_m;
    }

    RandomWalkParams params_;
    long long epoch_{1};
    double epoch_origin_{0.0};
    double remaining_m_{0.0};
};

class KoVaidyaMover {
public:
    explicit KoVaidyaMover(KoVaidyaParams p) : params_(p) {}

    void start(NodeKinematicState& s, double t, MotionContext& ctx)
    {
        s.speed.theta = normalize_angle(ctx.rng.uniform(0.0, kTwoPi));
        next_leg(s, t, ctx);
    }
    void plan(NodeKinematicState&, double, MotionContext&) {}

    void advance(NodeKinematicState& s, double t0, double t1, MotionContext& ctx)
    {
        double now = t0;
        while (s.speed.v > 0.0 && now + leg_m_ / s.speed.v <= t1 + kEventEpsilon) {
            double tau = leg_m_ / s.speed.v;
            move_straight(s, tau, ctx.playground);
            now += tau;
            next_leg(s, now, ctx);
        }
        if (t1 > now) {
            leg_m_ -= s.speed.v * (t1 - now);
            move_straight(s, t1 - now, ctx.playground);
        }
    }

private:
    void next_leg(NodeKinematicState& s, double t, MotionContext& ctx)
    {
        auto leg = ko_vaidya_update(s, ctx.limits, params_, ctx.rng);
        s.speed = leg.speed;
        s.t_lu = t;
        leg_m_ = leg.next_leg_m;
    }

    KoVaidyaParams params_;
    double leg_m_{0.0};
};

class RandomWaypointMover {
public:
    explicit RandomWaypointMover(RandomWaypointParams p) : params_(p) {}

    void start(NodeKinematicState& s, double t, MotionContext& ctx) { depart(s, t, ctx); }
    void plan(NodeKinematicState&, double, MotionContext&) {}

    void advance(NodeKinematicState& s, double t0, double t1, MotionContext& ctx)
    {
        double now = t0;
        for (;;) {
            if (pausing_) {
                if (pause_until_ > t1 + kEventEpsilon)
                    return;
                now = std::max(now, pause_until_);
                depart(s, now, ctx);
                continue;
            }
            double arrival = s.t_lu + travel_time_;
            if (arrival > t1 + kEventEpsilon)
                break;
            s.position = destination_;
            now = std::max(now, arrival);
            s.speed = {0.0, s.speed.theta};
            s.t_lu = now;
            pausing_ = true;
            pause_until_ = now + pause_s_;
        }
        // Straight-line leg toward the current destination.
        NodeKinematicState from = s;
        s.position = interpolate_position(from, t1 - now);
    }

    [[nodiscard]] const Position& destination() const noexcept { return destination_; }

private:
    void depart(NodeKinematicState& s, double t, MotionContext& ctx)
    {
        auto wp = random_waypoint_update(ctx.playground, ctx.limits, params_, ctx.rng);
        destination_ = wp.destination;
        pause_s_ = wp.pause_s;
        double dist = std::hypot(wp.destination.x - s.position.x, wp.destination.y - s.position.y);
        double heading = std::atan2(wp.destination.y - s.position.y, wp.destination.x - s.position.x);
        s.speed = {wp.v, heading};
        s.t_lu = t;
        travel_time_ = wp.v > 0.0 ? dist / wp.v : std::numeric_limits<double>::infinity();
        pausing_ = false;
    }

    RandomWaypointParams params_;
    Position destination_;
    double travel_time_{0.0};
    double pause_s_{0.0};
    bool pausing_{false};
    double pause_until_{0.0};
};

class RandomDirectionMover {
public:
    explicit RandomDirectionMover(RandomDirectionParams p) : params_(p) {}

    void start(NodeKinematicState& s, double t, MotionContext& ctx)
    {
        cruise_v_ = ctx.rng.uniform(ctx.limits.v_min, ctx.limits.v_max);
        s.speed = {cruise_v_, ctx.rng.uniform(0.0, kTwoPi)};
        s.t_lu = t;
    }
    void plan(NodeKinematicState&, double, MotionContext&) {}

    void advance(NodeKinematicState& s, double t0, double t1, MotionContext& ctx)
    {
        double now = t0;
        for (int guard = 0; guard < 64; ++guard) {
            if (pausing_) {
                if (pause_until_ > t1 + kEventEpsilon)
                    return;
                now = std::max(now, pause_until_);
                pausing_ = false;
                s.speed = random_direction_update({s.position, {cruise_v_, s.speed.theta}, now}, ctx.playground, ctx.rng);
                s.t_lu = now;
                continue;
            }
            double hit = time_to_boundary(s, ctx.playground);
            if (now + hit > t1 + kEventEpsilon)
                break;
            s.position = interpolate_position(s, hit);
            s.position.x = std::clamp(s.position.x, 0.0, ctx.playground.width);
            s.position.y = std::clamp(s.position.y, 0.0, ctx.playground.height);
            now += hit;
            s.t_lu = now;
            if (params_.pause_s > 0.0) {
                pausing_ = true;
                pause_until_ = now + params_.pause_s;
                s.speed = {0.0, s.speed.theta};
            } else {
                s.speed = random_direction_update(s, ctx.playground, ctx.rng);
            }
        }
        if (!pausing_)
            move_straight(s, t1 - now, ctx.playground);
    }

private:
    static double time_to_boundary(const NodeKinematicState& s, const Playground& pg)
    {
        double vx = s.speed.vx();
        double vy = s.speed.vy();
        double tx = std::numeric_limits<double>::infinity();
        double ty = tx;
        if (vx > 0.0)
            tx = (pg.width - s.position.x) / vx;
        else if (vx < 0.0)
            tx = -s.position.x / vx;
        if (vy > 0.0)
            ty = (pg.height - s.position.y) / vy;
        else if (vy < 0.0)
            ty = -s.position.y / vy;
        return std::max(0.0, std::min(tx, ty));
    }

    RandomDirectionParams params_;
    double cruise_v_{0.0};
    bool pausing_{false};
    double pause_until_{0.0};
};

/// Shared skeleton for models that update their vector on a fixed period.
template <class Derived>
class PeriodicMover {
public:
    void plan(NodeKinematicState&, double, MotionContext&) {}

    void advance(NodeKinematicState& s, double t0, double t1, MotionContext& ctx)
    {
        double now = t0;
        for (;;) {
            double next = origin_ + static_cast<double>(epoch_) * self().period();
            if (next > t1 + kEventEpsilon)
                break;
            next = std::max(next, now);
            if (move_straight(s, next - now, ctx.playground))
                self().on_reflect(s);
            now = next;
            self().fire(s, ctx);
            s.t_lu = now;
            ++epoch_;
        }
        if (move_straight(s, t1 - now, ctx.playground))
            self().on_reflect(s);
    }

protected:
    void begin(double t)
    {
        origin_ = t;
        epoch_ = 1;
    }

private:
    Derived& self() { return static_cast<Derived&>(*this); }
    double origin_{0.0};
    long long epoch_{1};
};

class InertiaMover : public PeriodicMover<InertiaMover> {
public:
    explicit InertiaMover(InertiaParams p) : params_(p) {}

    void start(NodeKinematicState& s, double t, MotionContext& ctx)
    {
        s.speed = random_walk_update(ctx.limits, ctx.rng);
        s.t_lu = t;
        begin(t);
    }
    [[nodiscard]] double period() const noexcept { return params_.period_s; }
    void fire(NodeKinematicState& s, MotionContext& ctx) { s.speed = inertia_update(s, ctx.limits, params_, ctx.rng); }
    void on_reflect(NodeKinematicState&) {}

private:
    InertiaParams params_;
};

class GaussMarkovMover : public PeriodicMover<GaussMarkovMover> {
public:
    explicit GaussMarkovMover(GaussMarkovParams p) : params_(p) {}

    void start(NodeKinematicState& s, double t, MotionContext& ctx)
    {
        comps_ = gauss_markov_initial(params_, ctx.rng);
        s.speed = gauss_markov_vector(comps_, ctx.limits);
        s.t_lu = t;
        begin(t);
    }
    [[nodiscard]] double period() const noexcept { return params_.period_s; }
    void fire(NodeKinematicState& s, MotionContext& ctx) { s.speed = gauss_markov_update(comps_, ctx.limits, params_, ctx.rng); }
    void on_reflect(NodeKinematicState& s)
    {
        // Mirror the process components the same way the wall mirrored the motion.
        if ((s.speed.vx() >= 0.0) != (comps_.vx >= 0.0))
            comps_.vx = -comps_.vx;
        if ((s.speed.vy() >= 0.0) != (comps_.vy >= 0.0))
            comps_.vy = -comps_.vy;
    }
    [[nodiscard]] const GaussMarkovState& components() const noexcept { return comps_; }

private:
    GaussMarkovParams params_;
    GaussMarkovState comps_;
};

/// Bounded-acceleration mover. Every period a (dv, dtheta) pair is drawn and
/// the vector moves linearly from its value at the start of the period to the
/// bounded update at its end, so at each period boundary the vector equals
/// the literal bounded update while per-interval changes stay within
/// a_max * dt and gamma_max * dt. The vector is sampled at each position
/// update and held constant until the next one.
class BoundlessMover {
public:
    explicit BoundlessMover(BoundlessParams p) : params_(p) {}

    void start(NodeKinematicState& s, double t, MotionContext& ctx)
    {
        s.speed = random_walk_update(ctx.limits, ctx.rng);
        s.t_lu = t;
        restart(s, t, ctx);
    }

    /// Begin a fresh period from the node's current vector.
    void restart(const NodeKinematicState& s, double t, MotionContext& ctx)
    {
        v0_ = std::clamp(s.speed.v, ctx.speed_floor, ctx.limits.v_max);
        theta0_ = s.speed.theta;
        begin_period(t, ctx);
    }

    void plan(NodeKinematicState& s, double t, MotionContext& ctx)
    {
        s.speed = sample(t, ctx);
        s.t_lu = t;
    }

    void advance(NodeKinematicState& s, double t0, double t1, MotionContext& ctx)
    {
        double before = s.speed.theta;
        if (move_straight(s, t1 - t0, ctx.playground))
            theta0_ += angular_difference(before, s.speed.theta);
    }

    /// Vector of the profile at time t (t must not precede the current period).
    SpeedVector sample(double t, MotionContext& ctx)
    {
        while (t >= period_start_ + params_.period_s - kEventEpsilon) {
            v0_ = v_target_;
            theta0_ += turn_rate_ * params_.period_s;
            begin_period(period_start_ + params_.period_s, ctx);
        }
        double tau = t - period_start_;
        return {std::clamp(v0_ + accel_ * tau, ctx.speed_floor, ctx.limits.v_max), theta0_ + turn_rate_ * tau};
    }

    [[nodiscard]] const BoundlessParams& params() const noexcept { return params_; }

private:
    void begin_period(double t, MotionContext& ctx)
    {
        auto d = boundless_draw(ctx.limits, params_.period_s, ctx.rng);
        v_target_ = clamp_speed(v0_, d.dv, ctx.limits, ctx.speed_floor);
        accel_ = (v_target_ - v0_) / params_.period_s;
        turn_rate_ = d.dtheta / params_.period_s;
        period_start_ = t;
        theta0_ = normalize_angle(theta0_);
    }

    BoundlessParams params_;
    double period_start_{0.0};
    double v0_{0.0};
    double theta0_{0.0};
    double v_target_{0.0};
    double accel_{0.0};
    double turn_rate_{0.0};
};

class StaticMover {
public:
    void start(NodeKinematicState& s, double t, MotionContext&)
    {
        s.speed = {0.0, 0.0};
        s.t_lu = t;
    }
    void plan(NodeKinematicState&, double, MotionContext&) {}
    void advance(NodeKinematicState&, double, double, MotionContext&) {}
};

using Mover = std::variant<RandomWalkMover, KoVaidyaMover, RandomWaypointMover, RandomDirectionMover, InertiaMover,
                           GaussMarkovMover, BoundlessMover, StaticMover>;

[[nodiscard]] inline Mover make_mover(const ModelParams& params)
{
    return std::visit(
        [](const auto& p) -> Mover {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, RandomWalkParams>)
                return RandomWalkMover{p};
            else if constexpr (std::is_same_v<P, KoVaidyaParams>)
                return KoVaidyaMover{p};
            else if constexpr (std::is_same_v<P, RandomWaypointParams>)
                return RandomWaypointMover{p};
            else if constexpr (std::is_same_v<P, RandomDirectionParams>)
                return RandomDirectionMover{p};
            else if constexpr (std::is_same_v<P, InertiaParams>)
                return InertiaMover{p};
            else if constexpr (std::is_same_v<P, GaussMarkovParams>)
                return GaussMarkovMover{p};
            else if constexpr (std::is_same_v<P, BoundlessParams>)
                return BoundlessMover{p};
            else
                return StaticMover{};
        },
        params);
}

inline void mover_start(Mover& m, NodeKinematicState& s, double t, MotionContext& ctx)
{
    std::visit([&](auto& mv) { mv.start(s, t, ctx); }, m);
}
inline void mover_plan(Mover& m, NodeKinematicState& s, double t, MotionContext& ctx)
{
    std::visit([&](auto& mv) { mv.plan(s, t, ctx); }, m);
}
inline void mover_advance(Mover& m, NodeKinematicState& s, double t0, double t1, MotionContext& ctx)
{
    std::visit([&](auto& mv) { mv.advance(s, t0, t1, ctx); }, m);
}

}  // namespace momo
