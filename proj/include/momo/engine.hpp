#pragma once
/**
 * @file engine.hpp
 * @brief Deterministic discrete-time simulation of individual and group
 *        mobility.
 *
 * Time advances on a fixed grid t_k = k * dt (computed from the integer step
 * index, never accumulated). Each step has two phases:
 *
 *   advance  every node moves from t_k to t_{k+1} with the vector planned for
 *            that interval; models with internal events split the interval;
 *   plan     at t_{k+1} pending group/individual switches are applied, group
 *            policies run their checks (MoMo grouping condition, forced
 *            pursuit) and movers refresh the vector for the next interval.
 *
 * After each step the state holds the positions at t_k and the vectors in
 * force on [t_k, t_{k+1}], so position_at() is the straight-line law from the
 * last update.
 */

#include "momo/group_models.hpp"
#include "momo/individual_models.hpp"
#include "momo/kinematics.hpp"
#include "momo/metrics.hpp"
#include "momo/rng.hpp"
#include "momo/trace.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

namespace momo {

/// Validation failure listing every offending field.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems)
        : std::runtime_error(join(problems)), problems_(std::move(problems))
    {
    }
    [[nodiscard]] const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    static std::string join(const std::vector<std::string>& p)
    {
        std::string out = "invalid configuration:";
        for (const auto& s : p)
            out += "\n  " + s;
        return out;
    }
    std::vector<std::string> problems_;
};

// ---------------------------------------------------------------------------
// Configuration

enum class ReferenceKind { leader, fixed, random_walk };

/// Where an RPGM group takes its reference point from.
struct ReferenceSpec {
    ReferenceKind kind{ReferenceKind::leader};
    Position position;        ///< fixed point, or start of the random-walk reference
    RandomWalkParams walk;    ///< random-walk reference (its fence bounds the reference)
};

struct IndividualModel {
    ModelParams params;
};

struct MoMoModel {
    MoMoParams params;
    BoundlessParams boundless;
    /// Members pinned at a fixed position; they count as group mates but never move.
    std::vector<std::pair<NodeId, Position>> anchors;
};

struct RPGMModel {
    RPGMParams params;
    ReferenceSpec reference;
};

struct RVGMModel {
    RVGMParams params;
};

using GroupModel = std::variant<IndividualModel, MoMoModel, RPGMModel, RVGMModel>;

[[nodiscard]] inline std::string model_label(const GroupModel& m)
{
    switch (m.index()) {
    case 0: return model_name(std::get<IndividualModel>(m).params);
    case 1: return "momo";
    case 2: return "rpgm";
    default: return "rvgm";
    }
}

/// Initial placement of a group's members. `cluster` draws the disc centre
/// uniformly over the playground once per group and uses disc.radius.
struct InitialRegion {
    enum class Kind { playground, disc, cluster };
    Kind kind{Kind::playground};
    Disc disc;
};

struct GroupConfig {
    GroupSpec spec;
    GroupModel model{IndividualModel{RandomWalkParams{}}};
    InitialRegion initial;
};

struct ExperimentConfig {
    Playground playground;
    double duration_s{10000.0};
    double delta_t_s{1.0};
    KinematicLimits limits;
    std::uint64_t seed{1};
    std::vector<GroupConfig> groups;
    std::optional<double> switch_mean_period_s;
    /// Bounded-acceleration movers keep the speed at or above v_min.
    bool floor_speed_at_v_min{true};

    [[nodiscard]] std::size_t node_count() const
    {
        std::size_t n = 0;
        for (const auto& g : groups)
            n += g.spec.member_ids.size();
        return n;
    }

    [[nodiscard]] std::size_t step_count() const
    {
        return static_cast<std::size_t>(std::llround(duration_s / delta_t_s));
    }

    [[nodiscard]] std::vector<GroupSpec> group_specs() const
    {
        std::vector<GroupSpec> out;
        for (const auto& g : groups)
            out.push_back(g.spec);
        return out;
    }

    void validate() const
    {
        std::vector<std::string> problems;
        auto check = [&](bool ok, std::string what) {
            if (!ok)
                problems.push_back(std::move(what));
        };
        auto guarded = [&](auto&& fn) {
            try {
                fn();
            } catch (const PreconditionError& e) {
                problems.emplace_back(e.what());
            }
        };
        check(duration_s > 0.0, "duration_s: must be positive");
        check(delta_t_s > 0.0, "delta_t_s: must be positive");
        guarded([&] { playground.validate(); });
        guarded([&] { limits.validate(); });
        check(!groups.empty(), "groups: at least one group is required");
        check(!switch_mean_period_s || *switch_mean_period_s > 0.0, "switch_mean_period_s: must be positive");

        std::vector<int> seen(node_count(), 0);
        for (const auto& g : groups) {
            guarded([&] { g.spec.validate(); });
            for (NodeId id : g.spec.member_ids) {
                if (id >= seen.size())
                    problems.push_back("group " + std::to_string(g.spec.group_id) + ": node id " + std::to_string(id) +
                                       " outside 0.." + std::to_string(seen.size() - 1));
                else
                    ++seen[id];
            }
            std::visit(
                [&](const auto& m) {
                    using M = std::decay_t<decltype(m)>;
                    if constexpr (std::is_same_v<M, IndividualModel>)
                        guarded([&] { momo::validate(m.params); });
                    else if constexpr (std::is_same_v<M, MoMoModel>) {
                        guarded([&] { m.params.validate(); });
                        guarded([&] { momo::validate(ModelParams{m.boundless}); });
                        for (const auto& [id, pos] : m.anchors)
                            check(std::find(g.spec.member_ids.begin(), g.spec.member_ids.end(), id) !=
                                      g.spec.member_ids.end(),
                                  "group " + std::to_string(g.spec.group_id) + ": anchor " + std::to_string(id) +
                                      " is not a member");
                    } else if constexpr (std::is_same_v<M, RPGMModel>) {
                        guarded([&] { m.params.validate(); });
                        if (m.reference.kind == ReferenceKind::random_walk)
                            guarded([&] { momo::validate(ModelParams{m.reference.walk}); });
                    } else {
                        guarded([&] { m.params.validate(); });
                    }
                },
                g.model);
            if (g.initial.kind != InitialRegion::Kind::playground)
                check(g.initial.disc.radius > 0.0,
                      "group " + std::to_string(g.spec.group_id) + ": initial disc radius must be positive");
        }
        for (std::size_t i = 0; i < seen.size(); ++i)
            if (seen[i] != 1)
                problems.push_back("node " + std::to_string(i) + ": must belong to exactly one group (found " +
                                   std::to_string(seen[i]) + ")");
        if (!problems.empty())
            throw ConfigError(std::move(problems));
    }
};

/// Groups of consecutive ids: group g holds ids [g * size, (g + 1) * size).
[[nodiscard]] inline std::vector<GroupSpec> uniform_groups(std::size_t count, std::size_t size)
{
    std::vector<GroupSpec> out;
    for (std::size_t g = 0; g < count; ++g) {
        GroupSpec spec;
        spec.group_id = static_cast<std::uint32_t>(g);
        for (std::size_t i = 0; i < size; ++i)
            spec.member_ids.push_back(static_cast<NodeId>(g * size + i));
        out.push_back(std::move(spec));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dynamics switching

struct SwitchSchedule {
    std::vector<double> toggles;  ///< strictly increasing toggle epochs, s
};

/// Toggle epochs with exponential inter-arrival times of the given mean, up to `duration`.
[[nodiscard]] inline SwitchSchedule generate_switch_schedule(double mean_period_s, double duration_s, RngStream& rng)
{
    if (!(mean_period_s > 0.0))
        throw PreconditionError("generate_switch_schedule: mean period must be positive");
    SwitchSchedule s;
    double t = 0.0;
    for (;;) {
        double gap = rng.exponential(mean_period_s);
        if (!(gap > 0.0))
            continue;
        t += gap;
        if (t >= duration_s)
            break;
        s.toggles.push_back(t);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Simulation

struct NodeRuntime {
    NodeId id{0};
    std::size_t group{0};
    NodeKinematicState state;
    bool has_vector{true};
    NodeMode mode;
    Mover mover{StaticMover{}};
    RngStream rng{0, 0};
};

class Simulation {
public:
    explicit Simulation(ExperimentConfig config) : cfg_(std::move(config))
    {
        cfg_.validate();
        steps_total_ = cfg_.step_count();
        floor_ = cfg_.floor_speed_at_v_min ? cfg_.limits.v_min : 0.0;

        nodes_.resize(cfg_.node_count());
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            nodes_[i].id = static_cast<NodeId>(i);
            nodes_[i].rng = RngStream(cfg_.seed, stream::node + i);
        }
        for (std::size_t g = 0; g < cfg_.groups.size(); ++g)
            init_group(g);
        if (cfg_.switch_mean_period_s) {
            RngStream rng(cfg_.seed, stream::schedule);
            schedule_ = generate_switch_schedule(*cfg_.switch_mean_period_s, cfg_.duration_s, rng);
        }
        plan(0.0);
    }

    [[nodiscard]] const ExperimentConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] std::size_t step_index() const noexcept { return k_; }
    [[nodiscard]] std::size_t steps_total() const noexcept { return steps_total_; }
    [[nodiscard]] bool finished() const noexcept { return k_ >= steps_total_; }
    [[nodiscard]] double time() const noexcept { return time_at(k_); }
    [[nodiscard]] double time_at(std::size_t k) const noexcept { return static_cast<double>(k) * cfg_.delta_t_s; }
    [[nodiscard]] const std::vector<NodeRuntime>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const SwitchSchedule& switch_schedule() const noexcept { return schedule_; }
    [[nodiscard]] GroupDynamics dynamics() const noexcept { return dynamics_; }

    void step()
    {
        double t0 = time_at(k_);
        double t1 = time_at(k_ + 1);
        for (std::size_t g = 0; g < groups_.size(); ++g)
            advance_group(g, t0, t1);
        ++k_;
        plan(t1);
    }

    /// Switch every group between group and individual mobility; takes effect
    /// at the next update epoch of each model.
    void set_group_dynamics(GroupDynamics mode)
    {
        if (mode == dynamics_)
            return;
        dynamics_ = mode;
        for (std::size_t g = 0; g < groups_.size(); ++g)
            apply_dynamics(g, mode);
    }

    /// Position of a node at t in [time(), time() + dt]. Nodes driven by a
    /// mover follow it through any timer or waypoint event inside the
    /// interval (on a copy, so the run is unaffected); the others move along
    /// the vector set at the last update.
    [[nodiscard]] Position position_at(NodeId id, double t) const
    {
        const double now = time();
        if (t < now - kEventEpsilon || t > now + cfg_.delta_t_s + kEventEpsilon)
            throw PreconditionError("position_at: time outside the current update interval");
        const NodeRuntime& n = nodes_.at(id);
        if (!n.has_vector) {
            if (std::fabs(t - now) > kEventEpsilon)
                throw PreconditionError("position_at: node " + std::to_string(id) +
                                        " has no speed vector; its position is defined only at update epochs");
            return n.state.position;
        }
        t = std::max(t, now);
        NodeKinematicState s = n.state;
        if (std::holds_alternative<StaticMover>(n.mover) || n.mode.is_forced()) {
            move_straight(s, t - now, cfg_.playground);
        } else {
            Mover m = n.mover;
            RngStream rng = n.rng;
            MotionContext ctx{cfg_.playground, cfg_.limits, rng, floor_};
            mover_advance(m, s, now, t, ctx);
        }
        return s.position;
    }

    /// Records of every node at the current time, in id order.
    void snapshot(std::vector<TraceRecord>& out) const
    {
        const double t = time();
        for (const auto& n : nodes_) {
            TraceRecord r;
            r.t = t;
            r.node_id = n.id;
            r.x = n.state.position.x;
            r.y = n.state.position.y;
            if (n.has_vector) {
                r.v = n.state.speed.v;
                r.theta = n.state.speed.theta;
            }
            r.mode = n.mode;
            out.push_back(r);
        }
    }

private:
    struct IndividualRuntime {};

    struct MoMoRuntime {
        MoMoModel model;
        double rho_min_grouped{0.0};
        double rho_min{0.0};
        long long next_check{0};
        std::vector<NodeId> movers;  ///< non-anchor members
        std::vector<bool> was_forced;
    };

    struct RPGMRuntime {
        RPGMModel model;
        NodeId leader{0};
        bool virtual_reference{false};
        NodeKinematicState reference;
        std::optional<RandomWalkMover> reference_mover;
        RngStream rng{0, 0};
        RngStream reference_rng{0, 0};
        bool grouped{true};
    };

    struct RVGMRuntime {
        RVGMModel model;
        NodeId leader{0};
        long long epoch{1};
        bool grouped{true};
        bool pending_grouped{true};
        RngStream rng{0, 0};
    };

    using GroupRuntime = std::variant<IndividualRuntime, MoMoRuntime, RPGMRuntime, RVGMRuntime>;

    MotionContext context(NodeRuntime& n) { return {cfg_.playground, cfg_.limits, n.rng, floor_}; }

    Position random_point(const InitialRegion& region, RngStream& rng) const
    {
        if (region.kind == InitialRegion::Kind::disc) {
            Position p = rpgm_place(region.disc.center, region.disc.radius, rng);
            return apply_boundary(p, {}, cfg_.playground).first;
        }
        return {rng.uniform(0.0, cfg_.playground.width), rng.uniform(0.0, cfg_.playground.height)};
    }

    RandomWalkParams leader_walk(const RPGMModel& m) const
    {
        RandomWalkParams w;
        w.trigger = WalkTrigger::timer;
        w.period_s = m.params.leader_period_s;
        return w;
    }

    void init_group(std::size_t g)
    {
        const GroupConfig& gc = cfg_.groups[g];
        RngStream group_rng(cfg_.seed, stream::group + g);
        InitialRegion region = gc.initial;
        if (region.kind == InitialRegion::Kind::cluster) {
            RngStream layout(cfg_.seed, stream::layout + g);
            region.kind = InitialRegion::Kind::disc;
            region.disc.center = {layout.uniform(0.0, cfg_.playground.width), layout.uniform(0.0, cfg_.playground.height)};
        }
        for (NodeId id : gc.spec.member_ids) {
            nodes_[id].group = g;
            nodes_[id].state.position = random_point(region, nodes_[id].rng);
        }

        std::visit(
            [&](const auto& m) {
                using M = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<M, IndividualModel>) {
                    for (NodeId id : gc.spec.member_ids) {
                        auto& n = nodes_[id];
                        n.mover = make_mover(m.params);
                        auto ctx = context(n);
                        mover_start(n.mover, n.state, 0.0, ctx);
                    }
                    groups_.emplace_back(IndividualRuntime{});
                } else if constexpr (std::is_same_v<M, MoMoModel>) {
                    MoMoRuntime rt;
                    rt.model = m;
                    rt.rho_min_grouped = m.params.rho_min;
                    rt.rho_min = m.params.rho_min;
                    for (NodeId id : gc.spec.member_ids) {
                        auto& n = nodes_[id];
                        auto anchor = std::find_if(m.anchors.begin(), m.anchors.end(),
                                                   [&](const auto& a) { return a.first == id; });
                        if (anchor != m.anchors.end()) {
                            n.state.position = anchor->second;
                            n.mover = StaticMover{};
                            auto ctx = context(n);
                            mover_start(n.mover, n.state, 0.0, ctx);
                            continue;
                        }
                        n.mover = BoundlessMover{m.boundless};
                        auto ctx = context(n);
                        mover_start(n.mover, n.state, 0.0, ctx);
                        n.mode = NodeMode::free();
                        rt.movers.push_back(id);
                    }
                    rt.was_forced.assign(rt.movers.size(), false);
                    groups_.emplace_back(std::move(rt));
                } else if constexpr (std::is_same_v<M, RPGMModel>) {
                    RPGMRuntime rt;
                    rt.model = m;
                    rt.rng = group_rng;
                    rt.reference_rng = RngStream(cfg_.seed, stream::placement + g);
                    rt.virtual_reference = m.reference.kind != ReferenceKind::leader;
                    rt.leader = gc.spec.leader_id.value_or(gc.spec.member_ids.front());
                    if (m.reference.kind == ReferenceKind::leader) {
                        auto& leader = nodes_[rt.leader];
                        leader.mover = RandomWalkMover{leader_walk(m)};
                        auto ctx = context(leader);
                        mover_start(leader.mover, leader.state, 0.0, ctx);
                        rt.reference = leader.state;
                    } else {
                        rt.reference.position = m.reference.position;
                        if (m.reference.kind == ReferenceKind::random_walk) {
                            rt.reference_mover.emplace(m.reference.walk);
                            MotionContext ctx{cfg_.playground, cfg_.limits, rt.reference_rng, floor_};
                            rt.reference_mover->start(rt.reference, 0.0, ctx);
                        }
                    }
                    for (NodeId id : gc.spec.member_ids) {
                        if (!rt.virtual_reference && id == rt.leader)
                            continue;
                        auto& n = nodes_[id];
                        n.mover = StaticMover{};
                        n.has_vector = false;
                        n.state.speed = {};
                        n.state.position = place_standard(rt);
                    }
                    groups_.emplace_back(std::move(rt));
                } else {
                    RVGMRuntime rt;
                    rt.model = m;
                    rt.rng = group_rng;
                    rt.leader = gc.spec.leader_id.value_or(gc.spec.member_ids.front());
                    groups_.emplace_back(std::move(rt));
                    rvgm_draw(g, 0.0);
                }
            },
            gc.model);
    }

    Position place_standard(RPGMRuntime& rt)
    {
        Position p = rpgm_place(rt.reference.position, rt.model.params.d_max_m, rt.rng);
        return apply_boundary(p, {}, cfg_.playground).first;
    }

    void plan(double t)
    {
        while (next_toggle_ < schedule_.toggles.size() && schedule_.toggles[next_toggle_] <= t + kEventEpsilon) {
            set_group_dynamics(dynamics_ == GroupDynamics::grouped ? GroupDynamics::individual : GroupDynamics::grouped);
            ++next_toggle_;
        }
        positions_.resize(nodes_.size());
        for (const auto& n : nodes_)
            positions_[n.id] = n.state.position;
        for (std::size_t g = 0; g < groups_.size(); ++g)
            plan_group(g, t);
    }

    void plan_group(std::size_t g, double t)
    {
        const GroupSpec& spec = cfg_.groups[g].spec;
        std::visit(
            [&](auto& rt) {
                using R = std::decay_t<decltype(rt)>;
                if constexpr (std::is_same_v<R, MoMoRuntime>) {
                    double du = rt.model.params.delta_u_s.value_or(cfg_.delta_t_s);
                    if (t >= static_cast<double>(rt.next_check) * du - kEventEpsilon) {
                        for (NodeId id : rt.movers)
                            nodes_[id].mode = momo_check_and_set_mode(id, spec, positions_, rt.model.params.d_c_m,
                                                                      rt.rho_min, cfg_.playground);
                        while (static_cast<double>(rt.next_check) * du <= t + kEventEpsilon)
                            ++rt.next_check;
                    }
                    for (std::size_t i = 0; i < rt.movers.size(); ++i) {
                        auto& n = nodes_[rt.movers[i]];
                        auto ctx = context(n);
                        if (n.mode.is_forced()) {
                            n.state.speed = momo_forced_speed_vector(n.state, positions_[n.mode.target], cfg_.limits,
                                                                     cfg_.delta_t_s, cfg_.playground);
                            n.state.t_lu = t;
                            rt.was_forced[i] = true;
                        } else {
                            if (rt.was_forced[i]) {
                                std::get<BoundlessMover>(n.mover).restart(n.state, t, ctx);
                                rt.was_forced[i] = false;
                            }
                            mover_plan(n.mover, n.state, t, ctx);
                        }
                    }
                } else if constexpr (std::is_same_v<R, RVGMRuntime>) {
                    // Re-draws land on the first update epoch at or after each
                    // multiple of T, so vectors stay constant within an interval.
                    const double period = rt.model.params.period_s;
                    if (t >= static_cast<double>(rt.epoch) * period - kEventEpsilon) {
                        rvgm_draw(g, t);
                        while (static_cast<double>(rt.epoch) * period <= t + kEventEpsilon)
                            ++rt.epoch;
                    }
                } else {
                    for (NodeId id : spec.member_ids) {
                        auto& n = nodes_[id];
                        auto ctx = context(n);
                        mover_plan(n.mover, n.state, t, ctx);
                    }
                }
            },
            groups_[g]);
    }

    void advance_group(std::size_t g, double t0, double t1)
    {
        const GroupSpec& spec = cfg_.groups[g].spec;
        std::visit(
            [&](auto& rt) {
                using R = std::decay_t<decltype(rt)>;
                if constexpr (std::is_same_v<R, IndividualRuntime>) {
                    for (NodeId id : spec.member_ids)
                        advance_node(nodes_[id], t0, t1);
                } else if constexpr (std::is_same_v<R, MoMoRuntime>) {
                    for (NodeId id : rt.movers) {
                        auto& n = nodes_[id];
                        if (n.mode.is_forced())
                            move_straight(n.state, t1 - t0, cfg_.playground);
                        else
                            advance_node(n, t0, t1);
                    }
                } else if constexpr (std::is_same_v<R, RPGMRuntime>) {
                    if (rt.virtual_reference) {
                        if (rt.reference_mover) {
                            MotionContext ctx{cfg_.playground, cfg_.limits, rt.reference_rng, floor_};
                            rt.reference_mover->advance(rt.reference, t0, t1, ctx);
                        }
                    } else {
                        advance_node(nodes_[rt.leader], t0, t1);
                        rt.reference = nodes_[rt.leader].state;
                    }
                    for (NodeId id : spec.member_ids) {
                        if (!rt.virtual_reference && id == rt.leader)
                            continue;
                        auto& n = nodes_[id];
                        if (rt.grouped)
                            n.state.position = place_standard(rt);
                        else
                            advance_node(n, t0, t1);
                    }
                } else {
                    rvgm_advance(g, t0, t1);
                }
            },
            groups_[g]);
    }

    void advance_node(NodeRuntime& n, double t0, double t1)
    {
        auto ctx = context(n);
        mover_advance(n.mover, n.state, t0, t1, ctx);
    }

    void rvgm_advance(std::size_t g, double t0, double t1)
    {
        for (NodeId id : cfg_.groups[g].spec.member_ids)
            move_straight(nodes_[id].state, t1 - t0, cfg_.playground);
    }

    void rvgm_draw(std::size_t g, double t)
    {
        auto& rt = std::get<RVGMRuntime>(groups_[g]);
        const GroupSpec& spec = cfg_.groups[g].spec;
        rt.grouped = rt.pending_grouped;
        if (rt.grouped) {
            SpeedVector ref = rvgm_reference_velocity(rt.model.params, cfg_.limits, rt.rng);
            for (NodeId id : spec.member_ids) {
                auto& n = nodes_[id];
                n.state.speed = id == rt.leader ? ref : rvgm_node_velocity(ref, rt.model.params, n.rng, cfg_.limits);
                n.state.t_lu = t;
            }
        } else {
            for (NodeId id : spec.member_ids) {
                auto& n = nodes_[id];
                n.state.speed = rvgm_reference_velocity(rt.model.params, cfg_.limits, n.rng);
                n.state.t_lu = t;
            }
        }
    }

    void apply_dynamics(std::size_t g, GroupDynamics mode)
    {
        const GroupSpec& spec = cfg_.groups[g].spec;
        const bool grouped = mode == GroupDynamics::grouped;
        const double t = time();
        std::visit(
            [&](auto& rt) {
                using R = std::decay_t<decltype(rt)>;
                if constexpr (std::is_same_v<R, MoMoRuntime>) {
                    rt.rho_min = grouped ? rt.rho_min_grouped : 0.0;
                } else if constexpr (std::is_same_v<R, RPGMRuntime>) {
                    if (rt.grouped == grouped)
                        return;
                    rt.grouped = grouped;
                    for (NodeId id : spec.member_ids) {
                        if (!rt.virtual_reference && id == rt.leader)
                            continue;
                        auto& n = nodes_[id];
                        if (grouped) {
                            n.mover = StaticMover{};
                            n.has_vector = false;
                            n.state.speed = {};
                        } else {
                            n.mover = RandomWalkMover{leader_walk(rt.model)};
                            n.has_vector = true;
                            auto ctx = context(n);
                            mover_start(n.mover, n.state, t, ctx);
                        }
                    }
                } else if constexpr (std::is_same_v<R, RVGMRuntime>) {
                    rt.pending_grouped = grouped;
                }
            },
            groups_[g]);
    }

    ExperimentConfig cfg_;
    std::size_t steps_total_{0};
    std::size_t k_{0};
    double floor_{0.0};
    std::vector<NodeRuntime> nodes_;
    std::vector<GroupRuntime> groups_;
    std::vector<Position> positions_;
    SwitchSchedule schedule_;
    std::size_t next_toggle_{0};
    GroupDynamics dynamics_{GroupDynamics::grouped};
};

/// Run to completion, handing each time slice (all nodes, id order) to `sink`.
template <class Sink>
void run(const ExperimentConfig& config, Sink&& sink)
{
    Simulation sim(config);
    std::vector<TraceRecord> slice;
    slice.reserve(sim.nodes().size());
    sim.snapshot(slice);
    sink(std::as_const(slice));
    while (!sim.finished()) {
        sim.step();
        slice.clear();
        sim.snapshot(slice);
        sink(std::as_const(slice));
    }
}

[[nodiscard]] inline Trace run(const ExperimentConfig& config)
{
    Trace trace;
    trace.records.reserve(config.node_count() * (config.step_count() + 1));
    run(config, [&](const std::vector<TraceRecord>& slice) {
        trace.records.insert(trace.records.end(), slice.begin(), slice.end());
    });
    return trace;
}

// ---------------------------------------------------------------------------
// Parameter sweeps

struct GridSpec {
    std::vector<double> delta_t_s{0.1, 0.5, 1.0, 2.0, 5.0};
    std::vector<double> distance_m{15.0, 30.0, 60.0, 120.0};
};

struct SweepRow {
    std::string model;
    double delta_t_s{0.0};
    std::optional<double> distance_m;
    ViolationReport violations;
    double avg_speed_mps{0.0};
};

/// True when some group has a distance threshold (MoMo D_c or RPGM d_max).
[[nodiscard]] inline bool has_distance_threshold(const ExperimentConfig& cfg)
{
    return std::any_of(cfg.groups.begin(), cfg.groups.end(), [](const GroupConfig& g) {
        return std::holds_alternative<MoMoModel>(g.model) || std::holds_alternative<RPGMModel>(g.model);
    });
}

/// Copy of `cfg` with the update period and (when given) the distance threshold replaced.
[[nodiscard]] inline ExperimentConfig apply_grid_point(ExperimentConfig cfg, double delta_t_s,
                                                       std::optional<double> distance_m)
{
    cfg.delta_t_s = delta_t_s;
    if (distance_m) {
        for (auto& g : cfg.groups) {
            if (auto* m = std::get_if<MoMoModel>(&g.model))
                m->params.d_c_m = *distance_m;
            else if (auto* r = std::get_if<RPGMModel>(&g.model))
                r->params.d_max_m = *distance_m;
        }
    }
    return cfg;
}

/// Seed of one grid point; independent of the grid's other points.
[[nodiscard]] inline std::uint64_t grid_seed(std::uint64_t base, std::size_t i_dt, std::size_t i_dist,
                                             std::size_t replica = 0)
{
    std::uint64_t key = (static_cast<std::uint64_t>(i_dt) << 40) ^ (static_cast<std::uint64_t>(i_dist) << 20) ^
                        static_cast<std::uint64_t>(replica);
    return base ^ splitmix64(key);
}

/// Worker count: MOMO_SIM_THREADS caps the hardware concurrency.
[[nodiscard]] inline std::size_t worker_count(std::size_t jobs)
{
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MOMO_SIM_THREADS")) {
        long cap = std::strtol(env, nullptr, 10);
        if (cap > 0)
            n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
    }
    return std::max<std::size_t>(1, std::min(n, jobs));
}

/// Run `job(i)` for i in [0, count) on a small worker pool.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& job)
{
    std::size_t workers = worker_count(count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                }
            }
        });
    for (auto& th : pool)
        th.join();
    if (failure)
        std::rethrow_exception(failure);
}

/// One simulation per grid point and replica; rows in grid order, replicas pooled.
[[nodiscard]] inline std::vector<SweepRow> sweep(const ExperimentConfig& base, const GridSpec& grid,
                                                 std::size_t replicas = 1)
{
    if (grid.delta_t_s.empty())
        throw PreconditionError("sweep: empty update-period grid");
    replicas = std::max<std::size_t>(1, replicas);
    const bool with_distance = has_distance_threshold(base) && !grid.distance_m.empty();
    const std::size_t n_dist = with_distance ? grid.distance_m.size() : 1;
    const std::size_t points = grid.delta_t_s.size() * n_dist;

    struct Partial {
        ViolationReport rep;
        double speed_sum{0.0};
    };
    std::vector<Partial> partial(points * replicas);
    parallel_for(points * replicas, [&](std::size_t job) {
        std::size_t point = job / replicas;
        std::size_t rep = job % replicas;
        std::size_t i_dt = point / n_dist;
        std::size_t i_dist = point % n_dist;
        auto cfg = apply_grid_point(base, grid.delta_t_s[i_dt],
                                    with_distance ? std::optional<double>(grid.distance_m[i_dist]) : std::nullopt);
        cfg.seed = grid_seed(base.seed, i_dt, i_dist, rep);
        MetricsAccumulator acc(cfg.limits, cfg.playground);
        run(cfg, [&](const std::vector<TraceRecord>& slice) {
            for (const auto& r : slice)
                acc.add(r);
        });
        partial[job].rep = acc.report();
        partial[job].speed_sum = acc.average_speed() * static_cast<double>(partial[job].rep.updates_counted);
    });

    std::vector<SweepRow> rows;
    for (std::size_t point = 0; point < points; ++point) {
        std::size_t i_dt = point / n_dist;
        std::size_t i_dist = point % n_dist;
        SweepRow row;
        row.model = model_label(base.groups.front().model);
        row.delta_t_s = grid.delta_t_s[i_dt];
        if (with_distance)
            row.distance_m = grid.distance_m[i_dist];
        double speed_sum = 0.0;
        for (std::size_t rep = 0; rep < replicas; ++rep) {
            const auto& p = partial[point * replicas + rep];
            row.violations.updates_counted += p.rep.updates_counted;
            row.violations.rotation_updates_counted += p.rep.rotation_updates_counted;
            row.violations.speed_violations += p.rep.speed_violations;
            row.violations.rotation_violations += p.rep.rotation_violations;
            speed_sum += p.speed_sum;
        }
        auto& v = row.violations;
        v.speed_violation_pct =
            v.updates_counted ? 100.0 * static_cast<double>(v.speed_violations) / static_cast<double>(v.updates_counted) : 0.0;
        v.rotation_violation_pct = v.rotation_updates_counted ? 100.0 * static_cast<double>(v.rotation_violations) /
                                                                    static_cast<double>(v.rotation_updates_counted)
                                                              : 0.0;
        row.avg_speed_mps = v.updates_counted ? speed_sum / static_cast<double>(v.updates_counted) : 0.0;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace momo
