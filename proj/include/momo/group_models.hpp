#pragma once
/**
 * @file group_models.hpp
 * @brief Group mobility rules: MoMo binding and forced pursuit, Reference
 *        Point Group Mobility placement and Reference Velocity Group
 *        Mobility velocity sharing.
 *
 * The functions here are stateless; the simulation engine owns the per-group
 * policy objects that call them on the proper epochs.
 */

#include "momo/kinematics.hpp"
#include "momo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace momo {

using NodeId = std::uint32_t;

struct GroupSpec {
    std::uint32_t group_id{0};
    std::vector<NodeId> member_ids;
    std::optional<NodeId> leader_id;

    void validate() const
    {
        if (member_ids.empty())
            throw PreconditionError("group " + std::to_string(group_id) + ": no members");
        if (leader_id && std::find(member_ids.begin(), member_ids.end(), *leader_id) == member_ids.end())
            throw PreconditionError("group " + std::to_string(group_id) + ": leader is not a member");
    }
    [[nodiscard]] std::size_t size() const noexcept { return member_ids.size(); }
};

struct NodeMode {
    enum class Kind : std::uint8_t { none, free, forced };
    Kind kind{Kind::none};
    NodeId target{0};

    [[nodiscard]] static NodeMode free() { return {Kind::free, 0}; }
    [[nodiscard]] static NodeMode forced(NodeId t) { return {Kind::forced, t}; }
    [[nodiscard]] bool is_free() const noexcept { return kind == Kind::free; }
    [[nodiscard]] bool is_forced() const noexcept { return kind == Kind::forced; }

    friend bool operator==(const NodeMode&, const NodeMode&) = default;
};

enum class GroupDynamics { grouped, individual };

// ---------------------------------------------------------------------------
// MoMo

struct MoMoParams {
    double d_c_m{30.0};
    double rho_min{0.5};
    std::optional<double> delta_u_s;  ///< grouping-check period; follows the position update period when unset

    void validate() const
    {
        if (!(d_c_m > 0.0))
            throw PreconditionError("momo: D_c must be positive");
        if (!(rho_min >= 0.0 && rho_min <= 1.0))
            throw PreconditionError("momo: rho_min must lie in [0, 1]");
        if (delta_u_s && !(*delta_u_s > 0.0))
            throw PreconditionError("momo: delta_u must be positive");
    }
};

/// Group mates of `node` lying within D_c (inclusive). `positions` is
/// indexed by node id. Result is sorted by id.
[[nodiscard]] inline std::vector<NodeId> momo_connected_set(NodeId node, const GroupSpec& group,
                                                            std::span<const Position> positions, double d_c,
                                                            const Playground& geometry)
{
    std::vector<NodeId> out;
    for (NodeId j : group.member_ids) {
        if (j == node)
            continue;
        if (geometry.distance(positions[node], positions[j]) <= d_c)
            out.push_back(j);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// N_c / (N - 1). A lone node counts as fully grouped.
[[nodiscard]] inline double momo_grouping_factor(std::size_t connected_count, std::size_t group_size)
{
    if (group_size == 0)
        throw PreconditionError("momo_grouping_factor: empty group");
    if (group_size == 1)
        return 1.0;
    return static_cast<double>(connected_count) / static_cast<double>(group_size - 1);
}

/// Free when the grouping condition holds, otherwise Forced toward the
/// nearest mate outside the connected set (lowest id on ties).
[[nodiscard]] inline NodeMode momo_check_and_set_mode(NodeId node, const GroupSpec& group,
                                                      std::span<const Position> positions, double d_c, double rho_min,
                                                      const Playground& geometry)
{
    auto connected = momo_connected_set(node, group, positions, d_c, geometry);
    double rho = momo_grouping_factor(connected.size(), group.size());
    if (rho >= rho_min)
        return NodeMode::free();

    std::optional<NodeId> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (NodeId j : group.member_ids) {
        if (j == node || std::binary_search(connected.begin(), connected.end(), j))
            continue;
        double d = geometry.distance(positions[node], positions[j]);
        if (d < best_d || (d == best_d && best && j < *best)) {
            best_d = d;
            best = j;
        }
    }
    if (!best)
        throw std::logic_error("momo: grouping condition failed with every mate connected");
    return NodeMode::forced(*best);
}

/// Forced-mode vector: full speed, heading rotated toward the target by at
/// most gamma_max * T_lu along the shorter way round.
[[nodiscard]] inline SpeedVector momo_forced_speed_vector(const NodeKinematicState& node, const Position& target,
                                                          const KinematicLimits& limits, double t_lu,
                                                          const Playground& geometry)
{
    Displacement d = geometry.displacement(node.position, target);
    if (d.dx == 0.0 && d.dy == 0.0)
        return {limits.v_max, node.speed.theta};
    double bearing = d.heading();
    double max_turn = limits.gamma_max * t_lu;
    double turn = std::clamp(angular_difference(node.speed.theta, bearing), -max_turn, max_turn);
    return {limits.v_max, node.speed.theta + turn};
}

// ---------------------------------------------------------------------------
// RPGM

struct RPGMParams {
    double d_max_m{30.0};
    double leader_period_s{5.0};  ///< random-walk period of the leader

    void validate() const
    {
        if (!(d_max_m > 0.0))
            throw PreconditionError("rpgm: d_max must be positive");
        if (!(leader_period_s > 0.0))
            throw PreconditionError("rpgm: leader period must be positive");
    }
};

/// Uniform point over the disc of radius d_max around `center`.
[[nodiscard]] inline Position rpgm_place(const Position& center, double d_max, RngStream& rng)
{
    double r = d_max * std::sqrt(rng.uniform(0.0, 1.0));
    double a = rng.uniform(0.0, kTwoPi);
    return {center.x + r * std::cos(a), center.y + r * std::sin(a)};
}

/// Fresh positions for every standard (non-reference) member, in member order.
[[nodiscard]] inline std::vector<Position> rpgm_step(const GroupSpec& group, const Position& reference,
                                                     const RPGMParams& params, RngStream& rng)
{
    std::vector<Position> out;
    for (NodeId id : group.member_ids) {
        if (group.leader_id && id == *group.leader_id)
            continue;
        out.push_back(rpgm_place(reference, params.d_max_m, rng));
    }
    return out;
}

/// Largest speed a standard node can show between two updates:
/// 2 d_max / dt + v_leader.
[[nodiscard]] inline double rpgm_speed_bound(double d_max, double delta_t, double v_leader)
{
    if (!(delta_t > 0.0))
        throw PreconditionError("rpgm_speed_bound: delta_t must be positive");
    return 2.0 * d_max / delta_t + v_leader;
}

// ---------------------------------------------------------------------------
// RVGM

struct RVGMParams {
    double sigma_v{1.0};        ///< m/s
    double sigma_theta{0.26};   ///< rad
    double period_s{5.0};       ///< reference re-draw period
    std::optional<double> reference_mean_v;  ///< defaults to (v_min + v_max) / 2
    std::optional<double> reference_sigma_v; ///< defaults to sigma_v

    void validate() const
    {
        if (!(sigma_v >= 0.0 && sigma_theta >= 0.0))
            throw PreconditionError("rvgm: sigma_v and sigma_theta must be non-negative");
        if (!(period_s > 0.0))
            throw PreconditionError("rvgm: period must be positive");
    }
};

/// Group reference vector: truncated-Gaussian magnitude in [v_min, v_max],
/// uniform direction.
[[nodiscard]] inline SpeedVector rvgm_reference_velocity(const RVGMParams& params, const KinematicLimits& limits,
                                                         RngStream& rng)
{
    double mean = params.reference_mean_v.value_or(0.5 * (limits.v_min + limits.v_max));
    double sd = params.reference_sigma_v.value_or(params.sigma_v);
    double v = rng.truncated_normal(mean, sd, limits.v_min, limits.v_max);
    return {v, rng.uniform(0.0, kTwoPi)};
}

/// Member vector: reference magnitude plus a Gaussian deviation truncated to
/// [v_min, v_max], reference direction plus a Gaussian deviation.
[[nodiscard]] inline SpeedVector rvgm_node_velocity(const SpeedVector& reference, const RVGMParams& params,
                                                    RngStream& rng, const KinematicLimits& limits)
{
    double v = rng.truncated_normal(reference.v, params.sigma_v, limits.v_min, limits.v_max);
    double theta = reference.theta + rng.normal(0.0, params.sigma_theta);
    return {v, theta};
}

}  // namespace momo
