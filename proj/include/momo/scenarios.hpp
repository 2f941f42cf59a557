#pragma once
/// @file scenarios.hpp
/// @brief Preset configurations for the model comparison runs.

#include "momo/engine.hpp"

#include <stdexcept>
#include <string>

namespace momo {

enum class ScenarioModel { momo, rpgm, rvgm };

[[nodiscard]] inline ScenarioModel parse_scenario_model(const std::string& s)
{
    if (s == "momo")
        return ScenarioModel::momo;
    if (s == "rpgm")
        return ScenarioModel::rpgm;
    if (s == "rvgm")
        return ScenarioModel::rvgm;
    throw std::invalid_argument("unknown scenario model '" + s + "' (expected momo, rpgm or rvgm)");
}

/// 16 nodes in 4 groups of 4 over a 5000 m square, 10000 s at dt = 1 s.
///
/// The area wraps around: bouncing off a wall is an instantaneous heading
/// change no bounded-rotation model can honour, so a reflecting border would
/// add violations that belong to the border rather than to the model.
/// Nodes start uniformly over the area, so group models that gather their
/// members show it and models that only share velocities do not.
[[nodiscard]] inline ExperimentConfig comparison_config(ScenarioModel model, std::uint64_t seed = 1)
{
    ExperimentConfig cfg;
    cfg.playground = {5000.0, 5000.0, BoundaryPolicy::torus};
    cfg.duration_s = 10000.0;
    cfg.delta_t_s = 1.0;
    cfg.limits = {5.0, 0.001, 5.0, kPi / 2.0};
    cfg.seed = seed;

    GroupModel gm;
    switch (model) {
    case ScenarioModel::momo: {
        MoMoModel m;
        m.params = {30.0, 0.5, std::nullopt};
        m.boundless.period_s = 5.0;
        gm = m;
        break;
    }
    case ScenarioModel::rpgm: {
        RPGMModel m;
        m.params.d_max_m = 30.0;
        gm = m;
        break;
    }
    case ScenarioModel::rvgm: {
        RVGMModel m;
        m.params.sigma_v = 1.0;
        m.params.sigma_theta = 0.26;
        m.params.period_s = 5.0;
        gm = m;
        break;
    }
    }
    for (auto& spec : uniform_groups(4, 4)) {
        GroupConfig g;
        g.spec = spec;
        g.model = gm;
        cfg.groups.push_back(std::move(g));
    }
    return cfg;
}

}  // namespace momo
