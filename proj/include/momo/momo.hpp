#pragma once
/// @file momo.hpp
/// @brief Convenience header pulling in the whole library.

#include "momo/kinematics.hpp"
#include "momo/rng.hpp"
#include "momo/individual_models.hpp"
#include "momo/group_models.hpp"
#include "momo/trace.hpp"
#include "momo/metrics.hpp"
#include "momo/engine.hpp"
#include "momo/scenarios.hpp"
#include "momo/dmimo.hpp"
#include "momo/io.hpp"
