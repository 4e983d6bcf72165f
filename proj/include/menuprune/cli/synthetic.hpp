#pragma once

#include "menuprune/model/instance.hpp"

#include <random>

namespace menuprune::cli {

/// Small market on [1,2]^2 with alpha = (-11,-11), used for synthetic menus.
model::Instance synthetic_instance();

/// `count` tangent planes of a random strictly convex quadratic whose
/// gradients stay in alpha * [0.8, 1.2]^2, with intercepts lowered by up to
/// `noise` so that some cells shrink or vanish. Ids are a random permutation
/// of 0..count-1.
model::Menu random_menu(std::mt19937_64& rng, const model::Instance& instance, int count, double noise = 0.05);

}  // namespace menuprune::cli
