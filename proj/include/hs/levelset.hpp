#pragma once

#include <functional>
#include <vector>

#include "hs/grid.hpp"

namespace hs {

// Fraction (0,1] of the arm from an inside node toward a neighbor outside
// the set at which the front crosses; NaN = treat the arm as uncrossed.
using ArmFraction =
    std::function<double(std::size_t inside_idx, int axis, int dir, std::size_t outside_idx)>;

// Builds a signed distance field (negative inside `inside`) whose zero
// level honors the given sub-grid crossings, filling outward/inward by
// fast marching. Values are capped at +-band when band > 0.
GridField redistance_anchored(const Grid& grid, const std::vector<std::uint8_t>& inside,
                              const ArmFraction& fraction, double band = 0.0);

// Rebuilds phi as a signed distance to its own interpolated zero level.
void redistance(GridField& phi, double band = 0.0);

// Upwind (Godunov) step of phi_t + V |grad phi| = 0. `speed` is the scalar
// normal velocity per node, positive = motion toward phi > 0.
void advect_normal_speed(GridField& phi, const std::vector<double>& speed, double dt);

}  // namespace hs
