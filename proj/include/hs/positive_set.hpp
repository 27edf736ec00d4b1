#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "hs/grid.hpp"

namespace hs {

// Node mask of {u > tol_pos} plus its discrete boundary: mask nodes with at
// least one in-grid face neighbor outside the mask.
struct PositiveSet {
    Grid grid;
    std::vector<std::uint8_t> mask;
    std::vector<std::size_t> boundary_nodes;
    double tol_pos = 0.0;

    bool contains(std::size_t idx) const { return mask[idx] != 0; }
    std::size_t count() const;
};

// tol < 0 selects the default 1e-12 * max(field).
PositiveSet extract_positive_set(const GridField& field, double tol = -1.0);
PositiveSet positive_set_from_mask(const Grid& grid, std::vector<std::uint8_t> mask, double tol);

// Min distance from x to the boundary node cloud; O(h) accurate.
double distance_to_front(const PositiveSet& ps, const Vec& x);

// Sub-grid front points: crossings of the field along boundary arms,
// located by interpolation/extrapolation of the last positive values.
std::vector<Vec> refined_front_points(const GridField& field, const PositiveSet& ps);

// Height-function view of the front along one coordinate axis. `dir` = +1
// means the positive set sits on the low-coordinate side and the front
// faces +axis. height is indexed over perpendicular columns; NaN marks
// columns without a crossing.
struct FrontGraph {
    Grid grid;
    int axis = 1;
    int dir = +1;
    std::vector<double> height;
    bool graph_ok = true;
    double lip_space = 0.0;
    double time = 0.0;

    std::size_t column_count() const { return height.size(); }
    // Perpendicular coordinates of a column (axis component unset).
    Vec column_base(std::size_t col) const;
    // Full front point of a column; axis component = height.
    Vec front_point(std::size_t col) const;
    bool has(std::size_t col) const { return std::isfinite(height[col]); }
};

// Errors with "front outside domain" when no column crosses.
FrontGraph extract_front_graph(const GridField& field, int axis, int dir, double tol = -1.0);

// Max |dg/dt| between two snapshots of the same graph layout.
double front_graph_time_lipschitz(const FrontGraph& a, const FrontGraph& b);

// Appends "t,x',x_d" rows (one per column with a sample) to a CSV stream.
void append_front_csv(std::ostream& os, const FrontGraph& g);

}  // namespace hs
