#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hs/vec.hpp"

namespace hs {

// Uniform node-centered grid, dim 2 or 3, identical spacing per axis.
struct Grid {
    int dim = 2;
    Vec origin{0, 0, 0};
    double h = 1.0;
    std::array<int, 3> extents{0, 0, 1};  // node counts; extents[2]==1 in 2-D

    Grid() = default;
    Grid(int dim_, Vec origin_, double h_, std::array<int, 3> extents_);
    Grid(int dim_, Vec origin_, double h_, int n)
        : Grid(dim_, origin_, h_, {n, n, dim_ == 3 ? n : 1}) {}

    std::size_t size() const {
        return std::size_t(extents[0]) * extents[1] * extents[2];
    }
    std::size_t index(int i, int j, int k = 0) const {
        return std::size_t(i) + std::size_t(extents[0]) * (std::size_t(j) + std::size_t(extents[1]) * k);
    }
    void coords(std::size_t idx, int& i, int& j, int& k) const {
        i = int(idx % extents[0]);
        std::size_t r = idx / extents[0];
        j = int(r % extents[1]);
        k = int(r / extents[1]);
    }
    std::array<int, 3> coords(std::size_t idx) const {
        std::array<int, 3> c;
        coords(idx, c[0], c[1], c[2]);
        return c;
    }
    std::size_t index(const std::array<int, 3>& c) const { return index(c[0], c[1], c[2]); }
    bool in_bounds(const std::array<int, 3>& c) const { return in_bounds(c[0], c[1], c[2]); }
    Vec position(const std::array<int, 3>& c) const { return position(c[0], c[1], c[2]); }
    Vec position(int i, int j, int k = 0) const {
        return {origin[0] + h * i, origin[1] + h * j, origin[2] + h * k};
    }
    Vec position(std::size_t idx) const {
        int i, j, k;
        coords(idx, i, j, k);
        return position(i, j, k);
    }
    bool in_bounds(int i, int j, int k = 0) const {
        return i >= 0 && i < extents[0] && j >= 0 && j < extents[1] && k >= 0 && k < extents[2];
    }
    // Enclosing cell + fractional offsets for interpolation; clamps to the box.
    void locate(const Vec& x, int cell[3], double frac[3]) const;

    bool same_layout(const Grid& g) const {
        return dim == g.dim && extents == g.extents && h == g.h &&
               origin[0] == g.origin[0] && origin[1] == g.origin[1] && origin[2] == g.origin[2];
    }
};

// Scalar field on a grid. `non_negative` marks fields that represent
// pressures/heights and must not dip below zero.
struct GridField {
    Grid grid;
    std::vector<double> values;
    double time = 0.0;
    bool non_negative = false;

    GridField() = default;
    explicit GridField(const Grid& g, double fill = 0.0, double t = 0.0)
        : grid(g), values(g.size(), fill), time(t) {}

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    double& at(int i, int j, int k = 0) { return values[grid.index(i, j, k)]; }
    double at(int i, int j, int k = 0) const { return values[grid.index(i, j, k)]; }

    double max_abs() const;
    double max_value() const;
    // Bilinear / trilinear interpolation; clamps outside the box.
    double interp(const Vec& x) const;
    // Centered-difference gradient at a node (one-sided at box edges).
    Vec gradient_at(int i, int j, int k = 0) const;
    // Validates finiteness and the non-negativity flag; throws on violation.
    void validate(const std::string& label = "field") const;
};

// Extremum of the interpolated field over the closed ball B_radius(center),
// sampled on a lattice of pitch h/2 (radius quantized down to h/4) plus the
// exact axis tips. Samples outside the box clamp to the box faces.
double ball_max(const GridField& f, const Vec& center, double radius);
double ball_min(const GridField& f, const Vec& center, double radius);

// Field dump / load. Text header (dim, origin, spacing, extents, time,
// format) followed by row-major ASCII values or little-endian float64.
void write_field(const GridField& f, const std::string& path, bool binary = false);
GridField read_field(const std::string& path);

}  // namespace hs
