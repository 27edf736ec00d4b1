#pragma once

#include <cstdint>

#include "hs/vec.hpp"

namespace hs {

// splitmix64: tiny deterministic generator, identical on every platform.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double next_unit() {  // [0, 1)
        return double(next_u64() >> 11) * 0x1.0p-53;
    }
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    Vec next_direction(int dim) {
        while (true) {
            Vec v{next_in(-1, 1), next_in(-1, 1), dim == 3 ? next_in(-1, 1) : 0.0};
            double n2 = norm2(v);
            if (n2 > 1e-8 && n2 <= 1.0) return v / std::sqrt(n2);
        }
    }
};

}  // namespace hs
