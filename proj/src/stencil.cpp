#include "plbm/stencil.hpp"

#include <stdexcept>

namespace plbm::lattice {

namespace {

// Velocity tables. Index 0 is always the rest vector; weights are the
// standard Gauss-Hermite values for each lattice.
constexpr int e2[9][3] = {
    {0, 0, 0},  {1, 0, 0},  {0, 1, 0},  {-1, 0, 0}, {0, -1, 0},
    {1, 1, 0},  {-1, 1, 0}, {-1, -1, 0}, {1, -1, 0},
};
constexpr double w2[9] = {
    4.0 / 9.0,
    1.0 / 9.0,  1.0 / 9.0,  1.0 / 9.0,  1.0 / 9.0,
    1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0,
};

constexpr int e3[19][3] = {
    {0, 0, 0},
    {1, 0, 0},  {-1, 0, 0}, {0, 1, 0},  {0, -1, 0}, {0, 0, 1},  {0, 0, -1},
    {1, 1, 0},  {-1, -1, 0}, {1, -1, 0}, {-1, 1, 0},
    {1, 0, 1},  {-1, 0, -1}, {1, 0, -1}, {-1, 0, 1},
    {0, 1, 1},  {0, -1, -1}, {0, 1, -1}, {0, -1, 1},
};
constexpr double w3[19] = {
    1.0 / 3.0,
    1.0 / 18.0, 1.0 / 18.0, 1.0 / 18.0, 1.0 / 18.0, 1.0 / 18.0, 1.0 / 18.0,
    1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0,
    1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0,
    1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0,
};

} // namespace

Stencil make_stencil(StencilKind kind) {
    Stencil s{};
    s.kind = kind;
    s.cs2 = kCs2;
    if (kind == StencilKind::D2Q9) {
        s.q = 9;
        s.dim = 2;
        for (int i = 0; i < 9; ++i) {
            s.e[i] = {e2[i][0], e2[i][1], e2[i][2]};
            s.w[i] = w2[i];
        }
    } else {
        s.q = 19;
        s.dim = 3;
        for (int i = 0; i < 19; ++i) {
            s.e[i] = {e3[i][0], e3[i][1], e3[i][2]};
            s.w[i] = w3[i];
        }
    }
    // Derive the opposite map instead of hand-writing it.
    for (int i = 0; i < s.q; ++i) {
        s.opp[i] = -1;
        for (int j = 0; j < s.q; ++j) {
            if (s.e[j][0] == -s.e[i][0] && s.e[j][1] == -s.e[i][1] &&
                s.e[j][2] == -s.e[i][2]) {
                s.opp[i] = j;
                break;
            }
        }
        if (s.opp[i] < 0)
            throw std::logic_error("stencil table is not symmetric");
    }
    return s;
}

} // namespace plbm::lattice
