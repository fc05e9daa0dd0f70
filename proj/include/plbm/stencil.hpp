#pragma once
// Discrete velocity sets for the lattice Boltzmann solver.
//
// Both stencils use lattice units (dx = dt = 1), so the sound speed is
// cs^2 = 1/3 and every velocity component is -1, 0 or +1.
//
//   D2Q9                      D3Q19 (19 = 1 rest + 6 faces + 12 edges)
//   6 2 5
//   3 0 1
//   7 4 8

#include <array>
#include <cstdint>

namespace plbm::lattice {

enum class StencilKind { D2Q9, D3Q19 };

inline constexpr int kMaxQ = 19;
inline constexpr double kCs2 = 1.0 / 3.0; // lattice sound speed squared

struct Stencil {
    StencilKind kind;
    int q;       // number of discrete velocities
    int dim;     // 2 or 3
    std::array<std::array<int, 3>, kMaxQ> e;   // velocity vectors
    std::array<double, kMaxQ> w;               // quadrature weights
    std::array<int, kMaxQ> opp;                // opp[i]: index of -e[i]
    double cs2;

    // Populations with e[i][axis] == +1, i.e. the set crossing a +axis
    // tile face per step. 3 for D2Q9, 5 for D3Q19 (same on every axis).
    int crossing_count(int axis) const {
        int n = 0;
        for (int i = 0; i < q; ++i)
            if (e[i][axis] == 1) ++n;
        return n;
    }
};

Stencil make_stencil(StencilKind kind);

} // namespace plbm::lattice
