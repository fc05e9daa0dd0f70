#pragma once
// Core LBM kernels: equilibrium, moments, BGK collision, streaming.
//
// Per-cell kernels are inline and operate on q-length arrays. The
// streaming kernel operates on whole extended tile buffers (interior
// cells plus a one-cell ghost ring) laid out direction-major:
// f[i * gcells + cell].

#include "plbm/stencil.hpp"

#include <cstddef>
#include <cstdint>

namespace plbm::lattice {

// f_eq[i] = w_i rho (1 + e.u/cs2 + (e.u)^2/(2 cs2^2) - u.u/(2 cs2))
inline void equilibrium(double rho, const double u[3], const Stencil& s,
                        double* out) {
    const double uu = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    const double inv_cs2 = 1.0 / s.cs2;
    for (int i = 0; i < s.q; ++i) {
        const double eu =
            s.e[i][0] * u[0] + s.e[i][1] * u[1] + s.e[i][2] * u[2];
        out[i] = s.w[i] * rho *
                 (1.0 + eu * inv_cs2 + 0.5 * eu * eu * inv_cs2 * inv_cs2 -
                  0.5 * uu * inv_cs2);
    }
}

// rho = sum_i f_i ; u = sum_i f_i e_i / rho ; u = 0 when rho = 0.
inline void moments(const double* f, const Stencil& s, double& rho,
                    double u[3]) {
    rho = 0.0;
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < s.q; ++i) {
        rho += f[i];
        m0 += f[i] * s.e[i][0];
        m1 += f[i] * s.e[i][1];
        m2 += f[i] * s.e[i][2];
    }
    if (rho != 0.0) {
        u[0] = m0 / rho;
        u[1] = m1 / rho;
        u[2] = m2 / rho;
    } else {
        u[0] = u[1] = u[2] = 0.0;
    }
}

// out = f + (feq - f)/tau + delta_f. Relaxation toward equilibrium.
inline void collide_bgk(const double* f, const double* f_eq, double tau,
                        const double* delta_f, const Stencil& s, double* out) {
    const double omega = 1.0 / tau;
    for (int i = 0; i < s.q; ++i)
        out[i] = f[i] + omega * (f_eq[i] - f[i]) + delta_f[i];
}

// Pull-streams the interior of one extended tile buffer, with half-way
// bounce-back fused in: a population whose source cell is solid is
// replaced by the cell's own opposite post-collision population.
//
//   f_write[x][i] = solid(x - e_i) ? f_read[x][opp[i]]
//                                  : f_read[x - e_i][i]
//
// Ghost entries of f_read must hold the neighbors' boundary layers (or
// ambient equilibrium) before the call; solid covers the ghost ring too.
// Solid interior cells are skipped. gx/gy/gz are extended dims; in 2-D
// gz == 1 and z is not extended.
void stream_pull(const Stencil& s, const double* f_read, double* f_write,
                 const std::uint8_t* solid, int gx, int gy, int gz);

} // namespace plbm::lattice
