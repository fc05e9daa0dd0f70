#pragma once
// Multiphase / multicomponent closure: Peng-Robinson pressure, the
// pseudo-potential psi, intra- and inter-component interaction forces,
// gravity, and the velocity-shift forcing delta.

#include "plbm/stencil.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace plbm::physics {

struct EosParams {
    double a = 0.0;   // attraction coefficient
    double b = 0.0;   // covolume
    double R = 1.0;   // gas constant (lattice units)
    double T = plbm::lattice::kCs2; // temperature; RT = cs2 makes psi = 0
    double Tc = 0.0;  // critical temperature; 0 -> alpha-function off
    double omega = 0.0; // acentric factor
};

struct ComponentParams {
    double tau = 1.0;           // BGK relaxation time, > 0.5
    EosParams eos;
    double g_self = -1.0;       // self-coupling; fixes the psi radicand sign
    double beta = 1.16;         // force-weighting between psi and psi^2 terms
    double rho_ambient = 1.0;   // density of fresh / ghost cells
    std::array<double, 3> gravity{0.0, 0.0, 0.0};
};

// Symmetric inter-component couplings, zero diagonal, row-major n x n.
struct CouplingMatrix {
    int n = 0;
    std::vector<double> g; // g[a * n + b]
    double at(int a, int b) const { return g[std::size_t(a) * n + b]; }
};

// p = rho R T / (1 - b rho) - a theta(T) rho^2 / (1 + 2 b rho - b^2 rho^2)
// theta(T) = [1 + kappa (1 - sqrt(T/Tc))]^2 with the standard PR kappa;
// theta = 1 when Tc is unset. Throws std::domain_error at the b rho >= 1
// pole.
double pr_pressure(double rho, const ComponentParams& p);

// Derive a and b from critical point data:
// a = 0.45724 R^2 Tc^2 / pc, b = 0.0778 R Tc / pc.
void pr_from_critical(double Tc, double pc, double R, double& a, double& b);

// psi = sqrt(2 (press - cs2 rho) / (cs2 g_self)). A negative radicand
// counts one clamp and yields 0.
double pseudo_potential(double rho, double press, double g_self, double cs2,
                        std::uint64_t* clamp_count = nullptr);

// Interaction force on the cell at linear index `cell` of a psi buffer
// whose x/y/z neighbor offsets are stride[0..2] (ghost ring included):
//
//   F = -beta g psi(x) sum_i w_i psi(x+e_i) e_i
//       - ((1-beta)/2) g sum_i w_i psi(x+e_i)^2 e_i
//
// Normalization note: with sum_i w_i e_i e_i = cs2 I, this force gives
// a flat-interface momentum balance cs2 rho + (g cs2 / 2) psi^2 = const,
// which together with the psi definition above makes the total pressure
// equal the EOS pressure exactly — the coexistence densities are the
// EOS Maxwell densities. An extra (1/2) cs2 prefactor sometimes seen in
// transcriptions of this force breaks that identity (the attraction term
// becomes 6x too weak against cs2 rho) and no phase separation can
// survive; see the beta-split papers for the consistent form used here.
std::array<double, 3> intra_force(const double* psi, long cell,
                                  const long stride[3],
                                  const ComponentParams& p,
                                  const plbm::lattice::Stencil& s);

// Cross-component force, same normalization as intra_force:
// F = -g_cross psi_self(x) sum_i w_i psi_other(x+e_i) e_i.
std::array<double, 3> inter_force(double psi_self_at_x,
                                  const double* psi_other, long cell,
                                  const long stride[3], double g_cross,
                                  const plbm::lattice::Stencil& s);

inline std::array<double, 3> body_force(double rho,
                                        const std::array<double, 3>& gravity) {
    return {rho * gravity[0], rho * gravity[1], rho * gravity[2]};
}

// Velocity-shift forcing: delta_u = F/rho (dt = 1) and
// delta_f = f_eq(rho, u + delta_u) - f_eq(rho, u).
// Mass-neutral; injects exactly F of momentum. rho = 0 with F != 0 puts
// delta_f = 0 and counts one diagnostic.
void forcing_delta(double rho, const double u[3], const double F[3],
                   const plbm::lattice::Stencil& s, double* delta,
                   std::uint64_t* zero_rho_count = nullptr);

} // namespace plbm::physics
