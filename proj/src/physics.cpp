#include "plbm/physics.hpp"

#include "plbm/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace plbm::physics {

using plbm::lattice::Stencil;

double pr_pressure(double rho, const ComponentParams& p) {
    const EosParams& e = p.eos;
    if (e.b * rho >= 1.0)
        throw std::domain_error("pr_pressure: b*rho >= 1 (EOS pole)");
    double theta = 1.0;
    if (e.Tc > 0.0) {
        const double kappa =
            0.37464 + 1.54226 * e.omega - 0.26992 * e.omega * e.omega;
        const double root = 1.0 + kappa * (1.0 - std::sqrt(e.T / e.Tc));
        theta = root * root;
    }
    const double ideal = rho * e.R * e.T / (1.0 - e.b * rho);
    const double attr = e.a * theta * rho * rho /
                        (1.0 + 2.0 * e.b * rho - e.b * e.b * rho * rho);
    return ideal - attr;
}

void pr_from_critical(double Tc, double pc, double R, double& a, double& b) {
    a = 0.45724 * R * R * Tc * Tc / pc;
    b = 0.0778 * R * Tc / pc;
}

double pseudo_potential(double rho, double press, double g_self, double cs2,
                        std::uint64_t* clamp_count) {
    const double radicand = 2.0 * (press - cs2 * rho) / (cs2 * g_self);
    if (radicand < 0.0) {
        if (clamp_count) ++*clamp_count;
        return 0.0;
    }
    return std::sqrt(radicand);
}

std::array<double, 3> intra_force(const double* psi, long cell,
                                  const long stride[3],
                                  const ComponentParams& p, const Stencil& s) {
    double s1[3] = {0, 0, 0}; // sum w_i psi(x') e_i
    double s2[3] = {0, 0, 0}; // sum w_i psi(x')^2 e_i
    for (int i = 1; i < s.q; ++i) {
        const long n = cell + s.e[i][0] * stride[0] + s.e[i][1] * stride[1] +
                       s.e[i][2] * stride[2];
        const double pn = psi[n];
        const double w = s.w[i];
        for (int d = 0; d < 3; ++d) {
            s1[d] += w * pn * s.e[i][d];
            s2[d] += w * pn * pn * s.e[i][d];
        }
    }
    const double c1 = -p.beta * p.g_self * psi[cell];
    const double c2 = -0.5 * (1.0 - p.beta) * p.g_self;
    return {c1 * s1[0] + c2 * s2[0], c1 * s1[1] + c2 * s2[1],
            c1 * s1[2] + c2 * s2[2]};
}

std::array<double, 3> inter_force(double psi_self_at_x,
                                  const double* psi_other, long cell,
                                  const long stride[3], double g_cross,
                                  const Stencil& s) {
    double s1[3] = {0, 0, 0};
    for (int i = 1; i < s.q; ++i) {
        const long n = cell + s.e[i][0] * stride[0] + s.e[i][1] * stride[1] +
                       s.e[i][2] * stride[2];
        const double w = s.w[i];
        for (int d = 0; d < 3; ++d) s1[d] += w * psi_other[n] * s.e[i][d];
    }
    const double c = -g_cross * psi_self_at_x;
    return {c * s1[0], c * s1[1], c * s1[2]};
}

void forcing_delta(double rho, const double u[3], const double F[3],
                   const Stencil& s, double* delta,
                   std::uint64_t* zero_rho_count) {
    if (rho <= 0.0) {
        for (int i = 0; i < s.q; ++i) delta[i] = 0.0;
        if ((F[0] != 0.0 || F[1] != 0.0 || F[2] != 0.0) && zero_rho_count)
            ++*zero_rho_count;
        return;
    }
    const double us[3] = {u[0] + F[0] / rho, u[1] + F[1] / rho,
                          u[2] + F[2] / rho};
    double eq0[plbm::lattice::kMaxQ], eq1[plbm::lattice::kMaxQ];
    plbm::lattice::equilibrium(rho, u, s, eq0);
    plbm::lattice::equilibrium(rho, us, s, eq1);
    for (int i = 0; i < s.q; ++i) delta[i] = eq1[i] - eq0[i];
}

} // namespace plbm::physics
