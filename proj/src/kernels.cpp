#include "plbm/kernels.hpp"

namespace plbm::lattice {

void stream_pull(const Stencil& s, const double* f_read, double* f_write,
                 const std::uint8_t* solid, int gx, int gy, int gz) {
    const std::size_t gcells =
        std::size_t(gx) * std::size_t(gy) * std::size_t(gz);
    const bool three_d = gz > 1;
    const int zlo = three_d ? 1 : 0;
    const int zhi = three_d ? gz - 1 : 1;
    for (int i = 0; i < s.q; ++i) {
        const int ex = s.e[i][0], ey = s.e[i][1], ez = s.e[i][2];
        const long shift = ex + long(gx) * (ey + long(gy) * ez);
        const double* src = f_read + std::size_t(i) * gcells;
        const double* rev = f_read + std::size_t(s.opp[i]) * gcells;
        double* dst = f_write + std::size_t(i) * gcells;
        for (int z = zlo; z < zhi; ++z) {
            for (int y = 1; y < gy - 1; ++y) {
                const long row = long(gx) * (y + long(gy) * z);
                for (int x = 1; x < gx - 1; ++x) {
                    const long c = row + x;
                    if (solid[c]) continue;
                    const long from = c - shift;
                    dst[c] = solid[from] ? rev[c] : src[from];
                }
            }
        }
    }
}

} // namespace plbm::lattice
