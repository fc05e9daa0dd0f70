#include "plbm/tile.hpp"

#include <string>

namespace plbm::mesh {

std::uint64_t tile_footprint_bytes(int extent, bool three_d, int n_comp,
                                   int q) {
    const std::uint64_t g = std::uint64_t(extent) + 2;
    const std::uint64_t gcells = g * g * (three_d ? g : 1);
    return gcells * (std::uint64_t(n_comp) * (2 * std::uint64_t(q) + 8) * 8 +
                     1);
}

std::string tile_footprint_formula() {
    return "gcells*(n_comp*(2*q+8)*8 + 1), gcells=(extent+2)^2*(extent+2 if "
           "3-D else 1); doubles: 2 population buffers (q each), rho, "
           "ux/uy/uz, prev ux/uy/uz, psi; plus 1 byte solid mask";
}

} // namespace plbm::mesh
