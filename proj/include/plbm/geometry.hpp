#pragma once
// Solid-cell geometry: full-domain mask plus the LBMGEO v1 file format.
//
// Format: one text header line "LBMGEO v1 <nx> <ny> <nz>\n" followed by
// nx*ny*nz raw bytes, 0 = fluid, 1 = solid, x-fastest order.

#include <cstdint>
#include <string>
#include <vector>

namespace plbm::iobench {

struct GeometryMask {
    int nx = 0, ny = 0, nz = 0;
    std::vector<std::uint8_t> solid; // x-fastest

    bool at(int x, int y, int z) const {
        return solid[std::size_t(x) +
                     std::size_t(nx) * (std::size_t(y) +
                                        std::size_t(ny) * std::size_t(z))] !=
               0;
    }
    void set(int x, int y, int z, bool v) {
        solid[std::size_t(x) +
              std::size_t(nx) * (std::size_t(y) +
                                 std::size_t(ny) * std::size_t(z))] =
            v ? 1 : 0;
    }
    std::size_t cells() const {
        return std::size_t(nx) * std::size_t(ny) * std::size_t(nz);
    }
    std::size_t solid_count() const;
};

GeometryMask make_empty_geometry(int nx, int ny, int nz);

// Throws std::runtime_error with a distinct message for a malformed
// header, nonsensical dimensions, a truncated payload, or bad flag bytes.
GeometryMask load_geometry(const std::string& path);

void save_geometry(const GeometryMask& mask, const std::string& path);

} // namespace plbm::iobench
