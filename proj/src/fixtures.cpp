#include "plbm/fixtures.hpp"

#include <stdexcept>

namespace plbm::iobench {

namespace {

void require_dims(int nx, int ny, int nz, int min_xy) {
    if (nx < min_xy || ny < min_xy || nz < 1)
        throw std::runtime_error("geometry generator: domain too small");
}

void shell(GeometryMask& m, bool walls_z) {
    for (int z = 0; z < m.nz; ++z)
        for (int y = 0; y < m.ny; ++y)
            for (int x = 0; x < m.nx; ++x) {
                const bool edge =
                    x == 0 || x == m.nx - 1 || y == 0 || y == m.ny - 1 ||
                    (walls_z && (z == 0 || z == m.nz - 1));
                if (edge) m.set(x, y, z, true);
            }
}

} // namespace

GeometryMask gen_closed_box(int nx, int ny, int nz) {
    require_dims(nx, ny, nz, 3);
    GeometryMask m = make_empty_geometry(nx, ny, nz);
    shell(m, nz > 1);
    return m;
}

GeometryMask gen_open_box(int nx, int ny, int nz) {
    GeometryMask m = gen_closed_box(nx, ny, nz);
    const int zlo = nz > 1 ? 1 : 0;
    const int zhi = nz > 1 ? nz - 1 : 1;
    for (int z = zlo; z < zhi; ++z)
        for (int y = 1; y < ny - 1; ++y)
            m.set(nx - 1, y, z, false);
    return m;
}

GeometryMask gen_channel(int nx, int ny, int nz) {
    require_dims(nx, ny, nz, 3);
    GeometryMask m = make_empty_geometry(nx, ny, nz);
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) {
                const bool wall = y == 0 || y == ny - 1 ||
                                  (nz > 1 && (z == 0 || z == nz - 1));
                if (wall) m.set(x, y, z, true);
            }
    return m;
}

GeometryMask gen_l_channel(int nx, int ny, int leg_w, int leg_h) {
    require_dims(nx, ny, 1, 3);
    if (leg_w < 3 || leg_h < 3 || leg_w > nx || leg_h > ny)
        throw std::runtime_error("geometry generator: bad L-channel legs");
    GeometryMask m = make_empty_geometry(nx, ny, 1);
    auto in_region = [&](int x, int y) {
        return x >= 0 && x < nx && y >= 0 && y < ny &&
               (x < leg_w || y < leg_h);
    };
    for (int y = 0; y < ny; ++y)
        for (int x = 0; x < nx; ++x) {
            if (!in_region(x, y)) {
                m.set(x, y, 0, true);
                continue;
            }
            // Wall: region cell with a Chebyshev-1 neighbor outside the
            // region or outside the domain.
            bool wall = false;
            for (int dy = -1; dy <= 1 && !wall; ++dy)
                for (int dx = -1; dx <= 1 && !wall; ++dx)
                    if (!in_region(x + dx, y + dy)) wall = true;
            if (wall) m.set(x, y, 0, true);
        }
    return m;
}

GeometryMask gen_channel_grid(int nx, int ny, int s, int pitch) {
    require_dims(nx, ny, 1, 3);
    if (s < 1 || pitch <= s)
        throw std::runtime_error(
            "geometry generator: pillar size must be >= 1 and pitch > size");
    GeometryMask m = gen_channel(nx, ny, 1);
    for (int y0 = 1 + s; y0 + s <= ny - 1 - s; y0 += pitch)
        for (int x0 = s; x0 + s <= nx - s; x0 += pitch)
            for (int y = y0; y < y0 + s; ++y)
                for (int x = x0; x < x0 + s; ++x)
                    m.set(x, y, 0, true);
    return m;
}

} // namespace plbm::iobench
