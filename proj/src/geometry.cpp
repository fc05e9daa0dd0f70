#include "plbm/geometry.hpp"

#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace plbm::iobench {

std::size_t GeometryMask::solid_count() const {
    return std::accumulate(solid.begin(), solid.end(), std::size_t{0});
}

GeometryMask make_empty_geometry(int nx, int ny, int nz) {
    GeometryMask m;
    m.nx = nx;
    m.ny = ny;
    m.nz = nz;
    m.solid.assign(std::size_t(nx) * ny * nz, 0);
    return m;
}

GeometryMask load_geometry(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("geometry: cannot open '" + path + "'");
    std::string header;
    if (!std::getline(in, header))
        throw std::runtime_error("geometry: missing header line in '" + path +
                                 "'");
    std::istringstream hs(header);
    std::string magic, version;
    long nx = 0, ny = 0, nz = 0;
    if (!(hs >> magic >> version >> nx >> ny >> nz) || magic != "LBMGEO" ||
        version != "v1")
        throw std::runtime_error("geometry: malformed header '" + header +
                                 "' in '" + path + "'");
    std::string rest;
    if (hs >> rest)
        throw std::runtime_error("geometry: trailing tokens in header of '" +
                                 path + "'");
    if (nx <= 0 || ny <= 0 || nz <= 0)
        throw std::runtime_error("geometry: non-positive dimensions in '" +
                                 path + "'");
    GeometryMask m = make_empty_geometry(int(nx), int(ny), int(nz));
    in.read(reinterpret_cast<char*>(m.solid.data()),
            std::streamsize(m.solid.size()));
    if (std::size_t(in.gcount()) != m.solid.size())
        throw std::runtime_error("geometry: truncated payload in '" + path +
                                 "' (expected " + std::to_string(m.cells()) +
                                 " bytes, got " + std::to_string(in.gcount()) +
                                 ")");
    char extra;
    if (in.read(&extra, 1))
        throw std::runtime_error("geometry: payload longer than header dims "
                                 "in '" + path + "'");
    for (std::uint8_t b : m.solid)
        if (b > 1)
            throw std::runtime_error("geometry: flag byte out of range in '" +
                                     path + "' (only 0/1 allowed)");
    return m;
}

void save_geometry(const GeometryMask& mask, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("geometry: cannot write '" + path + "'");
    out << "LBMGEO v1 " << mask.nx << ' ' << mask.ny << ' ' << mask.nz
        << '\n';
    out.write(reinterpret_cast<const char*>(mask.solid.data()),
              std::streamsize(mask.solid.size()));
    if (!out)
        throw std::runtime_error("geometry: write failed for '" + path + "'");
}

} // namespace plbm::iobench
