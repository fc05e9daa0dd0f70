#pragma once
// Field snapshots: the full bounding-box grid as raw little-endian f64
// in x-fastest order, absent tiles filled with the ambient value, plus
// a text sidecar and an optional mid-plane PGM slice.

#include "plbm/scenario.hpp"
#include "plbm/tilemap.hpp"

#include <string>
#include <vector>

namespace plbm::iobench {

// field is "rho", "u_magnitude" or "psi".
bool is_dump_field(const std::string& field);

// Fill value used for cells outside any tile: rho -> rho_ambient,
// u_magnitude -> 0, psi -> the ambient pseudo-potential.
double ambient_fill(const mesh::TileMap& map, const std::string& field,
                    int component);

// Assembles the bounding-box grid for one field of one component.
std::vector<double> gather_field(const mesh::TileMap& map,
                                 std::array<int, 3> domain,
                                 const std::string& field, int component);

// Writes base + ".raw" (payload), base + ".meta" (dims, field,
// component, iteration, fill value, and PGM normalization bounds when a
// slice is written), and optionally base + ".pgm" (mid-z slice,
// min-max normalized).
void dump_field(const mesh::TileMap& map, std::array<int, 3> domain,
                const std::string& field, int component, long iteration,
                const std::string& base_path, bool with_pgm);

// Reads a raw f64 dump back; size from the file length.
std::vector<double> read_raw(const std::string& path);

} // namespace plbm::iobench
