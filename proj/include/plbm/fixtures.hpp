#pragma once
// Built-in solid-geometry generators for the `gen-geometry` command and
// the test suite.

#include "plbm/geometry.hpp"

namespace plbm::iobench {

// Closed box: a one-cell solid shell on every domain face.
GeometryMask gen_closed_box(int nx, int ny, int nz);

// Open box: solid shell with the +x face left open (fluid).
GeometryMask gen_open_box(int nx, int ny, int nz);

// Straight channel along x: solid walls on the y (and z, when nz > 1)
// extremes, open at both x ends.
GeometryMask gen_channel(int nx, int ny, int nz);

// L-shaped channel in the x-y plane (nz = 1): the fluid region is the
// union of a vertical leg (x < leg_w) and a horizontal leg (y < leg_h),
// walled by the region cells whose Chebyshev-1 neighborhood leaves the
// region or the domain; everything outside the region is solid.
GeometryMask gen_l_channel(int nx, int ny, int leg_w, int leg_h);

// Grid of square solid pillars in a channel: pillar size `s`, pitch
// `pitch`, starting at `s` cells from each wall. 2-D (nz = 1).
GeometryMask gen_channel_grid(int nx, int ny, int s, int pitch);

} // namespace plbm::iobench
