#pragma once
// Tile-to-device assignment: fairness-constrained minimization of the
// communication cost F.

#include "plbm/topology.hpp"

#include <cstdint>
#include <vector>

namespace plbm::sched {

enum class AssignPolicy { Simple, Optimized };

struct AssignmentState {
    std::vector<std::uint64_t> tiles_per_device;
    std::uint64_t total = 0;

    explicit AssignmentState(int n_devices = 1)
        : tiles_per_device(std::size_t(n_devices), 0) {}
};

// Fairness rule: only the least-loaded devices may receive the next
// tile, which keeps max - min <= 1 at all times.
std::vector<int> eligible_devices(const AssignmentState& st);

// Picks a device for an unassigned tile given the owners of its already
// existing face neighbors, updates the counts, and returns the id.
//   optimized: argmin F over eligible devices, ties -> lowest index.
//   simple:    lowest-index eligible device.
int assign_device(const std::vector<int>& neighbor_owners,
                  const DeviceTopology& topo, AssignmentState& st,
                  AssignPolicy policy, std::uint64_t xfer_bytes);

} // namespace plbm::sched
