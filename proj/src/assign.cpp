#include "plbm/assign.hpp"

#include <algorithm>
#include <stdexcept>

namespace plbm::sched {

std::vector<int> eligible_devices(const AssignmentState& st) {
    const std::uint64_t lo = *std::min_element(st.tiles_per_device.begin(),
                                               st.tiles_per_device.end());
    std::vector<int> out;
    for (int d = 0; d < int(st.tiles_per_device.size()); ++d)
        if (st.tiles_per_device[d] == lo) out.push_back(d);
    return out;
}

int assign_device(const std::vector<int>& neighbor_owners,
                  const DeviceTopology& topo, AssignmentState& st,
                  AssignPolicy policy, std::uint64_t xfer_bytes) {
    if (st.tiles_per_device.empty())
        throw std::logic_error("assign_device: no devices");
    const std::vector<int> eligible = eligible_devices(st);
    int chosen = eligible.front(); // lowest index; the "simple" answer
    if (policy == AssignPolicy::Optimized) {
        double best = f_cost(chosen, neighbor_owners, topo, xfer_bytes);
        for (std::size_t k = 1; k < eligible.size(); ++k) {
            const double c =
                f_cost(eligible[k], neighbor_owners, topo, xfer_bytes);
            if (c < best) { // strict: ties keep the lowest index
                best = c;
                chosen = eligible[k];
            }
        }
    }
    ++st.tiles_per_device[std::size_t(chosen)];
    ++st.total;
    return chosen;
}

} // namespace plbm::sched
