#include "plbm/topology.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace plbm::sched {

DeviceTopology make_full_p2p(int n_devices) {
    DeviceTopology t;
    t.n_devices = n_devices;
    t.p2p.assign(std::size_t(n_devices) * n_devices, 1);
    return t;
}

void validate_topology(const DeviceTopology& t) {
    if (t.n_devices < 1)
        throw std::runtime_error("topology: need at least one device");
    if (t.p2p.size() != std::size_t(t.n_devices) * t.n_devices)
        throw std::runtime_error("topology: matrix size mismatch");
    for (int i = 0; i < t.n_devices; ++i) {
        if (!t.reachable(i, i))
            throw std::runtime_error("topology: diagonal must be 1 (device " +
                                     std::to_string(i) + ")");
        for (int j = 0; j < t.n_devices; ++j)
            if (t.reachable(i, j) != t.reachable(j, i))
                throw std::runtime_error(
                    "topology: matrix not symmetric at (" + std::to_string(i) +
                    "," + std::to_string(j) + ")");
    }
    if (!(t.weight_p2p > 0.0) || t.weight_p2p > t.weight_staged)
        throw std::runtime_error(
            "topology: need 0 < weight_p2p <= weight_staged");
}

DeviceTopology load_topology(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("topology: cannot open '" + path + "'");
    DeviceTopology t;
    if (!(in >> t.n_devices) || t.n_devices < 1)
        throw std::runtime_error("topology: bad device count in '" + path +
                                 "'");
    t.p2p.assign(std::size_t(t.n_devices) * t.n_devices, 0);
    for (int i = 0; i < t.n_devices; ++i)
        for (int j = 0; j < t.n_devices; ++j) {
            int v;
            if (!(in >> v) || (v != 0 && v != 1))
                throw std::runtime_error(
                    "topology: bad matrix entry at row " + std::to_string(i) +
                    " in '" + path + "'");
            t.p2p[std::size_t(i) * t.n_devices + j] = std::uint8_t(v);
        }
    std::string rest;
    if (in >> rest)
        throw std::runtime_error("topology: trailing tokens in '" + path +
                                 "'");
    validate_topology(t);
    return t;
}

std::vector<std::vector<int>> reachability_classes(const DeviceTopology& t) {
    std::vector<int> cls(std::size_t(t.n_devices), -1);
    std::vector<std::vector<int>> out;
    for (int i = 0; i < t.n_devices; ++i) {
        if (cls[i] >= 0) continue;
        std::vector<int> stack{i}, members;
        cls[i] = int(out.size());
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            members.push_back(v);
            for (int j = 0; j < t.n_devices; ++j)
                if (cls[j] < 0 && t.reachable(v, j)) {
                    cls[j] = cls[i];
                    stack.push_back(j);
                }
        }
        std::sort(members.begin(), members.end());
        out.push_back(std::move(members));
    }
    return out;
}

std::uint64_t transfer_size(std::uint64_t face_area_cells, int n_components,
                            const plbm::lattice::Stencil& s) {
    const std::uint64_t q_cross = std::uint64_t(s.crossing_count(0));
    return face_area_cells * std::uint64_t(n_components) * (q_cross + 1) * 8;
}

XferClass classify(int owner_a, int owner_b, const DeviceTopology& t) {
    if (owner_a == owner_b) return XferClass::Intra;
    return t.reachable(owner_a, owner_b) ? XferClass::P2P : XferClass::Staged;
}

double gamma_cost(int candidate, int neighbor_owner, const DeviceTopology& t,
                  std::uint64_t xfer_bytes) {
    switch (classify(candidate, neighbor_owner, t)) {
    case XferClass::Intra: return 0.0;
    case XferClass::P2P: return t.weight_p2p * double(xfer_bytes);
    default: return t.weight_staged * double(xfer_bytes);
    }
}

double f_cost(int candidate, const std::vector<int>& neighbor_owners,
              const DeviceTopology& t, std::uint64_t xfer_bytes) {
    double sum = 0.0;
    for (int owner : neighbor_owners)
        sum += gamma_cost(candidate, owner, t, xfer_bytes);
    return sum;
}

void record_exchange(int owner_a, int owner_b, DeviceTopology& t,
                     std::uint64_t xfer_bytes) {
    t.bytes[int(classify(owner_a, owner_b, t))].fetch_add(
        xfer_bytes, std::memory_order_relaxed);
}

} // namespace plbm::sched
