#pragma once
// Simulated multi-device topology: P2P reachability, transfer sizes,
// and the per-exchange cost function gamma / per-tile cost F.

#include "plbm/stencil.hpp"

#include <array>
#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

namespace plbm::sched {

enum class XferClass : int { Intra = 0, P2P = 1, Staged = 2 };

struct DeviceTopology {
    int n_devices = 1;
    std::vector<std::uint8_t> p2p; // n x n, symmetric, diagonal 1
    double weight_p2p = 0.5;       // cost multiplier for P2P transfers
    double weight_staged = 1.0;    // cost multiplier for staged transfers
    // Modeled bytes actually exchanged, by class. Atomic so concurrent
    // workers can record without lost updates.
    std::array<std::atomic<std::uint64_t>, 3> bytes{};

    DeviceTopology() = default;
    DeviceTopology(const DeviceTopology& o)
        : n_devices(o.n_devices), p2p(o.p2p), weight_p2p(o.weight_p2p),
          weight_staged(o.weight_staged) {
        for (int k = 0; k < 3; ++k)
            bytes[k].store(o.bytes[k].load(std::memory_order_relaxed),
                           std::memory_order_relaxed);
    }
    DeviceTopology& operator=(const DeviceTopology& o) {
        n_devices = o.n_devices;
        p2p = o.p2p;
        weight_p2p = o.weight_p2p;
        weight_staged = o.weight_staged;
        for (int k = 0; k < 3; ++k)
            bytes[k].store(o.bytes[k].load(std::memory_order_relaxed),
                           std::memory_order_relaxed);
        return *this;
    }

    bool reachable(int a, int b) const {
        return p2p[std::size_t(a) * n_devices + b] != 0;
    }
    std::array<std::uint64_t, 3> byte_totals() const {
        return {bytes[0].load(std::memory_order_relaxed),
                bytes[1].load(std::memory_order_relaxed),
                bytes[2].load(std::memory_order_relaxed)};
    }
};

// All devices mutually P2P-reachable.
DeviceTopology make_full_p2p(int n_devices);

// Text format: first line n_devices, then n_devices lines of 0/1 flags.
// Throws std::runtime_error on malformed input, asymmetry, or a false
// diagonal.
DeviceTopology load_topology(const std::string& path);
void validate_topology(const DeviceTopology& t);

// Connected components of the P2P graph, each sorted, ordered by their
// smallest member.
std::vector<std::vector<int>> reachability_classes(const DeviceTopology& t);

// Modeled bytes to move one tile face per step and direction:
// face_area_cells x n_components x (q_cross + 1) x 8, the +1 being the
// pseudo-potential halo value.
std::uint64_t transfer_size(std::uint64_t face_area_cells, int n_components,
                            const plbm::lattice::Stencil& s);

// Cost of placing a tile on `candidate` given one neighbor's owner:
// 0 same device, weight_p2p x size over P2P, weight_staged x size else.
double gamma_cost(int candidate, int neighbor_owner, const DeviceTopology& t,
                  std::uint64_t xfer_bytes);

// F = sum of gamma over the owners of all existing face neighbors.
double f_cost(int candidate, const std::vector<int>& neighbor_owners,
              const DeviceTopology& t, std::uint64_t xfer_bytes);

// Classification used by both gamma and the byte accounting.
XferClass classify(int owner_a, int owner_b, const DeviceTopology& t);

// Adds xfer_bytes to the counter of the matching class.
void record_exchange(int owner_a, int owner_b, DeviceTopology& t,
                     std::uint64_t xfer_bytes);

} // namespace plbm::sched
