#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "plbm/assign.hpp"
#include "plbm/stencil.hpp"
#include "plbm/topology.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

using namespace plbm::sched;
using plbm::lattice::make_stencil;
using plbm::lattice::StencilKind;

namespace {

// Two four-device P2P cliques with no links between them.
DeviceTopology two_hub() {
    DeviceTopology t;
    t.n_devices = 8;
    t.p2p.assign(64, 0);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            if (i / 4 == j / 4) t.p2p[std::size_t(i) * 8 + j] = 1;
    return t;
}

std::filesystem::path write_temp(const std::string& name,
                                 const std::string& body) {
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream out(p);
    out << body;
    return p;
}

} // namespace

TEST_CASE("transfer_size closed forms") {
    const auto d3 = make_stencil(StencilKind::D3Q19);
    const auto d2 = make_stencil(StencilKind::D2Q9);
    // 32x32 face, 2 components, D3Q19: 1024 * 2 * (5+1) * 8.
    CHECK(transfer_size(1024, 2, d3) == 98304);
    // 4-cell edge, 1 component, D2Q9: 4 * 1 * (3+1) * 8.
    CHECK(transfer_size(4, 1, d2) == 128);
    CHECK(transfer_size(0, 3, d3) == 0);
}

TEST_CASE("classify and gamma_cost over a partial topology") {
    DeviceTopology t;
    t.n_devices = 3;
    t.p2p = {1, 1, 0, 1, 1, 0, 0, 0, 1}; // only 0 <-> 1 linked
    validate_topology(t);

    CHECK(classify(0, 0, t) == XferClass::Intra);
    CHECK(classify(0, 1, t) == XferClass::P2P);
    CHECK(classify(1, 0, t) == XferClass::P2P);
    CHECK(classify(0, 2, t) == XferClass::Staged);

    const std::uint64_t size = 4096;
    CHECK(gamma_cost(1, 1, t, size) == 0.0);
    CHECK(gamma_cost(0, 1, t, size) == doctest::Approx(0.5 * 4096.0));
    CHECK(gamma_cost(2, 0, t, size) == doctest::Approx(1.0 * 4096.0));

    // F sums gamma over all listed neighbors; empty list costs nothing.
    CHECK(f_cost(0, {}, t, size) == 0.0);
    CHECK(f_cost(0, {0, 1, 2}, t, size) ==
          doctest::Approx(0.0 + 0.5 * 4096.0 + 1.0 * 4096.0));
    CHECK(f_cost(2, {0, 0}, t, size) == doctest::Approx(2.0 * 4096.0));
}

TEST_CASE("record_exchange bins bytes by class and accumulates") {
    DeviceTopology t = two_hub();
    record_exchange(2, 2, t, 100);
    record_exchange(0, 3, t, 200);
    record_exchange(1, 5, t, 300);
    record_exchange(1, 5, t, 300);
    const auto tot = t.byte_totals();
    CHECK(tot[int(XferClass::Intra)] == 100);
    CHECK(tot[int(XferClass::P2P)] == 200);
    CHECK(tot[int(XferClass::Staged)] == 600);
}

TEST_CASE("eligible_devices is the least-loaded set") {
    AssignmentState st(4);
    CHECK(eligible_devices(st) == std::vector<int>{0, 1, 2, 3});
    st.tiles_per_device = {1, 0, 2, 0};
    CHECK(eligible_devices(st) == std::vector<int>{1, 3});
    st.tiles_per_device = {3, 3, 3, 3};
    CHECK(eligible_devices(st) == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("assign_device: policy semantics and count updates") {
    const DeviceTopology t = two_hub();
    const std::uint64_t size = 1024;

    SUBCASE("simple always takes the lowest eligible index") {
        AssignmentState st(8);
        CHECK(assign_device({7, 7}, t, st, AssignPolicy::Simple, size) == 0);
        CHECK(st.tiles_per_device[0] == 1);
        CHECK(st.total == 1);
        // Device 0 is now loaded; lowest eligible is 1.
        CHECK(assign_device({7}, t, st, AssignPolicy::Simple, size) == 1);
        CHECK(st.total == 2);
    }

    SUBCASE("optimized joins its neighbors when allowed to") {
        AssignmentState st(8);
        CHECK(assign_device({5, 5}, t, st, AssignPolicy::Optimized, size) ==
              5);
        // Fairness: 5 is loaded, so the best remaining seats are the
        // other members of the second clique (P2P beats staged).
        const int second =
            assign_device({5, 5}, t, st, AssignPolicy::Optimized, size);
        CHECK(second == 4); // lowest-index tie-break among {4, 6, 7}
    }

    SUBCASE("no neighbors: every device ties at F = 0, lowest wins") {
        AssignmentState st(8);
        CHECK(assign_device({}, t, st, AssignPolicy::Optimized, size) == 0);
    }
}

TEST_CASE("fairness invariant holds under random assignment streams") {
    std::mt19937 rng(4242);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + int(rng() % 8);
        const DeviceTopology t =
            (trial % 2) ? make_full_p2p(n) : [&] {
                DeviceTopology x = make_full_p2p(n);
                for (int i = 0; i < n; ++i)
                    for (int j = i + 1; j < n; ++j)
                        if (rng() % 2) {
                            x.p2p[std::size_t(i) * n + j] = 0;
                            x.p2p[std::size_t(j) * n + i] = 0;
                        }
                return x;
            }();
        AssignmentState st(n);
        const AssignPolicy pol =
            (trial % 3 == 0) ? AssignPolicy::Simple : AssignPolicy::Optimized;
        for (int k = 0; k < 100; ++k) {
            std::vector<int> owners(rng() % 4);
            for (int& o : owners) o = int(rng() % n);
            const int d = assign_device(owners, t, st, pol, 512);
            CHECK(d >= 0);
            CHECK(d < n);
            const auto [mn, mx] = std::minmax_element(
                st.tiles_per_device.begin(), st.tiles_per_device.end());
            CHECK(*mx - *mn <= 1);
            CHECK(st.total == std::uint64_t(k + 1));
        }
    }
}

TEST_CASE("optimized matches brute-force argmin over the eligible set") {
    std::mt19937 rng(777);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + int(rng() % 8);
        DeviceTopology t = make_full_p2p(n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng() % 3 == 0) {
                    t.p2p[std::size_t(i) * n + j] = 0;
                    t.p2p[std::size_t(j) * n + i] = 0;
                }
        AssignmentState st(n);
        // Pre-load some devices to randomize the eligible set.
        for (int d = 0; d < n; ++d) st.tiles_per_device[d] = rng() % 2;
        std::vector<int> owners(rng() % 5);
        for (int& o : owners) o = int(rng() % n);
        const std::uint64_t size = 256 * (1 + rng() % 4);

        const std::vector<int> elig = eligible_devices(st);
        int best = -1;
        double best_f = 0.0;
        for (int d : elig) {
            const double f = f_cost(d, owners, t, size);
            if (best < 0 || f < best_f) {
                best = d;
                best_f = f;
            }
        }
        AssignmentState work = st;
        const int got =
            assign_device(owners, t, work, AssignPolicy::Optimized, size);
        CHECK(got == best);
        CHECK(f_cost(got, owners, t, size) == doctest::Approx(best_f));
    }
}

TEST_CASE("optimized never pays more than simple on a chain trace") {
    const DeviceTopology t = two_hub();
    const std::uint64_t size = 1024;

    auto run_chain = [&](AssignPolicy pol, std::vector<int>* picks) {
        AssignmentState st(8);
        double total = 0.0;
        int prev = -1;
        for (int k = 0; k < 32; ++k) {
            std::vector<int> owners;
            if (prev >= 0) owners.push_back(prev);
            const int d = assign_device(owners, t, st, pol, size);
            total += f_cost(d, owners, t, size);
            if (picks) picks->push_back(d);
            prev = d;
        }
        return total;
    };

    std::vector<int> a, b;
    const double opt = run_chain(AssignPolicy::Optimized, &a);
    const double simple = run_chain(AssignPolicy::Simple, nullptr);
    CHECK(opt <= simple);
    CHECK(opt < simple); // the chain crosses hubs under simple

    // Determinism: identical inputs give identical decisions.
    run_chain(AssignPolicy::Optimized, &b);
    CHECK(a == b);
}

TEST_CASE("make_full_p2p and validate_topology") {
    const DeviceTopology t = make_full_p2p(5);
    CHECK_NOTHROW(validate_topology(t));
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) CHECK(t.reachable(i, j));

    DeviceTopology bad = t;
    bad.p2p[1] = 0; // (0,1) != (1,0)
    CHECK_THROWS_AS(validate_topology(bad), std::runtime_error);

    DeviceTopology diag = t;
    diag.p2p[0] = 0;
    CHECK_THROWS_AS(validate_topology(diag), std::runtime_error);

    DeviceTopology w = t;
    w.weight_p2p = 2.0; // must not exceed weight_staged
    CHECK_THROWS_AS(validate_topology(w), std::runtime_error);
}

TEST_CASE("load_topology: round-trip and malformed inputs") {
    const auto good = write_temp("plbm_topo_good.txt",
                                 "3\n1 1 0\n1 1 0\n0 0 1\n");
    const DeviceTopology t = load_topology(good.string());
    CHECK(t.n_devices == 3);
    CHECK(t.reachable(0, 1));
    CHECK(!t.reachable(0, 2));
    const auto classes = reachability_classes(t);
    REQUIRE(classes.size() == 2);
    CHECK(classes[0] == std::vector<int>{0, 1});
    CHECK(classes[1] == std::vector<int>{2});

    CHECK_THROWS_AS(load_topology("/nonexistent/topology.txt"),
                    std::runtime_error);
    const auto bad_n = write_temp("plbm_topo_badn.txt", "x\n1\n");
    CHECK_THROWS_AS(load_topology(bad_n.string()), std::runtime_error);
    const auto zero_n = write_temp("plbm_topo_zeron.txt", "0\n");
    CHECK_THROWS_AS(load_topology(zero_n.string()), std::runtime_error);
    const auto short_row = write_temp("plbm_topo_short.txt", "2\n1 1\n1\n");
    CHECK_THROWS_AS(load_topology(short_row.string()), std::runtime_error);
    const auto bad_entry = write_temp("plbm_topo_entry.txt",
                                      "2\n1 2\n2 1\n");
    CHECK_THROWS_AS(load_topology(bad_entry.string()), std::runtime_error);
    const auto asym = write_temp("plbm_topo_asym.txt", "2\n1 1\n0 1\n");
    CHECK_THROWS_AS(load_topology(asym.string()), std::runtime_error);
    const auto no_diag = write_temp("plbm_topo_diag.txt", "2\n0 1\n1 1\n");
    CHECK_THROWS_AS(load_topology(no_diag.string()), std::runtime_error);
    const auto trailing = write_temp("plbm_topo_trail.txt",
                                     "2\n1 1\n1 1\n9\n");
    CHECK_THROWS_AS(load_topology(trailing.string()), std::runtime_error);

    std::filesystem::remove(good);
    std::filesystem::remove(bad_n);
    std::filesystem::remove(zero_n);
    std::filesystem::remove(short_row);
    std::filesystem::remove(bad_entry);
    std::filesystem::remove(asym);
    std::filesystem::remove(no_diag);
    std::filesystem::remove(trailing);
}

TEST_CASE("reachability_classes of the two-hub layout") {
    const auto classes = reachability_classes(two_hub());
    REQUIRE(classes.size() == 2);
    CHECK(classes[0] == std::vector<int>{0, 1, 2, 3});
    CHECK(classes[1] == std::vector<int>{4, 5, 6, 7});
    const auto one = reachability_classes(make_full_p2p(4));
    REQUIRE(one.size() == 1);
    CHECK(one[0] == std::vector<int>{0, 1, 2, 3});
}
