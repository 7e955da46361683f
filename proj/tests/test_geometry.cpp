#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "wakelab/angles.hpp"
#include "wakelab/layout.hpp"
#include "wakelab/rng.hpp"
#include "wakelab/wake_graph.hpp"

using namespace wakelab;

TEST_CASE("wrap_angle basics") {
    CHECK(wrap_angle(350.0 - 10.0) == Catch::Approx(-20.0).margin(1e-12));
    CHECK(wrap_angle(0.0) == 0.0);
    CHECK(wrap_angle(539.5) == Catch::Approx(179.5).margin(1e-12));
    CHECK(wrap_angle(180.0) == -180.0);  // half-open interval
    CHECK(wrap_angle(-180.0) == -180.0);
    CHECK_THROWS_AS(wrap_angle(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
    CHECK_THROWS_AS(wrap_angle(std::numeric_limits<double>::infinity()), std::domain_error);
}

TEST_CASE("wrap_angle is 360-periodic") {
    Rng rng(123);
    for (int trial = 0; trial < 200; ++trial) {
        const double x = rng.uniform(-720.0, 720.0);
        const double base = wrap_angle(x);
        for (int k = -10; k <= 10; ++k) {
            CHECK(std::abs(wrap_angle(x + 360.0 * k) - base) < 1e-9);
        }
        CHECK(base >= -180.0);
        CHECK(base < 180.0);
    }
}

TEST_CASE("yaw_angle follows the offset formula") {
    CHECK(yaw_angle(256.0, 250.0) == Catch::Approx(6.0).margin(1e-12));
    CHECK(yaw_angle(0.0, 350.0) == Catch::Approx(10.0).margin(1e-12));
    CHECK(yaw_angle(180.0, 180.0) == 0.0);

    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const double k = rng.uniform(0.0, 360.0);
        const double a = rng.uniform(-400.0, 400.0);
        const double beta = positive_mod_360(k - a);
        CHECK(yaw_angle(k, beta) == Catch::Approx(wrap_angle(a)).margin(1e-9));
    }
}

TEST_CASE("flow_vector convention") {
    CHECK(flow_vector(270.0).x() == Catch::Approx(1.0).margin(1e-12));
    CHECK(flow_vector(270.0).y() == Catch::Approx(0.0).margin(1e-12));
    CHECK(flow_vector(0.0).x() == Catch::Approx(0.0).margin(1e-12));
    CHECK(flow_vector(0.0).y() == Catch::Approx(-1.0).margin(1e-12));
    CHECK(flow_vector(180.0).y() == Catch::Approx(1.0).margin(1e-12));

    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        CHECK(flow_vector(rng.uniform(0.0, 360.0)).norm() == Catch::Approx(1.0));
    }
}

TEST_CASE("upstream_order sorts by flow projection") {
    FarmLayout line({{0.0, 0.0}, {500.0, 0.0}, {1000.0, 0.0}}, 100.0);

    // Wind from the west: the west-most turbine is first.
    CHECK(upstream_order(line, 270.0) == std::vector<int>{0, 1, 2});
    // Reversed wind reverses the order.
    CHECK(upstream_order(line, 90.0) == std::vector<int>{2, 1, 0});
    // Flow perpendicular to the line: stable tie-break by index.
    CHECK(upstream_order(line, 0.0) == std::vector<int>{0, 1, 2});
    CHECK(upstream_order(line, 180.0) == std::vector<int>{0, 1, 2});

    Rng rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Eigen::Vector2d> pos;
        for (int i = 0; i < 7; ++i) {
            pos.emplace_back(rng.uniform(-4000.0, 4000.0), rng.uniform(-4000.0, 4000.0));
        }
        FarmLayout farm(pos, 100.0);
        const double k = rng.uniform(0.0, 360.0);
        auto fwd = upstream_order(farm, k);
        auto bwd = upstream_order(farm, positive_mod_360(k + 180.0));
        std::reverse(bwd.begin(), bwd.end());
        CHECK(fwd == bwd);
    }
}

TEST_CASE("wake graph edge rule and features") {
    const double d = 100.0;
    SECTION("two turbines five diameters apart along the flow axis") {
        FarmLayout pair({{0.0, 0.0}, {5.0 * d, 0.0}}, d);
        const WakeGraph g = build_wake_graph(pair, 270.0);
        REQUIRE(g.edges.size() == 1);
        CHECK(g.edges[0].src == 0);
        CHECK(g.edges[0].dst == 1);
        CHECK(g.edge_features(0, 0) == Catch::Approx(0.625).margin(1e-12));
        // Directly downwind: relative angle wraps to -180.
        CHECK(g.edge_features(0, 1) == Catch::Approx(0.0).margin(1e-12));
        CHECK(g.edge_features(0, 2) == Catch::Approx(-1.0).margin(1e-12));
    }
    SECTION("two turbines nine diameters apart") {
        FarmLayout pair({{0.0, 0.0}, {9.0 * d, 0.0}}, d);
        CHECK(build_wake_graph(pair, 270.0).edges.empty());
        CHECK(build_wake_graph(pair, 90.0).edges.empty());
    }
    SECTION("perpendicular pair has no edge either way") {
        FarmLayout pair({{0.0, 0.0}, {0.0, 5.0 * d}}, d);
        CHECK(build_wake_graph(pair, 270.0).edges.empty());
    }
}

TEST_CASE("diamond wake graph is acyclic for every integer direction") {
    const FarmLayout farm = diamond_layout(4.0, 240.0);
    for (int k = 0; k < 360; ++k) {
        const WakeGraph g = build_wake_graph(farm, static_cast<double>(k));
        CHECK(is_acyclic(g));
    }
}

TEST_CASE("wake graph is invariant under rigid translation") {
    const FarmLayout farm = diamond_layout(4.0, 240.0);
    std::vector<Eigen::Vector2d> moved = farm.positions;
    for (auto& p : moved) p += Eigen::Vector2d(12345.5, -98765.25);
    const FarmLayout shifted(moved, farm.rotor_diameter);

    for (double k : {0.0, 37.0, 123.4, 271.0}) {
        const WakeGraph a = build_wake_graph(farm, k);
        const WakeGraph b = build_wake_graph(shifted, k);
        REQUIRE(a.edges.size() == b.edges.size());
        for (std::size_t e = 0; e < a.edges.size(); ++e) {
            CHECK(a.edges[e].src == b.edges[e].src);
            CHECK(a.edges[e].dst == b.edges[e].dst);
            for (int c = 0; c < 3; ++c) {
                CHECK(a.edge_features(e, c) ==
                      Catch::Approx(b.edge_features(e, c)).margin(1e-9));
            }
        }
    }
}

TEST_CASE("reversing the wind reverses every edge") {
    const FarmLayout farm = diamond_layout(4.0, 240.0);
    for (double k : {10.0, 84.0, 200.5}) {
        const WakeGraph fwd = build_wake_graph(farm, k);
        const WakeGraph bwd = build_wake_graph(farm, positive_mod_360(k + 180.0));
        REQUIRE(fwd.edges.size() == bwd.edges.size());
        std::set<std::pair<int, int>> reversed;
        for (const auto& e : bwd.edges) reversed.insert({e.dst, e.src});
        for (const auto& e : fwd.edges) {
            CHECK(reversed.count({e.src, e.dst}) == 1);
        }
    }
}

TEST_CASE("diamond layout geometry") {
    const double d = 240.0;
    const FarmLayout farm = diamond_layout(4.0, d);
    REQUIRE(farm.n_turbines() == 19);

    double min_dist = 1e30;
    for (int i = 0; i < 19; ++i) {
        double nearest = 1e30;
        for (int j = 0; j < 19; ++j) {
            if (i == j) continue;
            nearest = std::min(nearest, (farm.positions[i] - farm.positions[j]).norm());
        }
        // Every turbine's nearest neighbor sits at exactly 4 diameters.
        CHECK(std::abs(nearest - 4.0 * d) / (4.0 * d) < 1e-9);
        min_dist = std::min(min_dist, nearest);
    }
    CHECK(min_dist == Catch::Approx(960.0).epsilon(1e-9));

    // 180-degree rotational symmetry about the centroid.
    const Eigen::Vector2d c = farm.centroid();
    for (const auto& p : farm.positions) {
        const Eigen::Vector2d mirrored = 2.0 * c - p;
        bool found = false;
        for (const auto& q : farm.positions) {
            if ((q - mirrored).norm() < 1e-6) found = true;
        }
        CHECK(found);
    }

    const FarmLayout unit = diamond_layout(1.0, 1.0);
    double unit_min = 1e30;
    for (int i = 0; i < unit.n_turbines(); ++i) {
        for (int j = i + 1; j < unit.n_turbines(); ++j) {
            unit_min = std::min(unit_min, (unit.positions[i] - unit.positions[j]).norm());
        }
    }
    CHECK(unit_min == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("layout validation") {
    CHECK_THROWS_AS(FarmLayout({}, 240.0), std::invalid_argument);
    CHECK_THROWS_AS(FarmLayout({{0.0, 0.0}}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(FarmLayout({{0.0, 0.0}, {0.0, 0.0}}, 240.0), std::invalid_argument);
    CHECK_NOTHROW(FarmLayout({{0.0, 0.0}}, 240.0));
}

TEST_CASE("layout file round trip") {
    const FarmLayout farm = diamond_layout(4.0, 240.0);
    const std::string path = "layout_roundtrip.txt";
    save_layout(farm, path);
    const FarmLayout loaded = load_layout(path);
    REQUIRE(loaded.n_turbines() == farm.n_turbines());
    CHECK(loaded.rotor_diameter == farm.rotor_diameter);
    for (int i = 0; i < farm.n_turbines(); ++i) {
        CHECK(loaded.positions[i] == farm.positions[i]);
    }
    std::remove(path.c_str());

    // Missing header is rejected.
    {
        std::ofstream bad("layout_bad.txt");
        bad << "0 0\n1 1\n";
    }
    CHECK_THROWS(load_layout("layout_bad.txt"));
    std::remove("layout_bad.txt");
}

TEST_CASE("generator helpers") {
    const FarmLayout row = row_layout(3, 4.0, 240.0);
    REQUIRE(row.n_turbines() == 3);
    CHECK((row.positions[1] - row.positions[0]).norm() == Catch::Approx(960.0));

    const FarmLayout cross = cross_layout(4.0, 240.0);
    REQUIRE(cross.n_turbines() == 5);
    CHECK((cross.positions[1] - cross.positions[0]).norm() == Catch::Approx(960.0));
}
