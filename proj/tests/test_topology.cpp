#include "doctest.h"

#include "dps/topology.hpp"

#include <stdexcept>

using namespace dps;

TEST_CASE("ring population")
{
    CHECK(ring_population(RingTopology(5, 3), 1) == 5.0);
    CHECK(ring_population(RingTopology(3, 3), 0) == 0.0);
    CHECK(ring_population(RingTopology(3, 3), 2) == 9.0);
    CHECK_THROWS_AS(ring_population(RingTopology(3, 3), 4), std::domain_error);
    CHECK_THROWS_AS(ring_population(RingTopology(3, 3), -1), std::domain_error);
}

TEST_CASE("topology rejects empty networks")
{
    CHECK_THROWS_AS(RingTopology(0, 3), std::domain_error);
    CHECK_THROWS_AS(RingTopology(3, 0), std::domain_error);
}

TEST_CASE("child ratio")
{
    CHECK(child_ratio(4, 4) == 0.0);
    CHECK(child_ratio(1, 3) == 3.0);
    CHECK(child_ratio(2, 5) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(child_ratio(0, 3), std::domain_error);
    CHECK_THROWS_AS(child_ratio(4, 3), std::domain_error);
}

TEST_CASE("subtree size")
{
    CHECK(subtree_size(3, 3) == 0.0);
    CHECK(subtree_size(1, 3) == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(subtree_size(1, 5) == doctest::Approx(24.0).epsilon(1e-14));
    CHECK_THROWS_AS(subtree_size(6, 5), std::domain_error);

    for (int rings = 2; rings <= 50; ++rings) {
        CAPTURE(rings);
        CHECK(subtree_size(1, rings) == doctest::Approx(rings * rings - 1.0).epsilon(1e-12));
        for (int d = 1; d < rings; ++d) {
            CHECK(subtree_size(d, rings) > subtree_size(d + 1, rings));
        }
        const auto all = subtree_sizes(rings);
        REQUIRE(all.size() == static_cast<std::size_t>(rings) + 1);
        for (int d = 1; d <= rings; ++d) {
            CHECK(all[static_cast<std::size_t>(d)] == subtree_size(d, rings));
        }
    }
}

TEST_CASE("node totals")
{
    CHECK(total_nodes(RingTopology(3, 5)) == 75);
    CHECK(total_nodes(RingTopology(1, 1)) == 1);
    CHECK(total_nodes(RingTopology(5, 3)) == 45);
    for (int c = 1; c <= 50; ++c) {
        for (int rings = 1; rings <= 50; ++rings) {
            const RingTopology topo(c, rings);
            double sum = 0.0;
            for (int d = 1; d <= rings; ++d) {
                sum += ring_population(topo, d);
            }
            CHECK(sum == static_cast<double>(total_nodes(topo)));
        }
    }
}

TEST_CASE("ring ratios do not depend on C")
{
    // the functions take no C at all; the populations they summarize do
    for (int c = 1; c <= 6; ++c) {
        const RingTopology topo(c, 6);
        for (int d = 1; d < 6; ++d) {
            CHECK(ring_population(topo, d + 1) / ring_population(topo, d) ==
                  doctest::Approx(child_ratio(d, 6)).epsilon(1e-15));
        }
    }
}
