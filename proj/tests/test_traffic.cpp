#include "doctest.h"

#include "dps/traffic.hpp"

#include <stdexcept>

using namespace dps;

TEST_CASE("baseline traffic")
{
    CHECK(baseline_node_traffic(1, 5, 1.0, 1.0).total() == doctest::Approx(49.0));
    const auto leaf = baseline_node_traffic(4, 4, 1.0, 1.0);
    CHECK(leaf.tx == 1.0);
    CHECK(leaf.rx == 0.0);
    CHECK(baseline_node_traffic(1, 3, 1.0 / 60.0, 86400.0).total() == doctest::Approx(24480.0));
    CHECK_THROWS_AS(baseline_node_traffic(1, 3, 0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(baseline_node_traffic(1, 3, 1.0, -1.0), std::domain_error);
    CHECK_THROWS_AS(baseline_node_traffic(0, 3, 1.0, 1.0), std::domain_error);
}

TEST_CASE("first ring is the bottleneck")
{
    for (int rings = 2; rings <= 12; ++rings) {
        const double first = baseline_node_traffic(1, rings, 1.0, 1.0).total();
        for (int d = 2; d <= rings; ++d) {
            CHECK(first > baseline_node_traffic(d, rings, 1.0, 1.0).total());
        }
    }
}

TEST_CASE("gateway to node traffic")
{
    auto t = gw_to_node_traffic(1, 5);
    CHECK(t.rx == doctest::Approx(25.0));
    CHECK(t.tx == doctest::Approx(24.0));
    t = gw_to_node_traffic(4, 4);
    CHECK(t.tx == 0.0);
    CHECK(t.rx == 1.0);
    t = gw_to_node_traffic(1, 3);
    CHECK(t.rx == doctest::Approx(9.0));
    CHECK(t.tx == doctest::Approx(8.0));
}

TEST_CASE("dissemination cost per mode")
{
    CHECK(dissemination_cost(DisseminationMode::gw_unicast, 5) == doctest::Approx(49.0));
    CHECK(dissemination_cost(DisseminationMode::sensor_chosen, 5) == doctest::Approx(49.0));
    CHECK(dissemination_cost(DisseminationMode::gw_unicast_aggregated, 5) == doctest::Approx(4.0));
    CHECK(dissemination_cost(DisseminationMode::gw_unicast_aggregated, 1) == doctest::Approx(1.0));
    for (int rings = 1; rings <= 10; ++rings) {
        CHECK(dissemination_cost(DisseminationMode::gw_broadcast, rings) == 1.0);
        CHECK(dissemination_cost(DisseminationMode::independent, rings) == 0.0);
        CHECK(gw_to_node_traffic(1, rings).total() ==
              doctest::Approx(dissemination_cost(DisseminationMode::gw_unicast, rings)));
        CHECK(dissemination_cost(DisseminationMode::gw_unicast, rings) ==
              doctest::Approx(2.0 * rings * rings - 1.0));
    }
    CHECK_THROWS_AS(dissemination_cost(DisseminationMode::gw_unicast, 0), std::domain_error);
}

TEST_CASE("per-ring dissemination split")
{
    const auto uni = dissemination_traffic(DisseminationMode::gw_unicast, 2, 4);
    const auto sensor = dissemination_traffic(DisseminationMode::sensor_chosen, 2, 4);
    CHECK(uni.tx == doctest::Approx(sensor.rx));
    CHECK(uni.rx == doctest::Approx(sensor.tx));
    const auto agg = dissemination_traffic(DisseminationMode::gw_unicast_aggregated, 1, 3);
    CHECK(agg.tx == doctest::Approx(3.0));
    CHECK(agg.rx == 1.0);
}

TEST_CASE("traffic scales linearly in f and T")
{
    const auto base = baseline_node_traffic(2, 6, 0.5, 10.0);
    const auto f2 = baseline_node_traffic(2, 6, 1.0, 10.0);
    const auto t3 = baseline_node_traffic(2, 6, 0.5, 30.0);
    CHECK(f2.tx == doctest::Approx(2.0 * base.tx));
    CHECK(f2.rx == doctest::Approx(2.0 * base.rx));
    CHECK(t3.total() == doctest::Approx(3.0 * base.total()));
}

TEST_CASE("mode names round-trip")
{
    for (auto m : {DisseminationMode::independent, DisseminationMode::gw_unicast, DisseminationMode::sensor_chosen,
                   DisseminationMode::gw_unicast_aggregated, DisseminationMode::gw_broadcast}) {
        CHECK(parse_dissemination_mode(to_string(m)) == m);
    }
    CHECK_THROWS_AS(parse_dissemination_mode("carrier-pigeon"), std::invalid_argument);
}
