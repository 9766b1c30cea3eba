#include "doctest.h"

#include "dps/prediction.hpp"
#include "dps/topology.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace dps;

namespace {

DpsConfig config(double alpha, DisseminationMode mode, double rate = 1.0, double period = 1.0)
{
    DpsConfig c;
    c.accuracy = alpha;
    c.mode = mode;
    c.rate = rate;
    c.period = period;
    return c;
}

constexpr DisseminationMode kModes[] = {DisseminationMode::independent, DisseminationMode::gw_unicast,
                                        DisseminationMode::sensor_chosen,
                                        DisseminationMode::gw_unicast_aggregated,
                                        DisseminationMode::gw_broadcast};

} // namespace

TEST_CASE("expected traffic with uniform accuracy")
{
    for (int d = 1; d <= 4; ++d) {
        const auto perfect = expected_dps_traffic(config(1.0, DisseminationMode::gw_unicast), d, 4);
        CHECK(perfect.total() == doctest::Approx(dissemination_traffic(DisseminationMode::gw_unicast, d, 4).total()));
    }
    CHECK(expected_dps_traffic(config(0.0, DisseminationMode::independent), 1, 5).total() == doctest::Approx(49.0));
    CHECK(expected_dps_traffic(config(0.9, DisseminationMode::independent), 1, 3).total() == doctest::Approx(1.7));
    CHECK_THROWS_AS(expected_dps_traffic(config(1.2, DisseminationMode::independent), 1, 3), std::domain_error);
}

TEST_CASE("per-node accuracies reduce to the uniform case")
{
    const int rings = 4;
    const double k = subtree_size(1, rings);
    std::vector<double> desc(static_cast<std::size_t>(std::lround(k)), 0.8);
    const auto diss = dissemination_traffic(DisseminationMode::gw_broadcast, 1, rings);
    const auto a = expected_dps_traffic(0.8, desc, 0.1, 50.0, diss);
    const auto b = expected_dps_traffic(config(0.8, DisseminationMode::gw_broadcast, 0.1, 50.0), 1, rings);
    CHECK(a.tx == doctest::Approx(b.tx));
    CHECK(a.rx == doctest::Approx(b.rx));

    desc[0] = 0.2;
    const auto c = expected_dps_traffic(0.8, desc, 0.1, 50.0, diss);
    CHECK(c.rx == doctest::Approx(b.rx + 0.6 * 5.0));

    DpsConfig cfg = config(0.5, DisseminationMode::independent);
    cfg.node_accuracy[7] = 0.9;
    CHECK(cfg.accuracy_of(7) == 0.9);
    CHECK(cfg.accuracy_of(8) == 0.5);
    cfg.node_accuracy[9] = -0.1;
    CHECK_THROWS_AS(cfg.validate(), std::domain_error);
}

TEST_CASE("expected traffic is non-increasing in accuracy")
{
    for (auto mode : kModes) {
        double previous = INFINITY;
        for (int i = 0; i <= 100; ++i) {
            const double t = expected_dps_traffic(config(i / 100.0, mode, 0.2, 40.0), 1, 6).total();
            CHECK(t <= previous);
            previous = t;
        }
    }
}

TEST_CASE("minimum required accuracy")
{
    CHECK(min_required_accuracy(5, 1.0, 100.0, DisseminationMode::independent) == 0.0);
    CHECK(min_required_accuracy(5, 1.0 / 60.0, 259200.0, DisseminationMode::gw_unicast) ==
          doctest::Approx(1.0 / 4320.0).epsilon(1e-13));
    CHECK(min_required_accuracy(5, 1.0, 100.0, DisseminationMode::gw_broadcast) ==
          doctest::Approx(1.0 / 4900.0).epsilon(1e-13));
    CHECK_THROWS_AS(min_required_accuracy(5, 0.1, 5.0, DisseminationMode::gw_unicast), std::domain_error);
}

TEST_CASE("scheme pays off exactly above the minimum accuracy")
{
    for (auto mode : kModes) {
        for (int rings : {1, 2, 5, 8}) {
            for (double slots : {1.0, 10.0, 4320.0}) {
                const double amin = min_required_accuracy(rings, 1.0, slots, mode);
                const double base = baseline_node_traffic(1, rings, 1.0, slots).total();
                CAPTURE(rings);
                CAPTURE(slots);
                const double above = std::min(1.0, amin + 1e-3);
                if (amin < 1.0 - 1e-3) {
                    CHECK(expected_dps_traffic(config(above, mode, 1.0, slots), 1, rings).total() < base);
                }
                if (amin > 1e-3) {
                    CHECK(expected_dps_traffic(config(amin - 1e-3, mode, 1.0, slots), 1, rings).total() > base);
                }
            }
        }
    }
}

TEST_CASE("accuracy from threshold")
{
    CHECK(accuracy_from_threshold(1.959964, 1.0) == doctest::Approx(0.95).epsilon(1e-6));
    CHECK(accuracy_from_threshold(0.0, 1.0) == 0.0);
    // independent high-precision erf evaluation
    CHECK(accuracy_from_threshold(1.644854 * 3.0, 3.0) == doctest::Approx(0.900000076949173897).epsilon(1e-13));
    CHECK(accuracy_from_threshold(2.0, 0.0) == 1.0);
    CHECK(accuracy_from_threshold(0.0, 0.0) == 1.0);
    CHECK_THROWS_AS(accuracy_from_threshold(-1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(accuracy_from_threshold(1.0, -1.0), std::domain_error);

    double prev = -1.0;
    for (int i = 0; i <= 60; ++i) {
        const double a = accuracy_from_threshold(i * 0.1, 1.0);
        CHECK(a >= prev);
        CHECK(a >= 0.0);
        CHECK(a <= 1.0);
        CHECK(accuracy_from_threshold(1.0, 0.1 + i * 0.1) <= accuracy_from_threshold(1.0, 0.1 + (i - 1) * 0.1) + (i == 0));
        prev = a;
    }
}

TEST_CASE("threshold from accuracy")
{
    CHECK(threshold_from_accuracy(0.95, 1.0) == doctest::Approx(1.959963984540054).epsilon(1e-13));
    CHECK(threshold_from_accuracy(0.0, 2.0) == 0.0);
    CHECK(threshold_from_accuracy(0.5, 1.0) == doctest::Approx(0.674489750196081743).epsilon(1e-13));
    CHECK_THROWS_AS(threshold_from_accuracy(1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(threshold_from_accuracy(0.5, 0.0), std::domain_error);

    for (int i = 0; i <= 999; ++i) {
        const double alpha = i / 1000.0;
        for (double sigma : {0.01, 1.0, 37.5}) {
            const double back = accuracy_from_threshold(threshold_from_accuracy(alpha, sigma), sigma);
            CHECK(back == doctest::Approx(alpha).epsilon(1e-9).scale(alpha > 0 ? 0 : 1));
        }
    }
}
