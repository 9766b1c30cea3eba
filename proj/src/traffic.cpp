#include "dps/traffic.hpp"

#include "dps/topology.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <utility>

namespace dps {

namespace {

constexpr std::array<std::pair<DisseminationMode, std::string_view>, 5> kModeNames{{
    {DisseminationMode::independent, "independent"},
    {DisseminationMode::gw_unicast, "gw-unicast"},
    {DisseminationMode::sensor_chosen, "sensor-chosen"},
    {DisseminationMode::gw_unicast_aggregated, "gw-unicast-aggregated"},
    {DisseminationMode::gw_broadcast, "gw-broadcast"},
}};

void check_rate_period(double rate, double period)
{
    if (!(rate > 0.0)) {
        throw std::domain_error("measurement rate f must be > 0");
    }
    if (!(period > 0.0)) {
        throw std::domain_error("period T must be > 0");
    }
}

} // namespace

std::string_view to_string(DisseminationMode mode) noexcept
{
    for (const auto& [m, name] : kModeNames) {
        if (m == mode) {
            return name;
        }
    }
    return "unknown";
}

DisseminationMode parse_dissemination_mode(std::string_view name)
{
    for (const auto& [m, n] : kModeNames) {
        if (n == name) {
            return m;
        }
    }
    throw std::invalid_argument("unknown dissemination mode '" + std::string(name) + "'");
}

TrafficReport baseline_node_traffic(int d, int rings, double rate, double period)
{
    check_rate_period(rate, period);
    const double k = subtree_size(d, rings);
    const double slots = rate * period;
    return {(k + 1.0) * slots, k * slots};
}

TrafficReport gw_to_node_traffic(int d, int rings)
{
    const double k = subtree_size(d, rings);
    return {k, k + 1.0};
}

double dissemination_cost(DisseminationMode mode, int rings)
{
    if (rings < 1) {
        throw std::domain_error("ring count D must be >= 1");
    }
    return dissemination_traffic(mode, 1, rings).total();
}

TrafficReport dissemination_traffic(DisseminationMode mode, int d, int rings)
{
    const double k = subtree_size(d, rings);
    switch (mode) {
    case DisseminationMode::independent:
        return {};
    case DisseminationMode::gw_unicast:
        return {k, k + 1.0};
    case DisseminationMode::sensor_chosen:
        return {k + 1.0, k};
    case DisseminationMode::gw_unicast_aggregated:
        // receive the sub-tree packet once, split it to the direct children
        return {child_ratio(d, rings), 1.0};
    case DisseminationMode::gw_broadcast:
        // counted as a single handled packet per node
        return {0.0, 1.0};
    }
    throw std::invalid_argument("unknown dissemination mode");
}

} // namespace dps
