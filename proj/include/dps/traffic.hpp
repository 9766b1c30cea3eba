#pragma once

#include <string_view>

namespace dps {

/// Expected transmissions and receptions at one node over some period.
struct TrafficReport {
    double tx = 0.0;
    double rx = 0.0;

    double total() const noexcept { return tx + rx; }

    TrafficReport scaled(double factor) const noexcept { return {tx * factor, rx * factor}; }
    TrafficReport& operator+=(const TrafficReport& other) noexcept
    {
        tx += other.tx;
        rx += other.rx;
        return *this;
    }
    friend TrafficReport operator+(TrafficReport a, const TrafficReport& b) noexcept { return a += b; }
};

/// How prediction models reach the nodes once per period T.
enum class DisseminationMode {
    independent,           ///< both ends derive the model from shared data; no packets
    gw_unicast,            ///< gateway sends one unicast packet per node
    sensor_chosen,         ///< each node sends its model to the gateway
    gw_unicast_aggregated, ///< one packet per sub-tree, split at every hop
    gw_broadcast,          ///< one broadcast packet flooded down the tree
};

std::string_view to_string(DisseminationMode mode) noexcept;
DisseminationMode parse_dissemination_mode(std::string_view name);

/// Traffic without prediction or aggregation: every measurement of the node
/// and of its K_d descendants is forwarded individually.
TrafficReport baseline_node_traffic(int d, int rings, double rate, double period);

/// One full gateway-to-every-node unicast round seen from a ring-d node.
TrafficReport gw_to_node_traffic(int d, int rings);

/// Packets handled by a first-ring node to disseminate the models once.
double dissemination_cost(DisseminationMode mode, int rings);

/// Per-ring tx/rx split of one dissemination round. For d = 1 the total
/// equals dissemination_cost(mode, rings).
TrafficReport dissemination_traffic(DisseminationMode mode, int d, int rings);

} // namespace dps
