#include "dps/topology.hpp"

#include <stdexcept>
#include <string>

namespace dps {

namespace {

void check_ring(int d, int rings, int first)
{
    if (d < first || d > rings) {
        throw std::domain_error("ring index " + std::to_string(d) + " outside [" +
                                std::to_string(first) + ", " + std::to_string(rings) + "]");
    }
}

} // namespace

RingTopology::RingTopology(int neighbors, int rings) : neighbors_(neighbors), rings_(rings)
{
    if (neighbors < 1) {
        throw std::domain_error("neighbor count C must be >= 1");
    }
    if (rings < 1) {
        throw std::domain_error("ring count D must be >= 1");
    }
}

double ring_population(const RingTopology& topo, int d)
{
    check_ring(d, topo.rings(), 0);
    if (d == 0) {
        return 0.0;
    }
    return static_cast<double>(2 * d - 1) * topo.neighbors();
}

double child_ratio(int d, int rings)
{
    if (rings < 1) {
        throw std::domain_error("ring count D must be >= 1");
    }
    check_ring(d, rings, 1);
    if (d == rings) {
        return 0.0;
    }
    return static_cast<double>(2 * d + 1) / static_cast<double>(2 * d - 1);
}

double subtree_size(int d, int rings)
{
    if (rings < 1) {
        throw std::domain_error("ring count D must be >= 1");
    }
    check_ring(d, rings, 1);
    double k = 0.0;
    for (int ring = rings - 1; ring >= d; --ring) {
        k = child_ratio(ring, rings) * (k + 1.0);
    }
    return k;
}

std::vector<double> subtree_sizes(int rings)
{
    if (rings < 1) {
        throw std::domain_error("ring count D must be >= 1");
    }
    std::vector<double> k(static_cast<std::size_t>(rings) + 1, 0.0);
    for (int ring = rings - 1; ring >= 1; --ring) {
        k[ring] = child_ratio(ring, rings) * (k[ring + 1] + 1.0);
    }
    return k;
}

std::int64_t total_nodes(const RingTopology& topo)
{
    return static_cast<std::int64_t>(topo.neighbors()) * topo.rings() * topo.rings();
}

} // namespace dps
