#pragma once

// Ring model of a homogeneous sensor network: the gateway sits in ring 0 and
// ring d holds the nodes that are d hops away from it.

#include <cstdint>
#include <vector>

namespace dps {

/// Homogeneous ring topology with C expected neighbors per node and D rings.
class RingTopology {
public:
    RingTopology(int neighbors, int rings);

    int neighbors() const noexcept { return neighbors_; }
    int rings() const noexcept { return rings_; }

private:
    int neighbors_;
    int rings_;
};

/// Expected node count of ring d: 0 for the gateway ring, (2d-1)C otherwise.
double ring_population(const RingTopology& topo, int d);

/// Expected number of direct children of a ring-d node (N_{d+1} / N_d).
/// Zero in the outermost ring. Does not depend on C.
double child_ratio(int d, int rings);

/// Expected number of descendants of a ring-d node, K_d = I_d (K_{d+1} + 1),
/// with K_D = 0. Real-valued; callers that need a dimension count round up.
double subtree_size(int d, int rings);

/// K_1..K_D in one backward pass, indexed by ring; index 0 is unused.
std::vector<double> subtree_sizes(int rings);

std::int64_t total_nodes(const RingTopology& topo);

} // namespace dps
