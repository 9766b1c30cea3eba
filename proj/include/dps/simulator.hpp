#pragma once

// Slot-based simulation of an explicit routing tree with an ideal MAC: every
// node owns one collision-free slot per measurement interval.

#include "dps/correlation.hpp"
#include "dps/prediction.hpp"
#include "dps/scheme.hpp"
#include "dps/trace.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace dps {

struct TreeNode {
    int id = 0;
    int ring = 0;
    int parent = -1; ///< -1 for the gateway
};

/// Node 0 is the gateway; sensors are numbered 1..N ring by ring.
struct TreeInstance {
    int neighbors = 0;
    int rings = 0;
    std::vector<TreeNode> nodes;
    std::vector<std::vector<int>> children; ///< indexed by node id
    std::vector<int> descendants;           ///< indexed by node id

    int sensor_count() const noexcept { return static_cast<int>(nodes.size()) - 1; }
    std::vector<int> ring_members(int d) const;
};

/// Ring d gets exactly (2d-1)C nodes. Each new node joins the branch (the
/// subtree of a first-ring node) with the fewest nodes, then the parent with
/// the fewest children inside it. The seed rotates tie-breaking.
TreeInstance build_tree(int neighbors, int rings, std::uint64_t seed);

/// Readings on a regular slot grid, one value per sensor and slot, stored
/// slot-major. Sensor i (1-based node id) is column i - 1.
struct GaussianTrace {
    int sensors = 0;
    std::size_t slots = 0;
    double slot_seconds = 60.0;
    std::vector<double> means;
    std::vector<double> stds;
    std::vector<double> values;

    double at(std::size_t slot, int node) const
    {
        return values[slot * static_cast<std::size_t>(sensors) + static_cast<std::size_t>(node - 1)];
    }
};

/// Draws one jointly Gaussian vector per slot through the symmetric square
/// root of the correlation matrix (repaired if indefinite), scaled by stds
/// and shifted by means. Needs rate * duration >= 1.
GaussianTrace generate_measurements(const CorrelationSpec& spec, std::span<const double> means,
                                    std::span<const double> stds, double rate, double duration,
                                    std::uint64_t seed);

/// Long format with slot start times as timestamps.
MeasurementTrace to_measurement_trace(const GaussianTrace& trace, double start = 0.0);

/// Counters of one node. Data and dissemination packets are kept apart;
/// the squared sums are over per-slot data counts.
struct NodeCounters {
    std::int64_t data_tx = 0;
    std::int64_t data_rx = 0;
    std::int64_t model_tx = 0;
    std::int64_t model_rx = 0;
    double data_tx_sq = 0.0;
    double data_rx_sq = 0.0;

    std::int64_t tx() const noexcept { return data_tx + model_tx; }
    std::int64_t rx() const noexcept { return data_rx + model_rx; }
};

struct SimResult {
    Scheme scheme = Scheme::none;
    std::uint64_t seed = 0;
    std::size_t slots = 0;
    std::int64_t periods = 0;       ///< dissemination rounds injected
    std::vector<NodeCounters> nodes; ///< indexed by node id; entry 0 is the gateway
    std::vector<NodeCounters> rings; ///< per-ring sums, squares of per-slot ring totals
    std::int64_t gateway_rx = 0;
};

/// Runs one scheme over the trace. Predictions are the per-node means and a
/// reading is mispredicted when it deviates by more than the node's
/// threshold: cfg.epsilon if set, else the threshold that yields the node's
/// accuracy for its standard deviation.
SimResult run(Scheme scheme, const TreeInstance& tree, const GaussianTrace& trace,
              const DpsConfig& cfg, std::uint64_t seed = 0);

/// Expected data packets per slot at every node of the explicit tree, using
/// the true subtree sizes. Indexed by node id.
std::vector<TrafficEstimate> expected_slot_traffic(const TreeInstance& tree, Scheme scheme,
                                                   double alpha, double rho,
                                                   NoTransmissionCache& cache);

struct CounterCheck {
    int id = 0;          ///< node id, or ring index for ring checks
    bool is_tx = true;
    double simulated = 0.0;
    double expected = 0.0;
    double sigma = 0.0;
    bool within = true;

    double relative_error() const noexcept
    {
        return expected != 0.0 ? (simulated - expected) / expected : simulated - expected;
    }
};

struct ModelComparison {
    std::vector<CounterCheck> nodes;
    std::vector<CounterCheck> rings;
    std::size_t flagged = 0;
};

/// Checks every counter against `slots * expected + dissemination` with
/// sigma^2 = slots * v + (slots * model_se)^2. v is the sample variance of the
/// per-slot counts, raised to frac(m)(1 - frac(m)) for a per-slot model mean
/// m if smaller (p(1 - p) for 0/1 counters). A counter is flagged when it
/// falls outside 3 sigma; with zero variance it must match exactly.
/// Dissemination packets are compared exactly as part of the total.
ModelComparison compare_with_model(const SimResult& result, const TreeInstance& tree,
                                   std::span<const TrafficEstimate> expected_per_slot,
                                   DisseminationMode mode);

} // namespace dps
