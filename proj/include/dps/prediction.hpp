#pragma once

// Expected traffic under a dual prediction scheme: a node only transmits a
// measurement when the prediction shared with the gateway misses it by more
// than the acceptance threshold.

#include "dps/traffic.hpp"

#include <map>
#include <optional>
#include <span>

namespace dps {

struct DpsConfig {
    double accuracy = 0.0;             ///< network-wide alpha in [0, 1]
    std::map<int, double> node_accuracy; ///< per-node overrides of alpha, keyed by node id
    double rate = 1.0 / 60.0;          ///< measurements per second (f)
    double period = 3.0 * 86400.0;     ///< seconds between model choices (T)
    DisseminationMode mode = DisseminationMode::gw_unicast_aggregated;
    std::optional<double> epsilon;     ///< acceptance threshold in measurement units

    void validate() const;
    double accuracy_of(int node) const;
    double slots_per_period() const noexcept { return rate * period; }
};

/// Expected traffic of a ring-d node over T with a uniform accuracy,
/// including one dissemination round for cfg.mode.
TrafficReport expected_dps_traffic(const DpsConfig& cfg, int d, int rings);

/// Same quantity for one node with explicit accuracies: its own and one per
/// descendant. `dissemination` is added once.
TrafficReport expected_dps_traffic(double own_accuracy, std::span<const double> descendant_accuracy,
                                   double rate, double period, const TrafficReport& dissemination);

/// Worst-case traffic of a ring-d node for an average accuracy alpha:
/// ((1 + K_d)(1 - alpha) + K_d (1 - alpha)) f T + X_top.
double prediction_traffic_bound(int d, int rings, double alpha, double rate, double period,
                                DisseminationMode mode);

/// Smallest average accuracy for which the scheme beats plain forwarding at
/// a first-ring node: X_top / ((2D^2 - 1) f T).
double min_required_accuracy(int rings, double rate, double period, DisseminationMode mode);

/// alpha = 1 - 2 Phi(-epsilon / sigma) for unbiased, normally distributed errors.
double accuracy_from_threshold(double epsilon, double sigma);

/// Inverse of accuracy_from_threshold: sigma * Phi^-1((1 + alpha) / 2).
double threshold_from_accuracy(double alpha, double sigma);

} // namespace dps
