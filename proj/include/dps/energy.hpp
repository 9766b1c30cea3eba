#pragma once

#include "dps/traffic.hpp"

namespace dps {

/// Per-packet and baseline energy costs of a node, in joules.
///
/// The defaults are an illustrative profile, not measurements. They price a
/// transmission somewhat above a reception and give a fixed budget for
/// sensing, processing and idle listening over one period. Override them
/// from the configuration file for a real platform.
struct EnergyParams {
    double en_tx = 0.24e-3;
    double en_rx = 0.175e-3;
    double en_min = 3.0;
    /// Applied to data packets of aggregating schemes, which carry the
    /// readings of a whole subtree.
    double payload_scale = 8.0;

    void validate() const;
};

/// Energy spent on choosing and exchanging prediction models once, for a
/// ring-d node. Zero when models are derived independently.
double model_update_energy(const EnergyParams& params, DisseminationMode mode, int d, int rings);

/// Energy of a node over one period: data traffic priced at En_TX / En_RX
/// (times payload_scale when aggregated), plus the model update and En_MIN.
/// `traffic` must not include dissemination packets.
double node_energy(const TrafficReport& traffic, const EnergyParams& params, DisseminationMode mode,
                   int d, int rings, bool aggregated);

/// node_energy without En_MIN: the part a scheme can actually save.
double transmission_energy(const TrafficReport& traffic, const EnergyParams& params,
                           DisseminationMode mode, int d, int rings, bool aggregated);

} // namespace dps
