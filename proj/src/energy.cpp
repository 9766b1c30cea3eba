#include "dps/energy.hpp"

#include "dps/topology.hpp"

#include <stdexcept>

namespace dps {

void EnergyParams::validate() const
{
    if (!(en_tx >= 0.0) || !(en_rx >= 0.0) || !(en_min >= 0.0)) {
        throw std::domain_error("energy costs must be >= 0");
    }
    if (!(payload_scale >= 1.0)) {
        throw std::domain_error("payload_scale must be >= 1");
    }
}

double model_update_energy(const EnergyParams& params, DisseminationMode mode, int d, int rings)
{
    const double children = child_ratio(d, rings);
    switch (mode) {
    case DisseminationMode::independent:
        return 0.0;
    case DisseminationMode::sensor_chosen:
        return children * params.en_rx + params.en_tx;
    case DisseminationMode::gw_unicast:
    case DisseminationMode::gw_unicast_aggregated:
    case DisseminationMode::gw_broadcast:
        return params.en_rx + children * params.en_tx;
    }
    throw std::logic_error("unhandled dissemination mode");
}

double transmission_energy(const TrafficReport& traffic, const EnergyParams& params,
                           DisseminationMode mode, int d, int rings, bool aggregated)
{
    params.validate();
    if (!(traffic.tx >= 0.0) || !(traffic.rx >= 0.0)) {
        throw std::domain_error("traffic counts must be >= 0");
    }
    const double scale = aggregated ? params.payload_scale : 1.0;
    return traffic.tx * params.en_tx * scale + traffic.rx * params.en_rx * scale +
           model_update_energy(params, mode, d, rings);
}

double node_energy(const TrafficReport& traffic, const EnergyParams& params, DisseminationMode mode,
                   int d, int rings, bool aggregated)
{
    return transmission_energy(traffic, params, mode, d, rings, aggregated) + params.en_min;
}

} // namespace dps
