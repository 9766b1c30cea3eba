#pragma once

// Parameter sweeps over the analytical model, optionally cross-checked by
// simulation, producing one long-format row per grid point and scheme.

#include "dps/correlation.hpp"
#include "dps/energy.hpp"
#include "dps/scheme.hpp"
#include "dps/table.hpp"

#include <cstdint>
#include <vector>

namespace dps {

/// Expected traffic of a ring-d node over one period under a scheme, with
/// dissemination packets kept apart from data packets.
struct SchemeTraffic {
    TrafficReport data;
    TrafficReport data_std_error;
    TrafficReport dissemination;

    TrafficReport total() const noexcept { return data + dissemination; }
};

SchemeTraffic scheme_traffic(Scheme scheme, int d, int rings, double alpha, double rho, double rate,
                             double period, DisseminationMode mode, NoTransmissionCache& cache);

/// Energy of the node over one period, without the fixed En_MIN budget.
double scheme_transmission_energy(Scheme scheme, const SchemeTraffic& traffic, const EnergyParams& params,
                                  DisseminationMode mode, int d, int rings);

struct SweepSpec {
    std::vector<int> neighbors{3};
    std::vector<int> rings{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<double> accuracy{0.5, 0.7, 0.9, 0.95};
    std::vector<double> correlation{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95};
    double rate = 1.0 / 60.0;
    double period = 3.0 * 86400.0;
    DisseminationMode mode = DisseminationMode::gw_unicast_aggregated;
    std::vector<Scheme> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
    int ring = 1; ///< ring whose node is reported; clamped to D for smaller networks
    std::uint64_t seed = kDefaultSeed;
    std::uint64_t samples = 1'000'000;
    unsigned threads = 0;
    EnergyParams energy;
    bool simulate = false;
    std::size_t simulate_slots = 0; ///< 0: one period's worth of slots

    /// Throws std::invalid_argument naming the first offending value.
    void validate() const;
};

/// Seed of the i-th grid point, mixed from the master seed.
std::uint64_t point_seed(std::uint64_t master, std::uint64_t index);

/// Evaluates every (C, D, alpha, rho) point concurrently; rows come out in
/// grid order (C, D, alpha, rho, scheme) whatever the thread count.
Table run_sweep(const SweepSpec& spec);

} // namespace dps
