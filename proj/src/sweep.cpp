#include "dps/sweep.hpp"

#include "dps/prediction.hpp"
#include "dps/simulator.hpp"
#include "dps/topology.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace dps {

namespace {

struct GridPoint {
    int neighbors;
    int rings;
    double alpha;
    double rho;
};

struct SimColumns {
    double tx = 0.0;
    double rx = 0.0;
    double expected_tx = 0.0;
    double expected_rx = 0.0;
    bool within = true;
};

template <class T>
void require(bool ok, const char* what, T value)
{
    if (!ok) {
        throw std::invalid_argument(std::string("invalid ") + what + ": " + std::to_string(value));
    }
}

std::array<SimColumns, 4> simulate_point(const SweepSpec& spec, const GridPoint& pt, int ring,
                                         std::uint64_t seed, NoTransmissionCache& cache)
{
    const TreeInstance tree = build_tree(pt.neighbors, pt.rings, seed);
    const auto n = static_cast<std::size_t>(tree.sensor_count());
    const std::vector<double> means(n, 0.0);
    const std::vector<double> stds(n, 1.0);
    const std::size_t slots = spec.simulate_slots ? spec.simulate_slots
                                                  : static_cast<std::size_t>(spec.rate * spec.period);
    const GaussianTrace trace = generate_measurements(CorrelationSpec::equicorrelated(pt.rho), means, stds,
                                                      spec.rate, static_cast<double>(slots) / spec.rate, seed);
    DpsConfig cfg;
    cfg.accuracy = pt.alpha;
    cfg.rate = spec.rate;
    cfg.period = spec.period;
    cfg.mode = spec.mode;

    const double members = static_cast<double>(tree.ring_members(ring).size());
    std::array<SimColumns, 4> out{};
    for (Scheme s : spec.schemes) {
        const SimResult r = run(s, tree, trace, cfg, seed);
        const auto expected = expected_slot_traffic(tree, s, pt.alpha, pt.rho, cache);
        const ModelComparison cmp = compare_with_model(r, tree, expected, spec.mode);
        SimColumns& c = out[static_cast<std::size_t>(s)];
        const auto& counters = r.rings[static_cast<std::size_t>(ring)];
        c.tx = static_cast<double>(counters.tx()) / members;
        c.rx = static_cast<double>(counters.rx()) / members;
        for (const auto& check : cmp.rings) {
            if (check.id != ring) {
                continue;
            }
            (check.is_tx ? c.expected_tx : c.expected_rx) = check.expected / members;
            c.within = c.within && check.within;
        }
    }
    return out;
}

} // namespace

SchemeTraffic scheme_traffic(Scheme scheme, int d, int rings, double alpha, double rho, double rate,
                             double period, DisseminationMode mode, NoTransmissionCache& cache)
{
    const double slots = rate * period;
    SchemeTraffic t;
    switch (scheme) {
    case Scheme::none:
        t.data = baseline_node_traffic(d, rings, rate, period);
        break;
    case Scheme::prediction_only: {
        DpsConfig cfg;
        cfg.accuracy = alpha;
        cfg.rate = rate;
        cfg.period = period;
        cfg.mode = DisseminationMode::independent;
        t.data = expected_dps_traffic(cfg, d, rings);
        t.dissemination = dissemination_traffic(mode, d, rings);
        break;
    }
    case Scheme::aggregation_only:
        t.data = {slots, child_ratio(d, rings) * slots};
        break;
    case Scheme::combined: {
        const TrafficEstimate e = aggregated_dps_traffic(d, rings, alpha, rho, rate, period,
                                                         DisseminationMode::independent, cache);
        t.data = e.mean;
        t.data_std_error = e.std_error;
        t.dissemination = dissemination_traffic(mode, d, rings);
        break;
    }
    }
    return t;
}

double scheme_transmission_energy(Scheme scheme, const SchemeTraffic& traffic, const EnergyParams& params,
                                  DisseminationMode mode, int d, int rings)
{
    const DisseminationMode charged = uses_prediction(scheme) ? mode : DisseminationMode::independent;
    return transmission_energy(traffic.data, params, charged, d, rings, uses_aggregation(scheme));
}

void SweepSpec::validate() const
{
    if (neighbors.empty() || rings.empty() || accuracy.empty() || correlation.empty() || schemes.empty()) {
        throw std::invalid_argument("every sweep grid needs at least one value");
    }
    for (int c : neighbors) {
        require(c >= 1, "C (must be >= 1)", c);
    }
    for (int d : rings) {
        require(d >= 1, "D (must be >= 1)", d);
    }
    for (double a : accuracy) {
        require(a >= 0.0 && a <= 1.0, "alpha (must lie in [0, 1])", a);
    }
    for (double r : correlation) {
        require(r >= 0.0 && r <= 1.0, "rho (must lie in [0, 1])", r);
    }
    require(rate > 0.0, "rate f (must be > 0)", rate);
    require(period > 0.0, "period T (must be > 0)", period);
    require(ring >= 1, "ring (must be >= 1)", ring);
    require(samples >= 4, "samples (must be >= 4)", samples);
    if (simulate) {
        require(simulate_slots > 0 || rate * period >= 1.0, "f T for simulation (must be >= 1)", rate * period);
    }
    energy.validate();
}

std::uint64_t point_seed(std::uint64_t master, std::uint64_t index)
{
    // splitmix64 finalizer over a Weyl step
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Table run_sweep(const SweepSpec& spec)
{
    spec.validate();
    std::vector<GridPoint> grid;
    for (int c : spec.neighbors) {
        for (int d : spec.rings) {
            for (double a : spec.accuracy) {
                for (double r : spec.correlation) {
                    grid.push_back({c, d, a, r});
                }
            }
        }
    }

    MvnOptions mvn;
    mvn.samples = spec.samples;
    mvn.seed = spec.seed;
    mvn.threads = 1; // parallelism comes from the grid
    NoTransmissionCache cache(mvn);

    Table table;
    table.columns = {"C", "D", "ring", "alpha", "rho", "scheme", "f_per_s", "T_s", "tx_packets",
                     "rx_packets", "total_packets", "data_std_error_packets", "dissemination_packets",
                     "pct_of_no_dps_percent", "pct_of_aggregation_only_percent", "energy_J",
                     "transmission_energy_J", "energy_saving_percent"};
    if (spec.simulate) {
        for (const char* c : {"sim_tx_packets", "sim_rx_packets", "sim_expected_tx_packets",
                              "sim_expected_rx_packets", "sim_within_3sigma"}) {
            table.columns.emplace_back(c);
        }
    }

    std::vector<std::vector<std::vector<Cell>>> rows(grid.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto evaluate_points = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) {
            const GridPoint& pt = grid[i];
            const int d = std::min(spec.ring, pt.rings);
            std::array<SchemeTraffic, 4> traffic;
            for (Scheme s : kAllSchemes) {
                traffic[static_cast<std::size_t>(s)] =
                    scheme_traffic(s, d, pt.rings, pt.alpha, pt.rho, spec.rate, spec.period, spec.mode, cache);
            }
            const double base_total = traffic[static_cast<std::size_t>(Scheme::none)].total().total();
            const double agg_total = traffic[static_cast<std::size_t>(Scheme::aggregation_only)].total().total();
            const double base_energy = scheme_transmission_energy(
                Scheme::none, traffic[static_cast<std::size_t>(Scheme::none)], spec.energy, spec.mode, d, pt.rings);
            std::array<SimColumns, 4> sim{};
            if (spec.simulate) {
                sim = simulate_point(spec, pt, d, point_seed(spec.seed, i), cache);
            }
            for (Scheme s : spec.schemes) {
                const SchemeTraffic& t = traffic[static_cast<std::size_t>(s)];
                const TrafficReport total = t.total();
                const double e_tx = scheme_transmission_energy(s, t, spec.energy, spec.mode, d, pt.rings);
                std::vector<Cell> row{static_cast<std::int64_t>(pt.neighbors),
                                      static_cast<std::int64_t>(pt.rings),
                                      static_cast<std::int64_t>(d),
                                      pt.alpha,
                                      pt.rho,
                                      std::string(to_string(s)),
                                      spec.rate,
                                      spec.period,
                                      total.tx,
                                      total.rx,
                                      total.total(),
                                      t.data_std_error.total(),
                                      t.dissemination.total(),
                                      100.0 * total.total() / base_total,
                                      100.0 * total.total() / agg_total,
                                      e_tx + spec.energy.en_min,
                                      e_tx,
                                      100.0 * (1.0 - e_tx / base_energy)};
                if (spec.simulate) {
                    const SimColumns& c = sim[static_cast<std::size_t>(s)];
                    row.insert(row.end(), {c.tx, c.rx, c.expected_tx, c.expected_rx, c.within});
                }
                rows[i].push_back(std::move(row));
            }
        }
    };
    auto work = [&] {
        try {
            evaluate_points();
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
            next = grid.size();
        }
    };
    unsigned threads = spec.threads ? spec.threads : std::thread::hardware_concurrency();
    threads = static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, grid.size()));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) {
            pool.emplace_back(work);
        }
        work();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    for (auto& point_rows : rows) {
        for (auto& row : point_rows) {
            table.add_row(std::move(row));
        }
    }
    return table;
}

} // namespace dps
