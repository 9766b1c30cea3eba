#include "dps/simulator.hpp"

#include "dps/normal.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace dps {

namespace {

// Dissemination packets handled by one node of the explicit tree per round.
TrafficReport tree_dissemination(const TreeInstance& tree, DisseminationMode mode, int id)
{
    const double below = tree.descendants[static_cast<std::size_t>(id)];
    const double kids = static_cast<double>(tree.children[static_cast<std::size_t>(id)].size());
    switch (mode) {
    case DisseminationMode::independent:
        return {};
    case DisseminationMode::gw_unicast:
        return {below, below + 1.0};
    case DisseminationMode::sensor_chosen:
        return {below + 1.0, below};
    case DisseminationMode::gw_unicast_aggregated:
        return {kids, 1.0};
    case DisseminationMode::gw_broadcast:
        return {0.0, 1.0};
    }
    throw std::logic_error("unhandled dissemination mode");
}

std::size_t slot_count(double rate, double duration)
{
    const double n = rate * duration;
    if (!(rate > 0.0) || !(duration > 0.0) || n < 1.0) {
        throw std::domain_error("need rate * duration >= 1 to draw any measurement");
    }
    return static_cast<std::size_t>(std::floor(n + 1e-9));
}

double slot_variance(double sum, double sum_sq, std::size_t slots)
{
    if (slots < 2) {
        return 0.0;
    }
    const double n = static_cast<double>(slots);
    return std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
}

// Smallest variance an integer-valued count with this mean can have. For a
// 0/1 counter it is p(1 - p). It keeps sigma honest when an event is so rare
// that the run never sees it and the sample variance is zero.
double lattice_variance(double mean)
{
    const double frac = mean - std::floor(mean);
    return frac * (1.0 - frac);
}

CounterCheck check_counter(int id, bool is_tx, double simulated, double data_sum, double data_sq,
                           std::size_t slots, double expected, double slot_mean, double model_se)
{
    CounterCheck c;
    c.id = id;
    c.is_tx = is_tx;
    c.simulated = simulated;
    c.expected = expected;
    const double n = static_cast<double>(slots);
    const double var = std::max(slot_variance(data_sum, data_sq, slots), lattice_variance(slot_mean));
    c.sigma = std::sqrt(n * var + (n * model_se) * (n * model_se));
    const double diff = std::fabs(simulated - expected);
    c.within = c.sigma > 0.0 ? diff <= 3.0 * c.sigma : diff <= 1e-9 * std::max(1.0, std::fabs(expected));
    return c;
}

} // namespace

std::vector<int> TreeInstance::ring_members(int d) const
{
    std::vector<int> out;
    for (const auto& n : nodes) {
        if (n.ring == d) {
            out.push_back(n.id);
        }
    }
    return out;
}

TreeInstance build_tree(int neighbors, int rings, std::uint64_t seed)
{
    if (neighbors < 1 || rings < 1) {
        throw std::domain_error("need C >= 1 and D >= 1");
    }
    TreeInstance t;
    t.neighbors = neighbors;
    t.rings = rings;
    t.nodes.push_back({0, 0, -1});

    std::vector<int> branch_of{0};
    std::vector<int> branch_size(static_cast<std::size_t>(neighbors), 0);
    std::vector<int> child_count{0};
    std::vector<int> previous;

    const auto rotated_less = [&](std::size_t count, std::size_t a, std::size_t b) {
        return (a + seed) % count < (b + seed) % count;
    };

    for (int d = 1; d <= rings; ++d) {
        const int population = (2 * d - 1) * neighbors;
        std::vector<int> current;
        for (int k = 0; k < population; ++k) {
            const int id = static_cast<int>(t.nodes.size());
            int parent = 0;
            int branch = k;
            if (d > 1) {
                branch = 0;
                for (int b = 1; b < neighbors; ++b) {
                    const auto ub = static_cast<std::size_t>(b);
                    const auto ubest = static_cast<std::size_t>(branch);
                    if (branch_size[ub] < branch_size[ubest] ||
                        (branch_size[ub] == branch_size[ubest] &&
                         rotated_less(static_cast<std::size_t>(neighbors), ub, ubest))) {
                        branch = b;
                    }
                }
                std::vector<int> candidates;
                for (int p : previous) {
                    if (branch_of[static_cast<std::size_t>(p)] == branch) {
                        candidates.push_back(p);
                    }
                }
                std::size_t best = 0;
                for (std::size_t c = 1; c < candidates.size(); ++c) {
                    const int cc = child_count[static_cast<std::size_t>(candidates[c])];
                    const int cb = child_count[static_cast<std::size_t>(candidates[best])];
                    if (cc < cb || (cc == cb && rotated_less(candidates.size(), c, best))) {
                        best = c;
                    }
                }
                parent = candidates[best];
            }
            t.nodes.push_back({id, d, parent});
            branch_of.push_back(branch);
            child_count.push_back(0);
            ++child_count[static_cast<std::size_t>(parent)];
            ++branch_size[static_cast<std::size_t>(branch)];
            current.push_back(id);
        }
        previous = std::move(current);
    }

    const std::size_t total = t.nodes.size();
    t.children.assign(total, {});
    t.descendants.assign(total, 0);
    for (std::size_t i = 1; i < total; ++i) {
        t.children[static_cast<std::size_t>(t.nodes[i].parent)].push_back(static_cast<int>(i));
    }
    // parents always carry smaller ids than their children
    for (std::size_t i = total; i-- > 1;) {
        const auto p = static_cast<std::size_t>(t.nodes[i].parent);
        t.descendants[p] += t.descendants[i] + 1;
    }
    return t;
}

GaussianTrace generate_measurements(const CorrelationSpec& spec, std::span<const double> means,
                                    std::span<const double> stds, double rate, double duration,
                                    std::uint64_t seed)
{
    if (means.size() != stds.size() || means.empty()) {
        throw std::invalid_argument("means and stds must be non-empty and of equal length");
    }
    for (double s : stds) {
        if (!(s >= 0.0)) {
            throw std::domain_error("standard deviations must be >= 0");
        }
    }
    const int n = static_cast<int>(means.size());
    const std::size_t slots = slot_count(rate, duration);

    const CorrelationMatrix sigma = repair_correlation(spec.matrix(n)).matrix;
    Eigen::SelfAdjointEigenSolver<CorrelationMatrix> eig(sigma);
    const Eigen::VectorXd root_vals = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd root = eig.eigenvectors() * root_vals.asDiagonal() * eig.eigenvectors().transpose();

    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    std::mt19937_64 rng(seq);
    Eigen::MatrixXd z(n, static_cast<Eigen::Index>(slots));
    for (Eigen::Index s = 0; s < z.cols(); ++s) {
        for (Eigen::Index i = 0; i < n; ++i) {
            // midpoint of a 2^-53 grid cell: never exactly 0 or 1
            const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
            z(i, s) = normal_quantile(u);
        }
    }
    const Eigen::MatrixXd x = root * z;

    GaussianTrace out;
    out.sensors = n;
    out.slots = slots;
    out.slot_seconds = 1.0 / rate;
    out.means.assign(means.begin(), means.end());
    out.stds.assign(stds.begin(), stds.end());
    out.values.resize(slots * static_cast<std::size_t>(n));
    for (std::size_t s = 0; s < slots; ++s) {
        for (int i = 0; i < n; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            out.values[s * static_cast<std::size_t>(n) + ui] =
                means[ui] + stds[ui] * x(i, static_cast<Eigen::Index>(s));
        }
    }
    return out;
}

MeasurementTrace to_measurement_trace(const GaussianTrace& trace, double start)
{
    MeasurementTrace out;
    out.source = "synthetic-gaussian";
    out.field = "value";
    out.readings.reserve(trace.values.size());
    for (std::size_t s = 0; s < trace.slots; ++s) {
        for (int node = 1; node <= trace.sensors; ++node) {
            out.readings.push_back({start + static_cast<double>(s) * trace.slot_seconds, node, trace.at(s, node)});
        }
    }
    return out;
}

SimResult run(Scheme scheme, const TreeInstance& tree, const GaussianTrace& trace,
              const DpsConfig& cfg, std::uint64_t seed)
{
    cfg.validate();
    const int sensors = tree.sensor_count();
    if (trace.sensors != sensors) {
        throw std::invalid_argument("trace has " + std::to_string(trace.sensors) +
                                    " sensors but the tree has " + std::to_string(sensors));
    }
    const auto total = static_cast<std::size_t>(sensors) + 1;

    std::vector<double> threshold(total, 0.0);
    for (int id = 1; id <= sensors; ++id) {
        const double sd = trace.stds[static_cast<std::size_t>(id - 1)];
        const double alpha = cfg.accuracy_of(id);
        double eps = 0.0;
        if (cfg.epsilon) {
            eps = *cfg.epsilon;
        } else if (alpha >= 1.0) {
            eps = std::numeric_limits<double>::infinity();
        } else if (sd > 0.0) {
            eps = threshold_from_accuracy(alpha, sd);
        }
        threshold[static_cast<std::size_t>(id)] = eps;
    }

    SimResult r;
    r.scheme = scheme;
    r.seed = seed;
    r.slots = trace.slots;
    r.nodes.assign(total, {});
    r.rings.assign(static_cast<std::size_t>(tree.rings) + 1, {});

    std::vector<std::int64_t> received(total, 0);
    std::vector<std::int64_t> ring_tx(r.rings.size(), 0);
    std::vector<std::int64_t> ring_rx(r.rings.size(), 0);
    const double slots_per_period = cfg.slots_per_period();

    for (std::size_t s = 0; s < trace.slots; ++s) {
        const bool boundary = s == 0 || std::floor(static_cast<double>(s) / slots_per_period) !=
                                            std::floor(static_cast<double>(s - 1) / slots_per_period);
        if (boundary && uses_prediction(scheme)) {
            ++r.periods;
            for (int id = 1; id <= sensors; ++id) {
                const TrafficReport m = tree_dissemination(tree, cfg.mode, id);
                auto& c = r.nodes[static_cast<std::size_t>(id)];
                c.model_tx += static_cast<std::int64_t>(m.tx);
                c.model_rx += static_cast<std::int64_t>(m.rx);
                auto& rc = r.rings[static_cast<std::size_t>(tree.nodes[static_cast<std::size_t>(id)].ring)];
                rc.model_tx += static_cast<std::int64_t>(m.tx);
                rc.model_rx += static_cast<std::int64_t>(m.rx);
            }
        }

        std::fill(received.begin(), received.end(), 0);
        std::fill(ring_tx.begin(), ring_tx.end(), 0);
        std::fill(ring_rx.begin(), ring_rx.end(), 0);
        for (int id = sensors; id >= 1; --id) {
            const auto uid = static_cast<std::size_t>(id);
            const TreeNode& node = tree.nodes[uid];
            const double deviation = std::fabs(trace.at(s, id) - trace.means[uid - 1]);
            const bool missed = deviation > threshold[uid];
            const std::int64_t in = received[uid];
            std::int64_t out = 0;
            switch (scheme) {
            case Scheme::none:
                out = 1 + in;
                break;
            case Scheme::prediction_only:
                out = (missed ? 1 : 0) + in;
                break;
            case Scheme::aggregation_only:
                out = 1;
                break;
            case Scheme::combined:
                out = (missed || in > 0) ? 1 : 0;
                break;
            }
            received[static_cast<std::size_t>(node.parent)] += out;
            auto& c = r.nodes[uid];
            c.data_tx += out;
            c.data_rx += in;
            c.data_tx_sq += static_cast<double>(out * out);
            c.data_rx_sq += static_cast<double>(in * in);
            ring_tx[static_cast<std::size_t>(node.ring)] += out;
            ring_rx[static_cast<std::size_t>(node.ring)] += in;
        }
        r.gateway_rx += received[0];
        for (std::size_t d = 1; d < r.rings.size(); ++d) {
            auto& rc = r.rings[d];
            rc.data_tx += ring_tx[d];
            rc.data_rx += ring_rx[d];
            rc.data_tx_sq += static_cast<double>(ring_tx[d] * ring_tx[d]);
            rc.data_rx_sq += static_cast<double>(ring_rx[d] * ring_rx[d]);
        }
    }
    return r;
}

std::vector<TrafficEstimate> expected_slot_traffic(const TreeInstance& tree, Scheme scheme,
                                                   double alpha, double rho,
                                                   NoTransmissionCache& cache)
{
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::domain_error("accuracy must lie in [0, 1]");
    }
    std::vector<TrafficEstimate> out(tree.nodes.size());
    for (std::size_t id = 1; id < tree.nodes.size(); ++id) {
        const double below = tree.descendants[id];
        const auto& kids = tree.children[id];
        TrafficEstimate& e = out[id];
        switch (scheme) {
        case Scheme::none:
            e.mean = {1.0 + below, below};
            break;
        case Scheme::prediction_only:
            e.mean = {(1.0 - alpha) * (1.0 + below), (1.0 - alpha) * below};
            break;
        case Scheme::aggregation_only:
            e.mean = {1.0, static_cast<double>(kids.size())};
            break;
        case Scheme::combined: {
            const MvnEstimate own = cache.get(1 + tree.descendants[id], alpha, rho);
            e.mean.tx = 1.0 - own.p;
            e.std_error.tx = own.std_error;
            for (int k : kids) {
                const MvnEstimate sub = cache.get(1 + tree.descendants[static_cast<std::size_t>(k)], alpha, rho);
                e.mean.rx += 1.0 - sub.p;
                e.std_error.rx += sub.std_error;
            }
            break;
        }
        }
    }
    return out;
}

ModelComparison compare_with_model(const SimResult& result, const TreeInstance& tree,
                                   std::span<const TrafficEstimate> expected_per_slot,
                                   DisseminationMode mode)
{
    if (expected_per_slot.size() != tree.nodes.size() || result.nodes.size() != tree.nodes.size()) {
        throw std::invalid_argument("result, tree and expectations cover different node sets");
    }
    const double slots = static_cast<double>(result.slots);
    const double rounds = static_cast<double>(result.periods);
    ModelComparison out;
    std::vector<TrafficEstimate> ring_expected(result.rings.size());
    std::vector<TrafficReport> ring_slot_mean(result.rings.size());
    for (std::size_t id = 1; id < tree.nodes.size(); ++id) {
        const auto& c = result.nodes[id];
        const auto& e = expected_per_slot[id];
        const TrafficReport model = tree_dissemination(tree, mode, static_cast<int>(id)).scaled(rounds);
        const TrafficReport want = e.mean.scaled(slots) + model;
        out.nodes.push_back(check_counter(static_cast<int>(id), true, static_cast<double>(c.tx()),
                                          static_cast<double>(c.data_tx), c.data_tx_sq, result.slots,
                                          want.tx, e.mean.tx, e.std_error.tx));
        out.nodes.push_back(check_counter(static_cast<int>(id), false, static_cast<double>(c.rx()),
                                          static_cast<double>(c.data_rx), c.data_rx_sq, result.slots,
                                          want.rx, e.mean.rx, e.std_error.rx));
        const auto ring = static_cast<std::size_t>(tree.nodes[id].ring);
        ring_expected[ring].mean += want;
        ring_expected[ring].std_error += e.std_error;
        ring_slot_mean[ring] += e.mean;
    }
    for (std::size_t d = 1; d < result.rings.size(); ++d) {
        const auto& c = result.rings[d];
        const auto& e = ring_expected[d];
        out.rings.push_back(check_counter(static_cast<int>(d), true, static_cast<double>(c.tx()),
                                          static_cast<double>(c.data_tx), c.data_tx_sq, result.slots,
                                          e.mean.tx, ring_slot_mean[d].tx, e.std_error.tx));
        out.rings.push_back(check_counter(static_cast<int>(d), false, static_cast<double>(c.rx()),
                                          static_cast<double>(c.data_rx), c.data_rx_sq, result.slots,
                                          e.mean.rx, ring_slot_mean[d].rx, e.std_error.rx));
    }
    for (const auto& c : out.nodes) {
        out.flagged += c.within ? 0 : 1;
    }
    return out;
}

} // namespace dps
