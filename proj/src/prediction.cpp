#include "dps/prediction.hpp"

#include "dps/normal.hpp"
#include "dps/topology.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dps {

namespace {

void check_accuracy(double alpha)
{
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::domain_error("accuracy must lie in [0, 1], got " + std::to_string(alpha));
    }
}

} // namespace

void DpsConfig::validate() const
{
    check_accuracy(accuracy);
    for (const auto& [node, alpha] : node_accuracy) {
        (void)node;
        check_accuracy(alpha);
    }
    if (!(rate > 0.0)) {
        throw std::domain_error("measurement rate f must be > 0");
    }
    if (!(period > 0.0)) {
        throw std::domain_error("period T must be > 0");
    }
    if (epsilon && !(*epsilon >= 0.0)) {
        throw std::domain_error("acceptance threshold must be >= 0");
    }
}

double DpsConfig::accuracy_of(int node) const
{
    const auto it = node_accuracy.find(node);
    return it == node_accuracy.end() ? accuracy : it->second;
}

TrafficReport expected_dps_traffic(const DpsConfig& cfg, int d, int rings)
{
    cfg.validate();
    const double k = subtree_size(d, rings);
    const double miss = 1.0 - cfg.accuracy;
    const double slots = cfg.slots_per_period();
    TrafficReport data{(1.0 + k) * miss * slots, k * miss * slots};
    return data + dissemination_traffic(cfg.mode, d, rings);
}

TrafficReport expected_dps_traffic(double own_accuracy, std::span<const double> descendant_accuracy,
                                   double rate, double period, const TrafficReport& dissemination)
{
    check_accuracy(own_accuracy);
    if (!(rate > 0.0) || !(period > 0.0)) {
        throw std::domain_error("rate and period must be > 0");
    }
    double forwarded = 0.0;
    for (double a : descendant_accuracy) {
        check_accuracy(a);
        forwarded += 1.0 - a;
    }
    const double slots = rate * period;
    TrafficReport data{((1.0 - own_accuracy) + forwarded) * slots, forwarded * slots};
    return data + dissemination;
}

double prediction_traffic_bound(int d, int rings, double alpha, double rate, double period,
                                DisseminationMode mode)
{
    check_accuracy(alpha);
    const double k = subtree_size(d, rings);
    const double miss = 1.0 - alpha;
    return ((1.0 + k) * miss + k * miss) * rate * period +
           dissemination_traffic(mode, d, rings).total();
}

double min_required_accuracy(int rings, double rate, double period, DisseminationMode mode)
{
    if (!(rate > 0.0) || !(period > 0.0) || rate * period < 1.0) {
        throw std::domain_error("need at least one measurement per period (f T >= 1)");
    }
    const double cost = dissemination_cost(mode, rings);
    const double first_ring = 2.0 * rings * rings - 1.0;
    return cost / (first_ring * rate * period);
}

double accuracy_from_threshold(double epsilon, double sigma)
{
    if (!(epsilon >= 0.0) || !(sigma >= 0.0)) {
        throw std::domain_error("threshold and standard deviation must be >= 0");
    }
    if (sigma == 0.0) {
        return 1.0;
    }
    // 1 - 2 Phi(-z) == erf(z / sqrt 2), without the cancellation near alpha = 1
    return std::erf(epsilon / sigma / std::numbers::sqrt2);
}

double threshold_from_accuracy(double alpha, double sigma)
{
    if (!(alpha >= 0.0 && alpha < 1.0)) {
        throw std::domain_error("accuracy must lie in [0, 1) to yield a finite threshold");
    }
    if (!(sigma > 0.0)) {
        throw std::domain_error("standard deviation must be > 0");
    }
    return sigma * normal_quantile(0.5 + 0.5 * alpha);
}

} // namespace dps
