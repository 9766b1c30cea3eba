#pragma once

// Correlated prediction errors: probability that no node of a group
// mispredicts, expected traffic of aggregating nodes, and the
// zero-correlation upper bound.

#include "dps/simd/dispatch.hpp"
#include "dps/traffic.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <tuple>

namespace dps {

using CorrelationMatrix = Eigen::MatrixXd;

/// Either a single equicorrelation coefficient or a full matrix.
class CorrelationSpec {
public:
    static CorrelationSpec equicorrelated(double rho);
    static CorrelationSpec from_matrix(CorrelationMatrix matrix);

    bool is_equicorrelated() const noexcept { return !matrix_; }
    double rho() const noexcept { return rho_; }

    /// Matrix for n variables. A full matrix must already be n x n.
    CorrelationMatrix matrix(int n) const;

private:
    double rho_ = 0.0;
    std::optional<CorrelationMatrix> matrix_;
};

/// Unit diagonal, rho elsewhere. Throws std::domain_error unless
/// -1/(n-1) <= rho <= 1.
CorrelationMatrix build_equicorrelation_matrix(int n, double rho);

/// Throws std::invalid_argument unless the matrix is square, symmetric, has
/// a unit diagonal and entries in [-1, 1]. Positive semi-definiteness is not
/// checked here.
void check_correlation_structure(const CorrelationMatrix& m);

struct RepairResult {
    CorrelationMatrix matrix;
    bool repaired = false;
    double min_eigenvalue = 0.0; ///< of the input
};

/// Clips negative eigenvalues to zero and rescales to a unit diagonal when
/// the smallest eigenvalue is below -tolerance. Logs a warning on repair.
RepairResult repair_correlation(const CorrelationMatrix& m, double tolerance = 1e-10);

inline constexpr std::uint64_t kDefaultSeed = 20190715;

struct MvnOptions {
    std::uint64_t samples = 1'000'000; ///< integrand evaluations (rounded up to even)
    std::uint64_t seed = kDefaultSeed;
    unsigned threads = 0;              ///< 0: one per hardware thread
    std::optional<simd::Isa> isa;      ///< unset: best available
};

struct MvnEstimate {
    double p = 0.0;
    /// Monte Carlo standard error, combined in quadrature with a bound on
    /// the deterministic error of the vectorized integrand (dim * 1e-14).
    double std_error = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

/// P(lower <= X <= upper) for X ~ N(0, sigma) with sigma a correlation
/// matrix. Infinite bounds are allowed. Indefinite matrices are repaired
/// first. The estimate depends only on the inputs, seed and sample count,
/// never on the thread count or instruction set.
MvnEstimate mvn_box_probability(const CorrelationMatrix& sigma, std::span<const double> lower,
                                std::span<const double> upper, const MvnOptions& opts = {});

/// Probability that none of n equicorrelated nodes with accuracy alpha
/// transmits: the box [-q, q]^n with q = |Phi^-1((1 - alpha)/2)|. Exactly 1
/// for n = 0 or alpha = 1 and exactly 0 for alpha = 0 (n >= 1).
MvnEstimate prob_no_transmission(int n, double alpha, double rho, const MvnOptions& opts = {});

/// Memoizes prob_no_transmission for repeated evaluation over a grid.
/// Safe for concurrent use.
class NoTransmissionCache {
public:
    explicit NoTransmissionCache(MvnOptions opts = {}) : opts_(opts) {}

    MvnEstimate get(int n, double alpha, double rho);
    const MvnOptions& options() const noexcept { return opts_; }

private:
    MvnOptions opts_;
    std::mutex mutex_;
    std::map<std::tuple<int, double, double>, MvnEstimate> entries_;
};

struct RateEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Rounds a real-valued node count up, ignoring representation noise below
/// 1e-9 (so a K_d of 8.0000000000001 stays 8).
int integer_nodes(double count);

/// Uplink packets per slot of a ring-d node that merges its own reading and
/// its subtree's into one packet whenever any of them mispredicts.
RateEstimate aggregated_tx(int d, int rings, double alpha, double rho, NoTransmissionCache& cache);
RateEstimate aggregated_tx(int d, int rings, double alpha, double rho, const MvnOptions& opts = {});

/// Packets per slot received from the ring-(d+1) children, each child
/// subtree treated as an independent group of ceil(K_d / I_d) nodes.
RateEstimate aggregated_rx(int d, int rings, double alpha, double rho, NoTransmissionCache& cache);
RateEstimate aggregated_rx(int d, int rings, double alpha, double rho, const MvnOptions& opts = {});

struct TrafficEstimate {
    TrafficReport mean;
    TrafficReport std_error;
};

/// Expected traffic over one period of a ring-d node under prediction plus
/// aggregation, including one dissemination round.
TrafficEstimate aggregated_dps_traffic(int d, int rings, double alpha, double rho, double rate,
                                       double period, DisseminationMode mode,
                                       NoTransmissionCache& cache);

/// Upper bound on the aggregated traffic assuming uncorrelated errors:
/// [(1 - alpha^(1+K)) + I (1 - alpha^(K/I))] f T + X_top, real-valued K, I.
double aggregated_traffic_bound(int d, int rings, double alpha, double rate, double period,
                                DisseminationMode mode);

/// Fisher z average of the upper-triangle entries: tanh(mean(atanh(r))).
/// Throws std::domain_error if some |r| = 1.
double average_correlation(const CorrelationMatrix& m);

/// Same, for an explicit list of coefficients.
double average_correlation(std::span<const double> coefficients);

} // namespace dps
