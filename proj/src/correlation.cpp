#include "dps/correlation.hpp"

#include "dps/normal.hpp"
#include "dps/simd/kernels.hpp"
#include "dps/topology.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace dps {

namespace {

constexpr std::size_t kPairsPerChunk = 512;
constexpr double kPivotTolerance = 1e-12;
constexpr double kEvalErrorPerDim = 1e-14;

void check_rho_range(int n, double rho)
{
    const double low = n > 1 ? -1.0 / (n - 1) : -1.0;
    if (!(rho >= low && rho <= 1.0)) {
        std::ostringstream msg;
        msg << "equicorrelation rho=" << rho << " is not positive semi-definite for n=" << n
            << "; valid interval is [" << low << ", 1]";
        throw std::domain_error(msg.str());
    }
}

bool is_equicorrelation(const CorrelationMatrix& m, double& rho)
{
    const Eigen::Index n = m.rows();
    if (n < 2) {
        rho = 0.0;
        return true;
    }
    rho = m(1, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            if (m(i, j) != rho) {
                return false;
            }
        }
    }
    return true;
}

// Row i is singular when its pivot vanishes: the variable is then a fixed
// linear combination of the previous ones.
void mark_pivot(simd::GenzSystem& sys, int i, double pivot_sq)
{
    const auto n = static_cast<std::size_t>(sys.dim);
    const auto at = static_cast<std::size_t>(i) * n + static_cast<std::size_t>(i);
    if (pivot_sq < kPivotTolerance) {
        sys.chol[at] = 0.0;
        sys.inv_diag[static_cast<std::size_t>(i)] = 0.0;
        sys.singular[static_cast<std::size_t>(i)] = 1;
    } else {
        const double pivot = std::sqrt(pivot_sq);
        sys.chol[at] = pivot;
        sys.inv_diag[static_cast<std::size_t>(i)] = 1.0 / pivot;
    }
}

// Equicorrelation has a Cholesky factor whose below-diagonal part is
// constant in every column: c_j = (rho - sum_{k<j} c_k^2) / L_jj.
void factor_equicorrelation(simd::GenzSystem& sys, double rho)
{
    const int n = sys.dim;
    double used = 0.0; // sum of c_k^2 over previous columns
    for (int j = 0; j < n; ++j) {
        mark_pivot(sys, j, 1.0 - used);
        const double pivot = sys.chol[static_cast<std::size_t>(j) * n + j];
        const double c = pivot > 0.0 ? (rho - used) / pivot : 0.0;
        sys.column_value[static_cast<std::size_t>(j)] = c;
        for (int i = j + 1; i < n; ++i) {
            sys.chol[static_cast<std::size_t>(i) * n + j] = c;
        }
        used += c * c;
    }
    sys.column_constant = true;
}

void factor_general(simd::GenzSystem& sys, const CorrelationMatrix& m)
{
    const int n = sys.dim;
    auto L = [&](int i, int j) -> double& { return sys.chol[static_cast<std::size_t>(i) * n + j]; };
    for (int j = 0; j < n; ++j) {
        double diag = m(j, j);
        for (int k = 0; k < j; ++k) {
            diag -= L(j, k) * L(j, k);
        }
        mark_pivot(sys, j, diag);
        const double pivot = L(j, j);
        for (int i = j + 1; i < n; ++i) {
            if (pivot == 0.0) {
                L(i, j) = 0.0;
                continue;
            }
            double v = m(i, j);
            for (int k = 0; k < j; ++k) {
                v -= L(i, k) * L(j, k);
            }
            L(i, j) = v / pivot;
        }
    }
    sys.column_constant = false;
}

simd::GenzSystem make_system(const CorrelationMatrix& m, std::span<const double> lower,
                             std::span<const double> upper)
{
    const int n = static_cast<int>(m.rows());
    simd::GenzSystem sys;
    sys.dim = n;
    const auto nn = static_cast<std::size_t>(n);
    sys.chol.assign(nn * nn, 0.0);
    sys.inv_diag.assign(nn, 0.0);
    sys.singular.assign(nn, 0);
    sys.column_value.assign(nn, 0.0);
    sys.lower.assign(lower.begin(), lower.end());
    sys.upper.assign(upper.begin(), upper.end());
    double rho = 0.0;
    if (is_equicorrelation(m, rho)) {
        factor_equicorrelation(sys, rho);
    } else {
        factor_general(sys, m);
    }
    return sys;
}

struct ChunkStats {
    std::uint64_t pairs = 0;
    double mean = 0.0;
    double m2 = 0.0;
};

// Chan et al. pairwise update; applied in chunk order so the total does not
// depend on which thread produced which chunk.
void merge(ChunkStats& into, const ChunkStats& other)
{
    if (other.pairs == 0) {
        return;
    }
    const double na = static_cast<double>(into.pairs);
    const double nb = static_cast<double>(other.pairs);
    const double n = na + nb;
    const double delta = other.mean - into.mean;
    into.mean += delta * nb / n;
    into.m2 += other.m2 + delta * delta * na * nb / n;
    into.pairs += other.pairs;
}

class ChunkWorker {
public:
    ChunkWorker(const simd::GenzSystem& sys, std::uint64_t seed, simd::Isa isa)
        : sys_(sys), seed_(seed), isa_(isa)
    {
        const auto n = static_cast<std::size_t>(sys.dim);
        const std::size_t count = 2 * kPairsPerChunk;
        uniforms_.resize((n - 1) * count);
        values_.resize(count);
        scratch_.resize(n * count);
    }

    ChunkStats run(std::uint64_t chunk, std::size_t pairs)
    {
        const auto rows = static_cast<std::size_t>(sys_.dim - 1);
        const std::size_t count = 2 * pairs;
        std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                          static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
        std::mt19937_64 rng(seq);
        for (std::size_t r = 0; r < rows; ++r) {
            double* row = uniforms_.data() + r * count;
            for (std::size_t k = 0; k < pairs; ++k) {
                const double w = static_cast<double>(rng() >> 11) * 0x1.0p-53;
                row[k] = w;
                row[k + pairs] = 1.0 - w;
            }
        }
        simd::genz_evaluate(sys_, std::span<const double>(uniforms_.data(), rows * count), count,
                            values_, scratch_, isa_);
        ChunkStats st;
        for (std::size_t k = 0; k < pairs; ++k) {
            const double v = 0.5 * (values_[k] + values_[k + pairs]);
            ++st.pairs;
            const double delta = v - st.mean;
            st.mean += delta / static_cast<double>(st.pairs);
            st.m2 += delta * (v - st.mean);
        }
        return st;
    }

private:
    const simd::GenzSystem& sys_;
    std::uint64_t seed_;
    simd::Isa isa_;
    std::vector<double> uniforms_;
    std::vector<double> values_;
    std::vector<double> scratch_;
};

MvnEstimate integrate(const simd::GenzSystem& sys, const MvnOptions& opts)
{
    if (opts.samples < 4) {
        throw std::invalid_argument("MVN estimation needs at least 4 samples");
    }
    const std::uint64_t total_pairs = (opts.samples + 1) / 2;
    const std::uint64_t chunks = (total_pairs + kPairsPerChunk - 1) / kPairsPerChunk;
    const simd::Isa isa = opts.isa ? *opts.isa : simd::active_isa();

    unsigned threads = opts.threads != 0 ? opts.threads : std::thread::hardware_concurrency();
    threads = static_cast<unsigned>(std::clamp<std::uint64_t>(threads, 1, chunks));

    std::vector<ChunkStats> results(chunks);
    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        ChunkWorker worker(sys, opts.seed, isa);
        for (std::uint64_t c = next++; c < chunks; c = next++) {
            const std::uint64_t first = c * kPairsPerChunk;
            const auto pairs = static_cast<std::size_t>(std::min<std::uint64_t>(kPairsPerChunk, total_pairs - first));
            results[c] = worker.run(c, pairs);
        }
    };
    if (threads == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(work);
        }
    }

    ChunkStats all;
    for (const auto& r : results) {
        merge(all, r);
    }
    const double n = static_cast<double>(all.pairs);
    const double variance = all.m2 / (n - 1.0);
    const double mc = variance / n;
    const double eval = kEvalErrorPerDim * sys.dim;
    MvnEstimate est;
    est.p = std::clamp(all.mean, 0.0, 1.0);
    est.std_error = std::sqrt(mc + eval * eval);
    est.samples = 2 * total_pairs;
    est.seed = opts.seed;
    return est;
}

double miss_probability(const MvnEstimate& e) { return 1.0 - e.p; }

} // namespace

CorrelationSpec CorrelationSpec::equicorrelated(double rho)
{
    if (!(rho >= -1.0 && rho <= 1.0)) {
        throw std::domain_error("correlation coefficient must lie in [-1, 1]");
    }
    CorrelationSpec s;
    s.rho_ = rho;
    return s;
}

CorrelationSpec CorrelationSpec::from_matrix(CorrelationMatrix matrix)
{
    check_correlation_structure(matrix);
    CorrelationSpec s;
    s.matrix_ = std::move(matrix);
    return s;
}

CorrelationMatrix CorrelationSpec::matrix(int n) const
{
    if (!matrix_) {
        return build_equicorrelation_matrix(n, rho_);
    }
    if (matrix_->rows() != n) {
        throw std::invalid_argument("correlation matrix is " + std::to_string(matrix_->rows()) +
                                    "x" + std::to_string(matrix_->rows()) + ", expected " +
                                    std::to_string(n) + "x" + std::to_string(n));
    }
    return *matrix_;
}

CorrelationMatrix build_equicorrelation_matrix(int n, double rho)
{
    if (n < 1) {
        throw std::domain_error("matrix dimension must be >= 1");
    }
    check_rho_range(n, rho);
    CorrelationMatrix m = CorrelationMatrix::Constant(n, n, rho);
    m.diagonal().setOnes();
    return m;
}

void check_correlation_structure(const CorrelationMatrix& m)
{
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw std::invalid_argument("correlation matrix must be square and non-empty");
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (std::fabs(m(i, i) - 1.0) > 1e-12) {
            throw std::invalid_argument("correlation matrix diagonal must be 1");
        }
        for (Eigen::Index j = 0; j < i; ++j) {
            if (!(std::fabs(m(i, j)) <= 1.0)) {
                throw std::invalid_argument("correlation entries must lie in [-1, 1]");
            }
            if (std::fabs(m(i, j) - m(j, i)) > 1e-12) {
                throw std::invalid_argument("correlation matrix must be symmetric");
            }
        }
    }
}

RepairResult repair_correlation(const CorrelationMatrix& m, double tolerance)
{
    check_correlation_structure(m);
    const CorrelationMatrix sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<CorrelationMatrix> eig(sym);
    RepairResult out;
    out.min_eigenvalue = eig.eigenvalues().minCoeff();
    if (out.min_eigenvalue >= -tolerance) {
        out.matrix = sym;
        return out;
    }
    const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
    CorrelationMatrix fixed = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
    const Eigen::VectorXd scale = fixed.diagonal().cwiseSqrt().cwiseInverse();
    fixed = scale.asDiagonal() * fixed * scale.asDiagonal();
    fixed.diagonal().setOnes();
    out.matrix = 0.5 * (fixed + fixed.transpose());
    out.repaired = true;
    spdlog::warn("correlation matrix ({}x{}) was indefinite (min eigenvalue {:.3e}); "
                 "clipped negative eigenvalues and rescaled to unit diagonal",
                 m.rows(), m.cols(), out.min_eigenvalue);
    return out;
}

MvnEstimate mvn_box_probability(const CorrelationMatrix& sigma, std::span<const double> lower,
                                std::span<const double> upper, const MvnOptions& opts)
{
    const auto n = static_cast<std::size_t>(sigma.rows());
    if (lower.size() != n || upper.size() != n) {
        throw std::invalid_argument("box bounds have " + std::to_string(lower.size()) + "/" +
                                    std::to_string(upper.size()) + " entries for a " +
                                    std::to_string(n) + "-dimensional matrix");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(lower[i] < upper[i])) {
            throw std::invalid_argument("box needs lower < upper in every dimension");
        }
    }

    double rho = 0.0;
    CorrelationMatrix matrix;
    check_correlation_structure(sigma);
    if (is_equicorrelation(sigma, rho)) {
        check_rho_range(static_cast<int>(n), rho);
        matrix = sigma;
    } else {
        auto fixed = repair_correlation(sigma);
        const double after = Eigen::SelfAdjointEigenSolver<CorrelationMatrix>(fixed.matrix)
                                 .eigenvalues()
                                 .minCoeff();
        if (after < -1e-8) {
            throw std::domain_error("correlation matrix is not positive semi-definite after repair");
        }
        matrix = std::move(fixed.matrix);
    }
    return integrate(make_system(matrix, lower, upper), opts);
}

MvnEstimate prob_no_transmission(int n, double alpha, double rho, const MvnOptions& opts)
{
    if (n < 0) {
        throw std::domain_error("node count must be >= 0");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::domain_error("accuracy must lie in [0, 1]");
    }
    if (!(rho >= 0.0 && rho <= 1.0)) {
        throw std::domain_error("correlation must lie in [0, 1]");
    }
    MvnEstimate exact{1.0, 0.0, 0, opts.seed};
    if (n == 0 || alpha == 1.0) {
        return exact;
    }
    if (alpha == 0.0) {
        exact.p = 0.0;
        return exact;
    }
    const double q = std::fabs(normal_quantile(0.5 * (1.0 - alpha)));
    const std::vector<double> lower(static_cast<std::size_t>(n), -q);
    const std::vector<double> upper(static_cast<std::size_t>(n), q);
    return mvn_box_probability(build_equicorrelation_matrix(n, rho), lower, upper, opts);
}

MvnEstimate NoTransmissionCache::get(int n, double alpha, double rho)
{
    const auto key = std::make_tuple(n, alpha, rho);
    {
        std::lock_guard lock(mutex_);
        if (auto it = entries_.find(key); it != entries_.end()) {
            return it->second;
        }
    }
    // computed outside the lock; a racing duplicate yields the same value
    const MvnEstimate est = prob_no_transmission(n, alpha, rho, opts_);
    std::lock_guard lock(mutex_);
    entries_.emplace(key, est);
    return est;
}

int integer_nodes(double count)
{
    if (!(count >= 0.0)) {
        throw std::domain_error("node count must be >= 0");
    }
    return static_cast<int>(std::ceil(count - 1e-9));
}

RateEstimate aggregated_tx(int d, int rings, double alpha, double rho, NoTransmissionCache& cache)
{
    const int members = 1 + integer_nodes(subtree_size(d, rings));
    const MvnEstimate e = cache.get(members, alpha, rho);
    return {miss_probability(e), e.std_error};
}

RateEstimate aggregated_tx(int d, int rings, double alpha, double rho, const MvnOptions& opts)
{
    NoTransmissionCache cache(opts);
    return aggregated_tx(d, rings, alpha, rho, cache);
}

RateEstimate aggregated_rx(int d, int rings, double alpha, double rho, NoTransmissionCache& cache)
{
    const double children = child_ratio(d, rings);
    if (children == 0.0) {
        return {};
    }
    const int fan_in = integer_nodes(children);
    const int members = integer_nodes(subtree_size(d, rings) / children);
    const MvnEstimate e = cache.get(members, alpha, rho);
    return {fan_in * miss_probability(e), fan_in * e.std_error};
}

RateEstimate aggregated_rx(int d, int rings, double alpha, double rho, const MvnOptions& opts)
{
    NoTransmissionCache cache(opts);
    return aggregated_rx(d, rings, alpha, rho, cache);
}

TrafficEstimate aggregated_dps_traffic(int d, int rings, double alpha, double rho, double rate,
                                       double period, DisseminationMode mode,
                                       NoTransmissionCache& cache)
{
    if (!(rate > 0.0) || !(period > 0.0)) {
        throw std::domain_error("rate and period must be > 0");
    }
    const double slots = rate * period;
    const RateEstimate tx = aggregated_tx(d, rings, alpha, rho, cache);
    const RateEstimate rx = aggregated_rx(d, rings, alpha, rho, cache);
    TrafficEstimate out;
    out.mean = TrafficReport{tx.mean * slots, rx.mean * slots} + dissemination_traffic(mode, d, rings);
    out.std_error = TrafficReport{tx.std_error * slots, rx.std_error * slots};
    return out;
}

double aggregated_traffic_bound(int d, int rings, double alpha, double rate, double period,
                                DisseminationMode mode)
{
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::domain_error("accuracy must lie in [0, 1]");
    }
    const double k = subtree_size(d, rings);
    const double i = child_ratio(d, rings);
    const double own = 1.0 - std::pow(alpha, 1.0 + k);
    const double children = i > 0.0 ? i * (1.0 - std::pow(alpha, k / i)) : 0.0;
    return (own + children) * rate * period + dissemination_traffic(mode, d, rings).total();
}

double average_correlation(std::span<const double> coefficients)
{
    if (coefficients.empty()) {
        throw std::domain_error("need at least one correlation coefficient");
    }
    double sum = 0.0;
    for (double r : coefficients) {
        if (!(std::fabs(r) < 1.0)) {
            throw std::domain_error("Fisher z is infinite for |r| >= 1 (got " + std::to_string(r) + ")");
        }
        sum += std::atanh(r);
    }
    return std::tanh(sum / static_cast<double>(coefficients.size()));
}

double average_correlation(const CorrelationMatrix& m)
{
    check_correlation_structure(m);
    if (m.rows() < 2) {
        throw std::domain_error("average correlation needs at least two variables");
    }
    std::vector<double> upper;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
            upper.push_back(m(i, j));
        }
    }
    return average_correlation(upper);
}

} // namespace dps
