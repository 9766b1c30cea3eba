#pragma once

// Trace-driven check of the aggregation model: resample real readings onto
// fixed windows, predict each reading by its node-hour mean and count the
// windows in which at least one node would have had to transmit.

#include "dps/correlation.hpp"
#include "dps/trace.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace dps {

enum class TraceFormat {
    automatic, ///< CSV when the first line contains a comma, Intel Lab otherwise
    intel_lab, ///< date time epoch mote temperature humidity light voltage
    csv,       ///< header line, then timestamp,node,value
};

struct ParseOptions {
    TraceFormat format = TraceFormat::automatic;
    std::string field = "temperature"; ///< Intel Lab column to extract
    std::set<int> nodes;               ///< keep only these nodes; empty keeps all
    std::optional<std::pair<double, double>> value_range; ///< drop readings outside
};

/// Parses a trace. Malformed lines are skipped and counted; more than half
/// of the non-empty lines being malformed is an error, as is an unreadable
/// file.
MeasurementTrace parse_trace(const std::filesystem::path& path, const ParseOptions& opts = {});
MeasurementTrace parse_trace(std::istream& in, const ParseOptions& opts, std::string source);

/// "YYYY-MM-DD" or "YYYY-MM-DD HH:MM:SS[.frac]" as seconds since the epoch,
/// reading the fields as UTC.
double parse_timestamp(std::string_view text);

struct ResampleOptions {
    double window = 300.0;       ///< seconds
    int days = 8;
    std::optional<double> start; ///< default: midnight before the first reading
    std::uint64_t seed = kDefaultSeed;
};

/// One value (or NaN for missing) per node and window.
struct ResampledSeries {
    double start = 0.0;
    double window = 300.0;
    std::vector<int> nodes;
    std::size_t windows = 0;
    std::vector<double> values; ///< node-major: values[node_index * windows + w]

    double at(std::size_t node_index, std::size_t w) const { return values[node_index * windows + w]; }
    /// Fraction of non-missing cells.
    double coverage() const;
    std::size_t windows_per_hour() const;
};

/// Picks one reading per node and window uniformly at random (per-node
/// streams derived from the seed). An empty window takes the reading nearest
/// to its midpoint within the same hour, or stays missing.
ResampledSeries resample(const MeasurementTrace& trace, const ResampleOptions& opts);

struct HourStat {
    double mean = 0.0;
    double std_dev = 0.0; ///< n - 1 denominator; NaN when count < 2
    int count = 0;

    bool usable() const noexcept { return count >= 2; }
};

struct HourlyStats {
    std::vector<int> nodes;
    std::size_t hours = 0;
    std::vector<HourStat> cells; ///< node-major: cells[node_index * hours + h]

    const HourStat& at(std::size_t node_index, std::size_t h) const { return cells[node_index * hours + h]; }
};

HourlyStats hourly_stats(const ResampledSeries& series);

struct AccuracyCount {
    double alpha = 0.0;
    std::int64_t transmissions = 0;
    double percent = 0.0; ///< of the windows that were counted
};

struct TransmissionCounts {
    std::int64_t no_dps_baseline = 0;     ///< every reading of every node forwarded
    std::int64_t aggregation_baseline = 0; ///< one merged packet per window
    std::int64_t excluded_windows = 0;     ///< windows in hours some node cannot be predicted in
    std::vector<AccuracyCount> levels;
};

/// For each accuracy the threshold of a node-hour is
/// threshold_from_accuracy(alpha, std_dev); a window transmits when some
/// node deviates from its hour mean by more than that.
TransmissionCounts count_dps_transmissions(const ResampledSeries& series, const HourlyStats& stats,
                                           std::span<const double> accuracy_levels);

/// Pearson correlations between node series over windows where both are
/// present.
CorrelationMatrix pairwise_correlation(const ResampledSeries& series);

inline const std::vector<double> kDefaultAccuracyGrid{0.5, 0.6, 0.7, 0.8, 0.9, 0.95};

struct ValidationOptions {
    ResampleOptions resample;
    std::vector<double> accuracy_levels = kDefaultAccuracyGrid;
    MvnOptions mvn;
};

struct ValidationRow {
    double alpha = 0.0;
    double real_percent = 0.0;
    double model_percent = 0.0;
    double model_std_error = 0.0; ///< percentage points
    double difference = 0.0;      ///< model - real, percentage points
};

struct ValidationReport {
    std::size_t nodes = 0;
    std::size_t windows = 0;
    double coverage = 0.0;
    double average_correlation = 0.0;
    TransmissionCounts counts;
    std::vector<ValidationRow> rows;
};

/// Full pipeline; the model column is 1 - prob_no_transmission(nodes, alpha,
/// average correlation).
ValidationReport validate_trace(const MeasurementTrace& trace, const ValidationOptions& opts);

} // namespace dps
