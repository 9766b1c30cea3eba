#include "dps/validation.hpp"

#include "dps/prediction.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <string_view>

namespace dps {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    if (sep == ' ') {
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
                ++i;
            }
            const std::size_t b = i;
            while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
                ++i;
            }
            if (i > b) {
                out.push_back(line.substr(b, i - b));
            }
        }
        return out;
    }
    std::size_t b = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == sep) {
            std::string_view cell = line.substr(b, i - b);
            while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) {
                cell.remove_prefix(1);
            }
            while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) {
                cell.remove_suffix(1);
            }
            out.push_back(cell);
            b = i + 1;
        }
    }
    return out;
}

template <class T>
bool parse_number(std::string_view s, T& out)
{
    if (s.empty()) {
        return false;
    }
    if (s.front() == '+') {
        s.remove_prefix(1);
    }
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

int intel_column(const std::string& field)
{
    if (field == "temperature") {
        return 4;
    }
    if (field == "humidity") {
        return 5;
    }
    if (field == "light") {
        return 6;
    }
    if (field == "voltage") {
        return 7;
    }
    throw std::invalid_argument("unknown Intel Lab field '" + field +
                                "' (temperature, humidity, light or voltage)");
}

bool parse_intel_line(std::string_view line, int column, Reading& r)
{
    const auto tok = split(line, ' ');
    if (tok.size() <= static_cast<std::size_t>(column) || tok.size() < 4) {
        return false;
    }
    try {
        r.timestamp = parse_timestamp(std::string(tok[0]) + " " + std::string(tok[1]));
    } catch (const std::invalid_argument&) {
        return false;
    }
    return parse_number(tok[3], r.node) && parse_number(tok[static_cast<std::size_t>(column)], r.value) &&
           std::isfinite(r.value);
}

bool parse_csv_line(std::string_view line, Reading& r)
{
    const auto cells = split(line, ',');
    if (cells.size() < 3) {
        return false;
    }
    if (!parse_number(cells[0], r.timestamp)) {
        try {
            r.timestamp = parse_timestamp(cells[0]);
        } catch (const std::invalid_argument&) {
            return false;
        }
    }
    return parse_number(cells[1], r.node) && parse_number(cells[2], r.value) && std::isfinite(r.value);
}

} // namespace

double parse_timestamp(std::string_view text)
{
    int y = 0;
    unsigned mo = 0;
    unsigned d = 0;
    const auto bad = [&] { return std::invalid_argument("cannot parse timestamp '" + std::string(text) + "'"); };
    if (text.size() < 10 || text[4] != '-' || text[7] != '-' || !parse_number(text.substr(0, 4), y) ||
        !parse_number(text.substr(5, 2), mo) || !parse_number(text.substr(8, 2), d)) {
        throw bad();
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{mo}, std::chrono::day{d}};
    if (!ymd.ok()) {
        throw bad();
    }
    double seconds = static_cast<double>(std::chrono::sys_days{ymd}.time_since_epoch().count()) * 86400.0;
    std::string_view rest = text.substr(10);
    while (!rest.empty() && (rest.front() == ' ' || rest.front() == 'T')) {
        rest.remove_prefix(1);
    }
    if (rest.empty()) {
        return seconds;
    }
    int hh = 0;
    int mm = 0;
    double ss = 0.0;
    if (rest.size() < 8 || rest[2] != ':' || rest[5] != ':' || !parse_number(rest.substr(0, 2), hh) ||
        !parse_number(rest.substr(3, 2), mm) || !parse_number(rest.substr(6), ss) || hh > 23 || mm > 59 ||
        !(ss >= 0.0 && ss < 61.0)) {
        throw bad();
    }
    return seconds + hh * 3600.0 + mm * 60.0 + ss;
}

MeasurementTrace parse_trace(std::istream& in, const ParseOptions& opts, std::string source)
{
    MeasurementTrace trace;
    trace.source = std::move(source);
    trace.field = opts.format == TraceFormat::csv ? "value" : opts.field;
    TraceFormat format = opts.format;
    const int column = intel_column(opts.field);

    std::size_t lines = 0;
    std::size_t dropped = 0;
    bool first = true;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        if (first) {
            first = false;
            if (format == TraceFormat::automatic) {
                format = line.find(',') != std::string::npos ? TraceFormat::csv : TraceFormat::intel_lab;
                if (format == TraceFormat::csv) {
                    trace.field = "value";
                }
            }
            if (format == TraceFormat::csv) {
                continue; // header
            }
        }
        ++lines;
        Reading r;
        const bool ok = format == TraceFormat::csv ? parse_csv_line(line, r) : parse_intel_line(line, column, r);
        if (!ok) {
            ++trace.malformed_lines;
            continue;
        }
        if (!opts.nodes.empty() && !opts.nodes.contains(r.node)) {
            continue;
        }
        if (opts.value_range && (r.value < opts.value_range->first || r.value > opts.value_range->second)) {
            ++dropped;
            continue;
        }
        trace.readings.push_back(r);
    }
    if (lines == 0) {
        throw std::runtime_error("trace " + trace.source + " contains no readings");
    }
    if (2 * trace.malformed_lines > lines) {
        throw std::runtime_error("trace " + trace.source + ": " + std::to_string(trace.malformed_lines) +
                                 " of " + std::to_string(lines) + " lines are malformed");
    }
    if (trace.malformed_lines > 0) {
        spdlog::warn("{}: skipped {} malformed line(s) of {}", trace.source, trace.malformed_lines, lines);
    }
    if (dropped > 0) {
        spdlog::info("{}: dropped {} reading(s) outside the accepted value range", trace.source, dropped);
    }
    return trace;
}

MeasurementTrace parse_trace(const std::filesystem::path& path, const ParseOptions& opts)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open trace file " + path.string());
    }
    return parse_trace(in, opts, path.string());
}

double ResampledSeries::coverage() const
{
    if (values.empty()) {
        return 0.0;
    }
    const auto present = std::count_if(values.begin(), values.end(), [](double v) { return !std::isnan(v); });
    return static_cast<double>(present) / static_cast<double>(values.size());
}

std::size_t ResampledSeries::windows_per_hour() const
{
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(3600.0 / window)));
}

ResampledSeries resample(const MeasurementTrace& trace, const ResampleOptions& opts)
{
    if (!(opts.window > 0.0) || opts.days < 1) {
        throw std::domain_error("window must be > 0 and days >= 1");
    }
    if (trace.readings.empty()) {
        throw std::invalid_argument("cannot resample an empty trace");
    }
    std::map<int, std::vector<std::pair<double, double>>> by_node;
    double first = std::numeric_limits<double>::infinity();
    for (const auto& r : trace.readings) {
        by_node[r.node].emplace_back(r.timestamp, r.value);
        first = std::min(first, r.timestamp);
    }

    ResampledSeries s;
    s.window = opts.window;
    s.start = opts.start ? *opts.start : std::floor(first / 86400.0) * 86400.0;
    s.windows = static_cast<std::size_t>(std::floor(opts.days * 86400.0 / opts.window + 1e-9));
    s.values.assign(by_node.size() * s.windows, kNaN);

    std::size_t index = 0;
    for (auto& [node, points] : by_node) {
        s.nodes.push_back(node);
        std::stable_sort(points.begin(), points.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                          static_cast<std::uint32_t>(node)};
        std::mt19937_64 rng(seq);
        const auto lower_at = [&](double t) {
            return std::lower_bound(points.begin(), points.end(), t,
                                    [](const auto& p, double v) { return p.first < v; });
        };
        for (std::size_t w = 0; w < s.windows; ++w) {
            const std::uint64_t draw = rng(); // one draw per window keeps streams aligned
            const double lo = s.start + static_cast<double>(w) * s.window;
            const double hi = lo + s.window;
            const auto b = lower_at(lo);
            const auto e = lower_at(hi);
            double& cell = s.values[index * s.windows + w];
            if (e != b) {
                const auto k = static_cast<std::uint64_t>(e - b);
                cell = (b + static_cast<std::ptrdiff_t>(draw % k))->second;
                continue;
            }
            const double hour_lo = s.start + std::floor((lo - s.start) / 3600.0) * 3600.0;
            const double hour_hi = hour_lo + 3600.0;
            const double mid = lo + 0.5 * s.window;
            double best = std::numeric_limits<double>::infinity();
            // the nearest candidates are the neighbours of the empty window
            for (auto it : {b, e}) {
                for (auto c : {it - (it != points.begin() ? 1 : 0), it}) {
                    if (c == points.end() || c->first < hour_lo || c->first >= hour_hi) {
                        continue;
                    }
                    const double dist = std::fabs(c->first - mid);
                    if (dist < best) {
                        best = dist;
                        cell = c->second;
                    }
                }
            }
        }
        ++index;
    }
    return s;
}

HourlyStats hourly_stats(const ResampledSeries& series)
{
    if (series.nodes.empty() || series.windows == 0) {
        throw std::invalid_argument("hourly statistics need a non-empty series");
    }
    const std::size_t per_hour = series.windows_per_hour();
    HourlyStats st;
    st.nodes = series.nodes;
    st.hours = (series.windows + per_hour - 1) / per_hour;
    st.cells.assign(series.nodes.size() * st.hours, {});
    for (std::size_t n = 0; n < series.nodes.size(); ++n) {
        for (std::size_t h = 0; h < st.hours; ++h) {
            const std::size_t w0 = h * per_hour;
            const std::size_t w1 = std::min(series.windows, w0 + per_hour);
            double sum = 0.0;
            int count = 0;
            for (std::size_t w = w0; w < w1; ++w) {
                const double v = series.at(n, w);
                if (!std::isnan(v)) {
                    sum += v;
                    ++count;
                }
            }
            HourStat& cell = st.cells[n * st.hours + h];
            cell.count = count;
            cell.mean = count > 0 ? sum / count : kNaN;
            if (count < 2) {
                cell.std_dev = kNaN;
                continue;
            }
            double ss = 0.0;
            for (std::size_t w = w0; w < w1; ++w) {
                const double v = series.at(n, w);
                if (!std::isnan(v)) {
                    ss += (v - cell.mean) * (v - cell.mean);
                }
            }
            cell.std_dev = std::sqrt(ss / (count - 1));
        }
    }
    return st;
}

TransmissionCounts count_dps_transmissions(const ResampledSeries& series, const HourlyStats& stats,
                                           std::span<const double> accuracy_levels)
{
    if (stats.nodes != series.nodes) {
        throw std::invalid_argument("statistics were computed for a different node set");
    }
    const std::size_t per_hour = series.windows_per_hour();
    const std::size_t nodes = series.nodes.size();

    TransmissionCounts out;
    out.no_dps_baseline = static_cast<std::int64_t>(nodes * series.windows);
    out.aggregation_baseline = static_cast<std::int64_t>(series.windows);

    std::vector<bool> hour_ok(stats.hours, true);
    for (std::size_t h = 0; h < stats.hours; ++h) {
        for (std::size_t n = 0; n < nodes; ++n) {
            hour_ok[h] = hour_ok[h] && stats.at(n, h).usable();
        }
    }
    std::int64_t counted = 0;
    for (std::size_t w = 0; w < series.windows; ++w) {
        counted += hour_ok[w / per_hour] ? 1 : 0;
    }
    out.excluded_windows = out.aggregation_baseline - counted;

    for (double alpha : accuracy_levels) {
        AccuracyCount level;
        level.alpha = alpha;
        std::vector<double> eps(nodes * stats.hours, 0.0);
        for (std::size_t i = 0; i < eps.size(); ++i) {
            const HourStat& c = stats.cells[i];
            if (c.usable() && c.std_dev > 0.0) {
                eps[i] = alpha >= 1.0 ? std::numeric_limits<double>::infinity()
                                      : threshold_from_accuracy(alpha, c.std_dev);
            }
        }
        for (std::size_t w = 0; w < series.windows; ++w) {
            const std::size_t h = w / per_hour;
            if (!hour_ok[h]) {
                continue;
            }
            for (std::size_t n = 0; n < nodes; ++n) {
                const double v = series.at(n, w);
                if (!std::isnan(v) && std::fabs(v - stats.at(n, h).mean) > eps[n * stats.hours + h]) {
                    ++level.transmissions;
                    break;
                }
            }
        }
        level.percent = counted > 0 ? 100.0 * static_cast<double>(level.transmissions) / static_cast<double>(counted)
                                    : 0.0;
        out.levels.push_back(level);
    }
    return out;
}

CorrelationMatrix pairwise_correlation(const ResampledSeries& series)
{
    const auto n = static_cast<Eigen::Index>(series.nodes.size());
    CorrelationMatrix m = CorrelationMatrix::Identity(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a + 1; b < n; ++b) {
            double sa = 0.0;
            double sb = 0.0;
            std::size_t k = 0;
            const auto ua = static_cast<std::size_t>(a);
            const auto ub = static_cast<std::size_t>(b);
            for (std::size_t w = 0; w < series.windows; ++w) {
                const double x = series.at(ua, w);
                const double y = series.at(ub, w);
                if (!std::isnan(x) && !std::isnan(y)) {
                    sa += x;
                    sb += y;
                    ++k;
                }
            }
            if (k < 2) {
                throw std::domain_error("nodes " + std::to_string(series.nodes[ua]) + " and " +
                                        std::to_string(series.nodes[ub]) + " share fewer than two windows");
            }
            const double ma = sa / static_cast<double>(k);
            const double mb = sb / static_cast<double>(k);
            double sxy = 0.0;
            double sxx = 0.0;
            double syy = 0.0;
            for (std::size_t w = 0; w < series.windows; ++w) {
                const double x = series.at(ua, w);
                const double y = series.at(ub, w);
                if (!std::isnan(x) && !std::isnan(y)) {
                    sxy += (x - ma) * (y - mb);
                    sxx += (x - ma) * (x - ma);
                    syy += (y - mb) * (y - mb);
                }
            }
            const double r = (sxx > 0.0 && syy > 0.0) ? std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0) : 0.0;
            m(a, b) = r;
            m(b, a) = r;
        }
    }
    return m;
}

ValidationReport validate_trace(const MeasurementTrace& trace, const ValidationOptions& opts)
{
    const ResampledSeries series = resample(trace, opts.resample);
    const HourlyStats stats = hourly_stats(series);

    ValidationReport rep;
    rep.nodes = series.nodes.size();
    rep.windows = series.windows;
    rep.coverage = series.coverage();
    rep.average_correlation = average_correlation(pairwise_correlation(series));
    rep.counts = count_dps_transmissions(series, stats, opts.accuracy_levels);

    double rho = rep.average_correlation;
    if (rho < 0.0) {
        spdlog::warn("average correlation {:.4f} is negative; the model is evaluated at 0", rho);
        rho = 0.0;
    }
    for (const auto& level : rep.counts.levels) {
        const MvnEstimate p = prob_no_transmission(static_cast<int>(rep.nodes), level.alpha, rho, opts.mvn);
        ValidationRow row;
        row.alpha = level.alpha;
        row.real_percent = level.percent;
        row.model_percent = 100.0 * (1.0 - p.p);
        row.model_std_error = 100.0 * p.std_error;
        row.difference = row.model_percent - row.real_percent;
        rep.rows.push_back(row);
    }
    return rep;
}

} // namespace dps
