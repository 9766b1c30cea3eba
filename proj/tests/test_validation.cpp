#include "doctest.h"

#include "dps/simulator.hpp"
#include "dps/validation.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

using namespace dps;

namespace {

MeasurementTrace parse_text(const std::string& text, ParseOptions opts = {})
{
    std::istringstream in(text);
    return parse_trace(in, opts, "inline");
}

// One reading per node every `step` seconds over `days` days.
MeasurementTrace gaussian_trace(int nodes, double rho, double step, int days, std::uint64_t seed)
{
    const std::vector<double> means(static_cast<std::size_t>(nodes), 20.0);
    const std::vector<double> stds(static_cast<std::size_t>(nodes), 0.7);
    const auto g = generate_measurements(CorrelationSpec::equicorrelated(rho), means, stds, 1.0 / step,
                                         days * 86400.0, seed);
    // shift off the window edges so every reading falls inside its window
    return to_measurement_trace(g, 1.0);
}

} // namespace

TEST_CASE("timestamps are read as UTC")
{
    CHECK(parse_timestamp("1970-01-01") == 0.0);
    CHECK(parse_timestamp("2004-02-28 00:59:16.02785") == doctest::Approx(1077929956.02785));
    CHECK(parse_timestamp("2004-03-01T12:00:00") == doctest::Approx(1078142400.0));
    CHECK_THROWS_AS(parse_timestamp("2004-02-30"), std::invalid_argument);
    CHECK_THROWS_AS(parse_timestamp("28/02/2004"), std::invalid_argument);
    CHECK_THROWS_AS(parse_timestamp("2004-02-28 25:00:00"), std::invalid_argument);
}

TEST_CASE("Intel Lab lines")
{
    const std::string text = "2004-02-28 00:59:16.02785 3 1 19.9884 37.0933 45.08 2.69964\n"
                             "2004-02-28 01:03:16.33393 11 1 19.3024 38.4629 45.08 2.68742\n"
                             "2004-02-28 01:06:16.013453 20 2 19.1652 38.8039 45.08 2.68742\n";
    const MeasurementTrace t = parse_text(text);
    REQUIRE(t.readings.size() == 3);
    CHECK(t.readings[0].node == 1);
    CHECK(t.readings[2].node == 2);
    CHECK(t.readings[1].value == doctest::Approx(19.3024));
    CHECK(t.field == "temperature");
    CHECK(t.malformed_lines == 0);

    ParseOptions humidity;
    humidity.field = "humidity";
    CHECK(parse_text(text, humidity).readings[0].value == doctest::Approx(37.0933));

    ParseOptions only_two;
    only_two.nodes = {2};
    CHECK(parse_text(text, only_two).readings.size() == 1);

    ParseOptions range;
    range.value_range = std::pair{19.2, 30.0};
    CHECK(parse_text(text, range).readings.size() == 2);

    ParseOptions bogus;
    bogus.field = "pressure";
    CHECK_THROWS_AS(parse_text(text, bogus), std::invalid_argument);
}

TEST_CASE("malformed lines are skipped until they dominate")
{
    const std::string good = "2004-02-28 00:59:16.02785 3 1 19.9884 37.0933 45.08 2.69964\n";
    const MeasurementTrace t = parse_text(good + good + "2004-02-28 01:00:00 4 1\n");
    CHECK(t.readings.size() == 2);
    CHECK(t.malformed_lines == 1);

    CHECK_THROWS_AS(parse_text(good + "garbage\nmore garbage\n"), std::runtime_error);
    CHECK_THROWS_AS(parse_text("\n\n"), std::runtime_error);
    CHECK_THROWS_AS(parse_trace(std::filesystem::path("/nonexistent/trace.txt")), std::runtime_error);
}

TEST_CASE("CSV traces")
{
    const MeasurementTrace t = parse_text("timestamp,node,value\n"
                                          "0,1,20.5\n"
                                          "2004-02-28 01:00:00, 2, 21.0\n"
                                          "60,1,nope\n"
                                          "120,1,20.7\n");
    CHECK(t.field == "value");
    REQUIRE(t.readings.size() == 3);
    CHECK(t.readings[1].timestamp == doctest::Approx(1077930000.0));
    CHECK(t.readings[1].node == 2);
    CHECK(t.malformed_lines == 1);
}

TEST_CASE("resampling grid")
{
    const MeasurementTrace t = gaussian_trace(9, 0.5, 300.0, 8, 3);
    const ResampledSeries s = resample(t, {});
    CHECK(s.nodes.size() == 9);
    CHECK(s.windows == 2304);
    CHECK(s.windows_per_hour() == 12);
    CHECK(s.coverage() == 1.0);
    CHECK(s.start == 0.0);
    // one reading per window is taken as is
    CHECK(s.at(0, 5) == t.readings[5 * 9].value);
}

TEST_CASE("resampling picks within the window and fills gaps from the same hour")
{
    MeasurementTrace t;
    for (int k = 0; k < 10; ++k) {
        t.readings.push_back({10.0 + k, 1, static_cast<double>(k)});
    }
    t.readings.push_back({3700.0, 1, 42.0});
    ResampleOptions opts;
    opts.days = 1;
    opts.start = 0.0;

    bool differs = false;
    const double first = resample(t, opts).at(0, 0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        opts.seed = seed;
        const ResampledSeries s = resample(t, opts);
        const double v = s.at(0, 0);
        CHECK(v >= 0.0);
        CHECK(v <= 9.0);
        CHECK(v == std::floor(v));
        differs = differs || v != first;
        // empty windows of hour 0 borrow the closest reading, the last one
        CHECK(s.at(0, 6) == 9.0);
        // hour 1 holds one reading only
        CHECK(s.at(0, 12) == 42.0);
        CHECK(s.at(0, 23) == 42.0);
        CHECK(std::isnan(s.at(0, 24)));
    }
    CHECK(differs);

    opts.window = 0.0;
    CHECK_THROWS_AS(resample(t, opts), std::domain_error);
    CHECK_THROWS_AS(resample(MeasurementTrace{}, {}), std::invalid_argument);
}

TEST_CASE("hourly statistics")
{
    ResampledSeries s;
    s.window = 1200.0;
    s.nodes = {1, 2};
    s.windows = 6;
    const double nan = std::nan("");
    s.values = {1.0, 2.0, 3.0, 5.0, 5.0, 5.0, // node 1
                4.0, nan, nan, 7.0, 8.0, nan};
    const HourlyStats st = hourly_stats(s);
    REQUIRE(st.hours == 2);
    CHECK(st.at(0, 0).mean == 2.0);
    CHECK(st.at(0, 0).std_dev == doctest::Approx(1.0));
    CHECK(st.at(0, 1).std_dev == 0.0);
    CHECK(st.at(1, 0).count == 1);
    CHECK_FALSE(st.at(1, 0).usable());
    CHECK(std::isnan(st.at(1, 0).std_dev));
    CHECK(st.at(1, 1).mean == 7.5);

    // hour 0 cannot be predicted for node 2 and is left out
    const std::vector<double> levels{0.0, 0.5};
    const TransmissionCounts c = count_dps_transmissions(s, st, levels);
    CHECK(c.no_dps_baseline == 12);
    CHECK(c.aggregation_baseline == 6);
    CHECK(c.excluded_windows == 3);
    // hour 1: node 1 is constant, node 2 deviates by 0.5 in two windows
    CHECK(c.levels[0].transmissions == 2);
    CHECK(c.levels[0].percent == doctest::Approx(200.0 / 3.0));
}

TEST_CASE("transmission counts over a synthetic deployment")
{
    const ResampledSeries s = resample(gaussian_trace(9, 0.6, 300.0, 8, 11), {});
    const HourlyStats st = hourly_stats(s);
    const std::vector<double> levels{0.0, 0.5, 0.7, 0.9, 0.95, 1.0};
    const TransmissionCounts c = count_dps_transmissions(s, st, levels);
    CHECK(c.no_dps_baseline == 20736);
    CHECK(c.aggregation_baseline == 2304);
    CHECK(c.excluded_windows == 0);
    CHECK(c.levels.front().percent == 100.0);
    CHECK(c.levels.back().transmissions == 0);
    for (std::size_t i = 1; i < c.levels.size(); ++i) {
        CHECK(c.levels[i].transmissions <= c.levels[i - 1].transmissions);
    }
}

TEST_CASE("pairwise correlation")
{
    ResampledSeries s;
    s.nodes = {1, 2, 3};
    s.windows = 4;
    s.values = {1, 2, 3, 4, 2, 4, 6, 8, 4, 3, 2, 1};
    const CorrelationMatrix m = pairwise_correlation(s);
    CHECK(m(0, 1) == doctest::Approx(1.0));
    CHECK(m(0, 2) == doctest::Approx(-1.0));
    CHECK(m(1, 1) == 1.0);

    s.values[4] = s.values[5] = s.values[6] = std::nan("");
    CHECK_THROWS_AS(pairwise_correlation(s), std::domain_error);
}

TEST_CASE("model and trace agree on Gaussian readings")
{
    // Hour statistics are estimated from the windows of that hour. With 12
    // windows the studentized residuals have visibly lighter tails than a
    // normal and the real counts fall below the model at high alpha, so one
    // minute windows are used here.
    for (double rho : {0.3, 0.8}) {
        CAPTURE(rho);
        ValidationOptions opts;
        opts.mvn.samples = 200'000;
        opts.resample.window = 60.0;
        const ValidationReport rep = validate_trace(gaussian_trace(9, rho, 60.0, 8, 5), opts);
        CHECK(rep.nodes == 9);
        CHECK(rep.windows == 11520);
        CHECK(rep.average_correlation == doctest::Approx(rho).epsilon(0.05));
        REQUIRE(rep.rows.size() == kDefaultAccuracyGrid.size());
        for (const auto& row : rep.rows) {
            CAPTURE(row.alpha);
            CHECK(row.difference == doctest::Approx(row.model_percent - row.real_percent));
            CHECK(std::fabs(row.difference) < 3.0);
        }
    }
}
