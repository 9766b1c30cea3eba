#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

namespace dps {

struct Reading {
    double timestamp = 0.0; ///< seconds since the epoch
    int node = 0;
    double value = 0.0;
};

/// Timestamped readings of several nodes, in file order.
struct MeasurementTrace {
    std::vector<Reading> readings;
    std::string source;
    std::string field;
    std::size_t malformed_lines = 0;

    std::set<int> nodes() const;
};

} // namespace dps
