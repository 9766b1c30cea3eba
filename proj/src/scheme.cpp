#include "dps/scheme.hpp"
#include "dps/trace.hpp"

#include <stdexcept>
#include <string>

namespace dps {

std::string_view to_string(Scheme scheme) noexcept
{
    switch (scheme) {
    case Scheme::none:
        return "none";
    case Scheme::prediction_only:
        return "prediction-only";
    case Scheme::aggregation_only:
        return "aggregation-only";
    case Scheme::combined:
        return "combined";
    }
    return "?";
}

Scheme parse_scheme(std::string_view name)
{
    for (Scheme s : kAllSchemes) {
        if (name == to_string(s)) {
            return s;
        }
    }
    if (name == "prediction+aggregation") {
        return Scheme::combined;
    }
    throw std::invalid_argument("unknown scheme '" + std::string(name) +
                                "' (expected none, prediction-only, aggregation-only or combined)");
}

std::set<int> MeasurementTrace::nodes() const
{
    std::set<int> out;
    for (const auto& r : readings) {
        out.insert(r.node);
    }
    return out;
}

} // namespace dps
