#pragma once

#include <string_view>

namespace dps {

/// Combinations of the two traffic-reduction techniques.
enum class Scheme {
    none,            ///< every reading forwarded individually
    prediction_only, ///< only mispredicted readings are sent, forwarded individually
    aggregation_only,///< one merged packet per node and slot
    combined,        ///< one merged packet iff some reading of the subtree was mispredicted
};

inline constexpr Scheme kAllSchemes[] = {Scheme::none, Scheme::prediction_only,
                                         Scheme::aggregation_only, Scheme::combined};

std::string_view to_string(Scheme scheme) noexcept;
Scheme parse_scheme(std::string_view name);

/// Schemes that run prediction models and therefore pay for dissemination.
constexpr bool uses_prediction(Scheme s) noexcept
{
    return s == Scheme::prediction_only || s == Scheme::combined;
}

constexpr bool uses_aggregation(Scheme s) noexcept
{
    return s == Scheme::aggregation_only || s == Scheme::combined;
}

} // namespace dps
