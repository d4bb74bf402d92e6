#pragma once

#include <cstddef>
#include <initializer_list>
#include <string_view>

#include <json.hpp>

#include "seqrate/achievability.hpp"
#include "seqrate/cumulative_function.hpp"
#include "seqrate/envelope.hpp"
#include "seqrate/oracle.hpp"
#include "seqrate/rate_distortion.hpp"
#include "seqrate/schedule.hpp"

namespace seqrate {

using Json = nlohmann::ordered_json;

/// Numbers are written as JSON numbers (shortest round-trip form); +inf as
/// the string "inf". Reading also accepts decimal strings.
Json number_to_json(double v);
double number_from_json(const Json& j, std::string_view what);

/// Throws InvalidInput naming the first key of `j` not in `allowed`.
void require_known_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                        std::string_view what);

Json to_json(const CumulativeFunction& f);
CumulativeFunction cumulative_from_json(const Json& j, Role role);

Json to_json(const ValidationReport& report);

Json to_json(const ConcaveEnvelope& e);

SourceModel source_from_json(const Json& j);
Json to_json(const SourceModel& source);

/// `alphabet_size` sizes the Hamming matrix.
DistortionSpec distortion_from_json(const Json& j, std::size_t alphabet_size);
Json to_json(const DistortionSpec& spec);

Json to_json(const RdCurve& curve);
Json to_json(const Verdict& verdict);
Json to_json(const TransmissionPlan& plan);
Json to_json(const BruteForceResult& result);

}  // namespace seqrate
