#pragma once

#include <json.hpp>
#include <string>

#include "bgcoh/admissible.hpp"
#include "bgcoh/dense_oracle.hpp"
#include "bgcoh/model_geometry.hpp"
#include "bgcoh/radial_spectral.hpp"
#include "bgcoh/weight_combinatorics.hpp"

namespace bgcoh {

using Json = nlohmann::ordered_json;

/// Deterministic text: two-space indent, floats as %.17g, non-finite as null.
std::string dump_json(const Json& value);
std::string format_double(double x);

/// Machine-size integers become numbers, larger ones decimal strings.
Json bigint_json(const BigInt& value);

Json to_json(const WeightedAction& action);
Json to_json(const LevelSetProfile& profile);
Json to_json(const AdmissibleFunction& s, bool with_trace = false);
AdmissibleFunction admissible_from_json(const Json& j);
Json to_json(const AdmissibilityReport& report);
Json to_json(const BettiTable& table);
Json to_json(const IndexCharacter& ch, const WeightedAction& action);
Json to_json(const SpectrumResult& result);
Json to_json(const InvarianceReport& report);
Json to_json(const KodairaScan& scan);
Json to_json(const OracleResult& result);

/// CSV bodies: header row, ',' separator, LF endings. The caller prepends the manifest line.
std::string betti_csv(const BettiTable& table);
std::string index_csv(const IndexCharacter& ch);
std::string ratio_csv(const AdmissibilityReport& report);
std::string spectrum_csv(const std::vector<SpectrumResult>& results);
std::string invariance_csv(const InvarianceReport& report);
std::string kodaira_csv(const KodairaScan& scan);

}  // namespace bgcoh
