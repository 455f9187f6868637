#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "cstar/extremity.hpp"
#include "cstar/hardy.hpp"

namespace cstar {

using Json = nlohmann::json;

inline constexpr const char* kSchemaTag = "cstar/1";

/// Deterministic serialization: object keys sorted, floating-point values
/// rendered with 17 significant digits, no locale dependence.
std::string canonical_dump(const Json& value);

Json matrix_to_json(const CMatrix& a);
CMatrix matrix_from_json(const Json& value);

Json ucp_to_json(const UcpMap& map);
UcpMap ucp_from_json(const Json& value, const NumericContext& ctx,
                     bool require_unital = true);

Json algebra_element_to_json(const AlgebraElement& a);
AlgebraElement algebra_element_from_json(const Json& value);

Json nest_to_json(const Nest& nest);
Nest nest_from_json(const Json& value, const NumericContext& ctx);

Json symbol_to_json(const TrigSymbol& sym);
TrigSymbol symbol_from_json(const Json& value, const NumericContext& ctx);

Json triple_to_json(const StinespringTriple& triple);

Json certificate_to_json(const FZCertificate& cert);
FZCertificate certificate_from_json(const Json& value);

Json decision_to_json(const DecisionReport& report);

Json load_json_file(const std::string& path);

}  // namespace cstar
