#pragma once

#include "json.hpp"

#include "fb/core/tsk.hpp"

namespace fb {

// Insertion order is kept so that serialized models are byte-stable.
using Json = nlohmann::ordered_json;

// {"kind": "gaussian"|"sigmoid_up"|"sigmoid_down", "params": [...]}
Json mf_to_json(const MembershipFunction& mf);
MembershipFunction mf_from_json(const Json& j);

// {"kind": "constant"|"affine", "params": [c] | [slopes..., intercept]}
Json consequent_to_json(const Consequent& c);
Consequent consequent_from_json(const Json& j, std::size_t input_dim);

Json to_json(const TskModel& model);
TskModel tsk_from_json(const Json& j);

// Schema helpers shared by every model reader: they raise DataError naming
// the missing or mistyped field.
const Json& require_field(const Json& j, const char* name);
double require_number(const Json& j, const char* name);
std::size_t require_index(const Json& j, const char* name);
std::vector<double> number_array(const Json& j, const char* what);

}  // namespace fb
