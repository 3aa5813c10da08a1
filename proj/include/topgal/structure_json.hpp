#pragma once

#include "json.hpp"
#include "topgal/structures.hpp"

namespace topgal {

using Json = nlohmann::json;  // std::map objects: keys always sorted

Json signature_to_json(const Signature& sig);
Signature signature_from_json(const Json& j);

/// Canonical serialization: keys and tuples sorted lexicographically.
Json structure_to_json(const FiniteStructure& s);
/// Accepts the canonical form, plus two shorthands for single-sorted
/// structures: "carrier" as a name list or as an element count, and integer
/// relation arities.
FiniteStructure structure_from_json(const Json& j);

Json embedding_to_json(const Embedding& e);

Json permutation_to_json(const FiniteStructure& s, const std::vector<int>& perm);

}  // namespace topgal
