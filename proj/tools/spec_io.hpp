#pragma once

#include <json.hpp>
#include <string>

#include "unitary/genus.hpp"

namespace uforms {

using nlohmann::json;

// Ring names: Q, F<q>, Z/<p^N>, Z(<p>,<p>,...), M<n>(<base>) with optional
// suffix -sp for the symplectic involution, X(<base>) for the exchange ring.
unitary::BaseRing base_by_name(const std::string& name);
unitary::UnitaryRingPtr ring_by_name(const std::string& name);

// A ring given by name, by a named constructor or by structure constants.
unitary::UnitaryRingPtr parse_ring(const json& j);

unitary::RingElem parse_scalar(const unitary::BaseRing& R, const json& j);
// A number or string is a scalar multiple of 1; an array lists coordinates.
unitary::AlgElem parse_element(const unitary::Algebra& A, const json& j);
// {"diagonal": [...]} or {"gram": [[...], ...]}.
unitary::QuadClass parse_form(const json& j, const unitary::UnitaryRingPtr& U);
// Comma separated scalars, e.g. "1,2".
unitary::QuadClass diagonal_from_list(const std::string& list, const unitary::UnitaryRingPtr& U, std::size_t rank);

unitary::OrderSpec parse_order(const json& j);

json element_json(const unitary::Algebra& A, const unitary::AlgElem& a);
json amat_json(const unitary::Algebra& A, const unitary::AMat& x);
json genus_json(const unitary::GenusReport& r);

}  // namespace uforms
