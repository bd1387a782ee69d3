#pragma once
#include <json.hpp>

#include "spinframe/geometry.hpp"
#include "spinframe/immersion.hpp"
#include "spinframe/solutions.hpp"

namespace spinframe {

using Json = nlohmann::json;

// Multivector wire form: a list of {"blade": [indices...], "coeff": c}
// entries, ascending blade order; the scalar blade is [].
Json multivector_to_json(const Multivector& m);
Multivector multivector_from_json(const Json& j, const Signature& sig = Signature::ambient());

Json spin_field_to_json(const SpinFieldSpec& spec);
SpinFieldSpec spin_field_from_json(const Json& j);

Json connection_to_json(const ConnectionAtPoint& conn);
Json curvature_to_json(const CurvatureAtPoint& curv);
Json killing_to_json(const KillingData& data);

// Flat CSV rows: (alpha,mu,nu,value) for connections,
// (alpha,beta,mu,nu,value) for curvature 2-forms.
std::string connection_to_csv(const ConnectionAtPoint& conn);
std::string curvature_to_csv(const CurvatureAtPoint& curv);

Json vec4_to_json(const Vec4& x);
Vec4 vec4_from_json(const Json& j);

std::string format_double17(double v);

}  // namespace spinframe
