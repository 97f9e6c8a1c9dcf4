#pragma once

#include "conewishart/riesz_gindikin.hpp"
#include "conewishart/sampling.hpp"

#include <json.hpp>

#include <string>

namespace conewishart {

using Json = nlohmann::json;

// Preset name, path to a JSON cone spec, or an inline JSON object.
ConePtr load_cone(const std::string& spec);
// {"partition":[...],"blocks":[{"l","k","basis":[row-major matrices]}]},
// 1-based l and k.
ConePtr cone_from_json(const Json& j, const std::string& name = "custom");
VSystem vsystem_from_json(const Json& j);
// Same lookup as load_cone, without validating the axioms.
std::pair<VSystem, std::string> load_vsystem(const std::string& spec);
Json cone_to_json(const ConeRealization& cone);

// {"m","codomain","phi":[...],"meta"}; the codomain is a preset name or a
// cone spec object.
Json map_to_json(const QuadraticMap& q);
QuadraticMap map_from_json(const Json& j);

// "identity" gives θ = -I_N; "raw:<coords>" gives θ directly; otherwise
// the values are the triangular coordinates (t_11..t_rr, then the
// off-diagonal coefficients) of T with θ = -ρ*(T) I_N.
Vector parse_theta(const ConePtr& cone, const std::string& spec);

Json gindikin_report(const ConeRealization& cone, const Vector& sigma);

Json vector_json(const Vector& v);

// CSV header is the structured coordinate names.
void write_csv(const SampleBatch& batch, const std::vector<std::string>& columns,
               const std::string& path);
void write_json(const Json& j, const std::string& path);

}  // namespace conewishart
