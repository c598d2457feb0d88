#pragma once

#include <string>

#include <json.hpp>

#include "lmx/generators.hpp"
#include "lmx/lorentz.hpp"
#include "lmx/space.hpp"

namespace lmx {

using Json = nlohmann::ordered_json;

/// Space files. Cellular:
///   {"kind":"cellular", "generator":..., "cells":[{"id","count","log2_weight","tags","split"}],
///    "profiles":[{"cell","balls":[{"radius","members":{id: count}}]}], "splits":[...]}
/// Dense: {"kind":"dense", "points":[{"id","log2_weight","tags"}], "matrix":[[...]]}.
/// Counts are decimal strings, weights log2 floats. Each weight also carries an
/// exact "weight" pair [mantissa, exponent] that readers prefer when present.
Json space_to_json(const FiniteSpace& space);
FiniteSpace space_from_json(const Json& j);

/// Function files: {"values": {id: log2 value or "-inf"}}.
Json function_to_json(const FiniteSpace& space, const CellFunction& f);
CellFunction function_from_json(const FiniteSpace& space, const Json& j);

Json plan_to_json(const SequencePlan& plan);
SequencePlan plan_from_json(const Json& j);

/// Exponent as a JSON number, or "inf".
Json exponent_to_json(double x);
double exponent_from_json(const Json& j);

Json ext_to_json(const ExtReal& x);    // log2 float or "-inf"
ExtReal ext_from_json(const Json& j);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace lmx
