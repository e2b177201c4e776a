#pragma once

// JSON file formats.
//
//   measure:   {"n": 1, "atoms": [{"z": [[re, im], ...], "w": 0.5}, ...]}
//   sphere:    {"atoms": [{"x": [x, y, z], "w": 0.5}, ...]}
//   matrix:    [[[re, im], ...], ...]   (rows; a bare number means im = 0)
//
// Coefficients need not be normalized on input. Malformed documents raise
// Error(Parse); well-formed but invalid measures raise Error(InvalidMeasure).

#include <string>

#include <json.hpp>

#include "mbal/sphere.hpp"

namespace mbal {

using Json = nlohmann::json;

AtomicMeasure measure_from_json(const Json& doc);
Json measure_to_json(const AtomicMeasure& nu);

SphereMeasure sphere_from_json(const Json& doc);
Json sphere_to_json(const SphereMeasure& sm);

CMatrix matrix_from_json(const Json& doc);
Json matrix_to_json(const CMatrix& m);

Json real_vector_to_json(const RVector& v);

/// Reads and parses a JSON file; Error(Parse) on I/O or syntax errors.
Json load_json_file(const std::string& path);

}  // namespace mbal
