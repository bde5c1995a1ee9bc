#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "dale/dataset.hpp"
#include "dale/estimators.hpp"
#include "dale/model.hpp"

namespace dale {

using Json = nlohmann::ordered_json;

struct CurveProvenance {
  std::size_t N = 0;
  std::size_t D = 0;
  std::uint64_t seed = 0;
  std::string model;
  std::string feature_name;
  std::string empty_bin_policy = "interpolate";
  CounterSnapshot evaluations;
};

// Field order is fixed so that files diff cleanly. Missing values (NaN)
// are written as null.
Json curve_to_json(const EffectCurve& curve, const CurveProvenance& prov);
Json point_curve_to_json(const PointCurve& curve, const CurveProvenance& prov);
Json surface_to_json(const EffectSurface& surface, const CurveProvenance& prov,
                     const std::string& name_l, const std::string& name_m);

// Inverse of curve_to_json for the curve itself; throws schema errors on
// missing or mistyped fields.
EffectCurve curve_from_json(const Json& j);

// Writes to a temporary sibling and renames, so readers never see a partial
// file.
void write_json_file(const std::string& path, const Json& j);
Json read_json_file(const std::string& path);

// Dataset plus its Jacobian, for rebinning without the model.
struct JacobianCache {
  Dataset data;
  Matrix jacobian;
  std::string model;
};

// FNV-1a 64 over N, D, the feature names and the IEEE-754 bits of both
// matrices.
std::uint64_t jacobian_checksum(const JacobianCache& cache);
Json jacobian_cache_to_json(const JacobianCache& cache);
// Checksum mismatch -> checksum error; malformed content -> parse/schema.
JacobianCache jacobian_cache_from_json(const Json& j);
void save_jacobian_cache(const std::string& path, const JacobianCache& cache);
JacobianCache load_jacobian_cache(const std::string& path);

}  // namespace dale
