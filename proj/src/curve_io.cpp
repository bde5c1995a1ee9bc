#include "dale/curve_io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "dale/errors.hpp"

namespace dale {
namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json doubles(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number_or_null(x));
  return a;
}

Json flags_json(const std::vector<BinFlag>& flags) {
  Json a = Json::array();
  for (auto f : flags) a.push_back(to_string(f));
  return a;
}

Json grid_json(const BinGrid& g) {
  Json j;
  j["min"] = g.axis_min;
  j["max"] = g.axis_max;
  j["K"] = g.K;
  j["width"] = g.width;
  j["edges"] = g.edges;
  return j;
}

Json provenance_json(const CurveProvenance& p, std::size_t K) {
  Json j;
  j["K"] = K;
  j["N"] = p.N;
  j["D"] = p.D;
  j["seed"] = p.seed;
  j["model"] = p.model;
  j["empty_bin_policy"] = p.empty_bin_policy;
  j["evaluations"] = {{"value", p.evaluations.n_value},
                      {"gradient", p.evaluations.n_gradient},
                      {"second", p.evaluations.n_second}};
  return j;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorKind::schema, std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

std::vector<double> read_doubles(const Json& a, const char* key) {
  if (!a.is_array()) throw Error(ErrorKind::schema, std::string("field '") + key + "' is not an array");
  std::vector<double> out;
  out.reserve(a.size());
  for (const auto& v : a) {
    if (v.is_null()) {
      out.push_back(std::numeric_limits<double>::quiet_NaN());
    } else if (v.is_number()) {
      out.push_back(v.get<double>());
    } else {
      throw Error(ErrorKind::schema, std::string("field '") + key + "' holds a non-number");
    }
  }
  return out;
}

BinFlag parse_flag(const std::string& s) {
  if (s == "ok") return BinFlag::ok;
  if (s == "empty") return BinFlag::empty;
  if (s == "singleton") return BinFlag::singleton;
  if (s == "filled") return BinFlag::filled;
  throw Error(ErrorKind::schema, "unknown bin flag '" + s + "'");
}

template <typename T>
T get_as(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::schema, std::string("field '") + key + "' has the wrong type");
  }
}

struct Fnv1a {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  void byte(unsigned char b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) byte(static_cast<unsigned char>(v >> (8 * i)));
  }
  void str(const std::string& s) {
    u64(s.size());
    for (unsigned char c : s) byte(c);
  }
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

Json curve_to_json(const EffectCurve& c, const CurveProvenance& p) {
  Json j;
  j["format"] = "dale-effect-curve/1";
  j["method"] = c.method;
  j["feature"] = {{"index", c.feature}, {"name", p.feature_name}};
  j["provenance"] = provenance_json(p, c.K());
  j["grid"] = grid_json(c.grid);
  j["bin_counts"] = c.counts;
  j["bin_means"] = doubles(c.bin_means);
  j["bin_effects"] = doubles(c.bin_effects);
  j["bin_variance"] = doubles(c.bin_variance);
  j["bin_flags"] = flags_json(c.flags);
  j["accumulated"] = doubles(c.accumulated);
  j["centering_constant"] = c.centering_c;
  j["centered"] = doubles(c.centered);
  j["stderr"] = doubles(c.std_error);
  return j;
}

Json point_curve_to_json(const PointCurve& c, const CurveProvenance& p) {
  Json j;
  j["format"] = "dale-point-curve/1";
  j["method"] = c.method;
  j["feature"] = {{"index", c.feature}, {"name", p.feature_name}};
  j["provenance"] = provenance_json(p, c.method == "mplot" ? c.xs.size() : c.xs.size() - 1);
  j["x"] = c.xs;
  j["values"] = doubles(c.values);
  if (!c.counts.empty()) j["counts"] = c.counts;
  if (!c.flags.empty()) j["flags"] = flags_json(c.flags);
  return j;
}

Json surface_to_json(const EffectSurface& s, const CurveProvenance& p, const std::string& name_l,
                     const std::string& name_m) {
  Json j;
  j["format"] = "dale-effect-surface/1";
  j["method"] = s.method;
  j["features"] = {{{"index", s.feature_l}, {"name", name_l}}, {{"index", s.feature_m}, {"name", name_m}}};
  j["provenance"] = provenance_json(p, s.grid_l.K);
  j["grid_l"] = grid_json(s.grid_l);
  j["grid_m"] = grid_json(s.grid_m);
  j["cell_counts"] = s.counts;
  j["cell_means"] = doubles(s.cell_means);
  j["cell_effects"] = doubles(s.cell_effects);
  j["cell_flags"] = flags_json(s.flags);
  Json acc = Json::array();
  for (std::size_t r = 0; r < s.accumulated.rows(); ++r) {
    const auto row = s.accumulated.row(r);
    acc.push_back(doubles(std::vector<double>(row.begin(), row.end())));
  }
  j["accumulated"] = std::move(acc);
  j["centering_constant"] = s.centering_c;
  return j;
}

EffectCurve curve_from_json(const Json& j) {
  if (get_as<std::string>(j, "format") != "dale-effect-curve/1") {
    throw Error(ErrorKind::schema, "not an effect-curve file");
  }
  EffectCurve c;
  c.method = get_as<std::string>(j, "method");
  c.feature = get_as<std::size_t>(field(j, "feature"), "index");
  const Json& g = field(j, "grid");
  c.grid.axis_min = get_as<double>(g, "min");
  c.grid.axis_max = get_as<double>(g, "max");
  c.grid.K = get_as<std::size_t>(g, "K");
  c.grid.width = get_as<double>(g, "width");
  c.grid.edges = read_doubles(field(g, "edges"), "edges");
  c.counts = get_as<std::vector<std::size_t>>(j, "bin_counts");
  c.bin_means = read_doubles(field(j, "bin_means"), "bin_means");
  c.bin_effects = read_doubles(field(j, "bin_effects"), "bin_effects");
  c.bin_variance = read_doubles(field(j, "bin_variance"), "bin_variance");
  for (const auto& f : get_as<std::vector<std::string>>(j, "bin_flags")) c.flags.push_back(parse_flag(f));
  c.accumulated = read_doubles(field(j, "accumulated"), "accumulated");
  c.centering_c = get_as<double>(j, "centering_constant");
  c.centered = read_doubles(field(j, "centered"), "centered");
  c.std_error = read_doubles(field(j, "stderr"), "stderr");
  const std::size_t K = c.grid.K;
  if (c.grid.edges.size() != K + 1 || c.counts.size() != K || c.bin_means.size() != K ||
      c.accumulated.size() != K + 1 || c.centered.size() != K + 1 || c.std_error.size() != K + 1) {
    throw Error(ErrorKind::schema, "effect-curve arrays do not match K");
  }
  return c;
}

void write_json_file(const std::string& path, const Json& j) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error(ErrorKind::io, "cannot write '" + path + "'");
    out << j.dump(2) << "\n";
    if (!out) throw Error(ErrorKind::io, "failed writing '" + path + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::io, "cannot move '" + tmp + "' into place: " + ec.message());
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::parse, path + ": " + e.what());
  }
}

std::uint64_t jacobian_checksum(const JacobianCache& c) {
  Fnv1a h;
  h.u64(c.data.size());
  h.u64(c.data.dim());
  for (const auto& n : c.data.names()) h.str(n);
  for (double v : c.data.values().data()) h.u64(std::bit_cast<std::uint64_t>(v));
  for (double v : c.jacobian.data()) h.u64(std::bit_cast<std::uint64_t>(v));
  return h.h;
}

Json jacobian_cache_to_json(const JacobianCache& c) {
  if (c.jacobian.rows() != c.data.size() || c.jacobian.cols() != c.data.dim()) {
    throw Error(ErrorKind::shape, "Jacobian shape does not match the dataset");
  }
  Json j;
  j["format"] = "dale-jacobian-cache/1";
  j["model"] = c.model;
  j["N"] = c.data.size();
  j["D"] = c.data.dim();
  j["names"] = c.data.names();
  const auto d = c.data.values().data();
  j["data"] = std::vector<double>(d.begin(), d.end());
  const auto g = c.jacobian.data();
  j["jacobian"] = std::vector<double>(g.begin(), g.end());
  j["checksum"] = hex64(jacobian_checksum(c));
  return j;
}

JacobianCache jacobian_cache_from_json(const Json& j) {
  if (get_as<std::string>(j, "format") != "dale-jacobian-cache/1") {
    throw Error(ErrorKind::schema, "not a Jacobian cache file");
  }
  const auto N = get_as<std::size_t>(j, "N");
  const auto D = get_as<std::size_t>(j, "D");
  const auto names = get_as<std::vector<std::string>>(j, "names");
  const auto data = read_doubles(field(j, "data"), "data");
  const auto jac = read_doubles(field(j, "jacobian"), "jacobian");
  if (names.size() != D || data.size() != N * D || jac.size() != N * D) {
    throw Error(ErrorKind::checksum, "Jacobian cache sizes are inconsistent");
  }
  Matrix X(N, D), J(N, D);
  std::copy(data.begin(), data.end(), X.data().begin());
  std::copy(jac.begin(), jac.end(), J.data().begin());
  JacobianCache c{Dataset(std::move(X), names), std::move(J), get_as<std::string>(j, "model")};
  if (hex64(jacobian_checksum(c)) != get_as<std::string>(j, "checksum")) {
    throw Error(ErrorKind::checksum, "Jacobian cache checksum mismatch");
  }
  return c;
}

void save_jacobian_cache(const std::string& path, const JacobianCache& cache) {
  write_json_file(path, jacobian_cache_to_json(cache));
}

JacobianCache load_jacobian_cache(const std::string& path) {
  return jacobian_cache_from_json(read_json_file(path));
}

}  // namespace dale
