#include "alexkit/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "alexkit/error.hpp"

namespace alexkit::io {

const char* version() { return ALEXKIT_VERSION; }

json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

namespace {

double as_double(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw RefusalError("key '" + key + "' must be a number");
}

const json& require(const json& doc, const std::string& key, const std::string& where = "") {
  if (!doc.is_object() || !doc.contains(key)) throw RefusalError("missing key '" + where + key + "'");
  return doc.at(key);
}

std::vector<PointId> id_list(const json& v, const std::string& key) {
  if (!v.is_array()) throw RefusalError("key '" + key + "' must be an array of ids");
  std::vector<PointId> out;
  for (const auto& x : v) {
    if (!x.is_number_integer()) throw RefusalError("key '" + key + "' must contain integer ids");
    out.push_back(x.get<PointId>());
  }
  return out;
}

}  // namespace

json to_json(const models::ModelAnnotation& a) {
  json j;
  j["subset"] = a.subset;
  json em = json::object();
  for (const auto& [k, v] : a.exact_measure) em[k] = num(v);
  j["exact_measure"] = em;
  j["regular_ids"] = a.regular_ids;
  j["singular_ids"] = a.singular_ids;
  json notes = json::object();
  for (const auto& [k, v] : a.notes) notes[k] = num(v);
  j["notes"] = notes;
  return j;
}

json space_to_json(const Space& space, const models::ModelAnnotation* annotation) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["name"] = space.name();
  doc["kappa"] = space.kappa();
  doc["resolution"] = space.resolution() ? json(*space.resolution()) : json(nullptr);
  json points = json::array();
  for (std::size_t i = 0; i < space.size(); ++i) {
    json p;
    p["id"] = i;
    if (space.has_coords()) {
      const auto c = space.coord(static_cast<PointId>(i));
      p["coords"] = std::vector<double>(c.begin(), c.end());
    }
    points.push_back(std::move(p));
  }
  doc["points"] = std::move(points);
  json metric;
  if (space.is_euclidean()) {
    metric["type"] = "euclidean";
    metric["dim"] = space.dim();
  } else {
    metric["type"] = "matrix";
    json data = json::array();
    const std::size_t n = space.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) data.push_back(space.dist(static_cast<PointId>(i), static_cast<PointId>(j)));
    metric["data"] = std::move(data);
  }
  doc["metric"] = std::move(metric);
  json subsets = json::array();
  for (const auto& s : space.subsets()) {
    json js;
    js["name"] = s.name;
    js["indices"] = s.indices;
    js["extremal"] = s.extremal;
    subsets.push_back(std::move(js));
  }
  doc["subsets"] = std::move(subsets);
  if (annotation != nullptr) doc["annotations"] = to_json(*annotation);
  return doc;
}

models::Model space_from_json(const json& doc) {
  if (!doc.is_object()) throw RefusalError("space document must be a JSON object");
  const auto& sv = require(doc, "schema_version");
  if (!sv.is_number_integer() || sv.get<int>() != kSchemaVersion)
    throw RefusalError("unsupported schema_version (expected 1)");
  const std::string name = require(doc, "name").get<std::string>();
  const double kappa = as_double(require(doc, "kappa"), "kappa");
  std::optional<double> resolution;
  if (doc.contains("resolution") && !doc["resolution"].is_null()) resolution = as_double(doc["resolution"], "resolution");

  const auto& points = require(doc, "points");
  if (!points.is_array()) throw RefusalError("key 'points' must be an array");
  const std::size_t n = points.size();
  int dim = 0;
  std::vector<double> coords;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = points[i];
    const auto id = require(p, "id", "points[].").get<std::int64_t>();
    if (id != static_cast<std::int64_t>(i)) throw RefusalError("point ids must be 0..N-1 in order");
    if (p.contains("coords")) {
      const auto c = p["coords"].get<std::vector<double>>();
      if (i == 0) dim = static_cast<int>(c.size());
      if (static_cast<int>(c.size()) != dim || dim == 0) throw RefusalError("inconsistent coordinate dimension");
      coords.insert(coords.end(), c.begin(), c.end());
    } else if (dim != 0) {
      throw RefusalError("coords missing on some points");
    }
  }

  const auto& metric = require(doc, "metric");
  const std::string type = require(metric, "type", "metric.").get<std::string>();
  models::Model m;
  if (type == "euclidean") {
    if (dim == 0) throw RefusalError("euclidean metric needs point coords");
    m.space = std::make_shared<Space>(Space::euclidean(name, dim, std::move(coords), kappa, resolution));
  } else if (type == "matrix") {
    const auto& data = require(metric, "data", "metric.");
    if (!data.is_array()) throw RefusalError("key 'metric.data' must be an array");
    std::vector<double> mat(n * n, 0.0);
    if (!data.empty() && data[0].is_array()) {
      if (data.size() != n) throw RefusalError("metric.data must have one row per point");
      for (std::size_t i = 0; i < n; ++i) {
        if (!data[i].is_array() || data[i].size() != n) throw RefusalError("metric.data rows must have N entries");
        for (std::size_t j = 0; j < n; ++j) mat[i * n + j] = as_double(data[i][j], "metric.data");
      }
    } else {
      if (data.size() != n * (n + 1) / 2) throw RefusalError("metric.data must hold the lower triangle (N(N+1)/2 values)");
      std::size_t k = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
          const double v = as_double(data[k++], "metric.data");
          mat[i * n + j] = v;
          mat[j * n + i] = v;
        }
    }
    m.space = std::make_shared<Space>(Space::from_matrix(name, kappa, n, std::move(mat), resolution));
    if (dim > 0) m.space->set_coords(dim, std::move(coords));
  } else {
    throw RefusalError("metric.type must be 'matrix' or 'euclidean'");
  }

  if (doc.contains("subsets")) {
    for (const auto& s : doc["subsets"]) {
      NamedSubset ns;
      ns.name = require(s, "name", "subsets[].").get<std::string>();
      ns.indices = id_list(require(s, "indices", "subsets[]."), "subsets[].indices");
      ns.extremal = s.value("extremal", false);
      m.space->add_subset(std::move(ns));
    }
  }
  if (doc.contains("annotations")) {
    const auto& a = doc["annotations"];
    m.annotation.subset = a.value("subset", "");
    if (a.contains("exact_measure"))
      for (const auto& [k, v] : a["exact_measure"].items()) m.annotation.exact_measure[k] = as_double(v, k);
    if (a.contains("regular_ids")) m.annotation.regular_ids = id_list(a["regular_ids"], "regular_ids");
    if (a.contains("singular_ids")) m.annotation.singular_ids = id_list(a["singular_ids"], "singular_ids");
    if (a.contains("notes"))
      for (const auto& [k, v] : a["notes"].items()) m.annotation.notes[k] = as_double(v, k);
  }
  return m;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RefusalError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw RefusalError("malformed JSON in '" + path.string() + "': " + e.what());
  }
}

models::Model read_space(const std::filesystem::path& path) { return space_from_json(read_json(path)); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

void write_json(const std::filesystem::path& path, const json& doc) { write_text(path, doc.dump(1) + "\n"); }

void write_space(const std::filesystem::path& path, const Space& space, const models::ModelAnnotation* annotation) {
  write_json(path, space_to_json(space, annotation));
}

json report(const std::string& op, const json& config, json outputs) {
  json r;
  r["schema_version"] = kSchemaVersion;
  r["op"] = op;
  r["version"] = version();
  r["config"] = config;
  r["outputs"] = std::move(outputs);
  return r;
}

json to_json(const ValidationReport& r) {
  json j;
  j["passed"] = r.ok();
  j["exhaustive_triangles"] = r.exhaustive_triangles;
  json checks = json::array();
  for (const auto& c : r.checks) {
    json jc;
    jc["name"] = c.name;
    jc["passed"] = c.passed;
    jc["worst"] = num(c.worst);
    jc["witness"] = c.witness;
    jc["checked"] = c.checked;
    checks.push_back(std::move(jc));
  }
  j["checks"] = std::move(checks);
  return j;
}

json to_json(const PackingResult& r) {
  json j;
  j["count"] = r.count;
  j["exact"] = r.exact;
  j["lower_bound"] = !r.exact;
  j["centers"] = r.centers;
  return j;
}

json to_json(const MeasureEstimate& e) {
  json j;
  j["value"] = num(e.value);
  j["m"] = e.m;
  j["eps"] = e.eps;
  j["metric"] = to_string(e.metric);
  j["beta"] = e.beta;
  j["calibration_c_m"] = num(e.c_m);
  j["calibration_pitch"] = num(e.pitch);
  return j;
}

json to_json(const DimensionEstimate& d) {
  json j;
  j["slope"] = num(d.slope);
  j["residual"] = num(d.residual);
  j["eps"] = d.eps;
  j["beta"] = d.beta;
  return j;
}

json to_json(const ExtremalityReport& r) {
  json j;
  j["passed"] = r.passed;
  j["angle_tol"] = num(r.angle_tol);
  j["witness_radius"] = num(r.witness_radius);
  j["worst_excess"] = num(r.worst_excess);
  j["worst_triple"] = {r.worst_q, r.worst_p, r.worst_w};
  j["exterior_points"] = r.exterior_points;
  j["local_minima"] = r.local_minima;
  j["witnesses_checked"] = r.witnesses_checked;
  return j;
}

}  // namespace alexkit::io
