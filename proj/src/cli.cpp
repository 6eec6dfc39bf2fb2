#include "alexkit/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "alexkit/charts.hpp"
#include "alexkit/error.hpp"
#include "alexkit/extremality.hpp"
#include "alexkit/flow.hpp"
#include "alexkit/glue.hpp"
#include "alexkit/io.hpp"
#include "alexkit/measure.hpp"
#include "alexkit/models.hpp"
#include "alexkit/parallel.hpp"
#include "alexkit/strainers.hpp"

namespace alexkit::cli {
namespace {

using io::num;

constexpr std::pair<Command, const char*> kCommands[] = {
    {Command::gen, "gen"},   {Command::validate, "validate"}, {Command::strain, "strain"}, {Command::chart, "chart"},
    {Command::qcheck, "qcheck"}, {Command::flow, "flow"},     {Command::dim, "dim"},       {Command::vol, "vol"},
    {Command::glue, "glue"}, {Command::converge, "converge"},
};

// Typed access to the params object. Every read records the resolved value;
// finish() refuses keys nobody read.
class Params {
 public:
  explicit Params(const json& raw) : raw_(raw.is_null() ? json::object() : raw) {
    if (!raw_.is_object()) throw RefusalError("key 'params' must be an object");
  }

  bool has(const std::string& key) const { return raw_.contains(key); }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    const json* v = fetch(key);
    double x = 0.0;
    if (v == nullptr) {
      if (!fallback) throw RefusalError("missing key '" + key + "'");
      x = *fallback;
    } else {
      if (!v->is_number()) throw RefusalError("key '" + key + "' must be a number");
      x = v->get<double>();
    }
    const bool zero_ok = key == "rotation";
    if (!std::isfinite(x) || x < 0.0 || (x == 0.0 && !zero_ok))
      throw RefusalError("key '" + key + "' must be positive");
    if (key == "delta" && x > 0.3) throw RefusalError("key 'delta' must be at most 0.3");
    if (key == "ell" && x > 1.0) throw RefusalError("key 'ell' must be at most 1");
    resolved_[key] = x;
    return x;
  }

  std::optional<double> maybe_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback = std::nullopt,
                       std::int64_t min = 1) {
    const json* v = fetch(key);
    std::int64_t x = 0;
    if (v == nullptr) {
      if (!fallback) throw RefusalError("missing key '" + key + "'");
      x = *fallback;
    } else {
      if (!v->is_number_integer()) throw RefusalError("key '" + key + "' must be an integer");
      x = v->get<std::int64_t>();
    }
    if (x < min) throw RefusalError("key '" + key + "' must be at least " + std::to_string(min));
    resolved_[key] = x;
    return x;
  }

  PointId id(const std::string& key) { return static_cast<PointId>(integer(key, std::nullopt, 0)); }

  std::vector<PointId> ids(const std::string& key) {
    const json* v = fetch(key);
    if (v == nullptr) throw RefusalError("missing key '" + key + "'");
    std::vector<PointId> out;
    if (v->is_number_integer()) {
      out.push_back(v->get<PointId>());
    } else if (v->is_array()) {
      for (const auto& x : *v) {
        if (!x.is_number_integer()) throw RefusalError("key '" + key + "' must contain integer ids");
        out.push_back(x.get<PointId>());
      }
    } else {
      throw RefusalError("key '" + key + "' must be an id or a list of ids");
    }
    for (const PointId p : out)
      if (p < 0) throw RefusalError("key '" + key + "' contains a negative id");
    resolved_[key] = out;
    return out;
  }

  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    const json* v = fetch(key);
    std::string s;
    if (v == nullptr) {
      if (!fallback) throw RefusalError("missing key '" + key + "'");
      s = *fallback;
    } else {
      if (!v->is_string()) throw RefusalError("key '" + key + "' must be a string");
      s = v->get<std::string>();
    }
    resolved_[key] = s;
    return s;
  }

  bool flag(const std::string& key, bool fallback = false) {
    const json* v = fetch(key);
    bool b = fallback;
    if (v != nullptr) {
      if (!v->is_boolean()) throw RefusalError("key '" + key + "' must be true or false");
      b = v->get<bool>();
    }
    resolved_[key] = b;
    return b;
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    const json* v = fetch(key);
    std::vector<double> out = std::move(fallback);
    if (v != nullptr) {
      if (!v->is_array()) throw RefusalError("key '" + key + "' must be a list of numbers");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number() || !(x.get<double>() > 0.0)) throw RefusalError("key '" + key + "' must hold positive numbers");
        out.push_back(x.get<double>());
      }
    }
    resolved_[key] = out;
    return out;
  }

  void finish() const {
    for (const auto& [k, v] : raw_.items())
      if (!used_.count(k)) throw RefusalError("unknown key '" + k + "' for this command");
  }

  const json& resolved() const { return resolved_; }

 private:
  const json* fetch(const std::string& key) {
    used_.insert(key);
    return raw_.contains(key) ? &raw_.at(key) : nullptr;
  }

  json raw_;
  json resolved_ = json::object();
  std::set<std::string> used_;
};

json resolved_config(const RunConfig& cfg, const Params& p) {
  json c;
  c["command"] = to_string(cfg.command);
  if (!cfg.space_path.empty()) c["space"] = cfg.space_path;
  c["params"] = p.resolved();
  return c;
}

json strainer_json(const Strainer& s) {
  json j;
  j["base"] = s.base;
  json pairs = json::array();
  for (const auto& [a, b] : s.pairs) pairs.push_back({a, b});
  j["pairs"] = std::move(pairs);
  j["delta_achieved"] = num(s.delta_achieved);
  j["length"] = num(s.length);
  return j;
}

json ratio_json(const RatioStats& r) {
  json j;
  j["defined"] = r.defined;
  j["lip"] = num(r.lip);
  j["colip"] = num(r.colip);
  j["max_ratio"] = num(r.max_ratio);
  j["min_ratio"] = num(r.min_ratio);
  j["median"] = num(r.median);
  j["distortion"] = num(r.distortion);
  j["pairs"] = r.pairs;
  j["skipped"] = r.skipped;
  return j;
}

std::string fmt(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

models::Model load_space(const RunConfig& cfg) {
  if (cfg.space_path.empty()) throw RefusalError("missing key 'space'");
  if (!std::filesystem::exists(cfg.space_path)) throw RefusalError("space file '" + cfg.space_path + "' not found");
  return io::read_space(cfg.space_path);
}

// Loads and validates; commands other than `validate` refuse invalid spaces.
models::Model load_valid_space(const RunConfig& cfg) {
  models::Model m = load_space(cfg);
  const ValidationReport rep = validate(*m.space, 1, 10000);
  for (const auto& c : rep.checks)
    if (!c.passed) throw RefusalError("space fails validation: " + c.name);
  return m;
}

Subset subset_of(const models::Model& m, Params& p) {
  const std::string name = p.text("subset");
  const auto link = p.maybe_number("link_radius");
  return Subset::named(m.space, name, link);
}

double resolution(const models::Model& m) { return m.space->resolution_or(0.0); }

// --- gen -------------------------------------------------------------------

models::Model generate(Params& p) {
  const std::string model = p.text("model");
  if (model == "polygon" || model == "square") {
    models::PolygonOptions opt;
    const double h = p.number("h");
    if (const auto b = p.maybe_number("band")) opt.band = b;
    if (const auto ih = p.maybe_number("interior_h")) opt.interior_h = ih;
    opt.interior = !p.flag("boundary_only");
    if (model == "square") return models::square(p.number("side", 1.0), h, opt);
    const auto n = p.integer("n", std::nullopt, 3);
    return models::regular_polygon(static_cast<int>(n), p.number("radius", 1.0), h, p.number("rotation", 0.0), opt);
  }
  if (model == "segment") return models::segment(p.number("length", 1.0), p.number("h"));
  if (model == "circle") return models::circle(p.number("length", 2.0 * std::numbers::pi), p.number("h"));
  if (model == "two-points") return models::two_points(p.number("d"));
  if (model == "cone") {
    const double theta = p.number("theta");
    if (theta > 2.0 * std::numbers::pi) throw RefusalError("key 'theta' must be at most 2 pi");
    return models::cone(theta, p.number("radius", 1.0), p.number("h"));
  }
  if (model == "pillow") return models::pillow(p.number("side", 1.0), p.number("h"));
  if (model == "suspension") {
    const std::string base = p.text("base", std::string("circle"));
    const double h = p.number("h");
    if (base == "circle") return models::spherical_suspension(*models::circle(p.number("base_length", 2.0 * std::numbers::pi), h).space, h);
    if (base == "two-points") return models::spherical_suspension(*models::two_points(p.number("base_d", std::numbers::pi)).space, h);
    throw RefusalError("key 'base' must be circle or two-points");
  }
  throw RefusalError("key 'model' must be one of polygon, square, segment, circle, two-points, cone, pillow, suspension");
}

RunResult run_gen(const RunConfig& cfg, Params& p) {
  const models::Model m = generate(p);
  p.finish();
  RunResult r;
  r.report = io::space_to_json(*m.space, &m.annotation);
  json prov;
  prov["version"] = io::version();
  prov["config"] = resolved_config(cfg, p);
  r.report["provenance"] = std::move(prov);
  return r;
}

// --- validate --------------------------------------------------------------

RunResult run_validate(const RunConfig& cfg, Params& p) {
  const models::Model m = load_space(cfg);
  const auto seed = p.integer("seed", 1, 0);
  const auto triples = p.integer("triples", 100000, 0);
  std::optional<Subset> e;
  double wr = 0.0;
  if (p.has("subset")) {
    e = subset_of(m, p);
    wr = p.number("witness_radius");
  }
  p.finish();
  const ValidationReport rep = validate(*m.space, static_cast<std::uint64_t>(seed), triples);
  json out;
  out["points"] = m.space->size();
  out["validation"] = io::to_json(rep);
  bool ok = rep.ok();
  if (e) {
    ExtremalityOptions opt;
    opt.witness_radius = wr;
    const ExtremalityReport x = extremality_check(*e, opt);
    out["extremality"] = io::to_json(x);
    ok = ok && x.passed;
  }
  RunResult r;
  r.report = io::report("validate", resolved_config(cfg, p), std::move(out));
  r.status = ok ? 0 : 2;
  return r;
}

// --- strain ----------------------------------------------------------------

StrainerSearch search_options(Params& p) {
  StrainerSearch s;
  s.beam_width = static_cast<int>(p.integer("beam_width", s.beam_width));
  s.max_candidates = static_cast<std::size_t>(p.integer("max_candidates", static_cast<std::int64_t>(s.max_candidates)));
  return s;
}

RunResult run_strain(const RunConfig& cfg, Params& p) {
  const models::Model m = load_valid_space(cfg);
  const Subset e = subset_of(m, p);
  const auto k = p.integer("k");
  const double delta = p.number("delta");
  const double ell = p.number("ell");
  const double sr = p.number("search_radius", 2.0 * ell);
  const StrainerSearch opt = search_options(p);
  p.finish();
  const ClassificationMask mask = classify(e, static_cast<int>(k), delta, ell, sr, opt);
  json out;
  json params;
  params["subset"] = mask.subset;
  params["k"] = mask.k;
  params["delta"] = mask.delta;
  params["ell"] = mask.ell;
  params["search_radius"] = mask.search_radius;
  out["params"] = std::move(params);
  out["subset_size"] = e.size();
  out["member_count"] = mask.member_ids.size();
  out["member_ids"] = mask.member_ids;
  json w = json::array();
  for (const auto& s : mask.witnesses) w.push_back(strainer_json(s));
  out["witnesses"] = std::move(w);
  json margins = json::array();
  for (const double x : mask.margins) margins.push_back(num(x));
  out["margins"] = std::move(margins);

  RunResult r;
  r.report = io::report("strain", resolved_config(cfg, p), std::move(out));
  std::ostringstream csv;
  csv << "id,margin,strained\n";
  std::size_t t = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const bool member = t < mask.member_ids.size() && mask.member_ids[t] == e.id(i);
    if (member) ++t;
    csv << e.id(i) << ',' << fmt(mask.margins[i]) << ',' << (member ? 1 : 0) << '\n';
  }
  r.csv = csv.str();
  return r;
}

// --- chart -----------------------------------------------------------------

RunResult run_chart(const RunConfig& cfg, Params& p) {
  const models::Model m = load_valid_space(cfg);
  const Subset e = subset_of(m, p);
  const PointId base = p.id("base");
  m.space->check_id(base);
  const auto k = p.integer("k");
  const double delta = p.number("delta");
  const double ell = p.number("ell", 0.2);
  const double radius = p.number("radius", ell * delta);
  const double sr = p.number("search_radius", 2.0 * ell);
  const std::string metric = p.text("metric", std::string("intrinsic"));
  if (metric != "intrinsic" && metric != "extrinsic") throw RefusalError("key 'metric' must be intrinsic or extrinsic");
  const auto grid = p.integer("grid", 8);
  const StrainerSearch opt = search_options(p);
  p.finish();
  std::string why;
  const auto s = find_strainer(*m.space, base, static_cast<int>(k), delta, ell, sr, opt, &why);
  if (!s) throw RefusalError("no (" + std::to_string(k) + ", delta)-strainer found at point " + std::to_string(base) + ": " + why);
  ChartOptions co;
  co.intrinsic = metric == "intrinsic";
  const Chart c = build_chart(e, *s, radius, co);
  const Openness o = openness_measure(c, e, static_cast<int>(grid));
  json out;
  out["strainer"] = strainer_json(c.strainer);
  out["radius"] = c.radius;
  out["region_size"] = c.region.size();
  out["extrinsic"] = ratio_json(c.extrinsic);
  if (co.intrinsic) out["intrinsic"] = ratio_json(c.intrinsic);
  json jo;
  jo["eps_open"] = num(o.eps_open);
  jo["worst_point"] = o.worst_point;
  jo["worst_direction"] = o.worst_direction;
  jo["isolated"] = o.isolated;
  out["openness"] = std::move(jo);
  RunResult r;
  r.report = io::report("chart", resolved_config(cfg, p), std::move(out));
  std::ostringstream csv;
  csv << "id";
  for (std::size_t j = 0; j < c.k(); ++j) csv << ",f" << (j + 1);
  csv << '\n';
  for (std::size_t i = 0; i < c.region.size(); ++i) {
    csv << c.region[i];
    for (std::size_t j = 0; j < c.k(); ++j) csv << ',' << fmt(c.values[i * c.k() + j]);
    csv << '\n';
  }
  r.csv = csv.str();
  return r;
}

// --- qcheck ----------------------------------------------------------------

Curve read_path(const std::string& file) {
  if (!std::filesystem::exists(file)) throw RefusalError("path file '" + file + "' not found");
  const json doc = io::read_json(file);
  const json* body = &doc;
  if (doc.contains("outputs") && doc["outputs"].contains("curves") && !doc["outputs"]["curves"].empty())
    body = &doc["outputs"]["curves"][0];
  if (!body->contains("points")) throw RefusalError("missing key 'points' in path file");
  Curve c;
  for (const auto& x : (*body)["points"]) {
    if (!x.is_number_integer()) throw RefusalError("key 'points' must contain integer ids");
    c.points.push_back(x.get<PointId>());
  }
  if (body->contains("step")) c.step = (*body)["step"].get<double>();
  return c;
}

RunResult run_qcheck(const RunConfig& cfg, Params& p) {
  const models::Model m = load_valid_space(cfg);
  Curve path;
  if (p.has("path")) {
    path = read_path(p.text("path"));
  } else {
    const Subset e = subset_of(m, p);
    const PointId a = p.id("from");
    const PointId b = p.id("to");
    if (!e.contains(a) || !e.contains(b)) throw RefusalError("keys 'from' and 'to' must be subset points");
    path.points = e.intrinsic_path(a, b);
    if (path.points.empty()) throw RefusalError("'from' and 'to' lie in different components of the subset");
    path.kind = CurveKind::intrinsic_geodesic;
  }
  if (path.points.size() < 2) throw RefusalError("path needs at least 2 points");
  for (const PointId x : path.points) m.space->check_id(x);
  double max_gap = 0.0;
  for (std::size_t i = 1; i < path.points.size(); ++i)
    max_gap = std::max(max_gap, m.space->dist(path.points[i - 1], path.points[i]));
  path.step = p.number("step", path.step > 0.0 ? path.step : max_gap);
  const auto views = p.ids("viewpoint");
  p.finish();
  const double h = resolution(m);
  const double tol = 1e-6 + 4.0 * h;
  json out;
  out["path_points"] = path.points.size();
  out["step"] = path.step;
  out["tolerance"] = tol;
  json checks = json::array();
  double worst = 0.0;
  for (const PointId v : views) {
    const QuasigeodesicCheck q = quasigeodesic_check(*m.space, path, v);
    json j;
    j["viewpoint"] = v;
    j["violation"] = num(q.violation);
    j["at"] = {q.at_start, q.at_end};
    j["angles"] = q.angles;
    checks.push_back(std::move(j));
    worst = std::max(worst, q.violation);
  }
  out["checks"] = std::move(checks);
  out["worst_violation"] = num(worst);
  out["monotone"] = worst <= tol;
  RunResult r;
  r.report = io::report("qcheck", resolved_config(cfg, p), std::move(out));
  return r;
}

// --- flow ------------------------------------------------------------------

json curve_json(PointId start, const GradientCurve& g) {
  json j;
  j["start"] = start;
  j["points"] = g.curve.points;
  j["step"] = g.curve.step;
  json d = json::array();
  for (const double x : g.derivatives) d.push_back(num(x));
  j["derivatives"] = std::move(d);
  j["stopped_critical"] = g.stopped_critical;
  return j;
}

RunResult run_flow(const RunConfig& cfg, Params& p) {
  const models::Model m = load_valid_space(cfg);
  const double h = resolution(m);
  const auto starts = p.ids("from");
  const PointId q = p.id("toward_dist");
  m.space->check_id(q);
  FlowConfig fc;
  fc.step = p.number("step", h > 0.0 ? std::optional<double>(2.0 * h) : std::nullopt);
  fc.witness_radius = p.number("witness_radius", 1.5 * fc.step);
  fc.max_steps = static_cast<int>(p.integer("max_steps", 100));
  fc.stop_threshold = p.number("stop_threshold", 0.1);
  std::optional<Subset> e;
  bool invariance = false;
  std::optional<double> inner, outer;
  if (p.has("subset")) {
    e = subset_of(m, p);
    invariance = p.flag("invariance");
    inner = p.maybe_number("band_inner");
    if (inner) outer = p.number("band_outer");
  } else {
    p.flag("invariance");
  }
  p.finish();
  for (const PointId s : starts) m.space->check_id(s);
  json out;
  json curves = json::array();
  if (invariance) {
    const InvarianceResult res = extremal_invariance_test(*e, q, starts, fc);
    for (std::size_t i = 0; i < starts.size(); ++i) {
      json c = curve_json(starts[i], res.curves[i]);
      c["deviation"] = num(res.deviations[i]);
      c["stall"] = res.stalls[i];
      curves.push_back(std::move(c));
    }
    out["curves"] = std::move(curves);
    out["deviations"] = res.deviations;
    out["max_deviation"] = num(res.max_deviation);
    out["tolerance"] = 3.0 * h;
    out["invariant"] = res.max_deviation <= 3.0 * h;
  } else {
    for (const PointId s : starts) {
      const GradientCurve g = gradient_curve(*m.space, q, s, fc);
      json c = curve_json(s, g);
      if (e) c["deviation"] = num([&] {
        double d = 0.0;
        for (const PointId x : g.curve.points) d = std::max(d, e->distance_to(x).first);
        return d;
      }());
      curves.push_back(std::move(c));
    }
    out["curves"] = std::move(curves);
  }
  if (inner) {
    const GradientBound b = dist_gradient_lower_bound(*e, *inner, *outer, fc);
    json jb;
    jb["epsilon"] = num(b.epsilon);
    jb["argmin"] = b.argmin;
    jb["band_points"] = b.band_points;
    jb["critical"] = b.critical;
    out["gradient_bound"] = std::move(jb);
  }
  RunResult r;
  r.report = io::report("flow", resolved_config(cfg, p), std::move(out));
  return r;
}

// --- dim / vol -------------------------------------------------------------

RunResult run_dim(const RunConfig& cfg, Params& p) {
  const models::Model m = load_valid_space(cfg);
  const Subset e = subset_of(m, p);
  const double h = resolution(m);
  const double delta = p.number("delta");
  const double ell = p.number("ell", h > 0.0 ? 3.0 * h : 0.05);
  const double sr = p.number("search_radius", 2.0 * ell);
  const auto max_k = p.integer("max_k", 3);
  const double lo = h > 0.0 ? 2.0 * h : 0.01;
  std::vector<double> grid;
  for (int i = 0; i < 5; ++i) grid.push_back(lo * std::pow(10.0, i / 4.0));
  grid = p.numbers("eps_grid", grid);
  const StrainerSearch opt = search_options(p);
  p.finish();
  const StrainerNumber sn = strainer_number(e, delta, ell, sr, static_cast<int>(max_k), opt);
  const DimensionEstimate de = packing_dimension_estimate(*m.space, e.indices(), grid);
  json out;
  out["strainer_number"] = sn.k;
  json w = json::array();
  for (const auto& s : sn.witnesses) w.push_back(strainer_json(s));
  out["witnesses"] = std::move(w);
  out["packing_dim"] = num(de.slope);
  out["packing"] = io::to_json(de);
  RunResult r;
  r.report = io::report("dim", resolved_config(cfg, p), std::move(out));
  std::ostringstream csv;
  csv << "eps,beta\n";
  for (std::size_t i = 0; i < de.eps.size(); ++i) csv << fmt(de.eps[i]) << ',' << de.beta[i] << '\n';
  r.csv = csv.str();
  return r;
}

RunResult run_vol(const RunConfig& cfg, Params& p) {
  const models::Model m = load_valid_space(cfg);
  const Subset e = subset_of(m, p);
  const auto dim = p.integer("m");
  const double eps = p.number("eps");
  p.finish();
  const MeasureEstimate ext = hausdorff_measure_estimate(e, static_cast<int>(dim), eps, MetricKind::extrinsic);
  const MeasureEstimate in = hausdorff_measure_estimate(e, static_cast<int>(dim), eps, MetricKind::intrinsic);
  json out;
  out["extrinsic"] = io::to_json(ext);
  out["intrinsic"] = io::to_json(in);
  out["relative_difference"] = num(std::abs(in.value - ext.value) / std::max(ext.value, 1e-300));
  const auto it = m.annotation.exact_measure.find(e.name());
  if (it != m.annotation.exact_measure.end()) out["exact"] = num(it->second);
  RunResult r;
  r.report = io::report("vol", resolved_config(cfg, p), std::move(out));
  return r;
}

// --- glue ------------------------------------------------------------------

RunResult run_glue(const RunConfig& cfg, Params& p) {
  const models::Model m = load_valid_space(cfg);
  const Subset e = subset_of(m, p);
  const auto dim = p.integer("m", 1);
  const double delta = p.number("delta");
  const double ell = p.number("ell");
  const double rr = p.number("r");
  GlueOptions opt;
  opt.rho = p.number("rho", rr / 10.0);
  opt.rebase = !p.flag("no_rebase");
  opt.shuffled = p.flag("shuffled");
  opt.seed = static_cast<std::uint64_t>(p.integer("seed", 1, 0));
  opt.search_radius = p.number("search_radius", 2.0 * ell);
  opt.search = search_options(p);
  p.finish();
  const GlueMap g = build_projection(e, static_cast<int>(dim), delta, ell, rr, opt);
  json out;
  out["subset"] = g.subset;
  out["r"] = g.r;
  out["rho"] = g.rho;
  out["r_below_ell_delta_squared"] = g.r_within_ell_delta2;
  out["net"] = g.net;
  out["order"] = g.order;
  json ls = json::array();
  for (const auto& s : g.local_strainers) ls.push_back(strainer_json(s));
  out["local_strainers"] = std::move(ls);
  out["domain_size"] = g.domain.size();
  out["flagged"] = g.flagged;
  json q;
  q["identity_on_subset"] = g.quality.identity_on_subset;
  q["lip"] = num(g.quality.lip);
  q["colip"] = num(g.quality.colip);
  q["eps_open"] = num(g.quality.eps_open);
  q["displacement_ratio_max"] = num(g.quality.displacement_ratio_max);
  q["displacement_excess"] = num(g.quality.displacement_excess);
  q["claim1"] = num(g.quality.claim1);
  q["claim2"] = num(g.quality.claim2);
  q["pairs"] = g.quality.pairs;
  out["quality"] = std::move(q);
  RunResult r;
  r.report = io::report("glue", resolved_config(cfg, p), std::move(out));
  std::ostringstream csv;
  csv << "id,image,dist_to_subset,displacement\n";
  for (std::size_t i = 0; i < g.domain.size(); ++i)
    csv << g.domain[i] << ',' << g.assignment[i] << ',' << fmt(g.dist_to_subset[i]) << ','
        << fmt(m.space->dist(g.domain[i], g.assignment[i])) << '\n';
  r.csv = csv.str();
  return r;
}

// --- converge --------------------------------------------------------------

RunResult run_converge(const RunConfig& cfg, Params& p) {
  const std::string file = p.text("family");
  const auto dim = p.integer("m");
  const double eps = p.number("eps");
  p.finish();
  if (!std::filesystem::exists(file)) throw RefusalError("family file '" + file + "' not found");
  const json spec = io::read_json(file);
  if (!spec.contains("members") || !spec["members"].is_array()) throw RefusalError("missing key 'members' in family file");
  std::optional<double> limit;
  if (spec.contains("limit")) {
    if (!spec["limit"].is_number()) throw RefusalError("key 'limit' must be a number");
    limit = spec["limit"].get<double>();
  }
  std::vector<FamilyMember> family;
  std::vector<std::shared_ptr<Space>> keep;
  const auto base = std::filesystem::path(file).parent_path();
  for (std::size_t i = 0; i < spec["members"].size(); ++i) {
    const json& mj = spec["members"][i];
    const std::string where = "members[" + std::to_string(i) + "]";
    models::Model model;
    if (mj.contains("space")) {
      model = io::read_space(base / mj["space"].get<std::string>());
    } else if (mj.contains("gen")) {
      Params gp(mj["gen"]);
      model = generate(gp);
      gp.finish();
    } else {
      throw RefusalError("missing key '" + where + ".space' (or '" + where + ".gen')");
    }
    if (!mj.contains("subset")) throw RefusalError("missing key '" + where + ".subset'");
    const std::string name = mj["subset"].get<std::string>();
    FamilyMember fm{mj.value("label", where), Subset::named(model.space, name), std::nullopt};
    const auto it = model.annotation.exact_measure.find(name);
    if (it != model.annotation.exact_measure.end()) fm.exact = it->second;
    keep.push_back(model.space);
    family.push_back(std::move(fm));
  }
  const ConvergenceTable t = volume_convergence_experiment(family, static_cast<int>(dim), eps, limit);
  json cfgj = resolved_config(cfg, p);
  cfgj["family_spec"] = spec;
  json out;
  json rows = json::array();
  std::ostringstream csv;
  csv << "i,label,estimate_extrinsic,estimate_intrinsic,exact,deviation\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    json j;
    j["i"] = i;
    j["label"] = row.label;
    j["estimate_extrinsic"] = num(row.extrinsic);
    j["estimate_intrinsic"] = num(row.intrinsic);
    j["exact"] = row.exact ? num(*row.exact) : json(nullptr);
    j["deviation"] = num(row.deviation);
    rows.push_back(std::move(j));
    csv << i << ',' << row.label << ',' << fmt(row.extrinsic) << ',' << fmt(row.intrinsic) << ','
        << (row.exact ? fmt(*row.exact) : std::string()) << ',' << fmt(row.deviation) << '\n';
  }
  out["rows"] = std::move(rows);
  out["limit"] = limit ? num(*limit) : json(nullptr);
  out["slack"] = num(t.slack);
  out["eventually_decreasing"] = t.eventually_decreasing;
  out["collapse"] = t.collapse;
  RunResult r;
  r.report = io::report("converge", cfgj, std::move(out));
  r.csv = csv.str();
  return r;
}

// --- flag parsing ----------------------------------------------------------

enum class Kind { number, integer, text, flag, ids, numbers };

struct Opt {
  const char* flag;
  const char* key;
  Kind kind;
};

struct SubSpec {
  Command command;
  const char* help;
  std::vector<Opt> opts;
};

const std::vector<SubSpec>& subcommands() {
  static const std::vector<SubSpec> specs = {
      {Command::gen, "Generate a model space",
       {{"--n", "n", Kind::integer}, {"--radius", "radius", Kind::number}, {"--h", "h", Kind::number},
        {"--rotation", "rotation", Kind::number}, {"--band", "band", Kind::number},
        {"--interior-h", "interior_h", Kind::number}, {"--boundary-only", "boundary_only", Kind::flag},
        {"--side", "side", Kind::number}, {"--length", "length", Kind::number}, {"--d", "d", Kind::number},
        {"--theta", "theta", Kind::number}, {"--base", "base", Kind::text},
        {"--base-length", "base_length", Kind::number}, {"--base-d", "base_d", Kind::number}}},
      {Command::validate, "Check the metric axioms (and extremality of a subset)",
       {{"--seed", "seed", Kind::integer}, {"--triples", "triples", Kind::integer}, {"--subset", "subset", Kind::text},
        {"--witness-radius", "witness_radius", Kind::number}, {"--link-radius", "link_radius", Kind::number}}},
      {Command::strain, "Classify subset points by (k, delta)-strainers",
       {{"--subset", "subset", Kind::text}, {"--k", "k", Kind::integer}, {"--delta", "delta", Kind::number},
        {"--ell", "ell", Kind::number}, {"--search-radius", "search_radius", Kind::number},
        {"--beam-width", "beam_width", Kind::integer}, {"--max-candidates", "max_candidates", Kind::integer},
        {"--link-radius", "link_radius", Kind::number}}},
      {Command::chart, "Build a strainer chart and measure its distortion",
       {{"--subset", "subset", Kind::text}, {"--base", "base", Kind::integer}, {"--k", "k", Kind::integer},
        {"--delta", "delta", Kind::number}, {"--ell", "ell", Kind::number}, {"--radius", "radius", Kind::number},
        {"--search-radius", "search_radius", Kind::number}, {"--metric", "metric", Kind::text},
        {"--grid", "grid", Kind::integer}, {"--beam-width", "beam_width", Kind::integer},
        {"--max-candidates", "max_candidates", Kind::integer}, {"--link-radius", "link_radius", Kind::number}}},
      {Command::qcheck, "Check comparison-angle monotonicity along a path",
       {{"--path", "path", Kind::text}, {"--subset", "subset", Kind::text}, {"--from", "from", Kind::integer},
        {"--to", "to", Kind::integer}, {"--viewpoint", "viewpoint", Kind::ids}, {"--step", "step", Kind::number},
        {"--link-radius", "link_radius", Kind::number}}},
      {Command::flow, "Run discrete gradient curves of a distance function",
       {{"--from", "from", Kind::ids}, {"--toward-dist", "toward_dist", Kind::integer},
        {"--subset", "subset", Kind::text}, {"--invariance", "invariance", Kind::flag},
        {"--step", "step", Kind::number}, {"--witness-radius", "witness_radius", Kind::number},
        {"--max-steps", "max_steps", Kind::integer}, {"--stop-threshold", "stop_threshold", Kind::number},
        {"--band-inner", "band_inner", Kind::number}, {"--band-outer", "band_outer", Kind::number},
        {"--link-radius", "link_radius", Kind::number}}},
      {Command::dim, "Strainer number and packing dimension of a subset",
       {{"--subset", "subset", Kind::text}, {"--delta", "delta", Kind::number}, {"--ell", "ell", Kind::number},
        {"--search-radius", "search_radius", Kind::number}, {"--max-k", "max_k", Kind::integer},
        {"--eps-grid", "eps_grid", Kind::numbers}, {"--beam-width", "beam_width", Kind::integer},
        {"--max-candidates", "max_candidates", Kind::integer}, {"--link-radius", "link_radius", Kind::number}}},
      {Command::vol, "Hausdorff measure estimates in both metrics",
       {{"--subset", "subset", Kind::text}, {"--m", "m", Kind::integer}, {"--eps", "eps", Kind::number},
        {"--link-radius", "link_radius", Kind::number}}},
      {Command::glue, "Blend strainer charts into a projection onto a subset",
       {{"--subset", "subset", Kind::text}, {"--m", "m", Kind::integer}, {"--delta", "delta", Kind::number},
        {"--ell", "ell", Kind::number}, {"--r", "r", Kind::number}, {"--rho", "rho", Kind::number},
        {"--no-rebase", "no_rebase", Kind::flag}, {"--shuffled", "shuffled", Kind::flag},
        {"--seed", "seed", Kind::integer}, {"--search-radius", "search_radius", Kind::number},
        {"--beam-width", "beam_width", Kind::integer}, {"--max-candidates", "max_candidates", Kind::integer},
        {"--link-radius", "link_radius", Kind::number}}},
      {Command::converge, "Measure estimates along a family of spaces",
       {{"--family", "family", Kind::text}, {"--m", "m", Kind::integer}, {"--eps", "eps", Kind::number}}},
  };
  return specs;
}

json convert(const std::string& key, Kind kind, const std::vector<std::string>& raw) {
  try {
    switch (kind) {
      case Kind::number:
        return std::stod(raw.at(0));
      case Kind::integer:
        return std::stoll(raw.at(0));
      case Kind::text:
        return raw.at(0);
      case Kind::flag:
        return true;
      case Kind::ids: {
        json a = json::array();
        for (const auto& s : raw) a.push_back(std::stoll(s));
        return a;
      }
      case Kind::numbers: {
        json a = json::array();
        for (const auto& s : raw) a.push_back(std::stod(s));
        return a;
      }
    }
  } catch (const std::logic_error&) {
  }
  throw RefusalError("key '" + key + "' has a malformed value");
}

}  // namespace

const char* to_string(Command c) {
  for (const auto& [k, s] : kCommands)
    if (k == c) return s;
  return "?";
}

std::optional<Command> parse_command(std::string_view s) {
  for (const auto& [k, name] : kCommands)
    if (s == name) return k;
  return std::nullopt;
}

RunConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw RefusalError("config must be a JSON object");
  if (!doc.contains("command")) throw RefusalError("missing key 'command'");
  if (!doc["command"].is_string()) throw RefusalError("key 'command' must be a string");
  const auto c = parse_command(doc["command"].get<std::string>());
  if (!c) throw RefusalError("key 'command' names an unknown command");
  RunConfig cfg;
  cfg.command = *c;
  for (const auto& [k, v] : doc.items()) {
    if (k == "command") continue;
    if (k == "space") {
      if (!v.is_string()) throw RefusalError("key 'space' must be a path");
      cfg.space_path = v.get<std::string>();
    } else if (k == "out") {
      if (!v.is_string()) throw RefusalError("key 'out' must be a path");
      cfg.out_path = v.get<std::string>();
    } else if (k == "params") {
      if (!v.is_object()) throw RefusalError("key 'params' must be an object");
      cfg.params = v;
    } else {
      throw RefusalError("unknown key '" + k + "'");
    }
  }
  const bool needs_space = cfg.command != Command::gen && cfg.command != Command::converge;
  if (needs_space && cfg.space_path.empty()) throw RefusalError("missing key 'space'");
  return cfg;
}

RunResult execute(const RunConfig& cfg) {
  Params p(cfg.params);
  switch (cfg.command) {
    case Command::gen:
      return run_gen(cfg, p);
    case Command::validate:
      return run_validate(cfg, p);
    case Command::strain:
      return run_strain(cfg, p);
    case Command::chart:
      return run_chart(cfg, p);
    case Command::qcheck:
      return run_qcheck(cfg, p);
    case Command::flow:
      return run_flow(cfg, p);
    case Command::dim:
      return run_dim(cfg, p);
    case Command::vol:
      return run_vol(cfg, p);
    case Command::glue:
      return run_glue(cfg, p);
    case Command::converge:
      return run_converge(cfg, p);
  }
  throw Error("unhandled command");
}

void write_outputs(const RunConfig& cfg, const RunResult& result) {
  if (cfg.out_path.empty()) {
    std::cout << result.report.dump(1) << '\n';
    return;
  }
  io::write_json(cfg.out_path, result.report);
  if (!result.csv.empty()) {
    std::filesystem::path csv(cfg.out_path);
    csv.replace_extension(".csv");
    io::write_text(csv, result.csv);
  }
}

int main(int argc, char** argv) {
  CLI::App app{"alexkit: comparison-geometry measurements on sampled metric spaces"};
  // -h is the sampling pitch, so help is long-form only
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (falls back to ALEXKIT_THREADS)")->check(CLI::NonNegativeNumber);

  struct Bound {
    CLI::App* app;
    const SubSpec* spec;
    std::map<std::string, std::vector<std::string>> values;
    std::map<std::string, bool> flags;
    std::string space, out, model;
  };
  std::vector<std::unique_ptr<Bound>> bound;
  for (const auto& spec : subcommands()) {
    auto b = std::make_unique<Bound>();
    b->spec = &spec;
    b->app = app.add_subcommand(to_string(spec.command), spec.help);
    b->app->set_help_flag("--help", "Print this help message and exit");
    if (spec.command == Command::gen) b->app->add_option("model", b->model, "polygon, square, segment, circle, two-points, cone, pillow or suspension")->required();
    if (spec.command != Command::gen && spec.command != Command::converge)
      b->app->add_option("--space", b->space, "Space file")->required();
    b->app->add_option("--out", b->out, "Report file (CSV tables are written next to it)");
    for (const auto& o : spec.opts) {
      if (o.kind == Kind::flag)
        b->app->add_flag(o.flag, b->flags[o.key]);
      else if (o.kind == Kind::ids || o.kind == Kind::numbers)
        b->app->add_option(o.flag, b->values[o.key])->delimiter(',')->type_name(o.kind == Kind::ids ? "ID,..." : "NUM,...");
      else
        b->app->add_option(o.flag, b->values[o.key])
            ->expected(1)
            ->type_name(o.kind == Kind::text ? "TEXT" : o.kind == Kind::integer ? "INT" : "NUM");
    }
    bound.push_back(std::move(b));
  }
  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "Run a JSON config {command, space, params, out}");
  run->add_option("--config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (threads > 0) parallel::set_threads(threads);
    else parallel::apply_env_threads();

    RunConfig cfg;
    if (run->parsed()) {
      if (!std::filesystem::exists(config_path)) throw RefusalError("config file '" + config_path + "' not found");
      json doc;
      try {
        doc = io::read_json(config_path);
      } catch (const json::exception&) {
        throw RefusalError("config file '" + config_path + "' is not valid JSON");
      }
      cfg = config_from_json(doc);
    } else {
      for (const auto& b : bound) {
        if (!b->app->parsed()) continue;
        cfg.command = b->spec->command;
        cfg.space_path = b->space;
        cfg.out_path = b->out;
        if (cfg.command == Command::gen) cfg.params["model"] = b->model;
        for (const auto& o : b->spec->opts) {
          if (o.kind == Kind::flag) {
            if (b->flags[o.key]) cfg.params[o.key] = true;
          } else if (!b->values[o.key].empty()) {
            cfg.params[o.key] = convert(o.key, o.kind, b->values[o.key]);
          }
        }
      }
    }
    const RunResult result = execute(cfg);
    write_outputs(cfg, result);
    return result.status;
  } catch (const RefusalError& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return 2;
  } catch (const StalledError& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace alexkit::cli
