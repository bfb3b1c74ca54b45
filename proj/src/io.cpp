#include "prestrain/io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace prestrain {

void require_object(const Json& value, const std::string& context) {
  if (!value.is_object()) throw ValidationError(context + ": expected a JSON object");
}

void require_keys(const Json& obj, const std::string& context,
                  const std::vector<std::string>& allowed) {
  require_object(obj, context);
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw ValidationError(context + ": unknown key \"" + item.key() + "\"");
  }
}

double require_number(const Json& obj, const std::string& key, const std::string& context) {
  if (!obj.contains(key)) throw ValidationError(context + ": missing key \"" + key + "\"");
  if (!obj.at(key).is_number())
    throw ValidationError(context + ": key \"" + key + "\" must be a number");
  return obj.at(key).get<double>();
}

double number_or(const Json& obj, const std::string& key, double fallback,
                 const std::string& context) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number())
    throw ValidationError(context + ": key \"" + key + "\" must be a number");
  return obj.at(key).get<double>();
}

int int_or(const Json& obj, const std::string& key, int fallback, const std::string& context) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number_integer())
    throw ValidationError(context + ": key \"" + key + "\" must be an integer");
  return obj.at(key).get<int>();
}

Poly2 poly2_from_json(const Json& j, const std::string& context) {
  require_keys(j, context, {"c00", "c10", "c01", "c20", "c11", "c02"});
  Poly2 p;
  p.c00 = number_or(j, "c00", 0.0, context);
  p.c10 = number_or(j, "c10", 0.0, context);
  p.c01 = number_or(j, "c01", 0.0, context);
  p.c20 = number_or(j, "c20", 0.0, context);
  p.c11 = number_or(j, "c11", 0.0, context);
  p.c02 = number_or(j, "c02", 0.0, context);
  return p;
}

Json poly2_to_json(const Poly2& p) {
  return Json{{"c00", p.c00}, {"c10", p.c10}, {"c01", p.c01},
              {"c20", p.c20}, {"c11", p.c11}, {"c02", p.c02}};
}

namespace {

void read_range(const Json& j, const std::string& key, const std::string& context, double& lo,
                double& hi) {
  if (!j.contains(key)) throw ValidationError(context + ": missing range \"" + key + "\"");
  const Json& r = j.at(key);
  if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
    throw ValidationError(context + ": range \"" + key + "\" must be [min, max]");
  lo = r[0].get<double>();
  hi = r[1].get<double>();
}

}  // namespace

Rect rect_from_json(const Json& j, const std::string& context) {
  require_keys(j, context, {"x1", "x2"});
  Rect box;
  read_range(j, "x1", context, box.x1_min, box.x1_max);
  read_range(j, "x2", context, box.x2_min, box.x2_max);
  box.validate();
  return box;
}

Grid2 grid_from_json(const Json& j, const Rect& box, const std::string& context) {
  require_keys(j, context, {"nx", "ny"});
  Grid2 grid;
  grid.box = box;
  grid.nx = int_or(j, "nx", 65, context);
  grid.ny = int_or(j, "ny", 65, context);
  grid.validate();
  return grid;
}

IsotropicModuli moduli_from_json(const Json& j, const std::string& context) {
  require_keys(j, context, {"mu", "lambda"});
  IsotropicModuli m;
  m.mu = number_or(j, "mu", 1.0, context);
  m.lambda = number_or(j, "lambda", 1.0, context);
  m.validate();
  return m;
}

DirectorField director_from_json(const Json& j, const std::string& context) {
  require_keys(j, context,
               {"pattern", "psi", "center", "theta", "tilt", "r", "nu", "delta", "domain"});
  PatternSpec spec;
  std::string pattern = j.value("pattern", std::string("radial"));
  if (pattern == "radial")
    spec.kind = PatternSpec::Kind::Radial;
  else if (pattern == "azimuthal")
    spec.kind = PatternSpec::Kind::Azimuthal;
  else if (pattern == "spiral")
    spec.kind = PatternSpec::Kind::Spiral;
  else if (pattern == "custom")
    spec.kind = PatternSpec::Kind::Custom;
  else
    throw ValidationError(context + ": unknown pattern \"" + pattern + "\"");
  spec.psi = number_or(j, "psi", 0.0, context);
  if (j.contains("center")) {
    const Json& c = j.at("center");
    if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number())
      throw ValidationError(context + ": center must be [c1, c2]");
    spec.center = Vec2(c[0].get<double>(), c[1].get<double>());
  }
  if (j.contains("theta")) spec.theta = poly2_from_json(j.at("theta"), context + ".theta");
  if (j.contains("tilt")) spec.tilt = poly2_from_json(j.at("tilt"), context + ".tilt");

  double r = number_or(j, "r", 1.2, context);
  if (j.contains("nu") && j.contains("delta"))
    throw ValidationError(context + ": give either nu or delta, not both");
  double delta = j.contains("delta") ? require_number(j, "delta", context)
                                     : delta_from_poisson(number_or(j, "nu", 0.5, context));
  Rect domain{0.5, 1.5, 0.5, 1.5};
  if (j.contains("domain")) domain = rect_from_json(j.at("domain"), context + ".domain");
  return make_director(spec, r, delta, domain);
}

MetricField MetricConfig::build() const {
  switch (family) {
    case Family::BlockDiag:
      return make_block_diag_metric(block_diag);
    case Family::Conformal:
      return make_conformal_metric(conformal);
    case Family::Shear:
      return make_shear_metric(shear);
    case Family::CylinderShear:
      return make_cylinder_shear_metric(fixed_domain);
    case Family::Paraboloid:
      return make_paraboloid_metric(fixed_domain);
    case Family::Nematic:
      return nematic_metric(director);
    case Family::Sampled:
      return make_sampled_metric(sample_grid, samples);
  }
  throw ValidationError("metric config: unknown family");
}

Rect MetricConfig::domain() const {
  switch (family) {
    case Family::BlockDiag:
      return block_diag.domain;
    case Family::Conformal:
      return conformal.domain;
    case Family::Shear:
      return shear.domain;
    case Family::CylinderShear:
    case Family::Paraboloid:
      return fixed_domain;
    case Family::Nematic:
      return director.domain;
    case Family::Sampled:
      return sample_grid.box;
  }
  throw ValidationError("metric config: unknown family");
}

namespace {

Rect params_domain(const Json& params, const Rect& fallback, const std::string& context) {
  if (!params.contains("domain")) return fallback;
  return rect_from_json(params.at("domain"), context + ".domain");
}

MetricConfig catalog_config(const std::string& name, const Json& params) {
  MetricConfig cfg;
  std::string context = "metric.params(" + name + ")";
  if (name == "block-diag") {
    require_keys(params, context, {"lambda", "domain"});
    cfg.family = MetricConfig::Family::BlockDiag;
    if (params.contains("lambda"))
      cfg.block_diag.lambda = poly2_from_json(params.at("lambda"), context + ".lambda");
    cfg.block_diag.domain = params_domain(params, cfg.block_diag.domain, context);
  } else if (name == "conformal") {
    require_keys(params, context, {"exponent", "domain"});
    cfg.family = MetricConfig::Family::Conformal;
    if (params.contains("exponent"))
      cfg.conformal.exponent = poly2_from_json(params.at("exponent"), context + ".exponent");
    cfg.conformal.domain = params_domain(params, cfg.conformal.domain, context);
  } else if (name == "shear") {
    require_keys(params, context, {"lambda2", "domain"});
    cfg.family = MetricConfig::Family::Shear;
    if (params.contains("lambda2"))
      cfg.shear.lambda2 = poly2_from_json(params.at("lambda2"), context + ".lambda2");
    cfg.shear.domain = params_domain(params, cfg.shear.domain, context);
  } else if (name == "cylinder-shear") {
    require_keys(params, context, {"domain"});
    cfg.family = MetricConfig::Family::CylinderShear;
    cfg.fixed_domain = params_domain(params, Rect{0, 1, 0, 1}, context);
  } else if (name == "paraboloid") {
    require_keys(params, context, {"domain"});
    cfg.family = MetricConfig::Family::Paraboloid;
    cfg.fixed_domain = params_domain(params, Rect{1.2, 2.2, 0.1, 1.1}, context);
  } else if (name == "nematic") {
    cfg.family = MetricConfig::Family::Nematic;
    cfg.director = director_from_json(params, context);
  } else {
    throw ValidationError("metric config: unknown catalog family \"" + name + "\"");
  }
  return cfg;
}

MetricConfig sampled_config(const Json& j) {
  std::string context = "metric.samples";
  require_keys(j, context, {"x1", "x2", "nx", "ny", "values"});
  Rect box;
  read_range(j, "x1", context, box.x1_min, box.x1_max);
  read_range(j, "x2", context, box.x2_min, box.x2_max);
  box.validate();
  MetricConfig cfg;
  cfg.family = MetricConfig::Family::Sampled;
  cfg.sample_grid.box = box;
  cfg.sample_grid.nx = int_or(j, "nx", 0, context);
  cfg.sample_grid.ny = int_or(j, "ny", 0, context);
  cfg.sample_grid.validate();
  if (!j.contains("values") || !j.at("values").is_array())
    throw ValidationError(context + ": missing node values");
  const Json& values = j.at("values");
  if (static_cast<int>(values.size()) != cfg.sample_grid.size())
    throw ValidationError(context + ": need one 3x3 matrix per node (x1-major order)");
  cfg.samples.reserve(values.size());
  for (const Json& entry : values) {
    if (!entry.is_array() || entry.size() != 9)
      throw ValidationError(context + ": each node value must hold 9 numbers (row-major 3x3)");
    Mat3 G;
    for (int k = 0; k < 9; ++k) {
      if (!entry[k].is_number())
        throw ValidationError(context + ": matrix entries must be numbers");
      G(k / 3, k % 3) = entry[k].get<double>();
    }
    cfg.samples.push_back(G);
  }
  return cfg;
}

}  // namespace

MetricConfig metric_config_from_json(const Json& j) {
  require_keys(j, "metric", {"catalog", "params", "samples"});
  if (j.contains("catalog") == j.contains("samples"))
    throw ValidationError("metric config: give exactly one of \"catalog\" or \"samples\"");
  if (j.contains("catalog")) {
    if (!j.at("catalog").is_string())
      throw ValidationError("metric config: \"catalog\" must be a family name");
    Json params = j.value("params", Json::object());
    return catalog_config(j.at("catalog").get<std::string>(), params);
  }
  if (j.contains("params"))
    throw ValidationError("metric config: \"params\" applies to catalog metrics only");
  return sampled_config(j.at("samples"));
}

MetricField metric_from_json(const Json& j) { return metric_config_from_json(j).build(); }

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(columns.size()) {
  if (columns.empty()) throw ValidationError("csv writer needs at least one column");
  for (size_t i = 0; i < columns.size(); ++i) {
    if (i) body_ += ',';
    body_ += columns[i];
  }
  body_ += '\n';
}

void CsvWriter::add_row(const std::vector<double>& values) {
  if (values.size() != columns_) throw ValidationError("csv row width mismatch");
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) body_ += ',';
    body_ += format_real(values[i]);
  }
  body_ += '\n';
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json RunReport::to_json() const {
  return Json{{"schema_version", kSchemaVersion},
              {"version", kToolVersion},
              {"subcommand", subcommand},
              {"config_hash", config_hash},
              {"wall_seconds", wall_seconds},
              {"results", results}};
}

void validate_report_json(const Json& j) {
  require_keys(j, "report",
               {"schema_version", "version", "subcommand", "config_hash", "wall_seconds",
                "results"});
  if (!j.contains("schema_version") || !j.at("schema_version").is_number_integer() ||
      j.at("schema_version").get<int>() != kSchemaVersion)
    throw ValidationError("report: bad schema_version");
  if (!j.contains("version") || !j.at("version").is_string())
    throw ValidationError("report: missing version");
  if (!j.contains("subcommand") || !j.at("subcommand").is_string())
    throw ValidationError("report: missing subcommand");
  if (!j.contains("config_hash") || !j.at("config_hash").is_string() ||
      j.at("config_hash").get<std::string>().size() != 16)
    throw ValidationError("report: missing config hash");
  if (!j.contains("wall_seconds") || !j.at("wall_seconds").is_number())
    throw ValidationError("report: missing wall time");
  if (!j.contains("results") || !j.at("results").is_object())
    throw ValidationError("report: missing results");
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open output file " + path);
  out << body;
  if (!out) throw ValidationError("failed writing output file " + path);
}

Json parse_json_text(const std::string& text, const std::string& context) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ValidationError(context + ": malformed JSON");
  return j;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

}  // namespace prestrain
