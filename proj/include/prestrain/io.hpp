#pragma once

// JSON run configuration (strict: unknown keys are rejected so typos fail
// loudly), metric dispatch from config, deterministic CSV and JSON writers,
// and the run report envelope shared by the command-line tool.

#include "prestrain/catalog.hpp"
#include "prestrain/core.hpp"
#include "prestrain/elastic.hpp"
#include "prestrain/nematic.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace prestrain {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

// Reject keys outside the allowed set.
void require_keys(const Json& obj, const std::string& context,
                  const std::vector<std::string>& allowed);
void require_object(const Json& value, const std::string& context);
double require_number(const Json& obj, const std::string& key, const std::string& context);
double number_or(const Json& obj, const std::string& key, double fallback,
                 const std::string& context);
int int_or(const Json& obj, const std::string& key, int fallback, const std::string& context);

Poly2 poly2_from_json(const Json& j, const std::string& context);
Json poly2_to_json(const Poly2& p);
Rect rect_from_json(const Json& j, const std::string& context);
Grid2 grid_from_json(const Json& j, const Rect& box, const std::string& context);
IsotropicModuli moduli_from_json(const Json& j, const std::string& context);

// Parsed metric configuration. Keeps the family parameters (the scaling
// pipeline needs them to build the matching recovery deformation).
struct MetricConfig {
  enum class Family { BlockDiag, Conformal, Shear, CylinderShear, Paraboloid, Nematic, Sampled };
  Family family = Family::BlockDiag;
  BlockDiagParams block_diag;
  ConformalParams conformal;
  ShearParams shear;
  Rect fixed_domain{0, 1, 0, 1};  // cylinder-shear / paraboloid
  DirectorField director;         // nematic
  Grid2 sample_grid;              // sampled
  std::vector<Mat3> samples;

  MetricField build() const;
  Rect domain() const;
};

// Accepts {"catalog": <family>, "params": {...}} with family one of
// block-diag, conformal, shear, cylinder-shear, paraboloid, nematic, or
// {"samples": {"x1": [a,b], "x2": [c,d], "nx": .., "ny": .., "values": [...]}}
// with one row-major 3x3 matrix (9 numbers) per node, nodes in x1-major
// order.
MetricConfig metric_config_from_json(const Json& j);
MetricField metric_from_json(const Json& j);

// Director spec: {"pattern": radial|azimuthal|spiral|custom, "psi": ..,
// "center": [c1,c2], "theta": {poly}, "tilt": {poly}, "r": ..,
// "nu" or "delta": .., "domain": {...}}.
DirectorField director_from_json(const Json& j, const std::string& context);

// Reals with 17 significant digits: emitted tables are deterministic and
// round-trip through text exactly.
std::string format_real(double x);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);
  void add_row(const std::vector<double>& values);
  const std::string& str() const { return body_; }

 private:
  size_t columns_ = 0;
  std::string body_;
};

// FNV-1a 64-bit fingerprint, hex-encoded (inputs hash in run reports).
std::string fnv1a_hex(const std::string& bytes);

struct RunReport {
  std::string subcommand;
  std::string config_hash;
  double wall_seconds = 0.0;
  Json results;

  Json to_json() const;
};

// Structural check applied to every emitted report (and reused by tests for
// the round-trip property).
void validate_report_json(const Json& j);

void write_text_file(const std::string& path, const std::string& body);
Json read_json_file(const std::string& path);
Json parse_json_text(const std::string& text, const std::string& context);

}  // namespace prestrain
