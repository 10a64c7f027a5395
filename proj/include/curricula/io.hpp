#pragma once

// Curriculum and pass-rate files, DOT export, and the JSON shapes shared by
// the CLI and the HTTP service.
//
// Curriculum file:
//   {"format_version": "1", "name": ...,
//    "courses":    [{"id", "name", "credits" (default 3), "canonical"?}],
//    "requisites": [{"from", "to", "type": "prereq"|"coreq"|"strictcoreq"}],
//    "plans":      [{"name", "terms": [[id, ...], ...]}]}
// Pass-rate file:
//   {"default": p, "overrides": {id: p, ...}}

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "curricula/core.hpp"
#include "curricula/metrics.hpp"
#include "curricula/planner.hpp"
#include "curricula/simulator.hpp"

namespace curricula {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kFormatVersion = "1";

/// A document that could not be decoded; report() lists every problem with
/// its field path ("requisites[2].to") or line and column.
class FormatError : public CurriculumError {
 public:
  explicit FormatError(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// Reading or writing a file failed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParseOptions {
  // Unknown fields become warnings instead of errors.
  bool lenient = false;
};

Checked<Curriculum> parse_curriculum(std::string_view text, ParseOptions options = {});
Checked<Curriculum> curriculum_from_json(const Json& doc, ParseOptions options = {});

/// Canonical text: courses sorted by id, requisites by (from, to, type),
/// plans in stored order. Equal curricula serialize byte-identically.
std::string serialize_curriculum(const Curriculum& c);
Json curriculum_to_json(const Curriculum& c);

Checked<PassRateTable> parse_pass_rates(std::string_view text, ParseOptions options = {});
Checked<PassRateTable> pass_rates_from_json(const Json& doc, ParseOptions options = {});
std::string serialize_pass_rates(const PassRateTable& table);
Json pass_rates_to_json(const PassRateTable& table);

struct DotOptions {
  // Plan whose terms become clusters.
  std::optional<std::string> cluster_by_plan;
  bool highlight_longest_paths = false;
  // Courses blocked by this one are filled.
  std::optional<std::string> shade_blocked_by;
};

/// Throws CurriculumError for an unknown plan or course in the options.
std::string export_dot(const Curriculum& c, const DotOptions& options = {});

Json to_json(const Issue& issue);
Json to_json(const ValidationReport& report);
Json to_json(const MetricsReport& report);
Json to_json(const SimResult& result);
Json to_json(const PlanProfile& profile);
Json to_json(const DegreePlan& plan);
Json to_json(const Edit& e);

/// Edits as [{"op": "add_course"|"remove_course"|"add_requisite"|
/// "remove_requisite"|"move_course", ...}]. Throws FormatError.
std::vector<Edit> edits_from_json(const Json& doc);

/// Simulation request body:
///   {"plan", "pass_rates": p | {"default", "overrides"}, "mode",
///    "horizon_terms" | "horizon_multiplier", "students", "seed", "threads",
///    "policy": {"extra_new_courses_per_term", "retakes_capped",
///               "priority": "plan_term"|"complexity"}}
/// A horizon multiplier is resolved against the plan length; with neither
/// field the horizon is twice the plan length. Throws FormatError.
SimulationConfig simulation_config_from_json(const Json& doc, const Curriculum& c);
Json to_json(const SimulationConfig& cfg);

/// Parses JSON text, turning syntax errors into a FormatError with line and
/// column.
Json parse_json_text(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace curricula
