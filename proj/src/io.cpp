#include "curricula/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace curricula {

FormatError::FormatError(ValidationReport report)
    : CurriculumError(report.errors.empty() ? std::string("malformed document")
                                            : report.errors.front().message),
      report_(std::move(report)) {}

namespace {

std::string child(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : fmt::format("{}.{}", path, key);
}

std::string item(const std::string& path, std::size_t index) {
  return fmt::format("{}[{}]", path, index);
}

std::string_view type_name(const Json& j) {
  if (j.is_object()) return "an object";
  if (j.is_array()) return "an array";
  if (j.is_string()) return "a string";
  if (j.is_boolean()) return "a boolean";
  if (j.is_number()) return "a number";
  return "null";
}

// Collects schema problems with their field paths.
class Decoder {
 public:
  explicit Decoder(ParseOptions options) : lenient_(options.lenient) {}

  ValidationReport report;

  void error(const std::string& path, const std::string& message,
             IssueKind kind = IssueKind::schema, std::vector<std::string> courses = {}) {
    report.errors.push_back({kind, fmt::format("{}: {}", path.empty() ? "document" : path, message),
                             std::move(courses)});
  }

  bool expect_object(const Json& j, const std::string& path) {
    if (j.is_object()) return true;
    error(path, fmt::format("expected an object, found {}", type_name(j)));
    return false;
  }

  bool expect_array(const Json& j, const std::string& path) {
    if (j.is_array()) return true;
    error(path, fmt::format("expected an array, found {}", type_name(j)));
    return false;
  }

  void check_fields(const Json& obj, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) continue;
      Issue issue{IssueKind::schema, fmt::format("{}: unknown field", child(path, key)), {}};
      (lenient_ ? report.warnings : report.errors).push_back(std::move(issue));
    }
  }

  const Json* field(const Json& obj, const std::string& path, std::string_view key,
                    bool required) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) error(child(path, key), "missing required field");
      return nullptr;
    }
    return &*it;
  }

  std::optional<std::string> string_field(const Json& obj, const std::string& path,
                                          std::string_view key, bool required) {
    const Json* j = field(obj, path, key, required);
    if (!j) return std::nullopt;
    if (!j->is_string()) {
      error(child(path, key), fmt::format("expected a string, found {}", type_name(*j)));
      return std::nullopt;
    }
    return j->get<std::string>();
  }

  std::optional<double> number_field(const Json& obj, const std::string& path,
                                     std::string_view key, bool required) {
    const Json* j = field(obj, path, key, required);
    if (!j) return std::nullopt;
    if (!j->is_number()) {
      error(child(path, key), fmt::format("expected a number, found {}", type_name(*j)));
      return std::nullopt;
    }
    return j->get<double>();
  }

  std::optional<std::int64_t> integer_field(const Json& obj, const std::string& path,
                                            std::string_view key, bool required,
                                            std::int64_t min_value) {
    const Json* j = field(obj, path, key, required);
    if (!j) return std::nullopt;
    if (!j->is_number_integer()) {
      error(child(path, key), fmt::format("expected an integer, found {}", type_name(*j)));
      return std::nullopt;
    }
    if (j->is_number_unsigned() &&
        j->get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      error(child(path, key), "integer out of range");
      return std::nullopt;
    }
    auto v = j->get<std::int64_t>();
    if (v < min_value) {
      error(child(path, key), fmt::format("must be at least {}", min_value));
      return std::nullopt;
    }
    return v;
  }

  std::optional<bool> bool_field(const Json& obj, const std::string& path, std::string_view key) {
    const Json* j = field(obj, path, key, false);
    if (!j) return std::nullopt;
    if (!j->is_boolean()) {
      error(child(path, key), fmt::format("expected a boolean, found {}", type_name(*j)));
      return std::nullopt;
    }
    return j->get<bool>();
  }

  std::optional<double> rate(const Json& j, const std::string& path) {
    if (!j.is_number()) {
      error(path, fmt::format("expected a number, found {}", type_name(j)));
      return std::nullopt;
    }
    double p = j.get<double>();
    if (!(p >= 0.0 && p <= 1.0)) {
      error(path, fmt::format("pass rate {} outside [0,1]", p));
      return std::nullopt;
    }
    return p;
  }

 private:
  bool lenient_;
};

std::optional<Course> decode_course(Decoder& d, const Json& j, const std::string& path) {
  if (!d.expect_object(j, path)) return std::nullopt;
  d.check_fields(j, path, {"id", "name", "credits", "canonical"});
  auto id = d.string_field(j, path, "id", true);
  auto name = d.string_field(j, path, "name", true);
  auto credits = d.number_field(j, path, "credits", false);
  std::optional<std::string> canonical;
  if (j.contains("canonical")) {
    canonical = d.string_field(j, path, "canonical", true);
    if (!canonical) return std::nullopt;
  }
  if (!id || !name || (j.contains("credits") && !credits)) return std::nullopt;
  return Course{*id, *name, credits.value_or(3.0), canonical};
}

std::optional<RequisiteKind> decode_kind(Decoder& d, const Json& j, const std::string& path,
                                         bool required) {
  auto text = d.string_field(j, path, "type", required);
  if (!text) return std::nullopt;
  auto kind = requisite_kind_from_string(*text);
  if (!kind) {
    d.error(child(path, "type"), fmt::format("bad requisite type '{}' (expected prereq, coreq or "
                                             "strictcoreq)",
                                             *text),
            IssueKind::invalid_requisite);
  }
  return kind;
}

std::optional<PassRateTable> decode_pass_rates(Decoder& d, const Json& j, const std::string& path) {
  if (!d.expect_object(j, path)) return std::nullopt;
  d.check_fields(j, path, {"default", "overrides"});
  PassRateTable table;
  bool ok = true;
  if (const Json* def = d.field(j, path, "default", true)) {
    auto p = d.rate(*def, child(path, "default"));
    if (p)
      table.default_rate = *p;
    else
      ok = false;
  } else {
    ok = false;
  }
  if (const Json* ov = d.field(j, path, "overrides", false)) {
    auto ov_path = child(path, "overrides");
    if (d.expect_object(*ov, ov_path)) {
      for (const auto& [id, value] : ov->items()) {
        auto p = d.rate(value, child(ov_path, id));
        if (p)
          table.overrides.emplace(id, *p);
        else
          ok = false;
      }
    } else {
      ok = false;
    }
  }
  if (!ok) return std::nullopt;
  return table;
}

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"' || ch == '\\') out.push_back('\\');
    if (ch == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

Json number_or_wide(WideCount value) {
  if (value <= std::numeric_limits<std::uint64_t>::max())
    return Json(static_cast<std::uint64_t>(value));
  return Json(static_cast<double>(value));
}

Json issues_json(const std::vector<Issue>& issues) {
  Json arr = Json::array();
  for (const auto& i : issues) arr.push_back(to_json(i));
  return arr;
}

}  // namespace

Json parse_json_text(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, column = 1;
    std::size_t limit = std::min<std::size_t>(e.byte ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    // nlohmann prefixes "[json.exception.parse_error.101] parse error at line..., "
    auto pos = what.find(": ");
    std::string detail = pos == std::string::npos ? what : what.substr(pos + 2);
    ValidationReport report;
    report.errors.push_back(
        {IssueKind::syntax, fmt::format("line {}, column {}: {}", line, column, detail), {}});
    throw FormatError(std::move(report));
  }
}

Checked<Curriculum> curriculum_from_json(const Json& doc, ParseOptions options) {
  Decoder d(options);
  Checked<Curriculum> result;
  if (!d.expect_object(doc, "")) {
    result.report = std::move(d.report);
    return result;
  }
  d.check_fields(doc, "", {"format_version", "name", "courses", "requisites", "plans"});
  if (const Json* v = d.field(doc, "", "format_version", true)) {
    if (!v->is_string() || v->get<std::string>() != kFormatVersion)
      d.error("format_version", fmt::format("unknown format_version {} (expected \"{}\")",
                                            v->dump(), kFormatVersion));
  }
  auto name = d.string_field(doc, "", "name", true);

  std::vector<Course> courses;
  std::set<std::string, std::less<>> known;
  if (const Json* arr = d.field(doc, "", "courses", true); arr && d.expect_array(*arr, "courses")) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      if (auto course = decode_course(d, (*arr)[i], item("courses", i))) {
        known.insert(course->id);
        courses.push_back(std::move(*course));
      }
    }
  }

  std::vector<Requisite> requisites;
  if (const Json* arr = d.field(doc, "", "requisites", false);
      arr && d.expect_array(*arr, "requisites")) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const Json& r = (*arr)[i];
      auto path = item("requisites", i);
      if (!d.expect_object(r, path)) continue;
      d.check_fields(r, path, {"from", "to", "type"});
      auto from = d.string_field(r, path, "from", true);
      auto to = d.string_field(r, path, "to", true);
      auto kind = decode_kind(d, r, path, true);
      bool ok = from && to && kind;
      for (const auto& [key, id] : {std::pair{"from", from}, std::pair{"to", to}}) {
        if (id && !known.contains(*id)) {
          d.error(child(path, key), fmt::format("unknown course '{}'", *id),
                  IssueKind::unknown_course, {*id});
          ok = false;
        }
      }
      if (ok) requisites.push_back({*from, *to, *kind});
    }
  }

  std::vector<DegreePlan> plans;
  if (const Json* arr = d.field(doc, "", "plans", false); arr && d.expect_array(*arr, "plans")) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const Json& p = (*arr)[i];
      auto path = item("plans", i);
      if (!d.expect_object(p, path)) continue;
      d.check_fields(p, path, {"name", "terms"});
      auto plan_name = d.string_field(p, path, "name", true);
      const Json* terms = d.field(p, path, "terms", true);
      if (!plan_name || !terms) continue;
      auto terms_path = child(path, "terms");
      if (!d.expect_array(*terms, terms_path)) continue;
      DegreePlan plan{*plan_name, {}};
      bool ok = true;
      for (std::size_t t = 0; t < terms->size(); ++t) {
        const Json& term = (*terms)[t];
        auto term_path = item(terms_path, t);
        if (!d.expect_array(term, term_path)) {
          ok = false;
          continue;
        }
        plan.terms.emplace_back();
        for (std::size_t k = 0; k < term.size(); ++k) {
          if (!term[k].is_string()) {
            d.error(item(term_path, k),
                    fmt::format("expected a course id string, found {}", type_name(term[k])));
            ok = false;
            continue;
          }
          plan.terms.back().push_back(term[k].get<std::string>());
        }
      }
      if (ok) plans.push_back(std::move(plan));
    }
  }

  auto built = build_curriculum(name.value_or(""), std::move(courses), std::move(requisites),
                                std::move(plans));
  result.report = std::move(d.report);
  result.report.merge(built.report);
  if (result.report.ok()) result.value = std::move(built.value);
  return result;
}

Checked<Curriculum> parse_curriculum(std::string_view text, ParseOptions options) {
  try {
    return curriculum_from_json(parse_json_text(text), options);
  } catch (const FormatError& e) {
    return {std::nullopt, e.report()};
  }
}

Json curriculum_to_json(const Curriculum& c) {
  std::vector<Course> courses(c.courses().begin(), c.courses().end());
  std::sort(courses.begin(), courses.end(),
            [](const Course& a, const Course& b) { return a.id < b.id; });
  std::vector<Requisite> reqs(c.requisites().begin(), c.requisites().end());
  std::sort(reqs.begin(), reqs.end(), [](const Requisite& a, const Requisite& b) {
    return std::tuple(a.source, a.target, to_string(a.kind)) <
           std::tuple(b.source, b.target, to_string(b.kind));
  });

  Json doc;
  doc["format_version"] = kFormatVersion;
  doc["name"] = c.name();
  doc["courses"] = Json::array();
  for (const auto& course : courses) {
    Json j;
    j["id"] = course.id;
    j["name"] = course.name;
    j["credits"] = course.credits;
    if (course.canonical_name) j["canonical"] = *course.canonical_name;
    doc["courses"].push_back(std::move(j));
  }
  doc["requisites"] = Json::array();
  for (const auto& r : reqs) {
    Json j;
    j["from"] = r.source;
    j["to"] = r.target;
    j["type"] = to_string(r.kind);
    doc["requisites"].push_back(std::move(j));
  }
  doc["plans"] = Json::array();
  for (const auto& plan : c.plans()) doc["plans"].push_back(to_json(plan));
  return doc;
}

std::string serialize_curriculum(const Curriculum& c) {
  return curriculum_to_json(c).dump(2) + "\n";
}

Checked<PassRateTable> pass_rates_from_json(const Json& doc, ParseOptions options) {
  Decoder d(options);
  auto table = decode_pass_rates(d, doc, "");
  Checked<PassRateTable> result;
  result.report = std::move(d.report);
  if (result.report.ok()) result.value = std::move(table);
  return result;
}

Checked<PassRateTable> parse_pass_rates(std::string_view text, ParseOptions options) {
  try {
    return pass_rates_from_json(parse_json_text(text), options);
  } catch (const FormatError& e) {
    return {std::nullopt, e.report()};
  }
}

Json pass_rates_to_json(const PassRateTable& table) {
  Json doc;
  doc["default"] = table.default_rate;
  doc["overrides"] = Json::object();
  for (const auto& [id, p] : table.overrides) doc["overrides"][id] = p;
  return doc;
}

std::string serialize_pass_rates(const PassRateTable& table) {
  return pass_rates_to_json(table).dump(2) + "\n";
}

std::string export_dot(const Curriculum& c, const DotOptions& options) {
  const DegreePlan* plan = nullptr;
  if (options.cluster_by_plan) {
    plan = c.find_plan(*options.cluster_by_plan);
    if (!plan) throw CurriculumError(fmt::format("unknown plan '{}'", *options.cluster_by_plan));
  }
  std::vector<bool> blocked(c.size(), false);
  if (options.shade_blocked_by) {
    if (!c.contains(*options.shade_blocked_by))
      throw CurriculumError(
          fmt::format("unknown highlight course '{}'", *options.shade_blocked_by));
    blocked = reachable_mask(c, c.index_of(*options.shade_blocked_by), Direction::forward);
  }

  // longest vertex-count path ending at / starting from each course
  const auto& topo = c.topological_indices();
  std::vector<std::int64_t> lin(c.size(), 1), lout(c.size(), 1);
  for (std::size_t v : topo)
    for (const Arc& a : c.successors(v)) lin[a.to] = std::max(lin[a.to], lin[v] + 1);
  for (auto it = topo.rbegin(); it != topo.rend(); ++it)
    for (const Arc& a : c.successors(*it)) lout[*it] = std::max(lout[*it], lout[a.to] + 1);
  std::int64_t longest = 0;
  for (std::size_t v = 0; v < c.size(); ++v) longest = std::max(longest, lin[v]);

  const auto complexity = course_complexities(c);
  auto node = [&](std::size_t v) {
    const Course& course = c.courses()[v];
    std::string label = quote(course.id + "\n" + fmt::format("{} ({})", course.name, complexity[v]));
    std::string attrs = fmt::format("label={}", label);
    if (blocked[v]) attrs += ", style=filled, fillcolor=lightgray";
    return fmt::format("{} [{}];", quote(course.id), attrs);
  };

  std::ostringstream out;
  out << "digraph " << quote(c.name()) << " {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=box];\n";
  if (plan) {
    for (std::size_t t = 0; t < plan->terms.size(); ++t) {
      out << fmt::format("  subgraph term_{} {{\n", t + 1);
      out << "    cluster=true;\n";
      out << fmt::format("    label=\"Term {}\";\n", t + 1);
      for (const auto& id : plan->terms[t]) out << "    " << node(c.index_of(id)) << "\n";
      out << "  }\n";
    }
  } else {
    for (std::size_t v = 0; v < c.size(); ++v) out << "  " << node(v) << "\n";
  }
  for (std::size_t v = 0; v < c.size(); ++v) {
    for (const Arc& a : c.successors(v)) {
      std::vector<std::string_view> style;
      if (a.kind == RequisiteKind::coreq) style.push_back("dashed");
      if (a.kind == RequisiteKind::strict_coreq) style.push_back("dotted");
      if (options.highlight_longest_paths && lin[v] + lout[a.to] == longest)
        style.push_back("bold");
      out << "  " << quote(c.courses()[v].id) << " -> " << quote(c.courses()[a.to].id);
      if (!style.empty()) out << fmt::format(" [style=\"{}\"]", fmt::join(style, ","));
      out << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

Json to_json(const Issue& issue) {
  Json j;
  j["kind"] = to_string(issue.kind);
  j["message"] = issue.message;
  j["courses"] = issue.courses;
  return j;
}

Json to_json(const ValidationReport& report) {
  Json j;
  j["ok"] = report.ok();
  j["errors"] = issues_json(report.errors);
  j["warnings"] = issues_json(report.warnings);
  return j;
}

Json to_json(const MetricsReport& report) {
  Json j;
  j["complexity"] = report.complexity;
  j["delay_total"] = report.delay_total;
  j["blocking_total"] = report.blocking_total;
  j["reachability_total"] = report.reachability_total;
  j["longest_path_length"] = report.longest_path_length;
  j["longest_paths"] = report.longest_paths;
  j["longest_paths_truncated"] = report.longest_paths_truncated;
  j["courses"] = Json::array();
  for (const auto& m : report.courses) {
    Json cj;
    cj["id"] = m.id;
    cj["delay"] = m.delay;
    cj["blocking"] = m.blocking;
    cj["reachability"] = m.reachability;
    cj["centrality"] = number_or_wide(m.centrality);
    cj["complexity"] = m.complexity;
    j["courses"].push_back(std::move(cj));
  }
  return j;
}

Json to_json(const SimResult& result) {
  const bool mc = result.mode == SimMode::monte_carlo;
  Json j;
  j["mode"] = to_string(result.mode);
  j["plan"] = result.plan;
  j["plan_length"] = result.plan_length;
  j["horizon_terms"] = result.horizon_terms;
  j["grad_rate"] = result.grad_rate;
  if (mc) {
    j["students"] = result.students;
    j["seed"] = result.seed;
    j["grad_std_error"] = result.grad_std_error;
  }
  j["courses"] = Json::array();
  for (std::size_t v = 0; v < result.course_ids.size(); ++v) {
    Json cj;
    cj["id"] = result.course_ids[v];
    cj["cumulative"] = result.cumulative[v];
    if (mc) cj["std_error"] = result.cumulative_std_error[v];
    j["courses"].push_back(std::move(cj));
  }
  return j;
}

Json to_json(const PlanProfile& profile) {
  Json j;
  j["term_credits"] = profile.term_credits;
  j["term_complexity"] = profile.term_complexity;
  j["max_term_complexity"] = profile.max_term_complexity;
  j["complexity_variance"] = profile.complexity_variance;
  return j;
}

Json to_json(const DegreePlan& plan) {
  Json j;
  j["name"] = plan.name;
  j["terms"] = plan.terms;
  return j;
}

Json to_json(const Edit& e) {
  Json j;
  std::visit(
      [&](const auto& op) {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, edit::AddCourse>) {
          j["op"] = "add_course";
          Json course;
          course["id"] = op.course.id;
          course["name"] = op.course.name;
          course["credits"] = op.course.credits;
          if (op.course.canonical_name) course["canonical"] = *op.course.canonical_name;
          j["course"] = std::move(course);
          if (op.term) j["term"] = *op.term;
        } else if constexpr (std::is_same_v<T, edit::RemoveCourse>) {
          j["op"] = "remove_course";
          j["id"] = op.id;
        } else if constexpr (std::is_same_v<T, edit::AddRequisite>) {
          j["op"] = "add_requisite";
          j["from"] = op.requisite.source;
          j["to"] = op.requisite.target;
          j["type"] = to_string(op.requisite.kind);
        } else if constexpr (std::is_same_v<T, edit::RemoveRequisite>) {
          j["op"] = "remove_requisite";
          j["from"] = op.source;
          j["to"] = op.target;
          if (op.kind) j["type"] = to_string(*op.kind);
        } else {
          j["op"] = "move_course";
          j["plan"] = op.plan;
          j["id"] = op.id;
          j["term"] = op.term;
        }
      },
      e);
  return j;
}

std::vector<Edit> edits_from_json(const Json& doc) {
  Decoder d(ParseOptions{});
  std::vector<Edit> edits;
  if (d.expect_array(doc, "edits")) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const Json& e = doc[i];
      auto path = item("edits", i);
      if (!d.expect_object(e, path)) continue;
      auto op = d.string_field(e, path, "op", true);
      if (!op) continue;
      if (*op == "add_course") {
        d.check_fields(e, path, {"op", "course", "term"});
        const Json* cj = d.field(e, path, "course", true);
        auto course = cj ? decode_course(d, *cj, child(path, "course")) : std::nullopt;
        std::optional<std::int64_t> term;
        if (e.contains("term")) {
          term = d.integer_field(e, path, "term", true, 0);
          if (!term) continue;
        }
        if (course) {
          edit::AddCourse add{std::move(*course), std::nullopt};
          if (term) add.term = static_cast<std::size_t>(*term);
          edits.emplace_back(std::move(add));
        }
      } else if (*op == "remove_course") {
        d.check_fields(e, path, {"op", "id"});
        if (auto id = d.string_field(e, path, "id", true)) edits.emplace_back(edit::RemoveCourse{*id});
      } else if (*op == "add_requisite" || *op == "remove_requisite") {
        d.check_fields(e, path, {"op", "from", "to", "type"});
        auto from = d.string_field(e, path, "from", true);
        auto to = d.string_field(e, path, "to", true);
        bool has_type = e.contains("type");
        auto kind = has_type ? decode_kind(d, e, path, true) : std::nullopt;
        if (!from || !to || (has_type && !kind)) continue;
        if (*op == "add_requisite")
          edits.emplace_back(
              edit::AddRequisite{{*from, *to, kind.value_or(RequisiteKind::prereq)}});
        else
          edits.emplace_back(edit::RemoveRequisite{*from, *to, kind});
      } else if (*op == "move_course") {
        d.check_fields(e, path, {"op", "plan", "id", "term"});
        auto plan = d.string_field(e, path, "plan", true);
        auto id = d.string_field(e, path, "id", true);
        auto term = d.integer_field(e, path, "term", true, 0);
        if (plan && id && term)
          edits.emplace_back(edit::MoveCourse{*plan, *id, static_cast<std::size_t>(*term)});
      } else {
        d.error(child(path, "op"), fmt::format("unknown edit operation '{}'", *op));
      }
    }
  }
  if (!d.report.ok()) throw FormatError(std::move(d.report));
  return edits;
}

SimulationConfig simulation_config_from_json(const Json& doc, const Curriculum& c) {
  Decoder d(ParseOptions{});
  SimulationConfig cfg;
  if (!d.expect_object(doc, "")) throw FormatError(std::move(d.report));
  d.check_fields(doc, "", {"plan", "pass_rates", "mode", "horizon_terms", "horizon_multiplier",
                           "students", "seed", "threads", "policy"});
  if (auto plan = d.string_field(doc, "", "plan", false)) cfg.plan = *plan;
  if (const Json* rates = d.field(doc, "", "pass_rates", false)) {
    if (rates->is_number()) {
      if (auto p = d.rate(*rates, "pass_rates")) cfg.pass_rates = PassRateTable::uniform(*p);
    } else if (auto table = decode_pass_rates(d, *rates, "pass_rates")) {
      cfg.pass_rates = std::move(*table);
    }
  }
  if (auto mode = d.string_field(doc, "", "mode", false)) {
    if (auto m = sim_mode_from_string(*mode))
      cfg.mode = *m;
    else
      d.error("mode", fmt::format("unknown mode '{}' (expected analytic, mc or exact)", *mode));
  }
  auto terms = d.integer_field(doc, "", "horizon_terms", false, 1);
  auto multiplier = d.number_field(doc, "", "horizon_multiplier", false);
  if (doc.contains("horizon_terms") && doc.contains("horizon_multiplier"))
    d.error("horizon_multiplier", "give either horizon_terms or horizon_multiplier, not both");
  double factor = 2.0;
  if (multiplier) {
    if (*multiplier > 0.0)
      factor = *multiplier;
    else
      d.error("horizon_multiplier", "must be positive");
  }
  if (auto students = d.integer_field(doc, "", "students", false, 1))
    cfg.students = static_cast<std::uint64_t>(*students);
  if (const Json* seed = d.field(doc, "", "seed", false)) {
    if (seed->is_number_unsigned())
      cfg.seed = seed->get<std::uint64_t>();
    else
      d.error("seed", "expected a non-negative integer");
  }
  if (auto threads = d.integer_field(doc, "", "threads", false, 0))
    cfg.threads = static_cast<unsigned>(std::min<std::int64_t>(*threads, 1024));
  if (const Json* policy = d.field(doc, "", "policy", false); policy && d.expect_object(*policy, "policy")) {
    d.check_fields(*policy, "policy", {"extra_new_courses_per_term", "retakes_capped", "priority"});
    if (auto extra = d.integer_field(*policy, "policy", "extra_new_courses_per_term", false, 0))
      cfg.policy.extra_new_courses_per_term = static_cast<int>(std::min<std::int64_t>(*extra, 1 << 20));
    if (auto capped = d.bool_field(*policy, "policy", "retakes_capped"))
      cfg.policy.retakes_capped = *capped;
    if (auto priority = d.string_field(*policy, "policy", "priority", false)) {
      if (*priority == "plan_term")
        cfg.policy.priority = NewCoursePriority::plan_term;
      else if (*priority == "complexity")
        cfg.policy.priority = NewCoursePriority::complexity;
      else
        d.error("policy.priority",
                fmt::format("unknown priority '{}' (expected plan_term or complexity)", *priority));
    }
  }
  if (!d.report.ok()) throw FormatError(std::move(d.report));

  const DegreePlan* plan = c.find_plan(cfg.plan);
  const int length = plan ? static_cast<int>(plan->terms.size()) : 0;
  if (terms)
    cfg.horizon_terms = static_cast<int>(std::min<std::int64_t>(*terms, 1 << 16));
  else
    cfg.horizon_terms =
        static_cast<int>(std::ceil(factor * length - 1e-9));
  return cfg;
}

Json to_json(const SimulationConfig& cfg) {
  Json j;
  j["plan"] = cfg.plan;
  j["pass_rates"] = pass_rates_to_json(cfg.pass_rates);
  j["mode"] = to_string(cfg.mode);
  j["horizon_terms"] = cfg.horizon_terms;
  j["students"] = cfg.students;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  Json policy;
  policy["extra_new_courses_per_term"] = cfg.policy.extra_new_courses_per_term;
  policy["retakes_capped"] = cfg.policy.retakes_capped;
  policy["priority"] =
      cfg.policy.priority == NewCoursePriority::plan_term ? "plan_term" : "complexity";
  j["policy"] = std::move(policy);
  return j;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("error reading '{}'", path.string()));
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError(fmt::format("error writing '{}'", path.string()));
}

}  // namespace curricula
