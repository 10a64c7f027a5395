#pragma once

// Curriculum graph model: courses, requisites, degree plans, validation and
// what-if edits. A Curriculum can only be obtained through build_curriculum()
// or apply_edit(), so every instance in circulation is a validated DAG.

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace curricula {

struct Course {
  std::string id;
  std::string name;
  double credits = 3.0;
  std::optional<std::string> canonical_name;

  bool operator==(const Course&) const = default;
};

enum class RequisiteKind { prereq, coreq, strict_coreq };

std::string_view to_string(RequisiteKind kind);
std::optional<RequisiteKind> requisite_kind_from_string(std::string_view text);

struct Requisite {
  std::string source;
  std::string target;
  RequisiteKind kind = RequisiteKind::prereq;

  bool operator==(const Requisite&) const = default;
};

struct DegreePlan {
  std::string name;
  std::vector<std::vector<std::string>> terms;

  bool operator==(const DegreePlan&) const = default;
};

enum class IssueKind {
  cycle,
  duplicate_course,
  invalid_course,
  unknown_course,
  invalid_requisite,
  duplicate_requisite,
  plan_completeness,
  plan_order,
  capacity,
  forward_edge,
  syntax,
  schema,
};

std::string_view to_string(IssueKind kind);

struct Issue {
  IssueKind kind;
  std::string message;
  // Course ids involved: the cycle for `cycle`, the implied path for
  // `forward_edge`, the offending ids otherwise.
  std::vector<std::string> courses;
};

struct ValidationReport {
  std::vector<Issue> errors;
  std::vector<Issue> warnings;

  bool ok() const { return errors.empty(); }
  void merge(const ValidationReport& other);
};

/// Thrown when an operation is called with arguments outside its contract
/// (unknown course id, unknown plan, ...).
class CurriculumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adjacency entry of the internal index graph.
struct Arc {
  std::size_t to;
  RequisiteKind kind;
};

class Curriculum {
 public:
  const std::string& name() const { return name_; }
  std::span<const Course> courses() const { return courses_; }
  std::span<const Requisite> requisites() const { return requisites_; }
  std::span<const DegreePlan> plans() const { return plans_; }
  std::size_t size() const { return courses_.size(); }

  /// Warnings recorded at construction time (forward edges).
  const std::vector<Issue>& warnings() const { return warnings_; }

  bool contains(std::string_view id) const;
  /// Index of a course in courses(); throws CurriculumError if unknown.
  std::size_t index_of(std::string_view id) const;
  const Course& course(std::string_view id) const { return courses_[index_of(id)]; }

  const DegreePlan* find_plan(std::string_view name) const;
  const DegreePlan& plan(std::string_view name) const;

  /// Index-space adjacency; every requisite contributes one arc in its
  /// stated direction, whatever its kind.
  std::span<const Arc> successors(std::size_t v) const { return out_[v]; }
  std::span<const Arc> predecessors(std::size_t v) const { return in_[v]; }

  /// Indices in a deterministic topological order (ties by course id).
  const std::vector<std::size_t>& topological_indices() const { return topo_; }

 private:
  friend struct CurriculumBuilder;
  Curriculum() = default;

  std::string name_;
  std::vector<Course> courses_;
  std::vector<Requisite> requisites_;
  std::vector<DegreePlan> plans_;
  std::vector<Issue> warnings_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<Arc>> out_;
  std::vector<std::vector<Arc>> in_;
  std::vector<std::size_t> topo_;
};

/// Value-or-report result of anything that validates.
template <class T>
struct Checked {
  std::optional<T> value;
  ValidationReport report;

  explicit operator bool() const { return value.has_value(); }
  const T& operator*() const { return *value; }
  const T* operator->() const { return &*value; }
};

Checked<Curriculum> build_curriculum(std::string name, std::vector<Course> courses,
                                     std::vector<Requisite> requisites,
                                     std::vector<DegreePlan> plans = {});

enum class Direction { forward, backward };

std::set<std::string> reachable_set(const Curriculum& c, std::string_view id, Direction direction);

/// Index-space variant; `v` itself is never part of the result.
std::vector<bool> reachable_mask(const Curriculum& c, std::size_t v, Direction direction);

std::vector<std::string> topological_order(const Curriculum& c);

/// Checks a plan against a curriculum's courses and requisites. Reports
/// completeness (every course exactly once, no unknown ids) and ordering
/// violations. Used by build_curriculum for stored plans.
ValidationReport check_plan(const Curriculum& c, const DegreePlan& plan);

namespace edit {

struct AddCourse {
  Course course;
  // 0-based term for every stored plan; appended to the last term if unset.
  std::optional<std::size_t> term;
};
struct RemoveCourse {
  std::string id;
};
struct AddRequisite {
  Requisite requisite;
};
struct RemoveRequisite {
  std::string source;
  std::string target;
  std::optional<RequisiteKind> kind;
};
struct MoveCourse {
  std::string plan;
  std::string id;
  std::size_t term;  // 0-based
};

}  // namespace edit

using Edit = std::variant<edit::AddCourse, edit::RemoveCourse, edit::AddRequisite,
                          edit::RemoveRequisite, edit::MoveCourse>;

/// Applies one edit and re-validates. The input curriculum is untouched.
/// Unknown ids and plan names are reported in the ValidationReport.
Checked<Curriculum> apply_edit(const Curriculum& c, const Edit& e);

/// Applies edits in order, stopping at the first one that fails.
Checked<Curriculum> apply_edits(const Curriculum& c, std::span<const Edit> edits);

}  // namespace curricula
