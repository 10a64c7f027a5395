#pragma once

// Student-progression simulation under per-course pass rates.
//
// Every course is attempted in successive terms until it is passed (no
// stop-outs). Courses without requisites get a fixed first-attempt term from
// the degree plan plus `extra_new_courses_per_term` slots for pulling later
// courses forward; courses with requisites are attempted as soon as their
// requisites allow.
//
// Three modes:
//   analytic     per-course cumulative pass fractions by a gated recurrence;
//                the graduation rate is the product of the per-course values
//   monte_carlo  independent per-student trajectories
//   exact        the distribution over passed-course subsets, evolved term by
//                term (n <= 20)
// analytic treats courses as independent, so on gated curricula its
// graduation rate sits below the joint value the other two modes compute.

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curricula/core.hpp"

namespace curricula {

struct PassRateTable {
  double default_rate = 0.5;
  std::map<std::string, double, std::less<>> overrides;

  double rate(std::string_view id) const;
  static PassRateTable uniform(double p) { return PassRateTable{p, {}}; }
};

enum class NewCoursePriority {
  plan_term,   // plan term ascending, complexity descending, id
  complexity,  // complexity descending, plan term ascending, id
};

struct EnrollmentPolicy {
  int extra_new_courses_per_term = 1;
  // When set, retakes share the term's slots with new courses (per-student
  // modes only).
  bool retakes_capped = false;
  NewCoursePriority priority = NewCoursePriority::plan_term;
};

enum class SimMode { analytic, monte_carlo, exact };

std::string_view to_string(SimMode mode);
std::optional<SimMode> sim_mode_from_string(std::string_view text);

inline constexpr std::size_t kExactModeMaxCourses = 20;

struct SimulationConfig {
  std::string plan = "default";
  PassRateTable pass_rates;
  EnrollmentPolicy policy;
  int horizon_terms = 0;
  SimMode mode = SimMode::analytic;
  std::uint64_t students = 10000;  // monte_carlo
  std::uint64_t seed = 1;          // monte_carlo
  unsigned threads = 0;            // monte_carlo; 0 = hardware concurrency
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct SimResult {
  SimMode mode = SimMode::analytic;
  std::string plan;
  int plan_length = 0;
  int horizon_terms = 0;
  std::vector<std::string> course_ids;
  // cumulative[v][t]: fraction of students that passed course v by the end
  // of term t+1.
  std::vector<std::vector<double>> cumulative;
  std::vector<double> grad_rate;
  // monte_carlo only
  std::uint64_t students = 0;
  std::uint64_t seed = 0;
  std::vector<double> grad_std_error;
  std::vector<std::vector<double>> cumulative_std_error;
};

class SimulationError : public CurriculumError {
 public:
  using CurriculumError::CurriculumError;
};

/// The configured deadline passed before the run finished.
class BudgetExceeded : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

/// First-attempt term (1-based) of every course without requisites; courses
/// with requisites map to std::nullopt (their attempts are gated).
std::map<std::string, std::optional<int>> first_attempt_schedule(const Curriculum& c,
                                                                 const DegreePlan& plan,
                                                                 const EnrollmentPolicy& policy);

SimResult simulate(const Curriculum& c, const SimulationConfig& cfg);

/// Graduation rate at term ceil(multiplier * plan_length).
double completion_at(const SimResult& r, double multiplier, int plan_length);

}  // namespace curricula
