#pragma once

// Complexity-versus-completion experiments over spaces of balanced curricula.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "curricula/core.hpp"
#include "curricula/simulator.hpp"

namespace curricula {

class ExperimentError : public CurriculumError {
 public:
  using CurriculumError::CurriculumError;
};

struct EnumerationOptions {
  bool include_coreqs = false;
  // Collapse curricula that differ only by relabeling courses within a term.
  bool dedupe = true;
  // Drop curricula containing a redundant (transitively implied) requisite.
  bool exclude_forward_edges = false;
};

struct SpaceMember {
  // Lexicographically minimal requisite encoding over within-term
  // relabelings; one digit per candidate course pair (0 none, 1 prereq,
  // 2 coreq from the lower to the higher index, 3 coreq the other way).
  std::string canonical_id;
  Curriculum curriculum;  // carries the balanced plan as "default"
};

struct CurriculumSpace {
  int n_courses = 0;
  int n_terms = 0;
  EnumerationOptions options;
  std::vector<SpaceMember> members;  // ordered by canonical_id
};

/// All curricula of `n_courses` courses spread evenly over `n_terms` terms
/// (courses v1..vn, term k holding the k-th block) whose requisites run from
/// an earlier term to a later one, plus same-term co-requisites when
/// requested.
CurriculumSpace enumerate_balanced(int n_courses, int n_terms, EnumerationOptions options = {});

struct StudyOptions {
  double pass_rate = 0.5;
  int horizon_terms = 0;
  SimMode mode = SimMode::analytic;
  EnrollmentPolicy policy;
  std::uint64_t students = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

struct StudyPoint {
  std::string canonical_id;
  std::int64_t complexity = 0;
  std::int64_t delay_total = 0;
  std::int64_t blocking_total = 0;
  double completion = 0.0;
};

/// Structural complexity and graduation rate at the horizon for every
/// member, in member order.
std::vector<StudyPoint> complexity_completion_study(const CurriculumSpace& space,
                                                    const StudyOptions& options);

struct RegressionResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> points;
};

/// Ordinary least squares y = intercept + slope * x. Constant y yields
/// slope 0 and r^2 = 0. Throws ExperimentError when x has no variance.
RegressionResult linear_fit(std::vector<std::pair<double, double>> points);

/// Fit of completion against structural complexity.
RegressionResult fit_study(const std::vector<StudyPoint>& study);

/// CSV with header canonical_id,h,delay_total,blocking_total,completion.
std::string study_csv(const std::vector<StudyPoint>& study);

/// Graduation rate at `horizon_terms` for each uniform pass rate.
std::vector<std::pair<double, double>> pass_rate_sweep(const Curriculum& c, const std::string& plan,
                                                       const std::vector<double>& rates,
                                                       int horizon_terms,
                                                       SimMode mode = SimMode::analytic);

}  // namespace curricula
