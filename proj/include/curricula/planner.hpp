#pragma once

// Degree-plan construction under term and credit limits.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curricula/core.hpp"

namespace curricula {

struct PlanConstraints {
  int num_terms = 8;
  double max_credits_per_term = std::numeric_limits<double>::infinity();
  double min_credits_per_term = 0.0;
};

struct PlanProfile {
  std::vector<double> term_credits;
  std::vector<std::int64_t> term_complexity;
  std::int64_t max_term_complexity = 0;
  double complexity_variance = 0.0;  // population variance over terms
};

enum class PlanStrategy {
  frontload,  // most complex courses as early as possible
  balanced,   // frontload, then spread complexity to lower the peak term
};

std::optional<PlanStrategy> plan_strategy_from_string(std::string_view text);

/// No plan satisfies the constraints, or the heuristic could not find one.
class InfeasiblePlan : public CurriculumError {
 public:
  using CurriculumError::CurriculumError;
};

DegreePlan generate_plan(const Curriculum& c, const PlanConstraints& constraints,
                         PlanStrategy strategy, std::string name = "generated");

ValidationReport validate_plan(const Curriculum& c, const DegreePlan& plan,
                               const PlanConstraints& constraints);

/// Throws CurriculumError if the plan is not valid for the curriculum.
PlanProfile plan_profile(const Curriculum& c, const DegreePlan& plan);

}  // namespace curricula
