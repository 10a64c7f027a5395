#pragma once

// Canonical curricula used throughout the tests, the acceptance suite and
// the CLI examples.
//
//   EMPTY4, FIG4B..FIG4G  all balanced four-course, two-term curricula
//                         (v1,v2 in term 1; v3,v4 in term 2) in order of
//                         increasing structural complexity 4..12
//   C1, C2                four-course, three-term curricula used to
//                         illustrate delay, blocking and centrality
//   CHAIN4, CHAIN5, ENGR5 engineering math design patterns: calculus-ready,
//                         precalculus prepended, and the Engineering 101
//                         redesign

#include <string>
#include <string_view>
#include <vector>

#include "curricula/core.hpp"

namespace curricula::fixtures {

std::vector<std::string> names();

/// Throws CurriculumError for an unknown name. Names are case-insensitive;
/// FIG4A is accepted for EMPTY4.
Curriculum get(std::string_view name);

}  // namespace curricula::fixtures
