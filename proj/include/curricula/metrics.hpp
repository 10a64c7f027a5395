#pragma once

// Structural complexity factors of a curriculum graph.
//
// Per course v:
//   delay        vertex count of the longest source-to-sink path through v
//   blocking     number of courses reachable from v
//   reachability number of courses from which v is reachable
//   centrality   summed vertex counts of every source-to-sink path that has
//                v as an interior vertex
//   complexity   delay + blocking
//
// The curriculum totals are sums over courses; the structural complexity of
// the whole curriculum is total delay + total blocking. All requisite kinds
// count as directed edges in their stated direction.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curricula/core.hpp"

namespace curricula {

/// Path counts grow exponentially with curriculum depth; 128 bits covers
/// any desk-scale curriculum.
using WideCount = unsigned __int128;

std::string to_string(WideCount value);

struct CourseMetrics {
  std::string id;
  std::int64_t delay = 0;
  std::int64_t blocking = 0;
  std::int64_t reachability = 0;
  WideCount centrality = 0;
  std::int64_t complexity = 0;
};

struct MetricsReport {
  std::vector<CourseMetrics> courses;  // curriculum course order
  std::int64_t delay_total = 0;
  std::int64_t blocking_total = 0;
  std::int64_t reachability_total = 0;
  std::int64_t complexity = 0;
  std::int64_t longest_path_length = 0;
  std::vector<std::vector<std::string>> longest_paths;
  bool longest_paths_truncated = false;

  const CourseMetrics& course(std::string_view id) const;
};

std::int64_t delay_factor(const Curriculum& c, std::string_view id);
std::int64_t blocking_factor(const Curriculum& c, std::string_view id);
std::int64_t reachability_factor(const Curriculum& c, std::string_view id);
WideCount centrality(const Curriculum& c, std::string_view id);

/// Number of term assignments over `num_terms` terms that respect every
/// requisite (prereq strictly earlier, coreq same or earlier, strict coreq
/// same term), optionally with at most `max_per_term` courses in a term.
/// The plan the curriculum ships with is one of the counted assignments.
WideCount degrees_of_freedom(const Curriculum& c, int num_terms,
                             std::optional<int> max_per_term = std::nullopt);

/// Vertex count of the longest path.
std::int64_t longest_path_length(const Curriculum& c);

/// Every maximal-length path, capped at `max_paths`.
std::vector<std::vector<std::string>> longest_paths(const Curriculum& c,
                                                    std::size_t max_paths = 1000,
                                                    bool* truncated = nullptr);

MetricsReport curriculum_metrics(const Curriculum& c, std::size_t max_paths = 1000);

/// Per-course complexity indexed like c.courses().
std::vector<std::int64_t> course_complexities(const Curriculum& c);

}  // namespace curricula
