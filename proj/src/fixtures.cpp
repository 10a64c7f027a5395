#include "curricula/fixtures.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

#include <fmt/format.h>

namespace curricula::fixtures {
namespace {

struct Spec {
  const char* name;
  const char* title;
  std::vector<std::pair<const char*, const char*>> courses;  // id, name
  std::vector<std::pair<const char*, const char*>> edges;    // prereqs
  std::vector<std::vector<std::string>> plan;
};

const std::vector<Spec>& specs() {
  static const std::vector<std::pair<const char*, const char*>> four = {
      {"v1", "Course 1"}, {"v2", "Course 2"}, {"v3", "Course 3"}, {"v4", "Course 4"}};
  static const std::vector<std::vector<std::string>> two_terms = {{"v1", "v2"}, {"v3", "v4"}};
  static const std::vector<Spec> all = {
      {"EMPTY4", "Four courses, no requisites", four, {}, two_terms},
      {"FIG4B", "Four courses, one requisite", four, {{"v1", "v3"}}, two_terms},
      {"FIG4C", "Four courses, shared target", four, {{"v1", "v3"}, {"v2", "v3"}}, two_terms},
      {"FIG4D", "Four courses, shared source", four, {{"v1", "v3"}, {"v1", "v4"}}, two_terms},
      {"FIG4E", "Four courses, matching", four, {{"v1", "v3"}, {"v2", "v4"}}, two_terms},
      {"FIG4F",
       "Four courses, three requisites",
       four,
       {{"v1", "v3"}, {"v1", "v4"}, {"v2", "v4"}},
       two_terms},
      {"FIG4G",
       "Four courses, complete bipartite",
       four,
       {{"v1", "v3"}, {"v1", "v4"}, {"v2", "v3"}, {"v2", "v4"}},
       two_terms},
      {"C1",
       "Curriculum c1",
       four,
       {{"v1", "v2"}, {"v2", "v4"}, {"v1", "v3"}},
       {{"v1"}, {"v2", "v3"}, {"v4"}}},
      {"C2",
       "Curriculum c2",
       four,
       {{"v1", "v2"}, {"v2", "v3"}, {"v2", "v4"}},
       {{"v1"}, {"v2"}, {"v3", "v4"}}},
      {"CHAIN4",
       "Calculus-ready engineering pattern",
       {{"v1", "Calculus I"},
        {"v2", "Calculus II"},
        {"v3", "Differential Equations"},
        {"v4", "Sophomore Engineering"}},
       {{"v1", "v2"}, {"v2", "v3"}, {"v3", "v4"}},
       {{"v1"}, {"v2"}, {"v3"}, {"v4"}}},
      {"CHAIN5",
       "Precalculus prepended engineering pattern",
       {{"Precalculus", "Precalculus"},
        {"CalcI", "Calculus I"},
        {"CalcII", "Calculus II"},
        {"DiffEq", "Differential Equations"},
        {"Disciplinary", "Sophomore Engineering"}},
       {{"Precalculus", "CalcI"},
        {"CalcI", "CalcII"},
        {"CalcII", "DiffEq"},
        {"DiffEq", "Disciplinary"}},
       {{"Precalculus"}, {"CalcI"}, {"CalcII"}, {"DiffEq"}, {"Disciplinary"}}},
      {"ENGR5",
       "Engineering 101 redesign pattern",
       {{"Engr101", "Engineering 101"},
        {"CalcI", "Calculus I"},
        {"CalcII", "Calculus II"},
        {"DiffEq", "Differential Equations"},
        {"Disciplinary", "Sophomore Engineering"}},
       {{"Engr101", "CalcI"}, {"CalcI", "CalcII"}, {"CalcII", "DiffEq"}, {"Engr101", "Disciplinary"}},
       {{"Engr101"}, {"CalcI", "Disciplinary"}, {"CalcII"}, {"DiffEq"}}},
  };
  return all;
}

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  return out;
}

}  // namespace

std::vector<std::string> names() {
  std::vector<std::string> out;
  for (const auto& s : specs()) out.emplace_back(s.name);
  return out;
}

Curriculum get(std::string_view name) {
  std::string key = upper(name);
  if (key == "FIG4A") key = "EMPTY4";  // panel (a) of the four-course family
  for (const auto& s : specs()) {
    if (key != s.name) continue;
    std::vector<Course> courses;
    for (auto [id, title] : s.courses) courses.push_back({id, title, 3.0, std::nullopt});
    std::vector<Requisite> reqs;
    for (auto [from, to] : s.edges) reqs.push_back({from, to, RequisiteKind::prereq});
    auto built = build_curriculum(s.title, std::move(courses), std::move(reqs),
                                  {DegreePlan{"default", s.plan}});
    if (!built) throw CurriculumError(fmt::format("fixture {} failed validation", s.name));
    return *built.value;
  }
  throw CurriculumError(fmt::format("unknown fixture '{}'", name));
}

}  // namespace curricula::fixtures
