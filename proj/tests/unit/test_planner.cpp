#include <doctest.h>

#include <numeric>
#include <random>

#include "curricula/fixtures.hpp"
#include "curricula/metrics.hpp"
#include "curricula/planner.hpp"
#include "oracles.hpp"
#include "properties.hpp"

using namespace curricula;

namespace {

using Terms = std::vector<std::vector<std::string>>;

std::size_t count_kind(const ValidationReport& r, IssueKind kind) {
  std::size_t n = 0;
  for (const auto& i : r.errors) n += i.kind == kind;
  return n;
}

Terms sorted_terms(Terms t) {
  for (auto& term : t) std::sort(term.begin(), term.end());
  return t;
}

int term_of(const DegreePlan& p, const std::string& id) {
  for (std::size_t t = 0; t < p.terms.size(); ++t)
    for (const auto& x : p.terms[t])
      if (x == id) return static_cast<int>(t);
  return -1;
}

}  // namespace

TEST_CASE("strategy names") {
  CHECK(plan_strategy_from_string("frontload") == PlanStrategy::frontload);
  CHECK(plan_strategy_from_string("balanced") == PlanStrategy::balanced);
  CHECK_FALSE(plan_strategy_from_string("random"));
}

TEST_CASE("a chain with one course per term has one plan") {
  auto chain = fixtures::get("CHAIN4");
  for (auto strategy : {PlanStrategy::frontload, PlanStrategy::balanced}) {
    auto plan = generate_plan(chain, {4, 3.0, 0.0}, strategy);
    CHECK(plan.terms == Terms{{"v1"}, {"v2"}, {"v3"}, {"v4"}});
    CHECK(plan.name == "generated");
  }
}

TEST_CASE("EMPTY4 in two terms of six credits splits two and two") {
  auto plan = generate_plan(fixtures::get("EMPTY4"), {2, 6.0, 0.0}, PlanStrategy::balanced, "split");
  REQUIRE(plan.terms.size() == 2);
  CHECK(plan.terms[0].size() == 2);
  CHECK(plan.terms[1].size() == 2);
  CHECK(plan.name == "split");
}

TEST_CASE("C2 frontloaded over three terms") {
  auto plan = generate_plan(fixtures::get("C2"), {3}, PlanStrategy::frontload);
  CHECK(sorted_terms(plan.terms) == Terms{{"v1"}, {"v2"}, {"v3", "v4"}});
}

TEST_CASE("frontload puts the most complex courses first") {
  // c0 has no requisites but unlocks a long chain; c5 and c6 are isolated
  auto c = props::build(oracle::Graph{7, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}});
  auto plan = generate_plan(c, {5, 6.0, 0.0}, PlanStrategy::frontload);
  CHECK(term_of(plan, "c0") == 0);
  CHECK(term_of(plan, "c4") == 4);
}

TEST_CASE("infeasible constraints") {
  auto chain = fixtures::get("CHAIN4");
  CHECK_THROWS_AS(generate_plan(chain, {3}, PlanStrategy::frontload), InfeasiblePlan);
  CHECK_THROWS_AS(generate_plan(fixtures::get("EMPTY4"), {1, 6.0, 0.0}, PlanStrategy::frontload), InfeasiblePlan);
  CHECK_THROWS_AS(generate_plan(chain, {4, 2.0, 0.0}, PlanStrategy::frontload), InfeasiblePlan);
  CHECK_THROWS_AS(generate_plan(chain, {0}, PlanStrategy::frontload), InfeasiblePlan);
  CHECK_THROWS_AS(generate_plan(chain, {4, 0.0, 0.0}, PlanStrategy::frontload), InfeasiblePlan);
  CHECK_THROWS_AS(generate_plan(chain, {4, 3.0, -1.0}, PlanStrategy::frontload), InfeasiblePlan);
  try {
    generate_plan(chain, {2}, PlanStrategy::frontload);
    FAIL("expected InfeasiblePlan");
  } catch (const InfeasiblePlan& e) {
    CHECK(std::string(e.what()).find("4") != std::string::npos);
  }
}

TEST_CASE("strict co-requisites are placed together") {
  auto c = props::build(oracle::Graph{4, {{0, 1, RequisiteKind::strict_coreq}, {1, 2}, {3, 2, RequisiteKind::coreq}}});
  for (auto strategy : {PlanStrategy::frontload, PlanStrategy::balanced}) {
    auto plan = generate_plan(c, {3, 9.0, 0.0}, strategy);
    CHECK(term_of(plan, "c0") == term_of(plan, "c1"));
    CHECK(term_of(plan, "c2") > term_of(plan, "c1"));
    CHECK(term_of(plan, "c3") <= term_of(plan, "c2"));
    CHECK(validate_plan(c, plan, {3, 9.0, 0.0}).ok());
  }
  // a unit heavier than the term limit cannot be placed
  CHECK_THROWS_AS(generate_plan(c, {3, 3.0, 0.0}, PlanStrategy::frontload), InfeasiblePlan);
}

TEST_CASE("a prerequisite inside a strict co-requisite group has no plan") {
  // c0 before c2, c2 no later than c1, c0 and c1 in one term
  auto c = props::build(oracle::Graph{3, {{0, 2}, {2, 1, RequisiteKind::coreq}, {0, 1, RequisiteKind::strict_coreq}}});
  CHECK(to_string(degrees_of_freedom(c, 4)) == "0");
  for (auto strategy : {PlanStrategy::frontload, PlanStrategy::balanced})
    CHECK_THROWS_AS(generate_plan(c, {4, 12.0, 0.0}, strategy), InfeasiblePlan);
}

TEST_CASE("co-requisites can pin a course inside a strict group's term") {
  // c0 and c1 share a term; c2 sits between them through plain co-requisites
  auto c = props::build(oracle::Graph{3, {{0, 2, RequisiteKind::coreq}, {2, 1, RequisiteKind::coreq},
                                           {0, 1, RequisiteKind::strict_coreq}}});
  auto plan = generate_plan(c, {2, 12.0, 0.0}, PlanStrategy::frontload);
  CHECK(term_of(plan, "c0") == term_of(plan, "c1"));
  CHECK(term_of(plan, "c2") == term_of(plan, "c0"));
}

TEST_CASE("minimum credits per term") {
  auto plan = generate_plan(fixtures::get("EMPTY4"), {2, 12.0, 6.0}, PlanStrategy::frontload);
  CHECK(validate_plan(fixtures::get("EMPTY4"), plan, {2, 12.0, 6.0}).ok());
  REQUIRE(plan.terms.size() == 2);
  CHECK(plan.terms[1].size() >= 2);
}

TEST_CASE("validate_plan") {
  auto chain = fixtures::get("CHAIN4");
  PlanConstraints loose{8};
  auto swapped = validate_plan(chain, {"p", {{"v2"}, {"v1"}, {"v3"}, {"v4"}}}, loose);
  CHECK(count_kind(swapped, IssueKind::plan_order) == 1);
  auto missing = validate_plan(chain, {"p", {{"v1"}, {"v2"}, {"v3"}}}, loose);
  CHECK(count_kind(missing, IssueKind::plan_completeness) == 1);
  for (const auto& name : fixtures::names()) {
    auto c = fixtures::get(name);
    CHECK(validate_plan(c, c.plan("default"), loose).ok());
  }
  auto crowded = validate_plan(fixtures::get("EMPTY4"), fixtures::get("EMPTY4").plan("default"), {1, 3.0, 0.0});
  CHECK(count_kind(crowded, IssueKind::capacity) == 3);  // too many terms, two heavy terms
  auto thin = validate_plan(chain, chain.plan("default"), {4, 12.0, 6.0});
  CHECK(count_kind(thin, IssueKind::capacity) == 4);
}

TEST_CASE("plan profile") {
  auto c1 = fixtures::get("C1");
  auto profile = plan_profile(c1, {"p", {{"v1"}, {"v2", "v3"}, {"v4"}}});
  CHECK(profile.term_complexity == std::vector<std::int64_t>{6, 6, 3});
  CHECK(profile.term_credits == std::vector<double>{3, 6, 3});
  CHECK(profile.max_term_complexity == 6);
  CHECK(profile.complexity_variance == doctest::Approx(2.0));  // mean 5, deviations 1 1 -2

  auto empty = fixtures::get("EMPTY4");
  for (const auto& terms : {Terms{{"v1", "v2", "v3", "v4"}}, Terms{{"v1"}, {"v2", "v3", "v4"}}}) {
    auto p = plan_profile(empty, {"p", terms});
    CHECK(std::accumulate(p.term_complexity.begin(), p.term_complexity.end(), std::int64_t{0}) == 4);
  }

  auto g = fixtures::get("FIG4G");
  auto a = plan_profile(g, g.plan("default"));
  auto b = plan_profile(g, {"late", {{"v1"}, {"v2"}, {"v3"}, {"v4"}}});
  CHECK(std::accumulate(a.term_complexity.begin(), a.term_complexity.end(), std::int64_t{0}) == 12);
  CHECK(std::accumulate(b.term_complexity.begin(), b.term_complexity.end(), std::int64_t{0}) == 12);

  CHECK_THROWS_AS(plan_profile(c1, {"bad", {{"v2"}, {"v1"}, {"v3", "v4"}}}), CurriculumError);
}

TEST_CASE("generated plans on random curricula") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> credit(1.0, 5.0);
  int generated = 0;
  for (int i = 0; i < 300; ++i) {
    auto g = props::plannable_dag(rng, 2 + i % 10, 0.25);
    std::vector<Course> courses = oracle::numbered_courses(g.n);
    for (auto& x : courses) x.credits = std::round(credit(rng));
    auto built = build_curriculum("r", courses, oracle::requisites_of(g));
    REQUIRE(built);
    const auto& c = *built;
    const auto total = std::accumulate(courses.begin(), courses.end(), 0.0,
                                       [](double s, const Course& x) { return s + x.credits; });
    const auto h = curriculum_metrics(c).complexity;
    PlanConstraints pc{static_cast<int>(longest_path_length(c)) + i % 3, std::max(total / 2.0, 10.0), 0.0};
    DegreePlan front;
    try {
      front = generate_plan(c, pc, PlanStrategy::frontload);
    } catch (const InfeasiblePlan&) {
      continue;  // the greedy may miss a packing; never a wrong answer
    }
    ++generated;
    auto balanced = generate_plan(c, pc, PlanStrategy::balanced);
    CAPTURE(props::describe(g));
    CHECK(validate_plan(c, front, pc).ok());
    CHECK(validate_plan(c, balanced, pc).ok());
    auto pf = plan_profile(c, front);
    auto pb = plan_profile(c, balanced);
    CHECK(pb.max_term_complexity <= pf.max_term_complexity);
    for (const auto* p : {&pf, &pb}) {
      CHECK(std::accumulate(p->term_complexity.begin(), p->term_complexity.end(), std::int64_t{0}) == h);
      CHECK(std::accumulate(p->term_credits.begin(), p->term_credits.end(), 0.0) == doctest::Approx(total));
    }
  }
  CHECK(generated > 250);
}

TEST_CASE("balancing lowers the peak of a frontloaded plan") {
  // four independent chains of two; frontload packs every head into term 1
  auto c = props::build(oracle::Graph{8, {{0, 1}, {2, 3}, {4, 5}, {6, 7}}});
  PlanConstraints pc{4, 12.0, 0.0};
  auto front = plan_profile(c, generate_plan(c, pc, PlanStrategy::frontload));
  auto balanced = plan_profile(c, generate_plan(c, pc, PlanStrategy::balanced));
  CHECK(front.max_term_complexity == 12);
  CHECK(balanced.max_term_complexity < front.max_term_complexity);
  CHECK(balanced.complexity_variance < front.complexity_variance);
}
