#include <doctest.h>

#include "properties.hpp"

namespace {

void check(const props::Outcome& o) {
  CAPTURE(o.detail);
  CHECK(o.cases > 0);
  CHECK(o.ok);
}

}  // namespace

TEST_CASE("blocking factor equals reachability") { check(props::blocking_equals_reachability(1000, 101)); }

TEST_CASE("complexity does not fall when requisites are added") {
  check(props::monotone_under_edge_addition(500, 102));
}

TEST_CASE("metrics do not depend on the degree plan") { check(props::plan_invariance(300, 103)); }

TEST_CASE("graduation rate rises with terms and pass rate") {
  check(props::grad_monotone_in_term_and_rate(400, 104));
}

TEST_CASE("graduation rate does not rise with added requisites on an earliest plan") {
  check(props::grad_monotone_in_structure(400, 105, props::SharedPlan::earliest));
}

TEST_CASE("a delayed shared plan can break structural monotonicity") {
  // the random search finds the co-requisite pull-forward case
  auto o = props::grad_monotone_in_structure(400, 106, props::SharedPlan::any);
  CHECK_FALSE(o.ok);
  MESSAGE(o.detail);
}

TEST_CASE("Monte Carlo does not depend on thread count") { check(props::mc_thread_determinism(20000)); }

TEST_CASE("Monte Carlo agrees with the exact distribution") {
  double worst = 0.0;
  auto o = props::mc_matches_exact(20000, &worst);
  check(o);
  MESSAGE("largest deviation " << worst << " standard errors");
}
