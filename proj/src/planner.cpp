#include "curricula/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/strong_components.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "curricula/metrics.hpp"

namespace curricula {

std::optional<PlanStrategy> plan_strategy_from_string(std::string_view text) {
  if (text == "frontload") return PlanStrategy::frontload;
  if (text == "balanced") return PlanStrategy::balanced;
  return std::nullopt;
}

namespace {

constexpr double kCreditEps = 1e-9;

// Strict co-requisites move together; every other requisite links units.
struct Unit {
  std::vector<std::size_t> courses;
  std::string id;  // smallest member id, used for tie-breaks
  double credits = 0.0;
  std::int64_t complexity = 0;
};

struct UnitArc {
  std::size_t from;
  std::size_t to;
  RequisiteKind kind;
};

class PlanSearch {
 public:
  PlanSearch(const Curriculum& c, const PlanConstraints& k) : c_(c), k_(k) {
    const std::size_t n = c.size();
    // A unit is a strongly connected component once strict co-requisites
    // are read in both directions; all of its courses share a term.
    using Digraph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS>;
    Digraph g(n);
    for (std::size_t v = 0; v < n; ++v)
      for (const Arc& a : c.successors(v)) {
        boost::add_edge(v, a.to, g);
        if (a.kind == RequisiteKind::strict_coreq) boost::add_edge(a.to, v, g);
      }
    std::vector<std::size_t> component(n);
    boost::strong_components(
        g, boost::make_iterator_property_map(component.begin(), boost::get(boost::vertex_index, g)));

    const auto complexity = course_complexities(c);
    std::vector<std::size_t> root_unit(n, n);
    unit_of_.assign(n, 0);
    for (std::size_t v : c.topological_indices()) {
      std::size_t r = component[v];
      if (root_unit[r] == n) {
        root_unit[r] = units_.size();
        units_.emplace_back();
      }
      Unit& u = units_[root_unit[r]];
      u.courses.push_back(v);
      u.credits += c.courses()[v].credits;
      u.complexity += complexity[v];
      if (u.id.empty() || c.courses()[v].id < u.id) u.id = c.courses()[v].id;
      unit_of_[v] = root_unit[r];
    }
    for (std::size_t v = 0; v < n; ++v)
      for (const Arc& a : c.successors(v))
        if (unit_of_[v] != unit_of_[a.to])
          arcs_.push_back({unit_of_[v], unit_of_[a.to], a.kind});
        else if (a.kind == RequisiteKind::prereq && conflict_.empty())
          conflict_ = fmt::format("'{}' must precede '{}' but strict co-requisites tie them to one term",
                                  c.courses()[v].id, c.courses()[a.to].id);

    earliest_.assign(units_.size(), 0);
    tail_.assign(units_.size(), 0);
    bool changed = true;
    while (changed) {  // longest-chain windows; units are acyclic
      changed = false;
      for (const auto& a : arcs_) {
        int step = a.kind == RequisiteKind::prereq ? 1 : 0;
        if (earliest_[a.to] < earliest_[a.from] + step) {
          earliest_[a.to] = earliest_[a.from] + step;
          changed = true;
        }
        if (tail_[a.from] < tail_[a.to] + step) {
          tail_[a.from] = tail_[a.to] + step;
          changed = true;
        }
      }
    }
  }

  void check_feasible() const {
    if (!conflict_.empty()) throw InfeasiblePlan(conflict_);
    for (std::size_t u = 0; u < units_.size(); ++u) {
      int needed = earliest_[u] + tail_[u] + 1;
      if (needed > k_.num_terms)
        throw InfeasiblePlan(fmt::format(
            "the requisite chain through '{}' needs {} terms but only {} are available",
            units_[u].id, needed, k_.num_terms));
      if (units_[u].credits > k_.max_credits_per_term + kCreditEps)
        throw InfeasiblePlan(fmt::format("'{}' carries {} credits, above the {} credit term limit",
                                         units_[u].id, units_[u].credits,
                                         k_.max_credits_per_term));
    }
    double total = 0.0;
    for (const auto& u : units_) total += u.credits;
    if (total > k_.num_terms * k_.max_credits_per_term + kCreditEps)
      throw InfeasiblePlan(fmt::format("{} total credits do not fit in {} terms of at most {}",
                                       total, k_.num_terms, k_.max_credits_per_term));
  }

  std::vector<int> frontload() const {
    const std::size_t m = units_.size();
    std::vector<int> term(m, -1);
    std::vector<std::size_t> by_complexity(m);
    std::iota(by_complexity.begin(), by_complexity.end(), std::size_t{0});
    std::sort(by_complexity.begin(), by_complexity.end(), [&](std::size_t a, std::size_t b) {
      return std::tie(units_[b].complexity, units_[a].id) <
             std::tie(units_[a].complexity, units_[b].id);
    });

    std::size_t placed = 0;
    for (int t = 0; t < k_.num_terms && placed < m; ++t) {
      double load = 0.0;
      auto eligible = [&](std::size_t u) {
        if (term[u] != -1) return false;
        for (const auto& a : arcs_) {
          if (a.to != u) continue;
          int tf = term[a.from];
          if (tf == -1) return false;
          if (a.kind == RequisiteKind::prereq && tf >= t) return false;
        }
        return load + units_[u].credits <= k_.max_credits_per_term + kCreditEps;
      };
      // deadline-bound units first, then by complexity
      for (bool urgent_pass : {true, false}) {
        bool grew = true;
        while (grew) {
          grew = false;
          for (std::size_t u : by_complexity) {
            if (urgent_pass && k_.num_terms - 1 - tail_[u] != t) continue;
            if (!eligible(u)) continue;
            term[u] = t;
            load += units_[u].credits;
            ++placed;
            grew = true;
          }
        }
      }
      for (std::size_t u = 0; u < m; ++u) {
        if (term[u] == -1 && k_.num_terms - 1 - tail_[u] <= t)
          throw InfeasiblePlan(fmt::format(
              "could not place '{}' by term {} within the credit limit of {}", units_[u].id,
              t + 1, k_.max_credits_per_term));
      }
    }
    if (placed < m) throw InfeasiblePlan("could not place every course");
    return term;
  }

  bool valid(const std::vector<int>& term) const {
    for (const auto& a : arcs_) {
      int tf = term[a.from], tt = term[a.to];
      if (a.kind == RequisiteKind::prereq ? tf >= tt : tf > tt) return false;
    }
    auto credits = term_credits(term);
    for (double cr : credits)
      if (cr > k_.max_credits_per_term + kCreditEps) return false;
    return true;
  }

  // (peak term complexity, sum of squared term complexities)
  std::pair<std::int64_t, std::int64_t> score(const std::vector<int>& term) const {
    std::vector<std::int64_t> per(k_.num_terms, 0);
    for (std::size_t u = 0; u < units_.size(); ++u) per[term[u]] += units_[u].complexity;
    std::int64_t peak = *std::max_element(per.begin(), per.end());
    std::int64_t squares = 0;
    for (auto x : per) squares += x * x;
    return {peak, squares};
  }

  std::int64_t min_credit_shortfall(const std::vector<int>& term) const {
    std::int64_t shortfall = 0;
    for (double cr : term_credits(term))
      if (cr + kCreditEps < k_.min_credits_per_term) ++shortfall;
    return shortfall;
  }

  void balance(std::vector<int>& term) const {
    const std::size_t m = units_.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return units_[a].id < units_[b].id; });
    auto key = [&](const std::vector<int>& t) {
      auto [peak, squares] = score(t);
      return std::make_tuple(min_credit_shortfall(t), peak, squares);
    };
    auto current = key(term);
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t u : order) {
        for (int t = 0; t < k_.num_terms && !improved; ++t) {
          if (t == term[u]) continue;
          int old = term[u];
          term[u] = t;
          if (valid(term)) {
            auto candidate = key(term);
            if (candidate < current) {
              current = candidate;
              improved = true;
              break;
            }
          }
          term[u] = old;
        }
        if (improved) break;
      }
      if (improved) continue;
      for (std::size_t i = 0; i < m && !improved; ++i) {
        for (std::size_t j = i + 1; j < m && !improved; ++j) {
          std::size_t a = order[i], b = order[j];
          if (term[a] == term[b]) continue;
          std::swap(term[a], term[b]);
          if (valid(term)) {
            auto candidate = key(term);
            if (candidate < current) {
              current = candidate;
              improved = true;
              break;
            }
          }
          std::swap(term[a], term[b]);
        }
      }
    }
  }

  DegreePlan to_plan(const std::vector<int>& term, std::string name) const {
    DegreePlan plan{std::move(name), std::vector<std::vector<std::string>>(k_.num_terms)};
    for (std::size_t v = 0; v < c_.size(); ++v)
      plan.terms[term[unit_of_[v]]].push_back(c_.courses()[v].id);
    return plan;
  }

 private:
  std::vector<double> term_credits(const std::vector<int>& term) const {
    std::vector<double> credits(k_.num_terms, 0.0);
    for (std::size_t u = 0; u < units_.size(); ++u) credits[term[u]] += units_[u].credits;
    return credits;
  }

  const Curriculum& c_;
  PlanConstraints k_;
  std::vector<Unit> units_;
  std::vector<std::size_t> unit_of_;
  std::vector<UnitArc> arcs_;
  std::vector<int> earliest_;
  std::vector<int> tail_;
  std::string conflict_;
};

}  // namespace

DegreePlan generate_plan(const Curriculum& c, const PlanConstraints& constraints,
                         PlanStrategy strategy, std::string name) {
  if (constraints.num_terms <= 0) throw InfeasiblePlan("the number of terms must be positive");
  if (!(constraints.max_credits_per_term > 0))
    throw InfeasiblePlan("the per-term credit limit must be positive");
  if (constraints.min_credits_per_term < 0)
    throw InfeasiblePlan("the per-term credit minimum must be non-negative");

  PlanSearch search(c, constraints);
  search.check_feasible();
  auto term = search.frontload();
  if (strategy == PlanStrategy::balanced || search.min_credit_shortfall(term) > 0)
    search.balance(term);
  auto plan = search.to_plan(term, std::move(name));
  auto report = validate_plan(c, plan, constraints);
  if (!report.ok())
    throw InfeasiblePlan(fmt::format("no plan found: {}", report.errors.front().message));
  return plan;
}

ValidationReport validate_plan(const Curriculum& c, const DegreePlan& plan,
                               const PlanConstraints& constraints) {
  ValidationReport report = check_plan(c, plan);
  if (static_cast<int>(plan.terms.size()) > constraints.num_terms) {
    report.errors.push_back({IssueKind::capacity,
                             fmt::format("plan '{}' uses {} terms, more than the {} allowed",
                                         plan.name, plan.terms.size(), constraints.num_terms),
                             {}});
  }
  for (std::size_t t = 0; t < plan.terms.size(); ++t) {
    double credits = 0.0;
    for (const auto& id : plan.terms[t])
      if (c.contains(id)) credits += c.course(id).credits;
    if (credits > constraints.max_credits_per_term + kCreditEps) {
      report.errors.push_back(
          {IssueKind::capacity,
           fmt::format("plan '{}': term {} carries {} credits, above the limit of {}", plan.name,
                       t + 1, credits, constraints.max_credits_per_term),
           plan.terms[t]});
    }
    if (credits + kCreditEps < constraints.min_credits_per_term) {
      report.errors.push_back(
          {IssueKind::capacity,
           fmt::format("plan '{}': term {} carries {} credits, below the minimum of {}", plan.name,
                       t + 1, credits, constraints.min_credits_per_term),
           plan.terms[t]});
    }
  }
  return report;
}

PlanProfile plan_profile(const Curriculum& c, const DegreePlan& plan) {
  auto report = check_plan(c, plan);
  if (!report.ok())
    throw CurriculumError(
        fmt::format("plan '{}' is invalid: {}", plan.name, report.errors.front().message));
  const auto complexity = course_complexities(c);
  PlanProfile profile;
  for (const auto& term : plan.terms) {
    double credits = 0.0;
    std::int64_t cx = 0;
    for (const auto& id : term) {
      std::size_t v = c.index_of(id);
      credits += c.courses()[v].credits;
      cx += complexity[v];
    }
    profile.term_credits.push_back(credits);
    profile.term_complexity.push_back(cx);
  }
  if (!profile.term_complexity.empty()) {
    profile.max_term_complexity =
        *std::max_element(profile.term_complexity.begin(), profile.term_complexity.end());
    double mean = 0.0;
    for (auto x : profile.term_complexity) mean += static_cast<double>(x);
    mean /= static_cast<double>(profile.term_complexity.size());
    for (auto x : profile.term_complexity)
      profile.complexity_variance += (static_cast<double>(x) - mean) * (static_cast<double>(x) - mean);
    profile.complexity_variance /= static_cast<double>(profile.term_complexity.size());
  }
  return profile;
}

}  // namespace curricula
