#pragma once

// Brute-force reference implementations used to check the library. They
// work on plain edge lists and share no code with src/.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "curricula/core.hpp"

namespace oracle {

struct Edge {
  int from;
  int to;
  curricula::RequisiteKind kind = curricula::RequisiteKind::prereq;
};

struct Graph {
  int n = 0;
  std::vector<Edge> edges;
};

inline Graph from_curriculum(const curricula::Curriculum& c) {
  Graph g;
  g.n = static_cast<int>(c.size());
  for (const auto& r : c.requisites())
    g.edges.push_back({static_cast<int>(c.index_of(r.source)), static_cast<int>(c.index_of(r.target)),
                       r.kind});
  return g;
}

inline std::vector<curricula::Course> numbered_courses(int n) {
  std::vector<curricula::Course> courses;
  for (int i = 0; i < n; ++i) courses.push_back({"c" + std::to_string(i), "Course " + std::to_string(i), 3.0, {}});
  return courses;
}

inline std::vector<curricula::Requisite> requisites_of(const Graph& g) {
  std::vector<curricula::Requisite> reqs;
  for (const auto& e : g.edges)
    reqs.push_back({"c" + std::to_string(e.from), "c" + std::to_string(e.to), e.kind});
  return reqs;
}

/// Random DAG on a random vertex order; each forward pair becomes an edge
/// with probability `density`. Kinds drawn from `kinds`.
inline Graph random_dag(std::mt19937_64& rng, int n, double density,
                        std::vector<curricula::RequisiteKind> kinds = {curricula::RequisiteKind::prereq}) {
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution coin(density);
  std::uniform_int_distribution<std::size_t> pick(0, kinds.size() - 1);
  Graph g;
  g.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) g.edges.push_back({order[i], order[j], kinds[pick(rng)]});
  return g;
}

inline std::vector<std::vector<int>> adjacency(const Graph& g) {
  std::vector<std::vector<int>> out(g.n);
  for (const auto& e : g.edges) out[e.from].push_back(e.to);
  return out;
}

/// reach[v] = vertices reachable from v by a depth-first walk (v excluded).
inline std::vector<std::set<int>> closure(const Graph& g) {
  auto adj = adjacency(g);
  std::vector<std::set<int>> reach(g.n);
  for (int s = 0; s < g.n; ++s) {
    std::vector<int> stack{s};
    std::vector<bool> seen(g.n, false);
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int y : adj[x])
        if (!seen[y]) {
          seen[y] = true;
          reach[s].insert(y);
          stack.push_back(y);
        }
    }
  }
  return reach;
}

/// Every source-to-sink path (isolated vertices form one-vertex paths).
inline std::vector<std::vector<int>> all_paths(const Graph& g) {
  auto adj = adjacency(g);
  std::vector<int> indeg(g.n, 0);
  for (const auto& e : g.edges) ++indeg[e.to];
  std::vector<std::vector<int>> paths;
  std::vector<int> path;
  std::function<void(int)> walk = [&](int v) {
    path.push_back(v);
    if (adj[v].empty()) paths.push_back(path);
    for (int w : adj[v]) walk(w);
    path.pop_back();
  };
  for (int v = 0; v < g.n; ++v)
    if (indeg[v] == 0) walk(v);
  return paths;
}

struct PathMetrics {
  std::vector<std::int64_t> delay;
  std::vector<std::uint64_t> centrality;
  std::int64_t longest = 0;
};

inline PathMetrics path_metrics(const Graph& g) {
  PathMetrics m;
  m.delay.assign(g.n, 0);
  m.centrality.assign(g.n, 0);
  for (const auto& p : all_paths(g)) {
    auto len = static_cast<std::int64_t>(p.size());
    m.longest = std::max(m.longest, len);
    for (std::size_t i = 0; i < p.size(); ++i) {
      m.delay[p[i]] = std::max(m.delay[p[i]], len);
      if (i > 0 && i + 1 < p.size()) m.centrality[p[i]] += static_cast<std::uint64_t>(len);
    }
  }
  return m;
}

inline std::int64_t structural_complexity(const Graph& g) {
  auto m = path_metrics(g);
  auto reach = closure(g);
  std::int64_t h = 0;
  for (int v = 0; v < g.n; ++v) h += m.delay[v] + static_cast<std::int64_t>(reach[v].size());
  return h;
}

/// Term assignments over `terms` terms satisfying every requisite, by
/// enumerating all terms^n assignments.
inline std::uint64_t degrees_of_freedom(const Graph& g, int terms, int max_per_term = 0) {
  std::vector<int> term(g.n, 0);
  std::uint64_t count = 0;
  std::function<void(int)> assign = [&](int v) {
    if (v == g.n) {
      for (const auto& e : g.edges) {
        int a = term[e.from], b = term[e.to];
        if (e.kind == curricula::RequisiteKind::prereq && !(a < b)) return;
        if (e.kind == curricula::RequisiteKind::coreq && !(a <= b)) return;
        if (e.kind == curricula::RequisiteKind::strict_coreq && a != b) return;
      }
      if (max_per_term > 0) {
        std::vector<int> load(terms, 0);
        for (int t : term)
          if (++load[t] > max_per_term) return;
      }
      ++count;
      return;
    }
    for (int t = 0; t < terms; ++t) {
      term[v] = t;
      assign(v + 1);
    }
  };
  assign(0);
  return count;
}

/// Exact graduation and per-course passage by enumerating, for every
/// course, the attempt on which it is first passed (or never within the
/// horizon). Given those attempt numbers a student's path is deterministic.
///
/// Enrollment: a course without requisites is first taken in its scheduled
/// term (`first_term`, 1-based); afterwards it is retaken every term until
/// passed. A course with requisites is taken in every term in which each
/// prerequisite is already passed and each co-requisite source is passed or
/// taken in the same term.
struct ExactResult {
  std::vector<std::vector<double>> cumulative;  // [v][t]
  std::vector<double> grad;                     // [t]
};

inline ExactResult coupled_exact(const Graph& g, const std::vector<int>& first_term,
                                 const std::vector<double>& p, int horizon) {
  const int n = g.n;
  std::vector<bool> gated(n, false);
  for (const auto& e : g.edges) gated[e.to] = true;
  ExactResult out;
  out.cumulative.assign(n, std::vector<double>(horizon, 0.0));
  out.grad.assign(horizon, 0.0);
  std::vector<int> attempt(n, 1);  // horizon + 1 means never passed in time

  std::function<void(int, double)> visit = [&](int v, double weight) {
    if (weight == 0.0) return;
    if (v < n) {
      for (int a = 1; a <= horizon; ++a) {
        attempt[v] = a;
        visit(v + 1, weight * p[v] * std::pow(1.0 - p[v], a - 1));
      }
      attempt[v] = horizon + 1;
      visit(v + 1, weight * std::pow(1.0 - p[v], horizon));
      return;
    }
    std::vector<int> tries(n, 0), passed_at(n, horizon + 1);
    for (int t = 1; t <= horizon; ++t) {
      std::vector<bool> taking(n, false);
      bool changed = true;
      while (changed) {
        changed = false;
        for (int x = 0; x < n; ++x) {
          if (taking[x] || passed_at[x] < t) continue;
          bool open;
          if (!gated[x]) {
            open = first_term[x] <= t;
          } else {
            open = true;
            for (const auto& e : g.edges) {
              if (e.to != x) continue;
              bool done = passed_at[e.from] < t;
              if (e.kind == curricula::RequisiteKind::prereq)
                open = open && done;
              else
                open = open && (done || taking[e.from]);
            }
          }
          if (open) {
            taking[x] = true;
            changed = true;
          }
        }
      }
      for (int x = 0; x < n; ++x)
        if (taking[x] && ++tries[x] == attempt[x]) passed_at[x] = t;
    }
    int done_at = 0;
    for (int x = 0; x < n; ++x) {
      for (int t = passed_at[x]; t <= horizon; ++t) out.cumulative[x][t - 1] += weight;
      done_at = std::max(done_at, passed_at[x]);
    }
    if (n == 0) done_at = 1;
    for (int t = done_at; t <= horizon; ++t) out.grad[t - 1] += weight;
  };
  visit(0, 1.0);
  return out;
}

/// Gated recurrence treating courses as independent. gate(t) is the product
/// of prerequisite passage by t-1 and co-requisite passage by t; passage by
/// t sums the gate increments times the chance of a pass within the
/// remaining attempts.
inline ExactResult independent_recurrence(const Graph& g, const std::vector<int>& first_term,
                                          const std::vector<double>& p, int horizon) {
  const int n = g.n;
  std::vector<std::vector<double>> cum(n, std::vector<double>(horizon + 1, 0.0));
  std::vector<bool> done(n, false);
  std::vector<bool> gated(n, false);
  for (const auto& e : g.edges) gated[e.to] = true;
  for (int round = 0; round < n; ++round) {
    for (int v = 0; v < n; ++v) {
      if (done[v]) continue;
      bool ready = true;
      for (const auto& e : g.edges)
        if (e.to == v && !done[e.from]) ready = false;
      if (!ready) continue;
      std::vector<double> gate(horizon + 1, 0.0);
      for (int t = 1; t <= horizon; ++t) {
        if (!gated[v]) {
          gate[t] = t >= first_term[v] ? 1.0 : 0.0;
        } else {
          gate[t] = 1.0;
          for (const auto& e : g.edges)
            if (e.to == v)
              gate[t] *= e.kind == curricula::RequisiteKind::prereq ? cum[e.from][t - 1] : cum[e.from][t];
        }
      }
      for (int t = 1; t <= horizon; ++t)
        for (int tau = 1; tau <= t; ++tau)
          cum[v][t] += (gate[tau] - gate[tau - 1]) * (1.0 - std::pow(1.0 - p[v], t - tau + 1));
      done[v] = true;
    }
  }
  ExactResult out;
  out.cumulative.assign(n, std::vector<double>(horizon, 0.0));
  out.grad.assign(horizon, 1.0);
  for (int v = 0; v < n; ++v)
    for (int t = 1; t <= horizon; ++t) {
      out.cumulative[v][t - 1] = cum[v][t];
      out.grad[t - 1] *= cum[v][t];
    }
  return out;
}

/// First-attempt terms for courses without requisites: term t offers as
/// many slots as the plan puts in term t (none past the plan) plus `extra`,
/// handed out by plan term, then higher complexity, then id.
inline std::vector<int> first_terms(const curricula::Curriculum& c, const curricula::DegreePlan& plan,
                                    int extra) {
  Graph g = from_curriculum(c);
  auto m = path_metrics(g);
  auto reach = closure(g);
  const int n = g.n;
  std::vector<int> plan_term(n, 0);
  for (std::size_t t = 0; t < plan.terms.size(); ++t)
    for (const auto& id : plan.terms[t]) plan_term[c.index_of(id)] = static_cast<int>(t);
  std::vector<bool> gated(n, false);
  for (const auto& e : g.edges) gated[e.to] = true;
  std::vector<int> order;
  for (int v = 0; v < n; ++v)
    if (!gated[v]) order.push_back(v);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    auto ha = m.delay[a] + static_cast<std::int64_t>(reach[a].size());
    auto hb = m.delay[b] + static_cast<std::int64_t>(reach[b].size());
    if (plan_term[a] != plan_term[b]) return plan_term[a] < plan_term[b];
    if (ha != hb) return ha > hb;
    return c.courses()[a].id < c.courses()[b].id;
  });
  std::vector<int> first(n, 0);
  std::size_t next = 0;
  for (int t = 1; next < order.size(); ++t) {
    int slots = (t <= static_cast<int>(plan.terms.size()) ? static_cast<int>(plan.terms[t - 1].size()) : 0) + extra;
    for (; slots > 0 && next < order.size(); --slots) first[order[next++]] = t;
  }
  return first;
}

}  // namespace oracle
