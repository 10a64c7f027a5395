#include "curricula/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <utility>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace curricula {

std::string_view to_string(RequisiteKind kind) {
  switch (kind) {
    case RequisiteKind::prereq:
      return "prereq";
    case RequisiteKind::coreq:
      return "coreq";
    case RequisiteKind::strict_coreq:
      return "strictcoreq";
  }
  return "prereq";
}

std::optional<RequisiteKind> requisite_kind_from_string(std::string_view text) {
  if (text == "prereq") return RequisiteKind::prereq;
  if (text == "coreq") return RequisiteKind::coreq;
  if (text == "strictcoreq" || text == "strict_coreq") return RequisiteKind::strict_coreq;
  return std::nullopt;
}

std::string_view to_string(IssueKind kind) {
  switch (kind) {
    case IssueKind::cycle:
      return "cycle";
    case IssueKind::duplicate_course:
      return "duplicate_course";
    case IssueKind::invalid_course:
      return "invalid_course";
    case IssueKind::unknown_course:
      return "unknown_course";
    case IssueKind::invalid_requisite:
      return "invalid_requisite";
    case IssueKind::duplicate_requisite:
      return "duplicate_requisite";
    case IssueKind::plan_completeness:
      return "plan_completeness";
    case IssueKind::plan_order:
      return "plan_order";
    case IssueKind::capacity:
      return "capacity";
    case IssueKind::forward_edge:
      return "forward_edge";
    case IssueKind::syntax:
      return "syntax";
    case IssueKind::schema:
      return "schema";
  }
  return "unknown";
}

void ValidationReport::merge(const ValidationReport& other) {
  errors.insert(errors.end(), other.errors.begin(), other.errors.end());
  warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
}

bool Curriculum::contains(std::string_view id) const {
  return index_.find(std::string(id)) != index_.end();
}

std::size_t Curriculum::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) throw CurriculumError(fmt::format("unknown course id '{}'", id));
  return it->second;
}

const DegreePlan* Curriculum::find_plan(std::string_view name) const {
  for (const auto& p : plans_)
    if (p.name == name) return &p;
  return nullptr;
}

const DegreePlan& Curriculum::plan(std::string_view name) const {
  if (const auto* p = find_plan(name)) return *p;
  throw CurriculumError(fmt::format("unknown plan '{}'", name));
}

namespace {

bool valid_id(std::string_view id) {
  if (id.empty()) return false;
  return std::none_of(id.begin(), id.end(),
                      [](unsigned char ch) { return std::isspace(ch) || std::iscntrl(ch); });
}

using Adjacency = std::vector<std::vector<Arc>>;

// Returns one representative cycle per back edge found by DFS.
std::vector<std::vector<std::size_t>> find_cycles(const Adjacency& out) {
  const std::size_t n = out.size();
  enum Color : unsigned char { white, gray, black };
  std::vector<Color> color(n, white);
  std::vector<std::vector<std::size_t>> cycles;
  std::vector<std::size_t> stack;
  std::vector<std::size_t> next_arc(n, 0);

  for (std::size_t root = 0; root < n; ++root) {
    if (color[root] != white) continue;
    stack.push_back(root);
    color[root] = gray;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      if (next_arc[v] < out[v].size()) {
        std::size_t w = out[v][next_arc[v]++].to;
        if (color[w] == white) {
          color[w] = gray;
          stack.push_back(w);
        } else if (color[w] == gray) {
          auto start = std::find(stack.begin(), stack.end(), w);
          cycles.emplace_back(start, stack.end());
        }
      } else {
        color[v] = black;
        stack.pop_back();
      }
    }
  }
  return cycles;
}

std::vector<std::size_t> kahn_order(const std::vector<Course>& courses, const Adjacency& out,
                                    const Adjacency& in) {
  const std::size_t n = courses.size();
  std::vector<std::size_t> indegree(n);
  auto later = [&](std::size_t a, std::size_t b) { return courses[a].id > courses[b].id; };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(later)> ready(later);
  for (std::size_t v = 0; v < n; ++v) {
    indegree[v] = in[v].size();
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    std::size_t v = ready.top();
    ready.pop();
    order.push_back(v);
    for (const Arc& a : out[v])
      if (--indegree[a.to] == 0) ready.push(a.to);
  }
  return order;
}

std::vector<bool> reach_from(const Adjacency& adj, std::size_t v) {
  std::vector<bool> seen(adj.size(), false);
  std::vector<std::size_t> stack{v};
  while (!stack.empty()) {
    std::size_t x = stack.back();
    stack.pop_back();
    for (const Arc& a : adj[x]) {
      if (!seen[a.to]) {
        seen[a.to] = true;
        stack.push_back(a.to);
      }
    }
  }
  seen[v] = false;
  return seen;
}

// Shortest arc path from `from` to `to` (BFS), both inclusive.
std::vector<std::size_t> path_between(const Adjacency& out, std::size_t from, std::size_t to) {
  std::vector<std::size_t> parent(out.size(), out.size());
  std::queue<std::size_t> q;
  q.push(from);
  parent[from] = from;
  while (!q.empty()) {
    std::size_t x = q.front();
    q.pop();
    if (x == to) break;
    for (const Arc& a : out[x]) {
      if (parent[a.to] == out.size()) {
        parent[a.to] = x;
        q.push(a.to);
      }
    }
  }
  std::vector<std::size_t> path;
  if (parent[to] == out.size()) return path;
  for (std::size_t x = to; x != from; x = parent[x]) path.push_back(x);
  path.push_back(from);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<std::string> ids_of(const std::vector<Course>& courses,
                                const std::vector<std::size_t>& idx) {
  std::vector<std::string> ids;
  ids.reserve(idx.size());
  for (auto i : idx) ids.push_back(courses[i].id);
  return ids;
}

ValidationReport check_plan_impl(const std::vector<Course>& courses,
                                 const std::unordered_map<std::string, std::size_t>& index,
                                 const std::vector<Requisite>& requisites, const DegreePlan& plan) {
  ValidationReport report;
  std::vector<std::optional<std::size_t>> term_of(courses.size());
  for (std::size_t t = 0; t < plan.terms.size(); ++t) {
    for (const auto& id : plan.terms[t]) {
      auto it = index.find(id);
      if (it == index.end()) {
        report.errors.push_back({IssueKind::plan_completeness,
                                 fmt::format("plan '{}': term {} lists unknown course '{}'",
                                             plan.name, t + 1, id),
                                 {id}});
        continue;
      }
      if (term_of[it->second]) {
        report.errors.push_back(
            {IssueKind::plan_completeness,
             fmt::format("plan '{}': course '{}' appears more than once (terms {} and {})",
                         plan.name, id, *term_of[it->second] + 1, t + 1),
             {id}});
        continue;
      }
      term_of[it->second] = t;
    }
  }
  for (std::size_t v = 0; v < courses.size(); ++v) {
    if (!term_of[v]) {
      report.errors.push_back(
          {IssueKind::plan_completeness,
           fmt::format("plan '{}': course '{}' is not scheduled", plan.name, courses[v].id),
           {courses[v].id}});
    }
  }
  for (const auto& r : requisites) {
    auto s = index.find(r.source);
    auto t = index.find(r.target);
    if (s == index.end() || t == index.end()) continue;
    const auto& ts = term_of[s->second];
    const auto& tt = term_of[t->second];
    if (!ts || !tt) continue;
    bool ok = true;
    std::string_view rule;
    switch (r.kind) {
      case RequisiteKind::prereq:
        ok = *ts < *tt;
        rule = "an earlier term than";
        break;
      case RequisiteKind::coreq:
        ok = *ts <= *tt;
        rule = "the same or an earlier term than";
        break;
      case RequisiteKind::strict_coreq:
        ok = *ts == *tt;
        rule = "the same term as";
        break;
    }
    if (!ok) {
      report.errors.push_back(
          {IssueKind::plan_order,
           fmt::format("plan '{}': {} '{}' (term {}) must be in {} '{}' (term {})", plan.name,
                       to_string(r.kind), r.source, *ts + 1, rule, r.target, *tt + 1),
           {r.source, r.target}});
    }
  }
  return report;
}

}  // namespace

struct CurriculumBuilder {
  static Checked<Curriculum> build(std::string name, std::vector<Course> courses,
                                   std::vector<Requisite> requisites,
                                   std::vector<DegreePlan> plans) {
    Checked<Curriculum> result;
    ValidationReport& report = result.report;

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < courses.size(); ++i) {
      const Course& c = courses[i];
      if (!valid_id(c.id)) {
        report.errors.push_back({IssueKind::invalid_course,
                                 fmt::format("course #{}: id '{}' must be a non-empty token "
                                             "without whitespace",
                                             i, c.id),
                                 {c.id}});
      }
      if (!std::isfinite(c.credits) || c.credits < 0) {
        report.errors.push_back(
            {IssueKind::invalid_course,
             fmt::format("course '{}': credits must be a non-negative number", c.id),
             {c.id}});
      }
      if (!index.emplace(c.id, i).second) {
        report.errors.push_back({IssueKind::duplicate_course,
                                 fmt::format("duplicate course id '{}'", c.id), {c.id}});
      }
    }

    const std::size_t n = courses.size();
    Adjacency out(n), in(n);
    std::set<std::pair<std::size_t, std::size_t>> seen_pairs;
    for (std::size_t i = 0; i < requisites.size(); ++i) {
      const Requisite& r = requisites[i];
      auto s = index.find(r.source);
      auto t = index.find(r.target);
      bool known = true;
      for (const auto* end : {&r.source, &r.target}) {
        if (!index.count(*end)) {
          report.errors.push_back({IssueKind::unknown_course,
                                   fmt::format("requisite #{} ({} -> {}): unknown course '{}'", i,
                                               r.source, r.target, *end),
                                   {*end}});
          known = false;
        }
      }
      if (!known) continue;
      if (s->second == t->second) {
        report.errors.push_back({IssueKind::invalid_requisite,
                                 fmt::format("requisite #{}: course '{}' cannot require itself",
                                             i, r.source),
                                 {r.source}});
        continue;
      }
      bool duplicate = !seen_pairs.emplace(s->second, t->second).second;
      if (!duplicate && r.kind == RequisiteKind::strict_coreq) {
        // strict co-requisites are symmetric: u~v and v~u are the same relation
        for (const Arc& a : out[t->second])
          if (a.to == s->second && a.kind == RequisiteKind::strict_coreq) duplicate = true;
      }
      if (duplicate) {
        report.errors.push_back({IssueKind::duplicate_requisite,
                                 fmt::format("requisite #{}: duplicate requisite {} -> {}", i,
                                             r.source, r.target),
                                 {r.source, r.target}});
        continue;
      }
      out[s->second].push_back({t->second, r.kind});
      in[t->second].push_back({s->second, r.kind});
    }

    for (const auto& cyc : find_cycles(out)) {
      auto ids = ids_of(courses, cyc);
      report.errors.push_back({IssueKind::cycle,
                               fmt::format("requisite cycle: {} -> {}", fmt::join(ids, " -> "),
                                           ids.front()),
                               ids});
    }

    std::set<std::string> plan_names;
    for (const auto& p : plans) {
      if (!plan_names.insert(p.name).second) {
        report.errors.push_back({IssueKind::plan_completeness,
                                 fmt::format("duplicate plan name '{}'", p.name), {}});
      }
      report.merge(check_plan_impl(courses, index, requisites, p));
    }

    if (!report.errors.empty()) return result;

    Curriculum c;
    c.topo_ = kahn_order(courses, out, in);

    // Forward edges: a prereq u->w is redundant when u is a prerequisite of
    // some x that already leads to w.
    std::vector<std::vector<bool>> reach(n);
    for (std::size_t v = 0; v < n; ++v) reach[v] = reach_from(out, v);
    for (std::size_t u = 0; u < n; ++u) {
      for (const Arc& direct : out[u]) {
        if (direct.kind != RequisiteKind::prereq) continue;
        for (const Arc& via : out[u]) {
          if (via.kind != RequisiteKind::prereq || via.to == direct.to) continue;
          if (!reach[via.to][direct.to]) continue;
          auto path = path_between(out, via.to, direct.to);
          path.insert(path.begin(), u);
          auto ids = ids_of(courses, path);
          report.warnings.push_back(
              {IssueKind::forward_edge,
               fmt::format("redundant requisite {} -> {} (implied by {})", courses[u].id,
                           courses[direct.to].id, fmt::join(ids, " -> ")),
               ids});
          break;
        }
      }
    }

    c.name_ = std::move(name);
    c.courses_ = std::move(courses);
    c.requisites_ = std::move(requisites);
    c.plans_ = std::move(plans);
    c.index_ = std::move(index);
    c.out_ = std::move(out);
    c.in_ = std::move(in);
    c.warnings_ = report.warnings;
    result.value = std::move(c);
    return result;
  }
};

Checked<Curriculum> build_curriculum(std::string name, std::vector<Course> courses,
                                     std::vector<Requisite> requisites,
                                     std::vector<DegreePlan> plans) {
  return CurriculumBuilder::build(std::move(name), std::move(courses), std::move(requisites),
                                  std::move(plans));
}

std::vector<bool> reachable_mask(const Curriculum& c, std::size_t v, Direction direction) {
  const std::size_t n = c.size();
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{v};
  while (!stack.empty()) {
    std::size_t x = stack.back();
    stack.pop_back();
    auto arcs = direction == Direction::forward ? c.successors(x) : c.predecessors(x);
    for (const Arc& a : arcs) {
      if (!seen[a.to]) {
        seen[a.to] = true;
        stack.push_back(a.to);
      }
    }
  }
  return seen;
}

std::set<std::string> reachable_set(const Curriculum& c, std::string_view id,
                                    Direction direction) {
  auto mask = reachable_mask(c, c.index_of(id), direction);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) ids.insert(c.courses()[i].id);
  return ids;
}

std::vector<std::string> topological_order(const Curriculum& c) {
  std::vector<std::string> ids;
  ids.reserve(c.size());
  for (auto v : c.topological_indices()) ids.push_back(c.courses()[v].id);
  return ids;
}

ValidationReport check_plan(const Curriculum& c, const DegreePlan& plan) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < c.size(); ++i) index.emplace(c.courses()[i].id, i);
  std::vector<Course> courses(c.courses().begin(), c.courses().end());
  std::vector<Requisite> reqs(c.requisites().begin(), c.requisites().end());
  return check_plan_impl(courses, index, reqs, plan);
}

namespace {

struct Draft {
  std::string name;
  std::vector<Course> courses;
  std::vector<Requisite> requisites;
  std::vector<DegreePlan> plans;
};

Checked<Curriculum> reject(IssueKind kind, std::string message, std::vector<std::string> ids) {
  Checked<Curriculum> r;
  r.report.errors.push_back({kind, std::move(message), std::move(ids)});
  return r;
}

}  // namespace

Checked<Curriculum> apply_edit(const Curriculum& c, const Edit& e) {
  Draft d{c.name(),
          {c.courses().begin(), c.courses().end()},
          {c.requisites().begin(), c.requisites().end()},
          {c.plans().begin(), c.plans().end()}};

  auto unknown = [](std::string_view id) {
    return reject(IssueKind::unknown_course, fmt::format("unknown course '{}'", id),
                  {std::string(id)});
  };

  if (const auto* add = std::get_if<edit::AddCourse>(&e)) {
    if (c.contains(add->course.id))
      return reject(IssueKind::duplicate_course,
                    fmt::format("duplicate course id '{}'", add->course.id), {add->course.id});
    d.courses.push_back(add->course);
    for (auto& p : d.plans) {
      if (p.terms.empty()) p.terms.emplace_back();
      std::size_t t = add->term.value_or(p.terms.size() - 1);
      if (t > p.terms.size())
        return reject(IssueKind::plan_completeness,
                      fmt::format("plan '{}': term {} out of range", p.name, t + 1), {});
      if (t == p.terms.size()) p.terms.emplace_back();
      p.terms[t].push_back(add->course.id);
    }
  } else if (const auto* rm = std::get_if<edit::RemoveCourse>(&e)) {
    if (!c.contains(rm->id)) return unknown(rm->id);
    std::erase_if(d.courses, [&](const Course& x) { return x.id == rm->id; });
    std::erase_if(d.requisites,
                  [&](const Requisite& r) { return r.source == rm->id || r.target == rm->id; });
    // a term emptied by the removal goes with it
    for (auto& p : d.plans) {
      for (std::size_t t = 0; t < p.terms.size(); ++t) {
        if (std::erase(p.terms[t], rm->id) > 0 && p.terms[t].empty()) {
          p.terms.erase(p.terms.begin() + static_cast<std::ptrdiff_t>(t));
          break;
        }
      }
    }
  } else if (const auto* addr = std::get_if<edit::AddRequisite>(&e)) {
    d.requisites.push_back(addr->requisite);
  } else if (const auto* rmr = std::get_if<edit::RemoveRequisite>(&e)) {
    auto before = d.requisites.size();
    std::erase_if(d.requisites, [&](const Requisite& r) {
      return r.source == rmr->source && r.target == rmr->target &&
             (!rmr->kind || r.kind == *rmr->kind);
    });
    if (before == d.requisites.size())
      return reject(IssueKind::invalid_requisite,
                    fmt::format("no requisite {} -> {} to remove", rmr->source, rmr->target),
                    {rmr->source, rmr->target});
  } else if (const auto* mv = std::get_if<edit::MoveCourse>(&e)) {
    if (!c.contains(mv->id)) return unknown(mv->id);
    auto it = std::find_if(d.plans.begin(), d.plans.end(),
                           [&](const DegreePlan& p) { return p.name == mv->plan; });
    if (it == d.plans.end())
      return reject(IssueKind::plan_completeness, fmt::format("unknown plan '{}'", mv->plan), {});
    if (mv->term > it->terms.size())
      return reject(IssueKind::plan_completeness,
                    fmt::format("plan '{}': term {} out of range", mv->plan, mv->term + 1),
                    {mv->id});
    std::optional<std::size_t> from;
    for (std::size_t t = 0; t < it->terms.size(); ++t)
      if (std::erase(it->terms[t], mv->id) > 0) from = t;
    if (mv->term == it->terms.size()) it->terms.emplace_back();
    it->terms[mv->term].push_back(mv->id);
    if (from && it->terms[*from].empty()) it->terms.erase(it->terms.begin() + static_cast<std::ptrdiff_t>(*from));
  }

  return build_curriculum(std::move(d.name), std::move(d.courses), std::move(d.requisites),
                          std::move(d.plans));
}

Checked<Curriculum> apply_edits(const Curriculum& c, std::span<const Edit> edits) {
  Checked<Curriculum> current;
  current.value = c;
  for (const auto& e : edits) {
    auto next = apply_edit(*current.value, e);
    if (!next) return next;
    current = std::move(next);
  }
  return current;
}

}  // namespace curricula
