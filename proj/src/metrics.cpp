#include "curricula/metrics.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>

#include <fmt/format.h>

namespace curricula {

std::string to_string(WideCount value) {
  if (value == 0) return "0";
  std::string digits;
  while (value > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

const CourseMetrics& MetricsReport::course(std::string_view id) const {
  for (const auto& m : courses)
    if (m.id == id) return m;
  throw CurriculumError(fmt::format("unknown course id '{}'", id));
}

namespace {

// Longest-chain and path-count dynamic programs over the DAG, one pass from
// the sources and one from the sinks.
struct PathStats {
  std::vector<std::int64_t> longest_in;   // vertices on the longest path ending at v
  std::vector<std::int64_t> longest_out;  // vertices on the longest path starting at v
  std::vector<WideCount> paths_in;        // source-to-v path count
  std::vector<WideCount> length_in;       // summed vertex counts of those paths
  std::vector<WideCount> paths_out;       // v-to-sink path count
  std::vector<WideCount> length_out;

  explicit PathStats(const Curriculum& c) {
    const std::size_t n = c.size();
    longest_in.assign(n, 1);
    longest_out.assign(n, 1);
    paths_in.assign(n, 0);
    length_in.assign(n, 0);
    paths_out.assign(n, 0);
    length_out.assign(n, 0);
    const auto& order = c.topological_indices();
    for (std::size_t v : order) {
      auto preds = c.predecessors(v);
      if (preds.empty()) {
        paths_in[v] = 1;
        length_in[v] = 1;
      }
      for (const Arc& a : preds) {
        longest_in[v] = std::max(longest_in[v], longest_in[a.to] + 1);
        paths_in[v] += paths_in[a.to];
        length_in[v] += length_in[a.to] + paths_in[a.to];
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      std::size_t v = *it;
      auto succs = c.successors(v);
      if (succs.empty()) {
        paths_out[v] = 1;
        length_out[v] = 1;
      }
      for (const Arc& a : succs) {
        longest_out[v] = std::max(longest_out[v], longest_out[a.to] + 1);
        paths_out[v] += paths_out[a.to];
        length_out[v] += length_out[a.to] + paths_out[a.to];
      }
    }
  }

  std::int64_t delay(std::size_t v) const { return longest_in[v] + longest_out[v] - 1; }
};

WideCount centrality_at(const Curriculum& c, const PathStats& s, std::size_t v) {
  if (c.predecessors(v).empty() || c.successors(v).empty()) return 0;
  // Each (source->v, v->sink) pair joins into one path; v is counted once.
  return s.length_in[v] * s.paths_out[v] + s.length_out[v] * s.paths_in[v] -
         s.paths_in[v] * s.paths_out[v];
}

std::int64_t count_true(const std::vector<bool>& mask) {
  return std::count(mask.begin(), mask.end(), true);
}

}  // namespace

std::int64_t delay_factor(const Curriculum& c, std::string_view id) {
  auto v = c.index_of(id);
  return PathStats(c).delay(v);
}

std::int64_t blocking_factor(const Curriculum& c, std::string_view id) {
  return count_true(reachable_mask(c, c.index_of(id), Direction::forward));
}

std::int64_t reachability_factor(const Curriculum& c, std::string_view id) {
  return count_true(reachable_mask(c, c.index_of(id), Direction::backward));
}

WideCount centrality(const Curriculum& c, std::string_view id) {
  auto v = c.index_of(id);
  return centrality_at(c, PathStats(c), v);
}

std::int64_t longest_path_length(const Curriculum& c) {
  if (c.size() == 0) return 0;
  PathStats s(c);
  return *std::max_element(s.longest_out.begin(), s.longest_out.end());
}

std::vector<std::vector<std::string>> longest_paths(const Curriculum& c, std::size_t max_paths,
                                                    bool* truncated) {
  std::vector<std::vector<std::string>> paths;
  if (truncated) *truncated = false;
  if (c.size() == 0) return paths;
  PathStats s(c);
  const std::int64_t length = *std::max_element(s.longest_out.begin(), s.longest_out.end());

  std::vector<std::size_t> current;
  bool stop = false;
  std::function<void(std::size_t)> walk = [&](std::size_t v) {
    if (stop) return;
    current.push_back(v);
    if (s.longest_out[v] == 1) {
      if (paths.size() == max_paths) {
        stop = true;
        if (truncated) *truncated = true;
      } else {
        std::vector<std::string> ids;
        for (auto x : current) ids.push_back(c.courses()[x].id);
        paths.push_back(std::move(ids));
      }
    } else {
      std::vector<std::size_t> next;
      for (const Arc& a : c.successors(v))
        if (s.longest_out[a.to] == s.longest_out[v] - 1) next.push_back(a.to);
      std::sort(next.begin(), next.end(),
                [&](auto a, auto b) { return c.courses()[a].id < c.courses()[b].id; });
      for (auto w : next) walk(w);
    }
    current.pop_back();
  };
  for (std::size_t v : c.topological_indices())
    if (s.longest_in[v] == 1 && s.longest_out[v] == length) walk(v);
  return paths;
}

std::vector<std::int64_t> course_complexities(const Curriculum& c) {
  PathStats s(c);
  std::vector<std::int64_t> out(c.size());
  for (std::size_t v = 0; v < c.size(); ++v)
    out[v] = s.delay(v) + count_true(reachable_mask(c, v, Direction::forward));
  return out;
}

MetricsReport curriculum_metrics(const Curriculum& c, std::size_t max_paths) {
  MetricsReport report;
  PathStats s(c);
  for (std::size_t v = 0; v < c.size(); ++v) {
    CourseMetrics m;
    m.id = c.courses()[v].id;
    m.delay = s.delay(v);
    m.blocking = count_true(reachable_mask(c, v, Direction::forward));
    m.reachability = count_true(reachable_mask(c, v, Direction::backward));
    m.centrality = centrality_at(c, s, v);
    m.complexity = m.delay + m.blocking;
    report.delay_total += m.delay;
    report.blocking_total += m.blocking;
    report.reachability_total += m.reachability;
    report.courses.push_back(std::move(m));
  }
  report.complexity = report.delay_total + report.blocking_total;
  if (c.size() > 0)
    report.longest_path_length = *std::max_element(s.longest_out.begin(), s.longest_out.end());
  report.longest_paths = longest_paths(c, max_paths, &report.longest_paths_truncated);
  return report;
}

// ---------------------------------------------------------------------------
// Degrees of freedom
// ---------------------------------------------------------------------------

namespace {

// Counts term assignments of `order` (a topologically ordered vertex subset)
// by backtracking, memoized on the terms of the vertices that still have
// unassigned successors plus the per-term load when capacity applies.
class AssignmentCounter {
 public:
  AssignmentCounter(const Curriculum& c, std::vector<std::size_t> order, int terms,
                    std::optional<int> cap, const std::vector<int>& earliest,
                    const std::vector<int>& latest)
      : c_(c),
        order_(std::move(order)),
        terms_(terms),
        cap_(cap),
        earliest_(earliest),
        latest_(latest),
        term_of_(c.size(), -1),
        load_(static_cast<std::size_t>(terms), 0) {
    // frontier_[k]: vertices among order_[0..k) with a successor in order_[k..)
    std::vector<std::size_t> position(c.size(), order_.size());
    for (std::size_t k = 0; k < order_.size(); ++k) position[order_[k]] = k;
    std::vector<std::size_t> last_use(order_.size(), 0);
    for (std::size_t k = 0; k < order_.size(); ++k) {
      for (const Arc& a : c.successors(order_[k]))
        if (position[a.to] < order_.size()) last_use[k] = std::max(last_use[k], position[a.to]);
    }
    frontier_.resize(order_.size() + 1);
    for (std::size_t k = 0; k <= order_.size(); ++k)
      for (std::size_t j = 0; j < k; ++j)
        if (last_use[j] >= k) frontier_[k].push_back(order_[j]);
    memo_.resize(order_.size() + 1);
  }

  WideCount count() { return count_from(0); }

 private:
  WideCount count_from(std::size_t k) {
    if (k == order_.size()) return 1;
    std::string key;
    auto append = [&key](int x) {
      key.push_back(static_cast<char>(x & 0xff));
      key.push_back(static_cast<char>((x >> 8) & 0xff));
    };
    for (auto v : frontier_[k]) append(term_of_[v]);
    if (cap_)
      for (int l : load_) append(l);
    if (auto it = memo_[k].find(key); it != memo_[k].end()) return it->second;

    const std::size_t v = order_[k];
    int lo = earliest_[v];
    int hi = latest_[v];
    for (const Arc& a : c_.predecessors(v)) {
      int tu = term_of_[a.to];
      switch (a.kind) {
        case RequisiteKind::prereq:
          lo = std::max(lo, tu + 1);
          break;
        case RequisiteKind::coreq:
          lo = std::max(lo, tu);
          break;
        case RequisiteKind::strict_coreq:
          lo = std::max(lo, tu);
          hi = std::min(hi, tu);
          break;
      }
    }
    WideCount total = 0;
    for (int t = lo; t <= hi; ++t) {
      if (cap_ && load_[t] >= *cap_) continue;
      term_of_[v] = t;
      ++load_[t];
      total += count_from(k + 1);
      --load_[t];
    }
    term_of_[v] = -1;
    memo_[k].emplace(std::move(key), total);
    return total;
  }

  const Curriculum& c_;
  std::vector<std::size_t> order_;
  int terms_;
  std::optional<int> cap_;
  const std::vector<int>& earliest_;
  const std::vector<int>& latest_;
  std::vector<int> term_of_;
  std::vector<int> load_;
  std::vector<std::vector<std::size_t>> frontier_;
  std::vector<std::map<std::string, WideCount>> memo_;
};

}  // namespace

WideCount degrees_of_freedom(const Curriculum& c, int num_terms, std::optional<int> max_per_term) {
  if (num_terms <= 0) throw CurriculumError("degrees_of_freedom: num_terms must be positive");
  if (max_per_term && *max_per_term <= 0)
    throw CurriculumError("degrees_of_freedom: max_per_term must be positive");
  const std::size_t n = c.size();
  if (n == 0) return 1;

  // Static term windows from prerequisite chains (coreq arcs weigh 0).
  std::vector<int> earliest(n, 0), latest(n, num_terms - 1);
  const auto& order = c.topological_indices();
  for (std::size_t v : order)
    for (const Arc& a : c.predecessors(v))
      earliest[v] = std::max(earliest[v], earliest[a.to] + (a.kind == RequisiteKind::prereq));
  std::vector<int> tail(n, 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    for (const Arc& a : c.successors(*it))
      tail[*it] = std::max(tail[*it], tail[a.to] + (a.kind == RequisiteKind::prereq));
  for (std::size_t v = 0; v < n; ++v) {
    latest[v] = num_terms - 1 - tail[v];
    if (earliest[v] > latest[v]) return 0;
  }
  if (max_per_term && static_cast<std::size_t>(*max_per_term) * num_terms < n) return 0;

  if (max_per_term) return AssignmentCounter(c, order, num_terms, max_per_term, earliest, latest).count();

  // Without a capacity, weakly connected components are independent.
  std::vector<std::size_t> component(n, n);
  std::size_t components = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (component[root] != n) continue;
    std::vector<std::size_t> stack{root};
    component[root] = components;
    while (!stack.empty()) {
      auto x = stack.back();
      stack.pop_back();
      auto visit = [&](std::span<const Arc> arcs) {
        for (const Arc& a : arcs)
          if (component[a.to] == n) {
            component[a.to] = components;
            stack.push_back(a.to);
          }
      };
      visit(c.successors(x));
      visit(c.predecessors(x));
    }
    ++components;
  }
  WideCount total = 1;
  for (std::size_t k = 0; k < components; ++k) {
    std::vector<std::size_t> members;
    for (std::size_t v : order)
      if (component[v] == k) members.push_back(v);
    if (members.size() == 1) {
      total *= static_cast<WideCount>(num_terms);
      continue;
    }
    total *= AssignmentCounter(c, std::move(members), num_terms, std::nullopt, earliest, latest)
                 .count();
  }
  return total;
}

}  // namespace curricula
