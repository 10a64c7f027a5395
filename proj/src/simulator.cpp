#include "curricula/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>

#include "curricula/metrics.hpp"

namespace curricula {

double PassRateTable::rate(std::string_view id) const {
  auto it = overrides.find(id);
  return it == overrides.end() ? default_rate : it->second;
}

std::string_view to_string(SimMode mode) {
  switch (mode) {
    case SimMode::analytic:
      return "analytic";
    case SimMode::monte_carlo:
      return "monte_carlo";
    case SimMode::exact:
      return "exact";
  }
  return "analytic";
}

std::optional<SimMode> sim_mode_from_string(std::string_view text) {
  if (text == "analytic") return SimMode::analytic;
  if (text == "monte_carlo" || text == "mc") return SimMode::monte_carlo;
  if (text == "exact") return SimMode::exact;
  return std::nullopt;
}

namespace {

// Deterministic parts of the enrollment rule shared by all modes.
struct Enrollment {
  const Curriculum& c;
  std::size_t n;
  int plan_length;
  std::vector<int> plan_term;     // 0-based
  std::vector<int> first_term;    // 1-based, 0 for gated courses
  std::vector<bool> gated;
  std::vector<std::size_t> topo;
  std::vector<std::size_t> by_priority;
  std::vector<int> term_load;
  int max_load = 0;
  EnrollmentPolicy policy;

  Enrollment(const Curriculum& cur, const DegreePlan& plan, const EnrollmentPolicy& pol)
      : c(cur),
        n(cur.size()),
        plan_length(static_cast<int>(plan.terms.size())),
        plan_term(cur.size(), 0),
        first_term(cur.size(), 0),
        gated(cur.size(), false),
        topo(cur.topological_indices()),
        policy(pol) {
    if (policy.extra_new_courses_per_term < 0)
      throw SimulationError("extra_new_courses_per_term must be non-negative");
    auto report = check_plan(c, plan);
    if (!report.ok())
      throw SimulationError(fmt::format("plan '{}' is invalid: {}", plan.name,
                                        report.errors.front().message));
    for (std::size_t t = 0; t < plan.terms.size(); ++t) {
      for (const auto& id : plan.terms[t]) plan_term[c.index_of(id)] = static_cast<int>(t);
      term_load.push_back(static_cast<int>(plan.terms[t].size()));
      max_load = std::max(max_load, term_load.back());
    }
    const auto complexity = course_complexities(c);
    by_priority.resize(n);
    std::iota(by_priority.begin(), by_priority.end(), std::size_t{0});
    std::sort(by_priority.begin(), by_priority.end(), [&](std::size_t a, std::size_t b) {
      auto key = [&](std::size_t v) {
        return policy.priority == NewCoursePriority::plan_term
                   ? std::make_tuple(plan_term[v], -complexity[v])
                   : std::make_tuple(static_cast<int>(-complexity[v]),
                                     static_cast<std::int64_t>(plan_term[v]));
      };
      auto ka = key(a), kb = key(b);
      if (ka != kb) return ka < kb;
      return c.courses()[a].id < c.courses()[b].id;
    });

    for (std::size_t v = 0; v < n; ++v) gated[v] = !c.predecessors(v).empty();
    std::size_t pending = static_cast<std::size_t>(std::count(gated.begin(), gated.end(), false));
    for (int t = 1; pending > 0; ++t) {
      int slots = load(t) + policy.extra_new_courses_per_term;
      for (std::size_t v : by_priority) {
        if (slots == 0) break;
        if (gated[v] || first_term[v] != 0) continue;
        first_term[v] = t;
        --slots;
        --pending;
      }
      if (t > plan_length + static_cast<int>(n) + 1)
        throw SimulationError("enrollment policy leaves courses unscheduled");
    }
  }

  int load(int term) const { return term <= plan_length ? term_load[term - 1] : 0; }

  int capacity(int term) const {
    int base = term <= plan_length ? term_load[term - 1] : max_load;
    return base + policy.extra_new_courses_per_term;
  }

  // Courses a student with the given passed set takes in `term` (1-based).
  template <class Passed>
  void enroll(const Passed& passed, int term, std::vector<char>& out) const {
    out.assign(n, 0);
    for (std::size_t v : topo) {
      if (passed(v)) continue;
      if (!gated[v]) {
        out[v] = first_term[v] <= term;
        continue;
      }
      bool open = true;
      for (const Arc& a : c.predecessors(v)) {
        if (a.kind == RequisiteKind::prereq)
          open = open && passed(a.to);
        else
          open = open && (passed(a.to) || out[a.to]);
      }
      out[v] = open;
    }
    if (!policy.retakes_capped) return;
    int cap = capacity(term);
    std::vector<char> chosen(n, 0);
    bool grew = true;
    while (grew && cap > 0) {
      grew = false;
      for (std::size_t v : by_priority) {
        if (cap == 0) break;
        if (!out[v] || chosen[v]) continue;
        bool coreqs_ok = true;
        for (const Arc& a : c.predecessors(v))
          if (a.kind != RequisiteKind::prereq && !passed(a.to) && !chosen[a.to]) coreqs_ok = false;
        if (!coreqs_ok) continue;
        chosen[v] = 1;
        --cap;
        grew = true;
        break;  // restart so priority order is honored after each pick
      }
    }
    out = std::move(chosen);
  }
};

std::vector<double> course_rates(const Curriculum& c, const PassRateTable& table) {
  std::vector<double> p(c.size());
  for (const auto& [id, rate] : table.overrides)
    if (!c.contains(id)) throw SimulationError(fmt::format("pass-rate override for unknown course '{}'", id));
  for (std::size_t v = 0; v < c.size(); ++v) {
    p[v] = table.rate(c.courses()[v].id);
    if (!(p[v] >= 0.0 && p[v] <= 1.0))
      throw SimulationError(
          fmt::format("pass rate for '{}' must be in [0,1], got {}", c.courses()[v].id, p[v]));
  }
  return p;
}

SimResult empty_result(const Curriculum& c, const SimulationConfig& cfg, const DegreePlan& plan) {
  SimResult r;
  r.mode = cfg.mode;
  r.plan = plan.name;
  r.plan_length = static_cast<int>(plan.terms.size());
  r.horizon_terms = cfg.horizon_terms;
  for (const auto& course : c.courses()) r.course_ids.push_back(course.id);
  r.cumulative.assign(c.size(), std::vector<double>(cfg.horizon_terms, 0.0));
  r.grad_rate.assign(cfg.horizon_terms, 0.0);
  return r;
}

void run_analytic(const Curriculum& c, const Enrollment& e, const std::vector<double>& p,
                  SimResult& r) {
  const int horizon = r.horizon_terms;
  // cum[v][t] for t = 0..horizon, cum[v][0] = 0
  std::vector<std::vector<double>> cum(c.size(), std::vector<double>(horizon + 1, 0.0));
  for (std::size_t v : e.topo) {
    std::vector<double> gate(horizon + 1, 0.0);  // P(first attempt <= t)
    for (int t = 1; t <= horizon; ++t) {
      if (!e.gated[v]) {
        gate[t] = t >= e.first_term[v] ? 1.0 : 0.0;
        continue;
      }
      double g = 1.0;
      for (const Arc& a : c.predecessors(v))
        g *= a.kind == RequisiteKind::prereq ? cum[a.to][t - 1] : cum[a.to][t];
      gate[t] = g;
    }
    for (int t = 1; t <= horizon; ++t) {
      double total = 0.0;
      for (int tau = 1; tau <= t; ++tau) {
        double mass = gate[tau] - gate[tau - 1];
        if (mass == 0.0) continue;
        total += mass * (1.0 - std::pow(1.0 - p[v], t - tau + 1));
      }
      cum[v][t] = total;
    }
  }
  for (std::size_t v = 0; v < c.size(); ++v)
    for (int t = 1; t <= horizon; ++t) r.cumulative[v][t - 1] = cum[v][t];
  for (int t = 1; t <= horizon; ++t) {
    double g = 1.0;
    for (std::size_t v = 0; v < c.size(); ++v) g *= cum[v][t];
    r.grad_rate[t - 1] = c.size() == 0 ? 1.0 : g;
  }
}

void run_exact(const Curriculum& c, const Enrollment& e, const std::vector<double>& p,
               const SimulationConfig& cfg, SimResult& r) {
  const std::size_t n = c.size();
  const std::uint32_t full = n == 32 ? ~0u : ((1u << n) - 1u);
  std::unordered_map<std::uint32_t, double> dist{{0u, 1.0}};
  std::vector<char> enrolled;
  for (int t = 1; t <= r.horizon_terms; ++t) {
    if (cfg.deadline && std::chrono::steady_clock::now() > *cfg.deadline)
      throw BudgetExceeded("simulation budget exceeded");
    std::unordered_map<std::uint32_t, double> next;
    next.reserve(dist.size() * 2);
    for (const auto& [state, prob] : dist) {
      auto passed = [s = state](std::size_t v) { return (s >> v) & 1u; };
      e.enroll(passed, t, enrolled);
      std::vector<std::size_t> taking;
      for (std::size_t v = 0; v < n; ++v)
        if (enrolled[v]) taking.push_back(v);
      const std::size_t k = taking.size();
      for (std::uint32_t outcome = 0; outcome < (1u << k); ++outcome) {
        double q = prob;
        std::uint32_t s = state;
        for (std::size_t i = 0; i < k; ++i) {
          std::size_t v = taking[i];
          if ((outcome >> i) & 1u) {
            q *= p[v];
            s |= 1u << v;
          } else {
            q *= 1.0 - p[v];
          }
        }
        if (q != 0.0) next[s] += q;
      }
    }
    dist = std::move(next);
    for (const auto& [state, prob] : dist) {
      for (std::size_t v = 0; v < n; ++v)
        if ((state >> v) & 1u) r.cumulative[v][t - 1] += prob;
      if (state == full) r.grad_rate[t - 1] += prob;
    }
  }
}

// Counter-based stream: every (seed, student, draw) triple maps to a fixed
// uniform, so results do not depend on how students are split over threads.
class StudentStream {
 public:
  StudentStream(std::uint64_t seed, std::uint64_t student)
      : key_(mix(seed ^ 0x6a09e667f3bcc909ULL) ^ mix(student + 0x3c6ef372fe94f82bULL)) {}

  double uniform() { return static_cast<double>(mix(key_ + mix(counter_++)) >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

void run_monte_carlo(const Curriculum& c, const Enrollment& e, const std::vector<double>& p,
                     const SimulationConfig& cfg, SimResult& r) {
  const std::size_t n = c.size();
  const int horizon = r.horizon_terms;
  const std::uint64_t students = cfg.students;
  unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(1, students)));

  // counts[w][v * horizon + t]: students of worker w passed v by term t+1;
  // the row at index n holds graduates.
  std::vector<std::vector<std::uint64_t>> counts(
      workers, std::vector<std::uint64_t>((n + 1) * static_cast<std::size_t>(horizon), 0));
  std::atomic<bool> expired{false};

  auto work = [&](unsigned w) {
    const std::uint64_t begin = students * w / workers;
    const std::uint64_t end = students * (w + 1) / workers;
    std::vector<char> passed(n), enrolled;
    std::vector<int> passed_at(n);
    auto& mine = counts[w];
    for (std::uint64_t s = begin; s < end; ++s) {
      if ((s & 1023u) == 0 && cfg.deadline) {
        if (expired.load(std::memory_order_relaxed)) return;
        if (std::chrono::steady_clock::now() > *cfg.deadline) {
          expired = true;
          return;
        }
      }
      StudentStream rng(cfg.seed, s);
      std::fill(passed.begin(), passed.end(), 0);
      std::fill(passed_at.begin(), passed_at.end(), horizon + 1);
      std::size_t remaining = n;
      int graduated_at = n == 0 ? 1 : horizon + 1;
      for (int t = 1; t <= horizon && remaining > 0; ++t) {
        e.enroll([&](std::size_t v) { return passed[v] != 0; }, t, enrolled);
        for (std::size_t v : e.topo) {
          if (!enrolled[v]) continue;
          if (rng.uniform() < p[v]) passed_at[v] = t;
        }
        for (std::size_t v = 0; v < n; ++v) {
          if (passed_at[v] == t) {
            passed[v] = 1;
            --remaining;
          }
        }
        if (remaining == 0) graduated_at = t;
      }
      for (std::size_t v = 0; v < n; ++v)
        for (int t = passed_at[v]; t <= horizon; ++t) ++mine[v * horizon + (t - 1)];
      for (int t = graduated_at; t <= horizon; ++t) ++mine[n * horizon + (t - 1)];
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  if (expired) throw BudgetExceeded("simulation budget exceeded");

  const double total = static_cast<double>(students);
  r.students = students;
  r.seed = cfg.seed;
  r.cumulative_std_error.assign(n, std::vector<double>(horizon, 0.0));
  r.grad_std_error.assign(horizon, 0.0);
  auto se = [total](double q) { return std::sqrt(q * (1.0 - q) / total); };
  for (std::size_t row = 0; row <= n; ++row) {
    for (int t = 0; t < horizon; ++t) {
      std::uint64_t sum = 0;
      for (const auto& mine : counts) sum += mine[row * horizon + t];
      double q = static_cast<double>(sum) / total;
      if (row < n) {
        r.cumulative[row][t] = q;
        r.cumulative_std_error[row][t] = se(q);
      } else {
        r.grad_rate[t] = q;
        r.grad_std_error[t] = se(q);
      }
    }
  }
}

}  // namespace

std::map<std::string, std::optional<int>> first_attempt_schedule(const Curriculum& c,
                                                                 const DegreePlan& plan,
                                                                 const EnrollmentPolicy& policy) {
  Enrollment e(c, plan, policy);
  std::map<std::string, std::optional<int>> out;
  for (std::size_t v = 0; v < c.size(); ++v)
    out[c.courses()[v].id] = e.gated[v] ? std::nullopt : std::optional<int>(e.first_term[v]);
  return out;
}

SimResult simulate(const Curriculum& c, const SimulationConfig& cfg) {
  const DegreePlan* plan = c.find_plan(cfg.plan);
  if (!plan) throw SimulationError(fmt::format("unknown plan '{}'", cfg.plan));
  const int plan_length = static_cast<int>(plan->terms.size());
  if (cfg.horizon_terms < plan_length || cfg.horizon_terms <= 0)
    throw SimulationError(fmt::format("horizon of {} terms is shorter than plan '{}' ({} terms)",
                                      cfg.horizon_terms, plan->name, plan_length));
  if (cfg.mode == SimMode::exact && c.size() > kExactModeMaxCourses)
    throw SimulationError(fmt::format("exact mode supports at most {} courses, curriculum has {}",
                                      kExactModeMaxCourses, c.size()));
  if (cfg.mode == SimMode::analytic && cfg.policy.retakes_capped)
    throw SimulationError("analytic mode requires uncapped retakes");
  if (cfg.mode == SimMode::monte_carlo && cfg.students == 0)
    throw SimulationError("monte_carlo mode needs at least one student");

  const auto p = course_rates(c, cfg.pass_rates);
  Enrollment e(c, *plan, cfg.policy);
  SimResult r = empty_result(c, cfg, *plan);
  switch (cfg.mode) {
    case SimMode::analytic:
      run_analytic(c, e, p, r);
      break;
    case SimMode::exact:
      run_exact(c, e, p, cfg, r);
      break;
    case SimMode::monte_carlo:
      run_monte_carlo(c, e, p, cfg, r);
      break;
  }
  return r;
}

double completion_at(const SimResult& r, double multiplier, int plan_length) {
  if (!(multiplier > 0.0)) throw SimulationError("horizon multiplier must be positive");
  const int term = static_cast<int>(std::ceil(multiplier * plan_length - 1e-9));
  if (term < 1 || term > r.horizon_terms)
    throw SimulationError(fmt::format("term {} ({}x of {} terms) is beyond the simulated horizon of {}",
                                      term, multiplier, plan_length, r.horizon_terms));
  return r.grad_rate[term - 1];
}

}  // namespace curricula
