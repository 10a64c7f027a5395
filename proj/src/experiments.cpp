#include "curricula/experiments.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <boost/math/statistics/linear_regression.hpp>
#include <fmt/format.h>

#include "curricula/metrics.hpp"

namespace curricula {
namespace {

constexpr std::uint64_t kMaxCombinations = std::uint64_t{1} << 24;

enum Relation : unsigned char { none = 0, prereq = 1, coreq = 2 };

struct Slot {
  int low;
  int high;
  bool same_term;
};

std::vector<std::vector<int>> within_term_relabelings(int n, int per_term) {
  // Cartesian product of the permutations of every term block.
  std::vector<std::vector<int>> result{std::vector<int>(n)};
  std::iota(result[0].begin(), result[0].end(), 0);
  for (int start = 0; start < n; start += per_term) {
    std::vector<std::vector<int>> next;
    for (const auto& base : result) {
      std::vector<int> block(per_term);
      std::iota(block.begin(), block.end(), start);
      do {
        auto perm = base;
        for (int k = 0; k < per_term; ++k) perm[start + k] = block[k];
        next.push_back(std::move(perm));
      } while (std::next_permutation(block.begin(), block.end()));
    }
    result = std::move(next);
  }
  return result;
}

using Matrix = std::vector<std::vector<unsigned char>>;

std::string encode(const Matrix& rel, const std::vector<Slot>& slots) {
  std::string code;
  code.reserve(slots.size());
  for (const auto& s : slots) {
    char digit = '0';
    if (rel[s.low][s.high] == prereq)
      digit = '1';
    else if (rel[s.low][s.high] == coreq)
      digit = '2';
    else if (rel[s.high][s.low] == coreq)
      digit = '3';
    code.push_back(digit);
  }
  return code;
}

std::string canonical_form(const Matrix& rel, const std::vector<Slot>& slots,
                           const std::vector<std::vector<int>>& relabelings) {
  const std::size_t n = rel.size();
  std::string best;
  Matrix moved(n, std::vector<unsigned char>(n, none));
  for (const auto& perm : relabelings) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) moved[perm[i]][perm[j]] = rel[i][j];
    auto code = encode(moved, slots);
    if (best.empty() || code < best) best = std::move(code);
  }
  return best;
}

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = count * w / workers; i < count * (w + 1) / workers; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

CurriculumSpace enumerate_balanced(int n_courses, int n_terms, EnumerationOptions options) {
  if (n_courses <= 0 || n_terms <= 0)
    throw ExperimentError("course and term counts must be positive");
  if (n_courses % n_terms != 0)
    throw ExperimentError(
        fmt::format("{} courses cannot be balanced over {} terms", n_courses, n_terms));
  const int per_term = n_courses / n_terms;
  auto term_of = [per_term](int v) { return v / per_term; };

  std::vector<Slot> slots;
  for (int i = 0; i < n_courses; ++i) {
    for (int j = i + 1; j < n_courses; ++j) {
      bool same = term_of(i) == term_of(j);
      if (same && !options.include_coreqs) continue;
      slots.push_back({i, j, same});
    }
  }
  // cross-term slots: none/prereq[/coreq]; same-term slots: none/coreq either way
  const int cross_choices = options.include_coreqs ? 3 : 2;
  std::uint64_t combinations = 1;
  for (const auto& s : slots) {
    combinations *= s.same_term ? 3 : cross_choices;
    if (combinations > kMaxCombinations)
      throw ExperimentError(
          fmt::format("space of {} courses over {} terms is too large to enumerate", n_courses,
                      n_terms));
  }

  const auto relabelings = within_term_relabelings(n_courses, per_term);
  std::vector<Course> courses;
  for (int v = 0; v < n_courses; ++v)
    courses.push_back({fmt::format("v{}", v + 1), fmt::format("Course {}", v + 1), 3.0, {}});
  DegreePlan plan{"default", {}};
  for (int t = 0; t < n_terms; ++t) {
    plan.terms.emplace_back();
    for (int k = 0; k < per_term; ++k) plan.terms.back().push_back(courses[t * per_term + k].id);
  }

  CurriculumSpace space;
  space.n_courses = n_courses;
  space.n_terms = n_terms;
  space.options = options;

  std::map<std::string, Matrix> unique;
  std::vector<std::pair<std::string, Matrix>> all;
  std::vector<int> digits(slots.size(), 0);
  Matrix rel(n_courses, std::vector<unsigned char>(n_courses, none));
  for (std::uint64_t index = 0; index < combinations; ++index) {
    for (auto& row : rel) std::fill(row.begin(), row.end(), none);
    for (std::size_t k = 0; k < slots.size(); ++k) {
      const auto& s = slots[k];
      switch (digits[k]) {
        case 1:
          rel[s.low][s.high] = s.same_term ? coreq : prereq;
          break;
        case 2:
          if (s.same_term)
            rel[s.high][s.low] = coreq;
          else
            rel[s.low][s.high] = coreq;
          break;
        default:
          break;
      }
    }
    // advance the mixed-radix counter
    for (std::size_t k = 0; k < slots.size(); ++k) {
      int radix = slots[k].same_term ? 3 : cross_choices;
      if (++digits[k] < radix) break;
      digits[k] = 0;
    }

    if (options.dedupe) {
      auto code = canonical_form(rel, slots, relabelings);
      unique.try_emplace(std::move(code), rel);
    } else {
      all.emplace_back(canonical_form(rel, slots, relabelings), rel);
    }
  }
  if (options.dedupe)
    for (auto& [code, m] : unique) all.emplace_back(code, std::move(m));

  for (auto& [code, m] : all) {
    std::vector<Requisite> reqs;
    for (int i = 0; i < n_courses; ++i)
      for (int j = 0; j < n_courses; ++j)
        if (m[i][j] != none)
          reqs.push_back({courses[i].id, courses[j].id,
                          m[i][j] == prereq ? RequisiteKind::prereq : RequisiteKind::coreq});
    auto built = build_curriculum(fmt::format("balanced {}x{} #{}", n_courses, n_terms, code),
                                  courses, std::move(reqs), {plan});
    if (!built) continue;  // same-term co-requisite cycles
    if (options.exclude_forward_edges && !built->warnings().empty()) continue;
    space.members.push_back({code, std::move(*built.value)});
  }
  return space;
}

std::vector<StudyPoint> complexity_completion_study(const CurriculumSpace& space,
                                                    const StudyOptions& options) {
  std::vector<StudyPoint> points(space.members.size());
  parallel_for(space.members.size(), options.threads, [&](std::size_t i) {
    const auto& member = space.members[i];
    auto metrics = curriculum_metrics(member.curriculum, 1);
    SimulationConfig cfg;
    cfg.plan = "default";
    cfg.pass_rates = PassRateTable::uniform(options.pass_rate);
    cfg.policy = options.policy;
    cfg.horizon_terms = options.horizon_terms;
    cfg.mode = options.mode;
    cfg.students = options.students;
    cfg.seed = options.seed;
    cfg.threads = 1;
    auto result = simulate(member.curriculum, cfg);
    points[i] = {member.canonical_id, metrics.complexity, metrics.delay_total,
                 metrics.blocking_total, result.grad_rate.back()};
  });
  return points;
}

RegressionResult linear_fit(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw ExperimentError("linear fit needs at least two points");
  RegressionResult fit;
  std::vector<double> x, y;
  for (const auto& [px, py] : points) {
    x.push_back(px);
    y.push_back(py);
  }
  fit.points = std::move(points);
  if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); })) {
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); }))
      throw ExperimentError("linear fit needs at least two distinct x values");
    fit.slope = 0.0;
    fit.intercept = y.front();
    fit.r_squared = 0.0;
    return fit;
  }
  try {
    auto [c0, c1, r2] =
        boost::math::statistics::simple_ordinary_least_squares_with_R_squared(x, y);
    fit.intercept = c0;
    fit.slope = c1;
    fit.r_squared = std::clamp(r2, 0.0, 1.0);
  } catch (const std::domain_error&) {
    throw ExperimentError("linear fit needs at least two distinct x values");
  }
  return fit;
}

RegressionResult fit_study(const std::vector<StudyPoint>& study) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : study) pts.emplace_back(static_cast<double>(p.complexity), p.completion);
  return linear_fit(std::move(pts));
}

std::string study_csv(const std::vector<StudyPoint>& study) {
  std::ostringstream out;
  out << "canonical_id,h,delay_total,blocking_total,completion\n";
  for (const auto& p : study)
    out << fmt::format("{},{},{},{},{:.17g}\n", p.canonical_id, p.complexity, p.delay_total,
                       p.blocking_total, p.completion);
  return out.str();
}

std::vector<std::pair<double, double>> pass_rate_sweep(const Curriculum& c, const std::string& plan,
                                                       const std::vector<double>& rates,
                                                       int horizon_terms, SimMode mode) {
  std::vector<std::pair<double, double>> curve;
  for (double rate : rates) {
    if (!(rate >= 0.0 && rate <= 1.0))
      throw ExperimentError(fmt::format("pass rate {} outside [0,1]", rate));
    SimulationConfig cfg;
    cfg.plan = plan;
    cfg.pass_rates = PassRateTable::uniform(rate);
    cfg.horizon_terms = horizon_terms;
    cfg.mode = mode;
    curve.emplace_back(rate, simulate(c, cfg).grad_rate.back());
  }
  return curve;
}

}  // namespace curricula
