// Command-line front end.
//
// Exit codes: 0 success, 1 domain findings (invalid curriculum, infeasible
// plan, simulation rejected), 2 usage or I/O failure.

#include <algorithm>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "curricula/core.hpp"
#include "curricula/experiments.hpp"
#include "curricula/fixtures.hpp"
#include "curricula/io.hpp"
#include "curricula/metrics.hpp"
#include "curricula/planner.hpp"
#include "curricula/service.hpp"
#include "curricula/simulator.hpp"

using namespace curricula;

namespace {

constexpr int kOk = 0;
constexpr int kFindings = 1;
constexpr int kUsage = 2;

struct Exit {
  int code;
};

[[noreturn]] void fail(int code, const std::string& message) {
  std::cerr << "error: " << message << "\n";
  throw Exit{code};
}

void print_issues(std::ostream& out, const ValidationReport& report) {
  for (const auto& e : report.errors) fmt::print(out, "error [{}]: {}\n", to_string(e.kind), e.message);
  for (const auto& w : report.warnings)
    fmt::print(out, "warning [{}]: {}\n", to_string(w.kind), w.message);
}

// `fixture:NAME` loads a built-in curriculum.
Checked<Curriculum> read_curriculum(const std::string& path, bool lenient = false) {
  if (path.starts_with("fixture:")) {
    try {
      return {fixtures::get(path.substr(8)), {}};
    } catch (const CurriculumError& e) {
      fail(kUsage, fmt::format("{}: {}", path, e.what()));
    }
  }
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const IoError& e) {
    fail(kUsage, e.what());
  }
  return parse_curriculum(text, ParseOptions{lenient});
}

Curriculum load_curriculum(const std::string& path, bool lenient = false) {
  auto parsed = read_curriculum(path, lenient);
  if (!parsed) {
    std::cerr << path << ": invalid curriculum\n";
    print_issues(std::cerr, parsed.report);
    throw Exit{kFindings};
  }
  return std::move(*parsed.value);
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty() || output == "-") {
    std::cout << text;
    return;
  }
  try {
    write_text_file(output, text);
  } catch (const IoError& e) {
    fail(kUsage, fmt::format("--output: {}", e.what()));
  }
}

std::string pct(double fraction) { return fmt::format("{:.2f}", 100.0 * fraction); }

// ---- validate -------------------------------------------------------------

struct ValidateArgs {
  std::string file;
  bool lenient = false;
};

int run_validate(const ValidateArgs& a) {
  auto parsed = read_curriculum(a.file, a.lenient);
  if (!parsed) {
    fmt::print("{}: invalid\n", a.file);
    print_issues(std::cout, parsed.report);
    return kFindings;
  }
  const Curriculum& c = *parsed.value;
  fmt::print("{}: ok ({}: {} courses, {} requisites, {} plans)\n", a.file, c.name(), c.size(),
             c.requisites().size(), c.plans().size());
  ValidationReport warnings = parsed.report;
  warnings.warnings.insert(warnings.warnings.end(), c.warnings().begin(), c.warnings().end());
  print_issues(std::cout, warnings);
  return kOk;
}

// ---- metrics --------------------------------------------------------------

struct MetricsArgs {
  std::string file;
  bool per_course = false;
  std::string format = "table";
  std::size_t max_paths = 1000;
};

int run_metrics(const MetricsArgs& a) {
  Curriculum c = load_curriculum(a.file);
  auto m = curriculum_metrics(c, a.max_paths);
  if (a.format == "machine") {
    Json doc;
    doc["name"] = c.name();
    Json body = to_json(m);
    for (auto& [k, v] : body.items()) doc[k] = v;
    std::cout << doc.dump(2) << "\n";
    return kOk;
  }
  fmt::print("curriculum: {}\n", c.name());
  if (a.per_course) {
    std::size_t w = 6;
    for (const auto& cm : m.courses) w = std::max(w, cm.id.size());
    fmt::print("{:<{}}  {:>5}  {:>8}  {:>12}  {:>10}  {:>10}\n", "course", w, "delay", "blocking",
               "reachability", "centrality", "complexity");
    for (const auto& cm : m.courses)
      fmt::print("{:<{}}  {:>5}  {:>8}  {:>12}  {:>10}  {:>10}\n", cm.id, w, cm.delay, cm.blocking,
                 cm.reachability, to_string(cm.centrality), cm.complexity);
  }
  fmt::print("courses: {}\n", c.size());
  fmt::print("longest path length: {}\n", m.longest_path_length);
  fmt::print("delay total: {}\n", m.delay_total);
  fmt::print("blocking total: {}\n", m.blocking_total);
  fmt::print("structural complexity: {}\n", m.complexity);
  return kOk;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string file;
  std::string plan = "default";
  std::string pass_rates = "uniform:0.5";
  std::string mode = "analytic";
  double horizon_multiplier = 2.0;
  std::optional<int> horizon_terms;
  std::uint64_t students = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  int extra_slots = 1;
  bool retakes_capped = false;
  std::string format = "table";
};

PassRateTable load_pass_rates(const std::string& spec) {
  if (spec.starts_with("uniform:")) {
    double p = 0.0;
    try {
      std::size_t used = 0;
      p = std::stod(spec.substr(8), &used);
      if (used != spec.size() - 8) throw std::invalid_argument(spec);
    } catch (const std::exception&) {
      fail(kUsage, fmt::format("--pass-rates: cannot read a rate from '{}'", spec));
    }
    if (!(p >= 0.0 && p <= 1.0)) fail(kUsage, fmt::format("--pass-rates: rate {} outside [0,1]", p));
    return PassRateTable::uniform(p);
  }
  std::string text;
  try {
    text = read_text_file(spec);
  } catch (const IoError& e) {
    fail(kUsage, fmt::format("--pass-rates: {}", e.what()));
  }
  auto parsed = parse_pass_rates(text);
  if (!parsed) {
    std::cerr << spec << ": invalid pass-rate file\n";
    print_issues(std::cerr, parsed.report);
    throw Exit{kFindings};
  }
  return *parsed.value;
}

int run_simulate(const SimulateArgs& a) {
  Curriculum c = load_curriculum(a.file);
  const DegreePlan* plan = c.find_plan(a.plan);
  if (!plan) fail(kUsage, fmt::format("--plan: '{}' has no plan named '{}'", a.file, a.plan));
  auto mode = sim_mode_from_string(a.mode);
  if (!mode) fail(kUsage, fmt::format("--mode: unknown mode '{}'", a.mode));
  if (!(a.horizon_multiplier > 0.0))
    fail(kUsage, "--horizon-multiplier: must be positive");

  SimulationConfig cfg;
  cfg.plan = a.plan;
  cfg.pass_rates = load_pass_rates(a.pass_rates);
  cfg.mode = *mode;
  const int length = static_cast<int>(plan->terms.size());
  cfg.horizon_terms = a.horizon_terms ? *a.horizon_terms
                                      : static_cast<int>(std::ceil(a.horizon_multiplier * length - 1e-9));
  cfg.students = a.students;
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  cfg.policy.extra_new_courses_per_term = a.extra_slots;
  cfg.policy.retakes_capped = a.retakes_capped;

  SimResult r;
  try {
    r = simulate(c, cfg);
  } catch (const SimulationError& e) {
    fail(kFindings, e.what());
  }
  if (a.format == "machine") {
    Json doc = to_json(r);
    doc["config"] = to_json(cfg);
    std::cout << doc.dump(2) << "\n";
    return kOk;
  }

  fmt::print("curriculum: {}  plan: {} ({} terms)  mode: {}  horizon: {} terms\n", c.name(), r.plan,
             r.plan_length, to_string(r.mode), r.horizon_terms);
  if (r.mode == SimMode::monte_carlo) fmt::print("students: {}  seed: {}\n", r.students, r.seed);
  std::size_t w = 6;
  for (const auto& id : r.course_ids) w = std::max(w, id.size());
  fmt::print("{:<{}}", "course", w);
  for (int t = 1; t <= r.horizon_terms; ++t) fmt::print("  {:>7}", fmt::format("t{}", t));
  fmt::print("\n");
  for (std::size_t v = 0; v < r.course_ids.size(); ++v) {
    fmt::print("{:<{}}", r.course_ids[v], w);
    for (double x : r.cumulative[v]) fmt::print("  {:>7}", pct(x));
    fmt::print("\n");
  }
  fmt::print("{:<{}}", "grad", w);
  for (double x : r.grad_rate) fmt::print("  {:>7}", pct(x));
  fmt::print("\n");
  if (r.mode == SimMode::monte_carlo) {
    fmt::print("{:<{}}", "s.e.", w);
    for (double x : r.grad_std_error) fmt::print("  {:>7}", pct(x));
    fmt::print("\n");
  }
  return kOk;
}

// ---- compare --------------------------------------------------------------

struct CompareArgs {
  std::string a;
  std::string b;
  std::string format = "table";
};

int run_compare(const CompareArgs& args) {
  Curriculum ca = load_curriculum(args.a);
  Curriculum cb = load_curriculum(args.b);
  auto ma = curriculum_metrics(ca, 1);
  auto mb = curriculum_metrics(cb, 1);

  // Courses pair up by canonical name when both sides carry one, else by id.
  auto key_of = [](const Course& course) { return course.canonical_name.value_or(course.id); };
  std::map<std::string, std::pair<std::optional<std::int64_t>, std::optional<std::int64_t>>> rows;
  for (std::size_t v = 0; v < ca.size(); ++v) rows[key_of(ca.courses()[v])].first = ma.courses[v].complexity;
  for (std::size_t v = 0; v < cb.size(); ++v) rows[key_of(cb.courses()[v])].second = mb.courses[v].complexity;
  struct Diff {
    std::string key;
    std::optional<std::int64_t> a, b;
    std::int64_t delta;
  };
  std::vector<Diff> diffs;
  for (const auto& [key, pair] : rows) {
    auto delta = pair.second.value_or(0) - pair.first.value_or(0);
    if (delta != 0 || !pair.first || !pair.second) diffs.push_back({key, pair.first, pair.second, delta});
  }
  std::stable_sort(diffs.begin(), diffs.end(), [](const Diff& x, const Diff& y) {
    return std::abs(x.delta) > std::abs(y.delta);
  });
  if (diffs.size() > 5) diffs.resize(5);

  struct Total {
    std::string label;
    std::int64_t a, b;
  };
  std::vector<Total> totals = {
      {"courses", static_cast<std::int64_t>(ca.size()), static_cast<std::int64_t>(cb.size())},
      {"delay total", ma.delay_total, mb.delay_total},
      {"blocking total", ma.blocking_total, mb.blocking_total},
      {"structural complexity", ma.complexity, mb.complexity},
      {"longest path length", ma.longest_path_length, mb.longest_path_length},
  };

  if (args.format == "machine") {
    Json doc;
    doc["a"] = ca.name();
    doc["b"] = cb.name();
    Json t;
    for (const auto& row : totals) {
      std::string key = row.label;
      std::replace(key.begin(), key.end(), ' ', '_');
      t[key] = Json{{"a", row.a}, {"b", row.b}, {"delta", row.b - row.a}};
    }
    doc["totals"] = std::move(t);
    doc["course_diffs"] = Json::array();
    for (const auto& d : diffs)
      doc["course_diffs"].push_back(Json{{"course", d.key},
                                         {"a", d.a ? Json(*d.a) : Json(nullptr)},
                                         {"b", d.b ? Json(*d.b) : Json(nullptr)},
                                         {"delta", d.delta}});
    std::cout << doc.dump(2) << "\n";
    return kOk;
  }

  fmt::print("A: {}\nB: {}\n", ca.name(), cb.name());
  fmt::print("{:<22}  {:>8}  {:>8}  {:>8}\n", "", "A", "B", "delta");
  for (const auto& row : totals)
    fmt::print("{:<22}  {:>8}  {:>8}  {:>+8}\n", row.label, row.a, row.b, row.b - row.a);
  if (!diffs.empty()) {
    fmt::print("largest course complexity differences:\n");
    for (const auto& d : diffs)
      fmt::print("  {:<20}  {:>8}  {:>8}  {:>+8}\n", d.key, d.a ? fmt::to_string(*d.a) : "-",
                 d.b ? fmt::to_string(*d.b) : "-", d.delta);
  }
  return kOk;
}

// ---- enumerate ------------------------------------------------------------

struct EnumerateArgs {
  int courses = 4;
  int terms = 2;
  bool coreqs = false;
  bool no_dedupe = false;
  bool exclude_forward = false;
  bool simulate = false;
  double pass_rate = 0.5;
  std::optional<int> horizon;
  std::string mode = "analytic";
  std::uint64_t students = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  bool regress = false;
  std::string csv;
  std::string format = "table";
};

int run_enumerate(const EnumerateArgs& a) {
  EnumerationOptions opts{a.coreqs, !a.no_dedupe, a.exclude_forward};
  CurriculumSpace space;
  try {
    space = enumerate_balanced(a.courses, a.terms, opts);
  } catch (const ExperimentError& e) {
    fail(kUsage, e.what());
  }
  std::vector<std::int64_t> hs;
  for (const auto& m : space.members) hs.push_back(curriculum_metrics(m.curriculum, 1).complexity);
  std::vector<std::int64_t> sorted_hs = hs;
  std::sort(sorted_hs.begin(), sorted_hs.end());

  const bool simulate = a.simulate || a.regress || !a.csv.empty();
  std::vector<StudyPoint> study;
  std::optional<RegressionResult> fit;
  if (simulate) {
    auto mode = sim_mode_from_string(a.mode);
    if (!mode) fail(kUsage, fmt::format("--mode: unknown mode '{}'", a.mode));
    if (!(a.pass_rate >= 0.0 && a.pass_rate <= 1.0))
      fail(kUsage, fmt::format("--pass-rate: {} outside [0,1]", a.pass_rate));
    StudyOptions so;
    so.pass_rate = a.pass_rate;
    so.horizon_terms = a.horizon.value_or(2 * a.terms);
    so.mode = *mode;
    so.students = a.students;
    so.seed = a.seed;
    so.threads = a.threads;
    try {
      study = complexity_completion_study(space, so);
    } catch (const SimulationError& e) {
      fail(kFindings, e.what());
    }
    if (a.regress) {
      try {
        fit = fit_study(study);
      } catch (const ExperimentError& e) {
        fail(kFindings, e.what());
      }
    }
    if (!a.csv.empty()) {
      try {
        write_text_file(a.csv, study_csv(study));
      } catch (const IoError& e) {
        fail(kUsage, fmt::format("--csv: {}", e.what()));
      }
    }
  }

  if (a.format == "machine") {
    Json doc;
    doc["courses"] = a.courses;
    doc["terms"] = a.terms;
    doc["count"] = space.members.size();
    doc["members"] = Json::array();
    for (std::size_t i = 0; i < space.members.size(); ++i) {
      Json m;
      m["canonical_id"] = space.members[i].canonical_id;
      m["h"] = hs[i];
      if (simulate) m["completion"] = study[i].completion;
      doc["members"].push_back(std::move(m));
    }
    if (fit) doc["regression"] = Json{{"slope", fit->slope}, {"intercept", fit->intercept}, {"r_squared", fit->r_squared}};
    std::cout << doc.dump(2) << "\n";
    return kOk;
  }

  fmt::print("{} curricula\n", space.members.size());
  fmt::print("complexities: {}\n", fmt::join(sorted_hs, ","));
  if (a.simulate) {
    fmt::print("{:<24}  {:>4}  {:>10}\n", "canonical id", "h", "completion");
    for (const auto& p : study)
      fmt::print("{:<24}  {:>4}  {:>10}\n", p.canonical_id, p.complexity, pct(p.completion));
  }
  if (fit)
    fmt::print("completion = {:.4f} {:+.5f} * h   r^2 = {:.4f}  ({} points)\n", fit->intercept,
               fit->slope, fit->r_squared, fit->points.size());
  return kOk;
}

// ---- plan -----------------------------------------------------------------

struct PlanArgs {
  std::string file;
  int terms = 8;
  std::optional<double> max_credits;
  double min_credits = 0.0;
  std::string strategy = "balanced";
  std::string name = "generated";
  std::string output;
  std::string format = "table";
};

int run_plan(const PlanArgs& a) {
  Curriculum c = load_curriculum(a.file);
  auto strategy = plan_strategy_from_string(a.strategy);
  if (!strategy) fail(kUsage, fmt::format("--strategy: unknown strategy '{}'", a.strategy));
  if (a.terms <= 0) fail(kUsage, "--terms: must be positive");
  PlanConstraints k;
  k.num_terms = a.terms;
  if (a.max_credits) {
    if (!(*a.max_credits > 0)) fail(kUsage, "--max-credits: must be positive");
    k.max_credits_per_term = *a.max_credits;
  }
  k.min_credits_per_term = a.min_credits;

  DegreePlan plan;
  try {
    plan = generate_plan(c, k, *strategy, a.name);
  } catch (const InfeasiblePlan& e) {
    fail(kFindings, fmt::format("infeasible plan: {}", e.what()));
  }
  auto profile = plan_profile(c, plan);

  if (!a.output.empty()) {
    std::vector<DegreePlan> plans;
    for (const auto& p : c.plans())
      if (p.name != plan.name) plans.push_back(p);
    plans.push_back(plan);
    auto with_plan = build_curriculum(c.name(), {c.courses().begin(), c.courses().end()},
                                      {c.requisites().begin(), c.requisites().end()}, plans);
    emit(serialize_curriculum(*with_plan), a.output);
  }

  if (a.format == "machine") {
    Json doc;
    doc["plan"] = to_json(plan);
    Json extra = to_json(profile);
    for (auto& [key, v] : extra.items()) doc[key] = v;
    std::cout << doc.dump(2) << "\n";
    return kOk;
  }
  for (std::size_t t = 0; t < plan.terms.size(); ++t)
    fmt::print("term {:>2}  credits {:>6.2f}  complexity {:>4}  {}\n", t + 1, profile.term_credits[t],
               profile.term_complexity[t], fmt::join(plan.terms[t], " "));
  fmt::print("peak term complexity: {}\n", profile.max_term_complexity);
  fmt::print("complexity variance: {:.2f}\n", profile.complexity_variance);
  return kOk;
}

// ---- export-dot -----------------------------------------------------------

struct DotArgs {
  std::string file;
  std::string cluster;
  bool highlight = false;
  std::string blocked_by;
  std::string output;
};

int run_dot(const DotArgs& a) {
  Curriculum c = load_curriculum(a.file);
  DotOptions opts;
  if (!a.cluster.empty()) {
    if (!c.find_plan(a.cluster)) fail(kUsage, fmt::format("--cluster: no plan named '{}'", a.cluster));
    opts.cluster_by_plan = a.cluster;
  }
  if (!a.blocked_by.empty()) {
    if (!c.contains(a.blocked_by)) fail(kUsage, fmt::format("--blocked-by: unknown course '{}'", a.blocked_by));
    opts.shade_blocked_by = a.blocked_by;
  }
  opts.highlight_longest_paths = a.highlight;
  emit(export_dot(c, opts), a.output);
  return kOk;
}

// ---- serve ----------------------------------------------------------------

struct ServeArgs {
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string data_dir;
  std::string static_dir;
  int budget_ms = 10000;
};

service::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int run_serve(const ServeArgs& a) {
  service::ServiceOptions opts;
  if (!a.data_dir.empty()) opts.data_dir = a.data_dir;
  if (!a.static_dir.empty()) opts.static_dir = a.static_dir;
  opts.simulation_budget = std::chrono::milliseconds(a.budget_ms);
  std::optional<service::Api> api;
  try {
    api.emplace(opts);
  } catch (const std::exception& e) {
    fail(kUsage, fmt::format("--data-dir: {}", e.what()));
  }
  service::HttpServer server(*api);
  int port = server.bind(a.host, a.port);
  if (port < 0) fail(kUsage, fmt::format("--port: cannot listen on {}:{}", a.host, a.port));
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  fmt::print("listening on http://{}:{}\n", a.host, port);
  std::cout.flush();
  server.listen();
  g_server = nullptr;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structural complexity, completion simulation and planning for curricula"};
  app.require_subcommand(1);
  app.footer("Curriculum arguments accept a file path or fixture:NAME (e.g. fixture:CHAIN4).");
  const std::vector<std::string> formats = {"table", "machine"};
  int code = kOk;

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Check a curriculum file");
  validate->add_option("file", va.file, "Curriculum file")->required();
  validate->add_flag("--lenient", va.lenient, "Warn about unknown fields instead of rejecting them");
  validate->callback([&] { code = run_validate(va); });

  MetricsArgs ma;
  auto* metrics = app.add_subcommand("metrics", "Delay, blocking and structural complexity");
  metrics->add_option("file", ma.file, "Curriculum file")->required();
  metrics->add_flag("--per-course", ma.per_course, "Print per-course factors");
  metrics->add_option("--format", ma.format, "Output format")->check(CLI::IsMember(formats))->capture_default_str();
  metrics->add_option("--max-paths", ma.max_paths, "Cap on listed longest paths")->capture_default_str();
  metrics->callback([&] { code = run_metrics(ma); });

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Simulate cohort progression through a degree plan");
  sim->add_option("file", sa.file, "Curriculum file")->required();
  sim->add_option("--plan", sa.plan, "Degree plan name")->capture_default_str();
  sim->add_option("--pass-rates", sa.pass_rates, "Pass-rate file or uniform:P")->capture_default_str();
  sim->add_option("--mode", sa.mode, "analytic, mc or exact")->capture_default_str();
  auto* mult = sim->add_option("--horizon-multiplier", sa.horizon_multiplier,
                               "Horizon as a multiple of the plan length")
                   ->capture_default_str();
  sim->add_option("--horizon-terms", sa.horizon_terms, "Horizon in terms")->excludes(mult)->check(CLI::PositiveNumber);
  sim->add_option("--students", sa.students, "Cohort size (mc)")->capture_default_str()->check(CLI::PositiveNumber);
  sim->add_option("--seed", sa.seed, "Random seed (mc)")->capture_default_str();
  sim->add_option("--threads", sa.threads, "Worker threads (mc); 0 = all cores")
      ->envname("CA_THREADS")
      ->capture_default_str();
  sim->add_option("--extra-slots", sa.extra_slots, "New courses pulled forward per term")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  sim->add_flag("--retakes-capped", sa.retakes_capped, "Retakes share the term's slots (mc, exact)");
  sim->add_option("--format", sa.format, "Output format")->check(CLI::IsMember(formats))->capture_default_str();
  sim->callback([&] { code = run_simulate(sa); });

  CompareArgs ca;
  auto* cmp = app.add_subcommand("compare", "Compare two curricula side by side");
  cmp->add_option("a", ca.a, "First curriculum")->required();
  cmp->add_option("b", ca.b, "Second curriculum")->required();
  cmp->add_option("--format", ca.format, "Output format")->check(CLI::IsMember(formats))->capture_default_str();
  cmp->callback([&] { code = run_compare(ca); });

  EnumerateArgs ea;
  auto* en = app.add_subcommand("enumerate", "Enumerate balanced curricula and study completion");
  en->add_option("--courses", ea.courses, "Number of courses")->capture_default_str();
  en->add_option("--terms", ea.terms, "Number of terms")->capture_default_str();
  en->add_flag("--coreqs", ea.coreqs, "Include co-requisites");
  en->add_flag("--no-dedupe", ea.no_dedupe, "Keep relabelings of the same curriculum");
  en->add_flag("--exclude-forward-edges", ea.exclude_forward, "Drop curricula with redundant requisites");
  en->add_flag("--simulate", ea.simulate, "Print the completion rate of every member");
  en->add_option("--pass-rate", ea.pass_rate, "Uniform pass rate")->capture_default_str();
  en->add_option("--horizon", ea.horizon, "Horizon in terms (default twice the term count)");
  en->add_option("--mode", ea.mode, "analytic, mc or exact")->capture_default_str();
  en->add_option("--students", ea.students, "Cohort size (mc)")->capture_default_str();
  en->add_option("--seed", ea.seed, "Random seed (mc)")->capture_default_str();
  en->add_option("--threads", ea.threads, "Worker threads; 0 = all cores")->envname("CA_THREADS")->capture_default_str();
  en->add_flag("--regress", ea.regress, "Fit completion against structural complexity");
  en->add_option("--csv", ea.csv, "Write the study as CSV");
  en->add_option("--format", ea.format, "Output format")->check(CLI::IsMember(formats))->capture_default_str();
  en->callback([&] { code = run_enumerate(ea); });

  PlanArgs pa;
  auto* pl = app.add_subcommand("plan", "Generate a degree plan");
  pl->add_option("file", pa.file, "Curriculum file")->required();
  pl->add_option("--terms", pa.terms, "Number of terms")->capture_default_str();
  pl->add_option("--max-credits", pa.max_credits, "Credit limit per term (default unlimited)");
  pl->add_option("--min-credits", pa.min_credits, "Credit minimum per term")->capture_default_str();
  pl->add_option("--strategy", pa.strategy, "frontload or balanced")->capture_default_str();
  pl->add_option("--name", pa.name, "Name of the generated plan")->capture_default_str();
  pl->add_option("-o,--output", pa.output, "Write the curriculum with the new plan");
  pl->add_option("--format", pa.format, "Output format")->check(CLI::IsMember(formats))->capture_default_str();
  pl->callback([&] { code = run_plan(pa); });

  DotArgs da;
  auto* dot = app.add_subcommand("export-dot", "Write a Graphviz description");
  dot->add_option("file", da.file, "Curriculum file")->required();
  dot->add_option("--cluster", da.cluster, "Group courses by the terms of this plan");
  dot->add_flag("--highlight-longest", da.highlight, "Draw longest-path edges bold");
  dot->add_option("--blocked-by", da.blocked_by, "Fill the courses this course blocks");
  dot->add_option("-o,--output", da.output, "Output file (default stdout)");
  dot->callback([&] { code = run_dot(da); });

  ServeArgs sv;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--port", sv.port, "Port; 0 picks a free one")->capture_default_str();
  serve->add_option("--host", sv.host, "Listen address")->capture_default_str();
  serve->add_option("--data-dir", sv.data_dir, "Persist curricula in this directory");
  serve->add_option("--static-dir", sv.static_dir, "Serve UI assets from this directory");
  serve->add_option("--budget-ms", sv.budget_ms, "Time budget per simulation request")->capture_default_str();
  serve->callback([&] { code = run_serve(sv); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  } catch (const Exit& e) {
    return e.code;
  } catch (const CurriculumError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFindings;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return code;
}
