#include <atomic>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sortition/apportion.hpp"
#include "sortition/buckets.hpp"
#include "sortition/colgen.hpp"
#include "sortition/fixtures.hpp"
#include "sortition/greedy_equal.hpp"
#include "sortition/layout.hpp"
#include "sortition/report.hpp"
#include "sortition/rng.hpp"
#include "sortition/serialize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sortition;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSolver = 2;
constexpr int kExitIo = 3;

struct RunConfig {
  long long letters = 0;
  int budget = 0;
  std::string method = "greedy-equal";
  std::string target_function; // empty: constant for greedy-equal, sqrt otherwise
  CapRule cap_rule;
  std::uint64_t seed = 0;
  std::string deviation_scope = "selected_only";
  std::string csv_path;
  std::string fixture_name;
  int jobs = 1;

  std::string effective_target_function() const {
    if (!target_function.empty()) return target_function;
    return method == "greedy-equal" ? "constant" : "sqrt";
  }
  DeviationScope scope() const {
    return deviation_scope == "all_cities" ? DeviationScope::AllCities
                                           : DeviationScope::SelectedOnly;
  }
};

// Config file first, flags second: options bound before parse only change
// when the flag is actually present.
void load_config_file(int argc, char** argv, RunConfig& cfg) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) != "--config") continue;
    json doc = json::parse(read_file(argv[i + 1]));
    if (doc.contains("letters")) cfg.letters = doc["letters"].get<long long>();
    if (doc.contains("budget")) cfg.budget = doc["budget"].get<int>();
    if (doc.contains("method")) cfg.method = doc["method"].get<std::string>();
    if (doc.contains("target_function")) cfg.target_function = doc["target_function"].get<std::string>();
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("deviation_scope")) cfg.deviation_scope = doc["deviation_scope"].get<std::string>();
    if (doc.contains("csv")) cfg.csv_path = doc["csv"].get<std::string>();
    if (doc.contains("fixture")) cfg.fixture_name = doc["fixture"].get<std::string>();
    if (doc.contains("jobs")) cfg.jobs = doc["jobs"].get<int>();
    if (doc.contains("cap_rule")) {
      const json& r = doc["cap_rule"];
      if (r.contains("small_threshold")) cfg.cap_rule.small_threshold = r["small_threshold"].get<double>();
      if (r.contains("large_threshold")) cfg.cap_rule.large_threshold = r["large_threshold"].get<double>();
      if (r.contains("small_frac")) cfg.cap_rule.small_frac = r["small_frac"].get<double>();
      if (r.contains("large_frac")) cfg.cap_rule.large_frac = r["large_frac"].get<double>();
      if (r.contains("mid_cap")) cfg.cap_rule.mid_cap = r["mid_cap"].get<double>();
    }
  }
}

void add_instance_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--config", "structured run configuration (JSON); flags override");
  cmd->add_option("--csv", cfg.csv_path, "roster CSV (id,name,state,population)");
  cmd->add_option("--fixture", cfg.fixture_name, "embedded roster: example1|greedy-gap|bucket-gap|partition|synthetic42");
  cmd->add_option("--letters,-l", cfg.letters, "total letters to distribute");
  cmd->add_option("--budget,-t", cfg.budget, "maximum number of contacted cities");
  cmd->add_option("--cap-small-threshold", cfg.cap_rule.small_threshold);
  cmd->add_option("--cap-large-threshold", cfg.cap_rule.large_threshold);
  cmd->add_option("--cap-small-frac", cfg.cap_rule.small_frac);
  cmd->add_option("--cap-large-frac", cfg.cap_rule.large_frac);
  cmd->add_option("--cap-mid", cfg.cap_rule.mid_cap);
}

ProblemInstance build_instance(const RunConfig& cfg) {
  std::vector<City> roster;
  long long letters = cfg.letters;
  int budget = cfg.budget;
  if (!cfg.fixture_name.empty()) {
    Fixture f = fixture(cfg.fixture_name);
    roster = f.cities;
    if (letters == 0) letters = f.letters;
    if (budget == 0) budget = f.default_budget;
  } else if (!cfg.csv_path.empty()) {
    roster = load_roster_csv(cfg.csv_path);
    for (City& c : roster) c.cap = apply_cap_rule(c.population, cfg.cap_rule);
  } else {
    throw CLI::ValidationError("instance", "--csv or --fixture is required");
  }
  if (letters <= 0 || budget <= 0)
    throw CLI::ValidationError("instance", "--letters and --budget must be positive");
  return validate(std::move(roster), letters, budget);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir + ": " + ec.message());
}

json config_json(const RunConfig& cfg) {
  json c;
  c["letters"] = cfg.letters;
  c["budget"] = cfg.budget;
  c["method"] = cfg.method;
  c["target_function"] = cfg.effective_target_function();
  c["seed"] = cfg.seed;
  c["deviation_scope"] = cfg.deviation_scope;
  c["jobs"] = cfg.jobs;
  c["cap_rule"] = {{"small_threshold", cfg.cap_rule.small_threshold},
                   {"large_threshold", cfg.cap_rule.large_threshold},
                   {"small_frac", cfg.cap_rule.small_frac},
                   {"large_frac", cfg.cap_rule.large_frac},
                   {"mid_cap", cfg.cap_rule.mid_cap}};
  if (!cfg.csv_path.empty()) c["csv"] = cfg.csv_path;
  if (!cfg.fixture_name.empty()) c["fixture"] = cfg.fixture_name;
  return c;
}

void write_manifest(const std::string& dir, const RunConfig& cfg, const ProblemInstance& inst,
                    const std::vector<std::string>& artifacts, const std::string& status) {
  json m;
  m["version"] = "0.1.0";
  m["config"] = config_json(cfg);
  m["instance_digest"] = digest_hex(inst.digest);
  m["generator"] = SeededRng::generator_name();
  m["status"] = status;
  json a = json::array();
  for (const auto& name : artifacts) a.push_back(name);
  m["artifacts"] = std::move(a);
  write_file(dir + "/manifest.json", m.dump(2) + "\n");
}

// Solver outcome for one instance; shared by `solve` and the per-group runs.
struct SolveOutcome {
  bool ok = false;
  std::string failure;
  LetterDistribution distribution;
  std::optional<Layout> layout;
  std::optional<BucketsResult> bucket_result;
  std::optional<GreedyResult> greedy_result;
  std::vector<IterationLog> run_log;
  bool cg_optimal = false;
};

SolveOutcome run_method(const RunConfig& cfg, const ProblemInstance& inst, int t,
                        const TargetProfile& targets) {
  SolveOutcome out;
  if (cfg.method == "greedy-equal") {
    GreedyResult r = greedy_equal(inst, t);
    out.greedy_result = r;
    if (!r.ok()) {
      out.failure = "greedy-equal: " +
                    std::string(r.status == GreedyStatus::BudgetExceeded ? "budget exceeded"
                                : r.status == GreedyStatus::BelowWidthBound
                                    ? "budget below width bound"
                                    : "cap violated for an oversized city");
      return out;
    }
    out.layout = r.layout;
    out.distribution = extract_distribution(*r.layout, inst.n());
  } else if (cfg.method == "buckets") {
    BucketsResult r = buckets(inst, t, targets);
    out.bucket_result = r;
    if (!r.ok()) {
      out.failure = "buckets: " + std::string(r.status == BucketsStatus::BelowWidthBound
                                                  ? "budget below width bound"
                                                  : "cities left over after t buckets");
      return out;
    }
    out.layout = r.layout;
    out.distribution = extract_distribution(*r.layout, inst.n());
  } else if (cfg.method == "column-generation") {
    ProportionalConfig pc;
    pc.scope = cfg.scope();
    ProportionalResult r = optimize_proportional(inst, t, targets, pc);
    out.distribution = r.distribution;
    out.run_log = r.log;
    out.cg_optimal = r.optimal;
  } else {
    throw CLI::ValidationError("method", "unknown method '" + cfg.method + "'");
  }
  out.distribution.instance_digest = inst.digest;
  out.ok = true;
  return out;
}

void write_solve_artifacts(const std::string& dir, const RunConfig& cfg,
                           const ProblemInstance& inst, const TargetProfile& targets,
                           const SolveOutcome& out, std::vector<std::string>& artifacts) {
  (void)cfg;
  write_file(dir + "/instance.json", instance_to_json(inst));
  artifacts.push_back("instance.json");
  write_file(dir + "/distribution.json", distribution_to_json(out.distribution));
  artifacts.push_back("distribution.json");
  write_file(dir + "/metrics.csv", metrics_csv(inst, out.distribution, &targets));
  artifacts.push_back("metrics.csv");
  write_file(dir + "/proportionality.svg",
             render_proportionality(out.distribution, inst, targets));
  artifacts.push_back("proportionality.svg");
  if (out.layout) {
    write_file(dir + "/layout.json", layout_to_json(*out.layout));
    artifacts.push_back("layout.json");
    write_file(dir + "/stacked.svg", render_layout(*out.layout, inst.n(), RenderStyle::Stacked));
    artifacts.push_back("stacked.svg");
    write_file(dir + "/flat.svg", render_layout(*out.layout, inst.n(), RenderStyle::Flat));
    artifacts.push_back("flat.svg");
  }
  if (out.greedy_result) {
    write_file(dir + "/trace.json",
               trace_to_json(out.greedy_result->trace, out.greedy_result->status, inst.digest));
    artifacts.push_back("trace.json");
  }
  if (out.bucket_result && out.bucket_result->ok()) {
    write_file(dir + "/buckets.csv", buckets_to_csv(*out.bucket_result, inst));
    artifacts.push_back("buckets.csv");
  }
  if (!out.run_log.empty()) {
    write_file(dir + "/run_log.csv", run_log_to_csv(out.run_log));
    artifacts.push_back("run_log.csv");
  }
}

int cmd_ingest(const RunConfig& cfg, const std::string& out_path) {
  ProblemInstance inst = build_instance(cfg);
  WidthProfile wp = width_profile(inst);
  if (!out_path.empty()) write_file(out_path, instance_to_json(inst));
  std::cout << "cities: " << inst.n() << "\nletters: " << inst.letters
            << "\nbudget: " << inst.budget << "\nwidth_total: " << wp.total
            << "\nlower_bound_t: " << wp.lower_bound_t
            << "\ndigest: " << digest_hex(inst.digest) << "\n";
  for (const auto& w : inst.warnings) std::cout << "warning: " << w << "\n";
  return kExitOk;
}

int cmd_solve(const RunConfig& cfg, const std::string& out_dir) {
  ProblemInstance inst = build_instance(cfg);
  ensure_dir(out_dir);
  TargetProfile targets = inst.budget <= 1
                              ? point_profile(inst)
                              : solve_kappa(inst, cfg.effective_target_function(), inst.budget);
  SolveOutcome out = run_method(cfg, inst, inst.budget, targets);
  std::vector<std::string> artifacts;
  if (!out.ok) {
    write_file(out_dir + "/instance.json", instance_to_json(inst));
    artifacts.push_back("instance.json");
    if (out.greedy_result) {
      write_file(out_dir + "/trace.json",
                 trace_to_json(out.greedy_result->trace, out.greedy_result->status, inst.digest));
      artifacts.push_back("trace.json");
    }
    if (out.bucket_result) {
      json f;
      f["status"] = "cities_left_over";
      f["placed"] = out.bucket_result->placed;
      write_file(out_dir + "/buckets_failure.json", f.dump(2) + "\n");
      artifacts.push_back("buckets_failure.json");
    }
    write_manifest(out_dir, cfg, inst, artifacts, "failed: " + out.failure);
    std::cerr << "solver failed: " << out.failure << "\n";
    return kExitSolver;
  }
  write_solve_artifacts(out_dir, cfg, inst, targets, out, artifacts);
  write_manifest(out_dir, cfg, inst, artifacts, "ok");
  FairnessAudit audit = fairness_audit(inst, out.distribution);
  std::cout << "status: ok\nfairness_max_abs_error: " << audit.max_abs_error
            << "\nexpected_phi: " << expected_phi(out.distribution, targets) << "\n";
  return kExitOk;
}

int cmd_sample(const std::string& dist_path, const std::string& instance_path, int k,
               std::uint64_t seed, const std::string& out_path) {
  LetterDistribution dist = distribution_from_json(read_file(dist_path));
  std::vector<std::string> ids;
  if (!instance_path.empty()) {
    json inst = json::parse(read_file(instance_path));
    std::uint64_t digest = std::stoull(inst.at("digest").get<std::string>(), nullptr, 16);
    if (digest != dist.instance_digest)
      throw DigestMismatch("distribution and instance digests differ");
    for (const auto& c : inst.at("cities")) ids.push_back(c.at("id").get<std::string>());
  }
  long long letters = static_cast<long long>(std::llround(dist.entries.front().allocation.total()));

  SeededRng rng(seed);
  std::ostringstream os;
  os << "draw,city,letters\n";
  for (int draw = 0; draw < k; ++draw) {
    double rho = rng.uniform();
    Allocation a = sample(dist, rho);
    if (dist.mode == DistributionMode::Fractional)
      a = dependent_round(a, letters, rng.derive_seed());
    for (size_t i = 0; i < a.letters_per_city.size(); ++i) {
      if (a.letters_per_city[i] <= 0.0) continue;
      os << draw << ","
         << (ids.empty() ? "city-" + std::to_string(i) : ids[i]) << ","
         << static_cast<long long>(std::llround(a.letters_per_city[i])) << "\n";
    }
  }
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    write_file(out_path, os.str());
    // Sampling report sidecar: the seed and generator that produced the file.
    json m;
    m["seed"] = seed;
    m["generator"] = SeededRng::generator_name();
    m["draws"] = k;
    m["distribution_digest"] = digest_hex(dist.instance_digest);
    write_file(out_path + ".manifest.json", m.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_report(const std::string& instance_path, const std::string& dist_path,
               const std::string& layout_path, const std::string& target_fn,
               const std::string& out_dir) {
  json inst_doc = json::parse(read_file(instance_path));
  std::vector<City> roster;
  for (const auto& c : inst_doc.at("cities")) {
    City city;
    city.id = c.at("id").get<std::string>();
    city.name = c.at("name").get<std::string>();
    city.state = c.at("state").get<std::string>();
    city.population = c.at("population").get<double>();
    city.cap = c.at("cap").get<double>();
    roster.push_back(std::move(city));
  }
  ProblemInstance inst = validate(std::move(roster), inst_doc.at("letters").get<long long>(),
                                  inst_doc.at("budget").get<int>());
  LetterDistribution dist = distribution_from_json(read_file(dist_path));
  if (dist.instance_digest != inst.digest)
    throw DigestMismatch("distribution was produced for a different instance");

  ensure_dir(out_dir);
  std::optional<TargetProfile> targets;
  if (!target_fn.empty())
    targets = inst.budget <= 1 ? point_profile(inst) : solve_kappa(inst, target_fn, inst.budget);
  write_file(out_dir + "/metrics.csv",
             metrics_csv(inst, dist, targets ? &*targets : nullptr));
  if (targets)
    write_file(out_dir + "/proportionality.svg", render_proportionality(dist, inst, *targets));
  if (!layout_path.empty()) {
    Layout layout = layout_from_json(read_file(layout_path));
    if (layout.instance_digest != inst.digest)
      throw DigestMismatch("layout was produced for a different instance");
    write_file(out_dir + "/stacked.svg", render_layout(layout, inst.n(), RenderStyle::Stacked));
    write_file(out_dir + "/flat.svg", render_layout(layout, inst.n(), RenderStyle::Flat));
  }
  std::cout << "report written to " << out_dir << "\n";
  return kExitOk;
}

int min_t_for_method(const RunConfig& cfg, const ProblemInstance& local) {
  WidthProfile wp = width_profile(local);
  int lb = std::max(1, wp.lower_bound_t);
  if (cfg.method == "greedy-equal") {
    MinTResult r = min_t_greedy(local, local.n());
    if (!r.t) throw PricingStalled("greedy-equal finds no feasible budget for a group");
    return *r.t;
  }
  if (cfg.method == "buckets") {
    for (int t = lb; t <= local.n(); ++t) {
      TargetProfile targets =
          t <= 1 ? point_profile(local) : solve_kappa(local, cfg.effective_target_function(), t);
      if (buckets(local, t, targets).ok()) return t;
    }
    throw PricingStalled("buckets finds no feasible budget for a group");
  }
  MinTOutcome r = min_feasible_t(local, local.n());
  if (!r.t) throw PricingStalled("no feasible budget for a group");
  return *r.t;
}

int cmd_apportion(const RunConfig& cfg, const std::string& out_dir, bool solve_groups) {
  ProblemInstance inst = build_instance(cfg);
  ensure_dir(out_dir);
  TargetProfile global = inst.budget <= 1
                             ? point_profile(inst)
                             : solve_kappa(inst, cfg.effective_target_function(), inst.budget);
  auto groups = group_cities(inst, {20000.0, 100000.0});
  auto lg = letters_per_group(groups, inst.letters, cfg.seed);

  // Per-group minimum budgets for the chosen method (the apportionment must
  // honor what the solver itself needs). Local instances live at l_G.
  std::vector<ProblemInstance> locals;
  std::vector<int> mins(groups.size(), 1);
  for (size_t g = 0; g < groups.size(); ++g) {
    std::vector<City> members;
    for (int i : groups[g].members) {
      City c = inst.cities[static_cast<size_t>(i)];
      c.cap = c.cap_before_clamp;
      members.push_back(std::move(c));
    }
    locals.push_back(validate(std::move(members), lg[g], 1));
  }
  {
    std::atomic<size_t> next{0};
    std::vector<std::thread> workers;
    int jobs = std::max(1, cfg.jobs);
    for (int w = 0; w < jobs; ++w)
      workers.emplace_back([&]() {
        for (size_t g = next.fetch_add(1); g < groups.size(); g = next.fetch_add(1))
          mins[g] = min_t_for_method(cfg, locals[g]);
      });
    for (auto& w : workers) w.join();
  }

  std::vector<double> widths(static_cast<size_t>(inst.n()));
  for (int i = 0; i < inst.n(); ++i)
    widths[static_cast<size_t>(i)] = inst.fair_share(i) / global.tau[static_cast<size_t>(i)];
  ApportionResult ap = apportion_t(groups, widths, inst.budget, mins);
  GroupPlan plan =
      assemble_plan(inst, groups, lg, ap.budgets, ap.gamma, cfg.effective_target_function());

  std::vector<std::string> artifacts;
  write_file(out_dir + "/instance.json", instance_to_json(inst));
  artifacts.push_back("instance.json");
  write_file(out_dir + "/plan.csv", plan_to_csv(plan));
  artifacts.push_back("plan.csv");
  write_file(out_dir + "/local_vs_global.csv",
             group_report_to_csv(local_vs_global_report(plan, global)));
  artifacts.push_back("local_vs_global.csv");

  int exit_code = kExitOk;
  if (solve_groups) {
    struct GroupRun {
      std::string key;
      bool ok = false;
      std::string failure;
      double fairness_error = 0.0;
      double exp_phi = 0.0;
    };
    std::vector<GroupRun> runs(plan.entries.size());
    std::atomic<size_t> next{0};
    std::vector<std::thread> workers;
    int jobs = std::max(1, cfg.jobs);
    auto solve_one = [&](size_t g) {
      const GroupPlanEntry& entry = plan.entries[g];
      GroupRun& run = runs[g];
      run.key = entry.group.key();
      try {
        SolveOutcome out = run_method(cfg, entry.local, entry.budget.t_G, entry.local_targets);
        if (!out.ok) {
          run.failure = out.failure;
          return;
        }
        std::string dir = out_dir + "/groups/" + entry.group.state + "-" +
                          size_class_name(entry.group.size_class);
        ensure_dir(dir);
        std::vector<std::string> group_artifacts;
        write_solve_artifacts(dir, cfg, entry.local, entry.local_targets, out, group_artifacts);
        run.ok = true;
        run.fairness_error = fairness_audit(entry.local, out.distribution).max_abs_error;
        run.exp_phi = expected_phi(out.distribution, entry.local_targets);
      } catch (const std::exception& e) {
        run.failure = e.what();
      }
    };
    for (int w = 0; w < jobs; ++w)
      workers.emplace_back([&]() {
        for (size_t g = next.fetch_add(1); g < plan.entries.size(); g = next.fetch_add(1))
          solve_one(g);
      });
    for (auto& w : workers) w.join();

    std::ostringstream os;
    os << "group,status,fairness_max_abs_error,expected_phi\n";
    for (const auto& run : runs) {
      os << run.key << "," << (run.ok ? "ok" : "failed: " + run.failure) << ","
         << run.fairness_error << "," << run.exp_phi << "\n";
      if (!run.ok) exit_code = kExitSolver;
    }
    write_file(out_dir + "/group_runs.csv", os.str());
    artifacts.push_back("group_runs.csv");
  }
  write_manifest(out_dir, cfg, inst, artifacts, exit_code == kExitOk ? "ok" : "solver failures");
  std::cout << "plan: " << plan.entries.size() << " groups, gamma=" << plan.gamma << "\n";
  return exit_code;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"sortition outreach planner"};
  app.require_subcommand(1);

  RunConfig cfg;
  try {
    load_config_file(argc, argv, cfg);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitIo;
  }

  std::string out_path;
  std::string dist_path, instance_path, layout_path, target_fn;
  int k = 1;
  bool solve_groups = false;

  CLI::App* ingest = app.add_subcommand("ingest", "validate a roster and report widths");
  add_instance_options(ingest, cfg);
  ingest->add_option("--out,-o", out_path, "write the validated instance JSON here");

  CLI::App* solve_cmd = app.add_subcommand("solve", "run one solver and write artifacts");
  add_instance_options(solve_cmd, cfg);
  solve_cmd->add_option("--method,-m", cfg.method, "greedy-equal|buckets|column-generation");
  solve_cmd->add_option("--target-fn", cfg.target_function, "sqrt|constant|proportional");
  solve_cmd->add_option("--seed", cfg.seed, "seed recorded in the manifest");
  solve_cmd->add_option("--deviation-scope", cfg.deviation_scope, "selected_only|all_cities");
  solve_cmd->add_option("--out,-o", out_path, "output directory")->required();

  CLI::App* sample_cmd = app.add_subcommand("sample", "draw integral allocations");
  sample_cmd->add_option("--distribution,-d", dist_path, "distribution JSON")->required();
  sample_cmd->add_option("--instance", instance_path, "instance JSON for city ids and digest check");
  sample_cmd->add_option("-k,--draws", k, "number of draws");
  sample_cmd->add_option("--seed", cfg.seed, "RNG seed");
  sample_cmd->add_option("--out,-o", out_path, "CSV path (stdout if omitted)");

  CLI::App* report_cmd = app.add_subcommand("report", "recompute metrics and figures");
  report_cmd->add_option("--instance", instance_path, "instance JSON")->required();
  report_cmd->add_option("--distribution,-d", dist_path, "distribution JSON")->required();
  report_cmd->add_option("--layout", layout_path, "layout JSON (enables layout figures)");
  report_cmd->add_option("--target-fn", target_fn, "recompute targets for phi metrics");
  report_cmd->add_option("--out,-o", out_path, "output directory")->required();

  CLI::App* apportion_cmd =
      app.add_subcommand("apportion", "stratify, apportion budgets, optionally solve per group");
  add_instance_options(apportion_cmd, cfg);
  apportion_cmd->add_option("--method,-m", cfg.method, "solver whose minimum budgets gate t_G");
  apportion_cmd->add_option("--target-fn", cfg.target_function, "global target function");
  apportion_cmd->add_option("--seed", cfg.seed, "seed for letter rounding");
  apportion_cmd->add_option("--jobs,-j", cfg.jobs, "parallel group solves");
  apportion_cmd->add_flag("--solve", solve_groups, "run the solver per group");
  apportion_cmd->add_option("--deviation-scope", cfg.deviation_scope, "selected_only|all_cities");
  apportion_cmd->add_option("--out,-o", out_path, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(cfg, out_path);
    if (solve_cmd->parsed()) return cmd_solve(cfg, out_path);
    if (sample_cmd->parsed()) return cmd_sample(dist_path, instance_path, k, cfg.seed, out_path);
    if (report_cmd->parsed())
      return cmd_report(instance_path, dist_path, layout_path, target_fn, out_path);
    if (apportion_cmd->parsed()) return cmd_apportion(cfg, out_path, solve_groups);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "invalid instance: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DigestMismatch& e) {
    std::cerr << "artifact mismatch: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitIo;
  } catch (const PricingStalled& e) {
    std::cerr << "solver failed: " << e.what() << "\n";
    return kExitSolver;
  } catch (const InfeasibleStart& e) {
    std::cerr << "solver failed: " << e.what() << "\n";
    return kExitSolver;
  } catch (const WidthOutOfRange& e) {
    std::cerr << "solver failed: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
