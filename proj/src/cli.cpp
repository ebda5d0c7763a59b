#include "crowdmarket/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "crowdmarket/equilibrium.hpp"
#include "crowdmarket/error.hpp"
#include "crowdmarket/experiments.hpp"
#include "crowdmarket/io.hpp"
#include "crowdmarket/parallel.hpp"
#include "crowdmarket/reward.hpp"
#include "crowdmarket/scenario.hpp"

namespace crowdmarket::cli {
namespace {

using io::Json;

struct Options {
  std::string input;
  std::string reward;
  std::string output;
  std::string regime = "discriminatory";
  std::string evaluation = "model";
  std::string values;
  std::optional<std::uint64_t> seed;
  std::size_t replicates = 30;
  double epsilon = 1e-9;
  std::size_t max_iter = 100000;
  std::size_t steps = 0;
  std::vector<std::string> sets;
};

std::string fixed(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(6) << v;
  return os.str();
}

std::string fixed_vector(const Eigen::VectorXd& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) s += ", ";
    s += fixed(v(i));
  }
  return s + "]";
}

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

SolverConfig solver_config(const Options& o) {
  SolverConfig cfg;
  cfg.epsilon = o.epsilon;
  cfg.max_iter = o.max_iter;
  cfg.validate();
  return cfg;
}

RewardOptions reward_options(const Options& o) {
  RewardOptions opts;
  opts.solver = solver_config(o);
  return opts;
}

Json load_with_overrides(const std::string& path, const std::vector<std::string>& sets) {
  Json doc = io::load_json_file(path);
  io::apply_overrides(doc, sets);
  return doc;
}

void print_warnings(std::ostream& err, const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) err << "warning: " << w << '\n';
}

void emit(const Options& o, std::ostream& out, std::string_view text) {
  if (o.output.empty()) {
    out << text;
  } else {
    io::write_text_file(o.output, text);
  }
}

template <typename T>
std::vector<T> parse_list(const std::string& text, std::string_view flag) {
  std::vector<T> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    T value{};
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw ParseError(std::string(flag) + ": cannot parse '" + item + "'");
    }
    values.push_back(value);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return values;
}

ScenarioConfig scenario_config(const Options& o) {
  Json doc = o.input.empty() ? io::to_json(ScenarioConfig{}) : io::load_json_file(o.input);
  io::apply_overrides(doc, o.sets);
  ScenarioConfig cfg = io::scenario_from_json(doc);
  if (o.seed) cfg.seed = *o.seed;
  return cfg;
}

// Commands.

int cmd_check(const Options& o, std::ostream& out) {
  const MarketInstance inst = io::instance_from_json(load_with_overrides(o.input, o.sets));
  const Assumption1Report a1 = check_assumption1(inst);
  const Assumption2Report a2 = check_assumption2(inst);
  const PositiveDefiniteReport pd = check_positive_definite(inst);
  std::ostringstream margin;
  margin << std::fixed << std::setprecision(3) << a1.min_margin();
  out << "Assumption 1: " << verdict(a1.holds) << " (min margin " << margin.str() << ")\n";
  out << "Assumption 2: " << verdict(a2.holds) << " (c = " << fixed(a2.cost)
      << ", mean(a) + mu s = " << fixed(a2.threshold) << ")\n";
  out << "Positive definite: " << verdict(pd.positive_definite) << " (min eigenvalue "
      << fixed(pd.min_eigenvalue) << ")\n";
  return 0;
}

void print_equilibrium(std::ostream& out, const EquilibriumResult& eq,
                       const MarketInstance& inst, const RewardVector& r) {
  out << to_string(eq.method) << ":";
  if (eq.method == SolveMethod::kBestResponse) {
    out << (eq.converged ? " converged" : " not converged") << " after " << eq.iterations
        << " sweeps";
  } else {
    out << (eq.interior ? " interior" : " not interior");
  }
  out << ", fixed-point residual " << sci(eq.residual) << '\n';
  out << "  x = " << fixed_vector(eq.x.values()) << '\n';
  out << "  revenue = " << fixed(csp_revenue(inst, eq.x.values(), r)) << '\n';
}

int cmd_solve(const Options& o, std::ostream& out, std::ostream& err) {
  const MarketInstance inst = io::instance_from_json(load_with_overrides(o.input, o.sets));
  const RewardVector r = io::reward_from_json(io::load_json_file(o.reward));
  if (r.size() != inst.size()) {
    throw InvariantError("reward has length " + std::to_string(r.size()) +
                         " but the instance has " + std::to_string(inst.size()) + " users");
  }
  const SolverConfig cfg = solver_config(o);
  const EquilibriumResult br = solve_br_dynamics(inst, r, cfg);
  const EquilibriumResult cf = solve_closed_form(inst, r);
  print_equilibrium(out, br, inst, r);
  print_equilibrium(out, cf, inst, r);

  Json doc{{"best_response", io::to_json(br)}, {"closed_form", io::to_json(cf)}};
  if (br.assumption1_holds && cf.interior) {
    const double gap =
        kernels::linf_distance({cf.x.values().data(), cf.x.size()},
                               {br.x.values().data(), br.x.size()});
    out << "cross-validation: ||x_closed - x_br||_inf = " << sci(gap) << '\n';
    doc["cross_validation"] = gap;
  } else {
    out << "cross-validation: skipped ("
        << (br.assumption1_holds ? "closed form not interior" : "Assumption 1 violated")
        << ")\n";
    doc["cross_validation"] = nullptr;
  }
  print_warnings(err, br.warnings);
  print_warnings(err, cf.warnings);
  if (!o.output.empty()) io::write_text_file(o.output, doc.dump(2) + "\n");
  return 0;
}

ExpectationProfile expectation_for(const Json& doc, const MarketInstance& inst) {
  if (auto exp = io::expectation_from_json(doc)) return *exp;
  return ExpectationProfile{inst.a().mean(), inst.b().mean()};
}

int cmd_optimize(const Options& o, std::ostream& out, std::ostream& err) {
  const Json doc = load_with_overrides(o.input, o.sets);
  const MarketInstance inst = io::instance_from_json(doc);
  const Regime regime = parse_regime(o.regime);
  const RewardOptions opts = reward_options(o);
  RewardSolution sol;
  switch (regime) {
    case Regime::kDiscriminatory: sol = discriminatory_reward(inst, opts); break;
    case Regime::kUniform: sol = uniform_reward(inst, opts); break;
    case Regime::kUniformBound: sol = bound_reward(inst, expectation_for(doc, inst), opts); break;
  }

  const bool scalar = regime != Regime::kDiscriminatory;
  const auto& x = sol.equilibrium.x.values();
  out << "regime: " << to_string(regime) << '\n';
  out << "r* = " << (scalar ? fixed(sol.r[0]) : fixed_vector(sol.r.values()))
      << ", Π = " << fixed(sol.revenue) << '\n';
  out << "x = " << fixed_vector(x) << '\n';
  out << "total MU utility = " << fixed(sol.mu_utilities.sum()) << '\n';
  out << "total reward paid = " << fixed(total_reward_paid(sol.r, x)) << '\n';
  out << "equilibrium: " << to_string(sol.equilibrium.method)
      << (sol.model_interior ? ", interior" : ", not interior") << '\n';
  if (!sol.model_interior) {
    out << "model x = " << fixed_vector(sol.model_x.values()) << '\n';
    out << "model Π = " << fixed(sol.model_revenue) << '\n';
  }
  print_warnings(err, sol.warnings);
  if (!o.output.empty()) io::write_text_file(o.output, io::to_json(sol).dump(2) + "\n");
  return 0;
}

int cmd_oracle(const Options& o, std::ostream& out) {
  const MarketInstance inst = io::instance_from_json(load_with_overrides(o.input, o.sets));
  const Regime regime = parse_regime(o.regime);
  const RewardOptions opts = reward_options(o);
  Json doc;
  if (regime == Regime::kDiscriminatory) {
    const std::size_t steps = o.steps ? o.steps : kDiscriminatoryOracleSteps;
    const RewardRange range = kDiscriminatoryOracleRange;
    const double step = (range.hi - range.lo) / static_cast<double>(steps - 1);
    const RewardSolution closed = discriminatory_reward(inst, opts);
    const RewardVector grid = brute_force_discriminatory(inst, range, steps, opts);
    const double gap = (closed.r.values() - grid.values()).cwiseAbs().maxCoeff();
    const double grid_revenue = realized_revenue(inst, InfluenceOperator(inst), grid, opts.solver);
    out << "closed form: r* = " << fixed_vector(closed.r.values()) << ", Π = "
        << fixed(closed.revenue) << '\n';
    out << "grid (" << steps << " steps on [" << fixed(range.lo) << ", " << fixed(range.hi)
        << "]^" << inst.size() << "): r = " << fixed_vector(grid.values())
        << ", Π = " << fixed(grid_revenue) << '\n';
    out << "max |r* - r_grid| = " << fixed(gap) << " (grid step " << fixed(step) << ")\n";
    out << "agreement: " << verdict(gap <= step * (1.0 + 1e-9)) << '\n';
    doc = {{"regime", "discriminatory"}, {"closed_form", io::to_json(closed.r)["r"]},
           {"grid", io::to_json(grid)["r"]}, {"gap", gap}, {"grid_step", step}};
  } else {
    if (regime == Regime::kUniformBound) {
      throw InvariantError("oracle supports the discriminatory and uniform regimes");
    }
    const std::size_t steps = o.steps ? o.steps : kUniformOracleSteps;
    const RewardRange range = kUniformOracleRange;
    const double step = (range.hi - range.lo) / static_cast<double>(steps - 1);
    const RewardSolution closed = uniform_reward(inst, opts);
    const double grid = brute_force_uniform(inst, range, steps, opts);
    const double refined = golden_section_uniform(
        inst, RewardRange{std::max(range.lo, grid - step), std::min(range.hi, grid + step)},
        1e-10, opts);
    const double gap = std::abs(closed.r[0] - refined);
    out << "closed form: r* = " << fixed(closed.r[0]) << ", Π = " << fixed(closed.revenue)
        << '\n';
    out << "grid (" << steps << " steps on [" << fixed(range.lo) << ", " << fixed(range.hi)
        << "]): r = " << fixed(grid) << '\n';
    out << "golden-section refinement: r = " << fixed(refined) << '\n';
    out << "|r* - r_search| = " << sci(gap) << '\n';
    out << "agreement: " << verdict(gap <= 1e-4) << '\n';
    doc = {{"regime", "uniform"}, {"closed_form", closed.r[0]}, {"grid", grid},
           {"refined", refined}, {"gap", gap}};
  }
  if (!o.output.empty()) io::write_text_file(o.output, doc.dump(2) + "\n");
  return 0;
}

void print_trends(std::ostream& out, std::span<const ExperimentRecord> records,
                  std::string_view sweep_name) {
  std::size_t failures = 0;
  for (const auto& r : records) failures += r.error.empty() ? 0 : 1;
  out << sweep_name << ",regime,replicates,mean_revenue,mean_total_mu_utility,"
         "mean_total_reward_paid\n";
  for (const TrendPoint& p : summarize(records)) {
    out << fixed(p.sweep_value) << ',' << to_string(p.regime) << ',' << p.replicates << ','
        << fixed(p.mean_revenue) << ',' << fixed(p.mean_total_mu_utility) << ','
        << fixed(p.mean_total_reward_paid) << '\n';
  }
  if (failures > 0) out << failures << " record(s) failed\n";
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err, bool over_n) {
  const ScenarioConfig base = scenario_config(o);
  SweepOptions opts;
  opts.replicates = o.replicates;
  opts.evaluation = parse_evaluation(o.evaluation);
  opts.reward = reward_options(o);

  std::vector<ExperimentRecord> records;
  if (over_n) {
    const auto values = o.values.empty() ? default_n_values()
                                         : parse_list<std::size_t>(o.values, "--values");
    records = sweep_n(base, values, opts);
  } else {
    const auto values =
        o.values.empty() ? default_mu_g_values() : parse_list<double>(o.values, "--values");
    records = sweep_social(base, values, opts);
  }
  for (const auto& r : records) {
    if (!r.error.empty()) {
      err << "warning: seed " << r.seed << ", " << r.sweep_name << " = "
          << format_shortest(r.sweep_value) << ", " << to_string(r.regime) << ": " << r.error
          << '\n';
    }
  }

  std::ostringstream csv;
  write_experiment_csv(csv, records);
  if (o.output.empty()) {
    out << csv.str();
  } else {
    io::write_text_file(o.output, csv.str());
    print_trends(out, records, over_n ? "n" : "mu_g");
  }
  return 0;
}

Json case_study_doc(const CaseStudyConfig& cfg) {
  return Json{{"n", cfg.n},
              {"a", cfg.a},
              {"b", cfg.b},
              {"params",
               {{"c", cfg.params.c}, {"mu", cfg.params.mu}, {"s", cfg.params.s},
                {"t", cfg.params.t}}}};
}

CaseStudyConfig case_study_config(const Options& o) {
  CaseStudyConfig cfg;
  Json doc = o.input.empty() ? case_study_doc(cfg) : io::load_json_file(o.input);
  io::apply_overrides(doc, o.sets);
  auto number = [&](const Json& obj, const char* key, double fallback, const std::string& ctx) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ParseError("'" + ctx + key + "' must be a number");
    return obj[key].get<double>();
  };
  if (!doc.is_object()) throw ParseError("case-study document must be an object");
  if (doc.contains("n")) {
    if (!doc["n"].is_number_integer() || doc["n"].get<long long>() < 2) {
      throw ParseError("'n' must be an integer >= 2");
    }
    cfg.n = doc["n"].get<std::size_t>();
  }
  cfg.a = number(doc, "a", cfg.a, "");
  cfg.b = number(doc, "b", cfg.b, "");
  if (doc.contains("params")) {
    const Json& p = doc["params"];
    cfg.params.c = number(p, "c", cfg.params.c, "params.");
    cfg.params.mu = number(p, "mu", cfg.params.mu, "params.");
    cfg.params.s = number(p, "s", cfg.params.s, "params.");
    cfg.params.t = number(p, "t", cfg.params.t, "params.");
  }
  cfg.evaluation = parse_evaluation(o.evaluation);
  cfg.reward = reward_options(o);
  return cfg;
}

int cmd_case_study(const Options& o, std::ostream& out, std::ostream& err) {
  const CaseStudyResult result = case_study_chain(case_study_config(o));
  std::ostringstream csv;
  write_case_study_csv(csv, result);
  print_warnings(err, result.uniform.warnings);
  print_warnings(err, result.discriminatory.warnings);
  if (o.output.empty()) {
    out << csv.str();
    return 0;
  }
  io::write_text_file(o.output, csv.str());

  const auto& rows = result.rows;
  const auto peak = std::max_element(rows.begin(), rows.end(), [](const auto& l, const auto& r) {
    return l.uniform_x < r.uniform_x;
  });
  out << "Assumption 1: " << verdict(result.assumption1.holds) << " (max ratio "
      << fixed(result.assumption1.max_ratio()) << ")\n";
  out << "uniform r* = " << fixed(result.uniform.r[0]) << '\n';
  out << "uniform participation argmax: index " << peak->index << " (x = "
      << fixed(peak->uniform_x) << ")\n";
  out << "discriminatory r: first = " << fixed(rows.front().disc_r) << ", at argmax = "
      << fixed(peak->disc_r) << ", last = " << fixed(rows.back().disc_r) << '\n';
  return 0;
}

int cmd_scenario_dump(const Options& o, std::ostream& out) {
  const ScenarioConfig cfg = scenario_config(o);
  const GeneratedInstance gen = generate_random_instance(cfg);
  Json doc = io::to_json(gen.instance);
  const ExpectationProfile exp = expectation_of(cfg);
  doc["expectation"] = {{"e_a", exp.e_a}, {"e_b", exp.e_b}};
  doc["scenario"] = io::to_json(cfg);
  doc["tie_scale"] = gen.tie_scale;
  doc["raw_max_ratio"] = gen.raw_max_ratio;
  emit(o, out, doc.dump(2) + "\n");
  return 0;
}

// Flag registration.

void add_input(CLI::App* app, Options& o, bool required) {
  auto* opt = app->add_option("--input,-i", o.input, "Input JSON document");
  if (required) opt->required();
  app->add_option("--set", o.sets, "Override a key of the input (dotted.key=value)")
      ->take_all()
      ->allow_extra_args(false);
}

void add_solver(CLI::App* app, Options& o) {
  app->add_option("--epsilon", o.epsilon, "L1 stopping threshold for best-response dynamics");
  app->add_option("--max-iter", o.max_iter, "Maximum best-response sweeps");
}

void add_output(CLI::App* app, Options& o) {
  app->add_option("--output,-o", o.output, "Output file");
}

void add_sweep(CLI::App* app, Options& o) {
  add_input(app, o, false);
  add_solver(app, o);
  add_output(app, o);
  app->add_option("--seed", o.seed, "Base seed (replicate k uses seed + k)");
  app->add_option("--replicates", o.replicates, "Replicates per sweep value");
  app->add_option("--values", o.values, "Comma-separated sweep values");
  app->add_option("--evaluation", o.evaluation, "Scored profile: model or realized");
}

int report(const Error& e, std::ostream& err) {
  err << "error: " << e.what() << '\n';
  return e.exit_code();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  apply_thread_cap_from_env();

  Options o;
  CLI::App app{"Crowdsensing market solver and simulator", "crowdmarket"};
  app.require_subcommand(1);

  auto* check = app.add_subcommand("check", "Report Assumption 1, Assumption 2 and definiteness");
  add_input(check, o, true);

  auto* solve = app.add_subcommand("solve", "Participation equilibrium for a given reward");
  add_input(solve, o, true);
  solve->add_option("--reward,-r", o.reward, "Reward JSON document")->required();
  add_solver(solve, o);
  add_output(solve, o);

  auto* optimize = app.add_subcommand("optimize", "Optimal reward under a regime");
  add_input(optimize, o, true);
  optimize->add_option("--regime", o.regime, "disc, uniform or bound");
  add_solver(optimize, o);
  add_output(optimize, o);

  auto* sweep_n_cmd = app.add_subcommand("sweep-n", "Replicated sweep over market size");
  add_sweep(sweep_n_cmd, o);
  auto* sweep_social_cmd =
      app.add_subcommand("sweep-social", "Replicated sweep over mean tie strength");
  add_sweep(sweep_social_cmd, o);

  auto* case_study = app.add_subcommand("case-study", "Chain-graph case study");
  add_input(case_study, o, false);
  add_solver(case_study, o);
  add_output(case_study, o);
  case_study->add_option("--evaluation", o.evaluation, "Scored profile: model or realized");

  auto* dump = app.add_subcommand("scenario-dump", "Generate a random instance as JSON");
  auto* scenario = app.add_subcommand("scenario", "Scenario utilities");
  scenario->require_subcommand(1);
  auto* dump_alias = scenario->add_subcommand("dump", "Same as scenario-dump");
  for (auto* cmd : {dump, dump_alias}) {
    add_input(cmd, o, false);
    add_output(cmd, o);
    cmd->add_option("--seed", o.seed, "Scenario seed");
  }

  auto* oracle = app.add_subcommand("oracle", "Compare closed forms with brute-force search");
  add_input(oracle, o, true);
  oracle->add_option("--regime", o.regime, "disc or uniform");
  oracle->add_option("--steps", o.steps, "Grid points per coordinate");
  add_solver(oracle, o);
  add_output(oracle, o);

  // CLI11 consumes arguments from the back, without the program name.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ErrorCategory::kParse);
  }

  try {
    if (*check) return cmd_check(o, out);
    if (*solve) return cmd_solve(o, out, err);
    if (*optimize) return cmd_optimize(o, out, err);
    if (*sweep_n_cmd) return cmd_sweep(o, out, err, true);
    if (*sweep_social_cmd) return cmd_sweep(o, out, err, false);
    if (*case_study) return cmd_case_study(o, out, err);
    if (*dump || *dump_alias) return cmd_scenario_dump(o, out);
    if (*oracle) return cmd_oracle(o, out);
  } catch (const Error& e) {
    return report(e, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace crowdmarket::cli
