#include <CLI11.hpp>
#include <clocale>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "tailselect/harness.hpp"
#include "tailselect/rate_function.hpp"
#include "tailselect/svg_plot.hpp"

namespace {

using namespace tailselect;

std::string format_row(const char* fmt, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, x);
  return buf;
}

void cmd_scenarios(bool as_json) {
  if (as_json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Scenario& sc : scenario_catalog())
      arr.push_back(nlohmann::json::parse(scenario_to_json(sc)));
    std::printf("%s\n", arr.dump(2).c_str());
    return;
  }
  std::printf("%-20s %-10s %3s %5s %4s\n", "name", "family", "k", "best",
              "tie");
  for (const Scenario& sc : scenario_catalog()) {
    const char* family = sc.family == Family::pareto_type_i ? "pareto"
                         : sc.family == Family::frechet     ? "frechet"
                                                            : "student_t";
    std::printf("%-20s %-10s %3d %5d %4s\n", sc.name.c_str(), family, sc.k(),
                sc.best_index(), sc.tie ? "yes" : "no");
  }
}

void cmd_rateopt(std::vector<double> betas, const std::string& scenario_name,
                 double step_floor) {
  if (betas.empty() == scenario_name.empty())
    throw std::invalid_argument(
        "rateopt: provide exactly one of --betas or --scenario");
  if (!scenario_name.empty()) {
    const Scenario& sc = scenario_by_name(scenario_name);
    for (const DistributionSpec& a : sc.alternatives)
      betas.push_back(tail_index(a));
  }
  const RateInstance inst = make_rate_instance(betas);
  const MaximizeResult res = maximize_rate(inst, step_floor);
  if (res.degenerate)
    std::printf(
        "warning: a competitor ties the minimal tail index; the rate is "
        "identically zero, reporting the equal allocation\n");
  std::printf("best index: %d\n", inst.best);
  for (std::size_t i = 0; i < res.alpha.size(); ++i)
    std::printf("alpha[%zu] = %s\n", i,
                format_row("%.6f", res.alpha[i]).c_str());
  std::printf("G* = %s  (evals: %ld)\n", format_row("%.10g", res.value).c_str(),
              res.evals);
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (static_cast<int>(i) == inst.best) continue;
    const double r =
        pairwise_rate(res.alpha[static_cast<std::size_t>(inst.best)],
                      res.alpha[i], betas[static_cast<std::size_t>(inst.best)],
                      betas[i]);
    std::printf("rate[best=%d vs %zu] = %s\n", inst.best, i,
                format_row("%.10g", r).c_str());
  }
}

std::string trace_csv(const RunResult& r, int k) {
  std::string out = "t";
  for (int i = 1; i <= k; ++i) out += ",alpha_" + std::to_string(i);
  for (int i = 1; i <= k; ++i) out += ",beta_hat_" + std::to_string(i);
  out += ",delta_t,G_hat\n";
  for (const TrajectoryPoint& p : r.trajectory) {
    out += std::to_string(p.t);
    for (double a : p.alpha) out += "," + format_row("%.10g", a);
    for (double b : p.estimates) out += "," + format_row("%.10g", b);
    out += "," + format_row("%.10g", p.delta_t);
    out += "," + format_row("%.10g", p.g_hat);
    out += "\n";
  }
  return out;
}

void cmd_trace(const std::string& scenario_name, const std::string& policy,
               long T, std::uint64_t seed, const std::string& out_path) {
  const Scenario& sc = scenario_by_name(scenario_name);
  const PolicyParams params;
  const NuSpec nu{NuKind::mean_plus_sigmas};
  Rng g(seed);
  RunResult r;
  if (policy == "tiro")
    r = run_tiro(sc, T, params, g, true);
  else if (policy == "itiro")
    r = run_itiro(sc, T, nu, RiskKind::tail_prob, params, g, true);
  else if (policy == "gj")
    r = run_gj(sc, T, nu, params, g, true);
  else
    throw std::invalid_argument("trace: unknown policy: " + policy);
  const std::string csv = trace_csv(r, sc.k());
  if (out_path.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    out << csv;
    if (!out.good())
      throw std::runtime_error("cannot write trace: " + out_path);
    std::printf("wrote %s (%zu decisions)\n", out_path.c_str(),
                r.trajectory.size());
  }
  std::printf("selected=%d false_selection=%s\n", r.selected,
              r.false_selection ? "true" : "false");
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir,
                   int workers) {
  ExperimentConfig cfg = experiment_config_from_file(config_path);
  if (const char* env_seed = std::getenv("TAILSELECT_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env_seed, &end, 10);
    if (end == env_seed || *end != '\0')
      throw std::invalid_argument("TAILSELECT_SEED must be an integer");
    cfg.base_seed = v;
  }
  if (workers >= 0) cfg.parallelism = workers;
  if (!out_dir.empty()) {
    std::string base = cfg.output;
    const std::size_t slash = base.find_last_of('/');
    if (slash != std::string::npos) base = base.substr(slash + 1);
    if (base.empty()) base = "pfs.csv";
    cfg.output = out_dir + "/" + base;
  }
  const std::vector<PfsCurve> curves = run_experiment(cfg);
  int rc = 0;
  for (const PfsCurve& curve : curves) {
    const PfsRow& last = curve.rows.back();
    std::printf("%s: PFS(T=%ld) = %s +- %s over %ld trials%s\n",
                curve.method.c_str(), last.T,
                format_row("%.4f", last.pfs).c_str(),
                format_row("%.4f", last.se).c_str(), last.trials,
                last.se_flagged ? "  [stderr not <10x below estimate]" : "");
    for (const PfsRow& row : curve.rows)
      if (row.invalid) {
        std::fprintf(stderr,
                     "error: %s at T=%ld: %ld trials failed (first: %s)\n",
                     row.method.c_str(), row.T, row.failed, row.error.c_str());
        rc = 1;
      }
  }
  if (!cfg.output.empty())
    std::printf("wrote %s and %s.meta.json\n", cfg.output.c_str(),
                cfg.output.c_str());
  return rc;
}

void cmd_plot(const std::string& in_path, const std::string& out_path,
              bool logx, bool logy, const std::string& title) {
  const std::vector<PfsCurve> curves = read_pfs_csv(in_path);
  PlotOptions opts;
  opts.logx = logx;
  opts.logy = logy;
  opts.title = title;
  const std::string svg = render_pfs_svg(curves, opts);
  std::ofstream out(out_path, std::ios::binary);
  out << svg;
  if (!out.good()) throw std::runtime_error("cannot write plot: " + out_path);
  std::printf("wrote %s\n", out_path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  CLI::App app{
      "tailselect: tail-risk ranking and selection under fixed budgets"};
  app.require_subcommand(1);

  auto* sc_cmd = app.add_subcommand("scenarios", "List built-in scenarios");
  bool sc_json = false;
  sc_cmd->add_flag("--json", sc_json, "Emit the catalog as JSON");

  auto* ro_cmd = app.add_subcommand(
      "rateopt", "Rate-optimal allocation for given tail indices");
  std::vector<double> ro_betas;
  std::string ro_scenario;
  double ro_floor = 1e-9;
  ro_cmd->add_option("--betas", ro_betas, "Comma-separated tail indices")
      ->delimiter(',');
  ro_cmd->add_option("--scenario", ro_scenario,
                     "Use the true tail indices of a built-in scenario");
  ro_cmd->add_option("--floor", ro_floor, "Solver step floor");

  auto* tr_cmd =
      app.add_subcommand("trace", "Run one policy and export its trajectory");
  std::string tr_scenario, tr_policy, tr_out;
  long tr_T = 0;
  std::uint64_t tr_seed = 0;
  tr_cmd->add_option("--scenario", tr_scenario, "Scenario name")->required();
  tr_cmd->add_option("--policy", tr_policy, "One of: tiro, itiro, gj")
      ->required()
      ->check(CLI::IsMember({"tiro", "itiro", "gj"}));
  tr_cmd->add_option("--T", tr_T, "Total sampling budget")->required();
  tr_cmd->add_option("--seed", tr_seed, "RNG seed")->required();
  tr_cmd->add_option("--trace-out", tr_out,
                     "Trajectory CSV path (default: stdout)");

  auto* ex_cmd =
      app.add_subcommand("experiment", "Run a PFS experiment from JSON config");
  std::string ex_config, ex_out;
  int ex_workers = -1;
  ex_cmd->add_option("--config", ex_config, "JSON config path")->required();
  ex_cmd->add_option("--out", ex_out, "Directory overriding the output path");
  ex_cmd->add_option("--workers", ex_workers,
                     "Worker threads (0 = hardware concurrency)");

  auto* pl_cmd = app.add_subcommand("plot", "Render a PFS CSV as SVG");
  std::string pl_in, pl_out, pl_title;
  bool pl_logy = false, pl_logx = false;
  pl_cmd->add_option("--in", pl_in, "Input CSV path")->required();
  pl_cmd->add_option("--out", pl_out, "Output SVG path")->required();
  pl_cmd->add_flag("--logy", pl_logy, "Logarithmic PFS axis");
  pl_cmd->add_flag("--logx", pl_logx, "Logarithmic budget axis");
  pl_cmd->add_option("--title", pl_title, "Plot title");

  try {
    app.parse(argc, argv);
    if (sc_cmd->parsed()) {
      cmd_scenarios(sc_json);
    } else if (ro_cmd->parsed()) {
      cmd_rateopt(ro_betas, ro_scenario, ro_floor);
    } else if (tr_cmd->parsed()) {
      cmd_trace(tr_scenario, tr_policy, tr_T, tr_seed, tr_out);
    } else if (ex_cmd->parsed()) {
      return cmd_experiment(ex_config, ex_out, ex_workers);
    } else if (pl_cmd->parsed()) {
      cmd_plot(pl_in, pl_out, pl_logx, pl_logy, pl_title);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
