#include "tailselect/harness.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tailselect/nu.hpp"

namespace tailselect {

namespace {

using nlohmann::json;

constexpr const char* kCsvHeader = "method,T,trials,false_count,pfs,stderr";

std::vector<double> equal_weights(int k) {
  return std::vector<double>(static_cast<std::size_t>(k),
                             1.0 / static_cast<double>(k));
}

bool csv_safe_id(const std::string& id) {
  if (id.empty()) return false;
  for (char c : id)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
          c == '-' || c == '.'))
      return false;
  return true;
}

bool rule_needs_nu(const MethodSpec& m) {
  switch (m.policy) {
    case PolicyKind::tiro: return false;
    case PolicyKind::itiro:
    case PolicyKind::gj: return true;
    case PolicyKind::static_alloc:
      return m.rule.kind != SelectionKind::min_tail_index;
  }
  return false;
}

void validate_experiment_config(const ExperimentConfig& cfg) {
  const Scenario& sc = scenario_by_name(cfg.scenario);
  if (cfg.methods.empty())
    throw std::invalid_argument("config: methods must be nonempty");
  if (cfg.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (cfg.parallelism < 0)
    throw std::invalid_argument("config: parallelism must be >= 0");
  if (cfg.budgets.empty())
    throw std::invalid_argument("config: budgets must be nonempty");
  for (std::size_t i = 0; i < cfg.budgets.size(); ++i) {
    if (cfg.budgets[i] < 1)
      throw std::invalid_argument("config: budgets must be >= 1");
    if (i > 0 && cfg.budgets[i] <= cfg.budgets[i - 1])
      throw std::invalid_argument("config: budgets must be strictly increasing");
  }
  std::set<std::string> ids;
  for (const MethodSpec& m : cfg.methods) {
    if (!csv_safe_id(m.id))
      throw std::invalid_argument(
          "config: method id must be nonempty [A-Za-z0-9_.-]: '" + m.id + "'");
    if (!ids.insert(m.id).second)
      throw std::invalid_argument("config: duplicate method id: " + m.id);
    validate_policy_params(m.params, sc.k());
    if (m.policy == PolicyKind::static_alloc && !m.alpha.empty()) {
      if (static_cast<int>(m.alpha.size()) != sc.k())
        throw std::invalid_argument("config: alpha size must equal k");
      double sum = 0.0;
      for (double a : m.alpha) {
        if (a < 0.0) throw std::invalid_argument("config: alpha must be >= 0");
        sum += a;
      }
      if (!(sum > 0.0))
        throw std::invalid_argument("config: alpha must have positive sum");
    }
    if (rule_needs_nu(m)) {
      // Resolve eagerly so an unusable schedule fails at config time, not
      // inside every trial.
      for (long T : cfg.budgets) {
        const double nu = resolve_nu(m.rule.nu, sc, T);
        if (!(nu > 0.0))
          throw std::invalid_argument("config: resolved nu must be > 0");
      }
    }
  }
}

bool run_one_trial(const Scenario& sc, const MethodSpec& m, long T,
                   std::uint64_t base_seed, long trial) {
  Rng g(trial_seed(base_seed, m.id, T, trial));
  switch (m.policy) {
    case PolicyKind::static_alloc: {
      const std::vector<double> a =
          m.alpha.empty() ? equal_weights(sc.k()) : m.alpha;
      return run_static(sc, a, T, m.rule, g).false_selection;
    }
    case PolicyKind::tiro:
      return run_tiro(sc, T, m.params, g).false_selection;
    case PolicyKind::itiro:
      return run_itiro(sc, T, m.rule.nu, m.rule.risk, m.params, g)
          .false_selection;
    case PolicyKind::gj:
      return run_gj(sc, T, m.rule.nu, m.params, g).false_selection;
  }
  throw std::logic_error("unknown policy kind");
}

struct CellTally {
  long falses = 0;
  long ok = 0;
  long failed = 0;
  long first_fail_trial = -1;
  std::string first_error;
};

void merge_into(CellTally& into, const CellTally& part) {
  into.falses += part.falses;
  into.ok += part.ok;
  into.failed += part.failed;
  if (part.first_fail_trial >= 0 &&
      (into.first_fail_trial < 0 || part.first_fail_trial < into.first_fail_trial)) {
    into.first_fail_trial = part.first_fail_trial;
    into.first_error = part.first_error;
  }
}

int worker_count(long trials, int parallelism) {
  long w = parallelism > 0
               ? parallelism
               : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<int>(std::min<long>(w, trials));
}

// Workers stride the trial index, so the set of trials each one runs is a
// function of the worker count alone; the merged tally is independent of
// scheduling because every per-trial result is independent.
template <class TrialFn>
CellTally run_cell(long trials, int workers, TrialFn&& fn) {
  std::vector<CellTally> parts(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      CellTally& p = parts[static_cast<std::size_t>(w)];
      for (long trial = w; trial < trials; trial += workers) {
        try {
          if (fn(trial)) ++p.falses;
          ++p.ok;
        } catch (const std::exception& e) {
          ++p.failed;
          if (p.first_fail_trial < 0) {
            p.first_fail_trial = trial;
            p.first_error = e.what();
          }
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  CellTally total;
  for (const CellTally& p : parts) merge_into(total, p);
  return total;
}

PfsRow row_from_tally(const std::string& method, long T, long requested,
                      const CellTally& tally) {
  PfsRow row;
  row.method = method;
  row.T = T;
  row.trials = tally.ok;
  row.false_count = tally.falses;
  row.pfs = tally.ok > 0 ? static_cast<double>(tally.falses) /
                               static_cast<double>(tally.ok)
                         : std::numeric_limits<double>::quiet_NaN();
  row.se = pfs_standard_error(row.pfs, row.trials);
  row.failed = tally.failed;
  row.error = tally.first_error;
  row.se_flagged = row.se * 10.0 > row.pfs;
  row.invalid = tally.failed > 0 && tally.failed * 100 >= requested;
  return row;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out.good()) throw std::runtime_error("cannot write file: " + path);
}

// --- JSON config parsing -------------------------------------------------

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const char* ctx) {
  if (!j.is_object())
    throw std::invalid_argument(std::string("config: ") + ctx +
                                " must be an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (item.key() == a) {
        ok = true;
        break;
      }
    if (!ok)
      throw std::invalid_argument(std::string("config: unknown key '") +
                                  item.key() + "' in " + ctx);
  }
}

NuSpec nu_from_json(const json& j) {
  NuSpec spec;
  if (j.is_null()) return spec;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "power_of_t") {
    check_keys(j, {"kind", "coeff", "exponent"}, "nu");
    spec.kind = NuKind::power_of_t;
    spec.coeff = j.value("coeff", 0.2);
    spec.exponent = j.value("exponent", 0.5);
    if (!(spec.coeff > 0.0))
      throw std::invalid_argument("config: nu coeff must be > 0");
  } else if (kind == "mean_plus_sigmas") {
    check_keys(j, {"kind", "c"}, "nu");
    spec.kind = NuKind::mean_plus_sigmas;
    spec.c = j.value("c", 2.0);
    if (spec.c < 0.0)
      throw std::invalid_argument("config: nu c must be >= 0");
  } else if (kind == "quantile_level") {
    check_keys(j, {"kind", "p"}, "nu");
    spec.kind = NuKind::quantile_level;
    spec.p = j.value("p", 0.99);
    if (!(spec.p > 0.0 && spec.p < 1.0))
      throw std::invalid_argument("config: nu p must lie in (0,1)");
  } else {
    throw std::invalid_argument("config: unknown nu kind: " + kind);
  }
  return spec;
}

SelectionKind selection_kind_from_name(const std::string& s) {
  if (s == "min_tail_index") return SelectionKind::min_tail_index;
  if (s == "min_pot_prob") return SelectionKind::min_pot_prob;
  if (s == "min_pot_quantile") return SelectionKind::min_pot_quantile;
  if (s == "min_standard_estimator")
    return SelectionKind::min_standard_estimator;
  throw std::invalid_argument("config: unknown selection kind: " + s);
}

RiskKind risk_from_name(const std::string& s) {
  if (s == "tail_prob") return RiskKind::tail_prob;
  if (s == "excess_loss") return RiskKind::excess_loss;
  if (s == "var") return RiskKind::var;
  if (s == "cvar") return RiskKind::cvar;
  throw std::invalid_argument("config: unknown risk kind: " + s);
}

PolicyKind policy_from_name(const std::string& s) {
  if (s == "static") return PolicyKind::static_alloc;
  if (s == "tiro") return PolicyKind::tiro;
  if (s == "itiro") return PolicyKind::itiro;
  if (s == "gj") return PolicyKind::gj;
  throw std::invalid_argument("config: unknown policy: " + s);
}

SelectionRule rule_from_json(const json& j) {
  SelectionRule rule;
  if (j.is_null()) return rule;
  check_keys(j, {"kind", "risk", "nu", "u", "delta"}, "rule");
  if (j.contains("kind"))
    rule.kind = selection_kind_from_name(j.at("kind").get<std::string>());
  if (j.contains("risk"))
    rule.risk = risk_from_name(j.at("risk").get<std::string>());
  if (j.contains("nu")) rule.nu = nu_from_json(j.at("nu"));
  rule.u = j.value("u", 0.9);
  rule.delta = j.value("delta", 0.8);
  if (!(rule.u > 0.0 && rule.u < 1.0))
    throw std::invalid_argument("config: rule u must lie in (0,1)");
  if (!(rule.delta > 0.5 && rule.delta < 1.0))
    throw std::invalid_argument("config: rule delta must lie in (1/2,1)");
  return rule;
}

PolicyParams params_from_json(const json& j) {
  PolicyParams p;
  if (j.is_null()) return p;
  check_keys(j,
             {"n0", "m", "delta0", "delta_step", "delta_lo", "delta_hi", "u",
              "min_exceedances", "solver_step_floor", "solver_iters_per_stage",
              "forced_betas"},
             "params");
  p.n0 = j.value("n0", p.n0);
  p.m = j.value("m", p.m);
  p.delta0 = j.value("delta0", p.delta0);
  p.delta_step = j.value("delta_step", p.delta_step);
  p.delta_lo = j.value("delta_lo", p.delta_lo);
  p.delta_hi = j.value("delta_hi", p.delta_hi);
  p.u = j.value("u", p.u);
  p.min_exceedances = j.value("min_exceedances", p.min_exceedances);
  p.solver_step_floor = j.value("solver_step_floor", p.solver_step_floor);
  p.solver_iters_per_stage =
      j.value("solver_iters_per_stage", p.solver_iters_per_stage);
  if (j.contains("forced_betas"))
    p.forced_betas = j.at("forced_betas").get<std::vector<double>>();
  return p;
}

MethodSpec method_from_json(const json& j) {
  check_keys(j, {"id", "policy", "rule", "params", "alpha"}, "method");
  MethodSpec m;
  m.id = j.at("id").get<std::string>();
  m.policy = policy_from_name(j.at("policy").get<std::string>());
  if (j.contains("rule")) m.rule = rule_from_json(j.at("rule"));
  if (j.contains("params")) m.params = params_from_json(j.at("params"));
  if (j.contains("alpha")) m.alpha = j.at("alpha").get<std::vector<double>>();
  return m;
}

const char* nu_kind_name(NuKind k) {
  switch (k) {
    case NuKind::power_of_t: return "power_of_t";
    case NuKind::mean_plus_sigmas: return "mean_plus_sigmas";
    case NuKind::quantile_level: return "quantile_level";
  }
  return "?";
}

}  // namespace

double resolve_nu(const NuSpec& spec, const Scenario& scenario, long long t) {
  switch (spec.kind) {
    case NuKind::power_of_t:
      if (!(spec.coeff > 0.0))
        throw std::invalid_argument("resolve_nu: coeff must be > 0");
      if (t < 1) throw std::invalid_argument("resolve_nu: t must be >= 1");
      return spec.coeff * std::pow(static_cast<double>(t), spec.exponent);
    case NuKind::mean_plus_sigmas: {
      if (scenario.alternatives.empty())
        throw std::invalid_argument("resolve_nu: empty scenario");
      const DistributionSpec& a0 = scenario.alternatives.front();
      return mean(a0) + spec.c * std::sqrt(variance(a0));
    }
    case NuKind::quantile_level:
      if (!(spec.p > 0.0 && spec.p < 1.0))
        throw std::invalid_argument("resolve_nu: p must lie in (0,1)");
      return 1.0 / (1.0 - spec.p);
  }
  throw std::logic_error("resolve_nu: unknown kind");
}

double pfs_standard_error(double pfs, long trials) {
  if (trials < 1) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(pfs * (1.0 - pfs) / static_cast<double>(trials));
}

std::vector<PfsCurve> run_experiment(const ExperimentConfig& cfg) {
  validate_experiment_config(cfg);
  const Scenario& sc = scenario_by_name(cfg.scenario);
  const int workers = worker_count(cfg.trials, cfg.parallelism);
  std::vector<PfsCurve> curves;
  curves.reserve(cfg.methods.size());
  for (const MethodSpec& m : cfg.methods) {
    PfsCurve curve;
    curve.method = m.id;
    for (long T : cfg.budgets) {
      const CellTally tally =
          run_cell(cfg.trials, workers, [&](long trial) {
            return run_one_trial(sc, m, T, cfg.base_seed, trial);
          });
      curve.rows.push_back(row_from_tally(m.id, T, cfg.trials, tally));
    }
    curves.push_back(std::move(curve));
  }
  if (!cfg.output.empty()) {
    write_pfs_csv(cfg.output, curves);
    write_text_file(cfg.output + ".meta.json",
                    experiment_metadata_json(cfg, curves));
  }
  return curves;
}

std::vector<PfsCurve> compare_selection_criteria(
    const CriteriaSweepConfig& cfg) {
  const Scenario& sc = scenario_by_name(cfg.scenario);
  if (cfg.criteria.empty())
    throw std::invalid_argument("criteria sweep: empty criteria list");
  if (cfg.trials < 1)
    throw std::invalid_argument("criteria sweep: trials must be >= 1");
  std::set<std::string> ids;
  for (const CriterionSpec& c : cfg.criteria) {
    if (!csv_safe_id(c.id))
      throw std::invalid_argument("criteria sweep: bad id: '" + c.id + "'");
    if (!ids.insert(c.id).second)
      throw std::invalid_argument("criteria sweep: duplicate id: " + c.id);
  }
  if (cfg.budgets.empty())
    throw std::invalid_argument("criteria sweep: budgets must be nonempty");
  for (std::size_t i = 0; i < cfg.budgets.size(); ++i) {
    if (cfg.budgets[i] < sc.k())
      throw std::invalid_argument("criteria sweep: budget below k");
    if (i > 0 && cfg.budgets[i] <= cfg.budgets[i - 1])
      throw std::invalid_argument(
          "criteria sweep: budgets must be strictly increasing");
  }

  const std::size_t n_rules = cfg.criteria.size();
  const int workers = worker_count(cfg.trials, cfg.parallelism);
  const int best = sc.best_index();
  // Rows are built per budget across all rules (shared samples), then
  // regrouped per rule.
  std::vector<PfsCurve> curves(n_rules);
  for (std::size_t c = 0; c < n_rules; ++c)
    curves[c].method = cfg.criteria[c].id;

  for (long T : cfg.budgets) {
    std::vector<double> nus(n_rules,
                            std::numeric_limits<double>::quiet_NaN());
    for (std::size_t c = 0; c < n_rules; ++c)
      if (cfg.criteria[c].rule.kind != SelectionKind::min_tail_index)
        nus[c] = resolve_nu(cfg.criteria[c].rule.nu, sc, T);
    const std::vector<long> counts =
        largest_remainder(equal_weights(sc.k()), T);

    std::vector<std::vector<CellTally>> parts(
        static_cast<std::size_t>(workers),
        std::vector<CellTally>(n_rules));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        std::vector<CellTally>& mine = parts[static_cast<std::size_t>(w)];
        for (long trial = w; trial < cfg.trials; trial += workers) {
          Rng g(trial_seed(cfg.base_seed, "criteria", T, trial));
          SampleStore store(sc.k());
          for (int i = 0; i < sc.k(); ++i)
            for (long n = 0; n < counts[static_cast<std::size_t>(i)]; ++n)
              store.add(i, sample(sc.alternatives[static_cast<std::size_t>(i)], g));
          for (std::size_t c = 0; c < n_rules; ++c) {
            try {
              const std::vector<double> est =
                  rule_estimates(store, cfg.criteria[c].rule, nus[c], T);
              if (is_false_selection(est, best)) ++mine[c].falses;
              ++mine[c].ok;
            } catch (const std::exception& e) {
              ++mine[c].failed;
              if (mine[c].first_fail_trial < 0) {
                mine[c].first_fail_trial = trial;
                mine[c].first_error = e.what();
              }
            }
          }
        }
      });
    }
    for (std::thread& th : pool) th.join();
    for (std::size_t c = 0; c < n_rules; ++c) {
      CellTally total;
      for (const auto& p : parts) merge_into(total, p[c]);
      curves[c].rows.push_back(
          row_from_tally(cfg.criteria[c].id, T, cfg.trials, total));
    }
  }
  if (!cfg.output.empty()) write_pfs_csv(cfg.output, curves);
  return curves;
}

std::string pfs_csv_string(const std::vector<PfsCurve>& curves) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const PfsCurve& curve : curves)
    for (const PfsRow& row : curve.rows) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%s,%ld,%ld,%ld,%.10g,%.10g\n",
                    row.method.c_str(), row.T, row.trials, row.false_count,
                    row.pfs, row.se);
      out += buf;
    }
  return out;
}

void write_pfs_csv(const std::string& path,
                   const std::vector<PfsCurve>& curves) {
  write_text_file(path, pfs_csv_string(curves));
}

std::vector<PfsCurve> read_pfs_csv_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::invalid_argument(std::string("CSV header must be '") +
                                kCsvHeader + "'");
  std::vector<PfsCurve> curves;
  auto curve_for = [&](const std::string& method) -> PfsCurve& {
    for (PfsCurve& c : curves)
      if (c.method == method) return c;
    curves.push_back({method, {}});
    return curves.back();
  };
  long n_rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t pos = 0; pos <= line.size(); ++pos)
      if (pos == line.size() || line[pos] == ',') {
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
      }
    if (fields.size() != 6)
      throw std::invalid_argument("CSV row must have 6 fields: " + line);
    PfsRow row;
    row.method = fields[0];
    auto parse_long = [&](const std::string& s, long& out_val) {
      const auto res = std::from_chars(s.data(), s.data() + s.size(), out_val);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("CSV: bad integer field: " + s);
    };
    auto parse_double = [&](const std::string& s, double& out_val) {
      const auto res = std::from_chars(s.data(), s.data() + s.size(), out_val);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("CSV: bad numeric field: " + s);
    };
    parse_long(fields[1], row.T);
    parse_long(fields[2], row.trials);
    parse_long(fields[3], row.false_count);
    parse_double(fields[4], row.pfs);
    parse_double(fields[5], row.se);
    curve_for(row.method).rows.push_back(std::move(row));
    ++n_rows;
  }
  if (n_rows == 0) throw std::invalid_argument("CSV has no data rows");
  return curves;
}

std::vector<PfsCurve> read_pfs_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw std::invalid_argument("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return read_pfs_csv_string(ss.str());
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") +
                                e.what());
  }
  ExperimentConfig cfg;
  try {
    check_keys(j,
               {"scenario", "methods", "budgets", "trials", "base_seed",
                "parallelism", "output"},
               "config");
    cfg.scenario = j.at("scenario").get<std::string>();
    for (const json& m : j.at("methods")) cfg.methods.push_back(method_from_json(m));
    cfg.budgets = j.at("budgets").get<std::vector<long>>();
    cfg.trials = j.value("trials", cfg.trials);
    cfg.base_seed = j.value("base_seed", cfg.base_seed);
    cfg.parallelism = j.value("parallelism", cfg.parallelism);
    cfg.output = j.value("output", cfg.output);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  validate_experiment_config(cfg);
  return cfg;
}

ExperimentConfig experiment_config_from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw std::invalid_argument("cannot read config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return experiment_config_from_json(ss.str());
}

std::string experiment_metadata_json(const ExperimentConfig& cfg,
                                     const std::vector<PfsCurve>& curves) {
  const Scenario& sc = scenario_by_name(cfg.scenario);
  json j;
  j["scenario"] = cfg.scenario;
  j["trials"] = cfg.trials;
  j["base_seed"] = cfg.base_seed;
  j["budgets"] = cfg.budgets;
  json nus = json::array();
  for (const MethodSpec& m : cfg.methods) {
    if (!rule_needs_nu(m)) continue;
    json entry;
    entry["method"] = m.id;
    entry["kind"] = nu_kind_name(m.rule.nu.kind);
    switch (m.rule.nu.kind) {
      case NuKind::power_of_t:
        entry["coeff"] = m.rule.nu.coeff;
        entry["exponent"] = m.rule.nu.exponent;
        break;
      case NuKind::mean_plus_sigmas:
        entry["c"] = m.rule.nu.c;
        break;
      case NuKind::quantile_level:
        entry["p"] = m.rule.nu.p;  // resolved holds the implied rarity
        break;
    }
    json resolved;
    for (long T : cfg.budgets)
      resolved[std::to_string(T)] = resolve_nu(m.rule.nu, sc, T);
    entry["resolved"] = resolved;
    nus.push_back(entry);
  }
  j["nu"] = nus;
  json flagged = json::array();
  json failures = json::array();
  for (const PfsCurve& curve : curves)
    for (const PfsRow& row : curve.rows) {
      if (row.se_flagged)
        flagged.push_back({{"method", row.method},
                           {"T", row.T},
                           {"pfs", row.pfs},
                           {"stderr", row.se}});
      if (row.failed > 0)
        failures.push_back({{"method", row.method},
                            {"T", row.T},
                            {"failed", row.failed},
                            {"first_error", row.error}});
    }
  j["se_flagged_rows"] = flagged;
  j["failures"] = failures;
  return j.dump(2);
}

}  // namespace tailselect
