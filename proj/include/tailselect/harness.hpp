#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tailselect/policies.hpp"

namespace tailselect {

enum class PolicyKind { static_alloc, tiro, itiro, gj };

// One experiment arm. `rule` supplies whatever the policy consumes: the full
// selection rule for static_alloc, risk kind + nu for itiro, nu for gj;
// tiro needs none of it. `alpha` applies to static_alloc only (empty =
// equal weights).
struct MethodSpec {
  std::string id;
  PolicyKind policy = PolicyKind::tiro;
  SelectionRule rule;
  PolicyParams params;
  std::vector<double> alpha;
};

struct ExperimentConfig {
  std::string scenario;
  std::vector<MethodSpec> methods;
  std::vector<long> budgets;  // strictly increasing
  long trials = 1000;
  std::uint64_t base_seed = 1u;
  int parallelism = 0;  // worker threads; 0 = hardware concurrency
  std::string output = "pfs.csv";  // empty = do not write files
};

// One (method, T) cell. `trials` counts successful trials; failures are
// tallied separately with the earliest error message kept. A cell where at
// least 1% of requested trials failed is marked invalid. se_flagged notes a
// standard error that is not an order of magnitude below the estimate.
struct PfsRow {
  std::string method;
  long T = 0;
  long trials = 0;
  long false_count = 0;
  double pfs = 0.0;
  double se = 0.0;
  long failed = 0;
  std::string error;
  bool se_flagged = false;
  bool invalid = false;
};

struct PfsCurve {
  std::string method;
  std::vector<PfsRow> rows;  // ascending in T
};

double pfs_standard_error(double pfs, long trials);

// Runs trials x budgets x methods, one independent seeded run per trial via
// trial_seed(base_seed, method id, T, trial). Writes the CSV (plus a
// .meta.json sidecar recording resolved nu values and flagged rows) when
// cfg.output is nonempty. Deterministic for a fixed config, regardless of
// worker count.
std::vector<PfsCurve> run_experiment(const ExperimentConfig& cfg);

// One selection rule to evaluate on the shared equal-allocation samples.
struct CriterionSpec {
  std::string id;
  SelectionRule rule;
};

struct CriteriaSweepConfig {
  std::string scenario;
  std::vector<CriterionSpec> criteria;
  std::vector<long> budgets;
  long trials = 1000;
  std::uint64_t base_seed = 1u;
  int parallelism = 0;
  std::string output;  // empty = do not write files
};

// Draws one static equal-allocation pass per trial and scores every
// criterion on the same samples, producing one curve per criterion.
std::vector<PfsCurve> compare_selection_criteria(const CriteriaSweepConfig& cfg);

// CSV with the fixed header `method,T,trials,false_count,pfs,stderr`,
// curves in order, rows ascending in T.
std::string pfs_csv_string(const std::vector<PfsCurve>& curves);
void write_pfs_csv(const std::string& path, const std::vector<PfsCurve>& curves);
// Parses the schema above; throws std::invalid_argument on a header
// mismatch, an empty body, or a malformed row.
std::vector<PfsCurve> read_pfs_csv_string(const std::string& text);
std::vector<PfsCurve> read_pfs_csv(const std::string& path);

// JSON document mirroring ExperimentConfig field names; unknown keys are
// rejected. Throws std::invalid_argument on any parse or validation error.
ExperimentConfig experiment_config_from_json(const std::string& text);
ExperimentConfig experiment_config_from_file(const std::string& path);

// Sidecar content: resolved nu per method and budget (both the quantile
// level and its implied rarity where applicable), failures, flagged rows.
std::string experiment_metadata_json(const ExperimentConfig& cfg,
                                     const std::vector<PfsCurve>& curves);

}  // namespace tailselect
