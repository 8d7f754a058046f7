#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tailselect/harness.hpp"
#include "tailselect/rate_function.hpp"
#include "tailselect/svg_plot.hpp"

namespace py = pybind11;
using namespace tailselect;

namespace {

// Python-side runs get their own RNG wrapper so seeds stay explicit.
struct SeededRng {
  Rng g;
  explicit SeededRng(std::uint64_t seed) : g(seed) {}
};

py::dict row_to_dict(const PfsRow& r) {
  py::dict d;
  d["method"] = r.method;
  d["T"] = r.T;
  d["trials"] = r.trials;
  d["false_count"] = r.false_count;
  d["pfs"] = r.pfs;
  d["stderr"] = r.se;
  d["failed"] = r.failed;
  d["invalid"] = r.invalid;
  return d;
}

py::list curves_to_list(const std::vector<PfsCurve>& curves) {
  py::list out;
  for (const PfsCurve& c : curves)
    for (const PfsRow& r : c.rows) out.append(row_to_dict(r));
  return out;
}

py::dict result_to_dict(const RunResult& r) {
  py::dict d;
  d["selected"] = r.selected;
  d["false_selection"] = r.false_selection;
  d["counts"] = r.counts;
  d["final_estimates"] = r.final_estimates;
  py::list traj;
  for (const TrajectoryPoint& p : r.trajectory) {
    py::dict t;
    t["t"] = p.t;
    t["alpha"] = p.alpha;
    t["estimates"] = p.estimates;
    t["delta_t"] = p.delta_t;
    t["g_hat"] = p.g_hat;
    traj.append(t);
  }
  d["trajectory"] = traj;
  return d;
}

}  // namespace

PYBIND11_MODULE(_tailselect, m) {
  m.doc() = "Tail-risk ranking and selection core";

  py::enum_<Family>(m, "Family")
      .value("pareto_type_i", Family::pareto_type_i)
      .value("shifted_abs_student_t", Family::shifted_abs_student_t)
      .value("frechet", Family::frechet);

  py::class_<DistributionSpec>(m, "DistributionSpec")
      .def_readonly("family", &DistributionSpec::family)
      .def_readonly("shape", &DistributionSpec::shape)
      .def_readonly("scale_or_shift", &DistributionSpec::scale_or_shift)
      .def_readonly("multiplier", &DistributionSpec::multiplier);

  m.def("make_pareto", &make_pareto, py::arg("kappa"), py::arg("tau"),
        py::arg("multiplier") = 1.0);
  m.def("make_student_t", &make_student_t, py::arg("omega"),
        py::arg("shift") = 3.0, py::arg("multiplier") = 1.0);
  m.def("make_frechet", &make_frechet, py::arg("a"), py::arg("s"),
        py::arg("multiplier") = 1.0);

  m.def("tail_index", &tail_index);
  m.def("mean", &tailselect::mean);
  m.def("variance", &tailselect::variance);
  m.def("survival", &survival);
  m.def("var_level", &var_level);
  m.def("cvar_level", &cvar_level);

  py::class_<SeededRng>(m, "Rng").def(py::init<std::uint64_t>());
  m.def("sample", [](const DistributionSpec& spec, SeededRng& rng) {
    return sample(spec, rng.g);
  });

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("name", &Scenario::name)
      .def_readonly("alternatives", &Scenario::alternatives)
      .def_readonly("tie", &Scenario::tie)
      .def_property_readonly("k", &Scenario::k)
      .def("best_index", &Scenario::best_index)
      .def("tie_indices", &Scenario::tie_indices);

  m.def("scenario_catalog",
        [] { return scenario_catalog(); });
  m.def("scenario_by_name",
        [](const std::string& name) { return scenario_by_name(name); });
  m.def("scenario_to_json", &scenario_to_json);
  m.def("scenario_from_json", &scenario_from_json);

  py::class_<SampleStore>(m, "SampleStore")
      .def(py::init<int>())
      .def("add", &SampleStore::add)
      .def("count", &SampleStore::count)
      .def("total_count", &SampleStore::total_count)
      .def("order_statistic", &SampleStore::order_statistic)
      .def("kth_smallest", &SampleStore::kth_smallest);

  m.def("est_tail_prob", &est_tail_prob);
  m.def("est_excess_loss",
        [](const SampleStore& s, int i, double nu) {
          return est_excess_loss(s, i, nu);
        });
  m.def("est_var", &est_var);
  m.def("est_cvar", &est_cvar);
  m.def("select_threshold",
        [](const SampleStore& s, int i, double delta, int min_exc,
           long budget) {
          const ThresholdResult r =
              select_threshold(s, i, ThresholdRule{delta, min_exc}, budget);
          return py::make_tuple(r.gamma, r.k);
        },
        py::arg("store"), py::arg("i"), py::arg("delta") = 0.8,
        py::arg("min_exceedances") = 5, py::arg("budget"));
  m.def("est_tail_index",
        [](const SampleStore& s, int i, double gamma) {
          const TailIndexEstimate e = est_tail_index(s, i, gamma);
          return py::make_tuple(e.beta_hat, e.gamma, e.exceedance_count);
        });
  m.def("est_pot_prob", &est_pot_prob);
  m.def("est_pot_quantile", &est_pot_quantile);

  m.def("kl_exp", &kl_exp);
  m.def("pairwise_rate", &pairwise_rate);
  m.def("rate_g", [](const std::vector<double>& alpha,
                     const std::vector<double>& betas) {
    return rate_G(alpha, make_rate_instance(betas));
  });
  m.def("project_simplex", &project_simplex);
  m.def("maximize_rate",
        [](const std::vector<double>& betas, double step_floor) {
          const MaximizeResult r =
              maximize_rate(make_rate_instance(betas), step_floor);
          py::dict d;
          d["alpha"] = r.alpha;
          d["value"] = r.value;
          d["degenerate"] = r.degenerate;
          d["evals"] = r.evals;
          return d;
        },
        py::arg("betas"), py::arg("step_floor") = 1e-9);
  m.def("gj_rate", &gj_rate);
  m.def("largest_remainder", &largest_remainder);

  py::enum_<RiskKind>(m, "RiskKind")
      .value("tail_prob", RiskKind::tail_prob)
      .value("excess_loss", RiskKind::excess_loss)
      .value("var", RiskKind::var)
      .value("cvar", RiskKind::cvar);

  m.def("run_static",
        [](const std::string& scenario, const std::vector<double>& alpha,
           long T, std::uint64_t seed) {
          Rng g(seed);
          return result_to_dict(run_static(scenario_by_name(scenario), alpha,
                                           T, SelectionRule{}, g));
        },
        py::arg("scenario"), py::arg("alpha"), py::arg("T"), py::arg("seed"),
        "Static allocation selecting the smallest estimated tail index; "
        "other rules go through run_experiment_json.");
  m.def("run_tiro",
        [](const std::string& scenario, long T, std::uint64_t seed,
           bool trace) {
          Rng g(seed);
          return result_to_dict(
              run_tiro(scenario_by_name(scenario), T, PolicyParams{}, g, trace));
        },
        py::arg("scenario"), py::arg("T"), py::arg("seed"),
        py::arg("trace") = false);
  m.def("run_itiro",
        [](const std::string& scenario, long T, double nu_sigmas,
           RiskKind risk, std::uint64_t seed, bool trace) {
          Rng g(seed);
          NuSpec nu;
          nu.c = nu_sigmas;
          return result_to_dict(run_itiro(scenario_by_name(scenario), T, nu,
                                          risk, PolicyParams{}, g, trace));
        },
        py::arg("scenario"), py::arg("T"), py::arg("nu_sigmas") = 2.0,
        py::arg("risk") = RiskKind::tail_prob, py::arg("seed") = 1,
        py::arg("trace") = false);
  m.def("run_gj",
        [](const std::string& scenario, long T, double nu_sigmas,
           std::uint64_t seed, bool trace) {
          Rng g(seed);
          NuSpec nu;
          nu.c = nu_sigmas;
          return result_to_dict(run_gj(scenario_by_name(scenario), T, nu,
                                       PolicyParams{}, g, trace));
        },
        py::arg("scenario"), py::arg("T"), py::arg("nu_sigmas") = 2.0,
        py::arg("seed") = 1, py::arg("trace") = false);

  m.def("run_experiment_json", [](const std::string& text) {
    return curves_to_list(run_experiment(experiment_config_from_json(text)));
  });
  m.def("pfs_csv",
        [](const std::string& text) {
          return pfs_csv_string(
              run_experiment(experiment_config_from_json(text)));
        });
  m.def("render_pfs_svg",
        [](const std::string& csv_text, bool logx, bool logy,
           const std::string& title) {
          PlotOptions opts;
          opts.logx = logx;
          opts.logy = logy;
          opts.title = title;
          return render_pfs_svg(read_pfs_csv_string(csv_text), opts);
        },
        py::arg("csv_text"), py::arg("logx") = false, py::arg("logy") = false,
        py::arg("title") = "");
}
