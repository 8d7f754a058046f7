#include "tailselect/scenario.hpp"

#include <json.hpp>
#include <stdexcept>

#include "tailselect/math_util.hpp"

namespace tailselect {

namespace {

using nlohmann::json;

constexpr int kCatalogSize = 10;

std::vector<DistributionSpec> setup1_alts(Family family) {
  std::vector<DistributionSpec> alts;
  for (int i = 1; i <= kCatalogSize; ++i) {
    switch (family) {
      case Family::pareto_type_i: {
        const double beta = 0.2 + 0.025 * i;
        alts.push_back(make_pareto(1.0 / beta, 1.0 - beta));
        break;
      }
      case Family::shifted_abs_student_t:
        alts.push_back(make_student_t(1.0 / (0.25 + 0.05 * i)));
        break;
      case Family::frechet: {
        const double inv_a = 0.225 + 0.025 * i;
        alts.push_back(
            make_frechet(1.0 / inv_a, 1.0 / gamma_fn(1.0 - inv_a)));
        break;
      }
    }
  }
  return alts;
}

std::vector<DistributionSpec> setup2_alts(Family family) {
  auto alts = setup1_alts(family);
  alts.back() = alts.front();
  alts.back().multiplier = 1.1;
  return alts;
}

std::string family_name(Family f) {
  switch (f) {
    case Family::pareto_type_i: return "pareto";
    case Family::shifted_abs_student_t: return "student_t";
    case Family::frechet: return "frechet";
  }
  throw std::logic_error("family_name: unknown family");
}

Family family_from_name(const std::string& s) {
  if (s == "pareto") return Family::pareto_type_i;
  if (s == "student_t") return Family::shifted_abs_student_t;
  if (s == "frechet") return Family::frechet;
  throw std::invalid_argument("unknown family: " + s);
}

std::vector<Scenario> build_catalog() {
  std::vector<Scenario> cat;
  for (Family f : {Family::pareto_type_i, Family::shifted_abs_student_t,
                   Family::frechet}) {
    cat.push_back({"setup1_" + family_name(f), f, setup1_alts(f), false});
    cat.push_back({"setup2_" + family_name(f), f, setup2_alts(f), true});
  }
  return cat;
}

}  // namespace

int Scenario::best_index() const {
  if (alternatives.empty()) throw std::invalid_argument("empty scenario");
  int best = 0;
  for (int i = 1; i < k(); ++i)
    if (tail_index(alternatives[i]) < tail_index(alternatives[best])) best = i;
  return best;
}

std::vector<int> Scenario::tie_indices() const {
  const double lo = tail_index(alternatives[best_index()]);
  std::vector<int> out;
  for (int i = 0; i < k(); ++i)
    if (tail_index(alternatives[i]) == lo) out.push_back(i);
  return out;
}

const std::vector<Scenario>& scenario_catalog() {
  static const std::vector<Scenario> cat = build_catalog();
  return cat;
}

const Scenario& scenario_by_name(const std::string& name) {
  for (const auto& sc : scenario_catalog())
    if (sc.name == name) return sc;
  throw std::invalid_argument("unknown scenario: " + name);
}

std::string scenario_to_json(const Scenario& sc) {
  json j;
  j["name"] = sc.name;
  j["family"] = family_name(sc.family);
  j["tie"] = sc.tie;
  j["params"] = json::array();
  for (const auto& a : sc.alternatives)
    j["params"].push_back({{"shape", a.shape},
                           {"scale", a.scale_or_shift},
                           {"multiplier", a.multiplier}});
  return j.dump(2);
}

Scenario scenario_from_json(const std::string& text) {
  Scenario sc;
  try {
    const json j = json::parse(text);
    sc.name = j.at("name").get<std::string>();
    sc.family = family_from_name(j.at("family").get<std::string>());
    sc.tie = j.at("tie").get<bool>();
    for (const auto& p : j.at("params")) {
      const double shape = p.at("shape").get<double>();
      const double scale = p.at("scale").get<double>();
      const double mult = p.value("multiplier", 1.0);
      switch (sc.family) {
        case Family::pareto_type_i:
          sc.alternatives.push_back(make_pareto(shape, scale, mult));
          break;
        case Family::shifted_abs_student_t:
          sc.alternatives.push_back(make_student_t(shape, scale, mult));
          break;
        case Family::frechet:
          sc.alternatives.push_back(make_frechet(shape, scale, mult));
          break;
      }
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scenario json: ") + e.what());
  }
  if (sc.alternatives.size() < 2)
    throw std::invalid_argument("scenario needs at least 2 alternatives");
  return sc;
}

}  // namespace tailselect
