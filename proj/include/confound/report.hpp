#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "confound/ci_engine.hpp"
#include "confound/error.hpp"
#include "confound/monotonicity.hpp"
#include "confound/permutation.hpp"

namespace confound {

// All report output is deterministic: nlohmann::json orders keys, doubles
// serialize shortest-round-trip, and nothing here reads the clock.

inline nlohmann::json to_json(const DeltaPair& p) {
  return {{"i", p.i}, {"j", p.j}, {"trend", trend_name(p.trend)}};
}

inline nlohmann::json to_json(const BiasPoint& p) {
  return {{"b", p.b},
          {"mean_auc_pro", p.mean_auc_pro},
          {"std_error_pro", p.std_error_pro},
          {"mean_auc_cons", p.mean_auc_cons},
          {"std_error_cons", p.std_error_cons}};
}

inline nlohmann::json to_json(const CurveResult& c) {
  nlohmann::json j;
  j["orientation"] = orientation_name(c.orientation);
  j["anchor_auc"] = c.anchor_auc;
  j["anchor_std_error"] = c.anchor_std_error;
  j["phi"] = c.integrals.phi;
  j["phi_std_error"] = c.integrals.phi_std_error;
  j["phi_pro"] = c.integrals.phi_pro;
  j["phi_pro_std_error"] = c.integrals.phi_pro_std_error;
  j["phi_cons"] = c.integrals.phi_cons;
  j["phi_cons_std_error"] = c.integrals.phi_cons_std_error;
  j["delta_pro"] = c.delta_pro;
  j["delta_cons"] = c.delta_cons;
  j["pro_monotone"] = c.pro_monotone;
  j["cons_monotone"] = c.cons_monotone;
  j["pro_pairs"] = nlohmann::json::array();
  for (const auto& p : c.pro_pairs) j["pro_pairs"].push_back(to_json(p));
  j["cons_pairs"] = nlohmann::json::array();
  for (const auto& p : c.cons_pairs) j["cons_pairs"].push_back(to_json(p));
  j["points"] = nlohmann::json::array();
  for (const auto& p : c.points) j["points"].push_back(to_json(p));
  return j;
}

inline nlohmann::json to_json(const CiResult& r) {
  nlohmann::json j;
  j["kind"] = "confounding_index";
  j["scenario"] = scenario_name(r.scenario);
  j["defined"] = r.defined;
  if (r.defined)
    j["ci"] = r.ci;
  else
    j["diagnostic"] = r.diagnostic;
  j["grid"] = {{"n_per_cell", r.grid.n_per_cell},
               {"step_samples", r.grid.step_samples},
               {"b_max", r.grid.b_max()},
               {"correction_divisor", r.grid.correction_divisor()}};
  nlohmann::json bs = nlohmann::json::array();
  for (std::size_t k = 0; k < r.grid.size(); ++k) bs.push_back(r.grid.value(k));
  j["grid"]["b"] = bs;
  j["cells"] = {{"alpha", r.alpha},
                {"beta", r.beta},
                {"train_counts", r.train_counts},
                {"heldout_counts", r.heldout_counts},
                {"balance_n", r.balance_n}};
  j["phi"] = to_json(r.phi);
  j["phi_star"] = to_json(r.phi_star);
  return j;
}

inline nlohmann::json to_json(const PermutationResult& r) {
  nlohmann::json j;
  j["kind"] = "restricted_permutation";
  j["n_perms"] = r.aucs.size();
  j["mean_auc"] = r.mean_auc;
  j["std_error"] = r.std_error;
  j["null_sd"] = r.null_sd;
  j["p_value"] = r.p_value;
  j["n_pos_heldout"] = r.n_pos_heldout;
  j["n_neg_heldout"] = r.n_neg_heldout;
  j["aucs"] = r.aucs;
  return j;
}

namespace detail {

inline std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

// One row per grid bias: the pro and cons validation curves with their
// standard errors, full precision, for downstream plotting.
inline void write_curve_csv(const CurveResult& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write curve CSV: " + path);
  out << "b,mean_auc_pro,stderr_pro,mean_auc_cons,stderr_cons\n";
  for (const auto& p : c.points)
    out << detail::g17(p.b) << ',' << detail::g17(p.mean_auc_pro) << ','
        << detail::g17(p.std_error_pro) << ',' << detail::g17(p.mean_auc_cons) << ','
        << detail::g17(p.std_error_cons) << '\n';
  if (!out) throw Error("write failed: " + path);
}

inline void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write JSON: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw Error("write failed: " + path);
}

}  // namespace confound
