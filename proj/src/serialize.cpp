#include "serialize.hpp"

namespace sw {

using nlohmann::json;

json to_json(const Geometry& g) {
  return {{"kind", to_string(g.kind())}, {"n", g.n()}, {"k", g.k()}, {"name", g.name()}};
}

json to_json(const SWParams& s) {
  return {{"geometry", to_json(s.geom())},
          {"p", s.p().str()},
          {"r", s.r().str()},
          {"alpha", s.alpha().str()},
          {"beta", s.beta().str()},
          {"lambda", s.lambda().str()}};
}

json to_json(const SWParams& s, const ConditionReport& rep) {
  json conds = json::array();
  for (const auto& e : rep.entries) {
    conds.push_back({{"id", to_string(e.id)},
                     {"holds", e.holds},
                     {"lhs", e.lhs.str()},
                     {"rhs", e.rhs.str()},
                     {"strictness", to_string(e.strictness)},
                     {"residual", e.residual.str()}});
  }
  json out = to_json(s);
  out["mode"] = rep.exact ? "exact" : "float-mode";
  out["conditions"] = std::move(conds);
  out["all_hold"] = rep.all_hold();
  out["open_band"] = rep.open_band;
  if (rep.open_band) out["note"] = "necessity-open";
  return out;
}

json to_json(const QuadratureResult& r) {
  return {{"value", r.value},
          {"error", r.error},
          {"method", to_string(r.method)},
          {"samples", r.samples},
          {"seed", r.seed}};
}

json to_json(const QuotientResult& r) {
  return {{"bilinear", to_json(r.bilinear)},
          {"norm_f", to_json(r.norm_f)},
          {"norm_g", to_json(r.norm_g)},
          {"quotient", to_json(r.quotient)},
          {"analytic_norms", r.analytic_norms}};
}

json to_json(const Certificate& c) {
  json out = {{"construction_id", to_string(c.construction)},
              {"condition", to_string(condition_for(c.construction))},
              {"geometry", to_json(c.geom)},
              {"params", {{"p", c.p}, {"r", c.r}, {"alpha", c.alpha}, {"beta", c.beta}, {"lambda", c.lambda}}},
              {"schedule_name", c.schedule_name},
              {"schedule", c.schedule},
              {"values", c.values},
              {"errors", c.errors},
              {"model", to_string(c.model)},
              {"selected_model", to_string(c.selected_model)},
              {"fitted_rate", c.fitted_rate},
              {"predicted_rate", c.predicted_rate},
              {"rate_tol", c.rate_tol},
              {"residual", c.residual},
              {"increasing", c.increasing},
              {"rate_ok", c.rate_ok},
              {"verdict", to_string(c.verdict)},
              {"seed", c.seed},
              {"seeds", c.seeds},
              {"notes", c.notes},
              {"extras", c.extras}};
  if (!c.analytic.empty()) out["analytic"] = c.analytic;
  out["chain_constant"] = c.chain_constant ? json(*c.chain_constant) : json(nullptr);
  out["sandwich_ok"] = c.sandwich_ok ? json(*c.sandwich_ok) : json(nullptr);
  return out;
}

}  // namespace sw
