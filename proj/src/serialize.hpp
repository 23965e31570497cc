#pragma once

#include "certify.hpp"
#include "conditions.hpp"
#include "quadrature.hpp"

#include <nlohmann/json.hpp>

namespace sw {

nlohmann::json to_json(const Geometry& g);
nlohmann::json to_json(const SWParams& params);
/// The report with the parameters echoed and "mode" exact or float-mode.
nlohmann::json to_json(const SWParams& params, const ConditionReport& rep);
nlohmann::json to_json(const QuadratureResult& r);
nlohmann::json to_json(const QuotientResult& r);
nlohmann::json to_json(const Certificate& c);

}  // namespace sw
