#pragma once

// Executable divergence certificates, one per necessity construction.

#include "conditions.hpp"
#include "fit.hpp"
#include "functions.hpp"
#include "quadrature.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sw {

enum class Construction {
  LambdaGeN,
  BetaTooBig,
  AlphaTooBig,
  BalanceScaling,
  SumNegativeCylinders,
  HoelderLogTail,
  LambdaGeNMinusKOverR,
};
inline constexpr std::array<Construction, 7> kAllConstructions = {
    Construction::LambdaGeN,          Construction::BetaTooBig,     Construction::AlphaTooBig,
    Construction::BalanceScaling,     Construction::SumNegativeCylinders, Construction::HoelderLogTail,
    Construction::LambdaGeNMinusKOverR};

std::string_view to_string(Construction c);
std::optional<Construction> construction_from_string(std::string_view s);

enum class Verdict { CertifiedDivergent, CertifiedBoundedAtScale, Inconclusive };
std::string_view to_string(Verdict v);

/// The construction whose regime is the negation of `id` on this geometry.
Construction construction_for(ConditionId id, const Geometry& geom);
ConditionId condition_for(Construction c);

struct CertifyOptions {
  QuadOptions quad;
  /// Overrides the construction's default schedule when non-empty.
  std::vector<double> schedule;
  /// eps of the cylinder family.
  double eps = 0.05;
  /// Cylinder truncations quadratured numerically are M = 1..numeric_m_max.
  int numeric_m_max = 6;
  /// Scaling-law test functions; defaults are separated annuli.
  std::optional<TrialFunction> f;
  std::optional<TrialFunction> g;
};

struct Certificate {
  Construction construction = Construction::LambdaGeN;
  Geometry geom = Geometry::full(1);
  std::string p, r, alpha, beta, lambda;
  std::string schedule_name;
  std::vector<double> schedule;
  std::vector<double> values;
  std::vector<double> errors;
  /// Analytic lower-bound values on the schedule; numeric >= chain_constant * analytic.
  std::vector<double> analytic;
  std::optional<double> chain_constant;
  FitModel model = FitModel::Power;
  FitModel selected_model = FitModel::Power;
  double fitted_rate = 0;
  double predicted_rate = 0;
  double rate_tol = 0;
  double residual = 0;
  bool increasing = false;
  bool rate_ok = false;
  std::optional<bool> sandwich_ok;
  Verdict verdict = Verdict::Inconclusive;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> notes;
  /// Construction-specific data (exponent identities, numeric cylinder sums, ...).
  nlohmann::json extras = nlohmann::json::object();
};

/// Throws Regime when the parameters do not violate the construction's
/// condition; the message names the condition and its state.
void check_regime(Construction c, const SWParams& params);

Certificate certify_lambda_range(const SWParams& params, const CertifyOptions& opts);
enum class WeightSide { Alpha, Beta };
Certificate certify_weight_range(const SWParams& params, WeightSide side, const CertifyOptions& opts);
Certificate verify_scaling_law(const SWParams& params, const CertifyOptions& opts);
Certificate certify_sum_negative(const SWParams& params, const CertifyOptions& opts);
Certificate certify_hoelder(const SWParams& params, const CertifyOptions& opts);
Certificate certify_lambda_threshold(const SWParams& params, const CertifyOptions& opts);

Certificate run_certificate(Construction c, const SWParams& params, const CertifyOptions& opts);

/// Partial sums S_M = sum_{m=1}^M 2^{-m(alpha+beta)} (m+1)^{-s}.
double cylinder_partial_sum(double sum_ab, double s, int M);

/// E = (lambda - k/q - (n-k)) q + 1 with q = r/(r-1): the layered exponent of
/// the threshold construction (exact when the parameters are).
Number threshold_exponent(const SWParams& params);

/// Left and right sides of the log-tail exponent identity for the geometry.
std::pair<Number, Number> hoelder_identity(const SWParams& params);

}  // namespace sw
