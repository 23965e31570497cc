#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace sw {

/// Transformed axes for growth-rate fits:
///   Power      log V  against log s
///   Log        V      against log s
///   LogLog     V      against log log s
///   Geometric  log V  against s
enum class FitModel { Power, Log, LogLog, Geometric };

std::string_view to_string(FitModel m);
std::optional<FitModel> fit_model_from_string(std::string_view s);

struct FitResult {
  double rate = 0;       // least-squares slope on the model's axes
  double intercept = 0;
  double residual = 0;   // RMS of the fit on the transformed axes
  /// sqrt(SS_res / SS_tot); comparable across models. 0 for a perfect fit.
  double relative_residual = 0;
};

/// Needs at least 4 points. Models that take log V require V > 0; the linear
/// models accept V >= 0. Throws Domain otherwise.
FitResult fit_rate(std::span<const double> schedule, std::span<const double> values, FitModel model);

/// Candidate with the smallest relative residual; ties go to the earlier one.
FitModel select_model(std::span<const double> schedule, std::span<const double> values,
                      std::span<const FitModel> candidates);

/// max(10% of |predicted|, 0.02).
double rate_tolerance(double predicted);

}  // namespace sw
