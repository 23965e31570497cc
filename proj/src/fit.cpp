#include "fit.hpp"

#include "error.hpp"

#include <cmath>
#include <limits>

namespace sw {

std::string_view to_string(FitModel m) {
  switch (m) {
    case FitModel::Power: return "power";
    case FitModel::Log: return "log";
    case FitModel::LogLog: return "loglog";
    case FitModel::Geometric: return "geometric";
  }
  return "?";
}

std::optional<FitModel> fit_model_from_string(std::string_view s) {
  for (auto m : {FitModel::Power, FitModel::Log, FitModel::LogLog, FitModel::Geometric})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

FitResult fit_rate(std::span<const double> schedule, std::span<const double> values, FitModel model) {
  if (schedule.size() != values.size()) fail(ErrorCode::Domain, "schedule and values differ in length");
  const std::size_t n = schedule.size();
  if (n < 4) fail(ErrorCode::Domain, "rate fit needs at least 4 points");
  const bool log_y = model == FitModel::Power || model == FitModel::Geometric;

  std::vector<double> X(n), Y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = schedule[i], v = values[i];
    if (!std::isfinite(v) || v < 0 || (log_y && v == 0))
      fail(ErrorCode::Domain, "rate fit needs positive finite values");
    switch (model) {
      case FitModel::Power:
      case FitModel::Log:
        if (!(s > 0)) fail(ErrorCode::Domain, "schedule must be positive for this model");
        X[i] = std::log(s);
        break;
      case FitModel::LogLog:
        if (!(s > 1)) fail(ErrorCode::Domain, "loglog model needs schedule > 1");
        X[i] = std::log(std::log(s));
        break;
      case FitModel::Geometric:
        X[i] = s;
        break;
    }
    Y[i] = log_y ? std::log(v) : v;
  }

  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += X[i];
    my += Y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (X[i] - mx) * (X[i] - mx);
    sxy += (X[i] - mx) * (Y[i] - my);
    syy += (Y[i] - my) * (Y[i] - my);
  }
  if (sxx == 0) fail(ErrorCode::Domain, "schedule is constant on the model axis");

  FitResult r;
  r.rate = sxy / sxx;
  r.intercept = my - r.rate * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = Y[i] - (r.intercept + r.rate * X[i]);
    ss += e * e;
  }
  r.residual = std::sqrt(ss / n);
  r.relative_residual = syy > 0 ? std::sqrt(ss / syy) : 0.0;
  return r;
}

FitModel select_model(std::span<const double> schedule, std::span<const double> values,
                      std::span<const FitModel> candidates) {
  if (candidates.empty()) fail(ErrorCode::Domain, "no candidate models");
  FitModel best = candidates.front();
  double best_res = std::numeric_limits<double>::infinity();
  for (FitModel m : candidates) {
    try {
      double r = fit_rate(schedule, values, m).relative_residual;
      if (r < best_res) {
        best_res = r;
        best = m;
      }
    } catch (const Error&) {
    }
  }
  return best;
}

double rate_tolerance(double predicted) { return std::max(0.1 * std::abs(predicted), 0.02); }

}  // namespace sw
