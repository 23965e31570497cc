#include "certify.hpp"

#include "error.hpp"
#include "parallel.hpp"
#include "special.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <functional>
#include <cmath>

namespace sw {

std::string_view to_string(Construction c) {
  switch (c) {
    case Construction::LambdaGeN: return "LambdaGeN";
    case Construction::BetaTooBig: return "BetaTooBig";
    case Construction::AlphaTooBig: return "AlphaTooBig";
    case Construction::BalanceScaling: return "BalanceScaling";
    case Construction::SumNegativeCylinders: return "SumNegativeCylinders";
    case Construction::HoelderLogTail: return "HoelderLogTail";
    case Construction::LambdaGeNMinusKOverR: return "LambdaGeNMinusKOverR";
  }
  return "?";
}

std::optional<Construction> construction_from_string(std::string_view s) {
  for (auto c : kAllConstructions)
    if (to_string(c) == s) return c;
  return std::nullopt;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::CertifiedDivergent: return "CertifiedDivergent";
    case Verdict::CertifiedBoundedAtScale: return "CertifiedBoundedAtScale";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

Construction construction_for(ConditionId id, const Geometry& geom) {
  switch (id) {
    case ConditionId::LambdaRange:
      return geom.kind() == GeometryKind::FullSpace ? Construction::LambdaGeN : Construction::LambdaGeNMinusKOverR;
    case ConditionId::AlphaRange: return Construction::AlphaTooBig;
    case ConditionId::BetaRange: return Construction::BetaTooBig;
    case ConditionId::SumNonneg: return Construction::SumNegativeCylinders;
    case ConditionId::Hoelder: return Construction::HoelderLogTail;
    case ConditionId::Balance: return Construction::BalanceScaling;
  }
  fail(ErrorCode::Domain, "unknown condition");
}

ConditionId condition_for(Construction c) {
  switch (c) {
    case Construction::LambdaGeN:
    case Construction::LambdaGeNMinusKOverR: return ConditionId::LambdaRange;
    case Construction::BetaTooBig: return ConditionId::BetaRange;
    case Construction::AlphaTooBig: return ConditionId::AlphaRange;
    case Construction::BalanceScaling: return ConditionId::Balance;
    case Construction::SumNegativeCylinders: return ConditionId::SumNonneg;
    case Construction::HoelderLogTail: return ConditionId::Hoelder;
  }
  fail(ErrorCode::Domain, "unknown construction");
}

namespace {

template <class T>
T as(const Number& x) {
  if constexpr (std::is_same_v<T, Rational>)
    return x.rational();
  else
    return x.value();
}

// Evaluates fn<T>() in exact arithmetic when every parameter is rational.
template <class F>
Number exact_or_float(const SWParams& s, F fn) {
  if (s.exact()) return Number(fn.template operator()<Rational>());
  return Number(fn.template operator()<double>());
}

bool equals(const Number& x, int v) {
  return x.exact() ? x.rational() == v : std::abs(x.value() - v) <= kBalanceTol * std::max(1, std::abs(v));
}
bool is_zero(const Number& x) { return equals(x, 0); }

double area0(int dim) { return dim == 1 ? 2.0 : sphere_area(dim); }

// min of t^{-a} over [lo, hi], 0 < lo.
double min_power(double a, double lo, double hi) { return std::min(std::pow(lo, -a), std::pow(hi, -a)); }

// integral_lo^hi t^{m} dt
double power_integral(double m, double lo, double hi) {
  if (m == -1) return std::log(hi / lo);
  return (std::pow(hi, m + 1) - std::pow(lo, m + 1)) / (m + 1);
}

std::vector<double> geometric_schedule(double first, double ratio, int count) {
  std::vector<double> s;
  for (int i = 0; i < count; ++i) s.push_back(first * std::pow(ratio, i));
  return s;
}

std::vector<double> default_radii() { return geometric_schedule(0.125, 0.5, 10); }

void require_decreasing(const std::vector<double>& s, double top, const char* what) {
  if (s.size() < 4) fail(ErrorCode::Domain, std::string(what) + " schedule needs at least 4 entries");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] > 0) || !(s[i] < top))
      fail(ErrorCode::Domain, std::string(what) + " schedule entries must lie in (0, " + std::to_string(top) + ")");
    if (i && !(s[i] < s[i - 1])) fail(ErrorCode::Domain, std::string(what) + " schedule must strictly decrease");
  }
}

Certificate blank(Construction c, const SWParams& s, const CertifyOptions& opts) {
  Certificate cert;
  cert.construction = c;
  cert.geom = s.geom();
  cert.p = s.p().str();
  cert.r = s.r().str();
  cert.alpha = s.alpha().str();
  cert.beta = s.beta().str();
  cert.lambda = s.lambda().str();
  cert.seed = opts.quad.seed;
  return cert;
}

std::uint64_t point_seed(const CertifyOptions& opts, Construction c, std::size_t i) {
  return derive_seed(opts.quad.seed, 1000 + static_cast<std::uint64_t>(c), i);
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

// Fits `model`, normalizes the slope by `log_coef` for the log-type models
// (so the predicted normalized rate is 1), and fills the verdict fields.
void finalize(Certificate& cert, const std::vector<double>& fit_x, const std::vector<double>& fit_y,
              std::span<const FitModel> candidates, std::optional<double> log_coef, bool extra_ok = true) {
  auto fit = fit_rate(fit_x, fit_y, cert.model);
  cert.residual = fit.residual;
  cert.fitted_rate = fit.rate;
  if (log_coef) {
    cert.extras["raw_slope"] = fit.rate;
    cert.extras["log_coefficient"] = *log_coef;
    // Decreasing schedules tending to 0 give a negative slope against log s.
    double sign = cert.model == FitModel::Log && fit_x.front() > fit_x.back() ? -1.0 : 1.0;
    cert.fitted_rate = sign * fit.rate / *log_coef;
  }
  cert.selected_model = select_model(fit_x, fit_y, candidates);
  cert.rate_tol = rate_tolerance(cert.predicted_rate);
  cert.rate_ok = std::abs(cert.fitted_rate - cert.predicted_rate) <= cert.rate_tol;
  cert.increasing = strictly_increasing(cert.values);
  bool sandwich = cert.sandwich_ok.value_or(true);
  cert.verdict = cert.increasing && cert.rate_ok && sandwich && extra_ok ? Verdict::CertifiedDivergent
                                                                         : Verdict::Inconclusive;
}

void check_sandwich(Certificate& cert) {
  if (!cert.chain_constant || cert.analytic.empty()) return;
  bool ok = true;
  for (std::size_t i = 0; i < cert.values.size(); ++i)
    if (cert.values[i] + 3 * cert.errors[i] < *cert.chain_constant * cert.analytic[i]) ok = false;
  cert.sandwich_ok = ok;
}

// Evaluates the dual-form integral over the nested windows {rho_i <= . <= 1}:
// each band between consecutive radii is integrated once and accumulated.
void accumulate_bands(Certificate& cert, double top, const std::function<Region(double, double)>& window,
                      const std::function<QuadratureResult(const Region&, std::uint64_t)>& eval,
                      const CertifyOptions& opts) {
  double acc = 0, var = 0, upper = top;
  for (std::size_t i = 0; i < cert.schedule.size(); ++i) {
    std::uint64_t seed = point_seed(opts, cert.construction, i);
    auto res = eval(window(cert.schedule[i], upper), seed);
    acc += res.value;
    var += res.error * res.error;
    cert.values.push_back(acc);
    cert.errors.push_back(std::sqrt(var));
    cert.seeds.push_back(seed);
    upper = cert.schedule[i];
  }
}

}  // namespace

double cylinder_partial_sum(double sum_ab, double s, int M) {
  double total = 0;
  for (int m = 1; m <= M; ++m) total += std::pow(2.0, -m * sum_ab) * std::pow(m + 1.0, -s);
  return total;
}

Number threshold_exponent(const SWParams& params) {
  const auto& g = params.geom();
  return exact_or_float(params, [&]<class T>() -> T {
    T r = as<T>(params.r()), lam = as<T>(params.lambda());
    T q = r / (r - T(1));
    T n(g.n()), k(g.k());
    return (lam - k / q - (n - k)) * q + T(1);
  });
}

std::pair<Number, Number> hoelder_identity(const SWParams& params) {
  const auto& g = params.geom();
  const bool full = g.kind() == GeometryKind::FullSpace;
  auto side = [&](bool lhs) {
    return exact_or_float(params, [&]<class T>() -> T {
      T p = as<T>(params.p()), r = as<T>(params.r());
      T sum = as<T>(params.lambda()) + as<T>(params.alpha()) + as<T>(params.beta());
      T n(g.n()), k(g.k());
      if (full) {
        T q = r / (r - T(1));
        return lhs ? T((sum + n / p) * q) : T(n + n * q);
      }
      T q = p / (p - T(1));
      return lhs ? T((sum + n / r) * q) : T(n - k + n * q);
    });
  };
  return {side(true), side(false)};
}

void check_regime(Construction c, const SWParams& params) {
  const auto rep = check_conditions(params);
  const auto& geom = params.geom();
  const ConditionId id = condition_for(c);
  const auto& e = rep[id];
  auto mismatch = [&](const std::string& why) {
    fail(ErrorCode::Regime, std::string(to_string(c)) + " does not apply: " + why);
  };
  auto state = [&](ConditionId cid) {
    const auto& x = rep[cid];
    return std::string(to_string(cid)) + (x.holds ? " holds" : " fails") + " (lhs " + x.lhs.str() + ", rhs " +
           x.rhs.str() + ")";
  };

  if (c == Construction::BalanceScaling) return;  // theta = 0 is reported, not rejected
  if (c == Construction::LambdaGeN && geom.kind() != GeometryKind::FullSpace)
    mismatch("geometry is " + geom.name() + "; use LambdaGeNMinusKOverR");
  if (c == Construction::LambdaGeNMinusKOverR && geom.kind() == GeometryKind::FullSpace)
    mismatch("geometry is full space; use LambdaGeN");
  if (e.holds) mismatch(state(id));
  if (id == ConditionId::LambdaRange) {
    bool nonpositive = params.lambda().exact() ? params.lambda().rational() <= 0 : params.lambda().value() <= 0;
    if (nonpositive)
      mismatch("lambda <= 0 makes the bilinear form infinite by an immediate argument; no numeric certificate");
  }
  if (c == Construction::HoelderLogTail && !rep[ConditionId::Balance].holds)
    mismatch("the exponent identity needs Balance; " + state(ConditionId::Balance));
}

Certificate certify_lambda_range(const SWParams& params, const CertifyOptions& opts) {
  check_regime(Construction::LambdaGeN, params);
  auto cert = blank(Construction::LambdaGeN, params, opts);
  const int n = params.geom().n();
  const double lam = params.lambda().value(), a = params.alpha().value(), b = params.beta().value();
  cert.schedule_name = "delta";
  cert.schedule = opts.schedule.empty() ? default_radii() : opts.schedule;
  require_decreasing(cert.schedule, 1.0, "delta");

  const auto fg = indicator_annulus(n, 1, 6);
  for (std::size_t i = 0; i < cert.schedule.size(); ++i) {
    QuadOptions q = opts.quad;
    q.seed = point_seed(opts, cert.construction, i);
    auto res = evaluate_bilinear(fg, fg, KernelSpec{params.geom(), a, b, lam, cert.schedule[i]}, q);
    cert.values.push_back(res.value);
    cert.errors.push_back(res.error);
    cert.seeds.push_back(q.seed);
  }

  // B_1(y) lies in the support for y in B_4 \ B_2, where the weights are bounded below.
  const double shell = ball_volume(n) * (std::pow(4.0, n) - std::pow(2.0, n));
  cert.chain_constant = min_power(a, 1, 5) * min_power(b, 2, 4);
  for (double d : cert.schedule) cert.analytic.push_back(shell * area0(n) * power_integral(n - 1 - lam, d, 1.0));
  check_sandwich(cert);

  const bool boundary = equals(params.lambda(), n);
  std::optional<double> coef;
  if (boundary) {
    cert.model = FitModel::Log;
    cert.predicted_rate = 1.0;
    coef = area0(n) * area0(n) * power_integral(n - 1 - a - b, 1, 6);
  } else {
    cert.model = FitModel::Power;
    cert.predicted_rate = n - lam;
  }
  const FitModel cands[] = {FitModel::Power, FitModel::Log};
  finalize(cert, cert.schedule, cert.values, cands, coef);
  return cert;
}

Certificate certify_weight_range(const SWParams& params, WeightSide side, const CertifyOptions& opts) {
  const auto c = side == WeightSide::Beta ? Construction::BetaTooBig : Construction::AlphaTooBig;
  check_regime(c, params);
  auto cert = blank(c, params, opts);
  const Geometry& geom = params.geom();
  const int n = geom.n(), dx = geom.dim_x();
  const bool half = geom.upper_half();
  const double lam = params.lambda().value(), a = params.alpha().value(), b = params.beta().value();
  cert.schedule_name = "rho_min";
  cert.schedule = opts.schedule.empty() ? default_radii() : opts.schedule;
  require_decreasing(cert.schedule, 1.0, "rho_min");
  const KernelSpec spec{geom, a, b, lam, 0};
  const double half_factor = half ? 0.5 : 1.0;

  // Window dimension, outer weight exponent, and the separated test function.
  const bool beta_side = side == WeightSide::Beta;
  const Number q_num = conjugate(beta_side ? params.r() : params.p());
  const double q = q_num.value();
  const int wdim = beta_side ? n : dx;
  const double wexp = (beta_side ? b : a) * q;
  const auto test_fn = beta_side ? indicator_annulus(dx, 2, 3)
                                 : (half ? indicator_half_annulus(n, 2, 3) : indicator_annulus(n, 2, 3));
  const double window_area = area0(wdim) * (beta_side ? half_factor : 1.0);
  const bool window_half = beta_side && half;

  auto window = [&](double lo, double hi) {
    return Region{wdim, geometric_shells(wdim, lo, hi, 2.0, window_half)};
  };
  auto eval = [&](const Region& w, std::uint64_t seed) {
    QuadOptions o = opts.quad;
    o.seed = seed;
    return beta_side ? evaluate_dual_f(test_fn, spec, q, w, o) : evaluate_dual_g(test_fn, spec, q, w, o);
  };
  accumulate_bands(cert, 1.0, window, eval, opts);

  // Inner integral bounds: 1 <= |x - y| <= D on the construction's supports.
  const double D = half ? std::sqrt(beta_side ? 21.0 : 29.0) : 4.0;
  const int fdim = beta_side ? dx : n;
  const double ffac = beta_side ? 1.0 : half_factor;
  const double inner_w = beta_side ? a : b;
  const double mass = ffac * area0(fdim) * power_integral(fdim - 1 - inner_w, 2, 3);
  cert.chain_constant = std::pow(min_power(lam, 1, D) * mass, q);
  cert.extras["distance_bound"] = D;
  for (double r0 : cert.schedule) cert.analytic.push_back(window_area * power_integral(wdim - 1 - wexp, r0, 1.0));
  check_sandwich(cert);

  // Radial exponent of the outer integral: wdim - (weight) q.
  const Number w_num = beta_side ? params.beta() : params.alpha();
  Number expo = exact_or_float(params, [&]<class T>() -> T { return T(wdim) - as<T>(w_num) * as<T>(q_num); });
  cert.extras["radial_exponent"] = expo.str();
  std::optional<double> coef;
  if (is_zero(expo)) {
    cert.model = FitModel::Log;
    cert.predicted_rate = 1.0;
    const double t0 = ffac * area0(fdim) * power_integral(fdim - 1 - inner_w - lam, 2, 3);
    coef = window_area * std::pow(t0, q);
  } else {
    cert.model = FitModel::Power;
    cert.predicted_rate = expo.value();
  }
  const FitModel cands[] = {FitModel::Power, FitModel::Log};
  finalize(cert, cert.schedule, cert.values, cands, coef);
  return cert;
}

Certificate verify_scaling_law(const SWParams& params, const CertifyOptions& opts) {
  check_regime(Construction::BalanceScaling, params);
  auto cert = blank(Construction::BalanceScaling, params, opts);
  const Geometry& geom = params.geom();
  const int n = geom.n(), dx = geom.dim_x();
  const double p = params.p().value(), r = params.r().value();
  const KernelSpec spec{geom, params.alpha().value(), params.beta().value(), params.lambda().value(), 0};

  const TrialFunction f = opts.f ? *opts.f : indicator_annulus(dx, 1, 2);
  const TrialFunction g =
      opts.g ? *opts.g : (geom.upper_half() ? indicator_half_annulus(n, 3, 4) : indicator_annulus(n, 3, 4));
  cert.extras["f"] = f.label();
  cert.extras["g"] = g.label();

  const Number theta = balance_residual(params);
  cert.predicted_rate = -theta.value() * n + 0.0;  // no negative zero
  cert.extras["theta"] = theta.str();
  std::vector<double> scales = opts.schedule.empty() ? std::vector<double>{1.0 / 16, 0.25, 1, 4, 16} : opts.schedule;
  if (scales.size() < 4) fail(ErrorCode::Domain, "scale schedule needs at least 4 entries");
  for (double s : scales)
    if (!(s > 0)) fail(ErrorCode::Domain, "scales must be positive");
  std::sort(scales.begin(), scales.end());
  // Walk toward the end where the form grows.
  if (cert.predicted_rate < 0) std::reverse(scales.begin(), scales.end());
  cert.schedule_name = "scale";
  cert.schedule = scales;

  for (std::size_t i = 0; i < scales.size(); ++i) {
    QuadOptions q = opts.quad;
    q.seed = point_seed(opts, cert.construction, i);
    auto res = evaluate_bilinear(dilate(f, p, scales[i]), dilate(g, r, scales[i]), spec, q);
    cert.values.push_back(res.value);
    cert.errors.push_back(res.error);
    cert.seeds.push_back(q.seed);
  }
  cert.model = FitModel::Power;
  const FitModel cands[] = {FitModel::Power};
  finalize(cert, cert.schedule, cert.values, cands, std::nullopt);
  if (is_zero(theta)) {
    cert.verdict = std::abs(cert.fitted_rate) <= cert.rate_tol ? Verdict::CertifiedBoundedAtScale : Verdict::Inconclusive;
    cert.notes.push_back("balance holds: dilation leaves the quotient unchanged");
  }
  return cert;
}

Certificate certify_sum_negative(const SWParams& params, const CertifyOptions& opts) {
  check_regime(Construction::SumNegativeCylinders, params);
  if (!(opts.eps > 0)) fail(ErrorCode::Domain, "cylinder family needs eps > 0");
  auto cert = blank(Construction::SumNegativeCylinders, params, opts);
  const Geometry& geom = params.geom();
  const int n = geom.n(), k = geom.k(), dx = geom.dim_x();
  const double p = params.p().value(), r = params.r().value();
  const double a = params.alpha().value(), b = params.beta().value(), lam = params.lambda().value();
  const double sum = a + b;
  const double s = 1 / p + 1 / r + 2 * opts.eps;

  cert.schedule_name = "M";
  cert.schedule = opts.schedule.empty() ? std::vector<double>{2, 4, 8, 16, 32} : opts.schedule;
  if (cert.schedule.size() < 4) fail(ErrorCode::Domain, "M schedule needs at least 4 entries");
  std::vector<double> compensated, ratios;
  for (double Mv : cert.schedule) {
    int M = static_cast<int>(Mv);
    if (M != Mv || M < 1) fail(ErrorCode::Domain, "M schedule entries must be positive integers");
    double SM = cylinder_partial_sum(sum, s, M);
    cert.values.push_back(SM);
    cert.errors.push_back(0.0);
    compensated.push_back(SM * std::pow(M + 1.0, s));
    ratios.push_back(SM / cylinder_partial_sum(sum, s, M - 1));
  }
  cert.extras["series_exponent"] = s;
  cert.extras["compensated"] = compensated;
  cert.extras["doubling_ratio"] = ratios;

  // Chain: |x-y| <= 3 on each slab pair; |x| <= 2 x_last and x_last <= 2^{m+1} for the weights.
  double G;
  if (geom.kind() == GeometryKind::FullSpace)
    G = ball_volume0(n - 1);
  else if (geom.kind() == GeometryKind::HalfSpace)
    G = ball_volume0(n - 2) * 1.5;
  else
    G = ball_volume0(n - k - 1) * area0(k) * (std::pow(2.0, k + 1) - 1) / (k + 1);
  double chain = 0;
  if (lam >= 0)
    chain = std::pow(3.0, -lam) * std::pow(4.0, -std::max(a, 0.0)) * std::pow(4.0, -std::max(b, 0.0)) *
            ball_volume0(dx - 1) * G;
  else
    cert.notes.push_back("lambda < 0: the kernel has no positive lower bound on the slabs, chain constant 0");
  cert.chain_constant = chain;

  // Numeric truncated forms over the first M cylinders.
  std::vector<double> nm, nv, ne, na;
  bool sandwich = true;
  const KernelSpec spec{geom, a, b, lam, 0};
  for (int M = 1; M <= opts.numeric_m_max; ++M) {
    QuadOptions q = opts.quad;
    q.seed = point_seed(opts, cert.construction, static_cast<std::size_t>(M));
    auto f = cylinder_family(geom, CylinderSide::F, p, opts.eps, M);
    auto g = cylinder_family(geom, CylinderSide::G, r, opts.eps, M);
    auto res = evaluate_bilinear(f, g, spec, q);
    double SM = cylinder_partial_sum(sum, s, M);
    nm.push_back(M);
    nv.push_back(res.value);
    ne.push_back(res.error);
    na.push_back(SM);
    cert.seeds.push_back(q.seed);
    if (res.value + 3 * res.error < chain * SM) sandwich = false;
  }
  cert.extras["numeric_M"] = nm;
  cert.extras["numeric_values"] = nv;
  cert.extras["numeric_errors"] = ne;
  cert.extras["numeric_partial_sums"] = na;
  cert.sandwich_ok = sandwich;

  cert.model = FitModel::Geometric;
  cert.predicted_rate = -sum * std::log(2.0);
  cert.notes.push_back("rate fitted on S_M (M+1)^s, which removes the polynomial factor of the last term");
  const FitModel cands[] = {FitModel::Geometric, FitModel::Power};
  finalize(cert, cert.schedule, compensated, cands, std::nullopt);
  return cert;
}

Certificate certify_hoelder(const SWParams& params, const CertifyOptions& opts) {
  check_regime(Construction::HoelderLogTail, params);
  auto cert = blank(Construction::HoelderLogTail, params, opts);
  const Geometry& geom = params.geom();
  const int d = geom.kind() == GeometryKind::FullSpace ? geom.n() : geom.dim_x();

  auto [lhs, rhs] = hoelder_identity(params);
  bool identity = lhs.exact() && rhs.exact() ? lhs.rational() == rhs.rational()
                                             : std::abs(lhs.value() - rhs.value()) <= 1e-9 * std::abs(rhs.value());
  cert.extras["identity_lhs"] = lhs.str();
  cert.extras["identity_rhs"] = rhs.str();
  cert.extras["identity_holds"] = identity;
  cert.extras["outer_dimension"] = d;

  cert.schedule_name = "R";
  cert.schedule = opts.schedule.empty() ? std::vector<double>{4, 16, 256, 65536} : opts.schedule;
  if (cert.schedule.size() < 4) fail(ErrorCode::Domain, "R schedule needs at least 4 entries");
  std::vector<double> closed;
  double max_rel = 0;
  const double area = area0(d);
  for (std::size_t i = 0; i < cert.schedule.size(); ++i) {
    double R = cert.schedule[i];
    if (!(R >= 4) || (i && !(R > cert.schedule[i - 1])))
      fail(ErrorCode::Domain, "R schedule must start at >= 4 and strictly increase");
    // |y|^{-d} / log|y| over 4 <= |y| <= R, radially with u = log rho.
    double err = 0;
    double v = R == 4 ? 0.0
                      : area * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                                   [](double u) { return 1.0 / u; }, std::log(4.0), std::log(R), 15, 1e-14, &err);
    double c = area * (std::log(std::log(R)) - std::log(std::log(4.0)));
    cert.values.push_back(v);
    cert.errors.push_back(area * err);
    closed.push_back(c);
    max_rel = std::max(max_rel, std::abs(v - c) / std::max(1.0, std::abs(c)));
  }
  cert.extras["closed_form"] = closed;
  cert.extras["closed_form_max_rel_error"] = max_rel;
  const bool closed_ok = max_rel <= 1e-6;

  cert.model = FitModel::LogLog;
  cert.predicted_rate = 1.0;
  const FitModel cands[] = {FitModel::LogLog, FitModel::Log};
  finalize(cert, cert.schedule, cert.values, cands, area, identity && closed_ok);
  return cert;
}

Certificate certify_lambda_threshold(const SWParams& params, const CertifyOptions& opts) {
  check_regime(Construction::LambdaGeNMinusKOverR, params);
  auto cert = blank(Construction::LambdaGeNMinusKOverR, params, opts);
  const Geometry& geom = params.geom();
  const int n = geom.n(), k = geom.k(), dx = geom.dim_x();
  const bool half = geom.upper_half();
  const double lam = params.lambda().value(), a = params.alpha().value(), b = params.beta().value();
  const double q = conjugate(params.r()).value();
  cert.schedule_name = "rho_min";
  cert.schedule = opts.schedule.empty() ? default_radii() : opts.schedule;
  require_decreasing(cert.schedule, 1.0, "rho_min");

  const Number E = threshold_exponent(params);
  cert.extras["inner_exponent"] = E.str();
  cert.extras["inner_exponent_is_one"] = equals(E, 1);

  const auto f = indicator_annulus(dx, 0, 6);
  const KernelSpec spec{geom, a, b, lam, 0};
  auto window = [&](double lo, double hi) {
    Region reg{n, {}};
    auto shells = geometric_shells(1, lo, hi);
    for (const auto& sh : shells) {
      const auto& blk = std::get<BallBlock>(sh.blocks().front());
      Block transverse = half ? Block(IntervalBlock{blk.inner, blk.outer}) : Block(BallBlock{k, blk.inner, blk.outer});
      reg.pieces.emplace_back(std::vector<Block>{BallBlock{dx, 2.0, 4.0}, transverse});
    }
    return reg;
  };
  auto eval = [&](const Region& w, std::uint64_t seed) {
    QuadOptions o = opts.quad;
    o.seed = seed;
    return evaluate_dual_f(f, spec, q, w, o);
  };
  accumulate_bands(cert, 1.0, window, eval, opts);

  // Chain: |x - y| <= 2 rho gives the factor (2 rho)^{-lambda}; B_rho(y_a) lies in B_5 \ B_1
  // and 2 <= |y| <= sqrt(17) on the window.
  const double transverse = half ? 1.0 : area0(k);
  const double shell = ball_volume(dx) * (std::pow(4.0, dx) - std::pow(2.0, dx));
  const double ca = min_power(a, 1, 5), cb = min_power(b, 2, std::sqrt(17.0));
  cert.chain_constant = std::pow(std::pow(2.0, -lam) * ball_volume(dx) * ca * cb, q) * shell * transverse;
  const double Ev = E.value();
  for (double r0 : cert.schedule) cert.analytic.push_back(power_integral(-Ev, r0, 1.0));
  check_sandwich(cert);

  std::optional<double> coef;
  if (equals(E, 1)) {
    cert.model = FitModel::Log;
    cert.predicted_rate = 1.0;
    const double ct = std::pow(kPi, 0.5 * dx) * std::tgamma(0.5 * (lam - dx)) / std::tgamma(0.5 * lam);
    coef = transverse * std::pow(ct, q) * area0(dx) * power_integral(dx - 1 - (a + b) * q, 2, 4);
  } else {
    cert.model = FitModel::Power;
    cert.predicted_rate = 1 - Ev;
  }
  const FitModel cands[] = {FitModel::Power, FitModel::Log};
  finalize(cert, cert.schedule, cert.values, cands, coef);
  return cert;
}

Certificate run_certificate(Construction c, const SWParams& params, const CertifyOptions& opts) {
  switch (c) {
    case Construction::LambdaGeN: return certify_lambda_range(params, opts);
    case Construction::BetaTooBig: return certify_weight_range(params, WeightSide::Beta, opts);
    case Construction::AlphaTooBig: return certify_weight_range(params, WeightSide::Alpha, opts);
    case Construction::BalanceScaling: return verify_scaling_law(params, opts);
    case Construction::SumNegativeCylinders: return certify_sum_negative(params, opts);
    case Construction::HoelderLogTail: return certify_hoelder(params, opts);
    case Construction::LambdaGeNMinusKOverR: return certify_lambda_threshold(params, opts);
  }
  fail(ErrorCode::Domain, "unknown construction");
}

}  // namespace sw
