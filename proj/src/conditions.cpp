#include "conditions.hpp"

#include "error.hpp"

#include <cmath>

namespace sw {

std::string_view to_string(GeometryKind kind) {
  switch (kind) {
    case GeometryKind::FullSpace: return "full";
    case GeometryKind::HalfSpace: return "half";
    case GeometryKind::CodimK: return "codim";
  }
  return "?";
}

Geometry Geometry::full(int n) {
  if (n < 1) fail(ErrorCode::Domain, "full-space geometry needs n >= 1");
  return {GeometryKind::FullSpace, n, 0};
}

Geometry Geometry::half(int n) {
  if (n < 2) fail(ErrorCode::Domain, "half-space geometry needs n >= 2");
  return {GeometryKind::HalfSpace, n, 1};
}

Geometry Geometry::codim(int n, int k) {
  if (k == 0) return full(n);
  if (k < 0 || k >= n) fail(ErrorCode::Domain, "codim-k geometry needs n > k >= 1");
  return {GeometryKind::CodimK, n, k};
}

Geometry Geometry::from_name(std::string_view name, int n, int k) {
  if (name == "full") return full(n);
  if (name == "half") return half(n);
  if (name == "codim") return codim(n, k);
  fail(ErrorCode::Parse, "unknown geometry '" + std::string(name) + "' (expected full, half or codim)");
}

std::string Geometry::name() const {
  std::string s(to_string(kind_));
  s += ":n=" + std::to_string(n_);
  if (kind_ == GeometryKind::CodimK) s += ":k=" + std::to_string(k_);
  return s;
}

SWParams::SWParams(Geometry geom, Number p, Number r, Number alpha, Number beta, Number lambda)
    : geom_(geom), p_(std::move(p)), r_(std::move(r)), alpha_(std::move(alpha)), beta_(std::move(beta)),
      lambda_(std::move(lambda)) {
  auto gt_one = [](const Number& x) { return x.exact() ? x.rational() > 1 : x.value() > 1.0; };
  if (!gt_one(p_)) fail(ErrorCode::Domain, "p must be > 1 (got " + p_.str() + ")");
  if (!gt_one(r_)) fail(ErrorCode::Domain, "r must be > 1 (got " + r_.str() + ")");
}

bool SWParams::exact() const {
  return p_.exact() && r_.exact() && alpha_.exact() && beta_.exact() && lambda_.exact();
}

SWParams SWParams::with_lambda(Number lambda) const { return {geom_, p_, r_, alpha_, beta_, std::move(lambda)}; }

Rational conjugate(const Rational& e) {
  if (e <= 1) fail(ErrorCode::Domain, "conjugate exponent needs e > 1");
  return e / (e - 1);
}

double conjugate(double e) {
  if (!(e > 1.0)) fail(ErrorCode::Domain, "conjugate exponent needs e > 1");
  return e / (e - 1.0);
}

Number conjugate(const Number& e) { return e.exact() ? Number(conjugate(e.rational())) : Number(conjugate(e.value())); }

std::string_view to_string(ConditionId id) {
  switch (id) {
    case ConditionId::LambdaRange: return "LambdaRange";
    case ConditionId::AlphaRange: return "AlphaRange";
    case ConditionId::BetaRange: return "BetaRange";
    case ConditionId::SumNonneg: return "SumNonneg";
    case ConditionId::Hoelder: return "Hoelder";
    case ConditionId::Balance: return "Balance";
  }
  return "?";
}

std::optional<ConditionId> condition_from_string(std::string_view s) {
  for (auto id : kAllConditions)
    if (to_string(id) == s) return id;
  return std::nullopt;
}

std::string_view to_string(Strictness s) {
  switch (s) {
    case Strictness::Strict: return "Strict";
    case Strictness::NonStrict: return "NonStrict";
    case Strictness::Equality: return "Equality";
  }
  return "?";
}

bool ConditionReport::all_hold() const {
  for (const auto& e : entries)
    if (!e.holds) return false;
  return true;
}

namespace {

template <class T>
struct Values {
  T p, r, alpha, beta, lambda;
};

template <class T>
T get(const Number& x) {
  if constexpr (std::is_same_v<T, Rational>)
    return x.rational();
  else
    return x.value();
}

template <class T>
Values<T> values(const SWParams& s) {
  return {get<T>(s.p()), get<T>(s.r()), get<T>(s.alpha()), get<T>(s.beta()), get<T>(s.lambda())};
}

// (n-k)/(n p) + 1/r + (lambda + alpha + beta + k)/n; k = 0 on the full space.
template <class T>
T balance_lhs(const Geometry& g, const Values<T>& v) {
  T n(g.n()), k(g.k());
  return (n - k) / (n * v.p) + T(1) / v.r + (v.lambda + v.alpha + v.beta + k) / n;
}

template <class T>
T threshold(const Geometry& g, const Values<T>& v) {
  return T(g.n()) - T(g.k()) / v.r;
}

template <class T>
ConditionReport check(const SWParams& s) {
  const auto& g = s.geom();
  auto v = values<T>(s);
  const T zero(0), one(1), two(2);
  const T n(g.n()), dx(g.dim_x());

  auto strict = [](const T& res) { return res > T(0); };
  auto entry = [](ConditionId id, bool holds, const T& lhs, const T& rhs, Strictness st, const T& res) {
    return ConditionEntry{id, holds, Number(lhs), Number(rhs), st, Number(res)};
  };

  ConditionReport rep{g, std::is_same_v<T, Rational>, {}, false};

  T thr = threshold(g, v);
  T lam_res = std::min<T>(v.lambda, T(thr - v.lambda));
  rep.entries[0] = entry(ConditionId::LambdaRange, v.lambda > zero && v.lambda < thr, v.lambda, thr,
                         Strictness::Strict, lam_res);

  T a_rhs = dx * (v.p - one) / v.p;
  rep.entries[1] = entry(ConditionId::AlphaRange, strict(a_rhs - v.alpha), v.alpha, a_rhs, Strictness::Strict,
                         a_rhs - v.alpha);

  T b_rhs = n * (v.r - one) / v.r;
  rep.entries[2] =
      entry(ConditionId::BetaRange, strict(b_rhs - v.beta), v.beta, b_rhs, Strictness::Strict, b_rhs - v.beta);

  T sum = v.alpha + v.beta;
  rep.entries[3] = entry(ConditionId::SumNonneg, sum >= zero, sum, zero, Strictness::NonStrict, sum);

  T h = one / v.p + one / v.r;
  rep.entries[4] = entry(ConditionId::Hoelder, h >= one, h, one, Strictness::NonStrict, h - one);

  T bl = balance_lhs(g, v);
  T bres = bl - two;
  bool bal;
  if constexpr (std::is_same_v<T, Rational>)
    bal = bres == 0;
  else
    bal = std::abs(bres) <= kBalanceTol;
  rep.entries[5] = entry(ConditionId::Balance, bal, bl, two, Strictness::Equality, bres);

  if (g.kind() != GeometryKind::FullSpace) rep.open_band = v.lambda >= T(g.dim_x()) && v.lambda < thr;
  return rep;
}

}  // namespace

ConditionReport check_conditions(const SWParams& params) {
  return params.exact() ? check<Rational>(params) : check<double>(params);
}

Number balance_residual(const SWParams& params) {
  if (params.exact()) return Number(balance_lhs(params.geom(), values<Rational>(params)) - 2);
  return Number(balance_lhs(params.geom(), values<double>(params)) - 2.0);
}

namespace {

template <class T>
T solve_lambda(const Geometry& g, const Values<T>& v) {
  T n(g.n()), k(g.k());
  return n * (T(2) - T(1) / v.r - (n - k) / (n * v.p)) - v.alpha - v.beta - k;
}

template <class T>
T rewritten(const Geometry& g, const Values<T>& v) {
  T n(g.n()), k(g.k());
  T q = v.r / (v.r - T(1));
  return T(1) / v.p + T(1) / v.r + (v.lambda + v.alpha + v.beta - k / q) / (n - k) - T(2);
}

}  // namespace

Number solve_balance_lambda(const SWParams& params) {
  // lambda is irrelevant; exactness is decided by the remaining fields.
  auto s = params.with_lambda(params.lambda().exact() ? params.lambda() : Number(Rational(0)));
  if (s.exact()) return Number(solve_lambda(s.geom(), values<Rational>(s)));
  return Number(solve_lambda(s.geom(), values<double>(s)));
}

Number rewritten_balance_residual(const SWParams& params) {
  if (params.geom().kind() == GeometryKind::FullSpace)
    fail(ErrorCode::Unsupported, "rewritten balance identity is defined for the half-space and codim-k geometries");
  if (params.exact()) return Number(rewritten(params.geom(), values<Rational>(params)));
  return Number(rewritten(params.geom(), values<double>(params)));
}

Number lambda_threshold(const SWParams& params) {
  const auto& g = params.geom();
  if (params.r().exact()) return Number(Rational(g.n()) - Rational(g.k()) / params.r().rational());
  return Number(g.n() - g.k() / params.r().value());
}

ImpliedBounds implied_bounds(const SWParams& params) {
  auto thr = lambda_threshold(params);
  if (thr.exact() && params.lambda().exact()) return {Number(thr.rational() - params.lambda().rational()), thr};
  return {Number(thr.value() - params.lambda().value()), thr};
}

}  // namespace sw
