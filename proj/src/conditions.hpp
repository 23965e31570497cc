#pragma once

// Parameter model and exact condition checking for the three Stein-Weiss
// geometries: R^n x R^n, R^{n-1} x R^n_+ and R^{n-k} x R^n.

#include "number.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace sw {

enum class GeometryKind { FullSpace, HalfSpace, CodimK };

std::string_view to_string(GeometryKind kind);

class Geometry {
 public:
  static Geometry full(int n);
  static Geometry half(int n);
  /// k == 0 collapses to the full-space geometry.
  static Geometry codim(int n, int k);
  /// Accepts "full", "half" or "codim" (k ignored unless codim).
  static Geometry from_name(std::string_view name, int n, int k);

  GeometryKind kind() const { return kind_; }
  int n() const { return n_; }
  int k() const { return k_; }
  /// Dimension of the f-side domain.
  int dim_x() const { return n_ - k_; }
  /// Dimension of the g-side domain (R^n or R^n_+).
  int dim_y() const { return n_; }
  bool upper_half() const { return kind_ == GeometryKind::HalfSpace; }
  std::string name() const;

  friend bool operator==(const Geometry&, const Geometry&) = default;

 private:
  Geometry(GeometryKind kind, int n, int k) : kind_(kind), n_(n), k_(k) {}
  GeometryKind kind_;
  int n_;
  int k_;
};

/// The tuple (geometry, p, r, alpha, beta, lambda). Requires p > 1 and r > 1.
class SWParams {
 public:
  SWParams(Geometry geom, Number p, Number r, Number alpha, Number beta, Number lambda);

  const Geometry& geom() const { return geom_; }
  const Number& p() const { return p_; }
  const Number& r() const { return r_; }
  const Number& alpha() const { return alpha_; }
  const Number& beta() const { return beta_; }
  const Number& lambda() const { return lambda_; }
  /// True when every numeric field is rational.
  bool exact() const;

  SWParams with_lambda(Number lambda) const;

 private:
  Geometry geom_;
  Number p_, r_, alpha_, beta_, lambda_;
};

/// e / (e - 1). Throws Domain for e <= 1.
Rational conjugate(const Rational& e);
double conjugate(double e);
Number conjugate(const Number& e);

enum class ConditionId { LambdaRange, AlphaRange, BetaRange, SumNonneg, Hoelder, Balance };
inline constexpr std::array<ConditionId, 6> kAllConditions = {
    ConditionId::LambdaRange, ConditionId::AlphaRange, ConditionId::BetaRange,
    ConditionId::SumNonneg,   ConditionId::Hoelder,    ConditionId::Balance};

std::string_view to_string(ConditionId id);
std::optional<ConditionId> condition_from_string(std::string_view s);

enum class Strictness { Strict, NonStrict, Equality };
std::string_view to_string(Strictness s);

/// One verdict. For the two-sided LambdaRange, lhs is lambda, rhs the upper
/// threshold, and residual min(lambda, rhs - lambda). Otherwise residual is
/// oriented so that holds <=> residual > 0 (Strict), >= 0 (NonStrict) or
/// == 0 (Equality; |residual| <= kBalanceTol in float mode).
struct ConditionEntry {
  ConditionId id;
  bool holds;
  Number lhs;
  Number rhs;
  Strictness strictness;
  Number residual;
};

inline constexpr double kBalanceTol = 1e-12;

struct ConditionReport {
  Geometry geom;
  bool exact;
  std::array<ConditionEntry, 6> entries;
  /// lambda in [n-k, n-k/r) for the half-space and codim-k geometries: the
  /// band where no necessity result is available.
  bool open_band;

  const ConditionEntry& operator[](ConditionId id) const { return entries[static_cast<std::size_t>(id)]; }
  bool all_hold() const;
};

ConditionReport check_conditions(const SWParams& params);

/// Balance residual (left side minus 2) in the geometry's own form.
Number balance_residual(const SWParams& params);

/// The lambda that makes Balance hold exactly; params.lambda() is ignored.
Number solve_balance_lambda(const SWParams& params);

/// 1/p + 1/r + (lambda + alpha + beta - k/q)/(n - k) - 2 with q = r/(r-1).
/// Throws Unsupported on the full-space geometry.
Number rewritten_balance_residual(const SWParams& params);

struct ImpliedBounds {
  Number sum_upper;         // upper bound on alpha + beta implied by Balance + Hoelder
  Number lambda_threshold;  // n, or n - k/r
};
ImpliedBounds implied_bounds(const SWParams& params);

/// n for the full space, n - k/r otherwise.
Number lambda_threshold(const SWParams& params);

}  // namespace sw
