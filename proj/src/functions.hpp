#pragma once

// Trial functions: evaluable nonnegative functions with a declared support,
// optional analytic L^e norms, and the constructors for every
// counterexample family.

#include "conditions.hpp"
#include "region.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sw {

class TrialFunction {
 public:
  using Eval = std::function<double(std::span<const double>)>;
  /// Returns the L^e norm for exponents where a closed form (or summed
  /// series) is available.
  using NormFn = std::function<std::optional<double>(double)>;
  /// Value at radius s for radial functions.
  using Profile = std::function<double(double)>;
  /// Upper bound on the integral of f^e over {|x| > R}.
  using TailBound = std::function<std::optional<double>(double e, double R)>;
  /// Splits log f(e^u) = slope * u + rest(u) so that tails can be
  /// integrated in log-radius without cancellation; returns {slope, rest(u)}.
  using LogProfile = std::function<std::pair<double, double>(double)>;

  TrialFunction(std::string label, int dim, Support support, Eval eval, double char_length);

  TrialFunction with_norm(NormFn fn) const;
  TrialFunction with_profile(Profile fn) const;
  TrialFunction with_tail_bound(TailBound fn) const;
  TrialFunction with_log_profile(LogProfile fn) const;

  /// f(x); exactly zero outside the declared support.
  double operator()(std::span<const double> x) const {
    return impl_->support.contains(x) ? impl_->eval(x) : 0.0;
  }

  int dim() const { return impl_->dim; }
  const std::string& label() const { return impl_->label; }
  const Support& support() const { return impl_->support; }
  /// Typical length scale; used to size local sampling balls. Dilation scales it.
  double char_length() const { return impl_->char_length; }

  std::optional<double> analytic_norm(double e) const;
  bool radial() const { return static_cast<bool>(impl_->profile); }
  double profile(double s) const { return impl_->profile(s); }
  std::optional<double> tail_bound(double e, double R) const;
  bool has_log_profile() const { return static_cast<bool>(impl_->log_profile); }
  std::pair<double, double> log_profile(double u) const { return impl_->log_profile(u); }

 private:
  struct Impl {
    std::string label;
    int dim;
    Support support;
    Eval eval;
    double char_length;
    NormFn norm;
    Profile profile;
    TailBound tail;
    LogProfile log_profile;
  };
  explicit TrialFunction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Characteristic function of {inner <= |x| <= outer} in R^dim.
TrialFunction indicator_annulus(int dim, double inner, double outer);

/// Annulus intersected with the open upper half space {x_dim > 0}.
TrialFunction indicator_half_annulus(int dim, double inner, double outer);

/// chi_[lo, hi] on R.
TrialFunction indicator_interval(double lo, double hi);

/// (1 - |x|^2/R^2)^2 on B_R.
TrialFunction bump(int dim, double radius);

/// |x|^{-a} on B_R.
TrialFunction power_ball(int dim, double a, double radius);

/// x -> scale^{-dim/e} f(x/scale); preserves the L^e norm.
TrialFunction dilate(const TrialFunction& f, double exponent, double scale);

/// |x|^{-dim/e} (log|x|)^{-1/q} on {|x| >= 2}; natural log. Requires e > q > 1.
TrialFunction log_tail(int dim, double decay_exponent, double log_exponent);

enum class CylinderSide { F, G };

/// Disjoint width-one slabs {2^m <= t <= 2^m + 1, |x'| <= 1}, m = 1..m_max,
/// with value (log2 t)^{-1/e - eps}, t the last coordinate of the paired
/// block. The g side carries the extra factor y_n (half space, 1 < y_n < 2)
/// or |y''| (codim k, 1 < |y''| < 2).
TrialFunction cylinder_family(const Geometry& geom, CylinderSide side, double exponent, double eps, int m_max);

/// Integral over [2^m, 2^m + 1] of (log2 t)^{-c}.
double cylinder_slab_integral(int m, double c);

struct SeriesBound {
  double partial;    // sum_{m=1}^{M} m^{-(1 + e eps)}
  double remainder;  // integral_M^inf t^{-(1 + e eps)} dt, bounds the tail
};
SeriesBound cylinder_series_bound(double exponent, double eps, int m_max);

/// Parse a stable catalog id such as "annulus:3:1:6" or
/// "cylinder:full:n=2:p=2:eps=0.1:M=20". Throws Parse for unknown ids.
TrialFunction function_from_id(std::string_view id);

struct CatalogEntry {
  std::string pattern;
  std::string example;
  std::string description;
};
const std::vector<CatalogEntry>& catalog();

}  // namespace sw
