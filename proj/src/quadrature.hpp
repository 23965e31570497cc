#pragma once

// Weighted bilinear form I(f, g), its dual operator forms, L^e norms and the
// normalized quotient.

#include "conditions.hpp"
#include "functions.hpp"
#include "region.hpp"

#include <cstdint>
#include <string_view>

namespace sw {

struct KernelSpec {
  Geometry geom;
  double alpha = 0;
  double beta = 0;
  double lambda = 0;
  /// Pairs with |x - y| < exclusion_radius contribute zero.
  double exclusion_radius = 0;
};

enum class QuadMethod { RadialDeterministic, MonteCarlo, Hybrid };
std::string_view to_string(QuadMethod m);

enum class MethodChoice { Auto, MonteCarlo, Radial };

struct QuadOptions {
  std::uint64_t budget = 200000;
  std::uint64_t seed = 1;
  MethodChoice method = MethodChoice::Auto;
  /// Mixture weights of the x-side sampler. The origin stratum is only used
  /// when the weight is singular there; otherwise its mass moves to uniform.
  double local_weight = 0.5;
  double origin_weight = 0.2;
  /// Radius of the local ball, as a multiple of the sampled function's length scale.
  double local_radius_factor = 0.5;
  /// Unbounded supports are integrated up to this radius.
  double truncation_radius = 64;
  /// Inner samples per outer sample in the dual forms; 0 means ceil(sqrt(budget)).
  std::uint64_t inner_budget = 0;
  int threads = 0;
};

struct QuadratureResult {
  double value = 0;
  double error = 0;
  QuadMethod method = QuadMethod::MonteCarlo;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

/// Mean of |x - y|^{-lambda} over x on the sphere of radius s in R^n, with
/// |y| = t. Returns 1 for lambda == 0. Throws Domain when s == t and
/// lambda >= n - 1 (the average diverges).
double angular_average(int n, double lambda, double s, double t);

QuadratureResult evaluate_bilinear(const TrialFunction& f, const TrialFunction& g, const KernelSpec& spec,
                                   const QuadOptions& opts);

/// Integral over y_window of (int f(x)|x|^-a |x-y|^-l dx)^q |y|^{-b q} dy.
QuadratureResult evaluate_dual_f(const TrialFunction& f, const KernelSpec& spec, double q, const Region& y_window,
                                 const QuadOptions& opts);

/// Integral over x_window of (int g(y)|y|^-b |x-y|^-l dy)^q |x|^{-a q} dx.
QuadratureResult evaluate_dual_g(const TrialFunction& g, const KernelSpec& spec, double q, const Region& x_window,
                                 const QuadOptions& opts);

/// (int f^e)^{1/e}.
QuadratureResult lp_norm_numeric(const TrialFunction& f, double e, const QuadOptions& opts);

struct QuotientResult {
  QuadratureResult bilinear;
  QuadratureResult norm_f;
  QuadratureResult norm_g;
  QuadratureResult quotient;
  bool analytic_norms;
};

/// I(f, g) / (||f||_p ||g||_r). Uses analytic norms when both are known.
QuotientResult quotient(const TrialFunction& f, const TrialFunction& g, const KernelSpec& spec, double p, double r,
                        const QuadOptions& opts);

}  // namespace sw
