// tanh_sinh asserts that rounding never lands on an endpoint; the integrands
// below return 0 there instead.
#define BOOST_DISABLE_ASSERTS
#include "quadrature.hpp"

#include "error.hpp"
#include "parallel.hpp"
#include "special.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace sw {

std::string_view to_string(QuadMethod m) {
  switch (m) {
    case QuadMethod::RadialDeterministic: return "RadialDeterministic";
    case QuadMethod::MonteCarlo: return "MonteCarlo";
    case QuadMethod::Hybrid: return "Hybrid";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kChunk = 4096;

double area0(int dim) { return dim == 1 ? 2.0 : sphere_area(dim); }

double kernel_power(double d, double lambda) { return lambda == 0 ? 1.0 : std::pow(d, -lambda); }

double weight_power(double r, double a) { return a == 0 ? 1.0 : std::pow(r, -a); }

void random_direction(Rng& rng, std::span<double> out) {
  if (out.size() == 1) {
    out[0] = (rng() >> 63) ? 1.0 : -1.0;
    return;
  }
  std::normal_distribution<double> normal;
  double s = 0;
  do {
    s = 0;
    for (double& v : out) {
      v = normal(rng);
      s += v * v;
    }
  } while (s == 0.0);
  s = 1.0 / std::sqrt(s);
  for (double& v : out) v *= s;
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

// Radius with density proportional to r^{m1 - 1} on [a, h].
double sample_power_radius(Rng& rng, double m1, double a, double h) {
  double u = uniform01(rng);
  if (m1 == 0) return a * std::pow(h / a, u);
  double lo = std::pow(a, m1), hi = std::pow(h, m1);
  return std::pow(lo + u * (hi - lo), 1.0 / m1);
}

double power_normalizer(double m1, double a, double h) {
  if (m1 == 0) return std::log(h / a);
  return (std::pow(h, m1) - std::pow(a, m1)) / m1;
}

// Density proportional to |z - c|^{-gamma} on a <= |z - c| <= h, or the
// Cauchy-like density (1 + |z - c|^2 / rho^2)^{-lambda/2} when the kernel is
// smoothed by a transverse offset rho > 0 and lambda > dim.
class LocalComponent {
 public:
  LocalComponent(int dim, double lambda, double delta, double h) : dim_(dim), lambda_(lambda), delta_(delta), h0_(h) {
    area_ = area0(dim);
    if (lambda > dim) {
      log_beta_ = std::lgamma(0.5 * dim) + std::lgamma(0.5 * (lambda - dim)) - std::lgamma(0.5 * lambda);
      g1_ = std::gamma_distribution<double>(0.5 * dim);
      g2_ = std::gamma_distribution<double>(0.5 * (lambda - dim));
    }
  }

  void set(std::span<const double> center, double rho) {
    std::copy(center.begin(), center.begin() + dim_, c_.begin());
    rho_ = rho;
    beta_prime_ = rho > 0 && lambda_ > dim_;
    if (beta_prime_) {
      log_norm_ = std::log(2.0) - log_beta_ - std::log(area_) - dim_ * std::log(rho);
      return;
    }
    a_ = std::sqrt(std::max(0.0, delta_ * delta_ - rho * rho));
    h_ = std::max(h0_, 2 * a_);
    gamma_ = std::max(lambda_, 0.0);
    if (a_ == 0 && gamma_ >= dim_) gamma_ = dim_ - 0.5;
    m1_ = dim_ - gamma_;
    z_ = area_ * power_normalizer(m1_, a_, h_);
  }

  void sample(Rng& rng, std::span<double> out) {
    auto z = out.first(dim_);
    random_direction(rng, z);
    double r;
    if (beta_prime_) {
      double a = g1_(rng), b = g2_(rng);
      r = rho_ * std::sqrt(a / b);
    } else {
      r = sample_power_radius(rng, m1_, a_, h_);
    }
    for (int i = 0; i < dim_; ++i) z[i] = c_[i] + r * z[i];
  }

  double pdf(std::span<const double> x) const {
    double s = 0;
    for (int i = 0; i < dim_; ++i) s += (x[i] - c_[i]) * (x[i] - c_[i]);
    double r = std::sqrt(s);
    if (beta_prime_) {
      double t2 = s / (rho_ * rho_);
      return std::exp(log_norm_ - 0.5 * lambda_ * std::log1p(t2));
    }
    if (r < a_ || r > h_ || r == 0) return 0.0;
    return weight_power(r, gamma_) / z_;
  }

 private:
  int dim_;
  double lambda_, delta_, h0_;
  double area_;
  double log_beta_ = 0;
  std::gamma_distribution<double> g1_, g2_;
  Point c_{};
  double rho_ = 0;
  bool beta_prime_ = false;
  double log_norm_ = 0;
  double a_ = 0, h_ = 0, gamma_ = 0, m1_ = 0, z_ = 1;
};

// Density proportional to |z|^{-gamma} on |z| <= R.
struct OriginComponent {
  int dim;
  double gamma;
  double radius;

  void sample(Rng& rng, std::span<double> out) const {
    auto z = out.first(dim);
    random_direction(rng, z);
    double r = radius * std::pow(uniform01(rng), 1.0 / (dim - gamma));
    for (double& v : z) v *= r;
  }
  double pdf(std::span<const double> x) const {
    double r = norm(x.first(dim));
    if (r > radius || r == 0) return 0.0;
    return (dim - gamma) * weight_power(r, gamma) / (area0(dim) * std::pow(radius, dim - gamma));
  }
};

std::optional<OriginComponent> origin_for(int dim, double exponent, const Region& region) {
  if (!(exponent > 0) || !region.touches_origin()) return std::nullopt;
  double gamma = exponent < dim ? exponent : dim - 0.5;
  return OriginComponent{dim, gamma, region.outer_radius()};
}

// Mixture of uniform-over-region, an optional local component and an
// optional origin component. With `reflect` the last coordinate is folded
// onto (0, inf), which doubles the density of components symmetric in it.
class Mixture {
 public:
  Mixture(int dim, Region region, std::optional<LocalComponent> local, std::optional<OriginComponent> origin,
          const QuadOptions& opts, bool reflect)
      : dim_(dim), region_(std::move(region)), local_(std::move(local)), origin_(origin), reflect_(reflect) {
    w_local_ = local_ ? opts.local_weight : 0.0;
    w_origin_ = origin_ ? opts.origin_weight : 0.0;
    if (!region_.pieces.empty()) {
      vol_ = region_.volume();
      double acc = 0;
      for (const auto& p : region_.pieces) cum_.push_back(acc += p.volume());
    }
    if (cum_.empty() || !(vol_ > 0)) {
      double s = w_local_ + w_origin_;
      if (s <= 0) fail(ErrorCode::Degenerate, "sampler has no component with positive mass");
      w_local_ /= s;
      w_origin_ /= s;
    }
    w_uniform_ = 1.0 - w_local_ - w_origin_;
    if (w_uniform_ < -1e-12) fail(ErrorCode::Domain, "mixture weights exceed 1");
  }

  LocalComponent* local() { return local_ ? &*local_ : nullptr; }
  const Region& region() const { return region_; }

  void sample(Rng& rng, std::span<double> out) {
    double u = uniform01(rng);
    if (u < w_local_) {
      local_->sample(rng, out);
    } else if (u < w_local_ + w_origin_) {
      origin_->sample(rng, out);
    } else {
      double v = uniform01(rng) * cum_.back();
      auto it = std::upper_bound(cum_.begin(), cum_.end(), v);
      std::size_t i = std::min<std::size_t>(it - cum_.begin(), cum_.size() - 1);
      region_.pieces[i].sample(rng, out.first(dim_));
    }
    if (reflect_) out[dim_ - 1] = std::abs(out[dim_ - 1]);
  }

  double pdf(std::span<const double> x) const {
    double p = 0;
    if (w_uniform_ > 0 && region_.contains(x)) p += w_uniform_ / vol_;
    if (!reflect_) return p + symmetric_part(x);
    if (!(x[dim_ - 1] > 0)) return 0.0;
    Point m{};
    std::copy(x.begin(), x.begin() + dim_, m.begin());
    m[dim_ - 1] = -m[dim_ - 1];
    return p + symmetric_part(x) + symmetric_part(std::span<const double>(m.data(), dim_));
  }

 private:
  double symmetric_part(std::span<const double> x) const {
    double p = 0;
    if (w_local_ > 0) p += w_local_ * local_->pdf(x);
    if (w_origin_ > 0) p += w_origin_ * origin_->pdf(x);
    return p;
  }

  int dim_;
  Region region_;
  std::optional<LocalComponent> local_;
  std::optional<OriginComponent> origin_;
  bool reflect_;
  double w_local_ = 0, w_origin_ = 0, w_uniform_ = 0;
  double vol_ = 0;
  std::vector<double> cum_;
};

struct Moments {
  double sum = 0;
  double sumsq = 0;
  std::uint64_t n = 0;
  void add(double w) {
    sum += w;
    sumsq += w * w;
    ++n;
  }
};

using SampleFn = std::function<double(Rng&)>;

// Stratified MC: stratum s draws `per_stratum[s]` samples in chunks, each
// chunk from its own counter-derived stream, so the result does not depend on
// the number of threads.
QuadratureResult run_strata(const std::vector<std::uint64_t>& per_stratum, std::uint64_t chunk,
                            std::uint64_t seed, int threads, std::uint64_t samples_per_unit,
                            const std::function<SampleFn(std::size_t)>& make) {
  struct Task {
    std::size_t stratum;
    std::uint64_t chunk_index;
    std::uint64_t count;
  };
  std::vector<Task> tasks;
  for (std::size_t s = 0; s < per_stratum.size(); ++s)
    for (std::uint64_t c = 0, done = 0; done < per_stratum[s]; ++c) {
      std::uint64_t cnt = std::min(chunk, per_stratum[s] - done);
      tasks.push_back({s, c, cnt});
      done += cnt;
    }
  std::vector<Moments> out(tasks.size());
  parallel_for(tasks.size(), threads, [&](std::size_t i) {
    const auto& t = tasks[i];
    Rng rng(derive_seed(seed, t.stratum, t.chunk_index));
    SampleFn fn = make(t.stratum);
    Moments m;
    for (std::uint64_t j = 0; j < t.count; ++j) m.add(fn(rng));
    out[i] = m;
  });

  std::vector<Moments> strata(per_stratum.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    auto& s = strata[tasks[i].stratum];
    s.sum += out[i].sum;
    s.sumsq += out[i].sumsq;
    s.n += out[i].n;
  }
  QuadratureResult res;
  res.method = QuadMethod::MonteCarlo;
  res.seed = seed;
  double var = 0;
  for (const auto& s : strata) {
    if (s.n == 0) continue;
    double mean = s.sum / s.n;
    res.value += mean;
    if (s.n > 1) var += std::max(0.0, s.sumsq / s.n - mean * mean) / (s.n - 1);
    res.samples += s.n * samples_per_unit;
  }
  res.error = std::sqrt(var);
  if (!std::isfinite(res.value)) fail(ErrorCode::Domain, "Monte Carlo estimate is not finite");
  return res;
}

void require_budget(const QuadOptions& opts) {
  if (opts.budget == 0) fail(ErrorCode::Budget, "sample budget must be positive");
}

std::vector<std::uint64_t> split_budget(std::uint64_t budget, std::size_t strata) {
  if (strata == 0) fail(ErrorCode::Degenerate, "integration region is empty");
  std::uint64_t each = std::max<std::uint64_t>(2, budget / strata);
  return std::vector<std::uint64_t>(strata, each);
}

double sum_sq(std::span<const double> a, std::span<const double> c, int dim) {
  double s = 0;
  for (int i = 0; i < dim; ++i) s += (a[i] - c[i]) * (a[i] - c[i]);
  return s;
}

double local_radius(const TrialFunction& fn, const QuadOptions& opts) {
  return std::max(opts.local_radius_factor * fn.char_length(), 1e-12);
}

// Per-stratum sampler for an outer variable: uniform over one piece, plus the
// origin component when the outer weight is singular there.
Mixture outer_mixture(int dim, const Piece& piece, double origin_exponent, const QuadOptions& opts, bool reflect) {
  Region reg{dim, {piece}};
  auto origin = origin_for(dim, origin_exponent, reg);
  return Mixture(dim, std::move(reg), std::nullopt, origin, opts, reflect && origin.has_value());
}

void check_dims(const KernelSpec& spec, const TrialFunction* f, const TrialFunction* g) {
  if (f && f->dim() != spec.geom.dim_x())
    fail(ErrorCode::Domain, "f must live on R^" + std::to_string(spec.geom.dim_x()));
  if (g && g->dim() != spec.geom.dim_y())
    fail(ErrorCode::Domain, "g must live on R^" + std::to_string(spec.geom.dim_y()));
  if (!(spec.exclusion_radius >= 0)) fail(ErrorCode::Domain, "exclusion radius must be >= 0");
}

// ---------------------------------------------------------------------------
// Deterministic radial path

using TanhSinh = boost::math::quadrature::tanh_sinh<double>;

// One instance per nesting level; the integrator is not reentrant.
TanhSinh& integrator(int level = 0) {
  thread_local TanhSinh ts[3] = {TanhSinh(15), TanhSinh(15), TanhSinh(15)};
  return ts[level];
}

double angular_numeric(int n, double lambda, double s, double t) {
  const double z = std::sqrt(kPi) * std::tgamma(0.5 * (n - 1)) / std::tgamma(0.5 * n);
  const double d2 = (s - t) * (s - t);
  auto integrand = [&](double th) {
    double sh = std::sin(0.5 * th);
    double base = d2 + 4 * s * t * sh * sh;
    if (base == 0) return 0.0;
    double w = n == 2 ? 1.0 : std::pow(std::sin(th), n - 2);
    return std::pow(base, -0.5 * lambda) * w;
  };
  double err = 0;
  // Split at a small angle so the near-diagonal peak is resolved.
  double split = std::min(kPi / 2, std::max(1e-6, 4 * std::abs(s - t) / std::sqrt(s * t)));
  double v = integrator(2).integrate(integrand, 0.0, split, 1e-11, &err) +
             integrator(2).integrate(integrand, split, kPi, 1e-11, &err);
  return v / z;
}

double integrate_interval(const std::function<double(double)>& fn, double a, double b, double tol, double* err,
                          int level = 0) {
  if (!(b > a)) return 0.0;
  // The integrator cannot resolve slivers near rounding level; a midpoint value is negligible there.
  if (std::isfinite(b) && b - a <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)})) return (b - a) * fn(0.5 * (a + b));
  double e = 0;
  double v = integrator(level).integrate(fn, a, b, tol, &e);
  if (err) *err += e;
  return v;
}

// Radii below this are dropped: products like s * t underflow there, and the
// integrable radial weights make the piece negligible.
constexpr double kTiny = 1e-100;

QuadratureResult radial_bilinear(const TrialFunction& f, const TrialFunction& g, const KernelSpec& spec) {
  const int n = spec.geom.n();
  const auto fi = f.support().radial_intervals();
  const auto gi = g.support().radial_intervals();
  const double lam = spec.lambda;
  double inner_err = 0;

  auto inner_at = [&](double s) {
    auto inner = [&](double t) {
      if (t == s || t < kTiny) return 0.0;
      double gt = g.profile(t);
      if (gt == 0) return 0.0;
      return gt * std::pow(t, n - 1 - spec.beta) * angular_average(n, lam, s, t);
    };
    double sum = 0;
    for (auto [c, d] : gi) {
      if (s > c && s < d)
        sum += integrate_interval(inner, c, s, 1e-9, &inner_err, 1) +
               integrate_interval(inner, s, d, 1e-9, &inner_err, 1);
      else
        sum += integrate_interval(inner, c, d, 1e-9, &inner_err, 1);
    }
    return sum;
  };
  auto outer = [&](double s) {
    if (s < kTiny) return 0.0;
    double fs = f.profile(s);
    if (fs == 0) return 0.0;
    return fs * std::pow(s, n - 1 - spec.alpha) * inner_at(s);
  };

  double value = 0, err = 0;
  // Break the outer range at the g-interval ends, where the inner integral has kinks.
  for (auto [a, b] : fi) {
    std::vector<double> cuts{a};
    for (auto [c, d] : gi)
      for (double x : {c, d})
        if (x > a && x < b) cuts.push_back(x);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      if (cuts[i + 1] > cuts[i]) value += integrate_interval(outer, cuts[i], cuts[i + 1], 1e-8, &err);
  }
  const double area = area0(n);
  QuadratureResult res;
  res.method = QuadMethod::RadialDeterministic;
  res.value = area * area * value;
  res.error = area * area * err + 1e-8 * std::abs(res.value);
  res.samples = 0;
  if (!std::isfinite(res.value)) fail(ErrorCode::Domain, "radial integral is not finite");
  return res;
}

bool radial_applicable(const TrialFunction& f, const TrialFunction& g, const KernelSpec& spec) {
  if (spec.geom.kind() != GeometryKind::FullSpace || spec.exclusion_radius != 0 || !f.radial() || !g.radial())
    return false;
  const auto fi = f.support().radial_intervals();
  const auto gi = g.support().radial_intervals();
  if (fi.empty() || gi.empty()) return false;
  if (spec.lambda < spec.geom.n()) return true;
  // Otherwise only when the radial supports are separated, so the diagonal is never reached.
  for (auto [a, b] : fi)
    for (auto [c, d] : gi)
      if (a <= d && c <= b) return false;
  return true;
}

QuadratureResult radial_norm_integral(const TrialFunction& f, double e) {
  const int n = f.dim();
  double value = 0, err = 0;
  auto body = [&](double s) {
    double v = f.profile(s);
    return v == 0 ? 0.0 : std::pow(v, e) * std::pow(s, n - 1);
  };
  for (auto [a, b] : f.support().radial_intervals()) {
    if (std::isfinite(b)) {
      value += integrate_interval(body, a, b, 1e-12, &err);
      continue;
    }
    if (!f.has_log_profile()) {
      value += integrate_interval(body, a, kInf, 1e-12, &err);
      continue;
    }
    // Substitute s = exp(1/v) so the slowly decaying tail becomes a finite interval.
    double t0 = std::max(a, std::exp(1.0));
    if (t0 > a) value += integrate_interval(body, a, t0, 1e-12, &err);
    auto tail = [&](double v) {
      if (v <= 0) return 0.0;
      double u = 1.0 / v;
      if (!std::isfinite(u)) return 0.0;
      auto [slope, rest] = f.log_profile(u);
      double coef = e * slope + n;
      if (std::abs(coef) < 1e-12) coef = 0;
      double lg = coef * u + e * rest;
      return std::exp(lg - 2 * std::log(v));
    };
    value += integrate_interval(tail, 0.0, 1.0 / std::log(t0), 1e-12, &err);
  }
  QuadratureResult res;
  res.method = QuadMethod::RadialDeterministic;
  res.value = area0(n) * value;
  res.error = area0(n) * err;
  return res;
}

QuadratureResult to_norm(QuadratureResult integral, double e) {
  double v = integral.value;
  integral.value = std::pow(v, 1.0 / e);
  integral.error = v > 0 ? integral.value / (e * v) * integral.error : std::pow(integral.error, 1.0 / e);
  return integral;
}

}  // namespace

double angular_average(int n, double lambda, double s, double t) {
  if (n < 1) fail(ErrorCode::Domain, "angular_average needs n >= 1");
  if (!(s > 0) || !(t > 0)) fail(ErrorCode::Domain, "angular_average needs s, t > 0");
  if (lambda == 0) return 1.0;
  if (s == t && lambda > 0 && lambda >= n - 1)
    fail(ErrorCode::Domain, "angular average diverges for s == t and lambda >= n - 1");
  if (n == 1) return 0.5 * (kernel_power(std::abs(s - t), lambda) + kernel_power(s + t, lambda));
  if (n == 3) {
    // Integrate rho^{1 - lambda} over |s - t| <= rho <= s + t.
    double lo = std::abs(s - t), hi = s + t;
    if (lambda == 2) return std::log(hi / lo) / (2 * s * t);
    return (std::pow(hi, 2 - lambda) - std::pow(lo, 2 - lambda)) / (2 * s * t * (2 - lambda));
  }
  return angular_numeric(n, lambda, s, t);
}

QuadratureResult evaluate_bilinear(const TrialFunction& f, const TrialFunction& g, const KernelSpec& spec,
                                   const QuadOptions& opts) {
  require_budget(opts);
  check_dims(spec, &f, &g);
  const bool radial_ok = radial_applicable(f, g, spec);
  if (opts.method == MethodChoice::Radial && !radial_ok)
    fail(ErrorCode::Unsupported,
         "radial path needs radial f, g on the full space, no exclusion, and lambda < n or separated supports");
  if (radial_ok && opts.method != MethodChoice::MonteCarlo) {
    auto res = radial_bilinear(f, g, spec);
    res.seed = opts.seed;
    return res;
  }

  const Geometry& geom = spec.geom;
  const int dx = geom.dim_x(), n = geom.n();
  const Region f_region = f.support().region(opts.truncation_radius);
  const Region g_region = g.support().region(opts.truncation_radius);
  const double h = local_radius(f, opts);
  const auto x_origin = origin_for(dx, spec.alpha, f_region);
  const double delta = spec.exclusion_radius;
  const bool half = geom.upper_half();

  auto make = [&](std::size_t stratum) -> SampleFn {
    auto ymix = std::make_shared<Mixture>(outer_mixture(n, g_region.pieces[stratum], spec.beta, opts, half));
    auto xmix = std::make_shared<Mixture>(dx, f_region, LocalComponent(dx, spec.lambda, delta, h), x_origin, opts, false);
    return [=, &f, &g, &spec](Rng& rng) {
      Point y{}, x{};
      std::span<double> ys(y.data(), n), xs(x.data(), dx);
      ymix->sample(rng, ys);
      if (half && !(y[n - 1] > 0)) return 0.0;
      if (!ymix->region().contains(ys)) return 0.0;
      double gy = g(ys);
      if (gy == 0) return 0.0;
      double qy = ymix->pdf(ys);
      double rho = norm(ys.subspan(dx));
      xmix->local()->set(ys, rho);
      xmix->sample(rng, xs);
      double fx = f(xs);
      if (fx == 0) return 0.0;
      double d = std::sqrt(sum_sq(xs, ys, dx) + rho * rho);
      if (d < delta) return 0.0;
      double qx = xmix->pdf(xs);
      return gy * weight_power(norm(ys), spec.beta) * fx * weight_power(norm(xs), spec.alpha) *
             kernel_power(d, spec.lambda) / (qy * qx);
    };
  };
  return run_strata(split_budget(opts.budget, g_region.pieces.size()), kChunk, opts.seed, opts.threads, 1, make);
}

namespace {

// Bias-reduced m^q from inner samples w_1..w_N (jackknife).
double jackknife_power(const std::vector<double>& w, double q) {
  const std::size_t N = w.size();
  double sum = 0;
  for (double v : w) sum += v;
  double m = sum / N;
  if (N < 2) return std::pow(m, q);
  double loo = 0;
  for (double v : w) loo += std::pow(std::max(0.0, (sum - v) / (N - 1)), q);
  return N * std::pow(m, q) - (N - 1.0) / N * loo;
}

struct NestedBudget {
  std::uint64_t inner;
  std::uint64_t outer_total;
};

NestedBudget nested_budget(const QuadOptions& opts) {
  std::uint64_t inner = opts.inner_budget ? opts.inner_budget
                                          : static_cast<std::uint64_t>(std::ceil(std::sqrt(double(opts.budget))));
  inner = std::max<std::uint64_t>(inner, 2);
  return {inner, std::max<std::uint64_t>(2, opts.budget / inner)};
}

}  // namespace

QuadratureResult evaluate_dual_f(const TrialFunction& f, const KernelSpec& spec, double q, const Region& y_window,
                                 const QuadOptions& opts) {
  require_budget(opts);
  check_dims(spec, &f, nullptr);
  if (!(q > 1)) fail(ErrorCode::Domain, "dual form needs q > 1");
  const Geometry& geom = spec.geom;
  const int dx = geom.dim_x(), n = geom.n();
  if (y_window.dim != n) fail(ErrorCode::Domain, "y window must live in R^" + std::to_string(n));
  const Region f_region = f.support().region(opts.truncation_radius);
  const double h = local_radius(f, opts);
  const auto x_origin = origin_for(dx, spec.alpha, f_region);
  const double delta = spec.exclusion_radius;
  const bool half = geom.upper_half();
  const auto nb = nested_budget(opts);

  auto make = [&](std::size_t stratum) -> SampleFn {
    auto ymix = std::make_shared<Mixture>(outer_mixture(n, y_window.pieces[stratum], spec.beta * q, opts, half));
    auto xmix = std::make_shared<Mixture>(dx, f_region, LocalComponent(dx, spec.lambda, delta, h), x_origin, opts, false);
    auto w = std::make_shared<std::vector<double>>(nb.inner);
    return [=, &f, &spec](Rng& rng) {
      Point y{}, x{};
      std::span<double> ys(y.data(), n), xs(x.data(), dx);
      ymix->sample(rng, ys);
      if (half && !(y[n - 1] > 0)) return 0.0;
      if (!ymix->region().contains(ys)) return 0.0;
      double qy = ymix->pdf(ys);
      double rho = norm(ys.subspan(dx));
      xmix->local()->set(ys, rho);
      for (auto& wi : *w) {
        xmix->sample(rng, xs);
        wi = 0;
        double fx = f(xs);
        if (fx == 0) continue;
        double d = std::sqrt(sum_sq(xs, ys, dx) + rho * rho);
        if (d < delta) continue;
        wi = fx * weight_power(norm(xs), spec.alpha) * kernel_power(d, spec.lambda) / xmix->pdf(xs);
      }
      return jackknife_power(*w, q) * weight_power(norm(ys), spec.beta * q) / qy;
    };
  };
  auto per = split_budget(nb.outer_total, y_window.pieces.size());
  auto res = run_strata(per, std::max<std::uint64_t>(1, kChunk / nb.inner), opts.seed, opts.threads, nb.inner, make);
  res.value = std::max(res.value, 0.0);
  return res;
}

QuadratureResult evaluate_dual_g(const TrialFunction& g, const KernelSpec& spec, double q, const Region& x_window,
                                 const QuadOptions& opts) {
  require_budget(opts);
  check_dims(spec, nullptr, &g);
  if (!(q > 1)) fail(ErrorCode::Domain, "dual form needs q > 1");
  const Geometry& geom = spec.geom;
  const int dx = geom.dim_x(), n = geom.n();
  if (x_window.dim != dx) fail(ErrorCode::Domain, "x window must live in R^" + std::to_string(dx));
  const Region g_region = g.support().region(opts.truncation_radius);
  const double h = local_radius(g, opts);
  const auto y_origin = origin_for(n, spec.beta, g_region);
  const double delta = spec.exclusion_radius;
  const bool half = geom.upper_half();
  const auto nb = nested_budget(opts);

  auto make = [&](std::size_t stratum) -> SampleFn {
    auto xmix = std::make_shared<Mixture>(outer_mixture(dx, x_window.pieces[stratum], spec.alpha * q, opts, false));
    auto ymix =
        std::make_shared<Mixture>(n, g_region, LocalComponent(n, spec.lambda, delta, h), y_origin, opts, half);
    auto w = std::make_shared<std::vector<double>>(nb.inner);
    return [=, &g, &spec](Rng& rng) {
      Point x{}, y{}, c{};
      std::span<double> xs(x.data(), dx), ys(y.data(), n);
      xmix->sample(rng, xs);
      if (!xmix->region().contains(xs)) return 0.0;
      double qx = xmix->pdf(xs);
      std::copy(x.begin(), x.begin() + dx, c.begin());
      std::span<const double> cs(c.data(), n);
      ymix->local()->set(cs, 0.0);
      for (auto& wi : *w) {
        ymix->sample(rng, ys);
        wi = 0;
        if (half && !(y[n - 1] > 0)) continue;
        double gy = g(ys);
        if (gy == 0) continue;
        double d = std::sqrt(sum_sq(ys, cs, n));
        if (d < delta) continue;
        wi = gy * weight_power(norm(ys), spec.beta) * kernel_power(d, spec.lambda) / ymix->pdf(ys);
      }
      return jackknife_power(*w, q) * weight_power(norm(xs), spec.alpha * q) / qx;
    };
  };
  auto per = split_budget(nb.outer_total, x_window.pieces.size());
  auto res = run_strata(per, std::max<std::uint64_t>(1, kChunk / nb.inner), opts.seed, opts.threads, nb.inner, make);
  res.value = std::max(res.value, 0.0);
  return res;
}

QuadratureResult lp_norm_numeric(const TrialFunction& f, double e, const QuadOptions& opts) {
  require_budget(opts);
  if (!(e >= 1)) fail(ErrorCode::Domain, "norm exponent must be >= 1");
  const bool radial_ok = f.radial() && !f.support().radial_intervals().empty();
  if (opts.method == MethodChoice::Radial && !radial_ok) fail(ErrorCode::Unsupported, "function is not radial");
  if (radial_ok && opts.method != MethodChoice::MonteCarlo) {
    QuadratureResult integral;
    try {
      integral = radial_norm_integral(f, e);
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      integral = {kInf, kInf, QuadMethod::RadialDeterministic, 0, opts.seed};
    }
    integral.seed = opts.seed;
    return to_norm(integral, e);
  }

  const int d = f.dim();
  const Region reg = f.support().region(opts.truncation_radius);
  auto make = [&](std::size_t stratum) -> SampleFn {
    const Piece& piece = reg.pieces[stratum];
    return [&f, &piece, e, d](Rng& rng) {
      Point x{};
      std::span<double> xs(x.data(), d);
      piece.sample(rng, xs);
      double v = f(xs);
      return v == 0 ? 0.0 : std::pow(v, e) * piece.volume();
    };
  };
  auto integral = run_strata(split_budget(opts.budget, reg.pieces.size()), kChunk, opts.seed, opts.threads, 1, make);
  if (!f.support().bounded()) {
    auto tail = f.tail_bound(e, opts.truncation_radius);
    integral.error += tail ? *tail : kInf;
  }
  return to_norm(integral, e);
}

QuotientResult quotient(const TrialFunction& f, const TrialFunction& g, const KernelSpec& spec, double p, double r,
                        const QuadOptions& opts) {
  if (!(p >= 1) || !(r >= 1)) fail(ErrorCode::Domain, "quotient needs p, r >= 1");
  QuotientResult out;
  out.bilinear = evaluate_bilinear(f, g, spec, opts);

  auto norm_of = [&](const TrialFunction& fn, double e, std::uint64_t stream) {
    if (auto a = fn.analytic_norm(e); a && std::isfinite(*a))
      return QuadratureResult{*a, 0.0, QuadMethod::RadialDeterministic, 0, 0};
    QuadOptions o = opts;
    o.seed = derive_seed(opts.seed, stream);
    return lp_norm_numeric(fn, e, o);
  };
  out.norm_f = norm_of(f, p, 1);
  out.norm_g = norm_of(g, r, 2);
  out.analytic_norms = out.norm_f.samples == 0 && out.norm_g.samples == 0 &&
                       out.norm_f.error == 0 && out.norm_g.error == 0;
  if (!(out.norm_f.value > 0) || !(out.norm_g.value > 0))
    fail(ErrorCode::Degenerate, "quotient needs nonzero norms");

  const double denom = out.norm_f.value * out.norm_g.value;
  QuadratureResult& qr = out.quotient;
  qr.value = out.bilinear.value / denom;
  double rel2 = std::pow(out.norm_f.error / out.norm_f.value, 2) + std::pow(out.norm_g.error / out.norm_g.value, 2);
  qr.error = std::sqrt(std::pow(out.bilinear.error / denom, 2) + qr.value * qr.value * rel2);
  qr.samples = out.bilinear.samples + out.norm_f.samples + out.norm_g.samples;
  qr.seed = opts.seed;
  qr.method = out.analytic_norms || out.bilinear.method == out.norm_f.method ? out.bilinear.method : QuadMethod::Hybrid;
  if (!out.analytic_norms &&
      (out.norm_f.method != out.bilinear.method || out.norm_g.method != out.bilinear.method))
    qr.method = QuadMethod::Hybrid;
  return out;
}

}  // namespace sw
