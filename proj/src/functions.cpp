#include "functions.hpp"

#include "error.hpp"
#include "special.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace sw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Exact measure of {R < |x|} inside {inner <= |x| <= outer}.
double annulus_mass_beyond(int dim, double inner, double outer, double R) {
  double lo = std::max(inner, R);
  if (lo >= outer) return 0.0;
  return ball_volume(dim) * (std::pow(outer, dim) - std::pow(lo, dim));
}

}  // namespace

TrialFunction::TrialFunction(std::string label, int dim, Support support, Eval eval, double char_length)
    : impl_(std::make_shared<Impl>(
          Impl{std::move(label), dim, std::move(support), std::move(eval), char_length, {}, {}, {}, {}})) {
  if (dim < 1 || dim > kMaxDim) fail(ErrorCode::Domain, "trial function dimension out of range");
  if (impl_->support.dim() != dim) fail(ErrorCode::Domain, "support dimension does not match function dimension");
}

TrialFunction TrialFunction::with_norm(NormFn fn) const {
  auto copy = std::make_shared<Impl>(*impl_);
  copy->norm = std::move(fn);
  return TrialFunction(std::move(copy));
}

TrialFunction TrialFunction::with_profile(Profile fn) const {
  auto copy = std::make_shared<Impl>(*impl_);
  copy->profile = std::move(fn);
  return TrialFunction(std::move(copy));
}

TrialFunction TrialFunction::with_tail_bound(TailBound fn) const {
  auto copy = std::make_shared<Impl>(*impl_);
  copy->tail = std::move(fn);
  return TrialFunction(std::move(copy));
}

TrialFunction TrialFunction::with_log_profile(LogProfile fn) const {
  auto copy = std::make_shared<Impl>(*impl_);
  copy->log_profile = std::move(fn);
  return TrialFunction(std::move(copy));
}

std::optional<double> TrialFunction::analytic_norm(double e) const {
  if (!impl_->norm) return std::nullopt;
  return impl_->norm(e);
}

std::optional<double> TrialFunction::tail_bound(double e, double R) const {
  if (impl_->support.bounded() && R >= impl_->support.outer_radius()) return 0.0;
  if (!impl_->tail) return std::nullopt;
  return impl_->tail(e, R);
}

TrialFunction indicator_annulus(int dim, double inner, double outer) {
  if (!(inner >= 0) || !(outer > inner)) fail(ErrorCode::Domain, "annulus needs 0 <= inner < outer");
  Support sup(inner == 0 ? SupportKind::Ball : SupportKind::Annulus, dim, {Piece::ball(dim, inner, outer)});
  const double vol = ball_volume(dim) * (std::pow(outer, dim) - std::pow(inner, dim));
  return TrialFunction("annulus:" + std::to_string(dim) + ":" + fmt(inner) + ":" + fmt(outer), dim, std::move(sup),
                       [](std::span<const double>) { return 1.0; }, outer)
      .with_norm([vol](double e) -> std::optional<double> { return std::pow(vol, 1.0 / e); })
      .with_profile([inner, outer](double s) { return s >= inner && s <= outer ? 1.0 : 0.0; })
      .with_tail_bound([dim, inner, outer](double, double R) -> std::optional<double> {
        return annulus_mass_beyond(dim, inner, outer, R);
      });
}

TrialFunction indicator_half_annulus(int dim, double inner, double outer) {
  if (!(inner >= 0) || !(outer > inner)) fail(ErrorCode::Domain, "annulus needs 0 <= inner < outer");
  Support sup(SupportKind::HalfSpaceSlab, dim, {Piece::ball(dim, inner, outer, true)});
  const double vol = 0.5 * ball_volume(dim) * (std::pow(outer, dim) - std::pow(inner, dim));
  return TrialFunction("halfannulus:" + std::to_string(dim) + ":" + fmt(inner) + ":" + fmt(outer), dim,
                       std::move(sup), [](std::span<const double>) { return 1.0; }, outer)
      .with_norm([vol](double e) -> std::optional<double> { return std::pow(vol, 1.0 / e); });
}

TrialFunction indicator_interval(double lo, double hi) {
  if (!(hi > lo)) fail(ErrorCode::Domain, "interval needs lo < hi");
  Support sup(SupportKind::Interval, 1, {Piece({IntervalBlock{lo, hi}})});
  return TrialFunction("interval:" + fmt(lo) + ":" + fmt(hi), 1, std::move(sup),
                       [](std::span<const double>) { return 1.0; }, std::max(std::abs(lo), std::abs(hi)))
      .with_norm([len = hi - lo](double e) -> std::optional<double> { return std::pow(len, 1.0 / e); });
}

TrialFunction bump(int dim, double radius) {
  if (!(radius > 0)) fail(ErrorCode::Domain, "bump needs radius > 0");
  Support sup(SupportKind::Ball, dim, {Piece::ball(dim, 0, radius)});
  auto prof = [radius](double s) {
    if (s > radius) return 0.0;
    double u = 1.0 - (s * s) / (radius * radius);
    return u * u;
  };
  return TrialFunction("bump:" + std::to_string(dim) + ":" + fmt(radius), dim, std::move(sup),
                       [prof](std::span<const double> x) { return prof(norm(x)); }, radius)
      .with_norm([dim, radius](double e) -> std::optional<double> {
        double integral = sphere_area(dim) * std::pow(radius, dim) * 0.5 * std::beta(0.5 * dim, 2.0 * e + 1.0);
        return std::pow(integral, 1.0 / e);
      })
      .with_profile(prof);
}

TrialFunction power_ball(int dim, double a, double radius) {
  if (!(radius > 0)) fail(ErrorCode::Domain, "power ball needs radius > 0");
  Support sup(SupportKind::Ball, dim, {Piece::ball(dim, 0, radius)});
  auto prof = [a, radius](double s) { return s > radius || s == 0 ? 0.0 : std::pow(s, -a); };
  return TrialFunction("power:" + std::to_string(dim) + ":" + fmt(a) + ":" + fmt(radius), dim, std::move(sup),
                       [prof](std::span<const double> x) { return prof(norm(x)); }, radius)
      .with_norm([dim, a, radius](double e) -> std::optional<double> {
        double expo = dim - a * e;
        if (expo <= 0) return kInf;
        return std::pow(sphere_area(dim) * std::pow(radius, expo) / expo, 1.0 / e);
      })
      .with_profile(prof);
}

TrialFunction dilate(const TrialFunction& f, double exponent, double scale) {
  if (!(scale > 0)) fail(ErrorCode::Domain, "dilation scale must be > 0");
  if (!(exponent > 0)) fail(ErrorCode::Domain, "dilation exponent must be > 0");
  if (scale == 1.0) return f;
  const int d = f.dim();
  const double amp = std::pow(scale, -d / exponent);
  TrialFunction out("dilate:" + fmt(exponent) + ":" + fmt(scale) + ":" + f.label(), d, f.support().scaled(scale),
                    [f, amp, scale, d](std::span<const double> x) {
                      Point z{};
                      for (int i = 0; i < d; ++i) z[i] = x[i] / scale;
                      return amp * f(std::span<const double>(z.data(), d));
                    },
                    f.char_length() * scale);
  out = out.with_norm([f, d, exponent, scale](double e) -> std::optional<double> {
    auto base = f.analytic_norm(e);
    if (!base) return std::nullopt;
    return *base * std::pow(scale, d / e - d / exponent);
  });
  out = out.with_tail_bound([f, d, exponent, scale](double e, double R) -> std::optional<double> {
    auto base = f.tail_bound(e, R / scale);
    if (!base) return std::nullopt;
    return *base * std::pow(scale, d - d * e / exponent);
  });
  if (f.radial()) out = out.with_profile([f, amp, scale](double s) { return amp * f.profile(s / scale); });
  if (f.has_log_profile())
    out = out.with_log_profile([f, la = std::log(amp), ls = std::log(scale)](double u) {
      auto [slope, rest] = f.log_profile(u - ls);
      return std::pair{slope, rest - slope * ls + la};
    });
  return out;
}

TrialFunction log_tail(int dim, double decay_exponent, double log_exponent) {
  const double e0 = decay_exponent, q = log_exponent;
  if (!(q > 1)) fail(ErrorCode::Domain, "log tail needs q > 1");
  if (!(e0 > q)) fail(ErrorCode::Domain, "log tail norm diverges unless e > q");
  Support sup(SupportKind::Tail, dim, {}, 2.0);
  auto prof = [dim, e0, q](double s) {
    if (s < 2.0) return 0.0;
    return std::pow(s, -dim / e0) * std::pow(std::log(s), -1.0 / q);
  };
  const double area = sphere_area(dim);
  return TrialFunction("logtail:" + std::to_string(dim) + ":" + fmt(e0) + ":" + fmt(q), dim, std::move(sup),
                       [prof](std::span<const double> x) { return prof(norm(x)); }, 2.0)
      .with_norm([area, e0, q](double e) -> std::optional<double> {
        if (e != e0) return std::nullopt;
        double c = e0 / q;
        return std::pow(area * std::pow(std::log(2.0), 1.0 - c) / (c - 1.0), 1.0 / e0);
      })
      .with_profile(prof)
      .with_log_profile([dim, e0, q](double u) { return std::pair{-dim / e0, -std::log(u) / q}; })
      .with_tail_bound([area, dim, e0, q](double e, double R) -> std::optional<double> {
        R = std::max(R, 2.0);
        if (e == e0) {
          double c = e0 / q;
          return area * std::pow(std::log(R), 1.0 - c) / (c - 1.0);
        }
        if (e > e0) {
          double a = dim * (e / e0 - 1.0);
          return area * std::pow(std::log(R), -e / q) * std::pow(R, -a) / a;
        }
        return kInf;
      });
}

double cylinder_slab_integral(int m, double c) {
  const double a = std::ldexp(1.0, m);
  return boost::math::quadrature::gauss<double, 30>::integrate(
      [c](double t) { return std::pow(std::log2(t), -c); }, a, a + 1.0);
}

SeriesBound cylinder_series_bound(double exponent, double eps, int m_max) {
  if (!(eps > 0)) fail(ErrorCode::Domain, "cylinder family needs eps > 0");
  const double s = 1.0 + exponent * eps;
  double sum = 0;
  for (int m = m_max; m >= 1; --m) sum += std::pow(static_cast<double>(m), -s);
  return {sum, std::pow(static_cast<double>(m_max), 1.0 - s) / (s - 1.0)};
}

TrialFunction cylinder_family(const Geometry& geom, CylinderSide side, double exponent, double eps, int m_max) {
  if (!(eps > 0)) fail(ErrorCode::Domain, "cylinder family needs eps > 0 (the norm diverges otherwise)");
  if (!(exponent > 1)) fail(ErrorCode::Domain, "cylinder family needs exponent > 1");
  if (m_max < 1 || m_max > 60) fail(ErrorCode::Domain, "cylinder family needs 1 <= M <= 60");
  const double a = 1.0 / exponent + eps;
  const int n = geom.n(), k = geom.k();

  // Layout: ball(d_perp) x [2^m, 2^m + 1] x extra block.
  int d_perp = 0;
  std::optional<Block> extra;
  SupportKind kind = SupportKind::CylinderStack;
  int dim = 0;
  std::function<double(double)> extra_norm_factor = [](double) { return 1.0; };
  if (side == CylinderSide::F || geom.kind() == GeometryKind::FullSpace) {
    dim = side == CylinderSide::F ? geom.dim_x() : n;
    d_perp = dim - 1;
  } else if (geom.kind() == GeometryKind::HalfSpace) {
    dim = n;
    d_perp = n - 2;
    extra = IntervalBlock{1.0, 2.0};
    kind = SupportKind::HalfSpaceSlab;
    extra_norm_factor = [](double e) { return (std::pow(2.0, e + 1.0) - 1.0) / (e + 1.0); };
  } else {
    dim = n;
    d_perp = n - k - 1;
    extra = BallBlock{k, 1.0, 2.0, false};
    kind = SupportKind::ShellSlice;
    extra_norm_factor = [k](double e) { return sphere_area(k) * (std::pow(2.0, e + k) - 1.0) / (e + k); };
  }

  std::vector<Piece> pieces;
  for (int m = 1; m <= m_max; ++m) {
    const double lo = std::ldexp(1.0, m);
    std::vector<Block> blocks{BallBlock{d_perp, 0.0, 1.0, false}, IntervalBlock{lo, lo + 1.0}};
    if (extra) blocks.push_back(*extra);
    pieces.emplace_back(std::move(blocks));
  }

  const bool has_extra = extra.has_value();
  Support sup(kind, dim, std::move(pieces));
  auto eval = [d_perp, a, has_extra](std::span<const double> x) {
    double v = std::pow(std::log2(x[d_perp]), -a);
    if (has_extra) v *= norm(x.subspan(d_perp + 1));
    return v;
  };

  std::ostringstream label;
  label << "cylinder:" << to_string(geom.kind()) << ":n=" << n;
  if (geom.kind() == GeometryKind::CodimK) label << ":k=" << k;
  label << ':' << (side == CylinderSide::F ? 'p' : 'r') << '=' << fmt(exponent) << ":eps=" << fmt(eps)
        << ":M=" << m_max;

  const double perp = ball_volume0(d_perp);
  return TrialFunction(label.str(), dim, std::move(sup), eval, 1.0)
      .with_norm([perp, a, m_max, extra_norm_factor](double e) -> std::optional<double> {
        double sum = 0;
        for (int m = m_max; m >= 1; --m) sum += cylinder_slab_integral(m, e * a);
        return std::pow(perp * extra_norm_factor(e) * sum, 1.0 / e);
      });
}

// ---------------------------------------------------------------------------
// Catalog ids

namespace {

std::vector<std::string> split(std::string_view s, char sep, std::size_t max_parts = std::string::npos) {
  std::vector<std::string> out;
  while (out.size() + 1 < max_parts) {
    auto pos = s.find(sep);
    if (pos == std::string_view::npos) break;
    out.emplace_back(s.substr(0, pos));
    s.remove_prefix(pos + 1);
  }
  out.emplace_back(s);
  return out;
}

double num(const std::string& s) { return Number::parse(s).value(); }

int integer(const std::string& s) {
  auto v = Number::parse(s);
  if (!v.exact() || denominator(v.rational()) != 1) fail(ErrorCode::Parse, "expected an integer, got '" + s + "'");
  return numerator(v.rational()).convert_to<int>();
}

[[noreturn]] void bad_id(std::string_view id, const std::string& why) {
  fail(ErrorCode::Parse, "unknown function id '" + std::string(id) + "': " + why);
}

std::string keyed(const std::string& field, std::string_view key, std::string_view id) {
  auto eq = field.find('=');
  if (eq == std::string::npos || field.substr(0, eq) != key) bad_id(id, "expected '" + std::string(key) + "=...'");
  return field.substr(eq + 1);
}

}  // namespace

TrialFunction function_from_id(std::string_view id) {
  auto head = split(id, ':', 2);
  const auto& kind = head[0];
  if (kind == "dilate") {
    auto parts = split(id, ':', 4);
    if (parts.size() != 4) bad_id(id, "expected dilate:<e>:<scale>:<id>");
    return dilate(function_from_id(parts[3]), num(parts[1]), num(parts[2]));
  }
  auto parts = split(id, ':');
  auto want = [&](std::size_t n, const char* shape) {
    if (parts.size() != n) bad_id(id, std::string("expected ") + shape);
  };
  if (kind == "annulus") {
    want(4, "annulus:<dim>:<inner>:<outer>");
    return indicator_annulus(integer(parts[1]), num(parts[2]), num(parts[3]));
  }
  if (kind == "halfannulus") {
    want(4, "halfannulus:<dim>:<inner>:<outer>");
    return indicator_half_annulus(integer(parts[1]), num(parts[2]), num(parts[3]));
  }
  if (kind == "interval") {
    want(3, "interval:<lo>:<hi>");
    return indicator_interval(num(parts[1]), num(parts[2]));
  }
  if (kind == "bump") {
    want(3, "bump:<dim>:<radius>");
    return bump(integer(parts[1]), num(parts[2]));
  }
  if (kind == "power") {
    want(4, "power:<dim>:<a>:<radius>");
    return power_ball(integer(parts[1]), num(parts[2]), num(parts[3]));
  }
  if (kind == "logtail") {
    want(4, "logtail:<dim>:<e>:<q>");
    return log_tail(integer(parts[1]), num(parts[2]), num(parts[3]));
  }
  if (kind == "cylinder") {
    if (parts.size() < 6) bad_id(id, "expected cylinder:<geometry>:n=<n>[:k=<k>]:<p|r>=<e>:eps=<eps>:M=<M>");
    std::size_t i = 2;
    int n = integer(keyed(parts[i++], "n", id));
    int k = 0;
    if (parts[1] == "codim") k = integer(keyed(parts[i++], "k", id));
    if (parts.size() != i + 3) bad_id(id, "wrong number of fields");
    auto& ef = parts[i++];
    CylinderSide side;
    if (ef.rfind("p=", 0) == 0)
      side = CylinderSide::F;
    else if (ef.rfind("r=", 0) == 0)
      side = CylinderSide::G;
    else
      bad_id(id, "expected p=<e> (f side) or r=<e> (g side)");
    double e = num(ef.substr(2));
    double eps = num(keyed(parts[i++], "eps", id));
    int M = integer(keyed(parts[i++], "M", id));
    return cylinder_family(Geometry::from_name(parts[1], n, parts[1] == "half" ? 1 : k), side, e, eps, M);
  }
  bad_id(id, "unrecognized family '" + kind + "'");
}

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"annulus:<dim>:<inner>:<outer>", "annulus:3:1:6", "indicator of inner <= |x| <= outer in R^dim"},
      {"halfannulus:<dim>:<inner>:<outer>", "halfannulus:2:2:3", "annulus intersected with {x_dim > 0}"},
      {"interval:<lo>:<hi>", "interval:2:3", "indicator of [lo, hi] on R"},
      {"bump:<dim>:<radius>", "bump:2:1", "(1 - |x|^2/R^2)^2 on B_R"},
      {"power:<dim>:<a>:<radius>", "power:3:1/2:1", "|x|^-a on B_R"},
      {"logtail:<dim>:<e>:<q>", "logtail:1:4:2", "|x|^(-dim/e) (log|x|)^(-1/q) on |x| >= 2"},
      {"cylinder:<full|half|codim>:n=<n>[:k=<k>]:<p|r>=<e>:eps=<eps>:M=<M>", "cylinder:full:n=2:p=2:eps=0.1:M=20",
       "width-one slabs at heights 2^m, m=1..M; p= builds the f side, r= the g side"},
      {"dilate:<e>:<scale>:<id>", "dilate:2:0.5:annulus:2:0:1", "scale^(-dim/e) f(x/scale), L^e-norm preserving"},
  };
  return entries;
}

}  // namespace sw
