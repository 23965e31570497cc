#include <doctest.h>

#include "error.hpp"
#include "functions.hpp"
#include "oracles.hpp"
#include "quadrature.hpp"
#include "special.hpp"

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <random>

using namespace sw;

namespace {

constexpr double pi = boost::math::constants::pi<double>();

QuadOptions mc(std::uint64_t budget, std::uint64_t seed = 1) {
  QuadOptions o;
  o.budget = budget;
  o.seed = seed;
  o.method = MethodChoice::MonteCarlo;
  return o;
}

KernelSpec kern(Geometry g, double lambda, double alpha = 0, double beta = 0, double delta = 0) {
  return KernelSpec{g, alpha, beta, lambda, delta};
}

bool within(const QuadratureResult& r, double ref, double sigmas = 3) {
  return std::abs(r.value - ref) <= sigmas * r.error;
}

// Mean of |x - y|^{-lambda} over the sphere, as a plain theta integral.
double angular_oracle(int n, double lambda, double s, double t) {
  auto w = [&](double th) { return std::pow(std::sin(th), n - 2); };
  auto k = [&](double th) { return std::pow(s * s + t * t - 2 * s * t * std::cos(th), -lambda / 2); };
  double num = oracle::simpson([&](double th) { return k(th) * w(th); }, 0, pi, 20000);
  double den = oracle::simpson(w, 0, pi, 20000);
  return num / den;
}

// I(chi_B1, chi_B1) in R^2 with lambda = 1, through the overlap area of two
// unit disks at distance d: I = 2 pi int_0^2 A(d) dd.
double disk_oracle() {
  auto area = [](double d) { return 2 * std::acos(d / 2) - d / 2 * std::sqrt(std::max(0.0, 4 - d * d)); };
  return 2 * pi * oracle::simpson(area, 0, 2, 1000000);
}

}  // namespace

TEST_SUITE("quadrature") {
  TEST_CASE("angular average") {
    CHECK(angular_average(3, 0, 1, 2) == 1.0);
    CHECK(angular_average(5, 0, 2, 2) == 1.0);
    CHECK(angular_average(1, 1, 1, 3) == doctest::Approx(3.0 / 8).epsilon(1e-14));
    CHECK(angular_average(3, 1, 1, 2) == doctest::Approx(0.5).epsilon(1e-12));
    // Newton: from inside the shell the potential is constant.
    CHECK(angular_average(3, 1, 2, 1) == doctest::Approx(0.5).epsilon(1e-12));
    for (int n : {2, 4, 5, 7})
      for (double lam : {0.5, 1.0, 2.5})
        for (auto [s, t] : {std::pair{1.0, 2.0}, std::pair{3.0, 0.5}, std::pair{1.0, 1.2}}) {
          INFO("n=" << n << " lambda=" << lam << " s=" << s << " t=" << t);
          CHECK(std::abs(angular_average(n, lam, s, t) - angular_oracle(n, lam, s, t)) <= 1e-9);
        }
    CHECK_THROWS_AS(angular_average(3, 2, 1, 1), Error);
    CHECK_THROWS_AS(angular_average(2, 1, 1, 1), Error);
    CHECK(std::isfinite(angular_average(4, 1, 1, 1)));
  }

  TEST_CASE("Newton shell theorem by Monte Carlo over the sphere") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    const int N = 400000;
    double sum = 0, sum2 = 0;
    for (int i = 0; i < N; ++i) {
      double a = nd(rng), b = nd(rng), c = nd(rng);
      double s = std::sqrt(a * a + b * b + c * c);
      double d = std::sqrt(a * a / (s * s) + b * b / (s * s) + (c / s - 2) * (c / s - 2));
      sum += 1 / d;
      sum2 += 1 / (d * d);
    }
    double m = sum / N, se = std::sqrt((sum2 / N - m * m) / N);
    CHECK(std::abs(m - angular_average(3, 1, 1, 2)) <= 3 * se);
  }

  TEST_CASE("one-dimensional closed form") {
    const double exact = 16 * std::sqrt(2.0) / 3;
    auto f = indicator_annulus(1, 0, 1);
    auto spec = kern(Geometry::full(1), 0.5);
    auto det = evaluate_bilinear(f, f, spec, QuadOptions{});
    CHECK(det.method == QuadMethod::RadialDeterministic);
    CHECK(std::abs(det.value - exact) / exact <= 1e-6);
    auto r = evaluate_bilinear(f, f, spec, mc(300000));
    CHECK(r.method == QuadMethod::MonteCarlo);
    CHECK(r.samples == 300000);
    CHECK(r.error > 0);
    CHECK(within(r, exact));
    // Same function as an interval.
    auto g = indicator_interval(-1, 1);
    CHECK(within(evaluate_bilinear(g, g, spec, mc(200000, 3)), exact));
  }

  TEST_CASE("separable kernel") {
    auto f = indicator_annulus(2, 0, 1);
    auto spec = kern(Geometry::full(2), 0);
    CHECK(evaluate_bilinear(f, f, spec, QuadOptions{}).value == doctest::Approx(pi * pi).epsilon(1e-9));
    auto r = evaluate_bilinear(f, f, spec, mc(100000));
    CHECK(within(r, pi * pi));
    auto h = indicator_half_annulus(2, 1, 2);
    auto i = indicator_interval(-1, 1);
    auto rh = evaluate_bilinear(i, h, kern(Geometry::half(2), 0), mc(100000));
    CHECK(within(rh, 2 * 1.5 * pi));
  }

  TEST_CASE("disk with lambda 1 against the overlap-area oracle") {
    const double ref = disk_oracle();
    CHECK(ref == doctest::Approx(16 * pi / 3).epsilon(1e-8));
    auto f = indicator_annulus(2, 0, 1);
    auto spec = kern(Geometry::full(2), 1);
    CHECK(evaluate_bilinear(f, f, spec, QuadOptions{}).value == doctest::Approx(ref).epsilon(1e-6));
    CHECK(within(evaluate_bilinear(f, f, spec, mc(400000, 9)), ref));
  }

  TEST_CASE("radial and Monte Carlo paths agree") {
    struct Case {
      int n;
      TrialFunction f, g;
      double lambda, alpha, beta;
    };
    std::vector<Case> cases = {
        {2, indicator_annulus(2, 1, 2), indicator_annulus(2, 0, 1.5), 1.2, 0.3, 0.2},
        {3, indicator_annulus(3, 0, 1), indicator_annulus(3, 0.5, 2), 2.0, 0.5, -0.5},
        {3, bump(3, 1), indicator_annulus(3, 0, 1), 1.0, 0, 0},
        {1, indicator_annulus(1, 1, 2), indicator_annulus(1, 3, 4), 1.5, 0.2, 0.1},
        {4, indicator_annulus(4, 0, 1), indicator_annulus(4, 0, 1), 2.5, 0, 0},
    };
    std::uint64_t seed = 100;
    for (const auto& c : cases) {
      auto spec = kern(Geometry::full(c.n), c.lambda, c.alpha, c.beta);
      auto det = evaluate_bilinear(c.f, c.g, spec, QuadOptions{});
      auto r = evaluate_bilinear(c.f, c.g, spec, mc(400000, ++seed));
      INFO(c.f.label() << " " << c.g.label() << " det=" << det.value << " mc=" << r.value << " +- " << r.error);
      CHECK(det.method == QuadMethod::RadialDeterministic);
      CHECK(within(r, det.value));
    }
  }

  TEST_CASE("determinism") {
    auto f = indicator_annulus(2, 0, 1);
    auto g = indicator_half_annulus(3, 1, 2);
    auto spec = kern(Geometry::half(3), 1.5, 0.2, 0.3);
    QuadOptions a = mc(50000, 42), b = a;
    a.threads = 1;
    b.threads = 4;
    auto r1 = evaluate_bilinear(f, g, spec, a), r2 = evaluate_bilinear(f, g, spec, b),
         r3 = evaluate_bilinear(f, g, spec, a);
    CHECK(r1.value == r2.value);
    CHECK(r1.error == r2.error);
    CHECK(r1.value == r3.value);
    CHECK(r1.seed == 42);
    auto other = evaluate_bilinear(f, g, spec, mc(50000, 43));
    CHECK(other.value != r1.value);

    Region win{3, {Piece::ball(3, 0, 1, true)}};
    auto d1 = evaluate_dual_f(f, spec, 2, win, a), d2 = evaluate_dual_f(f, spec, 2, win, b);
    CHECK(d1.value == d2.value);
    CHECK(d1.error == d2.error);
  }

  TEST_CASE("budget and argument errors") {
    auto f = indicator_annulus(2, 0, 1);
    auto spec = kern(Geometry::full(2), 1);
    CHECK_THROWS_AS(evaluate_bilinear(f, f, spec, mc(0)), Error);
    CHECK_THROWS_AS(evaluate_bilinear(indicator_annulus(3, 0, 1), f, spec, mc(100)), Error);
    QuadOptions rad;
    rad.method = MethodChoice::Radial;
    CHECK_THROWS_AS(evaluate_bilinear(f, f, kern(Geometry::full(2), 1, 0, 0, 0.1), rad), Error);
  }

  TEST_CASE("exclusion radius converges at the predicted rate") {
    // n = 1, lambda = 1/2: the removed part near the diagonal is 8 delta^{1/2} + O(delta^{3/2}).
    auto f = indicator_annulus(1, 0, 1);
    std::vector<double> v;
    for (double d : {1e-2, 1e-3, 1e-4})
      v.push_back(evaluate_bilinear(f, f, kern(Geometry::full(1), 0.5, 0, 0, d), mc(1000000, 5)).value);
    double ratio = (v[2] - v[1]) / (v[1] - v[0]);
    CHECK(ratio == doctest::Approx(std::pow(10.0, -0.5)).epsilon(0.2));
  }

  TEST_CASE("monotone in f") {
    auto small = indicator_annulus(2, 0, 1), big = indicator_annulus(2, 0, 1.5);
    auto g = indicator_annulus(2, 0.5, 2);
    auto spec = kern(Geometry::full(2), 1.5, 0.3, 0);
    for (std::uint64_t s = 1; s <= 5; ++s) {
      auto a = evaluate_bilinear(small, g, spec, mc(100000, s)), b = evaluate_bilinear(big, g, spec, mc(100000, s));
      CHECK(b.value >= a.value - 3 * std::hypot(a.error, b.error));
    }
  }

  TEST_CASE("dual form on the line against a grid oracle") {
    // T(y) = int_2^3 (x - y)^{-1/2} dx = 2 (sqrt(3 - y) - sqrt(2 - y)) for y in [0, 1].
    auto T = [](double y) { return 2 * (std::sqrt(3 - y) - std::sqrt(2 - y)); };
    double ref = oracle::simpson([&](double y) { return T(y) * T(y); }, 0, 1, 2000);
    Region win{1, {Piece({IntervalBlock{0, 1}})}};
    auto r = evaluate_dual_f(indicator_interval(2, 3), kern(Geometry::full(1), 0.5), 2, win, mc(200000, 2));
    INFO("dual_f=" << r.value << " +- " << r.error << " ref=" << ref);
    CHECK(within(r, ref));
  }

  TEST_CASE("half-space dual_g against a polar grid oracle") {
    // T(x) = int over the upper half annulus 2 <= |y| <= 3 of ((x - y1)^2 + y2^2)^{-1/4} dy.
    auto T = [](double x) {
      return oracle::midpoint([&](double rho) {
        return rho * oracle::midpoint([&](double th) {
          double y1 = rho * std::cos(th), y2 = rho * std::sin(th);
          return std::pow((x - y1) * (x - y1) + y2 * y2, -0.25);
        }, 0, pi, 400);
      }, 2, 3, 200);
    };
    double ref = oracle::simpson([&](double x) { double t = T(x); return t * t; }, -1, 1, 40);
    Region win{1, {Piece::ball(1, 0, 1)}};
    auto r = evaluate_dual_g(indicator_half_annulus(2, 2, 3), kern(Geometry::half(2), 0.5), 2, win, mc(200000, 8));
    INFO("dual_g=" << r.value << " +- " << r.error << " ref=" << ref);
    CHECK(within(r, ref));
  }

  TEST_CASE("dual forms are symmetric for a symmetric kernel") {
    auto f = indicator_annulus(2, 0.5, 1.5);
    auto spec = kern(Geometry::full(2), 1, 0.25, 0.25);
    Region win{2, {Piece::ball(2, 0, 2)}};
    auto a = evaluate_dual_f(f, spec, 2, win, mc(200000, 1));
    auto b = evaluate_dual_g(f, spec, 2, win, mc(200000, 2));
    CHECK(std::abs(a.value - b.value) <= 3 * std::hypot(a.error, b.error));
  }

  TEST_CASE("separable dual form") {
    auto f = indicator_annulus(2, 0, 1);
    Region win{2, {Piece::ball(2, 1, 2)}};
    auto r = evaluate_dual_f(f, kern(Geometry::full(2), 0), 2, win, mc(50000));
    INFO(r.value << " +- " << r.error);
    CHECK(within(r, pi * pi * 3 * pi));
    CHECK(r.error < 0.02 * r.value);
  }

  TEST_CASE("Hoelder consistency of the dual form") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 4; ++i) {
      auto f = indicator_annulus(2, 0.5 * u(rng), 1 + u(rng));
      auto g = bump(2, 0.5 + 2 * u(rng));
      double r = 1.5 + u(rng), q = r / (r - 1);
      auto spec = kern(Geometry::full(2), 0.5 + u(rng), 0.3 * u(rng), 0.3 * u(rng));
      auto I = evaluate_bilinear(f, g, spec, mc(100000, 10 + i));
      auto D = evaluate_dual_f(f, spec, q, g.support().region(64), mc(100000, 20 + i));
      double bound = std::pow(D.value, 1 / q) * *g.analytic_norm(r);
      double bound_err = bound * D.error / (q * D.value);
      CHECK(I.value <= bound + 5 * (I.error + bound_err));
    }
  }

  TEST_CASE("numeric norms") {
    QuadOptions o = mc(100000);
    auto r = lp_norm_numeric(indicator_interval(0, 1), 3, o);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
    auto lt = lp_norm_numeric(log_tail(1, 4, 2), 4, QuadOptions{});
    CHECK(lt.value == doctest::Approx(std::pow(2 / std::log(2.0), 0.25)).epsilon(1e-8));
    auto lt_mc = lp_norm_numeric(log_tail(1, 4, 2), 4, mc(200000));
    CHECK(lt_mc.error > 0);
    CHECK(std::abs(lt_mc.value - lt.value) <= 3 * lt_mc.error);
    CHECK_THROWS_AS(lp_norm_numeric(indicator_interval(0, 1), 0.5, o), Error);
  }

  TEST_CASE("quotient") {
    auto f = indicator_annulus(1, 0, 1);
    auto spec = kern(Geometry::full(1), 0.5);
    auto q = quotient(f, f, spec, 2, 2, QuadOptions{});
    CHECK(q.analytic_norms);
    CHECK(q.quotient.value == doctest::Approx(8 * std::sqrt(2.0) / 3).epsilon(1e-7));

    auto a = indicator_annulus(2, 0, 1), b = indicator_annulus(2, 1, 2);
    auto s2 = kern(Geometry::full(2), 1, 0.2, 0.2);
    auto ab = quotient(a, b, s2, 2, 2, QuadOptions{}), ba = quotient(b, a, s2, 2, 2, QuadOptions{});
    CHECK(ab.quotient.value == doctest::Approx(ba.quotient.value).epsilon(1e-7));

    // Scaling law through the quotient: theta = -1/2 for n=1, p=r=2, lambda=1/2.
    auto g = indicator_annulus(1, 2, 3);
    auto base = quotient(f, g, spec, 2, 2, QuadOptions{});
    auto scaled = quotient(dilate(f, 2, 4), dilate(g, 2, 4), spec, 2, 2, QuadOptions{});
    CHECK(scaled.quotient.value / base.quotient.value == doctest::Approx(2.0).epsilon(1e-6));
  }
}
