#include <doctest.h>

#include "certify.hpp"
#include "error.hpp"
#include "oracles.hpp"
#include "special.hpp"

#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace sw;

namespace {

SWParams P(Geometry g, const char* p, const char* r, const char* a, const char* b, const char* l) {
  return SWParams(g, Number::parse(p), Number::parse(r), Number::parse(a), Number::parse(b), Number::parse(l));
}

ErrorCode code_of(Construction c, const SWParams& s, CertifyOptions o = {}) {
  try {
    run_certificate(c, s, o);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

// Shape invariants every certificate must satisfy.
void check_shape(const Certificate& c) {
  INFO(to_string(c.construction) << " " << c.geom.name());
  CHECK(c.values.size() == c.schedule.size());
  CHECK(c.errors.size() == c.schedule.size());
  CHECK(c.schedule.size() >= 4);
  if (c.verdict == Verdict::CertifiedDivergent) {
    CHECK(c.increasing);
    for (std::size_t i = 1; i < c.values.size(); ++i) CHECK(c.values[i] > c.values[i - 1]);
    CHECK(std::abs(c.fitted_rate - c.predicted_rate) <= c.rate_tol);
  }
  CHECK(c.rate_tol == doctest::Approx(std::max(0.1 * std::abs(c.predicted_rate), 0.02)));
  if (c.chain_constant && !c.analytic.empty()) {
    REQUIRE(c.analytic.size() == c.values.size());
    CHECK(*c.chain_constant > 0);
    bool ok = true;
    for (std::size_t i = 0; i < c.values.size(); ++i)
      ok = ok && c.values[i] + 3 * c.errors[i] >= *c.chain_constant * c.analytic[i];
    CHECK(c.sandwich_ok == ok);
  }
}

Certificate run(Construction c, const SWParams& s, std::vector<double> schedule = {}) {
  CertifyOptions o;
  o.schedule = std::move(schedule);
  auto cert = run_certificate(c, s, o);
  check_shape(cert);
  return cert;
}

Rational rnd_rational(std::mt19937_64& rng, int lo, int hi, int den) {
  std::uniform_int_distribution<int> d(lo * den, hi * den);
  return Rational(d(rng), den);
}

}  // namespace

TEST_SUITE("certify") {
  TEST_CASE("every condition maps to exactly one construction") {
    for (auto g : {Geometry::full(3), Geometry::half(3), Geometry::codim(4, 2)}) {
      std::set<Construction> seen;
      for (auto id : kAllConditions) {
        auto c = construction_for(id, g);
        CHECK(condition_for(c) == id);
        seen.insert(c);
      }
      CHECK(seen.size() == kAllConditions.size());
    }
    // Across geometries both lambda constructions appear, so all seven are used.
    std::set<Construction> all;
    for (auto g : {Geometry::full(3), Geometry::half(3)})
      for (auto id : kAllConditions) all.insert(construction_for(id, g));
    CHECK(all.size() == kAllConstructions.size());
    for (auto c : kAllConstructions) CHECK(construction_from_string(to_string(c)) == c);
  }

  TEST_CASE("regime gate is the negation of the condition") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> pick(0, 2);
    int checked = 0;
    for (int i = 0; i < 400; ++i) {
      int kind = pick(rng);
      Geometry g = kind == 0 ? Geometry::full(3) : kind == 1 ? Geometry::half(3) : Geometry::codim(3, 1);
      Rational p = 1 + rnd_rational(rng, 0, 3, 4) + Rational(1, 8);
      Rational r = 1 + rnd_rational(rng, 0, 3, 4) + Rational(1, 8);
      SWParams s(g, p, r, rnd_rational(rng, -3, 3, 2), rnd_rational(rng, -3, 3, 2), rnd_rational(rng, -1, 4, 2));
      auto rep = check_conditions(s);
      for (auto id : kAllConditions) {
        auto c = construction_for(id, g);
        bool expect_ok = !rep[id].holds;
        if (id == ConditionId::LambdaRange) expect_ok = expect_ok && s.lambda().rational() > 0;
        if (id == ConditionId::Hoelder) expect_ok = expect_ok && rep[ConditionId::Balance].holds;
        if (id == ConditionId::Balance) expect_ok = true;
        bool threw = false;
        try {
          check_regime(c, s);
        } catch (const Error& e) {
          threw = true;
          CHECK(e.code() == ErrorCode::Regime);
          CHECK(std::string(e.what()).find(std::string(to_string(c))) == 0);
        }
        CHECK(threw == !expect_ok);
        ++checked;
      }
    }
    CHECK(checked == 2400);
  }

  TEST_CASE("wrong-regime examples") {
    CHECK(code_of(Construction::LambdaGeN, P(Geometry::full(1), "2", "2", "0", "0", "1/2")) == ErrorCode::Regime);
    CHECK(code_of(Construction::LambdaGeN, P(Geometry::half(2), "2", "2", "0", "0", "3")) == ErrorCode::Regime);
    CHECK(code_of(Construction::LambdaGeN, P(Geometry::full(1), "2", "2", "0", "0", "-1")) == ErrorCode::Regime);
    CHECK(code_of(Construction::BetaTooBig, P(Geometry::full(1), "2", "2", "0", "1/4", "1/4")) == ErrorCode::Regime);
    CHECK(code_of(Construction::AlphaTooBig, P(Geometry::full(2), "2", "2", "1/2", "0", "1")) == ErrorCode::Regime);
    CHECK(code_of(Construction::SumNegativeCylinders, P(Geometry::full(2), "2", "2", "-1/2", "1/2", "1")) ==
          ErrorCode::Regime);
    CHECK(code_of(Construction::HoelderLogTail, P(Geometry::full(1), "2", "2", "0", "0", "1")) == ErrorCode::Regime);
    CHECK(code_of(Construction::LambdaGeNMinusKOverR, P(Geometry::codim(2, 1), "2", "2", "0", "0", "1.49")) ==
          ErrorCode::Regime);
    CHECK(code_of(Construction::LambdaGeNMinusKOverR, P(Geometry::full(2), "2", "2", "0", "0", "3")) ==
          ErrorCode::Regime);
    // Hoelder fails but Balance does not hold: the identity is unavailable.
    CHECK(code_of(Construction::HoelderLogTail, P(Geometry::full(1), "4", "4", "0", "0", "1/3")) == ErrorCode::Regime);
    try {
      check_regime(Construction::LambdaGeN, P(Geometry::full(1), "2", "2", "0", "0", "1/2"));
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("LambdaRange holds") != std::string::npos);
    }
  }

  TEST_CASE("lambda range: logarithmic at lambda = n") {
    auto c = run(Construction::LambdaGeN, P(Geometry::full(1), "2", "2", "0", "0", "1"), {1e-1, 1e-2, 1e-3, 1e-4});
    CHECK(c.model == FitModel::Log);
    CHECK(c.fitted_rate == doctest::Approx(1).epsilon(0.1));
    CHECK(c.verdict == Verdict::CertifiedDivergent);

    // Oracle for n = 1 with f = g = indicator of 1 < |x| < 6: same-side pairs give
    // 2 int_delta^5 (5 - t)/t dt each, opposite sides never come within delta.
    for (std::size_t i = 0; i < c.schedule.size(); ++i) {
      double d = c.schedule[i];
      double same = 2 * (5 * std::log(5 / d) - (5 - d));
      double cross = oracle::simpson([](double u) { return std::log(6 + u) - std::log(1 + u); }, 1, 6, 2000);
      double exact = 2 * same + 2 * cross;
      CHECK(std::abs(c.values[i] - exact) <= 3 * c.errors[i] + 1e-3 * exact);
    }
  }

  TEST_CASE("lambda range: power growth above n") {
    auto c = run(Construction::LambdaGeN, P(Geometry::full(2), "2", "2", "0", "0", "3"));
    CHECK(c.model == FitModel::Power);
    CHECK(c.predicted_rate == doctest::Approx(-1));
    CHECK(c.fitted_rate == doctest::Approx(-1).epsilon(0.1));
    CHECK(c.verdict == Verdict::CertifiedDivergent);
    CHECK(c.sandwich_ok == true);
  }

  TEST_CASE("weight range: beta side") {
    auto c = run(Construction::BetaTooBig, P(Geometry::full(1), "2", "2", "0", "1/2", "1/4"));
    CHECK(c.model == FitModel::Log);
    CHECK(c.verdict == Verdict::CertifiedDivergent);
    auto d = run(Construction::BetaTooBig, P(Geometry::full(2), "2", "2", "0", "3/2", "1"));
    CHECK(d.model == FitModel::Power);
    CHECK(d.predicted_rate == doctest::Approx(-1));
    CHECK(d.fitted_rate == doctest::Approx(-1).epsilon(0.1));
    CHECK(d.verdict == Verdict::CertifiedDivergent);
  }

  TEST_CASE("weight range: alpha side and half space") {
    auto a = run(Construction::AlphaTooBig, P(Geometry::full(2), "2", "2", "1", "0", "1"));
    CHECK(a.verdict == Verdict::CertifiedDivergent);
    auto h = run(Construction::BetaTooBig, P(Geometry::half(3), "2", "2", "0", "2", "1"));
    CHECK(h.predicted_rate == doctest::Approx(-1));
    CHECK(h.verdict == Verdict::CertifiedDivergent);
  }

  TEST_CASE("scaling law") {
    auto c = run(Construction::BalanceScaling, P(Geometry::full(1), "2", "2", "0", "0", "1/2"), {0.25, 0.5, 1, 2, 4});
    CHECK(c.predicted_rate == doctest::Approx(0.5));
    CHECK(std::abs(c.fitted_rate - 0.5) <= 0.02);
    CHECK(c.verdict == Verdict::CertifiedDivergent);

    auto b = run(Construction::BalanceScaling, P(Geometry::full(2), "2", "2", "0", "0", "2"));
    CHECK(std::abs(b.fitted_rate) <= 0.02);
    CHECK(b.verdict == Verdict::CertifiedBoundedAtScale);

    auto h = run(Construction::BalanceScaling, P(Geometry::half(2), "2", "2", "0", "0", "1"));
    // theta = 1/4 + 1/2 + (1 + 1)/2 - 2 = -1/4 on the half plane.
    CHECK(h.predicted_rate == doctest::Approx(0.5));
    CHECK(std::abs(h.fitted_rate - h.predicted_rate) <= h.rate_tol);
  }

  TEST_CASE("scaling prediction flips sign with the balance residual") {
    for (const char* lam : {"1/4", "3/4", "5/4", "7/4"}) {
      auto s = P(Geometry::full(1), "2", "2", "0", "0", lam);
      double gap = (2 - 0.5 - 0.5) * 1 - Number::parse(lam).value();
      CertifyOptions o;
      o.quad.budget = 20000;
      auto c = verify_scaling_law(s, o);
      CHECK(c.predicted_rate == doctest::Approx(gap));
      CHECK((c.predicted_rate > 0) == (gap > 0));
    }
  }

  TEST_CASE("cylinder partial sums") {
    CHECK(cylinder_partial_sum(-1, 1.5, 1) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    // Direct summation oracle.
    double direct = 0;
    for (int m = 1; m <= 30; ++m) direct += std::pow(2.0, m) / std::pow(m + 1.0, 1.5);
    CHECK(cylinder_partial_sum(-1, 1.5, 30) == doctest::Approx(direct).epsilon(1e-14));
    double prev = 0;
    for (int M : {10, 50, 200, 1000}) {
      double ratio = cylinder_partial_sum(-1, 1.5, M) / cylinder_partial_sum(-1, 1.5, M - 1);
      CHECK(ratio > prev);
      CHECK(ratio < 2);
      prev = ratio;
    }
    CHECK(prev == doctest::Approx(2).epsilon(0.01));
  }

  TEST_CASE("sum negative cylinders") {
    auto h = run(Construction::SumNegativeCylinders, P(Geometry::half(2), "2", "2", "-0.6", "0.1", "1"));
    CHECK(h.sandwich_ok == true);
    CHECK(h.verdict == Verdict::CertifiedDivergent);
    CHECK(h.predicted_rate == doctest::Approx(0.5 * std::log(2.0)));
    REQUIRE(h.extras.contains("numeric_values"));
    CHECK(h.extras["numeric_values"].size() == 6);

    auto f = run(Construction::SumNegativeCylinders, P(Geometry::full(2), "2", "2", "-1/2", "-1/2", "1"));
    CHECK(f.verdict == Verdict::CertifiedDivergent);
    auto k = run(Construction::SumNegativeCylinders, P(Geometry::codim(3, 1), "2", "2", "-1/2", "-1/2", "1"));
    CHECK(k.verdict == Verdict::CertifiedDivergent);
    CertifyOptions bad;
    bad.eps = 0;
    CHECK_THROWS_AS(certify_sum_negative(P(Geometry::full(2), "2", "2", "-1/2", "-1/2", "1"), bad), Error);
  }

  TEST_CASE("hoelder exponent identity is exact") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 300; ++i) {
      Geometry g = i % 3 == 0 ? Geometry::full(1 + i % 4) : i % 3 == 1 ? Geometry::half(2 + i % 3)
                                                                       : Geometry::codim(3 + i % 2, 1 + i % 2);
      Rational p = Rational(2) + rnd_rational(rng, 0, 4, 3);
      Rational r = Rational(2) + rnd_rational(rng, 0, 4, 5);
      SWParams s(g, p, r, rnd_rational(rng, -2, 2, 3), rnd_rational(rng, -2, 2, 7), 0);
      s = s.with_lambda(solve_balance_lambda(s));
      auto [lhs, rhs] = hoelder_identity(s);
      REQUIRE(lhs.exact());
      CHECK(lhs.rational() == rhs.rational());
    }
  }

  TEST_CASE("hoelder log tail") {
    // 1/p + 1/r = 1/2 < 1, lambda from Balance.
    SWParams s(Geometry::full(2), 4, 4, 0, 0, 0);
    s = s.with_lambda(solve_balance_lambda(s));
    auto c = run(Construction::HoelderLogTail, s);
    CHECK(c.extras["identity_holds"] == true);
    CHECK(c.extras["closed_form_max_rel_error"].get<double>() <= 1e-6);
    CHECK(c.verdict == Verdict::CertifiedDivergent);
    // Substitution oracle: int_4^R drho / (rho log rho) = log log R - log log 4.
    for (std::size_t i = 0; i < c.schedule.size(); ++i) {
      double R = c.schedule[i];
      double u = oracle::simpson([](double t) { return 1 / t; }, std::log(4.0), std::log(std::max(R, 4.0)), 2000);
      CHECK(c.values[i] == doctest::Approx(2 * kPi * u).epsilon(1e-6));
    }
  }

  TEST_CASE("threshold exponent") {
    auto e1 = threshold_exponent(P(Geometry::half(2), "2", "2", "0", "0", "3/2"));
    CHECK(e1.rational() == 1);
    auto e2 = threshold_exponent(P(Geometry::codim(3, 1), "2", "2", "0", "0", "3"));
    CHECK(e2.rational() == 2);
    // Oracle: (lambda - k/q - (n-k)) q + 1 computed from the formula directly.
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
      int n = 2 + i % 4, k = 1 + i % (n - 1);
      Rational r = Rational(1) + Rational(1 + i % 7, 3);
      Rational lam = rnd_rational(rng, 0, n + 1, 6);
      Rational q = r / (r - 1);
      auto e = threshold_exponent(SWParams(Geometry::codim(n, k), 2, r, 0, 0, lam));
      CHECK(e.rational() == (lam - Rational(k) / q - (n - k)) * q + 1);
    }
  }

  TEST_CASE("lambda threshold certificates") {
    auto lg = run(Construction::LambdaGeNMinusKOverR, P(Geometry::codim(2, 1), "2", "2", "0", "0", "3/2"));
    CHECK(lg.model == FitModel::Log);
    CHECK(lg.extras["inner_exponent_is_one"] == true);
    CHECK(lg.verdict == Verdict::CertifiedDivergent);
    auto pw = run(Construction::LambdaGeNMinusKOverR, P(Geometry::codim(3, 1), "2", "2", "0", "0", "3"));
    CHECK(pw.model == FitModel::Power);
    CHECK(pw.predicted_rate == doctest::Approx(-1));
    CHECK(pw.fitted_rate == doctest::Approx(-1).epsilon(0.1));
    CHECK(pw.sandwich_ok == true);
  }

  TEST_CASE("schedule validation") {
    auto s = P(Geometry::full(2), "2", "2", "0", "0", "3");
    CertifyOptions o;
    o.schedule = {0.1, 0.01, 0.001};
    CHECK_THROWS_AS(certify_lambda_range(s, o), Error);
    o.schedule = {0.1, 0.2, 0.01, 0.001};
    CHECK_THROWS_AS(certify_lambda_range(s, o), Error);
  }

  TEST_CASE("stability on admissible points") {
    // All conditions hold; excising |x - y| < delta changes the form less and less.
    auto s = P(Geometry::full(1), "4/3", "4/3", "0", "0", "1/2");
    REQUIRE(check_conditions(s).all_hold());
    KernelSpec spec{s.geom(), 0, 0, 0.5, 0};
    auto f = indicator_annulus(1, 0, 1);
    std::vector<double> vals;
    for (double d : {1.0 / 8, 1.0 / 64, 1.0 / 512, 1.0 / 4096}) {
      spec.exclusion_radius = d;
      QuadOptions o;
      o.seed = 11;
      vals.push_back(evaluate_bilinear(f, f, spec, o).value);
    }
    CHECK(std::abs(vals[3] - vals[2]) / vals[3] < 0.05);
  }
}
