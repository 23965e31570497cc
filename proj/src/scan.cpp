#include "scan.hpp"

#include "error.hpp"
#include "parallel.hpp"
#include "serialize.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace sw {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxPoints = 1000000;

Number number_from_json(const json& v, const std::string& key) {
  if (v.is_string()) return Number::parse(v.get<std::string>());
  if (v.is_number_integer()) return Number(Rational(v.get<long long>()));
  if (v.is_number_float()) return Number(v.get<double>());
  fail(ErrorCode::Parse, "grid '" + key + "': values must be numbers or \"a/b\" strings");
}

std::vector<Number> grid_from_json(const json& v, const std::string& key) {
  std::vector<Number> out;
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(number_from_json(x, key));
  } else if (v.is_object()) {
    for (const char* f : {"from", "to", "step"})
      if (!v.contains(f)) fail(ErrorCode::Parse, "grid '" + key + "': range needs from, to and step");
    Number from = number_from_json(v["from"], key), to = number_from_json(v["to"], key),
           step = number_from_json(v["step"], key);
    if (from.exact() && to.exact() && step.exact()) {
      if (step.rational() <= 0) fail(ErrorCode::Parse, "grid '" + key + "': step must be positive");
      for (Rational x = from.rational(); x <= to.rational(); x += step.rational()) {
        out.emplace_back(x);
        if (out.size() > kMaxPoints) fail(ErrorCode::Parse, "grid '" + key + "' is too large");
      }
    } else {
      double a = from.value(), b = to.value(), h = step.value();
      if (!(h > 0)) fail(ErrorCode::Parse, "grid '" + key + "': step must be positive");
      // Tolerate rounding at the upper end.
      auto count = static_cast<std::size_t>(std::floor((b - a) / h + 1e-9)) + 1;
      if (b < a) count = 0;
      if (count > kMaxPoints) fail(ErrorCode::Parse, "grid '" + key + "' is too large");
      for (std::size_t i = 0; i < count; ++i) out.emplace_back(a + static_cast<double>(i) * h);
    }
  } else {
    out.push_back(number_from_json(v, key));
  }
  if (out.empty()) fail(ErrorCode::Parse, "grid '" + key + "' is empty");
  return out;
}

std::string csv_bool(bool b) { return b ? "true" : "false"; }

std::vector<Construction> auto_constructions(const SWParams& s, const ConditionReport& rep) {
  std::vector<Construction> out;
  for (const auto& e : rep.entries)
    if (!e.holds) out.push_back(construction_for(e.id, s.geom()));
  return out;
}

}  // namespace

ScanConfig parse_scan_config(const json& j) {
  if (!j.is_object()) fail(ErrorCode::Parse, "scan config must be a JSON object");
  static const std::vector<std::string> known = {"geometry", "n",           "k",      "p",    "r",
                                                 "alpha",    "beta",        "lambda", "sum",  "certificates",
                                                 "budget",   "seed",        "threads", "timing", "out"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      fail(ErrorCode::Parse, "unknown scan config key '" + key + "'");

  ScanConfig cfg;
  cfg.echo = j;
  try {
    std::string geom = j.value("geometry", std::string("full"));
    if (!j.contains("n")) fail(ErrorCode::Parse, "scan config needs n");
    cfg.geom = Geometry::from_name(geom, j.at("n").get<int>(), j.value("k", geom == "half" ? 1 : 0));

    for (const char* key : {"p", "r"})
      if (!j.contains(key)) fail(ErrorCode::Parse, std::string("scan config needs a '") + key + "' grid");
    cfg.p = grid_from_json(j["p"], "p");
    cfg.r = grid_from_json(j["r"], "r");
    cfg.alpha = j.contains("alpha") ? grid_from_json(j["alpha"], "alpha") : std::vector<Number>{Number(0)};
    if (j.contains("sum")) {
      if (j.contains("beta")) fail(ErrorCode::Parse, "give either a 'beta' or a 'sum' grid, not both");
      cfg.sum = grid_from_json(j["sum"], "sum");
    } else {
      cfg.beta = j.contains("beta") ? grid_from_json(j["beta"], "beta") : std::vector<Number>{Number(0)};
    }
    if (!j.contains("lambda")) fail(ErrorCode::Parse, "scan config needs a 'lambda' grid or \"balance\"");
    if (j["lambda"].is_string() && j["lambda"].get<std::string>() == "balance")
      cfg.lambda_balance = true;
    else
      cfg.lambda = grid_from_json(j["lambda"], "lambda");

    if (j.contains("certificates")) {
      const auto& c = j["certificates"];
      if (c.is_string() && c.get<std::string>() == "auto")
        cfg.certificates = CertificateMode::Auto;
      else if (c.is_string() && c.get<std::string>() == "none")
        cfg.certificates = CertificateMode::None;
      else if (c.is_array()) {
        cfg.certificates = CertificateMode::List;
        for (const auto& x : c) {
          auto con = construction_from_string(x.get<std::string>());
          if (!con) fail(ErrorCode::Parse, "unknown construction '" + x.get<std::string>() + "'");
          cfg.certificate_list.push_back(*con);
        }
      } else {
        fail(ErrorCode::Parse, "certificates must be \"auto\", \"none\" or a list of construction ids");
      }
    }
    if (j.contains("budget")) {
      auto b = j["budget"].get<long long>();
      if (b < 1000) fail(ErrorCode::Parse, "budget must be at least 1000");
      cfg.budget = static_cast<std::uint64_t>(b);
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    cfg.threads = j.value("threads", 0);
    if (cfg.threads < 0) fail(ErrorCode::Parse, "threads must be >= 0");
    cfg.timing = j.value("timing", false);
    cfg.out = j.value("out", std::string());
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("scan config: ") + e.what());
  }
  std::size_t total = cfg.p.size() * cfg.r.size() * cfg.alpha.size() *
                      (cfg.sum.empty() ? cfg.beta.size() : cfg.sum.size()) *
                      (cfg.lambda_balance ? 1 : cfg.lambda.size());
  if (total > kMaxPoints) fail(ErrorCode::Parse, "scan grid has more than 10^6 points");
  return cfg;
}

std::vector<SWParams> expand_grid(const ScanConfig& cfg) {
  std::vector<SWParams> out;
  const auto& second = cfg.sum.empty() ? cfg.beta : cfg.sum;
  for (const auto& p : cfg.p)
    for (const auto& r : cfg.r)
      for (const auto& a : cfg.alpha)
        for (const auto& b2 : second) {
          Number beta = b2;
          if (!cfg.sum.empty()) {
            if (b2.exact() && a.exact())
              beta = Number(Rational(b2.rational() - a.rational()));
            else
              beta = Number(b2.value() - a.value());
          }
          if (cfg.lambda_balance) {
            SWParams base(cfg.geom, p, r, a, beta, Number(0));
            out.push_back(base.with_lambda(solve_balance_lambda(base)));
          } else {
            for (const auto& l : cfg.lambda) out.emplace_back(cfg.geom, p, r, a, beta, l);
          }
        }
  return out;
}

ScanReport run_scan(const ScanConfig& cfg) {
  const auto points = expand_grid(cfg);
  ScanReport rep{cfg, {}};
  std::vector<std::optional<ScanRow>> rows(points.size());
  const int workers = resolve_threads(cfg.threads);

  parallel_for(points.size(), workers, [&](std::size_t i) {
    auto t0 = std::chrono::steady_clock::now();
    const SWParams& s = points[i];
    ScanRow row{s, check_conditions(s), derive_seed(cfg.seed, i), {}, 0};
    std::vector<Construction> todo;
    if (cfg.certificates == CertificateMode::Auto) todo = auto_constructions(s, row.report);
    if (cfg.certificates == CertificateMode::List) todo = cfg.certificate_list;
    for (Construction c : todo) {
      CertifyOptions opts;
      opts.quad.budget = cfg.budget;
      opts.quad.seed = row.seed;
      opts.quad.threads = workers > 1 ? 1 : cfg.threads;
      CertificateOutcome out{c, std::nullopt, {}};
      try {
        out.certificate = run_certificate(c, s, opts);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Regime && e.code() != ErrorCode::Domain && e.code() != ErrorCode::Degenerate)
          throw;
        out.skipped = e.what();
      }
      row.certificates.push_back(std::move(out));
    }
    row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rows[i] = std::move(row);
  });
  rep.rows.reserve(rows.size());
  for (auto& r : rows) rep.rows.push_back(std::move(*r));
  return rep;
}

std::string scan_csv(const ScanReport& rep) {
  std::ostringstream os;
  os << "geometry,n,k,p,r,alpha,beta,lambda,mode";
  for (auto id : {ConditionId::LambdaRange, ConditionId::AlphaRange, ConditionId::BetaRange, ConditionId::SumNonneg,
                  ConditionId::Hoelder, ConditionId::Balance})
    os << ',' << to_string(id);
  os << ",all_hold,open_band,note,certificates\n";
  for (const auto& row : rep.rows) {
    const auto& s = row.params;
    os << to_string(s.geom().kind()) << ',' << s.geom().n() << ',' << s.geom().k() << ',' << s.p().str() << ','
       << s.r().str() << ',' << s.alpha().str() << ',' << s.beta().str() << ',' << s.lambda().str() << ','
       << (row.report.exact ? "exact" : "float-mode");
    for (const auto& e : row.report.entries) os << ',' << csv_bool(e.holds);
    os << ',' << csv_bool(row.report.all_hold()) << ',' << csv_bool(row.report.open_band) << ','
       << (row.report.open_band ? "necessity-open" : "") << ',';
    for (std::size_t i = 0; i < row.certificates.size(); ++i) {
      const auto& c = row.certificates[i];
      if (i) os << ';';
      os << to_string(c.construction) << '=' << (c.certificate ? to_string(c.certificate->verdict) : "skipped");
    }
    os << '\n';
  }
  return os.str();
}

json scan_json(const ScanReport& rep) {
  json rows = json::array();
  for (const auto& row : rep.rows) {
    json r = to_json(row.params, row.report);
    r["seed"] = row.seed;
    json certs = json::array();
    for (const auto& c : row.certificates) {
      if (c.certificate)
        certs.push_back(to_json(*c.certificate));
      else
        certs.push_back({{"construction_id", to_string(c.construction)}, {"skipped", c.skipped}});
    }
    r["certificates"] = std::move(certs);
    if (rep.config.timing) r["wall_seconds"] = row.wall_seconds;
    rows.push_back(std::move(r));
  }
  return {{"tool", "steinweiss"},
          {"version", SW_VERSION},
          {"seed", rep.config.seed},
          {"config", rep.config.echo},
          {"points", rep.rows.size()},
          {"rows", std::move(rows)}};
}

}  // namespace sw
