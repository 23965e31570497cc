// swcli: command-line front end over the steinweiss C API.

#include <steinweiss/steinweiss.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

enum Exit { kOk = 0, kUsage = 1, kConditionFail = 2, kInconclusive = 3 };

using json = nlohmann::json;

struct Failure {
  int code;
  std::string message;
};

int exit_for(sw_status s) { return s == SW_REGIME ? kConditionFail : kUsage; }

void check(sw_status s, const char* what) {
  if (s != SW_OK) throw Failure{exit_for(s), std::string(what) + ": " + sw_last_error()};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  sw_free_string(s);
  return out;
}

struct ParamsDeleter {
  void operator()(sw_params* p) const { sw_params_destroy(p); }
};
struct FunctionDeleter {
  void operator()(sw_function* f) const { sw_function_destroy(f); }
};
using ParamsPtr = std::unique_ptr<sw_params, ParamsDeleter>;
using FunctionPtr = std::unique_ptr<sw_function, FunctionDeleter>;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{kUsage, "cannot read " + path};
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Failure{kUsage, path + ": " + e.what()};
  }
}

// Flags given on the command line win over fields of --config.
struct Common {
  std::string config;
  std::optional<std::string> geometry, p, r, alpha, beta, lambda;
  std::optional<int> n, k, threads;
  std::optional<std::uint64_t> budget, seed;
  std::string method = "auto";
  std::string out;
  std::string format = "json";
  json cfg = json::object();

  void load() {
    if (!config.empty()) cfg = load_json(config);
    if (!cfg.is_object()) throw Failure{kUsage, "config must be a JSON object"};
  }

  std::optional<std::string> text(const std::optional<std::string>& flag, const char* key) const {
    if (flag) return flag;
    if (!cfg.contains(key)) return std::nullopt;
    const auto& v = cfg[key];
    return v.is_string() ? v.get<std::string>() : v.dump();
  }

  template <class T>
  std::optional<T> num(const std::optional<T>& flag, const char* key) const {
    if (flag) return flag;
    if (!cfg.contains(key)) return std::nullopt;
    try {
      return cfg[key].get<T>();
    } catch (const json::exception&) {
      throw Failure{kUsage, std::string("config field '") + key + "' has the wrong type"};
    }
  }

  sw_options options() const {
    sw_options o;
    sw_options_init(&o);
    if (auto b = num(budget, "budget")) o.budget = *b;
    if (auto s = num(seed, "seed")) o.seed = *s;
    if (auto t = num(threads, "threads")) o.threads = *t;
    std::string m = cfg.contains("method") && method == "auto" ? cfg["method"].get<std::string>() : method;
    if (m == "auto")
      o.method = SW_METHOD_AUTO;
    else if (m == "mc")
      o.method = SW_METHOD_MONTE_CARLO;
    else if (m == "radial")
      o.method = SW_METHOD_RADIAL;
    else
      throw Failure{kUsage, "unknown method '" + m + "'"};
    return o;
  }

  // p and r default to 2 where only the kernel matters.
  ParamsPtr params(bool need_exponents) const {
    std::string g = text(geometry, "geometry").value_or("full");
    sw_geometry geo;
    if (g == "full")
      geo = SW_GEOMETRY_FULL;
    else if (g == "half")
      geo = SW_GEOMETRY_HALF;
    else if (g == "codim")
      geo = SW_GEOMETRY_CODIM;
    else
      throw Failure{kUsage, "geometry must be full, half or codim"};
    auto nn = num(n, "n");
    if (!nn) throw Failure{kUsage, "--n is required"};
    int kk = num(k, "k").value_or(geo == SW_GEOMETRY_HALF ? 1 : 0);

    auto field = [&](const std::optional<std::string>& flag, const char* key, const char* dflt) {
      auto v = text(flag, key);
      if (!v && !dflt) throw Failure{kUsage, std::string("--") + key + " is required"};
      return v.value_or(dflt ? dflt : "");
    };
    const char* exp_default = need_exponents ? nullptr : "2";
    std::string ps = field(p, "p", exp_default), rs = field(r, "r", exp_default);
    std::string as = field(alpha, "alpha", "0"), bs = field(beta, "beta", "0");
    std::string ls = field(lambda, "lambda", nullptr);

    sw_params* raw = nullptr;
    if (ls == "balance") {
      check(sw_params_create(geo, *nn, kk, ps.c_str(), rs.c_str(), as.c_str(), bs.c_str(), "0", &raw), "parameters");
      ParamsPtr base(raw);
      char* solved = nullptr;
      check(sw_solve_balance_lambda(base.get(), &solved), "balance");
      ls = take(solved);
      raw = nullptr;
    }
    check(sw_params_create(geo, *nn, kk, ps.c_str(), rs.c_str(), as.c_str(), bs.c_str(), ls.c_str(), &raw),
          "parameters");
    return ParamsPtr(raw);
  }

  void emit(const std::string& body) const {
    if (out.empty()) {
      std::cout << body << '\n';
      return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f || !(f << body << '\n')) throw Failure{kUsage, "cannot write " + out};
  }
};

void add_point_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON file with default field values");
  cmd->add_option("--geometry", c.geometry, "full, half or codim");
  cmd->add_option("--n", c.n, "ambient dimension");
  cmd->add_option("--k", c.k, "codimension (codim geometry)");
  cmd->add_option("--p", c.p, "exponent of f, e.g. 6/5");
  cmd->add_option("--r", c.r, "exponent of g");
  cmd->add_option("--alpha", c.alpha, "weight exponent on x");
  cmd->add_option("--beta", c.beta, "weight exponent on y");
  cmd->add_option("--lambda", c.lambda, "kernel exponent, or 'balance'");
  cmd->add_option("--out", c.out, "write the report here instead of stdout");
  cmd->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json"}));
}

void add_quad_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--budget", c.budget, "Monte Carlo sample budget");
  cmd->add_option("--seed", c.seed, "master seed");
  cmd->add_option("--threads", c.threads, "worker threads, 0 for all cores");
  cmd->add_option("--method", c.method, "quadrature path")->check(CLI::IsMember({"auto", "mc", "radial"}));
}

std::vector<double> parse_schedule(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Failure{kUsage, "bad schedule entry '" + item + "'"};
    }
  }
  return out;
}

int cmd_check(const Common& c) {
  auto params = c.params(true);
  int all = 0;
  char* js = nullptr;
  check(sw_check(params.get(), &all, &js), "check");
  c.emit(take(js));
  return all ? kOk : kConditionFail;
}

int cmd_evaluate(const Common& c, const std::string& f_id, const std::string& g_id, bool quotient) {
  auto params = c.params(quotient);
  auto opts = c.options();
  sw_function *f = nullptr, *g = nullptr;
  check(sw_function_create(f_id.c_str(), &f), "f");
  FunctionPtr fp(f);
  check(sw_function_create(g_id.c_str(), &g), "g");
  FunctionPtr gp(g);
  char* js = nullptr;
  check(sw_evaluate(fp.get(), gp.get(), params.get(), &opts, quotient ? 1 : 0, &js), "evaluate");
  c.emit(take(js));
  return kOk;
}

struct CertifyArgs {
  std::string construction, schedule, f, g;
  std::optional<double> eps;
  std::optional<int> m_max;
};

int cmd_certify(const Common& c, const CertifyArgs& a) {
  auto params = c.params(true);
  auto opts = c.options();
  sw_certify_options co;
  sw_certify_options_init(&co);
  std::vector<double> sched;
  if (!a.schedule.empty()) sched = parse_schedule(a.schedule);
  co.schedule = sched.empty() ? nullptr : sched.data();
  co.schedule_len = sched.size();
  if (a.eps) co.eps = *a.eps;
  if (a.m_max) co.numeric_m_max = *a.m_max;
  FunctionPtr fp, gp;
  if (!a.f.empty()) {
    sw_function* f = nullptr;
    check(sw_function_create(a.f.c_str(), &f), "f");
    fp.reset(f);
    co.f = f;
  }
  if (!a.g.empty()) {
    sw_function* g = nullptr;
    check(sw_function_create(a.g.c_str(), &g), "g");
    gp.reset(g);
    co.g = g;
  }
  sw_verdict verdict = SW_VERDICT_INCONCLUSIVE;
  char* js = nullptr;
  check(sw_certify(a.construction.c_str(), params.get(), &opts, &co, &verdict, &js), "certify");
  c.emit(take(js));
  return verdict == SW_VERDICT_INCONCLUSIVE ? kInconclusive : kOk;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << body)) throw Failure{kUsage, "cannot write " + path};
}

int cmd_scan(const Common& c) {
  if (c.config.empty()) throw Failure{kUsage, "scan needs --config"};
  json cfg = load_json(c.config);
  if (!cfg.is_object()) throw Failure{kUsage, "config must be a JSON object"};
  if (c.budget) cfg["budget"] = *c.budget;
  if (c.seed) cfg["seed"] = *c.seed;
  if (c.threads) cfg["threads"] = *c.threads;
  if (!c.out.empty()) cfg["out"] = c.out;
  std::string out = cfg.value("out", std::string());

  char *csv = nullptr, *js = nullptr;
  check(sw_scan(cfg.dump().c_str(), &csv, &js), "scan");
  std::string csv_s = take(csv), js_s = take(js);
  if (out.empty()) {
    std::cout << (c.format == "csv" ? csv_s : js_s + "\n");
    return kOk;
  }
  write_file(out + ".csv", csv_s);
  write_file(out + ".json", js_s + "\n");
  return kOk;
}

int cmd_catalog() {
  char* js = nullptr;
  check(sw_catalog(&js), "catalog");
  std::cout << take(js) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stein-Weiss bilinear forms: condition checks, quadrature and divergence certificates", "swcli"};
  app.set_version_flag("--version", std::string(sw_version()));
  app.require_subcommand(1);

  Common check_c, eval_c, cert_c, scan_c;

  auto* check_cmd = app.add_subcommand("check", "check the necessary conditions at one parameter point");
  add_point_flags(check_cmd, check_c);

  auto* eval_cmd = app.add_subcommand("evaluate", "evaluate the bilinear form for two catalog functions");
  add_point_flags(eval_cmd, eval_c);
  add_quad_flags(eval_cmd, eval_c);
  std::string f_id, g_id;
  bool quotient = false;
  eval_cmd->add_option("--f", f_id, "catalog id of f")->required();
  eval_cmd->add_option("--g", g_id, "catalog id of g")->required();
  eval_cmd->add_flag("--quotient", quotient, "also compute the norms and the normalized quotient");

  auto* cert_cmd = app.add_subcommand("certify", "run a divergence certificate");
  add_point_flags(cert_cmd, cert_c);
  add_quad_flags(cert_cmd, cert_c);
  CertifyArgs ca;
  cert_cmd->add_option("construction", ca.construction, "construction id, e.g. LambdaGeN")->required();
  cert_cmd->add_option("--schedule", ca.schedule, "comma-separated truncation schedule");
  cert_cmd->add_option("--eps", ca.eps, "eps of the cylinder family");
  cert_cmd->add_option("--m-max", ca.m_max, "largest cylinder truncation quadratured numerically");
  cert_cmd->add_option("--f", ca.f, "scaling-law f (catalog id)");
  cert_cmd->add_option("--g", ca.g, "scaling-law g (catalog id)");

  auto* scan_cmd = app.add_subcommand("scan", "scan a parameter grid from a JSON config");
  scan_cmd->add_option("--config", scan_c.config, "scan config file")->required();
  scan_cmd->add_option("--budget", scan_c.budget, "overrides the config budget");
  scan_cmd->add_option("--seed", scan_c.seed, "overrides the config seed");
  scan_cmd->add_option("--threads", scan_c.threads, "overrides the config thread count");
  scan_cmd->add_option("--out", scan_c.out, "output prefix; writes PREFIX.csv and PREFIX.json");
  scan_cmd->add_option("--format", scan_c.format, "stdout format without --out")->check(CLI::IsMember({"json", "csv"}));

  auto* cat_cmd = app.add_subcommand("catalog", "list trial function ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*check_cmd) {
      check_c.load();
      return cmd_check(check_c);
    }
    if (*eval_cmd) {
      eval_c.load();
      return cmd_evaluate(eval_c, f_id, g_id, quotient);
    }
    if (*cert_cmd) {
      cert_c.load();
      return cmd_certify(cert_c, ca);
    }
    if (*scan_cmd) return cmd_scan(scan_c);
    if (*cat_cmd) return cmd_catalog();
  } catch (const Failure& f) {
    std::cerr << "swcli: " << f.message << '\n';
    return f.code;
  } catch (const json::exception& e) {
    std::cerr << "swcli: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
