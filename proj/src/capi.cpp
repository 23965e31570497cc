#include "steinweiss/steinweiss.h"

#include "certify.hpp"
#include "conditions.hpp"
#include "error.hpp"
#include "functions.hpp"
#include "quadrature.hpp"
#include "scan.hpp"
#include "serialize.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

struct sw_params {
  sw::SWParams value;
};

struct sw_function {
  sw::TrialFunction value;
};

namespace {

thread_local std::string g_last_error;

sw_status to_status(sw::ErrorCode c) {
  switch (c) {
    case sw::ErrorCode::Domain: return SW_DOMAIN;
    case sw::ErrorCode::Parse: return SW_PARSE;
    case sw::ErrorCode::Regime: return SW_REGIME;
    case sw::ErrorCode::Unsupported: return SW_UNSUPPORTED;
    case sw::ErrorCode::Budget: return SW_BUDGET;
    case sw::ErrorCode::Degenerate: return SW_DEGENERATE;
    case sw::ErrorCode::Io: return SW_IO;
  }
  return SW_INTERNAL;
}

sw_status set_error(sw_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
sw_status guard(F&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const sw::Error& e) {
    return set_error(to_status(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return set_error(SW_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(SW_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(SW_INTERNAL, e.what());
  } catch (...) {
    return set_error(SW_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

sw::Number parse_field(const char* text, const char* name) {
  if (!text) sw::fail(sw::ErrorCode::Parse, std::string("missing value for ") + name);
  try {
    return sw::Number::parse(text);
  } catch (const sw::Error& e) {
    sw::fail(e.code(), std::string(name) + ": " + e.what());
  }
}

sw::QuadOptions quad_options(const sw_options* opts) {
  sw_options o;
  sw_options_init(&o);
  if (opts) o = *opts;
  sw::QuadOptions q;
  q.budget = o.budget;
  q.seed = o.seed;
  q.threads = o.threads;
  q.truncation_radius = o.truncation_radius;
  switch (o.method) {
    case SW_METHOD_AUTO: q.method = sw::MethodChoice::Auto; break;
    case SW_METHOD_MONTE_CARLO: q.method = sw::MethodChoice::MonteCarlo; break;
    case SW_METHOD_RADIAL: q.method = sw::MethodChoice::Radial; break;
    default: sw::fail(sw::ErrorCode::Domain, "unknown quadrature method");
  }
  return q;
}

sw::KernelSpec kernel(const sw::SWParams& s) {
  return {s.geom(), s.alpha().value(), s.beta().value(), s.lambda().value(), 0};
}

}  // namespace

extern "C" {

const char* sw_version(void) { return SW_VERSION; }

const char* sw_last_error(void) { return g_last_error.c_str(); }

void sw_free_string(char* s) { std::free(s); }

void sw_options_init(sw_options* opts) {
  if (!opts) return;
  sw::QuadOptions d;
  opts->budget = d.budget;
  opts->seed = d.seed;
  opts->threads = d.threads;
  opts->method = SW_METHOD_AUTO;
  opts->truncation_radius = d.truncation_radius;
}

void sw_certify_options_init(sw_certify_options* opts) {
  if (!opts) return;
  sw::CertifyOptions d;
  opts->schedule = nullptr;
  opts->schedule_len = 0;
  opts->eps = d.eps;
  opts->numeric_m_max = d.numeric_m_max;
  opts->f = nullptr;
  opts->g = nullptr;
}

sw_status sw_params_create(sw_geometry geometry, int n, int k, const char* p, const char* r, const char* alpha,
                           const char* beta, const char* lambda, sw_params** out) {
  return guard([&] {
    if (!out) return set_error(SW_INVALID_ARGUMENT, "out is null");
    *out = nullptr;
    sw::Geometry g = sw::Geometry::full(1);
    switch (geometry) {
      case SW_GEOMETRY_FULL: g = sw::Geometry::full(n); break;
      case SW_GEOMETRY_HALF: g = sw::Geometry::half(n); break;
      case SW_GEOMETRY_CODIM: g = sw::Geometry::codim(n, k); break;
      default: return set_error(SW_INVALID_ARGUMENT, "unknown geometry");
    }
    sw::SWParams s(g, parse_field(p, "p"), parse_field(r, "r"), parse_field(alpha, "alpha"),
                   parse_field(beta, "beta"), parse_field(lambda, "lambda"));
    *out = new sw_params{std::move(s)};
    return SW_OK;
  });
}

void sw_params_destroy(sw_params* params) { delete params; }

sw_status sw_solve_balance_lambda(const sw_params* params, char** out_lambda) {
  return guard([&] {
    if (!params || !out_lambda) return set_error(SW_INVALID_ARGUMENT, "null argument");
    *out_lambda = dup_string(sw::solve_balance_lambda(params->value).str());
    return SW_OK;
  });
}

sw_status sw_check(const sw_params* params, int* all_hold, char** out_json) {
  return guard([&] {
    if (!params || !out_json) return set_error(SW_INVALID_ARGUMENT, "null argument");
    auto rep = sw::check_conditions(params->value);
    if (all_hold) *all_hold = rep.all_hold() ? 1 : 0;
    *out_json = dup_string(sw::to_json(params->value, rep).dump(2));
    return SW_OK;
  });
}

sw_status sw_function_create(const char* id, sw_function** out) {
  return guard([&] {
    if (!id || !out) return set_error(SW_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    *out = new sw_function{sw::function_from_id(id)};
    return SW_OK;
  });
}

void sw_function_destroy(sw_function* f) { delete f; }

sw_status sw_function_norm(const sw_function* f, double exponent, const sw_options* opts, char** out_json) {
  return guard([&] {
    if (!f || !out_json) return set_error(SW_INVALID_ARGUMENT, "null argument");
    nlohmann::json j = {{"function", f->value.label()}, {"exponent", exponent}};
    if (auto a = f->value.analytic_norm(exponent)) {
      j["value"] = *a;
      j["analytic"] = true;
    } else {
      auto r = sw::lp_norm_numeric(f->value, exponent, quad_options(opts));
      j["value"] = r.value;
      j["analytic"] = false;
      j["numeric"] = sw::to_json(r);
    }
    *out_json = dup_string(j.dump(2));
    return SW_OK;
  });
}

sw_status sw_evaluate(const sw_function* f, const sw_function* g, const sw_params* params, const sw_options* opts,
                      int quotient, char** out_json) {
  return guard([&] {
    if (!f || !g || !params || !out_json) return set_error(SW_INVALID_ARGUMENT, "null argument");
    const auto& s = params->value;
    auto q = quad_options(opts);
    nlohmann::json j = {{"f", f->value.label()}, {"g", g->value.label()}, {"params", sw::to_json(s)}};
    if (quotient) {
      auto res = sw::quotient(f->value, g->value, kernel(s), s.p().value(), s.r().value(), q);
      j["result"] = sw::to_json(res.bilinear);
      j["quotient"] = sw::to_json(res);
    } else {
      j["result"] = sw::to_json(sw::evaluate_bilinear(f->value, g->value, kernel(s), q));
    }
    *out_json = dup_string(j.dump(2));
    return SW_OK;
  });
}

sw_status sw_certify(const char* construction, const sw_params* params, const sw_options* opts,
                     const sw_certify_options* copts, sw_verdict* verdict, char** out_json) {
  return guard([&] {
    if (!construction || !params || !out_json) return set_error(SW_INVALID_ARGUMENT, "null argument");
    auto c = sw::construction_from_string(construction);
    if (!c) return set_error(SW_PARSE, std::string("unknown construction '") + construction + "'");
    sw::CertifyOptions o;
    o.quad = quad_options(opts);
    if (copts) {
      if (copts->schedule_len && !copts->schedule) return set_error(SW_INVALID_ARGUMENT, "schedule is null");
      o.schedule.assign(copts->schedule, copts->schedule + copts->schedule_len);
      o.eps = copts->eps;
      o.numeric_m_max = copts->numeric_m_max;
      if (copts->f) o.f = copts->f->value;
      if (copts->g) o.g = copts->g->value;
    }
    auto cert = sw::run_certificate(*c, params->value, o);
    if (verdict) {
      switch (cert.verdict) {
        case sw::Verdict::CertifiedDivergent: *verdict = SW_VERDICT_DIVERGENT; break;
        case sw::Verdict::CertifiedBoundedAtScale: *verdict = SW_VERDICT_BOUNDED_AT_SCALE; break;
        case sw::Verdict::Inconclusive: *verdict = SW_VERDICT_INCONCLUSIVE; break;
      }
    }
    *out_json = dup_string(sw::to_json(cert).dump(2));
    return SW_OK;
  });
}

sw_status sw_scan(const char* config_json, char** out_csv, char** out_json) {
  return guard([&] {
    if (!config_json) return set_error(SW_INVALID_ARGUMENT, "config is null");
    if (out_csv) *out_csv = nullptr;
    if (out_json) *out_json = nullptr;
    auto cfg = sw::parse_scan_config(nlohmann::json::parse(config_json));
    auto rep = sw::run_scan(cfg);
    std::string csv = sw::scan_csv(rep);
    std::string js = out_json ? sw::scan_json(rep).dump(2) : std::string();
    if (out_csv) *out_csv = dup_string(csv);
    if (out_json) *out_json = dup_string(js);
    return SW_OK;
  });
}

sw_status sw_catalog(char** out_json) {
  return guard([&] {
    if (!out_json) return set_error(SW_INVALID_ARGUMENT, "null argument");
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : sw::catalog())
      j.push_back({{"pattern", e.pattern}, {"example", e.example}, {"description", e.description}});
    *out_json = dup_string(j.dump(2));
    return SW_OK;
  });
}

}  // extern "C"
