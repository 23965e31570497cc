#pragma once

// Parameter-space scans: grid expansion, per-point checks and certificates,
// CSV and JSON reports.

#include "certify.hpp"
#include "conditions.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sw {

enum class CertificateMode { None, Auto, List };

struct ScanConfig {
  Geometry geom = Geometry::full(1);
  std::vector<Number> p, r, alpha, beta, lambda;
  /// alpha + beta grid; beta = sum - alpha when present.
  std::vector<Number> sum;
  /// lambda is solved from Balance at every point.
  bool lambda_balance = false;
  CertificateMode certificates = CertificateMode::Auto;
  std::vector<Construction> certificate_list;
  std::uint64_t budget = 20000;
  std::uint64_t seed = 1;
  int threads = 0;
  bool timing = false;
  std::string out;
  /// The config as parsed, embedded in the report.
  nlohmann::json echo;
};

/// Keys: geometry, n, k, p, r, alpha, beta, lambda, sum, certificates,
/// budget, seed, threads, timing, out. A grid is a list of values or
/// {"from", "to", "step"}; values are "a/b" strings or numbers. Throws Parse.
ScanConfig parse_scan_config(const nlohmann::json& j);

struct CertificateOutcome {
  Construction construction;
  std::optional<Certificate> certificate;
  /// Set when the certificate was skipped (regime mismatch and the like).
  std::string skipped;
};

struct ScanRow {
  SWParams params;
  ConditionReport report;
  std::uint64_t seed;
  std::vector<CertificateOutcome> certificates;
  double wall_seconds = 0;
};

struct ScanReport {
  ScanConfig config;
  std::vector<ScanRow> rows;
};

/// Expands the grid in order p, r, alpha, beta (or sum), lambda with lambda
/// varying fastest.
std::vector<SWParams> expand_grid(const ScanConfig& cfg);

ScanReport run_scan(const ScanConfig& cfg);

/// Header: geometry,n,k,p,r,alpha,beta,lambda,mode,LambdaRange,AlphaRange,
/// BetaRange,SumNonneg,Hoelder,Balance,all_hold,open_band,note,certificates
std::string scan_csv(const ScanReport& rep);
nlohmann::json scan_json(const ScanReport& rep);

}  // namespace sw
