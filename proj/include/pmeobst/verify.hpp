#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmeobst/approximation.hpp"
#include "pmeobst/obstacle.hpp"
#include "pmeobst/runconfig.hpp"
#include "pmeobst/weakform.hpp"

namespace pmeobst {

struct CertRow {
  double center0 = 0.0;
  double t_center = 0.0;
  double radius0 = 0.0;
  double residual = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct CertReport {
  bool pass = false;
  int bumps = 0;
  CertRow worst;           // smallest margin
  std::vector<CertRow> rows;
};

/// Weak supersolution certificate: every battery bump must see a pairing
/// residual >= -tol, with tol the consistency-scaled residual tolerance.
/// Deterministic: identical inputs produce identical reports.
CertReport certify_supersolution(const ScalarField& u, double m,
                                 int battery_size = 3);

/// Mirror certificate (residual <= +tol) with bumps restricted to a node
/// mask: only bumps whose positive support lies entirely in the mask count.
CertReport certify_subsolution(
    const ScalarField& u, double m, int battery_size,
    const std::function<bool(long, int)>& mask = {});

/// Everything a verification suite may need about one completed case run.
struct CaseArtifacts {
  RunConfig config;
  ScalarField psi_samples;
  ScalarField u;
  IterationTrace trace;
  std::optional<ScalarField> first_sweep;
  std::vector<LscStage> lsc_stages;  // empty when the continuous path ran
  double stop_tol = 0.0;
  int sweeps = 0;
  std::optional<EpsFamily> eps_family;  // built lazily by suites
};

/// Runs the case pipeline (continuous or lsc, per the obstacle tag).
CaseArtifacts run_case(const RunConfig& rc);

enum class VerdictStatus { kPass, kFail, kSkip };

struct VerdictRow {
  std::string case_name;
  std::string suite;
  VerdictStatus status = VerdictStatus::kSkip;
  std::string detail;
};

struct SuiteVerdicts {
  std::vector<VerdictRow> rows;
  bool all_pass = true;  // skips do not fail

  nlohmann::json to_json() const;
};

/// Identifiers of the addressable invariant suites, in execution order.
std::vector<std::string> suite_catalogue();

/// Runs the named suites (or all of them for "all") over the cases.
/// Unknown suite ids raise ConfigError. Empty case lists yield empty
/// verdict sets.
SuiteVerdicts run_suite(const std::vector<RunConfig>& cases,
                        const std::vector<std::string>& suites);

}  // namespace pmeobst
