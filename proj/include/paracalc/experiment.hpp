#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "paracalc/io.hpp"
#include "paracalc/solver.hpp"

namespace paracalc {

/// Initial-condition recipe: a radially synthesized field of the given
/// smoothness and amplitude, optionally slaved to the rough antiderivative
/// so the subtracted remainder starts smooth.
struct U0Spec {
  double amplitude = 0.25;
  double alpha = 2.0;
  uint64_t seed = 17;
  bool slaved = false;
};

/// Declarative run description.  Parsed from JSON, schema-checked before
/// any compute; unknown keys are rejected so typos cannot silently fall
/// back to defaults.
struct ExperimentConfig {
  std::string kind;                  // convergence | crossval | wick | norms
  int n = 64;
  uint64_t seed = 1;
  std::vector<uint64_t> seeds;       // norm suite; 1..20 when empty
  std::string mollifier = "gaussian";
  double eps = 0.25;
  int levels = 4;                    // mollification ladder length
  bool renormalized = true;          // convergence: use matched counterterms
  bool paracontrolled = false;       // convergence: also run the fixed-point solver
  bool zero_noise = false;           // crossval: compare the noise-free flows
  bool refine = false;               // crossval: rerun at dt/2, tolerance/10
  double eta_lambda = 0.5;
  int eta_nodes = 6;
  SolverConfig solver;               // n and eta grid are filled from the above
  double tolerance = 2e-2;           // crossval pass threshold, relative
  double sigma_offset = 0.0;         // crossval fault injection on one solver
  int samples = 200;                 // wick Monte-Carlo size
  std::vector<double> eta_values{1.0, 0.5};
  std::vector<std::string> kernel_factors;  // wick: factorized-kernel checks
  U0Spec u0;
  std::string out = "runs";
};

[[nodiscard]] ExperimentConfig parse_experiment(const std::string& json_text);
[[nodiscard]] ExperimentConfig load_experiment(const std::filesystem::path& file);

/// Canonical JSON of the fully resolved configuration (every field present,
/// keys sorted); the run hash is the FNV-1a digest of this text.
[[nodiscard]] std::string resolved_json(const ExperimentConfig& cfg);
[[nodiscard]] std::string config_hash(const ExperimentConfig& cfg);

/// One quantitative gate: pass iff lo <= value <= hi.
struct CheckResult {
  std::string name;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

struct RunReport {
  std::string kind;
  std::string hash;
  std::string resolved;              // canonical config JSON
  std::vector<CheckResult> checks;
  std::vector<std::string> notes;
  std::vector<std::string> table_header;
  std::vector<std::vector<double>> table;
  std::vector<PlotSeries> plots;

  [[nodiscard]] bool passed() const;
};

/// Pathwise mollification cascade: one underlying white-noise sample,
/// solved per ladder level with matched counterterms, reported as Cauchy
/// differences; includes the sigma = 0 contrast ladder and the stability
/// of the renormalized square when counterterms are on.
[[nodiscard]] RunReport run_convergence(const ExperimentConfig& cfg);

/// Both solvers on identical data; pass iff the relative trajectory
/// distance stays under the declared tolerance (and shrinks under
/// refinement when requested).
[[nodiscard]] RunReport run_crossval(const ExperimentConfig& cfg);

/// Monte-Carlo means of the resonant square against the analytic
/// counterterm, with factorized-kernel variants.
[[nodiscard]] RunReport run_wick(const ExperimentConfig& cfg);

/// Scaling-exponent regressions over a seed list.
[[nodiscard]] RunReport run_norm_suite(const ExperimentConfig& cfg);

/// Dispatch on cfg.kind.
[[nodiscard]] RunReport run_experiment(const ExperimentConfig& cfg);

/// Writes report.json (plus table.csv / plot.svg when present) into a fresh
/// timestamped directory under out_root and returns that directory.
std::filesystem::path write_report(const std::filesystem::path& out_root, const RunReport& report);

}  // namespace paracalc
