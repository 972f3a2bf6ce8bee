#ifndef GREEDYLAB_LAB_HPP
#define GREEDYLAB_LAB_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "greedylab/greedy.hpp"
#include "greedylab/model.hpp"
#include "greedylab/theory.hpp"

namespace greedylab {

enum class ExperimentKind { Recover, Rip, Coherence, Audit, Phase, Counterexample };

std::string_view to_string(ExperimentKind kind);

/// Declarative description of one run. Every field maps to a JSON key of the
/// same name; see parse_spec.
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::Recover;

  // Matrix: generated from `ensemble` or read from `matrix_file`.
  std::string ensemble = "gaussian";  // gaussian | bernoulli | identity_perturbed | identity
  double eps = 0.0;
  Index m = 0;
  Index n = 0;
  std::string matrix_file;
  std::optional<bool> normalize;

  // Signal: generated (k, values) or read from `signal_file`.
  Index k = 0;
  std::string values = "gaussian";  // gaussian | unit_signs
  std::string signal_file;

  std::vector<Index> m_range;
  std::vector<Index> k_range;

  std::uint64_t trials = 1;
  std::optional<std::uint64_t> seed;
  Algorithm algorithm = Algorithm::Omp;
  std::optional<Index> max_iterations;
  double residual_tol = 1e-10;

  std::string rip_mode = "exact";  // exact | sampled
  std::uint64_t budget = kDefaultRipBudget;

  std::vector<std::string> lemmas;
  std::optional<double> delta;
  Index max_n = 16;
  Index max_k = 4;

  std::string output;
};

/// Reads a spec from a JSON object. Unknown keys are rejected. Throws
/// InvalidArgument / Parse with the offending field named.
ExperimentSpec parse_spec(ExperimentKind kind, const nlohmann::json& config);

/// Parses "a:b:s" (inclusive, step s), "a:b" (step 1) or "a,b,c".
std::vector<Index> parse_range(std::string_view text);

/// Throws InvalidArgument naming the first bad field.
void validate_spec(const ExperimentSpec& spec);

/// Independent substream seed for (seed, lanes...).
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> lanes);

/// Builds the matrix a spec describes (file, or ensemble with m x n).
DenseMatrix spec_matrix(const ExperimentSpec& spec, std::uint64_t seed);

struct RecoverOutcome {
  DenseMatrix phi;
  SparseSignal truth;
  RecoveryTrace trace;
  bool exact = false;
};

RecoverOutcome run_recover(const ExperimentSpec& spec);

struct CoherenceOutcome {
  double mu = 0.0;
  std::optional<bool> condition;  // mu < 1/(2K-1) when k is set
};

RipReport run_rip(const ExperimentSpec& spec);
CoherenceOutcome run_coherence(const ExperimentSpec& spec);

/// One (M, K) cell of a success-rate sweep.
struct PhaseCell {
  Index m = 0;
  Index k = 0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double success_rate = 0.0;
  double mean_iterations = 0.0;
};

/// Cells ordered by (M, K); trial t of a cell uses substream (seed, M, K, t).
std::vector<PhaseCell> run_phase(const ExperimentSpec& spec);
void write_phase_csv(std::ostream& out, const std::vector<PhaseCell>& cells);

// Randomized audits of the bound checks.

struct AuditOptions {
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  Index max_n = 16;
  Index max_k = 4;
  /// Used instead of the exact isometry constant when set; violations that
  /// follow are reported as-is.
  std::optional<double> delta_override;
};

struct AuditResult {
  std::string suite;
  std::vector<BoundCheck> checks;

  std::size_t violations() const;
  bool pass() const { return violations() == 0; }
};

/// ip, prip, hbound, linf, prop32, lemma37.
const std::vector<std::string>& audit_suite_names();

/// Throws InvalidArgument for an unknown suite or trials = 0.
AuditResult run_audit_suite(std::string_view suite, const AuditOptions& options);

std::vector<AuditResult> run_audit(const ExperimentSpec& spec);

}  // namespace greedylab

#endif  // GREEDYLAB_LAB_HPP
