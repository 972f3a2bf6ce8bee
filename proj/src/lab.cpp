#include "greedylab/lab.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>
#include <set>

#include "greedylab/io.hpp"
#include "greedylab/random.hpp"

namespace greedylab {

using nlohmann::json;

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Recover: return "recover";
    case ExperimentKind::Rip: return "rip";
    case ExperimentKind::Coherence: return "coherence";
    case ExperimentKind::Audit: return "audit";
    case ExperimentKind::Phase: return "phase";
    case ExperimentKind::Counterexample: return "counterexample";
  }
  return "unknown";
}

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::InvalidArgument, "field '" + field + "': " + why);
}

template <class T>
T field_as(const json& config, const std::string& key) {
  try {
    return config.at(key).get<T>();
  } catch (const json::exception&) {
    bad_field(key, "wrong type");
  }
}

Index parse_index(std::string_view text, const std::string& field) {
  Index v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) bad_field(field, "not an integer: '" + std::string(text) + "'");
  return v;
}

std::vector<Index> range_from_json(const json& value, const std::string& field) {
  if (value.is_string()) return parse_range(value.get<std::string>());
  if (value.is_array()) {
    std::vector<Index> out;
    for (const auto& v : value) {
      if (!v.is_number_integer()) bad_field(field, "entries must be integers");
      out.push_back(v.get<Index>());
    }
    return out;
  }
  if (value.is_object()) {
    const Index start = field_as<Index>(value, "start");
    const Index stop = field_as<Index>(value, "stop");
    const Index step = value.contains("step") ? field_as<Index>(value, "step") : 1;
    if (step < 1) bad_field(field, "step must be positive");
    std::vector<Index> out;
    for (Index v = start; v <= stop; v += step) out.push_back(v);
    return out;
  }
  bad_field(field, "expected a list, a range string, or {start, stop, step}");
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "omp") return Algorithm::Omp;
  if (s == "romp") return Algorithm::Romp;
  bad_field("algorithm", "expected omp or romp, got '" + s + "'");
}

Ensemble ensemble_of(const ExperimentSpec& spec) {
  if (spec.ensemble == "gaussian") return ensemble::Gaussian{};
  if (spec.ensemble == "bernoulli") return ensemble::Bernoulli{};
  if (spec.ensemble == "identity_perturbed") return ensemble::IdentityPerturbed{spec.eps};
  if (spec.ensemble == "identity") {
    return ensemble::Explicit{Matrix::Identity(spec.m, spec.n)};
  }
  bad_field("ensemble", "unknown ensemble '" + spec.ensemble + "'");
}

ValueDistribution value_distribution(const std::string& s) {
  if (s == "gaussian") return ValueDistribution::Gaussian;
  if (s == "unit_signs") return ValueDistribution::UnitSigns;
  bad_field("values", "expected gaussian or unit_signs, got '" + s + "'");
}

}  // namespace

std::vector<Index> parse_range(std::string_view text) {
  std::vector<Index> out;
  if (text.find(':') != std::string_view::npos) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
      const auto pos = text.find(':', start);
      parts.push_back(text.substr(start, pos - start));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    if (parts.size() < 2 || parts.size() > 3) bad_field("range", "expected a:b or a:b:step");
    const Index a = parse_index(parts[0], "range");
    const Index b = parse_index(parts[1], "range");
    const Index step = parts.size() == 3 ? parse_index(parts[2], "range") : 1;
    if (step < 1) bad_field("range", "step must be positive");
    for (Index v = a; v <= b; v += step) out.push_back(v);
    return out;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find(',', start);
    out.push_back(parse_index(text.substr(start, pos - start), "range"));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

ExperimentSpec parse_spec(ExperimentKind kind, const json& config) {
  if (!config.is_object()) throw Error(ErrorCode::Parse, "configuration must be a JSON object");
  static const std::set<std::string> known = {
      "ensemble", "eps",     "m",        "n",      "matrix_file",    "normalize",
      "k",        "values",  "signal_file", "m_range", "k_range",    "trials",
      "seed",     "algorithm", "max_iterations", "residual_tol", "mode", "budget",
      "lemmas",   "delta",   "max_n",    "max_k",  "output",         "kind"};
  for (auto it = config.begin(); it != config.end(); ++it) {
    if (!known.count(it.key())) bad_field(it.key(), "unknown configuration key");
  }

  ExperimentSpec spec;
  spec.kind = kind;
  if (config.contains("kind") && field_as<std::string>(config, "kind") != to_string(kind)) {
    bad_field("kind", "config is for '" + field_as<std::string>(config, "kind") +
                          "', not '" + std::string(to_string(kind)) + "'");
  }
  if (config.contains("ensemble")) spec.ensemble = field_as<std::string>(config, "ensemble");
  if (config.contains("eps")) spec.eps = field_as<double>(config, "eps");
  if (config.contains("m")) spec.m = field_as<Index>(config, "m");
  if (config.contains("n")) spec.n = field_as<Index>(config, "n");
  if (config.contains("matrix_file")) spec.matrix_file = field_as<std::string>(config, "matrix_file");
  if (config.contains("normalize")) spec.normalize = field_as<bool>(config, "normalize");
  if (config.contains("k")) spec.k = field_as<Index>(config, "k");
  if (config.contains("values")) spec.values = field_as<std::string>(config, "values");
  if (config.contains("signal_file")) spec.signal_file = field_as<std::string>(config, "signal_file");
  if (config.contains("m_range")) spec.m_range = range_from_json(config.at("m_range"), "m_range");
  if (config.contains("k_range")) spec.k_range = range_from_json(config.at("k_range"), "k_range");
  if (config.contains("trials")) {
    const auto t = field_as<std::int64_t>(config, "trials");
    if (t < 0) bad_field("trials", "must be >= 1");
    spec.trials = static_cast<std::uint64_t>(t);
  }
  if (config.contains("seed")) spec.seed = field_as<std::uint64_t>(config, "seed");
  if (config.contains("algorithm")) {
    spec.algorithm = parse_algorithm(field_as<std::string>(config, "algorithm"));
  }
  if (config.contains("max_iterations")) {
    spec.max_iterations = field_as<Index>(config, "max_iterations");
  }
  if (config.contains("residual_tol")) spec.residual_tol = field_as<double>(config, "residual_tol");
  if (config.contains("mode")) spec.rip_mode = field_as<std::string>(config, "mode");
  if (config.contains("budget")) spec.budget = field_as<std::uint64_t>(config, "budget");
  if (config.contains("lemmas")) spec.lemmas = field_as<std::vector<std::string>>(config, "lemmas");
  if (config.contains("delta")) spec.delta = field_as<double>(config, "delta");
  if (config.contains("max_n")) spec.max_n = field_as<Index>(config, "max_n");
  if (config.contains("max_k")) spec.max_k = field_as<Index>(config, "max_k");
  if (config.contains("output")) spec.output = field_as<std::string>(config, "output");
  return spec;
}

void validate_spec(const ExperimentSpec& spec) {
  const bool needs_matrix = spec.kind == ExperimentKind::Recover ||
                            spec.kind == ExperimentKind::Rip ||
                            spec.kind == ExperimentKind::Coherence;
  if (spec.kind != ExperimentKind::Counterexample || spec.matrix_file.empty()) {
    if (!spec.seed) bad_field("seed", "a seed is required");
  }
  if (spec.trials < 1) bad_field("trials", "must be >= 1");
  if (!(spec.residual_tol >= 0.0)) bad_field("residual_tol", "must be >= 0");
  if (spec.max_iterations && *spec.max_iterations < 1) bad_field("max_iterations", "must be >= 1");

  if (needs_matrix && spec.matrix_file.empty()) {
    if (spec.m < 1) bad_field("m", "must be >= 1");
    if (spec.n < 1) bad_field("n", "must be >= 1");
    ensemble_of(spec);
    if ((spec.ensemble == "identity" || spec.ensemble == "identity_perturbed") && spec.m != spec.n) {
      bad_field("m", spec.ensemble + " ensemble needs m = n");
    }
    if (!(spec.eps >= 0.0)) bad_field("eps", "must be >= 0");
  }
  if (spec.kind == ExperimentKind::Recover && spec.signal_file.empty()) {
    if (spec.k < 1) bad_field("k", "must be >= 1");
    if (spec.matrix_file.empty() && spec.k > spec.n) bad_field("k", "must be <= n");
    value_distribution(spec.values);
  }
  if (spec.kind == ExperimentKind::Rip) {
    if (spec.k < 1) bad_field("k", "must be >= 1");
    if (spec.rip_mode != "exact" && spec.rip_mode != "sampled") {
      bad_field("mode", "expected exact or sampled");
    }
  }
  if (spec.kind == ExperimentKind::Phase) {
    if (spec.n < 1) bad_field("n", "must be >= 1");
    if (spec.m_range.empty()) bad_field("m_range", "must be nonempty");
    if (spec.k_range.empty()) bad_field("k_range", "must be nonempty");
    for (Index m : spec.m_range)
      if (m < 1) bad_field("m_range", "entries must be >= 1");
    for (Index k : spec.k_range)
      if (k < 1 || k > spec.n) bad_field("k_range", "entries must lie in [1, n]");
    ExperimentSpec probe;
    probe.ensemble = spec.ensemble;
    probe.m = probe.n = 1;
    ensemble_of(probe);
    value_distribution(spec.values);
  }
  if (spec.kind == ExperimentKind::Audit) {
    const auto& names = audit_suite_names();
    for (const auto& l : spec.lemmas) {
      if (std::find(names.begin(), names.end(), l) == names.end()) {
        bad_field("lemmas", "unknown lemma suite '" + l + "'");
      }
    }
    if (spec.max_n < 4 || spec.max_n > 16) bad_field("max_n", "must lie in [4, 16]");
    if (spec.max_k < 2 || spec.max_k > 4) bad_field("max_k", "must lie in [2, 4]");
  }
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> lanes) {
  Rng rng = make_rng(seed, lanes);
  return rng();
}

DenseMatrix spec_matrix(const ExperimentSpec& spec, std::uint64_t seed) {
  DenseMatrix phi = spec.matrix_file.empty()
                        ? gen_matrix(ensemble_of(spec), spec.m, spec.n, seed)
                        : load_matrix_csv(spec.matrix_file);
  const bool default_normalize = spec.kind == ExperimentKind::Coherence &&
                                 spec.matrix_file.empty() &&
                                 (spec.ensemble == "gaussian" || spec.ensemble == "bernoulli");
  if (spec.normalize.value_or(default_normalize)) phi = normalize_columns(phi);
  return phi;
}

namespace {

StoppingRule stopping_rule(const ExperimentSpec& spec, Index sparsity) {
  StoppingRule stop = StoppingRule::for_sparsity(std::max<Index>(sparsity, 1));
  if (spec.max_iterations) stop.max_iterations = *spec.max_iterations;
  stop.residual_tol = spec.residual_tol;
  return stop;
}

RecoveryTrace recover_with(const ExperimentSpec& spec, const DenseMatrix& phi, const Vector& y,
                           Index sparsity) {
  const StoppingRule stop = stopping_rule(spec, sparsity);
  return spec.algorithm == Algorithm::Omp ? omp_recover(phi, y, stop)
                                          : romp_recover(phi, y, std::max<Index>(sparsity, 1), stop);
}

}  // namespace

RecoverOutcome run_recover(const ExperimentSpec& spec) {
  validate_spec(spec);
  const std::uint64_t seed = *spec.seed;
  DenseMatrix phi = spec_matrix(spec, derive_seed(seed, {1}));
  SparseSignal truth =
      spec.signal_file.empty()
          ? gen_sparse(phi.cols(), spec.k, value_distribution(spec.values), derive_seed(seed, {2}))
          : load_signal_json(spec.signal_file);
  if (truth.dimension() != phi.cols()) {
    throw Error(ErrorCode::BadDimensions, "signal dimension " + std::to_string(truth.dimension()) +
                                              " does not match matrix columns " +
                                              std::to_string(phi.cols()));
  }
  const Vector y = phi.eigen() * truth.to_dense();
  const Index sparsity = spec.k > 0 ? spec.k : truth.sparsity();
  RecoveryTrace trace = recover_with(spec, phi, y, sparsity);
  const bool exact = exact_recovery(trace, truth);
  return RecoverOutcome{std::move(phi), std::move(truth), std::move(trace), exact};
}

RipReport run_rip(const ExperimentSpec& spec) {
  validate_spec(spec);
  const DenseMatrix phi = spec_matrix(spec, derive_seed(*spec.seed, {1}));
  if (spec.rip_mode == "exact") return rip_exact(phi, spec.k, spec.budget);
  return rip_sampled(phi, spec.k, spec.trials, derive_seed(*spec.seed, {3}));
}

CoherenceOutcome run_coherence(const ExperimentSpec& spec) {
  validate_spec(spec);
  const DenseMatrix phi = spec_matrix(spec, derive_seed(*spec.seed, {1}));
  CoherenceOutcome out;
  out.mu = coherence(phi);
  if (spec.k >= 1) out.condition = coherence_condition(std::min(out.mu, 1.0), spec.k);
  return out;
}

std::vector<PhaseCell> run_phase(const ExperimentSpec& spec) {
  validate_spec(spec);
  std::vector<Index> ms = spec.m_range, ks = spec.k_range;
  std::sort(ms.begin(), ms.end());
  std::sort(ks.begin(), ks.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  const ValueDistribution values = value_distribution(spec.values);
  std::vector<PhaseCell> cells;
  for (Index m : ms) {
    ExperimentSpec cell_spec = spec;
    cell_spec.m = m;
    const Ensemble ens = ensemble_of(cell_spec);
    for (Index k : ks) {
      PhaseCell cell{m, k, spec.trials, 0, 0.0, 0.0};
      double iterations = 0.0;
      for (std::uint64_t t = 0; t < spec.trials; ++t) {
        const auto lane = {static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(k), t};
        Rng rng = make_rng(*spec.seed, lane);
        const std::uint64_t matrix_seed = rng();
        const DenseMatrix phi = gen_matrix(ens, m, spec.n, matrix_seed);
        const SparseSignal x = gen_sparse(spec.n, k, values, rng);
        const Vector y = phi.eigen() * x.to_dense();
        try {
          const RecoveryTrace trace = recover_with(spec, phi, y, k);
          iterations += static_cast<double>(trace.iterations_run());
          if (exact_recovery(trace, x)) ++cell.successes;
        } catch (const RecoveryError& e) {
          iterations += static_cast<double>(e.partial().iterations_run());
        }
      }
      cell.success_rate = static_cast<double>(cell.successes) / static_cast<double>(cell.trials);
      cell.mean_iterations = iterations / static_cast<double>(cell.trials);
      cells.push_back(cell);
    }
  }
  return cells;
}

void write_phase_csv(std::ostream& out, const std::vector<PhaseCell>& cells) {
  out << kCsvVersionLine << '\n' << "M,K,trials,successes,success_rate,mean_iterations\n";
  for (const auto& c : cells) {
    out << c.m << ',' << c.k << ',' << c.trials << ',' << c.successes << ','
        << format_double(c.success_rate) << ',' << format_double(c.mean_iterations) << '\n';
  }
}

std::vector<AuditResult> run_audit(const ExperimentSpec& spec) {
  validate_spec(spec);
  AuditOptions options;
  options.trials = spec.trials;
  options.seed = *spec.seed;
  options.max_n = spec.max_n;
  options.max_k = spec.max_k;
  options.delta_override = spec.delta;
  std::vector<AuditResult> out;
  const auto& names = spec.lemmas.empty() ? audit_suite_names() : spec.lemmas;
  for (const auto& name : names) out.push_back(run_audit_suite(name, options));
  return out;
}

}  // namespace greedylab
