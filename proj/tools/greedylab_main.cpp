// greedylab: command-line front end for recovery runs, isometry constants,
// coherence, bound audits, success-rate sweeps and the K = 2 counterexample.
//
// Exit status: 0 success / PASS, 1 negative result (missed recovery, failed
// audit, counterexample not found), 2 usage or validation error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "greedylab/io.hpp"
#include "greedylab/lab.hpp"

namespace {

using greedylab::ExperimentKind;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitUsage = 2;

/// Flags shared by every subcommand. Each one, when given, overrides the key of
/// the same name in the JSON config.
struct Flags {
  std::string config;
  std::map<std::string, std::string> strings;
  std::map<std::string, double> reals;
  std::map<std::string, std::int64_t> integers;
  std::map<std::string, std::uint64_t> unsigned_integers;
  bool normalize = false;
  bool no_normalize = false;
};

struct Command {
  ExperimentKind kind;
  CLI::App* app;
  Flags flags;
};

void add_string(CLI::App* app, Flags& f, const std::string& flag, const std::string& key,
                const std::string& help) {
  app->add_option_function<std::string>(
      flag, [&f, key](const std::string& v) { f.strings[key] = v; }, help);
}

void add_real(CLI::App* app, Flags& f, const std::string& flag, const std::string& key,
              const std::string& help) {
  app->add_option_function<double>(
      flag, [&f, key](double v) { f.reals[key] = v; }, help);
}

void add_int(CLI::App* app, Flags& f, const std::string& flag, const std::string& key,
             const std::string& help) {
  app->add_option_function<std::int64_t>(
      flag, [&f, key](std::int64_t v) { f.integers[key] = v; }, help);
}

void add_unsigned(CLI::App* app, Flags& f, const std::string& flag, const std::string& key,
                  const std::string& help) {
  app->add_option_function<std::uint64_t>(
      flag, [&f, key](std::uint64_t v) { f.unsigned_integers[key] = v; }, help);
}

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON configuration file ('-' reads stdin)");
  add_unsigned(app, f, "--seed", "seed", "Random seed (required unless replaying)");
  add_string(app, f, "-o,--output", "output", "Output path (default: stdout)");
}

void add_matrix(CLI::App* app, Flags& f) {
  add_string(app, f, "--ensemble", "ensemble",
             "gaussian | bernoulli | identity_perturbed | identity");
  add_real(app, f, "--eps", "eps", "Perturbation size for identity_perturbed");
  add_int(app, f, "-m,--rows", "m", "Rows M");
  add_int(app, f, "-n,--cols", "n", "Columns N");
  add_string(app, f, "--matrix-file", "matrix_file", "Matrix CSV instead of an ensemble");
  app->add_flag("--normalize", f.normalize, "Scale columns to unit norm");
  app->add_flag("--no-normalize", f.no_normalize, "Keep raw column scaling");
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::string text;
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    text = ss.str();
  } else {
    text = greedylab::read_text_file(path);
  }
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw greedylab::Error(greedylab::ErrorCode::Parse, "config is not valid JSON: " + path);
  }
  return j;
}

json merged_config(const Flags& f) {
  json config = load_config(f.config);
  for (const auto& [k, v] : f.strings) {
    if (k == "lemmas") {
      json list = json::array();
      std::stringstream ss(v);
      std::string item;
      while (std::getline(ss, item, ',')) list.push_back(item);
      config[k] = list;
    } else {
      config[k] = v;
    }
  }
  for (const auto& [k, v] : f.reals) config[k] = v;
  for (const auto& [k, v] : f.integers) config[k] = v;
  for (const auto& [k, v] : f.unsigned_integers) config[k] = v;
  if (f.normalize) config["normalize"] = true;
  if (f.no_normalize) config["normalize"] = false;
  return config;
}

/// Writes `body` to the spec's output file, or to stdout when none is set.
/// Returns the stream for the human-readable summary: stdout when the body
/// went to a file, stderr otherwise.
std::ostream& emit(const greedylab::ExperimentSpec& spec, const std::string& body) {
  if (spec.output.empty()) {
    std::cout << body;
    std::cout.flush();
    return std::cerr;
  }
  greedylab::write_text_file(spec.output, body);
  return std::cout;
}

int cmd_recover(const greedylab::ExperimentSpec& spec) {
  const auto outcome = greedylab::run_recover(spec);
  auto& log = emit(spec, greedylab::dump_json(greedylab::trace_to_json(outcome.trace)) + "\n");
  log << greedylab::to_string(spec.algorithm) << ": " << outcome.trace.iterations_run()
      << " iterations, residual "
      << greedylab::format_double(outcome.trace.iterations.empty()
                                      ? outcome.trace.measurement_norm
                                      : outcome.trace.iterations.back().residual_norm_after)
      << ", " << (outcome.exact ? "exact recovery" : "recovery MISSED") << '\n';
  return outcome.exact ? kExitOk : kExitNegative;
}

int cmd_rip(const greedylab::ExperimentSpec& spec) {
  const auto report = greedylab::run_rip(spec);
  auto& log = emit(spec, greedylab::dump_json(greedylab::rip_report_to_json(report)) + "\n");
  log << "delta_" << report.order << " = " << greedylab::format_double(report.delta) << " ("
      << (report.mode == greedylab::RipMode::Exact ? "exact" : "sampled lower bound") << ", "
      << report.supports_examined << " supports)\n";
  return kExitOk;
}

int cmd_coherence(const greedylab::ExperimentSpec& spec) {
  const auto outcome = greedylab::run_coherence(spec);
  json j = {{"mu", outcome.mu}};
  if (outcome.condition) {
    j["k"] = spec.k;
    j["condition"] = *outcome.condition;
  }
  auto& log = emit(spec, greedylab::dump_json(j) + "\n");
  log << "mu = " << greedylab::format_double(outcome.mu) << '\n';
  return kExitOk;
}

int cmd_audit(const greedylab::ExperimentSpec& spec) {
  const auto results = greedylab::run_audit(spec);
  std::vector<greedylab::BoundCheck> all;
  for (const auto& r : results) all.insert(all.end(), r.checks.begin(), r.checks.end());
  std::ostringstream csv;
  greedylab::write_bound_checks_csv(csv, all);
  auto& log = emit(spec, csv.str());
  bool pass = true;
  for (const auto& r : results) {
    log << r.suite << ": " << r.checks.size() << " checks, " << r.violations() << " violations\n";
    pass = pass && r.pass();
  }
  log << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kExitOk : kExitNegative;
}

int cmd_phase(const greedylab::ExperimentSpec& spec) {
  const auto cells = greedylab::run_phase(spec);
  std::ostringstream csv;
  greedylab::write_phase_csv(csv, cells);
  auto& log = emit(spec, csv.str());
  log << cells.size() << " cells\n";
  return kExitOk;
}

int cmd_counterexample(const greedylab::ExperimentSpec& spec) {
  const double ceiling = spec.delta.value_or(1.0 / std::sqrt(2.0));
  if (!spec.matrix_file.empty() || !spec.signal_file.empty()) {
    if (spec.matrix_file.empty() || spec.signal_file.empty()) {
      throw greedylab::Error(greedylab::ErrorCode::InvalidArgument,
                             "field 'matrix_file'/'signal_file': replay needs both");
    }
    const auto phi = greedylab::load_matrix_csv(spec.matrix_file);
    const auto x = greedylab::load_signal_json(spec.signal_file);
    const auto replay = greedylab::replay_counterexample(phi, x);
    const bool certified = replay.certificate.delta <= ceiling + 1e-9;
    json j = {{"delta3", replay.certificate.delta},
              {"certified", certified},
              {"omp_failed", replay.omp_failed},
              {"first_pick_off_support", replay.first_pick_off_support},
              {"trace", greedylab::trace_to_json(replay.trace)}};
    std::cout << greedylab::dump_json(j) << '\n';
    return certified && replay.omp_failed ? kExitOk : kExitNegative;
  }

  greedylab::CounterexampleOptions options;
  options.delta_ceiling = ceiling;
  options.budget = spec.budget == greedylab::kDefaultRipBudget ? options.budget : spec.budget;
  options.seed = *spec.seed;
  if (spec.m > 0) options.rows = spec.m;
  const auto outcome = greedylab::counterexample_search(options);
  json j = {{"found", outcome.found.has_value()},
            {"candidates_evaluated", outcome.candidates_evaluated}};
  if (outcome.found) {
    j["delta3"] = outcome.found->certificate.delta;
    j["signal"] = greedylab::signal_to_json(outcome.found->x);
    j["trace"] = greedylab::trace_to_json(outcome.found->trace);
    if (!spec.output.empty()) {
      greedylab::save_matrix_csv(spec.output + ".csv", outcome.found->phi);
      greedylab::save_signal_json(spec.output + ".json", outcome.found->x);
    }
  } else {
    std::cerr << "NotFound: search budget exhausted\n";
  }
  std::cout << greedylab::dump_json(j) << '\n';
  return outcome.found ? kExitOk : kExitNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Greedy sparse recovery lab: OMP / ROMP, isometry constants, bound audits"};
  app.require_subcommand(1);

  std::vector<Command> commands;
  commands.reserve(6);
  auto add = [&](ExperimentKind kind, const std::string& help) -> Command& {
    commands.push_back({kind, app.add_subcommand(std::string(greedylab::to_string(kind)), help), {}});
    Command& c = commands.back();
    add_common(c.app, c.flags);
    return c;
  };

  {
    auto& c = add(ExperimentKind::Recover, "Recover a sparse signal and write its trace as JSON");
    add_matrix(c.app, c.flags);
    add_int(c.app, c.flags, "-k,--sparsity", "k", "Sparsity K");
    add_string(c.app, c.flags, "--values", "values", "gaussian | unit_signs");
    add_string(c.app, c.flags, "--signal-file", "signal_file", "Signal JSON instead of a generator");
    add_string(c.app, c.flags, "--algorithm", "algorithm", "omp | romp");
    add_int(c.app, c.flags, "--max-iterations", "max_iterations", "Iteration cap (default K)");
    add_real(c.app, c.flags, "--residual-tol", "residual_tol", "Relative residual stop");
  }
  {
    auto& c = add(ExperimentKind::Rip, "Restricted isometry constant delta_K");
    add_matrix(c.app, c.flags);
    add_int(c.app, c.flags, "-k,--order", "k", "Order K");
    add_string(c.app, c.flags, "--mode", "mode", "exact | sampled");
    add_unsigned(c.app, c.flags, "--trials", "trials", "Sampled supports");
    add_unsigned(c.app, c.flags, "--budget", "budget", "Enumeration budget for exact mode");
  }
  {
    auto& c = add(ExperimentKind::Coherence, "Mutual coherence of the columns");
    add_matrix(c.app, c.flags);
    add_int(c.app, c.flags, "-k,--sparsity", "k", "Also report mu < 1/(2K-1)");
  }
  {
    auto& c = add(ExperimentKind::Audit, "Randomized audit of the recovery bounds (CSV)");
    add_string(c.app, c.flags, "--lemmas", "lemmas", "Comma list: ip,prip,hbound,linf,prop32,lemma37");
    add_unsigned(c.app, c.flags, "--trials", "trials", "Trials per suite");
    add_real(c.app, c.flags, "--delta", "delta", "Use this delta instead of the exact one");
    add_int(c.app, c.flags, "--max-n", "max_n", "Largest N (<= 16)");
    add_int(c.app, c.flags, "--max-k", "max_k", "Largest sparsity order (<= 4)");
  }
  {
    auto& c = add(ExperimentKind::Phase, "Success-rate sweep over (M, K) (CSV)");
    add_string(c.app, c.flags, "--ensemble", "ensemble",
               "gaussian | bernoulli | identity_perturbed | identity");
    add_real(c.app, c.flags, "--eps", "eps", "Perturbation size for identity_perturbed");
    add_int(c.app, c.flags, "-n,--cols", "n", "Columns N");
    add_string(c.app, c.flags, "--m-range", "m_range", "Rows: a:b[:step] or a,b,c");
    add_string(c.app, c.flags, "--k-range", "k_range", "Sparsities: a:b[:step] or a,b,c");
    add_unsigned(c.app, c.flags, "--trials", "trials", "Trials per cell");
    add_string(c.app, c.flags, "--values", "values", "gaussian | unit_signs");
    add_string(c.app, c.flags, "--algorithm", "algorithm", "omp | romp");
  }
  {
    auto& c = add(ExperimentKind::Counterexample,
                  "Search for (or replay) a K = 2 instance where OMP fails");
    add_unsigned(c.app, c.flags, "--budget", "budget", "Candidate evaluations");
    add_real(c.app, c.flags, "--delta", "delta", "Ceiling on delta_3 (default 1/sqrt(2))");
    add_int(c.app, c.flags, "-m,--rows", "m", "Embedding dimension (>= 3)");
    add_string(c.app, c.flags, "--matrix-file", "matrix_file", "Replay: matrix CSV");
    add_string(c.app, c.flags, "--signal-file", "signal_file", "Replay: signal JSON");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    for (const auto& c : commands) {
      if (!c.app->parsed()) continue;
      const auto spec = greedylab::parse_spec(c.kind, merged_config(c.flags));
      switch (c.kind) {
        case ExperimentKind::Recover: return cmd_recover(spec);
        case ExperimentKind::Rip: return cmd_rip(spec);
        case ExperimentKind::Coherence: return cmd_coherence(spec);
        case ExperimentKind::Audit: return cmd_audit(spec);
        case ExperimentKind::Phase: return cmd_phase(spec);
        case ExperimentKind::Counterexample:
          greedylab::validate_spec(spec);
          return cmd_counterexample(spec);
      }
    }
  } catch (const greedylab::Error& e) {
    std::cerr << "error [" << greedylab::to_string(e.code()) << "]: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
