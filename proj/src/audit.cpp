#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "greedylab/lab.hpp"
#include "greedylab/random.hpp"

namespace greedylab {

std::size_t AuditResult::violations() const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(),
                                                [](const BoundCheck& c) { return !c.satisfied; }));
}

const std::vector<std::string>& audit_suite_names() {
  static const std::vector<std::string> names = {"ip", "prip", "hbound", "linf", "prop32",
                                                 "lemma37"};
  return names;
}

namespace {

Index uniform_index(Rng& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

/// Random k-subset of {0..n-1}, ascending.
IndexSet random_subset(Rng& rng, Index n, Index k) {
  IndexSet all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Index{0});
  IndexSet out;
  std::sample(all.begin(), all.end(), std::back_inserter(out), k, rng);
  return out;
}

/// Values with magnitudes spread over several decades and random signs.
std::vector<double> random_values(Rng& rng, std::size_t count) {
  std::normal_distribution<double> log_mag(0.0, 1.5);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> v(count);
  for (auto& x : v) x = (coin(rng) ? 1.0 : -1.0) * std::exp(log_mag(rng));
  return v;
}

SparseSignal random_signal_on(Rng& rng, Index n, IndexSet support) {
  auto values = random_values(rng, support.size());
  return SparseSignal(n, std::move(support), std::move(values));
}

/// Mix of short-fat Gaussian/Bernoulli and near-orthonormal square matrices,
/// all with at least `min_rows` rows.
DenseMatrix audit_matrix(Rng& rng, Index n, Index min_rows) {
  const std::uint64_t seed = rng();
  switch (uniform_index(rng, 0, 2)) {
    case 0:
      return gen_matrix(ensemble::Gaussian{}, uniform_index(rng, std::max(min_rows, n / 2), 2 * n),
                        n, seed);
    case 1:
      return gen_matrix(ensemble::Bernoulli{},
                        uniform_index(rng, std::max(min_rows, n / 2), 2 * n), n, seed);
    default: {
      const double eps = std::uniform_real_distribution<double>(0.0, 0.3)(rng);
      return gen_matrix(ensemble::IdentityPerturbed{eps}, n, n, seed);
    }
  }
}

/// Exact isometry constants per order for one matrix, computed on demand.
class DeltaCache {
 public:
  DeltaCache(const DenseMatrix& phi, std::optional<double> override)
      : phi_(phi), override_(override) {}

  double operator()(Index order) {
    if (override_) return *override_;
    auto it = cache_.find(order);
    if (it == cache_.end()) it = cache_.emplace(order, rip_exact(phi_, order).delta).first;
    return it->second;
  }

 private:
  const DenseMatrix& phi_;
  std::optional<double> override_;
  std::map<Index, double> cache_;
};

struct Instance {
  DenseMatrix phi;
  std::uint64_t seed;
};

/// A matrix whose exact delta at `order` is below 1, drawn from the trial's
/// stream. Needed where the bound involves delta / (1 - delta).
Instance contractive_matrix(Rng& rng, Index n, Index min_rows, Index order,
                            const std::optional<double>& override) {
  for (int attempt = 0;; ++attempt) {
    const std::uint64_t seed = rng();
    Rng local = make_rng(seed);
    DenseMatrix phi = audit_matrix(local, n, min_rows);
    if (override || attempt >= 200 || rip_exact(phi, order).delta < 1.0) {
      return {std::move(phi), seed};
    }
  }
}

void tag(std::vector<BoundCheck>& checks, std::uint64_t seed) {
  for (auto& c : checks) c.context.seed = seed;
}

std::vector<BoundCheck> ip_trial(Rng& rng, const AuditOptions& o) {
  const Index n = uniform_index(rng, 4, o.max_n);
  const std::uint64_t seed = rng();
  Rng local = make_rng(seed);
  const DenseMatrix psi = audit_matrix(local, n, o.max_k);
  const Index t = uniform_index(rng, 1, o.max_k);
  const IndexSet pool = random_subset(rng, n, t);
  const IndexSet su = random_subset(rng, t, uniform_index(rng, 1, t));
  const IndexSet sv = random_subset(rng, t, uniform_index(rng, 1, t));
  IndexSet u_support, v_support;
  for (Index i : su) u_support.push_back(pool[static_cast<std::size_t>(i)]);
  for (Index i : sv) v_support.push_back(pool[static_cast<std::size_t>(i)]);
  const SparseSignal u = random_signal_on(rng, n, u_support);
  const SparseSignal v = random_signal_on(rng, n, v_support);
  DeltaCache delta(psi, o.delta_override);
  std::vector<BoundCheck> out{check_inner_product_lemma(psi, u, v, delta(inner_product_order(u, v)))};
  tag(out, seed);
  return out;
}

std::vector<BoundCheck> prip_trial(Rng& rng, const AuditOptions& o) {
  const Index n = uniform_index(rng, 4, o.max_n);
  const Index k = uniform_index(rng, 1, o.max_k);
  auto [phi, seed] = contractive_matrix(rng, n, o.max_k, k, o.delta_override);
  const Index lambda_size = uniform_index(rng, 0, k - 1);
  const Index u_size = uniform_index(rng, 1, k - lambda_size);
  const IndexSet pool = random_subset(rng, n, lambda_size + u_size);
  IndexSet shuffled = pool;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  IndexSet lambda(shuffled.begin(), shuffled.begin() + lambda_size);
  IndexSet u_support(shuffled.begin() + lambda_size, shuffled.end());
  std::sort(lambda.begin(), lambda.end());
  std::sort(u_support.begin(), u_support.end());
  const SparseSignal u = random_signal_on(rng, n, u_support);
  DeltaCache delta(phi, o.delta_override);
  std::vector<BoundCheck> out{check_modified_rip(phi, lambda, u, k, delta(k))};
  tag(out, seed);
  return out;
}

std::vector<BoundCheck> hbound_trial(Rng& rng, const AuditOptions& o) {
  const Index n = uniform_index(rng, 4, o.max_n);
  const Index s = uniform_index(rng, 1, o.max_k - 1);
  const Index lambda_size = uniform_index(rng, 0, o.max_k - 1 - s);
  const Index order = s + lambda_size + 1;
  auto [phi, seed] = contractive_matrix(rng, n, o.max_k, order, o.delta_override);
  IndexSet shuffled = random_subset(rng, n, s + lambda_size);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  IndexSet lambda(shuffled.begin(), shuffled.begin() + lambda_size);
  IndexSet support(shuffled.begin() + lambda_size, shuffled.end());
  std::sort(lambda.begin(), lambda.end());
  std::sort(support.begin(), support.end());
  const SparseSignal x_tilde = random_signal_on(rng, n, support);
  DeltaCache delta(phi, o.delta_override);
  auto out = check_h_bound(phi, lambda, x_tilde, delta(order));
  tag(out, seed);
  return out;
}

std::vector<BoundCheck> linf_trial(Rng& rng, const AuditOptions& o) {
  const Index n = uniform_index(rng, 1, o.max_n);
  const std::uint64_t seed = rng();
  Rng local = make_rng(seed);
  const IndexSet support = random_subset(local, n, uniform_index(local, 1, n));
  const auto values = random_values(local, support.size());
  Vector u = Vector::Zero(n);
  for (std::size_t i = 0; i < support.size(); ++i) u(support[i]) = values[i];
  std::vector<BoundCheck> out{infinity_norm_floor(u)};
  tag(out, seed);
  return out;
}

std::vector<BoundCheck> prop32_trial(Rng& rng, const AuditOptions& o) {
  const Index n = uniform_index(rng, 4, o.max_n);
  const std::uint64_t seed = rng();
  Rng local = make_rng(seed);
  const DenseMatrix psi = audit_matrix(local, n, o.max_k);
  const Index t = uniform_index(rng, 1, o.max_k);
  const IndexSet pool = random_subset(rng, n, t);
  IndexSet support, gamma;
  for (Index i : random_subset(rng, t, uniform_index(rng, 1, t))) {
    support.push_back(pool[static_cast<std::size_t>(i)]);
  }
  for (Index i : random_subset(rng, t, uniform_index(rng, 1, t))) {
    gamma.push_back(pool[static_cast<std::size_t>(i)]);
  }
  IndexSet both;
  std::set_union(support.begin(), support.end(), gamma.begin(), gamma.end(),
                 std::back_inserter(both));
  const SparseSignal x = random_signal_on(rng, n, support);
  DeltaCache delta(psi, o.delta_override);
  std::vector<BoundCheck> out{
      check_prop32(psi, x, gamma, delta(static_cast<Index>(both.size())))};
  tag(out, seed);
  return out;
}

std::vector<BoundCheck> lemma37_trial(Rng& rng, const AuditOptions&) {
  const std::uint64_t seed = rng();
  Rng local = make_rng(seed);
  const Index k = uniform_index(local, 2, 64);
  const auto values = random_values(local, static_cast<std::size_t>(k));
  const Vector u = Eigen::Map<const Vector>(values.data(), k);
  std::vector<BoundCheck> out{check_lemma37(u).second};
  tag(out, seed);
  return out;
}

}  // namespace

AuditResult run_audit_suite(std::string_view suite, const AuditOptions& options) {
  if (options.trials < 1) throw Error(ErrorCode::InvalidArgument, "field 'trials': must be >= 1");
  if (options.max_n < 4 || options.max_k < 2 || options.max_k > options.max_n) {
    throw Error(ErrorCode::InvalidArgument, "audit needs max_n >= 4 and 2 <= max_k <= max_n");
  }
  using Trial = std::vector<BoundCheck> (*)(Rng&, const AuditOptions&);
  static const std::map<std::string, Trial, std::less<>> trials = {
      {"ip", ip_trial},         {"prip", prip_trial},     {"hbound", hbound_trial},
      {"linf", linf_trial},     {"prop32", prop32_trial}, {"lemma37", lemma37_trial}};
  const auto it = trials.find(suite);
  if (it == trials.end()) {
    throw Error(ErrorCode::InvalidArgument, "unknown lemma suite '" + std::string(suite) + "'");
  }
  const auto suite_id = static_cast<std::uint64_t>(
      std::distance(audit_suite_names().begin(),
                    std::find(audit_suite_names().begin(), audit_suite_names().end(), suite)));

  AuditResult result;
  result.suite = std::string(suite);
  for (std::uint64_t t = 0; t < options.trials; ++t) {
    Rng rng = make_rng(options.seed, {suite_id, t});
    auto checks = it->second(rng, options);
    for (auto& c : checks) {
      c.context.note += c.context.note.empty() ? "" : " ";
      c.context.note += "trial=" + std::to_string(t);
    }
    result.checks.insert(result.checks.end(), std::make_move_iterator(checks.begin()),
                         std::make_move_iterator(checks.end()));
  }
  return result;
}

}  // namespace greedylab
