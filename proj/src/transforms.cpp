#include "tvind/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "tvind/metrics.hpp"

namespace tvind {

SeededRule derandomize(const LearningRule& rule, const ReferenceMeasure& ref) {
  for (std::size_t i = 0; i < rule.reachable.size(); ++i) {
    if (ref.dist.mass_of(static_cast<ItemId>(i)) <= 0.0) {
      throw std::invalid_argument(
          "derandomize: reference does not dominate the reachable set (index " +
          std::to_string(i) + ")");
    }
  }
  SeededRule out;
  out.base = rule;
  out.ref = ref;
  out.posterior_determined = true;
  const auto posterior = rule.posterior;
  const auto reference = ref;
  out.execute = [posterior, reference](const Dataset& sample, const Tape& tape) {
    return coupled_sample(posterior(sample), reference, tape);
  };
  return out;
}

ReplTvEstimates verify_repl_implies_tv(const SeededRule& rule, const FiniteDistribution& examples,
                                       std::size_t n, std::size_t trials, const Tape& tape) {
  if (trials < 100) throw std::invalid_argument("verify_repl_implies_tv: trials < 100");
  const Tape data_root = tape.derive("data");
  const Tape shared_root = tape.derive("shared");
  std::size_t disagreements = 0;
  std::vector<double> tvs;
  tvs.reserve(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    TapeCursor data(data_root.derive(i));
    const Dataset s = draw_dataset(examples, n, data);
    const Dataset s2 = draw_dataset(examples, n, data);
    const Tape shared = shared_root.derive(i);
    disagreements += rule.execute(s, shared) != rule.execute(s2, shared);
    tvs.push_back(tv_distance(rule.base.posterior(s), rule.base.posterior(s2)));
  }
  const Estimate repl = binomial_estimate(disagreements, trials);
  const Estimate tv = mean_estimate(tvs);
  ReplTvEstimates out;
  out.repl_disagreement = repl.value;
  out.repl_ci = repl.ci;
  out.expected_tv = tv.value;
  out.tv_ci = tv.ci;
  out.consistent = tv.value <= repl.value + repl.ci + tv.ci;
  return out;
}

GlobalToReplicableResult global_to_replicable(ItemSampler& induced_hypotheses,
                                              const HypothesisClass& reachable,
                                              ItemSampler& examples, double rho_gs,
                                              double alpha_prime, double beta_prime,
                                              double rho_prime, const Tape& tape) {
  HhParams hh;
  hh.threshold = rho_gs / 2.0;
  hh.error = rho_gs / 4.0;
  hh.confidence = beta_prime / 2.0;
  hh.replicability = rho_prime / 4.0;
  const auto list = replicable_heavy_hitters(induced_hypotheses, hh, tape.derive("g2r-hh"));

  GlobalToReplicableResult out;
  out.list = list;
  if (list.empty()) {
    out.failed = true;
    return out;
  }
  std::vector<std::size_t> indices;
  indices.reserve(list.size());
  for (ItemId id : list) indices.push_back(static_cast<std::size_t>(id));
  const auto sub = reachable.subclass(indices);
  const auto picked = replicable_agnostic_learner(sub, examples, alpha_prime, beta_prime / 2.0,
                                                  rho_prime / 2.0, tape.derive("g2r-agn"));
  out.hypothesis = list[picked.index];
  out.estimated_error = picked.estimated_error;
  return out;
}

ListGlobalPlan listglobal_plan(const ListGlobalParams& params) {
  if (!(params.eta > 0 && params.eta <= 1) || !(params.rho > 0 && params.rho < 1) ||
      params.list_size == 0 || !(params.constant_scale > 0)) {
    throw std::invalid_argument("listglobal_plan: parameters out of range");
  }
  ListGlobalPlan plan;
  plan.tau = 0.5 * params.eta;
  const double lg =
      std::log(static_cast<double>(params.list_size) / (params.rho * plan.tau));
  const double c = params.constant_scale;
  plan.gamma = c * lg / plan.tau;
  plan.k1 = static_cast<std::size_t>(std::ceil(c * lg / (plan.tau * plan.tau)));
  plan.k2 = static_cast<std::size_t>(
      std::ceil(c * plan.gamma * plan.gamma * lg / (params.rho * params.rho)));
  return plan;
}

FiniteDistribution listglobal_to_tv(const std::function<std::vector<ItemId>(const Tape&)>& learner,
                                    const ListGlobalParams& params, const Tape& tape) {
  const ListGlobalPlan plan = listglobal_plan(params);

  std::map<ItemId, std::size_t> appearances;
  const Tape phase1 = tape.derive("lg-freq");
  for (std::size_t i = 0; i < plan.k1; ++i) {
    for (ItemId h : learner(phase1.derive(i))) ++appearances[h];
  }
  const double cutoff = plan.tau * static_cast<double>(plan.k1) - 1e-9;
  std::vector<ItemId> frequent;
  for (const auto& [id, count] : appearances) {
    if (static_cast<double>(count) >= cutoff) frequent.push_back(id);
  }
  if (frequent.empty()) {
    throw std::runtime_error(
        "listglobal_to_tv: no hypothesis reached frequency tau*k1; eta precondition violated at "
        "this scale");
  }

  std::map<ItemId, std::size_t> hits;
  const Tape phase2 = tape.derive("lg-weight");
  for (std::size_t j = 0; j < plan.k2; ++j) {
    const auto out = learner(phase2.derive(j));
    for (ItemId h : frequent) {
      if (std::find(out.begin(), out.end(), h) != out.end()) ++hits[h];
    }
  }

  double max_q = 0.0;
  std::vector<double> q(frequent.size(), 0.0);
  for (std::size_t i = 0; i < frequent.size(); ++i) {
    q[i] = static_cast<double>(hits[frequent[i]]) / static_cast<double>(plan.k2);
    max_q = std::max(max_q, q[i]);
  }
  std::vector<double> mass(frequent.size());
  double total = 0.0;
  for (std::size_t i = 0; i < frequent.size(); ++i) {
    mass[i] = std::exp(plan.gamma * (q[i] - max_q));
    total += mass[i];
  }
  for (double& m : mass) m /= total;
  return FiniteDistribution(std::move(frequent), std::move(mass));
}

TvToDpPlan tv_to_dp_plan(const TvToDpParams& params, std::size_t rule_sample_size) {
  const double rho = params.rho;
  if (!(rho >= 0 && rho < 1)) throw std::invalid_argument("tv_to_dp: rho outside [0,1)");
  if (!(params.alpha >= 0 && params.alpha < 0.5)) {
    throw std::invalid_argument("tv_to_dp: alpha outside [0,1/2)");
  }
  const double beta_cap = (1.0 - rho) / (1.0 + rho);
  if (!(params.beta >= 0 && params.beta < beta_cap)) {
    throw std::invalid_argument("tv_to_dp: beta outside [0, (1-rho)/(1+rho))");
  }
  for (double x : {params.alpha_prime, params.beta_prime, params.delta}) {
    if (!(x > 0 && x < 1)) throw std::invalid_argument("tv_to_dp: target parameter outside (0,1)");
  }
  if (!(params.epsilon > 0)) throw std::invalid_argument("tv_to_dp: epsilon must be positive");

  TvToDpPlan plan;
  plan.rho_prime = 2.0 * rho / (1.0 + rho);
  plan.p = (1.0 - params.beta - plan.rho_prime) / 2.0;
  plan.q = (1.0 - params.beta - plan.rho_prime) / (1.0 - params.beta + plan.rho_prime);
  plan.k_prime =
      static_cast<std::size_t>(std::ceil(std::log(3.0 / params.beta_prime) / plan.p));
  plan.eta = plan.q / static_cast<double>(plan.k_prime);
  const double k_spec =
      4.0 *
      std::log(std::log(1.0 / params.beta_prime) /
               (plan.q * plan.p * params.beta_prime * params.delta)) /
      (plan.q * params.epsilon);
  // The stable histogram call must also be valid at its own parameters
  // (eta, beta'/3, eps/2, delta); grow k until k*k' clears that bound.
  const std::size_t hist_n = stable_histogram_required_n(plan.eta, params.beta_prime / 3.0,
                                                         params.epsilon / 2.0, params.delta);
  const auto k_hist = static_cast<double>((hist_n + plan.k_prime - 1) / plan.k_prime);
  plan.k = static_cast<std::size_t>(std::max(1.0, std::max(std::ceil(k_spec), k_hist)));
  plan.samples_per_run = plan.k * plan.k_prime * rule_sample_size;
  return plan;
}

TvToDpResult tv_to_dp(const LearningRule& rule, const Dataset& sample, const TvToDpParams& params,
                      const ReferenceMeasure& ref, const Tape& tape) {
  if (!ref.data_independent) {
    throw std::invalid_argument("tv_to_dp: reference measure must be data-independent");
  }
  const TvToDpPlan plan = tv_to_dp_plan(params, rule.sample_size);
  if (sample.size() < plan.samples_per_run) {
    throw std::invalid_argument("tv_to_dp: |S| = " + std::to_string(sample.size()) +
                                " below k*k'*n = " + std::to_string(plan.samples_per_run));
  }

  TvToDpResult out;
  out.plan = plan;
  const std::size_t n = rule.sample_size;
  const Tape batch_root = tape.derive("batch");
  for (std::size_t j = 0; j < plan.k_prime; ++j) {
    PoissonStripStream stream(batch_root.derive(j), ref.dist);
    for (std::size_t i = 0; i < plan.k; ++i) {
      const std::size_t offset = (j * plan.k + i) * n;
      const Dataset slice(sample.begin() + static_cast<std::ptrdiff_t>(offset),
                          sample.begin() + static_cast<std::ptrdiff_t>(offset + n));
      out.coupled_outputs.push_back(coupled_sample(rule.posterior(slice), stream));
    }
  }

  out.released = stable_histogram(out.coupled_outputs, plan.eta, params.beta_prime / 3.0,
                                  params.epsilon / 2.0, params.delta, tape.derive("pipeline"));
  for (const auto& entry : out.released) {
    if (entry.estimate >= plan.eta / 2.0) out.pruned.push_back(entry.item);
  }
  if (out.pruned.empty()) {
    out.failed = true;
    return out;
  }

  std::vector<std::size_t> indices;
  indices.reserve(out.pruned.size());
  for (ItemId id : out.pruned) indices.push_back(static_cast<std::size_t>(id));
  const auto sub = rule.reachable.subclass(indices);
  const Dataset used(sample.begin(),
                     sample.begin() + static_cast<std::ptrdiff_t>(plan.samples_per_run));
  const std::size_t idx =
      exp_mechanism_learner(sub, used, params.alpha_prime / 2.0, params.beta_prime / 3.0,
                            params.epsilon / 2.0, tape.derive("pipeline-select"));
  out.hypothesis = out.pruned[idx];
  return out;
}

}  // namespace tvind
