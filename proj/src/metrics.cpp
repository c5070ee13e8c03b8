#include "tvind/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <stdexcept>

namespace tvind {

namespace {

constexpr std::size_t kExactPairBudgetDatasets = 1000;  // 10^6 weighted pair terms

std::string posterior_key(const FiniteDistribution& dist) {
  std::string key;
  key.reserve(dist.size() * 16);
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const ItemId id = dist.support()[i];
    const double m = dist.mass()[i];
    char buf[16];
    std::memcpy(buf, &id, 8);
    std::memcpy(buf + 8, &m, 8);
    key.append(buf, 16);
  }
  return key;
}

FiniteDistribution distribution_from_weights(std::map<ItemId, double> weights) {
  std::vector<ItemId> support;
  std::vector<double> mass;
  double total = 0.0;
  for (const auto& [id, w] : weights) total += w;
  for (const auto& [id, w] : weights) {
    support.push_back(id);
    mass.push_back(w / total);
  }
  return FiniteDistribution(std::move(support), std::move(mass));
}

}  // namespace

Estimate binomial_estimate(std::size_t successes, std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("binomial_estimate: zero trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  // Agresti-Coull variance keeps the width positive at the boundaries.
  const double p_tilde = (static_cast<double>(successes) + 1.0) / (n + 2.0);
  return Estimate{p, 3.0 * std::sqrt(p_tilde * (1.0 - p_tilde) / n)};
}

Estimate mean_estimate(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("mean_estimate: no values");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= std::max(1.0, n - 1.0);
  return Estimate{mean, 3.0 * std::sqrt(var / n)};
}

std::optional<DatasetEnumeration> enumerate_datasets(const FiniteDistribution& examples,
                                                     std::size_t n, std::size_t max_datasets) {
  const auto trimmed = examples.trimmed();
  const std::size_t s = trimmed.size();
  double count = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    count *= static_cast<double>(s);
    if (count > static_cast<double>(max_datasets)) return std::nullopt;
  }
  DatasetEnumeration out;
  const auto total = static_cast<std::size_t>(count);
  out.datasets.reserve(total);
  out.weights.reserve(total);
  std::vector<std::size_t> digits(n, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    Dataset d;
    d.reserve(n);
    double w = 1.0;
    for (std::size_t pos = 0; pos < n; ++pos) {
      const std::size_t pick = digits[pos];
      d.push_back(example_of(trimmed.support()[pick]));
      w *= trimmed.mass()[pick];
    }
    out.datasets.push_back(std::move(d));
    out.weights.push_back(w);
    for (std::size_t pos = 0; pos < n; ++pos) {
      if (++digits[pos] < s) break;
      digits[pos] = 0;
    }
  }
  return out;
}

Estimate replicability_rate(const SeededRule& rule, const FiniteDistribution& examples,
                            std::size_t n, std::size_t trials, const Tape& tape) {
  if (trials < 100) throw std::invalid_argument("replicability_rate: trials < 100");
  const Tape data_root = tape.derive("repl-data");
  const Tape shared_root = tape.derive("repl-shared");
  std::size_t equal = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    TapeCursor data(data_root.derive(i));
    const Dataset s = draw_dataset(examples, n, data);
    const Dataset s2 = draw_dataset(examples, n, data);
    const Tape shared = shared_root.derive(i);
    equal += rule.execute(s, shared) == rule.execute(s2, shared);
  }
  return binomial_estimate(equal, trials);
}

Estimate expected_tv_indistinguishability(const LearningRule& rule,
                                          const FiniteDistribution& examples, std::size_t n,
                                          std::size_t trials, const Tape& tape) {
  if (const auto enumeration = enumerate_datasets(examples, n, kExactPairBudgetDatasets)) {
    std::vector<FiniteDistribution> posteriors;
    posteriors.reserve(enumeration->datasets.size());
    for (const auto& d : enumeration->datasets) posteriors.push_back(rule.posterior(d));
    double acc = 0.0;
    for (std::size_t a = 0; a < posteriors.size(); ++a) {
      for (std::size_t b = 0; b < posteriors.size(); ++b) {
        acc += enumeration->weights[a] * enumeration->weights[b] *
               tv_distance(posteriors[a], posteriors[b]);
      }
    }
    return Estimate{acc, 0.0};
  }
  TapeCursor data(tape.derive("etv-data"));
  std::vector<double> tvs;
  tvs.reserve(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    const Dataset s = draw_dataset(examples, n, data);
    const Dataset s2 = draw_dataset(examples, n, data);
    tvs.push_back(tv_distance(rule.posterior(s), rule.posterior(s2)));
  }
  return mean_estimate(tvs);
}

FixedPriorResult fixed_prior_tv(const LearningRule& rule, const FiniteDistribution& examples,
                                std::size_t n, std::size_t trials, const Tape& tape) {
  std::vector<FiniteDistribution> posteriors;
  std::vector<double> weights;
  bool exact = false;
  if (const auto enumeration = enumerate_datasets(examples, n, kExactPairBudgetDatasets)) {
    exact = true;
    for (const auto& d : enumeration->datasets) posteriors.push_back(rule.posterior(d));
    weights = enumeration->weights;
  } else {
    TapeCursor data(tape.derive("prior-data"));
    posteriors.reserve(trials);
    for (std::size_t i = 0; i < trials; ++i) {
      posteriors.push_back(rule.posterior(draw_dataset(examples, n, data)));
    }
    weights.assign(trials, 1.0 / static_cast<double>(trials));
  }

  FixedPriorResult out;
  out.prior = posterior_mixture(posteriors, weights);
  if (exact) {
    double acc = 0.0;
    for (std::size_t i = 0; i < posteriors.size(); ++i) {
      acc += weights[i] * tv_distance(posteriors[i], out.prior);
    }
    out.distance = Estimate{acc, 0.0};
  } else {
    std::vector<double> tvs;
    tvs.reserve(posteriors.size());
    for (const auto& p : posteriors) tvs.push_back(tv_distance(p, out.prior));
    out.distance = mean_estimate(tvs);
  }
  return out;
}

GlobalStabilityResult global_stability_parameter(const SeededRule& rule,
                                                 const FiniteDistribution& examples, std::size_t n,
                                                 std::size_t trials, const Tape& tape) {
  if (trials < 100) throw std::invalid_argument("global_stability_parameter: trials < 100");
  const Tape data_root = tape.derive("gsp-data");
  const Tape run_root = tape.derive("gsp-run");
  std::map<ItemId, std::size_t> counts;
  std::size_t collisions = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    TapeCursor data(data_root.derive(i));
    const Dataset s = draw_dataset(examples, n, data);
    const Dataset s2 = draw_dataset(examples, n, data);
    const ItemId first = rule.execute(s, run_root.derive(2 * i));
    const ItemId second = rule.execute(s2, run_root.derive(2 * i + 1));
    ++counts[first];
    collisions += first == second;
  }
  GlobalStabilityResult out;
  std::size_t best = 0;
  for (const auto& [id, c] : counts) {
    if (c > best) {
      best = c;
      out.hypothesis = id;
    }
  }
  out.frequency = binomial_estimate(best, trials);
  out.collision = binomial_estimate(collisions, trials);
  // Collision probability of independent runs is sum of squared masses, which
  // the maximum point mass dominates.
  out.consistent = out.frequency.value >= out.collision.value - out.frequency.ci - out.collision.ci;
  return out;
}

GeneralizationCheck generalization_gap_check(const LearningRule& rule,
                                             const FiniteDistribution& examples, std::size_t n,
                                             double delta, double rho, std::size_t trials,
                                             const Tape& tape) {
  GeneralizationCheck out;
  out.bound = std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n))) + std::sqrt(rho);
  TapeCursor data(tape.derive("gen-data"));
  std::size_t exceed = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    const Dataset s = draw_dataset(examples, n, data);
    const auto posterior = rule.posterior(s);
    double pop = 0.0, emp = 0.0;
    for (std::size_t j = 0; j < posterior.size(); ++j) {
      const double w = posterior.mass()[j];
      if (w == 0.0) continue;
      const auto& h = rule.reachable[static_cast<std::size_t>(posterior.support()[j])];
      pop += w * population_loss(h, examples);
      emp += w * empirical_loss(h, s);
    }
    exceed += std::abs(pop - emp) > out.bound;
  }
  out.exceedance = binomial_estimate(exceed, trials);
  out.rate_threshold = delta + 4.0 * std::sqrt(rho) + out.exceedance.ci;
  out.pass = out.exceedance.value <= out.rate_threshold;
  return out;
}

std::optional<FiniteDistribution> exact_output_distribution(const LearningRule& rule,
                                                            const FiniteDistribution& examples,
                                                            std::size_t n,
                                                            std::size_t max_datasets) {
  const auto enumeration = enumerate_datasets(examples, n, max_datasets);
  if (!enumeration) return std::nullopt;
  std::vector<FiniteDistribution> posteriors;
  posteriors.reserve(enumeration->datasets.size());
  for (const auto& d : enumeration->datasets) posteriors.push_back(rule.posterior(d));
  return posterior_mixture(posteriors, enumeration->weights);
}

std::optional<FiniteDistribution> exact_induced_distribution(const SeededRule& rule,
                                                             const FiniteDistribution& examples,
                                                             std::size_t n,
                                                             const Tape& shared_tape,
                                                             std::size_t max_datasets) {
  const auto enumeration = enumerate_datasets(examples, n, max_datasets);
  if (!enumeration) return std::nullopt;
  std::map<ItemId, double> weights;
  std::map<std::string, ItemId> cache;
  for (std::size_t i = 0; i < enumeration->datasets.size(); ++i) {
    const Dataset& s = enumeration->datasets[i];
    ItemId out;
    if (rule.posterior_determined) {
      const std::string key = posterior_key(rule.base.posterior(s));
      const auto it = cache.find(key);
      if (it != cache.end()) {
        out = it->second;
      } else {
        out = rule.execute(s, shared_tape);
        cache.emplace(key, out);
      }
    } else {
      out = rule.execute(s, shared_tape);
    }
    weights[out] += enumeration->weights[i];
  }
  return distribution_from_weights(std::move(weights));
}

FiniteDistribution induced_hypothesis_distribution(const SeededRule& rule,
                                                   const FiniteDistribution& examples,
                                                   std::size_t n, const Tape& shared_tape,
                                                   std::size_t mc_trials, const Tape& data_tape) {
  if (auto exact = exact_induced_distribution(rule, examples, n, shared_tape)) {
    return *std::move(exact);
  }
  std::map<ItemId, double> weights;
  TapeCursor data(data_tape);
  for (std::size_t i = 0; i < mc_trials; ++i) {
    weights[rule.execute(draw_dataset(examples, n, data), shared_tape)] += 1.0;
  }
  return distribution_from_weights(std::move(weights));
}

StabilityReport audit_rule(const SeededRule& rule, const FiniteDistribution& examples,
                           std::size_t n, double alpha_level, std::size_t trials,
                           const Seed& seed) {
  const Tape tape = Tape(seed).derive("audit");
  StabilityReport report;
  report.trials = trials;
  report.sample_size = n;
  report.seed_hex = seed.to_hex();
  report.alpha_level = alpha_level;
  report.replicability = replicability_rate(rule, examples, n, trials, tape.derive("repl"));
  report.expected_tv =
      expected_tv_indistinguishability(rule.base, examples, n, trials, tape.derive("etv"));
  report.fixed_prior = fixed_prior_tv(rule.base, examples, n, trials, tape.derive("prior")).distance;

  TapeCursor data(tape.derive("acc-data"));
  std::size_t bad = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    const Dataset s = draw_dataset(examples, n, data);
    bad += posterior_loss(rule.base.posterior(s), rule.base.reachable, examples) >
           alpha_level + 1e-12;
  }
  report.beta_rate = binomial_estimate(bad, trials);
  return report;
}

}  // namespace tvind
