#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tvind/core.hpp"
#include "tvind/random.hpp"
#include "tvind/transforms.hpp"

namespace tvind {

/// Point estimate with a 3-sigma half-width. Exact computations carry ci 0.
struct Estimate {
  double value = 0.0;
  double ci = 0.0;
};

Estimate binomial_estimate(std::size_t successes, std::size_t trials);
Estimate mean_estimate(const std::vector<double>& values);

struct DatasetEnumeration {
  std::vector<Dataset> datasets;
  std::vector<double> weights;
};

/// All datasets of size n over the support of `examples` with their product
/// weights, or nullopt when the count exceeds max_datasets.
std::optional<DatasetEnumeration> enumerate_datasets(const FiniteDistribution& examples,
                                                     std::size_t n,
                                                     std::size_t max_datasets = 4096);

/// Fraction of paired runs (fresh S, S'; shared per-trial tape) returning
/// exactly equal outputs. Requires trials >= 100.
Estimate replicability_rate(const SeededRule& rule, const FiniteDistribution& examples,
                            std::size_t n, std::size_t trials, const Tape& tape);

/// Mean tv distance between posteriors on independent samples. Switches to
/// exact enumeration when the dataset pair space fits the term budget.
Estimate expected_tv_indistinguishability(const LearningRule& rule,
                                          const FiniteDistribution& examples, std::size_t n,
                                          std::size_t trials, const Tape& tape);

struct FixedPriorResult {
  FiniteDistribution prior;  // mean posterior over S
  Estimate distance;         // E tv(A(S), prior)
};

FixedPriorResult fixed_prior_tv(const LearningRule& rule, const FiniteDistribution& examples,
                                std::size_t n, std::size_t trials, const Tape& tape);

struct GlobalStabilityResult {
  ItemId hypothesis = 0;  // modal output
  Estimate frequency;
  /// Collision rate of two fully independent executions; it lower-bounds the
  /// maximum point mass, so `consistent` checks frequency >= collision - CI.
  Estimate collision;
  bool consistent = false;
};

/// Modal output hypothesis and its frequency over fresh (S, tape) pairs.
/// Requires trials >= 100.
GlobalStabilityResult global_stability_parameter(const SeededRule& rule,
                                                 const FiniteDistribution& examples, std::size_t n,
                                                 std::size_t trials, const Tape& tape);

struct GeneralizationCheck {
  bool pass = false;
  double bound = 0.0;            // sqrt(log(2/delta)/(2n)) + sqrt(rho)
  double rate_threshold = 0.0;   // delta + 4 sqrt(rho) + 3 sigma
  Estimate exceedance;           // fraction of trials over the bound
};

/// Verifies the generalization proposition: the posterior-averaged gap
/// |E L(h) - E Lhat(h)| exceeds the bound in at most delta + 4 sqrt(rho) of
/// trials (plus the Monte Carlo margin).
GeneralizationCheck generalization_gap_check(const LearningRule& rule,
                                             const FiniteDistribution& examples, std::size_t n,
                                             double delta, double rho, std::size_t trials,
                                             const Tape& tape);

/// Exact output law over fresh (S, randomness) pairs: the posterior mixture
/// across the enumerated dataset space, or nullopt when not enumerable.
std::optional<FiniteDistribution> exact_output_distribution(const LearningRule& rule,
                                                            const FiniteDistribution& examples,
                                                            std::size_t n,
                                                            std::size_t max_datasets = 4096);

/// Exact law of execute(S, shared_tape) over S by dataset enumeration, with
/// posterior-keyed caching for posterior-determined rules; nullopt when the
/// dataset space exceeds max_datasets.
std::optional<FiniteDistribution> exact_induced_distribution(const SeededRule& rule,
                                                             const FiniteDistribution& examples,
                                                             std::size_t n,
                                                             const Tape& shared_tape,
                                                             std::size_t max_datasets = 4096);

/// Law of execute(S, shared_tape) over S: exact when enumerable, otherwise
/// Monte Carlo over mc_trials draws from data_tape.
FiniteDistribution induced_hypothesis_distribution(const SeededRule& rule,
                                                   const FiniteDistribution& examples,
                                                   std::size_t n, const Tape& shared_tape,
                                                   std::size_t mc_trials, const Tape& data_tape);

struct StabilityReport {
  Estimate replicability;
  Estimate expected_tv;
  Estimate fixed_prior;
  double alpha_level = 0.0;
  Estimate beta_rate;  // Pr[posterior loss > alpha_level]
  std::size_t trials = 0;
  std::size_t sample_size = 0;
  std::string seed_hex;
};

/// Full audit of one seeded rule: replicability, expected and fixed-prior TV,
/// and the accuracy tail at alpha_level.
StabilityReport audit_rule(const SeededRule& rule, const FiniteDistribution& examples,
                           std::size_t n, double alpha_level, std::size_t trials, const Seed& seed);

}  // namespace tvind
