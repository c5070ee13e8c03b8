#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "tvind/core.hpp"
#include "tvind/coupling.hpp"
#include "tvind/dp.hpp"
#include "tvind/random.hpp"
#include "tvind/replicable.hpp"

namespace tvind {

/// Dual view of a randomized learner: an explicit posterior map plus a seeded
/// execution whose marginal over fresh tapes equals the posterior.
struct SeededRule {
  LearningRule base;
  std::optional<ReferenceMeasure> ref;
  std::function<ItemId(const Dataset&, const Tape&)> execute;
  /// True when execute(S, tape) depends on S only through base.posterior(S);
  /// holds for coupled executions and lets induced-distribution enumeration
  /// cache by posterior.
  bool posterior_determined = false;

  const Hypothesis& hypothesis(ItemId id) const {
    return base.reachable[static_cast<std::size_t>(id)];
  }
};

/// Reinterprets the rule's randomness as a rejection coupling against ref:
/// execute(S, tape) = coupled_sample(posterior(S), ref, tape). The
/// input->output law is unchanged; if the rule is rho-TV indistinguishable
/// the result is 2rho/(1+rho)-replicable. Errors unless ref fully supports
/// the reachable set.
SeededRule derandomize(const LearningRule& rule, const ReferenceMeasure& ref);

struct ReplTvEstimates {
  double repl_disagreement = 0.0;
  double repl_ci = 0.0;
  double expected_tv = 0.0;
  double tv_ci = 0.0;
  /// expected_tv <= repl_disagreement + 3 sigma, the replicability => TV
  /// direction.
  bool consistent = false;
};

/// Monte Carlo check of replicability => TV indistinguishability on paired
/// samples with a shared tape. Requires trials >= 100.
ReplTvEstimates verify_repl_implies_tv(const SeededRule& rule, const FiniteDistribution& examples,
                                       std::size_t n, std::size_t trials, const Tape& tape);

struct GlobalToReplicableResult {
  bool failed = false;  // empty heavy-hitter list; counts against beta'
  ItemId hypothesis = 0;
  double estimated_error = 0.0;
  std::vector<ItemId> list;
};

/// Heavy-hitters over the induced hypothesis distribution at threshold
/// rho_gs/2, error rho_gs/4, confidence beta'/2, replicability rho'/4, then
/// the replicable agnostic learner on the surviving list with
/// (alpha', beta'/2, rho'/2). Output is rho'-replicable and
/// (alpha + alpha', beta')-accurate when the black box is rho_gs-globally
/// stable with an alpha-accurate stable hypothesis.
GlobalToReplicableResult global_to_replicable(ItemSampler& induced_hypotheses,
                                              const HypothesisClass& reachable,
                                              ItemSampler& examples, double rho_gs,
                                              double alpha_prime, double beta_prime,
                                              double rho_prime, const Tape& tape);

struct ListGlobalParams {
  double eta = 0.0;
  double rho = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t list_size = 0;        // L
  double constant_scale = 1.0e6;    // c
};

struct ListGlobalPlan {
  double tau = 0.0;
  double gamma = 0.0;
  std::size_t k1 = 0;
  std::size_t k2 = 0;
};

ListGlobalPlan listglobal_plan(const ListGlobalParams& params);

/// Frequent-hypothesis selection followed by exponential weights: H gathers
/// the hypotheses appearing in at least tau*k1 of k1 list-learner runs, and
/// the returned posterior puts mass proportional to exp(gamma * Qhat(h)) on
/// H, with Qhat estimated over k2 further runs. The learner callable runs one
/// fresh draw-and-learn per invocation on the tape it is handed. Errors when
/// H comes out empty.
FiniteDistribution listglobal_to_tv(const std::function<std::vector<ItemId>(const Tape&)>& learner,
                                    const ListGlobalParams& params, const Tape& tape);

struct TvToDpParams {
  // Declared properties of the input rule.
  double alpha = 0.0;  // in [0, 1/2)
  double beta = 0.0;   // in [0, (1-rho)/(1+rho))
  double rho = 0.0;    // in [0, 1)
  // Targets.
  double alpha_prime = 0.0;
  double beta_prime = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
};

struct TvToDpPlan {
  double rho_prime = 0.0;  // 2 rho / (1 + rho)
  double p = 0.0;          // (1 - beta - rho') / 2
  double q = 0.0;          // (1 - beta - rho') / (1 - beta + rho')
  double eta = 0.0;        // q / k'
  std::size_t k_prime = 0;
  std::size_t k = 0;
  std::size_t samples_per_run = 0;  // k * k' * n once n is attached
};

/// Derives the pipeline constants; callers size the input sample as
/// k * k' * n from this plan.
TvToDpPlan tv_to_dp_plan(const TvToDpParams& params, std::size_t rule_sample_size);

struct TvToDpResult {
  bool failed = false;  // empty pruned list; counts against beta'
  ItemId hypothesis = 0;
  TvToDpPlan plan;
  /// Batch-major coupled outputs, one per (batch j, slot i); exposed so
  /// perturbation tests can check that a single-example swap moves at most
  /// one output in the affected batch.
  std::vector<ItemId> coupled_outputs;
  std::vector<HistogramEntry> released;
  std::vector<ItemId> pruned;
};

/// The TV indistinguishability => approximate DP pipeline: couple the
/// posteriors of each batch through one shared per-batch stream on a
/// data-independent reference, release frequent outputs through the stable
/// histogram at (eps/2, delta), prune below eta/2, and select with the
/// exponential mechanism at (eps/2, 0). Requires |sample| >= k * k' * n and a
/// data-independent reference.
TvToDpResult tv_to_dp(const LearningRule& rule, const Dataset& sample, const TvToDpParams& params,
                      const ReferenceMeasure& ref, const Tape& tape);

}  // namespace tvind
