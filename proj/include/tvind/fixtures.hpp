#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tvind/core.hpp"
#include "tvind/random.hpp"
#include "tvind/transforms.hpp"

namespace tvind {

/// Synthetic learners standing in for the black boxes whose constructions
/// are external: globally-stable and list-globally-stable learners, plus test
/// doubles with tunable stability. Declared parameters are brute-force
/// verifiable by the metrics module.

struct NoisyConstantSpec {
  double scale = 1.0;           // perturbation scale in [0, 1]
  std::size_t sample_size = 1;  // n
  std::size_t domain_size = 1;
  /// When set, p(S) = scale * 1{any 1-label in S} instead of
  /// scale * (fraction of 1-labels); useful for accuracy-tail shaping.
  bool jump = false;
  /// Optional (h0, h1) pair; defaults to (all zeros, all ones).
  std::optional<std::pair<Hypothesis, Hypothesis>> pair;
};

/// Posterior (1 - p(S)) on h0 plus p(S) on h1 with p(S) driven by the
/// 1-label rate of S. Expected TV is computable by exhaustive enumeration.
LearningRule make_noisy_constant_rule(const NoisyConstantSpec& spec);

/// Outputs member 0 (the target) with probability eta from the execution
/// tape, otherwise a tape-uniform decoy; the posterior view is the matching
/// constant distribution. Reachable set: target then `decoys` decoys.
SeededRule make_globally_stable_fixture(double eta, std::size_t decoys, std::size_t domain_size,
                                        std::size_t sample_size);

struct ListLearnerFixture {
  std::size_t sample_size = 0;
  HypothesisClass reachable;  // member 0 is the target
  std::function<std::vector<ItemId>(const Dataset&, const Tape&)> run;
};

/// List learner that includes the target with probability eta and pads with
/// sample-dependent decoys from a pool of pool_size, up to list_size entries.
ListLearnerFixture make_list_global_fixture(std::size_t list_size, double eta,
                                            std::size_t pool_size, std::size_t domain_size,
                                            std::size_t sample_size);

/// All single-threshold stumps over the ordered domain, both polarities.
HypothesisClass stump_class(std::size_t domain_size);

/// h(x) = 1{x >= threshold}.
Hypothesis threshold_hypothesis(std::size_t domain_size, std::size_t threshold);

/// Deterministic ERM over the stump class; the point-mass posterior sits on
/// the lowest-index empirical minimizer. Declared weak advantage holds for
/// threshold targets under any smooth measure (a verified property).
LearningRule make_weak_stump_learner(std::size_t domain_size, std::size_t sample_size);

/// Deterministic ERM over an explicit class, lowest-index tie-breaking.
LearningRule make_deterministic_erm(const HypothesisClass& hypotheses, std::size_t sample_size);

/// Realizable example distribution for a target hypothesis: point x carries
/// label target(x) and the given point mass.
FiniteDistribution realizable_distribution(const Hypothesis& target,
                                           const std::vector<double>& point_mass);

}  // namespace tvind
