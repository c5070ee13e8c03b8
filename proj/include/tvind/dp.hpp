#pragma once

#include <cstdint>
#include <vector>

#include "tvind/core.hpp"
#include "tvind/random.hpp"

namespace tvind {

struct DpParams {
  double epsilon = 0.0;  // > 0
  double delta = 0.0;    // in [0, 1)
};

struct HistogramEntry {
  ItemId item = 0;
  double estimate = 0.0;
};

/// Minimum input size for stable_histogram at these parameters.
std::size_t stable_histogram_required_n(double eta, double beta, double epsilon, double delta);

/// Thresholded-Laplace stable histogram. Computes exact frequencies of the
/// items present, adds Laplace(2/(eps*n)) noise, and releases the items whose
/// noisy frequency clears eta/2 + (2/(eps*n))*ln(2/delta). With probability
/// 1-beta every item of frequency >= eta is released and every released
/// estimate is within eta of the true frequency; the release is
/// (eps, delta)-DP. Errors when n is below stable_histogram_required_n.
///
/// Laplace noise comes from per-item substreams of `tape` by inverse CDF; no
/// hardening against floating-point DP side channels.
std::vector<HistogramEntry> stable_histogram(const std::vector<ItemId>& items, double eta,
                                             double beta, double epsilon, double delta,
                                             const Tape& tape);

/// Minimum dataset size for exp_mechanism_learner at these parameters.
std::size_t exp_mechanism_required_n(std::size_t class_size, double alpha, double beta,
                                     double epsilon);

/// Closed-form output law of the exponential mechanism with utility
/// -empirical_loss and sensitivity 1/n: Pr[h] proportional to
/// exp(-eps * n * loss(h) / 2). Support ids index the class.
FiniteDistribution exp_mechanism_distribution(const HypothesisClass& hypotheses,
                                              const Dataset& sample, double epsilon);

/// Samples the exponential mechanism; (eps, 0)-DP exactly, and
/// err(h) <= min err + alpha with probability 1-beta at the required n.
std::size_t exp_mechanism_learner(const HypothesisClass& hypotheses, const Dataset& sample,
                                  double alpha, double beta, double epsilon, const Tape& tape);

/// Tightest delta making P and Q (eps, delta)-indistinguishable:
/// max over both directions of sum_w max(P(w) - e^eps Q(w), 0).
double approx_dp_delta(const FiniteDistribution& p, const FiniteDistribution& q, double epsilon);

}  // namespace tvind
