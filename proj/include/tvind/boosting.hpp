#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "tvind/core.hpp"
#include "tvind/coupling.hpp"
#include "tvind/random.hpp"
#include "tvind/replicable.hpp"
#include "tvind/transforms.hpp"

namespace tvind {

/// [0,1]-valued reweighting of the domain maintained by smooth boosting.
struct SmoothMeasure {
  std::vector<double> values;  // one per domain point, initially all 1

  static SmoothMeasure ones(std::size_t domain_size) {
    return SmoothMeasure{std::vector<double>(domain_size, 1.0)};
  }
};

/// Boosting progress: voted hypotheses and the running margins.
struct BoostState {
  std::size_t round = 0;
  std::vector<Hypothesis> hypotheses;
  std::vector<double> margins;  // M_t per domain point
};

struct AmplifyResult {
  Hypothesis hypothesis;
  bool fallback = false;  // the all-ones classifier was returned
  std::size_t rounds_used = 0;
  double estimated_error = 0.0;
};

/// Indistinguishability amplification: k fresh coupling tapes, per-tape
/// induced hypothesis distributions, replicable heavy-hitters at threshold
/// 3(1-eta)/4 and error (1-eta)/4, a replicable agnostic pass, and the first
/// candidate with estimated error <= alpha + eps/2 wins; otherwise the
/// all-ones classifier. Requires beta < (1 - sqrt(2rho/(1+rho)))^2.
///
/// `tape` carries the shared randomness (coupling streams, thresholds,
/// grids); `data_tape` carries this run's sample randomness.
AmplifyResult amplify(const LearningRule& rule, double alpha, double beta, double rho,
                      double rho_prime, double eps, double beta_prime,
                      const ReferenceMeasure& ref, const FiniteDistribution& examples,
                      const Tape& tape, const Tape& data_tape);

/// Number of coupling tapes amplify uses at these parameters.
std::size_t amplify_round_count(double beta, double rho, double beta_prime);

/// Scans the input sequence accepting (x, y) when measure(x) >= b for a fresh
/// uniform b per scanned example; returns the first size_out acceptances or
/// nullopt when the input is exhausted first.
std::optional<Dataset> rejection_sampling(const Dataset& input, std::size_t size_out,
                                          const SmoothMeasure& measure, TapeCursor& thresholds);

/// Replicable SQ estimate of E_D[measure(x)] at error eps/3.
double indist_test_measure(const SmoothMeasure& measure, ItemSampler& examples, const Tape& tape,
                           double rho, double beta, double eps);

struct BoostRoundLog {
  std::size_t round = 0;
  double measure_estimate = 0.0;
  double majority_error = 0.0;
  double measure_min = 0.0;  // range of the true measure after the update
  double measure_max = 0.0;
};

struct BoostParams {
  double eps = 0.0;
  double rho_prime = 0.0;
  double beta_prime = 0.0;
  double gamma = 0.0;
  double c_t = 100.0;  // round-count constant: T = ceil(c_t / (eps gamma^2))
};

struct BoostResult {
  bool failed = false;  // rejection exhaustion or round cap; counts against beta'
  Hypothesis majority;
  std::size_t rounds = 0;
  std::vector<BoostRoundLog> log;
};

/// Round cap T = ceil(c_t / (eps gamma^2)).
std::size_t boost_round_cap(const BoostParams& params);

/// Smooth boosting of a weak learner: per round, rejection-sample the round
/// dataset under the current measure, run the derandomized weak learner on
/// the shared round tape, apply the SmoothBoost measure update
/// (theta = gamma/(2+gamma); mu = 1 where the margin M <= 0, else
/// (1-gamma)^(M/2)), and stop voting sgn(sum h_i) once the replicable measure
/// test drops to 2 eps / 3. Requires a realizable example distribution.
BoostResult smooth_boost(const LearningRule& weak_rule, const BoostParams& params,
                         const ReferenceMeasure& ref, const FiniteDistribution& examples,
                         const Tape& tape, const Tape& data_tape);

}  // namespace tvind
