#pragma once

#include <cstdint>
#include <vector>

#include "tvind/core.hpp"
#include "tvind/random.hpp"

namespace tvind {

/// Data-independent distribution dominating every posterior it serves. The
/// flag records provenance: only references built without looking at data may
/// enter the DP pipeline.
struct ReferenceMeasure {
  FiniteDistribution dist;
  bool data_independent = false;
};

/// Ratio of target mass to reference mass, aligned with the reference
/// support. Zero where the target is zero.
struct Density {
  std::vector<double> values;
  double max_value = 0.0;
};

/// Uniform mass over the indices of a reachable hypothesis class.
ReferenceMeasure uniform_reference(const HypothesisClass& reachable);

enum class MixtureWeighting { kGeometric, kUniform };

/// Finite truncation of the countable 2^-i posterior mixture, renormalized.
/// Callers that can vouch the component enumeration never saw data may set
/// data_independent.
ReferenceMeasure mixture_reference(const std::vector<FiniteDistribution>& posteriors,
                                   MixtureWeighting weighting, bool data_independent = false);

/// Radon-Nikodym density of target with respect to ref. Errors when the
/// target puts mass on a reference-null item.
Density density(const FiniteDistribution& target, const ReferenceMeasure& ref);

struct CoupledSampleInfo {
  ItemId item = 0;
  double accept_time = 0.0;
  std::uint64_t window = 0;
  std::uint32_t strip = 0;
};

/// Rejection coupling over the strip stream: returns the hypothesis of the
/// minimum-t atom with density(h) > y, scanning whole time windows across all
/// strips below ceil(max density) before moving to the next window. The
/// marginal law over fresh tapes equals the target; two targets sharing a
/// stream disagree with probability at most 2*dtv/(1+dtv).
ItemId coupled_sample(const FiniteDistribution& target, const PoissonStripStream& stream,
                      std::uint64_t window_cap = 1'000'000);

/// As coupled_sample, also reporting where acceptance happened.
CoupledSampleInfo coupled_sample_info(const FiniteDistribution& target,
                                      const PoissonStripStream& stream,
                                      std::uint64_t window_cap = 1'000'000);

/// Convenience overload building a transient stream on ref for this tape.
ItemId coupled_sample(const FiniteDistribution& target, const ReferenceMeasure& ref,
                      const Tape& tape, std::uint64_t window_cap = 1'000'000);

/// Pairwise optimal coupling disagreement bound 2*rho / (1 + rho).
double disagreement_bound(double rho);

}  // namespace tvind
