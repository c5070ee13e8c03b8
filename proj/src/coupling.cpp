#include "tvind/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tvind {

ReferenceMeasure uniform_reference(const HypothesisClass& reachable) {
  if (reachable.size() == 0) throw std::invalid_argument("uniform_reference: empty class");
  std::vector<ItemId> support(reachable.size());
  for (std::size_t i = 0; i < support.size(); ++i) support[i] = static_cast<ItemId>(i);
  return ReferenceMeasure{FiniteDistribution::uniform(std::move(support)), true};
}

ReferenceMeasure mixture_reference(const std::vector<FiniteDistribution>& posteriors,
                                   MixtureWeighting weighting, bool data_independent) {
  if (posteriors.empty()) throw std::invalid_argument("mixture_reference: empty enumeration");
  std::vector<double> weights(posteriors.size());
  if (weighting == MixtureWeighting::kUniform) {
    std::fill(weights.begin(), weights.end(), 1.0 / static_cast<double>(posteriors.size()));
  } else {
    // 2^-i truncated at the enumeration length, renormalized.
    double total = 0.0;
    double w = 0.5;
    for (std::size_t i = 0; i < weights.size(); ++i, w *= 0.5) {
      weights[i] = w;
      total += w;
    }
    for (double& x : weights) x /= total;
  }
  return ReferenceMeasure{posterior_mixture(posteriors, weights), data_independent};
}

Density density(const FiniteDistribution& target, const ReferenceMeasure& ref) {
  const auto& rdist = ref.dist;
  Density out;
  out.values.assign(rdist.size(), 0.0);
  double check = 0.0;
  for (std::size_t i = 0; i < rdist.size(); ++i) {
    const double t = target.mass_of(rdist.support()[i]);
    if (t == 0.0) continue;
    if (rdist.mass()[i] <= 0.0) {
      throw std::invalid_argument("density: target mass on reference-null item");
    }
    out.values[i] = t / rdist.mass()[i];
    out.max_value = std::max(out.max_value, out.values[i]);
    check += t;
  }
  // Any target mass outside the reference support breaks absolute continuity.
  if (std::abs(check - 1.0) > kMassTolerance) {
    throw std::invalid_argument("density: target not absolutely continuous w.r.t. reference");
  }
  return out;
}

CoupledSampleInfo coupled_sample_info(const FiniteDistribution& target,
                                      const PoissonStripStream& stream, std::uint64_t window_cap) {
  const Density f = density(target, ReferenceMeasure{stream.reference(), true});
  const auto strips = static_cast<std::uint32_t>(std::max(1.0, std::ceil(f.max_value)));
  for (std::uint64_t m = 0; m < window_cap; ++m) {
    const PoissonAtom* best = nullptr;
    for (std::uint32_t j = 0; j < strips; ++j) {
      for (const PoissonAtom& a : stream.window_atoms(j, m)) {
        if (f.values[a.ref_index] > a.y) {
          // Window-major scan: the min-t acceptance inside the first window
          // with any acceptance is the global argmin over all strips.
          const bool better = best == nullptr || a.t < best->t ||
                              (a.t == best->t && (a.strip < best->strip ||
                                                  (a.strip == best->strip && a.order < best->order)));
          if (better) best = &a;
        }
      }
    }
    if (best != nullptr) {
      return CoupledSampleInfo{stream.reference().support()[best->ref_index], best->t, m,
                               best->strip};
    }
  }
  throw std::runtime_error("coupled_sample: no acceptance within window cap (invalid density?)");
}

ItemId coupled_sample(const FiniteDistribution& target, const PoissonStripStream& stream,
                      std::uint64_t window_cap) {
  return coupled_sample_info(target, stream, window_cap).item;
}

ItemId coupled_sample(const FiniteDistribution& target, const ReferenceMeasure& ref,
                      const Tape& tape, std::uint64_t window_cap) {
  PoissonStripStream stream(tape, ref.dist);
  return coupled_sample(target, stream, window_cap);
}

double disagreement_bound(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("disagreement_bound: rho outside [0,1]");
  return 2.0 * rho / (1.0 + rho);
}

}  // namespace tvind
