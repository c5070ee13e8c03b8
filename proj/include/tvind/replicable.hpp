#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "tvind/core.hpp"
#include "tvind/random.hpp"

namespace tvind {

/// Source of i.i.d. items carrying its own (data) randomness. Algorithm
/// internals never draw data themselves; they consume a sampler, so paired
/// replicability runs can share algorithm tapes while data stays independent.
class ItemSampler {
 public:
  virtual ~ItemSampler() = default;

  virtual ItemId draw() = 0;

  /// Explicit law when known; enables the exact count path below.
  virtual const FiniteDistribution* distribution() const { return nullptr; }

  /// Occurrence counts of n i.i.d. draws, sorted by item. The default loops
  /// draw(); samplers with an explicit law sample the multinomial directly
  /// through conditional binomials, which is the same law at any n.
  virtual std::vector<std::pair<ItemId, std::uint64_t>> draw_counts(std::uint64_t n);
};

/// Per-draw budget of black-box samplers before draw_counts refuses; the
/// count path has no such limit.
constexpr std::uint64_t kBlackBoxDrawBudget = 200'000'000;

class DistributionSampler final : public ItemSampler {
 public:
  DistributionSampler(FiniteDistribution dist, Tape data_tape)
      : dist_(std::move(dist)), cursor_(data_tape) {}

  ItemId draw() override { return dist_.sample(cursor_.next_uniform()); }
  const FiniteDistribution* distribution() const override { return &dist_; }
  std::vector<std::pair<ItemId, std::uint64_t>> draw_counts(std::uint64_t n) override;

 private:
  FiniteDistribution dist_;
  TapeCursor cursor_;
};

class FunctionSampler final : public ItemSampler {
 public:
  explicit FunctionSampler(std::function<ItemId()> fn) : fn_(std::move(fn)) {}
  ItemId draw() override { return fn_(); }

 private:
  std::function<ItemId()> fn_;
};

struct SqParams {
  double tolerance = 0.0;      // tau
  double replicability = 0.0;  // rho
  double confidence = 0.0;     // delta
};

struct HhParams {
  double threshold = 0.0;      // v
  double error = 0.0;          // epsilon
  double confidence = 0.0;     // delta
  double replicability = 0.0;  // rho
};

/// Number of samples the SQ oracle consumes at these parameters.
std::uint64_t sq_sample_size(const SqParams& params);

/// Replicable statistical query: Hoeffding estimate of E[query] rounded to a
/// random-offset grid of width tau. |estimate - E[query]| <= tau with
/// probability 1-delta; two executions on independent samples sharing `tape`
/// agree exactly with probability at least 1-rho.
double replicable_sq(const std::function<double(ItemId)>& query, ItemSampler& sampler,
                     const SqParams& params, const Tape& tape);

/// Replicable heavy-hitters: with probability 1-delta the output contains
/// every item of mass > v+eps and nothing of mass < v-eps; runs sharing
/// `tape` agree with probability 1-rho. Output is sorted by item id.
std::vector<ItemId> replicable_heavy_hitters(ItemSampler& sampler, const HhParams& params,
                                             const Tape& tape);

struct AgnosticResult {
  std::size_t index = 0;  // into the hypothesis class
  double estimated_error = 0.0;
};

/// Replicable agnostic learner for a finite class: one replicable SQ error
/// estimate per hypothesis at (eps/2, delta/|H|, rho/|H|) on derived tapes,
/// then argmin with ties broken toward the lowest class index.
AgnosticResult replicable_agnostic_learner(const HypothesisClass& hypotheses,
                                           ItemSampler& examples, double eps, double delta,
                                           double rho, const Tape& tape);

}  // namespace tvind
