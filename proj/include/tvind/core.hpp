#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace tvind {

/// Identifier of an item in a finite universe. Posteriors use indices into a
/// hypothesis class; data distributions use encoded (point, label) pairs.
using ItemId = std::uint64_t;

constexpr double kMassTolerance = 1e-9;

/// Explicit probability mass over a sorted finite support.
///
/// The support is kept sorted by item id and may carry zero-mass items.
/// Binary operations between distributions union the supports and treat
/// missing items as zero mass. Instances are immutable values.
class FiniteDistribution {
 public:
  FiniteDistribution() = default;

  /// Validates: same lengths, distinct items, masses >= 0, total within
  /// kMassTolerance of 1. Items are sorted internally.
  FiniteDistribution(std::vector<ItemId> support, std::vector<double> mass);

  static FiniteDistribution point_mass(ItemId item);
  static FiniteDistribution uniform(std::vector<ItemId> support);

  const std::vector<ItemId>& support() const { return support_; }
  const std::vector<double>& mass() const { return mass_; }
  std::size_t size() const { return support_.size(); }

  /// Mass of an item, zero when absent from the support.
  double mass_of(ItemId item) const;

  /// Inverse-CDF sample: maps u in [0,1) to an item. The cumulative order is
  /// the sorted support order, so equal distributions map equal u to equal
  /// items.
  ItemId sample(double u) const;

  /// Drops zero-mass support items.
  FiniteDistribution trimmed() const;

  bool operator==(const FiniteDistribution& other) const = default;

 private:
  std::vector<ItemId> support_;
  std::vector<double> mass_;
};

/// Half L1 distance between the mass vectors over the union support.
double tv_distance(const FiniteDistribution& p, const FiniteDistribution& q);

/// Pointwise convex combination over the union support. Weights must be
/// nonnegative and sum to 1 within tolerance.
FiniteDistribution posterior_mixture(const std::vector<FiniteDistribution>& components,
                                     const std::vector<double>& weights);

/// Total binary labeling of a finite domain; identity is exact label-vector
/// equality.
struct Hypothesis {
  std::vector<std::uint8_t> labels;

  std::size_t domain_size() const { return labels.size(); }
  int predict(std::size_t point) const { return labels[point]; }
  bool operator==(const Hypothesis& other) const = default;

  std::string to_bit_string() const;
  static Hypothesis from_bit_string(const std::string& bits);
};

/// Ordered set of distinct hypotheses over a common domain. The index order
/// is fixed and used for deterministic tie-breaking.
class HypothesisClass {
 public:
  HypothesisClass() = default;
  HypothesisClass(std::size_t domain_size, std::vector<Hypothesis> members);

  std::size_t domain_size() const { return domain_size_; }
  std::size_t size() const { return members_.size(); }
  const Hypothesis& operator[](std::size_t i) const { return members_[i]; }
  const std::vector<Hypothesis>& members() const { return members_; }

  /// Subclass from member indices, preserving the given order.
  HypothesisClass subclass(const std::vector<std::size_t>& indices) const;

 private:
  std::size_t domain_size_ = 0;
  std::vector<Hypothesis> members_;
};

struct Example {
  std::uint32_t point = 0;
  std::uint8_t label = 0;
  bool operator==(const Example& other) const = default;
};

/// Ordered sample of labeled examples; repeats count per occurrence.
using Dataset = std::vector<Example>;

/// Encoding of examples as items of a FiniteDistribution: id = 2*point + label.
inline ItemId example_id(std::uint32_t point, std::uint8_t label) {
  return (static_cast<ItemId>(point) << 1) | (label & 1u);
}
inline std::uint32_t point_of(ItemId id) { return static_cast<std::uint32_t>(id >> 1); }
inline std::uint8_t label_of(ItemId id) { return static_cast<std::uint8_t>(id & 1u); }
inline Example example_of(ItemId id) { return Example{point_of(id), label_of(id)}; }

/// Exact misclassification mass of h under a joint distribution over
/// (point, label) items.
double population_loss(const Hypothesis& h, const FiniteDistribution& examples);

/// Fraction of disagreements over the sequence; errors on empty datasets.
double empirical_loss(const Hypothesis& h, const Dataset& sample);

/// Randomized map from datasets to posteriors over a declared reachable
/// hypothesis set. Posterior supports are indices into `reachable`, which is
/// fixed before any data is seen.
struct LearningRule {
  std::size_t sample_size = 0;
  HypothesisClass reachable;
  std::function<FiniteDistribution(const Dataset&)> posterior;
};

/// Misclassification probability of a posterior: E_{h ~ dist}[err(h)].
double posterior_loss(const FiniteDistribution& posterior, const HypothesisClass& reachable,
                      const FiniteDistribution& examples);

}  // namespace tvind
