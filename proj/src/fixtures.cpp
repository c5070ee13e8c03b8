#include "tvind/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tvind {

namespace {

Hypothesis constant_hypothesis(std::size_t domain_size, std::uint8_t label) {
  return Hypothesis{std::vector<std::uint8_t>(domain_size, label)};
}

// Bit pattern `code` as a labeling, little-endian in the point index.
Hypothesis pattern_hypothesis(std::size_t domain_size, std::uint64_t code) {
  Hypothesis h;
  h.labels.resize(domain_size);
  for (std::size_t x = 0; x < domain_size; ++x) h.labels[x] = (code >> x) & 1u;
  return h;
}

// Target (all zeros) followed by the first `count` nonzero patterns.
HypothesisClass target_plus_patterns(std::size_t domain_size, std::size_t count) {
  if (domain_size >= 63 || count >= (1ull << domain_size)) {
    throw std::invalid_argument("fixture: domain too small for requested decoy count");
  }
  std::vector<Hypothesis> members;
  members.reserve(count + 1);
  members.push_back(constant_hypothesis(domain_size, 0));
  for (std::uint64_t code = 1; members.size() < count + 1; ++code) {
    members.push_back(pattern_hypothesis(domain_size, code));
  }
  return HypothesisClass(domain_size, std::move(members));
}

std::uint64_t dataset_fingerprint(const Dataset& sample) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& ex : sample) {
    h ^= example_id(ex.point, ex.label);
    h *= 0x100000001b3ULL;
  }
  return h;
}

double one_label_fraction(const Dataset& sample) {
  if (sample.empty()) return 0.0;
  std::size_t ones = 0;
  for (const auto& ex : sample) ones += ex.label;
  return static_cast<double>(ones) / static_cast<double>(sample.size());
}

}  // namespace

LearningRule make_noisy_constant_rule(const NoisyConstantSpec& spec) {
  if (!(spec.scale >= 0.0 && spec.scale <= 1.0)) {
    throw std::invalid_argument("noisy-constant: scale outside [0,1]");
  }
  Hypothesis h0 = spec.pair ? spec.pair->first : constant_hypothesis(spec.domain_size, 0);
  Hypothesis h1 = spec.pair ? spec.pair->second : constant_hypothesis(spec.domain_size, 1);
  LearningRule rule;
  rule.sample_size = spec.sample_size;
  rule.reachable = HypothesisClass(spec.domain_size, {h0, h1});
  const double scale = spec.scale;
  const bool jump = spec.jump;
  rule.posterior = [scale, jump](const Dataset& sample) {
    const double f = one_label_fraction(sample);
    const double p = jump ? (f > 0.0 ? scale : 0.0) : scale * f;
    return FiniteDistribution({0, 1}, {1.0 - p, p});
  };
  return rule;
}

SeededRule make_globally_stable_fixture(double eta, std::size_t decoys, std::size_t domain_size,
                                        std::size_t sample_size) {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("globally-stable: eta outside (0,1]");
  if (decoys == 0) throw std::invalid_argument("globally-stable: needs at least one decoy");

  SeededRule rule;
  rule.base.sample_size = sample_size;
  rule.base.reachable = target_plus_patterns(domain_size, decoys);
  const std::size_t k = decoys;

  std::vector<ItemId> support(k + 1);
  std::vector<double> mass(k + 1, (1.0 - eta) / static_cast<double>(k));
  for (std::size_t i = 0; i <= k; ++i) support[i] = static_cast<ItemId>(i);
  mass[0] = eta;
  const FiniteDistribution constant(std::move(support), std::move(mass));
  rule.base.posterior = [constant](const Dataset&) { return constant; };

  rule.posterior_determined = true;  // the execution ignores the sample
  rule.execute = [eta, k](const Dataset&, const Tape& tape) -> ItemId {
    const Tape t = tape.derive("gs-fixture");
    if (t.uniform(0) < eta) return 0;
    const auto pick = static_cast<std::size_t>(t.uniform(1) * static_cast<double>(k));
    return static_cast<ItemId>(1 + std::min(pick, k - 1));
  };
  return rule;
}

ListLearnerFixture make_list_global_fixture(std::size_t list_size, double eta,
                                            std::size_t pool_size, std::size_t domain_size,
                                            std::size_t sample_size) {
  if (list_size == 0) throw std::invalid_argument("list fixture: list_size must be positive");
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("list fixture: eta outside (0,1]");
  if (pool_size < list_size) throw std::invalid_argument("list fixture: pool smaller than list");

  ListLearnerFixture fixture;
  fixture.sample_size = sample_size;
  fixture.reachable = target_plus_patterns(domain_size, pool_size);
  fixture.run = [list_size, eta, pool_size](const Dataset& sample,
                                            const Tape& tape) -> std::vector<ItemId> {
    std::vector<ItemId> out;
    const bool with_target = tape.derive("list-fixture").uniform(0) < eta;
    if (with_target) out.push_back(0);
    const std::size_t need = list_size - (with_target ? 1 : 0);
    const std::uint64_t fp = dataset_fingerprint(sample);
    for (std::size_t j = 0; j < need; ++j) {
      out.push_back(static_cast<ItemId>(1 + (fp + j) % pool_size));
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  return fixture;
}

Hypothesis threshold_hypothesis(std::size_t domain_size, std::size_t threshold) {
  Hypothesis h;
  h.labels.resize(domain_size);
  for (std::size_t x = 0; x < domain_size; ++x) h.labels[x] = x >= threshold ? 1 : 0;
  return h;
}

HypothesisClass stump_class(std::size_t domain_size) {
  std::vector<Hypothesis> stumps;
  // 1{x >= t} for t = 0..d covers all ones down to all zeros; the reversed
  // polarity 1{x < t} adds the prefix-ones labelings.
  for (std::size_t t = 0; t <= domain_size; ++t) stumps.push_back(threshold_hypothesis(domain_size, t));
  for (std::size_t t = 1; t < domain_size; ++t) {
    Hypothesis h;
    h.labels.resize(domain_size);
    for (std::size_t x = 0; x < domain_size; ++x) h.labels[x] = x < t ? 1 : 0;
    stumps.push_back(h);
  }
  return HypothesisClass(domain_size, std::move(stumps));
}

LearningRule make_deterministic_erm(const HypothesisClass& hypotheses, std::size_t sample_size) {
  if (hypotheses.size() == 0) throw std::invalid_argument("erm: empty class");
  LearningRule rule;
  rule.sample_size = sample_size;
  rule.reachable = hypotheses;
  const HypothesisClass members = hypotheses;
  rule.posterior = [members](const Dataset& sample) {
    if (sample.empty()) throw std::invalid_argument("erm: empty effective sample");
    std::size_t best = 0;
    double best_loss = 2.0;
    for (std::size_t i = 0; i < members.size(); ++i) {
      const double loss = empirical_loss(members[i], sample);
      if (loss < best_loss) {
        best_loss = loss;
        best = i;
      }
    }
    return FiniteDistribution::point_mass(static_cast<ItemId>(best));
  };
  return rule;
}

LearningRule make_weak_stump_learner(std::size_t domain_size, std::size_t sample_size) {
  return make_deterministic_erm(stump_class(domain_size), sample_size);
}

FiniteDistribution realizable_distribution(const Hypothesis& target,
                                           const std::vector<double>& point_mass) {
  if (point_mass.size() != target.domain_size()) {
    throw std::invalid_argument("realizable_distribution: mass length != domain size");
  }
  std::vector<ItemId> support;
  std::vector<double> mass;
  for (std::size_t x = 0; x < point_mass.size(); ++x) {
    if (point_mass[x] == 0.0) continue;
    support.push_back(example_id(static_cast<std::uint32_t>(x), target.labels[x]));
    mass.push_back(point_mass[x]);
  }
  return FiniteDistribution(std::move(support), std::move(mass));
}

}  // namespace tvind
