#include "tvind/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tvind {

namespace {

void validate_mass_vector(const std::vector<ItemId>& support, const std::vector<double>& mass) {
  if (support.size() != mass.size()) {
    throw std::invalid_argument("FiniteDistribution: support/mass length mismatch");
  }
  double total = 0.0;
  for (double m : mass) {
    if (!(m >= 0.0) || std::isnan(m)) {
      throw std::invalid_argument("FiniteDistribution: negative or NaN mass");
    }
    total += m;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw std::invalid_argument("FiniteDistribution: total mass " + std::to_string(total) +
                                " outside [1-1e-9, 1+1e-9]");
  }
}

}  // namespace

FiniteDistribution::FiniteDistribution(std::vector<ItemId> support, std::vector<double> mass)
    : support_(std::move(support)), mass_(std::move(mass)) {
  validate_mass_vector(support_, mass_);
  if (!std::is_sorted(support_.begin(), support_.end())) {
    std::vector<std::size_t> order(support_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return support_[a] < support_[b]; });
    std::vector<ItemId> s(support_.size());
    std::vector<double> m(mass_.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      s[i] = support_[order[i]];
      m[i] = mass_[order[i]];
    }
    support_ = std::move(s);
    mass_ = std::move(m);
  }
  for (std::size_t i = 1; i < support_.size(); ++i) {
    if (support_[i] == support_[i - 1]) {
      throw std::invalid_argument("FiniteDistribution: duplicate support item");
    }
  }
}

FiniteDistribution FiniteDistribution::point_mass(ItemId item) {
  return FiniteDistribution({item}, {1.0});
}

FiniteDistribution FiniteDistribution::uniform(std::vector<ItemId> support) {
  if (support.empty()) throw std::invalid_argument("uniform: empty support");
  std::vector<double> mass(support.size(), 1.0 / static_cast<double>(support.size()));
  return FiniteDistribution(std::move(support), std::move(mass));
}

double FiniteDistribution::mass_of(ItemId item) const {
  auto it = std::lower_bound(support_.begin(), support_.end(), item);
  if (it == support_.end() || *it != item) return 0.0;
  return mass_[static_cast<std::size_t>(it - support_.begin())];
}

ItemId FiniteDistribution::sample(double u) const {
  if (support_.empty()) throw std::logic_error("sample: empty distribution");
  double cum = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    cum += mass_[i];
    if (u < cum) return support_[i];
  }
  // u landed in the rounding slack past the last cumulative step.
  for (std::size_t i = support_.size(); i-- > 0;) {
    if (mass_[i] > 0.0) return support_[i];
  }
  return support_.back();
}

FiniteDistribution FiniteDistribution::trimmed() const {
  std::vector<ItemId> s;
  std::vector<double> m;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (mass_[i] > 0.0) {
      s.push_back(support_[i]);
      m.push_back(mass_[i]);
    }
  }
  FiniteDistribution out;
  out.support_ = std::move(s);
  out.mass_ = std::move(m);
  return out;
}

double tv_distance(const FiniteDistribution& p, const FiniteDistribution& q) {
  const auto& ps = p.support();
  const auto& qs = q.support();
  double acc = 0.0;
  std::size_t i = 0, j = 0;
  while (i < ps.size() || j < qs.size()) {
    if (j >= qs.size() || (i < ps.size() && ps[i] < qs[j])) {
      acc += std::abs(p.mass()[i]);
      ++i;
    } else if (i >= ps.size() || qs[j] < ps[i]) {
      acc += std::abs(q.mass()[j]);
      ++j;
    } else {
      acc += std::abs(p.mass()[i] - q.mass()[j]);
      ++i;
      ++j;
    }
  }
  return 0.5 * acc;
}

FiniteDistribution posterior_mixture(const std::vector<FiniteDistribution>& components,
                                     const std::vector<double>& weights) {
  if (components.size() != weights.size()) {
    throw std::invalid_argument("posterior_mixture: length mismatch");
  }
  if (components.empty()) throw std::invalid_argument("posterior_mixture: empty mixture");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("posterior_mixture: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw std::invalid_argument("posterior_mixture: weights do not sum to 1");
  }
  std::vector<ItemId> support;
  for (const auto& c : components) {
    support.insert(support.end(), c.support().begin(), c.support().end());
  }
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  std::vector<double> mass(support.size(), 0.0);
  for (std::size_t k = 0; k < components.size(); ++k) {
    if (weights[k] == 0.0) continue;
    const auto& c = components[k];
    for (std::size_t i = 0; i < c.size(); ++i) {
      auto it = std::lower_bound(support.begin(), support.end(), c.support()[i]);
      mass[static_cast<std::size_t>(it - support.begin())] += weights[k] * c.mass()[i];
    }
  }
  // Renormalize the rounding drift so the invariant holds exactly.
  double sum = std::accumulate(mass.begin(), mass.end(), 0.0);
  if (sum > 0.0) {
    for (double& m : mass) m /= sum;
  }
  return FiniteDistribution(std::move(support), std::move(mass));
}

std::string Hypothesis::to_bit_string() const {
  std::string out;
  out.reserve(labels.size());
  for (auto b : labels) out.push_back(b ? '1' : '0');
  return out;
}

Hypothesis Hypothesis::from_bit_string(const std::string& bits) {
  Hypothesis h;
  h.labels.reserve(bits.size());
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("Hypothesis: bad bit string");
    h.labels.push_back(c == '1' ? 1 : 0);
  }
  return h;
}

HypothesisClass::HypothesisClass(std::size_t domain_size, std::vector<Hypothesis> members)
    : domain_size_(domain_size), members_(std::move(members)) {
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (members_[i].labels.size() != domain_size_) {
      throw std::invalid_argument("HypothesisClass: member label length != domain size");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (members_[i] == members_[j]) {
        throw std::invalid_argument("HypothesisClass: duplicate label vector");
      }
    }
  }
}

HypothesisClass HypothesisClass::subclass(const std::vector<std::size_t>& indices) const {
  std::vector<Hypothesis> picked;
  picked.reserve(indices.size());
  for (auto i : indices) {
    if (i >= members_.size()) throw std::out_of_range("subclass: index out of range");
    picked.push_back(members_[i]);
  }
  return HypothesisClass(domain_size_, std::move(picked));
}

double population_loss(const Hypothesis& h, const FiniteDistribution& examples) {
  double loss = 0.0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const ItemId id = examples.support()[i];
    const std::uint32_t x = point_of(id);
    if (x >= h.domain_size()) {
      throw std::invalid_argument("population_loss: point outside hypothesis domain");
    }
    if (h.predict(x) != label_of(id)) loss += examples.mass()[i];
  }
  return loss;
}

double empirical_loss(const Hypothesis& h, const Dataset& sample) {
  if (sample.empty()) throw std::invalid_argument("empirical_loss: empty dataset");
  std::size_t wrong = 0;
  for (const auto& ex : sample) {
    if (ex.point >= h.domain_size()) {
      throw std::invalid_argument("empirical_loss: point outside hypothesis domain");
    }
    if (h.predict(ex.point) != ex.label) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(sample.size());
}

double posterior_loss(const FiniteDistribution& posterior, const HypothesisClass& reachable,
                      const FiniteDistribution& examples) {
  double loss = 0.0;
  for (std::size_t i = 0; i < posterior.size(); ++i) {
    if (posterior.mass()[i] == 0.0) continue;
    const auto idx = static_cast<std::size_t>(posterior.support()[i]);
    if (idx >= reachable.size()) {
      throw std::invalid_argument("posterior_loss: posterior item outside reachable set");
    }
    loss += posterior.mass()[i] * population_loss(reachable[idx], examples);
  }
  return loss;
}

}  // namespace tvind
