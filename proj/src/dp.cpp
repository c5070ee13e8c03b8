#include "tvind/dp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace tvind {

namespace {

// Inverse-CDF standard Laplace.
double laplace_quantile(double u) {
  if (u < 0.5) return std::log(2.0 * u);
  return -std::log(2.0 * (1.0 - u));
}

}  // namespace

std::size_t stable_histogram_required_n(double eta, double beta, double epsilon, double delta) {
  if (!(eta > 0 && eta < 1) || !(beta > 0 && beta < 1) || !(epsilon > 0) ||
      !(delta > 0 && delta < 1)) {
    throw std::invalid_argument("stable_histogram: parameters out of range");
  }
  return static_cast<std::size_t>(std::ceil(8.0 * std::log(1.0 / (eta * beta * delta)) /
                                            (eta * epsilon)));
}

std::vector<HistogramEntry> stable_histogram(const std::vector<ItemId>& items, double eta,
                                             double beta, double epsilon, double delta,
                                             const Tape& tape) {
  const std::size_t required = stable_histogram_required_n(eta, beta, epsilon, delta);
  if (items.size() < required) {
    throw std::invalid_argument("stable_histogram: n = " + std::to_string(items.size()) +
                                " below required n = " + std::to_string(required));
  }
  const double n = static_cast<double>(items.size());
  std::map<ItemId, std::size_t> counts;
  for (ItemId x : items) ++counts[x];

  const double scale = 2.0 / (epsilon * n);
  const double threshold = eta / 2.0 + scale * std::log(2.0 / delta);
  const Tape noise = tape.derive("stable-hist");

  std::vector<HistogramEntry> out;
  for (const auto& [item, count] : counts) {
    const double freq = static_cast<double>(count) / n;
    const double noisy = freq + scale * laplace_quantile(noise.derive(item).uniform(0));
    if (noisy >= threshold) {
      out.push_back(HistogramEntry{item, std::clamp(noisy, 0.0, 1.0)});
    }
  }
  return out;
}

std::size_t exp_mechanism_required_n(std::size_t class_size, double alpha, double beta,
                                     double epsilon) {
  if (class_size == 0 || !(alpha > 0 && alpha < 1) || !(beta > 0 && beta < 1) || !(epsilon > 0)) {
    throw std::invalid_argument("exp_mechanism: parameters out of range");
  }
  const double m = static_cast<double>(class_size);
  const double bound =
      4.0 * std::log(m / beta) * std::max(1.0 / (epsilon * alpha), 1.0 / (alpha * alpha));
  return static_cast<std::size_t>(std::ceil(bound));
}

FiniteDistribution exp_mechanism_distribution(const HypothesisClass& hypotheses,
                                              const Dataset& sample, double epsilon) {
  if (hypotheses.size() == 0) throw std::invalid_argument("exp_mechanism: empty class");
  const double n = static_cast<double>(sample.size());
  std::vector<double> losses(hypotheses.size());
  double min_loss = 1.0;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    losses[i] = empirical_loss(hypotheses[i], sample);
    min_loss = std::min(min_loss, losses[i]);
  }
  // Shift by the minimum loss before exponentiating; the law is invariant.
  std::vector<ItemId> support(hypotheses.size());
  std::vector<double> mass(hypotheses.size());
  double total = 0.0;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    support[i] = static_cast<ItemId>(i);
    mass[i] = std::exp(-epsilon * n * (losses[i] - min_loss) / 2.0);
    total += mass[i];
  }
  for (double& m : mass) m /= total;
  return FiniteDistribution(std::move(support), std::move(mass));
}

std::size_t exp_mechanism_learner(const HypothesisClass& hypotheses, const Dataset& sample,
                                  double alpha, double beta, double epsilon, const Tape& tape) {
  const std::size_t required = exp_mechanism_required_n(hypotheses.size(), alpha, beta, epsilon);
  if (sample.size() < required) {
    throw std::invalid_argument("exp_mechanism_learner: |S| = " + std::to_string(sample.size()) +
                                " below required n = " + std::to_string(required));
  }
  const auto law = exp_mechanism_distribution(hypotheses, sample, epsilon);
  return static_cast<std::size_t>(law.sample(tape.derive("exp-mech").uniform(0)));
}

double approx_dp_delta(const FiniteDistribution& p, const FiniteDistribution& q, double epsilon) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("approx_dp_delta: negative epsilon");
  const double e = std::exp(epsilon);
  // Optimal event: collect every point where one side exceeds e^eps times the
  // other.
  double pq = 0.0, qp = 0.0;
  std::vector<ItemId> universe = p.support();
  universe.insert(universe.end(), q.support().begin(), q.support().end());
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
  for (ItemId w : universe) {
    pq += std::max(p.mass_of(w) - e * q.mass_of(w), 0.0);
    qp += std::max(q.mass_of(w) - e * p.mass_of(w), 0.0);
  }
  return std::max(pq, qp);
}

}  // namespace tvind
