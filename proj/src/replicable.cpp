#include "tvind/replicable.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace tvind {

namespace {

void check_open_unit(double x, const char* name) {
  if (!(x > 0.0 && x < 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in (0,1)");
  }
}

std::uint64_t ceil_to_u64(double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("sample size formula produced a negative value");
  const double c = std::ceil(x);
  if (c > 9.0e18) throw std::invalid_argument("sample size formula overflows");
  return static_cast<std::uint64_t>(c);
}

}  // namespace

std::vector<std::pair<ItemId, std::uint64_t>> ItemSampler::draw_counts(std::uint64_t n) {
  if (n > kBlackBoxDrawBudget) {
    throw std::runtime_error(
        "draw_counts: requested " + std::to_string(n) +
        " black-box draws, over the per-call budget; provide an explicit distribution");
  }
  std::map<ItemId, std::uint64_t> counts;
  for (std::uint64_t i = 0; i < n; ++i) ++counts[draw()];
  return {counts.begin(), counts.end()};
}

std::vector<std::pair<ItemId, std::uint64_t>> DistributionSampler::draw_counts(std::uint64_t n) {
  std::vector<std::pair<ItemId, std::uint64_t>> counts;
  counts.reserve(dist_.size());
  std::uint64_t remaining = n;
  double remaining_mass = 1.0;
  for (std::size_t i = 0; i < dist_.size(); ++i) {
    const ItemId id = dist_.support()[i];
    std::uint64_t c = 0;
    if (i + 1 == dist_.size()) {
      c = remaining;
    } else if (remaining > 0) {
      const double p = remaining_mass <= 0.0
                           ? 1.0
                           : std::clamp(dist_.mass()[i] / remaining_mass, 0.0, 1.0);
      if (p >= 1.0) {
        c = remaining;
      } else if (p > 0.0) {
        std::binomial_distribution<long long> binom(static_cast<long long>(remaining), p);
        c = static_cast<std::uint64_t>(binom(cursor_));
      }
    }
    counts.emplace_back(id, c);
    remaining -= c;
    remaining_mass -= dist_.mass()[i];
  }
  return counts;
}

std::uint64_t sq_sample_size(const SqParams& params) {
  const double tau = params.tolerance;
  const double rho = params.replicability;
  const double delta0 = std::min(params.confidence, rho / 4.0);
  return ceil_to_u64(8.0 * std::log(2.0 / delta0) / (tau * tau * rho * rho));
}

double replicable_sq(const std::function<double(ItemId)>& query, ItemSampler& sampler,
                     const SqParams& params, const Tape& tape) {
  check_open_unit(params.tolerance, "sq tolerance");
  check_open_unit(params.replicability, "sq replicability");
  check_open_unit(params.confidence, "sq confidence");

  const std::uint64_t n = sq_sample_size(params);
  double sum = 0.0;
  for (const auto& [id, count] : sampler.draw_counts(n)) {
    if (count == 0) continue;
    const double v = query(id);
    if (v < -1e-12 || v > 1.0 + 1e-12) {
      throw std::invalid_argument("replicable_sq: query value outside [0,1]");
    }
    sum += v * static_cast<double>(count);
  }
  const double mean = sum / static_cast<double>(n);

  // Random-offset grid of width tau; nearest grid point, half rounded up.
  const double w = params.tolerance;
  const double offset = tape.derive("sq-offset").uniform(0) * w;
  const double k = std::floor((mean - offset) / w + 0.5);
  return std::clamp(offset + k * w, 0.0, 1.0);
}

std::vector<ItemId> replicable_heavy_hitters(ItemSampler& sampler, const HhParams& params,
                                             const Tape& tape) {
  const double v = params.threshold;
  const double eps = params.error;
  check_open_unit(v, "hh threshold");
  check_open_unit(eps, "hh error");
  check_open_unit(params.confidence, "hh confidence");
  check_open_unit(params.replicability, "hh replicability");
  if (v - eps <= 0.0 || v + eps > 1.0) {
    throw std::invalid_argument("replicable_heavy_hitters: band (v-eps, v+eps) leaves (0,1)");
  }

  const double dm = std::min(params.confidence, params.replicability);
  const std::uint64_t n1 = ceil_to_u64(std::log(2.0 / (dm * (v - eps))) / (v - eps));

  std::vector<ItemId> candidates;  // X_h, sorted
  for (const auto& [id, count] : sampler.draw_counts(n1)) {
    if (count > 0) candidates.push_back(id);
  }

  const double rho = params.replicability;
  const std::uint64_t n2 = ceil_to_u64(
      32.0 * (std::log(2.0 / dm) + static_cast<double>(candidates.size()) + 1.0) /
      (rho * rho * eps * eps));

  std::map<ItemId, std::uint64_t> counts;
  for (const auto& [id, count] : sampler.draw_counts(n2)) counts[id] = count;

  const double v_prime = v - eps / 2.0 + eps * tape.derive("hh-threshold").uniform(0);
  std::vector<ItemId> out;
  for (ItemId id : candidates) {
    const auto it = counts.find(id);
    const double freq =
        it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(n2);
    if (freq >= v_prime) out.push_back(id);
  }
  return out;
}

AgnosticResult replicable_agnostic_learner(const HypothesisClass& hypotheses,
                                           ItemSampler& examples, double eps, double delta,
                                           double rho, const Tape& tape) {
  if (hypotheses.size() == 0) {
    throw std::invalid_argument("replicable_agnostic_learner: empty class");
  }
  const double m = static_cast<double>(hypotheses.size());
  const Tape base = tape.derive("agnostic");

  AgnosticResult best{0, 2.0};
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const Hypothesis& h = hypotheses[i];
    const auto query = [&h](ItemId id) {
      return h.predict(point_of(id)) != label_of(id) ? 1.0 : 0.0;
    };
    const double est = replicable_sq(query, examples,
                                     SqParams{eps / 2.0, rho / m, delta / m}, base.derive(i));
    if (est < best.estimated_error) best = AgnosticResult{i, est};
  }
  return best;
}

}  // namespace tvind
