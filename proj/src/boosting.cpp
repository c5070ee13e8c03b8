#include "tvind/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "tvind/metrics.hpp"

namespace tvind {

namespace {

Hypothesis all_ones(std::size_t domain_size) {
  return Hypothesis{std::vector<std::uint8_t>(domain_size, 1)};
}

// Point labels of a realizable example distribution.
std::vector<std::uint8_t> label_map(const FiniteDistribution& examples, std::size_t domain_size) {
  std::vector<std::uint8_t> labels(domain_size, 0);
  std::vector<bool> seen(domain_size, false);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (examples.mass()[i] == 0.0) continue;
    const ItemId id = examples.support()[i];
    const std::uint32_t x = point_of(id);
    if (x >= domain_size) throw std::invalid_argument("boost: point outside domain");
    if (seen[x] && labels[x] != label_of(id)) {
      throw std::invalid_argument("boost: example distribution is not realizable");
    }
    seen[x] = true;
    labels[x] = label_of(id);
  }
  return labels;
}

Hypothesis majority_vote(const std::vector<Hypothesis>& hypotheses, std::size_t domain_size) {
  Hypothesis out;
  out.labels.resize(domain_size);
  for (std::size_t x = 0; x < domain_size; ++x) {
    int sum = 0;
    for (const auto& h : hypotheses) sum += h.labels[x] ? 1 : -1;
    out.labels[x] = sum >= 0 ? 1 : 0;  // sgn(0) resolves to 1
  }
  return out;
}

}  // namespace

std::size_t amplify_round_count(double beta, double rho, double beta_prime) {
  const double eta = std::sqrt(2.0 * rho / (1.0 + rho));
  const double denom = 1.0 - eta - beta / (1.0 - eta);
  if (!(denom > 0.0)) throw std::invalid_argument("amplify: beta too large for this rho");
  return static_cast<std::size_t>(std::ceil(std::log(3.0 / beta_prime) / denom));
}

AmplifyResult amplify(const LearningRule& rule, double alpha, double beta, double rho,
                      double rho_prime, double eps, double beta_prime,
                      const ReferenceMeasure& ref, const FiniteDistribution& examples,
                      const Tape& tape, const Tape& data_tape) {
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("amplify: rho outside [0,1)");
  const double eta = std::sqrt(2.0 * rho / (1.0 + rho));
  const double cap = (1.0 - eta) * (1.0 - eta);
  if (!(beta >= 0.0 && beta < cap)) {
    throw std::invalid_argument("amplify: beta must be below (1 - sqrt(2rho/(1+rho)))^2");
  }
  const std::size_t k = amplify_round_count(beta, rho, beta_prime);
  const double kd = static_cast<double>(k);

  const SeededRule seeded = derandomize(rule, ref);
  const Tape run_root = tape.derive("ampl-run");
  const Tape hh_root = tape.derive("ampl-hh");
  const Tape agn_root = tape.derive("ampl-agn");
  const Tape hh_data = data_tape.derive("ampl-hh-data");
  const Tape agn_data = data_tape.derive("ampl-agn-data");

  HhParams hh;
  hh.threshold = 0.75 * (1.0 - eta);
  hh.error = 0.25 * (1.0 - eta);
  hh.replicability = rho_prime / (2.0 * kd);
  hh.confidence = beta_prime / (3.0 * kd);

  for (std::size_t i = 0; i < k; ++i) {
    const Tape coupling_tape = run_root.derive(i);
    // Per-tape induced hypothesis law: exact when the dataset space is
    // enumerable, otherwise draw-by-draw against fresh samples.
    std::unique_ptr<ItemSampler> sampler;
    if (auto induced =
            exact_induced_distribution(seeded, examples, rule.sample_size, coupling_tape)) {
      sampler = std::make_unique<DistributionSampler>(*std::move(induced), hh_data.derive(i));
    } else {
      auto cursor = std::make_shared<TapeCursor>(hh_data.derive(i));
      sampler = std::make_unique<FunctionSampler>([&seeded, &examples, &rule, coupling_tape,
                                                   cursor]() {
        return seeded.execute(draw_dataset(examples, rule.sample_size, *cursor), coupling_tape);
      });
    }

    const auto list = replicable_heavy_hitters(*sampler, hh, hh_root.derive(i));
    if (list.empty()) continue;

    std::vector<std::size_t> indices;
    for (ItemId id : list) indices.push_back(static_cast<std::size_t>(id));
    DistributionSampler example_sampler(examples, agn_data.derive(i));
    const auto picked = replicable_agnostic_learner(
        rule.reachable.subclass(indices), example_sampler, eps / 2.0, beta_prime / (3.0 * kd),
        rho_prime / (2.0 * kd), agn_root.derive(i));
    if (picked.estimated_error <= alpha + eps / 2.0) {
      return AmplifyResult{rule.reachable[indices[picked.index]], false, i + 1,
                           picked.estimated_error};
    }
  }
  return AmplifyResult{all_ones(rule.reachable.domain_size()), true, k, 1.0};
}

std::optional<Dataset> rejection_sampling(const Dataset& input, std::size_t size_out,
                                          const SmoothMeasure& measure, TapeCursor& thresholds) {
  Dataset out;
  out.reserve(size_out);
  for (const auto& ex : input) {
    if (out.size() >= size_out) break;
    const double b = thresholds.next_uniform();
    if (ex.point >= measure.values.size()) {
      throw std::invalid_argument("rejection_sampling: point outside measure domain");
    }
    if (measure.values[ex.point] >= b) out.push_back(ex);
  }
  if (out.size() < size_out) return std::nullopt;
  return out;
}

double indist_test_measure(const SmoothMeasure& measure, ItemSampler& examples, const Tape& tape,
                           double rho, double beta, double eps) {
  const auto query = [&measure](ItemId id) {
    const std::uint32_t x = point_of(id);
    if (x >= measure.values.size()) {
      throw std::invalid_argument("indist_test_measure: point outside measure domain");
    }
    return measure.values[x];
  };
  return replicable_sq(query, examples, SqParams{eps / 3.0, rho, beta}, tape);
}

std::size_t boost_round_cap(const BoostParams& params) {
  return static_cast<std::size_t>(
      std::ceil(params.c_t / (params.eps * params.gamma * params.gamma)));
}

BoostResult smooth_boost(const LearningRule& weak_rule, const BoostParams& params,
                         const ReferenceMeasure& ref, const FiniteDistribution& examples,
                         const Tape& tape, const Tape& data_tape) {
  if (!(params.gamma > 0.0 && params.gamma < 0.5)) {
    throw std::invalid_argument("smooth_boost: gamma outside (0, 1/2)");
  }
  for (double x : {params.eps, params.rho_prime, params.beta_prime}) {
    if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument("smooth_boost: parameter outside (0,1)");
  }
  const std::size_t domain = weak_rule.reachable.domain_size();
  const std::vector<std::uint8_t> labels = label_map(examples, domain);
  const SeededRule seeded = derandomize(weak_rule, ref);

  const std::size_t t_rounds = boost_round_cap(params);
  const double theta = params.gamma / (2.0 + params.gamma);
  const std::size_t n_w = weak_rule.sample_size;
  const auto round_samples = static_cast<std::size_t>(
      std::ceil(static_cast<double>(n_w) / params.eps *
                std::log(static_cast<double>(t_rounds) / params.beta_prime)));

  BoostState state;
  state.margins.assign(domain, 0.0);
  SmoothMeasure mu = SmoothMeasure::ones(domain);

  BoostResult result;
  TapeCursor data(data_tape.derive("boost-data"));
  const Tape round_root = tape.derive("boost-round");
  const Tape test_data_root = data_tape.derive("boost-test-data");

  for (std::size_t t = 1; t <= t_rounds; ++t) {
    const Tape round = round_root.derive(t);
    const Dataset pool = draw_dataset(examples, round_samples, data);
    TapeCursor rejection(round.derive(1));
    const auto accepted = rejection_sampling(pool, n_w, mu, rejection);
    if (!accepted) {
      result.failed = true;
      result.rounds = t;
      return result;
    }
    const ItemId picked = seeded.execute(*accepted, round.derive(2));
    state.hypotheses.push_back(weak_rule.reachable[static_cast<std::size_t>(picked)]);
    state.round = t;

    // SmoothBoost measure update in the +-1 convention.
    double mu_min = 1.0, mu_max = 0.0;
    for (std::size_t x = 0; x < domain; ++x) {
      const double agree = state.hypotheses.back().labels[x] == labels[x] ? 1.0 : -1.0;
      state.margins[x] += agree - theta;
      mu.values[x] = state.margins[x] <= 0.0
                         ? 1.0
                         : std::pow(1.0 - params.gamma, state.margins[x] / 2.0);
      mu_min = std::min(mu_min, mu.values[x]);
      mu_max = std::max(mu_max, mu.values[x]);
    }

    DistributionSampler test_sampler(examples, test_data_root.derive(t));
    const double estimate = indist_test_measure(
        mu, test_sampler, round.derive(3), params.rho_prime / (3.0 * static_cast<double>(t_rounds)),
        params.beta_prime / (3.0 * static_cast<double>(t_rounds)), params.eps);

    const Hypothesis majority = majority_vote(state.hypotheses, domain);
    result.log.push_back(
        BoostRoundLog{t, estimate, population_loss(majority, examples), mu_min, mu_max});

    if (estimate <= 2.0 * params.eps / 3.0) {
      result.majority = majority;
      result.rounds = t;
      return result;
    }
  }
  result.failed = true;
  result.rounds = t_rounds;
  return result;
}

}  // namespace tvind
