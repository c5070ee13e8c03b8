#include "doctest.h"

#include <cmath>
#include <vector>

#include "tvind/fixtures.hpp"
#include "tvind/metrics.hpp"
#include "tvind/transforms.hpp"

using namespace tvind;

namespace {

FiniteDistribution two_point_uniform_labels() {
  return FiniteDistribution(
      {example_id(0, 0), example_id(0, 1), example_id(1, 0), example_id(1, 1)},
      {0.25, 0.25, 0.25, 0.25});
}

// Execution that ignores the coupling structure: the pick is keyed by both
// the shared tape and the sample, so paired runs agree only by chance.
SeededRule uncoupled_uniform_rule(std::size_t sample_size) {
  SeededRule rule;
  rule.base.sample_size = sample_size;
  rule.base.reachable = HypothesisClass(1, {Hypothesis{{0}}, Hypothesis{{1}}});
  const auto constant = FiniteDistribution::uniform({0, 1});
  rule.base.posterior = [constant](const Dataset&) { return constant; };
  rule.execute = [](const Dataset& sample, const Tape& tape) -> ItemId {
    std::uint64_t fp = 0xcbf29ce484222325ULL;
    for (const auto& ex : sample) {
      fp ^= example_id(ex.point, ex.label);
      fp *= 0x100000001b3ULL;
    }
    return tape.derive(fp).uniform(0) < 0.5 ? 0 : 1;
  };
  return rule;
}

}  // namespace

TEST_CASE("replicability_rate extremes") {
  auto det = make_noisy_constant_rule(NoisyConstantSpec{0.0, 2, 1, false, std::nullopt});
  auto seeded = derandomize(det, uniform_reference(det.reachable));
  auto labels = FiniteDistribution({example_id(0, 0), example_id(0, 1)}, {0.5, 0.5});
  CHECK(replicability_rate(seeded, labels, 2, 200, Tape(Seed{1, 1})).value ==
        doctest::Approx(1.0));

  // n = 16 keeps the two samples of a pair distinct, so the sample-keyed
  // picks are independent and agree half the time.
  auto uncoupled = uncoupled_uniform_rule(16);
  auto rate = replicability_rate(uncoupled, two_point_uniform_labels(), 16, 3000, Tape(Seed{1, 2}));
  CHECK(std::abs(rate.value - 0.5) < rate.ci + 0.02);

  CHECK_THROWS(replicability_rate(seeded, labels, 2, 50, Tape(Seed{1, 3})));
}

TEST_CASE("expected tv exact enumeration on the 0.15 fixture") {
  // Two-point domain, n = 1, posteriors differ by tv 0.3 exactly when the
  // labels differ, label distribution uniform: hand enumeration over the four
  // (S, S') label pairs gives 0.3 * 1/2 = 0.15.
  auto rule = make_noisy_constant_rule(NoisyConstantSpec{0.3, 1, 2, false, std::nullopt});
  auto est = expected_tv_indistinguishability(rule, two_point_uniform_labels(), 1, 0,
                                              Tape(Seed{2, 1}));
  CHECK(est.ci == 0.0);
  CHECK(est.value == doctest::Approx(0.15).epsilon(1e-12));

  // Sample-independent posterior: exactly zero.
  auto flat = make_noisy_constant_rule(NoisyConstantSpec{0.0, 1, 2, false, std::nullopt});
  CHECK(expected_tv_indistinguishability(flat, two_point_uniform_labels(), 1, 0, Tape(Seed{2, 2}))
            .value == doctest::Approx(0.0));
}

TEST_CASE("deterministic non-constant rule has positive expected tv matching enumeration") {
  auto erm = make_deterministic_erm(
      HypothesisClass(1, {Hypothesis{{0}}, Hypothesis{{1}}}), 1);
  auto labels = FiniteDistribution({example_id(0, 0), example_id(0, 1)}, {0.5, 0.5});
  auto est = expected_tv_indistinguishability(erm, labels, 1, 0, Tape(Seed{2, 3}));
  CHECK(est.ci == 0.0);
  // n = 1: the two label draws disagree half the time and then tv = 1.
  CHECK(est.value == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("exact enumeration agrees with Monte Carlo within 3 sigma") {
  auto rule = make_noisy_constant_rule(NoisyConstantSpec{0.7, 9, 1, false, std::nullopt});
  auto labels = FiniteDistribution({example_id(0, 0), example_id(0, 1)}, {0.5, 0.5});
  const double exact =
      expected_tv_indistinguishability(rule, labels, 9, 0, Tape(Seed{3, 1})).value;

  TapeCursor data(Tape(Seed{3, 2}).derive("mc"));
  std::vector<double> tvs;
  for (int i = 0; i < 20000; ++i) {
    const Dataset s = draw_dataset(labels, 9, data);
    const Dataset s2 = draw_dataset(labels, 9, data);
    tvs.push_back(tv_distance(rule.posterior(s), rule.posterior(s2)));
  }
  const auto mc = mean_estimate(tvs);
  CHECK(std::abs(mc.value - exact) <= mc.ci);
}

TEST_CASE("fixed prior tv and both lemma directions, exactly") {
  auto rule = make_noisy_constant_rule(NoisyConstantSpec{0.3, 1, 2, false, std::nullopt});
  auto labels = two_point_uniform_labels();
  const auto prior = fixed_prior_tv(rule, labels, 1, 0, Tape(Seed{4, 1}));
  const auto etv = expected_tv_indistinguishability(rule, labels, 1, 0, Tape(Seed{4, 2}));
  CHECK(prior.distance.ci == 0.0);
  // fixed_prior <= expected_tv <= 2 * fixed_prior with zero tolerance.
  CHECK(prior.distance.value <= etv.value + 1e-12);
  CHECK(etv.value <= 2.0 * prior.distance.value + 1e-12);

  // Sample-independent rule: prior equals the posterior, distance 0.
  auto flat = make_noisy_constant_rule(NoisyConstantSpec{0.0, 1, 2, false, std::nullopt});
  const auto fp = fixed_prior_tv(flat, labels, 1, 0, Tape(Seed{4, 3}));
  CHECK(fp.distance.value == doctest::Approx(0.0));
  CHECK(fp.prior.mass_of(0) == doctest::Approx(1.0));
}

TEST_CASE("high probability certificates convert to fixed-prior bounds") {
  auto rule = make_noisy_constant_rule(NoisyConstantSpec{0.3, 1, 2, false, std::nullopt});
  auto labels = two_point_uniform_labels();
  const auto prior = fixed_prior_tv(rule, labels, 1, 0, Tape(Seed{5, 1}));

  // Measure (eta, nu) certificates by enumeration and check
  // fixed_prior <= eta + nu - eta*nu for each.
  const auto enumeration = enumerate_datasets(labels, 1).value();
  for (double eta : {0.05, 0.1, 0.15, 0.2}) {
    double nu = 0.0;
    for (std::size_t i = 0; i < enumeration.datasets.size(); ++i) {
      const double d = tv_distance(rule.posterior(enumeration.datasets[i]), prior.prior);
      if (d > eta) nu += enumeration.weights[i];
    }
    CHECK(prior.distance.value <= eta + nu - eta * nu + 1e-12);
  }
}

TEST_CASE("global stability parameter on extremes") {
  auto det = make_noisy_constant_rule(NoisyConstantSpec{0.0, 2, 1, false, std::nullopt});
  auto seeded = derandomize(det, uniform_reference(det.reachable));
  auto labels = FiniteDistribution({example_id(0, 0), example_id(0, 1)}, {0.5, 0.5});
  auto top = global_stability_parameter(seeded, labels, 2, 300, Tape(Seed{6, 1}));
  CHECK(top.hypothesis == 0);
  CHECK(top.frequency.value == doctest::Approx(1.0));

  auto uncoupled = uncoupled_uniform_rule(2);
  auto half = global_stability_parameter(uncoupled, labels, 2, 3000, Tape(Seed{6, 2}));
  CHECK(std::abs(half.frequency.value - 0.5) < half.frequency.ci + 0.02);
}

TEST_CASE("modal mass dominates the independent-run collision rate") {
  // The collision-probability chain: Pr[X = X'] over independent executions
  // is the sum of squared masses, below the top point mass.
  auto fixture = make_globally_stable_fixture(0.4, 3, 2, 3);
  auto labels = realizable_distribution(fixture.base.reachable[0], {0.5, 0.5});
  auto top = global_stability_parameter(fixture, labels, 3, 3000, Tape(Seed{6, 3}));
  CHECK(top.consistent);
  // For this fixture the collision rate is 0.4^2 + 3 * 0.2^2 = 0.28.
  CHECK(std::abs(top.collision.value - 0.28) < top.collision.ci + 0.01);
  CHECK(top.frequency.value >= top.collision.value - top.frequency.ci - top.collision.ci);
}

TEST_CASE("generalization bound arithmetic and flat-rule pass") {
  auto flat = make_noisy_constant_rule(NoisyConstantSpec{0.0, 200, 1, false, std::nullopt});
  auto labels = FiniteDistribution({example_id(0, 0), example_id(0, 1)}, {0.5, 0.5});
  const auto check =
      generalization_gap_check(flat, labels, 200, 0.05, 0.0025, 300, Tape(Seed{7, 1}));
  CHECK(check.bound ==
        doctest::Approx(std::sqrt(std::log(40.0) / 400.0) + 0.05).epsilon(1e-12));
  CHECK(check.bound == doctest::Approx(0.09604 + 0.05).epsilon(1e-4));
  CHECK(check.pass);
}

TEST_CASE("generalization check on a deterministic ERM fixture") {
  const std::size_t d = 16;
  auto erm = make_deterministic_erm(stump_class(d), 64);
  auto target = threshold_hypothesis(d, 7);
  auto examples = realizable_distribution(target, std::vector<double>(d, 1.0 / d));
  const auto check = generalization_gap_check(erm, examples, 64, 0.05, 0.0025, 200,
                                              Tape(Seed{7, 2}));
  CHECK(check.pass);
}

TEST_CASE("induced distribution: exact and Monte Carlo agree") {
  auto fixture = make_globally_stable_fixture(0.4, 3, 2, 2);
  auto labels = realizable_distribution(fixture.base.reachable[0], {0.5, 0.5});
  const Tape shared = Tape(Seed{8, 1}).derive("shared");
  const auto exact = exact_induced_distribution(fixture, labels, 2, shared).value();
  const auto mc = induced_hypothesis_distribution(
      fixture, FiniteDistribution({example_id(0, 0)}, {1.0}), 40, shared, 20000,
      Tape(Seed{8, 2}));
  // 40 > log2(4096) forces the Monte Carlo path; same constant law either way.
  CHECK(tv_distance(exact, mc) < 0.02);
}

TEST_CASE("audit report on a noisy fixture") {
  auto rule = make_noisy_constant_rule(NoisyConstantSpec{0.4, 2, 1, false, std::nullopt});
  auto seeded = derandomize(rule, uniform_reference(rule.reachable));
  auto labels = FiniteDistribution({example_id(0, 0), example_id(0, 1)}, {0.5, 0.5});
  const auto report = audit_rule(seeded, labels, 2, 0.5, 400, Seed{9, 9});
  CHECK(report.trials == 400);
  CHECK(report.expected_tv.ci == 0.0);  // enumerable instance
  CHECK(report.expected_tv.value > 0.0);
  CHECK(report.fixed_prior.value <= report.expected_tv.value + 1e-12);
  CHECK(report.replicability.value >= 1.0 - disagreement_bound(report.expected_tv.value) -
                                          report.replicability.ci);
  CHECK(report.seed_hex == (Seed{9, 9}).to_hex());
}
