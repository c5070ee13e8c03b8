#include "doctest.h"

#include <cmath>
#include <map>
#include <vector>

#include "tvind/fixtures.hpp"
#include "tvind/metrics.hpp"
#include "tvind/transforms.hpp"

using namespace tvind;

namespace {

FiniteDistribution uniform_labels_domain1() {
  return FiniteDistribution({example_id(0, 0), example_id(0, 1)}, {0.5, 0.5});
}

}  // namespace

TEST_CASE("derandomize preserves the posterior law") {
  auto rule = make_noisy_constant_rule(NoisyConstantSpec{0.6, 2, 1, false, std::nullopt});
  auto seeded = derandomize(rule, uniform_reference(rule.reachable));

  Dataset s = {{0, 1}, {0, 0}};  // p = 0.3
  const auto posterior = rule.posterior(s);
  const Tape tape = Tape(Seed{6, 1}).derive("marginal");
  std::map<ItemId, int> counts;
  const int n = 40000;
  for (int i = 0; i < n; ++i) ++counts[seeded.execute(s, tape.derive(i))];
  double tv = 0.0;
  for (ItemId id : {ItemId{0}, ItemId{1}}) {
    tv += std::abs(double(counts[id]) / n - posterior.mass_of(id));
  }
  CHECK(tv / 2 <= 0.02);
}

TEST_CASE("derandomize rejects a reference that misses the reachable set") {
  auto rule = make_noisy_constant_rule(NoisyConstantSpec{0.5, 1, 1, false, std::nullopt});
  ReferenceMeasure bad{FiniteDistribution({0}, {1.0}), true};
  CHECK_THROWS(derandomize(rule, bad));
}

TEST_CASE("constant posterior derandomizes to a perfectly replicable rule") {
  auto rule = make_noisy_constant_rule(NoisyConstantSpec{0.0, 2, 1, false, std::nullopt});
  auto seeded = derandomize(rule, uniform_reference(rule.reachable));
  auto rate = replicability_rate(seeded, uniform_labels_domain1(), 2, 300, Tape(Seed{6, 2}));
  CHECK(rate.value == doctest::Approx(1.0));

  auto est = verify_repl_implies_tv(seeded, uniform_labels_domain1(), 2, 300, Tape(Seed{6, 3}));
  CHECK(est.repl_disagreement == doctest::Approx(0.0));
  CHECK(est.expected_tv == doctest::Approx(0.0));
  CHECK(est.consistent);
}

TEST_CASE("derandomized disagreement respects 2rho/(1+rho)") {
  // Enumerated expected TV is the oracle; the coupled disagreement must stay
  // below its bound.
  auto rule = make_noisy_constant_rule(NoisyConstantSpec{0.5, 2, 1, false, std::nullopt});
  auto labels = uniform_labels_domain1();
  const double rho_hat =
      expected_tv_indistinguishability(rule, labels, 2, 0, Tape(Seed{})).value;
  CHECK(rho_hat > 0.05);

  auto seeded = derandomize(rule, uniform_reference(rule.reachable));
  auto rate = replicability_rate(seeded, labels, 2, 4000, Tape(Seed{6, 4}));
  const double disagreement = 1.0 - rate.value;
  CHECK(disagreement <= disagreement_bound(rho_hat) + rate.ci);
  // And the replicability => TV direction in the same breath.
  CHECK(rho_hat <= disagreement + rate.ci);
}

TEST_CASE("verify_repl_implies_tv holds across seeded configurations") {
  auto labels = uniform_labels_domain1();
  for (int cfg = 0; cfg < 20; ++cfg) {
    const double scale = 0.05 + 0.045 * cfg;
    auto rule = make_noisy_constant_rule(NoisyConstantSpec{scale, 3, 1, false, std::nullopt});
    auto seeded = derandomize(rule, uniform_reference(rule.reachable));
    auto est = verify_repl_implies_tv(seeded, labels, 3, 400, Tape(Seed{7, 1}).derive(cfg));
    CHECK(est.consistent);
    // The exact enumerated TV agrees with the sampled estimate.
    const double exact = expected_tv_indistinguishability(rule, labels, 3, 0, Tape(Seed{})).value;
    CHECK(std::abs(est.expected_tv - exact) <= est.tv_ci + 1e-9);
  }
  CHECK_THROWS(verify_repl_implies_tv(
      derandomize(make_noisy_constant_rule(NoisyConstantSpec{0.1, 1, 1, false, std::nullopt}),
                  uniform_reference(HypothesisClass(
                      1, {Hypothesis{{0}}, Hypothesis{{1}}}))),
      labels, 1, 50, Tape(Seed{})));
}

TEST_CASE("global_to_replicable selects the stable hypothesis") {
  auto fixture = make_globally_stable_fixture(0.4, 3, 2, 3);
  auto examples = realizable_distribution(fixture.base.reachable[0], {0.5, 0.5});
  // The induced output law over fresh (S, r): the fixture's constant posterior.
  const auto induced = exact_output_distribution(fixture.base, examples, 3).value();

  const double beta_prime = 0.1, rho_prime = 0.4, alpha_prime = 0.4;
  const Tape tape = Tape(Seed{8, 1}).derive("g2r");
  const int runs = 150;
  int target_hits = 0, failures = 0;
  for (int i = 0; i < runs; ++i) {
    DistributionSampler hyp_sampler(induced, tape.derive("hyp-data").derive(i));
    DistributionSampler ex_sampler(examples, tape.derive("ex-data").derive(i));
    const auto out =
        global_to_replicable(hyp_sampler, fixture.base.reachable, ex_sampler, 0.4, alpha_prime,
                             beta_prime, rho_prime, tape.derive("internal").derive(i));
    failures += out.failed;
    target_hits += !out.failed && out.hypothesis == 0;
  }
  CHECK(double(target_hits) / runs >= 1.0 - beta_prime - 3 * std::sqrt(0.1 * 0.9 / runs));
  CHECK(failures <= runs / 10);
}

TEST_CASE("global_to_replicable paired runs agree") {
  auto fixture = make_globally_stable_fixture(0.4, 3, 2, 3);
  auto examples = realizable_distribution(fixture.base.reachable[0], {0.5, 0.5});
  const auto induced = exact_output_distribution(fixture.base, examples, 3).value();

  const double rho_prime = 0.4;
  const Tape tape = Tape(Seed{8, 2}).derive("g2r-pair");
  const int pairs = 120;
  int agree = 0;
  for (int i = 0; i < pairs; ++i) {
    const Tape shared = tape.derive("shared").derive(i);
    ItemId out[2];
    bool failed = false;
    for (int side = 0; side < 2; ++side) {
      DistributionSampler hyp_sampler(induced, tape.derive("hyp").derive(i * 2 + side));
      DistributionSampler ex_sampler(examples, tape.derive("ex").derive(i * 2 + side));
      const auto r = global_to_replicable(hyp_sampler, fixture.base.reachable, ex_sampler, 0.4,
                                          0.4, 0.1, rho_prime, shared);
      failed = failed || r.failed;
      out[side] = r.hypothesis;
    }
    agree += !failed && out[0] == out[1];
  }
  CHECK(double(agree) / pairs >= 1.0 - rho_prime - 3 * std::sqrt(0.25 / pairs));
}

TEST_CASE("deterministic accurate learner passes straight through") {
  // eta = 1: the sole output is the sole heavy hitter.
  auto fixture = make_globally_stable_fixture(1.0, 1, 2, 3);
  auto examples = realizable_distribution(fixture.base.reachable[0], {0.5, 0.5});
  const auto induced = exact_output_distribution(fixture.base, examples, 3).value();
  const Tape tape = Tape(Seed{8, 3}).derive("g2r-det");
  int hits = 0;
  const int runs = 100;
  for (int i = 0; i < runs; ++i) {
    DistributionSampler hyp_sampler(induced, tape.derive("h").derive(i));
    DistributionSampler ex_sampler(examples, tape.derive("e").derive(i));
    const auto out = global_to_replicable(hyp_sampler, fixture.base.reachable, ex_sampler, 1.0,
                                          0.4, 0.1, 0.4, tape.derive(i));
    hits += !out.failed && out.hypothesis == 0;
  }
  CHECK(hits >= 95);
}

TEST_CASE("listglobal plan arithmetic") {
  ListGlobalParams params;
  params.eta = 0.2;
  params.rho = 0.2;
  params.alpha = 0.1;
  params.beta = 0.1;
  params.list_size = 4;
  params.constant_scale = 1.0;
  const auto plan = listglobal_plan(params);
  CHECK(plan.tau == doctest::Approx(0.1));
  CHECK(plan.gamma == doctest::Approx(std::log(4.0 / 0.02) / 0.1));
  CHECK(plan.gamma == doctest::Approx(52.983).epsilon(1e-4));
  CHECK(plan.k1 == 530);
}

TEST_CASE("listglobal_to_tv collapses a constant list learner to a point mass") {
  ListGlobalParams params;
  params.eta = 0.5;
  params.rho = 0.4;
  params.alpha = 0.0;
  params.beta = 0.1;
  params.list_size = 1;
  params.constant_scale = 0.05;  // desk-scale constants for a unit test
  const auto posterior = listglobal_to_tv(
      [](const Tape&) { return std::vector<ItemId>{7}; }, params, Tape(Seed{9, 1}));
  CHECK(posterior.size() == 1);
  CHECK(posterior.mass_of(7) == doctest::Approx(1.0));
}

TEST_CASE("listglobal_to_tv errors when nothing is frequent") {
  ListGlobalParams params;
  params.eta = 0.9;
  params.rho = 0.4;
  params.alpha = 0.0;
  params.beta = 0.1;
  params.list_size = 1;
  params.constant_scale = 1.0;  // k1 > 1 so a one-off singleton is not frequent
  CHECK(listglobal_plan(params).k1 > 1);
  // Every call emits a fresh singleton, so no hypothesis reaches tau * k1.
  std::size_t counter = 0;
  CHECK_THROWS(listglobal_to_tv(
      [&counter](const Tape&) { return std::vector<ItemId>{counter++}; }, params,
      Tape(Seed{9, 2})));
}

TEST_CASE("tv_to_dp plan arithmetic from the proof constants") {
  TvToDpParams params;
  params.alpha = 0.0;
  params.beta = 0.05;
  params.rho = 0.1;
  params.alpha_prime = 0.1;
  params.beta_prime = 0.1;
  params.epsilon = 1.0;
  params.delta = 1e-3;
  const auto plan = tv_to_dp_plan(params, 4);
  CHECK(plan.rho_prime == doctest::Approx(0.18181818).epsilon(1e-6));
  CHECK(plan.p == doctest::Approx(0.38409).epsilon(1e-4));
  CHECK(plan.q == doctest::Approx(0.67872).epsilon(1e-4));
  CHECK(plan.k_prime == 9);  // ceil(ln(30)/0.38409)
  CHECK(plan.eta == doctest::Approx(0.67872 / 9.0).epsilon(1e-4));
  CHECK(plan.eta == doctest::Approx(0.07541).epsilon(1e-3));
  CHECK(plan.samples_per_run == plan.k * plan.k_prime * 4);
  // k covers both the spec constant and the histogram validity bound.
  const std::size_t hist_n = stable_histogram_required_n(plan.eta, params.beta_prime / 3.0,
                                                         params.epsilon / 2.0, params.delta);
  CHECK(plan.k * plan.k_prime >= hist_n);
}

TEST_CASE("tv_to_dp parameter validation") {
  TvToDpParams params;
  params.alpha = 0.6;  // outside [0, 1/2)
  params.beta = 0.05;
  params.rho = 0.1;
  params.alpha_prime = 0.1;
  params.beta_prime = 0.1;
  params.epsilon = 1.0;
  params.delta = 1e-3;
  CHECK_THROWS(tv_to_dp_plan(params, 4));
  params.alpha = 0.0;
  params.beta = 0.9;  // above (1-rho)/(1+rho)
  CHECK_THROWS(tv_to_dp_plan(params, 4));
  params.beta = 0.05;
  CHECK_NOTHROW(tv_to_dp_plan(params, 4));
}

TEST_CASE("tv_to_dp degenerate deterministic pipeline returns the target") {
  auto rule = make_noisy_constant_rule(NoisyConstantSpec{0.0, 2, 1, false, std::nullopt});
  TvToDpParams params;
  params.alpha = 0.0;
  params.beta = 0.01;
  params.rho = 0.0;
  params.alpha_prime = 0.2;
  params.beta_prime = 0.2;
  params.epsilon = 1.0;
  params.delta = 1e-3;
  const auto plan = tv_to_dp_plan(params, 2);
  auto labels = FiniteDistribution({example_id(0, 0)}, {1.0});
  TapeCursor data(Tape(Seed{10, 1}).derive("pipe-data"));
  const Dataset sample = draw_dataset(labels, plan.samples_per_run, data);

  const auto out =
      tv_to_dp(rule, sample, params, uniform_reference(rule.reachable), Tape(Seed{10, 2}));
  REQUIRE_FALSE(out.failed);
  CHECK(out.hypothesis == 0);
  for (ItemId x : out.coupled_outputs) CHECK(x == 0);
}

TEST_CASE("tv_to_dp refuses data-dependent references") {
  auto rule = make_noisy_constant_rule(NoisyConstantSpec{0.0, 2, 1, false, std::nullopt});
  TvToDpParams params;
  params.alpha = 0.0;
  params.beta = 0.01;
  params.rho = 0.0;
  params.alpha_prime = 0.2;
  params.beta_prime = 0.2;
  params.epsilon = 1.0;
  params.delta = 1e-3;
  auto dependent = mixture_reference(
      {FiniteDistribution({0}, {1.0}), FiniteDistribution({1}, {1.0})},
      MixtureWeighting::kUniform);
  Dataset sample(tv_to_dp_plan(params, 2).samples_per_run, Example{0, 0});
  CHECK_THROWS(tv_to_dp(rule, sample, params, dependent, Tape(Seed{10, 3})));
}

TEST_CASE("a single example swap moves at most one coupled output per batch") {
  // The jumpy fixture flips its posterior when the marker point appears, so a
  // swap can actually change the affected output.
  Hypothesis h0{{0, 1}};
  Hypothesis h1{{1, 0}};
  auto rule = make_noisy_constant_rule(
      NoisyConstantSpec{1.0, 4, 2, true, std::make_pair(h0, h1)});
  TvToDpParams params;
  params.alpha = 0.0;
  params.beta = 0.05;
  params.rho = 0.1;
  params.alpha_prime = 0.2;
  params.beta_prime = 0.2;
  params.epsilon = 1.0;
  params.delta = 1e-3;
  const auto plan = tv_to_dp_plan(params, 4);

  auto examples = realizable_distribution(h0, {0.95, 0.05});
  TapeCursor data(Tape(Seed{11, 1}).derive("perturb-data"));
  Dataset sample = draw_dataset(examples, plan.samples_per_run, data);
  const Tape tape = Tape(Seed{11, 2});
  const auto base = tv_to_dp(rule, sample, params, uniform_reference(rule.reachable), tape);

  int changed_total = 0;
  for (std::size_t swap_pos : {std::size_t{0}, std::size_t{5}, plan.samples_per_run / 2,
                               plan.samples_per_run - 1}) {
    Dataset mutated = sample;
    mutated[swap_pos].point = mutated[swap_pos].point == 0 ? 1 : 0;
    mutated[swap_pos].label = h0.labels[mutated[swap_pos].point];
    const auto other = tv_to_dp(rule, mutated, params, uniform_reference(rule.reachable), tape);
    const std::size_t affected_slot = swap_pos / 4;  // n = 4 examples per dataset
    const std::size_t affected_batch = affected_slot / plan.k;
    std::size_t diffs = 0;
    for (std::size_t idx = 0; idx < base.coupled_outputs.size(); ++idx) {
      if (base.coupled_outputs[idx] != other.coupled_outputs[idx]) {
        ++diffs;
        CHECK(idx == affected_slot);
        CHECK(idx / plan.k == affected_batch);
      }
    }
    CHECK(diffs <= 1);
    changed_total += diffs;
  }
  // At least one of the swaps flips the affected posterior to the decoy side.
  CHECK(changed_total >= 1);
}
