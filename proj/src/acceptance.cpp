#include "tvind/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "tvind/boosting.hpp"
#include "tvind/coupling.hpp"
#include "tvind/core.hpp"
#include "tvind/dp.hpp"
#include "tvind/fixtures.hpp"
#include "tvind/metrics.hpp"
#include "tvind/parallel.hpp"
#include "tvind/replicable.hpp"
#include "tvind/transforms.hpp"

namespace tvind {

namespace {

struct Ctx {
  Tape tape;
  std::size_t jobs = 1;
};

double three_sigma(double rate, std::size_t n) {
  const double v = std::max(rate * (1.0 - rate), 1.0 / static_cast<double>(n));
  return 3.0 * std::sqrt(v / static_cast<double>(n));
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(5);
  os << x;
  return os.str();
}

// --- 1. Pairwise optimal coupling bound -----------------------------------

CriterionResult coupling_bound(const Ctx& ctx) {
  CriterionResult r{1, "coupling bound and marginal fidelity", false, "", 0};
  const auto p = FiniteDistribution({0, 1, 2}, {0.5, 0.3, 0.2});
  const auto q = FiniteDistribution({0, 1, 2}, {0.3, 0.3, 0.4});
  const HypothesisClass reachable(2, {Hypothesis{{0, 0}}, Hypothesis{{0, 1}}, Hypothesis{{1, 0}}});
  const auto ref = uniform_reference(reachable);
  const double tv = tv_distance(p, q);
  if (std::abs(tv - 0.2) > 1e-12) {
    r.detail = "tv distance is not exactly 0.2";
    return r;
  }

  const std::size_t pairs = 100000;
  std::vector<std::uint8_t> differ(pairs);
  std::vector<std::uint8_t> side_p(pairs), side_q(pairs);
  const Tape root = ctx.tape.derive("pairs");
  parallel_for(pairs, ctx.jobs, [&](std::size_t i) {
    PoissonStripStream stream(root.derive(i), ref.dist);
    const ItemId a = coupled_sample(p, stream);
    const ItemId b = coupled_sample(q, stream);
    differ[i] = a != b;
    side_p[i] = static_cast<std::uint8_t>(a);
    side_q[i] = static_cast<std::uint8_t>(b);
  });
  std::size_t d = 0;
  std::vector<double> cp(3, 0.0), cq(3, 0.0);
  for (std::size_t i = 0; i < pairs; ++i) {
    d += differ[i];
    cp[side_p[i]] += 1.0;
    cq[side_q[i]] += 1.0;
  }
  const double rate = static_cast<double>(d) / pairs;
  double tvp = 0.0, tvq = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    tvp += std::abs(cp[k] / pairs - p.mass()[k]);
    tvq += std::abs(cq[k] / pairs - q.mass()[k]);
  }
  tvp /= 2;
  tvq /= 2;

  const double hi = 2.0 * tv / (1.0 + tv) + 0.01;
  r.pass = rate >= 0.19 && rate <= hi && tvp <= 0.02 && tvq <= 0.02;
  r.detail = "disagreement " + fmt(rate) + " in [0.19, " + fmt(hi) + "], marginal tv " + fmt(tvp) +
             "/" + fmt(tvq) + " <= 0.02";
  return r;
}

// --- 2. TV => replicability through the rejection coupling -----------------

// Enumeration oracle: expected |p(S) - p(S')| for the noisy-constant rule
// with uniform labels; independent of the implementation path.
double noisy_expected_tv_oracle(double scale, std::size_t n) {
  const std::size_t patterns = 1ull << n;
  double acc = 0.0;
  const double w = 1.0 / static_cast<double>(patterns);
  for (std::size_t a = 0; a < patterns; ++a) {
    for (std::size_t b = 0; b < patterns; ++b) {
      const double fa = static_cast<double>(__builtin_popcountll(a)) / static_cast<double>(n);
      const double fb = static_cast<double>(__builtin_popcountll(b)) / static_cast<double>(n);
      acc += w * w * std::abs(scale * fa - scale * fb);
    }
  }
  return acc;
}

CriterionResult tv_to_replicability(const Ctx& ctx) {
  CriterionResult r{2, "tv => replicability disagreement bound", false, "", 0};
  const auto labels = FiniteDistribution({example_id(0, 0), example_id(0, 1)}, {0.5, 0.5});
  const std::size_t n = 2;
  const double base = noisy_expected_tv_oracle(1.0, n);  // 0.375 at n = 2
  std::ostringstream detail;
  bool ok = true;
  int cfg = 0;
  for (double target : {0.05, 0.1, 0.25}) {
    const double scale = target / base;
    const double rho_hat = noisy_expected_tv_oracle(scale, n);
    auto rule = make_noisy_constant_rule(NoisyConstantSpec{scale, n, 1, false, std::nullopt});
    auto seeded = derandomize(rule, uniform_reference(rule.reachable));

    const std::size_t pairs = 10000;
    std::vector<std::uint8_t> differ(pairs);
    const Tape root = ctx.tape.derive("rho").derive(cfg++);
    parallel_for(pairs, ctx.jobs, [&](std::size_t i) {
      TapeCursor data(root.derive("data").derive(i));
      const Dataset s = draw_dataset(labels, n, data);
      const Dataset s2 = draw_dataset(labels, n, data);
      const Tape shared = root.derive("shared").derive(i);
      differ[i] = seeded.execute(s, shared) != seeded.execute(s2, shared);
    });
    std::size_t d = 0;
    for (auto x : differ) d += x;
    const double rate = static_cast<double>(d) / pairs;
    const double bound = disagreement_bound(rho_hat) + three_sigma(rate, pairs);
    ok = ok && rate <= bound && std::abs(rho_hat - target) < 1e-12;
    detail << "rho " << fmt(target) << ": rate " << fmt(rate) << " <= " << fmt(bound) << "; ";
  }
  r.pass = ok;
  r.detail = detail.str();
  return r;
}

// --- 3. Replicability => TV on every fixture -------------------------------

CriterionResult replicability_to_tv(const Ctx& ctx) {
  CriterionResult r{3, "replicability => tv across the fixture suite", false, "", 0};
  const auto labels1 = FiniteDistribution({example_id(0, 0), example_id(0, 1)}, {0.5, 0.5});
  bool ok = true;
  std::ostringstream detail;
  int idx = 0;

  const auto check = [&](const SeededRule& rule, const FiniteDistribution& d, std::size_t n) {
    const auto est = verify_repl_implies_tv(rule, d, n, 1500, ctx.tape.derive("fix").derive(idx));
    ok = ok && est.consistent;
    detail << "f" << idx << ": tv " << fmt(est.expected_tv) << " <= dis "
           << fmt(est.repl_disagreement) << "+ci; ";
    ++idx;
  };

  for (double scale : {0.0, 0.05 / 0.375, 0.1 / 0.375, 0.25 / 0.375}) {
    auto rule = make_noisy_constant_rule(NoisyConstantSpec{scale, 2, 1, false, std::nullopt});
    check(derandomize(rule, uniform_reference(rule.reachable)), labels1, 2);
  }
  {
    auto rule = make_noisy_constant_rule(NoisyConstantSpec{1.0, 4, 1, true, std::nullopt});
    auto skewed = FiniteDistribution({example_id(0, 0), example_id(0, 1)}, {0.9, 0.1});
    check(derandomize(rule, uniform_reference(rule.reachable)), skewed, 4);
  }
  {
    auto fixture = make_globally_stable_fixture(0.4, 3, 2, 3);
    auto d = realizable_distribution(fixture.base.reachable[0], {0.5, 0.5});
    check(fixture, d, 3);
  }
  r.pass = ok;
  r.detail = detail.str();
  return r;
}

// --- 4. Replicable heavy hitters -------------------------------------------

CriterionResult heavy_hitters(const Ctx& ctx) {
  CriterionResult r{4, "heavy hitters correctness and replicability", false, "", 0};
  const auto dist = FiniteDistribution({0, 1, 2}, {0.5, 0.3, 0.2});
  const HhParams params{0.36, 0.05, 0.2, 0.2};
  const std::size_t pairs = 500;
  std::vector<std::uint8_t> wrong(pairs), agree(pairs);
  const Tape root = ctx.tape.derive("hh");
  parallel_for(pairs, ctx.jobs, [&](std::size_t i) {
    const Tape shared = root.derive("shared").derive(i);
    DistributionSampler s1(dist, root.derive("d1").derive(i));
    DistributionSampler s2(dist, root.derive("d2").derive(i));
    const auto l1 = replicable_heavy_hitters(s1, params, shared);
    const auto l2 = replicable_heavy_hitters(s2, params, shared);
    // 0.5 > v + eps forces id 0 in; 0.3 and 0.2 sit below v - eps.
    wrong[i] = !(l1 == std::vector<ItemId>{0});
    agree[i] = l1 == l2;
  });
  std::size_t w = 0, a = 0;
  for (std::size_t i = 0; i < pairs; ++i) {
    w += wrong[i];
    a += agree[i];
  }
  const double fail_rate = static_cast<double>(w) / pairs;
  const double agree_rate = static_cast<double>(a) / pairs;
  r.pass = fail_rate <= 0.2 + three_sigma(fail_rate, pairs) &&
           agree_rate >= 0.8 - three_sigma(agree_rate, pairs);
  r.detail =
      "failure " + fmt(fail_rate) + " <= 0.2+3s, agreement " + fmt(agree_rate) + " >= 0.8-3s";
  return r;
}

// --- 5. Replicable SQ oracle ------------------------------------------------

CriterionResult sq_oracle(const Ctx& ctx) {
  CriterionResult r{5, "sq oracle tolerance and agreement", false, "", 0};
  const auto dist = FiniteDistribution({0, 1}, {0.5, 0.5});
  const SqParams params{0.25, 0.5, 0.05};
  const auto query = [](ItemId id) { return id == 1 ? 1.0 : 0.0; };
  const std::size_t pairs = 1000;
  std::vector<std::uint8_t> out_of_band(pairs), agree(pairs);
  const Tape root = ctx.tape.derive("sq");
  parallel_for(pairs, ctx.jobs, [&](std::size_t i) {
    const Tape shared = root.derive("shared").derive(i);
    DistributionSampler s1(dist, root.derive("d1").derive(i));
    DistributionSampler s2(dist, root.derive("d2").derive(i));
    const double e1 = replicable_sq(query, s1, params, shared);
    const double e2 = replicable_sq(query, s2, params, shared);
    out_of_band[i] = std::abs(e1 - 0.5) > params.tolerance + 1e-12;
    agree[i] = e1 == e2;
  });
  std::size_t oob = 0, a = 0;
  for (std::size_t i = 0; i < pairs; ++i) {
    oob += out_of_band[i];
    a += agree[i];
  }
  const double fail_rate = static_cast<double>(oob) / pairs;
  const double agree_rate = static_cast<double>(a) / pairs;
  r.pass = fail_rate <= 0.05 + three_sigma(fail_rate, pairs) &&
           agree_rate >= 0.5 - three_sigma(agree_rate, pairs);
  r.detail = "tolerance failure " + fmt(fail_rate) + " <= 0.05+3s, agreement " + fmt(agree_rate) +
             " >= 0.5-3s";
  return r;
}

// --- 6. Exponential mechanism exact DP --------------------------------------

CriterionResult exp_mechanism_exact_dp(const Ctx&) {
  CriterionResult r{6, "exponential mechanism exact eps-DP", false, "", 0};
  const std::size_t domain = 6, n = 8;
  const HypothesisClass hyps(domain,
                             {Hypothesis{{0, 0, 0, 0, 0, 0}}, Hypothesis{{1, 1, 1, 1, 1, 1}},
                              Hypothesis{{0, 1, 0, 1, 0, 1}}, Hypothesis{{0, 0, 1, 1, 1, 1}}});
  std::vector<Example> types;
  for (std::uint32_t x = 0; x < domain; ++x) {
    types.push_back(Example{x, 0});
    types.push_back(Example{x, 1});
  }
  const double eps = 1.0;

  // Laws for every size-8 multiset over the 12 example types.
  std::vector<std::vector<std::size_t>> datasets;
  {
    std::vector<std::size_t> cur(types.size(), 0);
    const std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos,
                                                                  std::size_t left) {
      if (pos + 1 == types.size()) {
        cur[pos] = left;
        datasets.push_back(cur);
        return;
      }
      for (std::size_t c = 0; c <= left; ++c) {
        cur[pos] = c;
        rec(pos + 1, left - c);
      }
    };
    rec(0, n);
  }
  const auto key_of = [](const std::vector<std::size_t>& counts) {
    std::string key;
    for (auto c : counts) key.push_back(static_cast<char>('0' + c));
    return key;
  };
  std::unordered_map<std::string, std::vector<double>> laws;
  laws.reserve(datasets.size() * 2);
  for (const auto& counts : datasets) {
    Dataset s;
    s.reserve(n);
    for (std::size_t i = 0; i < types.size(); ++i) {
      for (std::size_t c = 0; c < counts[i]; ++c) s.push_back(types[i]);
    }
    laws.emplace(key_of(counts), exp_mechanism_distribution(hyps, s, eps).mass());
  }

  double worst = 0.0;
  std::size_t pair_count = 0;
  for (const auto& counts : datasets) {
    const auto& base = laws.at(key_of(counts));
    for (std::size_t from = 0; from < types.size(); ++from) {
      if (counts[from] == 0) continue;
      for (std::size_t to = 0; to < types.size(); ++to) {
        if (to == from) continue;
        auto moved = counts;
        --moved[from];
        ++moved[to];
        const auto& other = laws.at(key_of(moved));
        for (std::size_t h = 0; h < base.size(); ++h) {
          worst = std::max(worst, std::abs(std::log(base[h]) - std::log(other[h])));
        }
        ++pair_count;
      }
    }
  }
  r.pass = worst <= eps + 1e-9;
  r.detail = "max |log ratio| " + fmt(worst) + " <= 1+1e-9 over " + std::to_string(pair_count) +
             " neighboring pairs";
  return r;
}

// --- 7. Stable histogram -----------------------------------------------------

CriterionResult stable_histogram_accuracy(const Ctx& ctx) {
  CriterionResult r{7, "stable histogram release accuracy", false, "", 0};
  std::vector<ItemId> items;
  items.insert(items.end(), 2400, 1);
  items.insert(items.end(), 1600, 2);
  const double eta = 0.2, beta = 0.1, eps = 1.0, delta = 1e-4;
  const std::size_t runs = 500;
  std::vector<std::uint8_t> good(runs);
  const Tape root = ctx.tape.derive("hist");
  parallel_for(runs, ctx.jobs, [&](std::size_t i) {
    const auto out = stable_histogram(items, eta, beta, eps, delta, root.derive(i));
    bool ok = out.size() == 2;
    for (const auto& e : out) {
      const double truth = e.item == 1 ? 0.6 : 0.4;
      ok = ok && std::abs(e.estimate - truth) <= eta;
    }
    good[i] = ok;
  });
  std::size_t g = 0;
  for (auto x : good) g += x;
  const double rate = static_cast<double>(g) / runs;
  r.pass = rate >= 0.9 - three_sigma(rate, runs);
  r.detail = "both released in-band in " + fmt(rate) + " >= 0.9-3s of runs (n=4000)";
  return r;
}

// --- 8. TV => DP pipeline -----------------------------------------------------

CriterionResult tv_to_dp_pipeline(const Ctx& ctx) {
  CriterionResult r{8, "tv => dp pipeline", false, "", 0};
  std::ostringstream detail;

  // (a) Degenerate deterministic case.
  bool pass_a = true;
  {
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
    const auto labels = FiniteDistribution({example_id(0, 0)}, {1.0});
    const auto ref = uniform_reference(rule.reachable);
    const std::size_t runs = 100;
    std::vector<std::uint8_t> good(runs);
    const Tape root = ctx.tape.derive("det");
    parallel_for(runs, ctx.jobs, [&](std::size_t i) {
      TapeCursor data(root.derive("data").derive(i));
      const Dataset sample = draw_dataset(labels, plan.samples_per_run, data);
      const auto out = tv_to_dp(rule, sample, params, ref, root.derive("run").derive(i));
      good[i] = !out.failed && out.hypothesis == 0;
    });
    std::size_t g = 0;
    for (auto x : good) g += x;
    const double rate = static_cast<double>(g) / runs;
    pass_a = rate >= 1.0 - params.beta_prime;
    detail << "deterministic: target rate " << fmt(rate) << " >= 0.8; ";
  }

  // (b) rho = 0.1, beta = 0.05, alpha = 0 fixture.
  Hypothesis h0{{0, 1}};
  Hypothesis h1{{1, 0}};
  const std::size_t n = 16;
  const double q = 1.0 - std::pow(0.95, 1.0 / 16.0);
  auto rule = make_noisy_constant_rule(NoisyConstantSpec{1.0, n, 2, true, std::make_pair(h0, h1)});
  const auto examples = realizable_distribution(h0, {1.0 - q, q});
  TvToDpParams params;
  params.alpha = 0.0;
  params.beta = 0.05;
  params.rho = 0.1;
  params.alpha_prime = 0.1;
  params.beta_prime = 0.2;
  params.epsilon = 1.0;
  params.delta = 1e-3;
  const auto plan = tv_to_dp_plan(params, n);
  const auto ref = uniform_reference(rule.reachable);

  bool pass_b = true;
  {
    const std::size_t runs = 100;
    std::vector<std::uint8_t> good(runs);
    const Tape root = ctx.tape.derive("noisy");
    parallel_for(runs, ctx.jobs, [&](std::size_t i) {
      TapeCursor data(root.derive("data").derive(i));
      const Dataset sample = draw_dataset(examples, plan.samples_per_run, data);
      const auto out = tv_to_dp(rule, sample, params, ref, root.derive("run").derive(i));
      good[i] = !out.failed &&
                population_loss(rule.reachable[static_cast<std::size_t>(out.hypothesis)],
                                examples) <= params.alpha_prime;
    });
    std::size_t g = 0;
    for (auto x : good) g += x;
    const double rate = static_cast<double>(g) / runs;
    pass_b = rate >= 1.0 - params.beta_prime - three_sigma(rate, runs);
    detail << "noisy: error<=0.1 rate " << fmt(rate) << " >= 0.8-3s (k=" << plan.k
           << ", k'=" << plan.k_prime << "); ";
  }

  // (c) Perturbation robustness of the coupling stage.
  bool pass_c = true;
  {
    const Tape root = ctx.tape.derive("perturb");
    TapeCursor data(root.derive("data"));
    Dataset sample = draw_dataset(examples, plan.samples_per_run, data);
    const Tape run = root.derive("run");
    const auto base = tv_to_dp(rule, sample, params, ref, run);
    int changed = 0;
    const std::size_t positions[] = {0, 17, plan.samples_per_run / 3, plan.samples_per_run / 2,
                                     plan.samples_per_run - 1};
    for (const std::size_t pos : positions) {
      Dataset mutated = sample;
      mutated[pos].point = mutated[pos].point == 0 ? 1 : 0;
      mutated[pos].label = h0.labels[mutated[pos].point];
      const auto other = tv_to_dp(rule, mutated, params, ref, run);
      const std::size_t affected_slot = pos / n;
      std::size_t diffs = 0;
      for (std::size_t idx = 0; idx < base.coupled_outputs.size(); ++idx) {
        if (base.coupled_outputs[idx] != other.coupled_outputs[idx]) {
          ++diffs;
          pass_c = pass_c && idx == affected_slot;
        }
      }
      pass_c = pass_c && diffs <= 1;
      changed += static_cast<int>(diffs);
    }
    pass_c = pass_c && changed >= 1;
    detail << "perturbation: " << changed << " output changes, each confined to its slot";
  }

  r.pass = pass_a && pass_b && pass_c;
  r.detail = detail.str();
  return r;
}

// --- 9. Indistinguishability amplification -----------------------------------

CriterionResult amplification(const Ctx& ctx) {
  CriterionResult r{9, "indistinguishability amplification", false, "", 0};
  Hypothesis h0{{0, 1}};
  Hypothesis h1{{1, 0}};
  const std::size_t n = 8;
  const double marker = 0.01;  // jump probability => measured rho ~ 0.0198
  const double q = 1.0 - std::pow(1.0 - marker, 1.0 / static_cast<double>(n));
  auto rule = make_noisy_constant_rule(NoisyConstantSpec{1.0, n, 2, true, std::make_pair(h0, h1)});
  const auto examples = realizable_distribution(h0, {1.0 - q, q});
  const auto ref = uniform_reference(rule.reachable);

  const double alpha = 0.05, beta = 0.1, rho = 0.02;
  const double rho_prime = 0.05, eps = 0.1, beta_prime = 0.1;
  const std::size_t pairs = 200;

  std::vector<std::string> out1(pairs), out2(pairs);
  std::vector<std::uint8_t> small_err(2 * pairs);
  const Tape root = ctx.tape.derive("ampl");
  parallel_for(pairs, ctx.jobs, [&](std::size_t i) {
    const Tape shared = root.derive("shared").derive(i);
    const auto a = amplify(rule, alpha, beta, rho, rho_prime, eps, beta_prime, ref, examples,
                           shared, root.derive("d1").derive(i));
    const auto b = amplify(rule, alpha, beta, rho, rho_prime, eps, beta_prime, ref, examples,
                           shared, root.derive("d2").derive(i));
    out1[i] = a.hypothesis.to_bit_string();
    out2[i] = b.hypothesis.to_bit_string();
    small_err[2 * i] = population_loss(a.hypothesis, examples) <= alpha + eps;
    small_err[2 * i + 1] = population_loss(b.hypothesis, examples) <= alpha + eps;
  });

  std::size_t differ = 0, good = 0;
  std::map<std::string, double> hist1, hist2;
  for (std::size_t i = 0; i < pairs; ++i) {
    differ += out1[i] != out2[i];
    hist1[out1[i]] += 1.0 / pairs;
    hist2[out2[i]] += 1.0 / pairs;
  }
  for (auto x : small_err) good += x;
  double hist_tv = 0.0;
  for (const auto& [k, v] : hist1) {
    const auto it = hist2.find(k);
    hist_tv += std::abs(v - (it == hist2.end() ? 0.0 : it->second));
  }
  for (const auto& [k, v] : hist2) {
    if (hist1.find(k) == hist1.end()) hist_tv += v;
  }
  hist_tv /= 2;

  const double differ_rate = static_cast<double>(differ) / pairs;
  const double err_rate = static_cast<double>(good) / (2 * pairs);
  // Shared-tape disagreement upper-bounds the expected tv between the paired
  // run posteriors; the marginal histograms give a direct second estimate.
  const bool tv_ok = differ_rate <= rho_prime + three_sigma(differ_rate, pairs) &&
                     hist_tv <= rho_prime + three_sigma(0.5, pairs);
  const bool err_ok = err_rate >= 1.0 - beta_prime - three_sigma(err_rate, 2 * pairs);
  r.pass = tv_ok && err_ok;
  r.detail = "paired disagreement " + fmt(differ_rate) + " <= 0.05+3s, histogram tv " +
             fmt(hist_tv) + ", error<=0.15 rate " + fmt(err_rate) + " >= 0.9-3s";
  return r;
}

// --- 10. Accuracy boosting ----------------------------------------------------

CriterionResult boosting(const Ctx& ctx) {
  CriterionResult r{10, "smooth boosting of a weak stump learner", false, "", 0};
  const std::size_t domain = 64;
  auto weak = make_weak_stump_learner(domain, 256);
  const auto target = threshold_hypothesis(domain, 23);
  const auto examples = realizable_distribution(target, std::vector<double>(domain, 1.0 / domain));
  const auto ref = uniform_reference(weak.reachable);

  // Verified weak advantage: under point-concentrated smooth measures the ERM
  // stump stays below 1/2 - gamma.
  const double gamma = 0.25;
  bool advantage_ok = true;
  {
    TapeCursor data(ctx.tape.derive("advantage"));
    for (std::size_t heavy = 0; heavy < domain; heavy += 7) {
      std::vector<double> mass(domain, 0.2 / static_cast<double>(domain - 1));
      mass[heavy] = 0.8;
      double total = 0.0;
      for (double m : mass) total += m;
      for (auto& m : mass) m /= total;
      const auto reweighted = realizable_distribution(target, mass);
      for (int rep = 0; rep < 5; ++rep) {
        const Dataset s = draw_dataset(reweighted, 256, data);
        const auto posterior = weak.posterior(s);
        const auto& h = weak.reachable[static_cast<std::size_t>(posterior.support()[0])];
        advantage_ok = advantage_ok && population_loss(h, reweighted) <= 0.5 - gamma;
      }
    }
  }

  BoostParams params;
  params.eps = 0.1;
  params.rho_prime = 0.2;
  params.beta_prime = 0.1;
  params.gamma = gamma;
  params.c_t = 4.0;

  const std::size_t runs = 100;
  std::vector<std::uint8_t> good(runs), measure_ok(runs);
  std::vector<std::size_t> rounds(runs);
  const Tape root = ctx.tape.derive("boost");
  parallel_for(runs, ctx.jobs, [&](std::size_t i) {
    const auto out = smooth_boost(weak, params, ref, examples, root.derive("run").derive(i),
                                  root.derive("data").derive(i));
    bool in_range = true;
    for (const auto& entry : out.log) {
      in_range = in_range && entry.measure_min >= 0.0 && entry.measure_max <= 1.0;
    }
    measure_ok[i] = in_range;
    rounds[i] = out.rounds;
    good[i] = !out.failed && population_loss(out.majority, examples) <= params.eps;
  });
  std::size_t g = 0, m = 0, total_rounds = 0;
  for (std::size_t i = 0; i < runs; ++i) {
    g += good[i];
    m += measure_ok[i];
    total_rounds += rounds[i];
  }
  const double rate = static_cast<double>(g) / runs;
  r.pass = advantage_ok && m == runs && rate >= 1.0 - params.beta_prime - three_sigma(rate, runs);
  r.detail = "final error<=0.1 rate " + fmt(rate) + " >= 0.9-3s, mean rounds " +
             fmt(static_cast<double>(total_rounds) / runs) + ", measure in [0,1] " +
             (m == runs ? "always" : "VIOLATED") + ", weak advantage " +
             (advantage_ok ? "verified" : "FAILED");
  return r;
}

// --- 11. Generalization --------------------------------------------------------

CriterionResult generalization(const Ctx& ctx) {
  CriterionResult r{11, "tv indistinguishability implies generalization", false, "", 0};
  const std::size_t n = 200;
  // Exact E|f - f'| for Binomial(200, 1/2)/200 fixes the scale for rho = 0.0025.
  std::vector<double> logpmf(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    logpmf[k] = std::lgamma(double(n + 1)) - std::lgamma(double(k + 1)) -
                std::lgamma(double(n - k + 1)) + double(n) * std::log(0.5);
  }
  double mean_abs = 0.0;
  for (std::size_t a = 0; a <= n; ++a) {
    for (std::size_t b = 0; b <= n; ++b) {
      mean_abs += std::exp(logpmf[a] + logpmf[b]) * std::abs(double(a) - double(b)) / double(n);
    }
  }
  const double rho = 0.0025;
  const double scale = rho / mean_abs;
  auto rule = make_noisy_constant_rule(NoisyConstantSpec{scale, n, 1, false, std::nullopt});
  const auto labels = FiniteDistribution({example_id(0, 0), example_id(0, 1)}, {0.5, 0.5});

  const auto check =
      generalization_gap_check(rule, labels, n, 0.05, rho, 200, ctx.tape.derive("gen"));
  const bool bound_ok = std::abs(check.bound - (std::sqrt(std::log(40.0) / 400.0) + 0.05)) < 1e-12;
  r.pass = bound_ok && check.pass;
  r.detail = "bound " + fmt(check.bound) + " (= 0.09604+0.05), exceedance " +
             fmt(check.exceedance.value) + " <= " + fmt(check.rate_threshold);
  return r;
}

// --- 12. Fixed-prior and high-probability conversions ---------------------------

CriterionResult fixed_prior_lemmas(const Ctx& ctx) {
  CriterionResult r{12, "fixed-prior sandwich and (eta,nu) conversion", false, "", 0};
  auto rule = make_noisy_constant_rule(NoisyConstantSpec{0.3, 1, 2, false, std::nullopt});
  const auto labels = FiniteDistribution(
      {example_id(0, 0), example_id(0, 1), example_id(1, 0), example_id(1, 1)},
      {0.25, 0.25, 0.25, 0.25});
  const auto etv = expected_tv_indistinguishability(rule, labels, 1, 0, ctx.tape);
  const auto prior = fixed_prior_tv(rule, labels, 1, 0, ctx.tape);
  bool ok = etv.ci == 0.0 && prior.distance.ci == 0.0;
  ok = ok && std::abs(etv.value - 0.15) < 1e-12;
  ok = ok && prior.distance.value <= etv.value + 1e-12;
  ok = ok && etv.value <= 2.0 * prior.distance.value + 1e-12;

  // High-probability certificates measured by the same enumeration.
  const auto enumeration = enumerate_datasets(labels, 1).value();
  for (double eta = 0.01; eta < 0.31; eta += 0.01) {
    double nu = 0.0;
    for (std::size_t i = 0; i < enumeration.datasets.size(); ++i) {
      if (tv_distance(rule.posterior(enumeration.datasets[i]), prior.prior) > eta) {
        nu += enumeration.weights[i];
      }
    }
    ok = ok && prior.distance.value <= eta + nu - eta * nu + 1e-12;
  }
  r.pass = ok;
  r.detail = "exact: fixed " + fmt(prior.distance.value) + " <= etv " + fmt(etv.value) +
             " <= 2*fixed, (eta,nu) conversion over a 30-point grid";
  return r;
}

// --- 13. List-global stability => TV -------------------------------------------

CriterionResult listglobal(const Ctx& ctx) {
  CriterionResult r{13, "list-global stability => tv indistinguishability", false, "", 0};
  const std::size_t domain = 6, m = 2;
  auto fixture = make_list_global_fixture(4, 0.4, 32, domain, m);
  const auto examples =
      realizable_distribution(fixture.reachable[0], std::vector<double>(domain, 1.0 / domain));

  ListGlobalParams params;
  params.eta = 0.4;
  params.rho = 0.2;
  params.alpha = 0.0;
  params.beta = 0.1;
  params.list_size = 4;
  params.constant_scale = 2.0;

  const std::size_t pairs = 100;
  std::vector<double> tvs(pairs), losses(2 * pairs);
  const Tape root = ctx.tape.derive("lg");
  parallel_for(pairs, ctx.jobs, [&](std::size_t i) {
    FiniteDistribution posterior[2];
    for (int side = 0; side < 2; ++side) {
      const Tape run = root.derive("run").derive(2 * i + static_cast<std::size_t>(side));
      const auto learner = [&](const Tape& t) {
        TapeCursor data(t.derive("data"));
        const Dataset s = draw_dataset(examples, m, data);
        return fixture.run(s, t.derive("fixture"));
      };
      posterior[side] = listglobal_to_tv(learner, params, run);
      losses[2 * i + static_cast<std::size_t>(side)] =
          posterior_loss(posterior[side], fixture.reachable, examples);
    }
    tvs[i] = tv_distance(posterior[0], posterior[1]);
  });
  const auto tv_est = mean_estimate(tvs);
  const auto loss_est = mean_estimate(losses);
  const double bound = 2.0 * params.rho;
  r.pass = tv_est.value <= bound + tv_est.ci && loss_est.value <= 0.05;
  r.detail = "two-run expected tv " + fmt(tv_est.value) + " <= " + fmt(bound) +
             "+3s, mean output error " + fmt(loss_est.value) + " <= 0.05";
  return r;
}

}  // namespace

CriterionResult run_criterion(int id, const Seed& seed, std::size_t jobs) {
  const Ctx ctx{Tape(seed).derive("acceptance").derive(static_cast<std::uint64_t>(id)), jobs};
  const auto start = std::chrono::steady_clock::now();
  CriterionResult result;
  switch (id) {
    case 1: result = coupling_bound(ctx); break;
    case 2: result = tv_to_replicability(ctx); break;
    case 3: result = replicability_to_tv(ctx); break;
    case 4: result = heavy_hitters(ctx); break;
    case 5: result = sq_oracle(ctx); break;
    case 6: result = exp_mechanism_exact_dp(ctx); break;
    case 7: result = stable_histogram_accuracy(ctx); break;
    case 8: result = tv_to_dp_pipeline(ctx); break;
    case 9: result = amplification(ctx); break;
    case 10: result = boosting(ctx); break;
    case 11: result = generalization(ctx); break;
    case 12: result = fixed_prior_lemmas(ctx); break;
    case 13: result = listglobal(ctx); break;
    default: throw std::invalid_argument("unknown acceptance criterion id");
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<CriterionResult> run_acceptance(const Seed& seed, std::size_t jobs) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= 13; ++id) out.push_back(run_criterion(id, seed, jobs));
  return out;
}

}  // namespace tvind
