#include "doctest.h"

#include <cmath>
#include <vector>

#include "tvind/core.hpp"
#include "tvind/random.hpp"

using namespace tvind;

namespace {

FiniteDistribution random_dist(TapeCursor& cur, std::size_t k) {
  std::vector<ItemId> support;
  std::vector<double> mass(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    support.push_back(i);
    mass[i] = -std::log(1.0 - cur.next_uniform());
    total += mass[i];
  }
  for (double& m : mass) m /= total;
  return FiniteDistribution(std::move(support), std::move(mass));
}

}  // namespace

TEST_CASE("tv_distance basic values") {
  auto p = FiniteDistribution({0, 1}, {0.5, 0.5});
  CHECK(tv_distance(p, p) == doctest::Approx(0.0));

  auto a = FiniteDistribution({0}, {1.0});
  auto b = FiniteDistribution({1}, {1.0});
  CHECK(tv_distance(a, b) == doctest::Approx(1.0));

  auto q = FiniteDistribution({0, 1}, {0.9, 0.1});
  CHECK(tv_distance(p, q) == doctest::Approx(0.4));
}

TEST_CASE("tv_distance unions mismatched supports with zero fill") {
  auto p = FiniteDistribution({0, 2}, {0.5, 0.5});
  auto q = FiniteDistribution({0, 1}, {0.5, 0.5});
  CHECK(tv_distance(p, q) == doctest::Approx(0.5));
}

TEST_CASE("tv_distance is a metric on random triples") {
  TapeCursor cur(Tape(Seed{1, 2}).derive("metric"));
  for (int trial = 0; trial < 200; ++trial) {
    auto p = random_dist(cur, 5);
    auto q = random_dist(cur, 5);
    auto r = random_dist(cur, 5);
    CHECK(tv_distance(p, q) == doctest::Approx(tv_distance(q, p)).epsilon(1e-12));
    CHECK(tv_distance(p, p) <= 1e-12);
    CHECK(tv_distance(p, r) <= tv_distance(p, q) + tv_distance(q, r) + 1e-12);
    CHECK(tv_distance(p, q) >= 0.0);
    CHECK(tv_distance(p, q) <= 1.0 + 1e-12);
  }
}

TEST_CASE("every 3x3 coupling places at least tv off the diagonal") {
  const std::vector<double> p = {0.5, 0.3, 0.2};
  const std::vector<double> q = {0.2, 0.5, 0.3};
  auto P = FiniteDistribution({0, 1, 2}, std::vector<double>(p));
  auto Q = FiniteDistribution({0, 1, 2}, std::vector<double>(q));
  const double tv = tv_distance(P, Q);

  // Grid scan of the transportation polytope: four free entries determine the
  // rest through the marginal constraints.
  const double step = 0.025;
  int valid = 0;
  double min_offdiag = 1.0;
  for (double c00 = 0; c00 <= p[0] + 1e-12; c00 += step)
    for (double c01 = 0; c00 + c01 <= p[0] + 1e-12; c01 += step)
      for (double c10 = 0; c10 <= p[1] + 1e-12; c10 += step)
        for (double c11 = 0; c10 + c11 <= p[1] + 1e-12; c11 += step) {
          const double c02 = p[0] - c00 - c01;
          const double c12 = p[1] - c10 - c11;
          const double c20 = q[0] - c00 - c10;
          const double c21 = q[1] - c01 - c11;
          const double c22 = p[2] - c20 - c21;
          if (c20 < -1e-9 || c21 < -1e-9 || c22 < -1e-9 || c02 < -1e-9 || c12 < -1e-9) continue;
          ++valid;
          const double offdiag = 1.0 - c00 - c11 - c22;
          min_offdiag = std::min(min_offdiag, offdiag);
          CHECK(offdiag >= tv - 1e-9);
        }
  CHECK(valid > 100);
  // The bound is attained: the greedy coupling with diagonal min(p_i, q_i).
  double diag = 0.0;
  for (int i = 0; i < 3; ++i) diag += std::min(p[i], q[i]);
  CHECK(1.0 - diag == doctest::Approx(tv).epsilon(1e-12));
  CHECK(min_offdiag <= tv + 3 * step);
}

TEST_CASE("population and empirical loss") {
  Hypothesis h{{0, 1}};
  auto realizable = FiniteDistribution({example_id(0, 0), example_id(1, 1)}, {0.5, 0.5});
  CHECK(population_loss(h, realizable) == doctest::Approx(0.0));

  Hypothesis flipped{{1, 0}};
  CHECK(population_loss(flipped, realizable) == doctest::Approx(1.0));

  Hypothesis zeros{{0, 0}};
  CHECK(population_loss(zeros, realizable) == doctest::Approx(0.5));

  Dataset s;
  for (int i = 0; i < 10; ++i) s.push_back(Example{0, static_cast<std::uint8_t>(i < 3 ? 1 : 0)});
  CHECK(empirical_loss(zeros, s) == doctest::Approx(0.3));
  CHECK(empirical_loss(h, s) == doctest::Approx(0.3));

  Dataset consistent = {{0, 0}, {1, 1}, {1, 1}};
  CHECK(empirical_loss(h, consistent) == doctest::Approx(0.0));

  // Multiplicity is respected: a repeated disagreeing example counts twice.
  Dataset repeated = {{0, 1}, {0, 1}, {1, 1}, {1, 1}};
  CHECK(empirical_loss(h, repeated) == doctest::Approx(0.5));

  CHECK_THROWS(empirical_loss(h, Dataset{}));
}

TEST_CASE("posterior_mixture") {
  auto a = FiniteDistribution({0}, {1.0});
  auto b = FiniteDistribution({1}, {1.0});

  CHECK(posterior_mixture({a}, {1.0}) == a);
  CHECK(posterior_mixture({b, b}, {0.25, 0.75}) == b);

  auto half = posterior_mixture({a, b}, {0.5, 0.5});
  CHECK(half.mass_of(0) == doctest::Approx(0.5));
  CHECK(half.mass_of(1) == doctest::Approx(0.5));

  CHECK_THROWS(posterior_mixture({a, b}, {1.0}));
}

TEST_CASE("mixture commutes with tv convexity") {
  TapeCursor cur(Tape(Seed{7, 7}).derive("convexity"));
  for (int trial = 0; trial < 100; ++trial) {
    auto p1 = random_dist(cur, 4);
    auto p2 = random_dist(cur, 4);
    auto q = random_dist(cur, 4);
    const double w = cur.next_uniform();
    auto mixed = posterior_mixture({p1, p2}, {w, 1.0 - w});
    CHECK(tv_distance(mixed, q) <= w * tv_distance(p1, q) + (1 - w) * tv_distance(p2, q) + 1e-9);
  }
}

TEST_CASE("distribution validation") {
  CHECK_THROWS(FiniteDistribution({0, 1}, {0.7, 0.7}));
  CHECK_THROWS(FiniteDistribution({0, 1}, {-0.1, 1.1}));
  CHECK_THROWS(FiniteDistribution({0, 0}, {0.5, 0.5}));
  CHECK_THROWS(FiniteDistribution({0, 1}, {1.0}));
  // Unsorted input is canonically reordered.
  auto d = FiniteDistribution({3, 1}, {0.25, 0.75});
  CHECK(d.support() == std::vector<ItemId>{1, 3});
  CHECK(d.mass_of(1) == doctest::Approx(0.75));
}

TEST_CASE("hypothesis class rejects duplicates and bad lengths") {
  Hypothesis a{{0, 1}};
  Hypothesis b{{1, 0}};
  CHECK_NOTHROW(HypothesisClass(2, {a, b}));
  CHECK_THROWS(HypothesisClass(2, {a, a}));
  CHECK_THROWS(HypothesisClass(3, {a}));
}

TEST_CASE("sample inversion hits masses") {
  auto d = FiniteDistribution({5, 9}, {0.25, 0.75});
  CHECK(d.sample(0.0) == 5);
  CHECK(d.sample(0.2499) == 5);
  CHECK(d.sample(0.2501) == 9);
  CHECK(d.sample(0.9999) == 9);
}
