#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "potts/model.hpp"
#include "potts/random.hpp"

using namespace potts;
using Catch::Approx;

TEST_CASE("interaction weight at the threshold and below it") {
  CHECK(interaction_weight(3, 2, 1.0) == 0.0);
  CHECK(interaction_weight(5, 9, 1.0) == Approx(1.0 - 5.0 / 10.0).margin(1e-15));
  CHECK(interaction_weight(5, 9, 0.5) == Approx(1.0 - 0.5 * 5.0 / 10.0).margin(1e-15));
}

TEST_CASE("model parameters reject values outside the admissible range") {
  CHECK_THROWS_AS(ModelParams(2, 5.0, 1.0), DomainError);
  CHECK_THROWS_AS(ModelParams(3, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(ModelParams(3, 5.0, 0.0), DomainError);
  CHECK_THROWS_AS(ModelParams(3, 5.0, 1.5), DomainError);
  CHECK_NOTHROW(ModelParams(3, kInfiniteDegree, 1.0));
  CHECK_THROWS(interaction_weight(3, 5, 0.0));
}

TEST_CASE("identity permutation acts trivially") {
  const LogRatioVec x({0.3, -1.2, 2.5});
  CHECK(apply_permutation(Permutation::identity(4), x) == x);
}

TEST_CASE("swapping the last color re-normalizes against the new reference") {
  const double a = 0.7, b = -1.9;
  const LogRatioVec x({a, b});
  const auto y = apply_permutation(Permutation::transposition(3, 0, 2), x);
  // Explicit matrix of the swap in ratio coordinates: rows (-1, 0) and (-1, 1).
  CHECK(y[0] == Approx(-a).margin(1e-15));
  CHECK(y[1] == Approx(b - a).margin(1e-15));
  const auto z = apply_permutation(Permutation::transposition(3, 0, 1), x);
  CHECK(z[0] == b);
  CHECK(z[1] == a);
}

TEST_CASE("permutation action matches the reference embedding") {
  Rng rng(derive_seed(1, 0));
  for (int q = 3; q <= 6; ++q)
    for (int t = 0; t < 50; ++t) {
      std::vector<double> x(static_cast<std::size_t>(q - 1));
      for (double& e : x) e = rng.uniform(-3, 3);
      const auto pi = rng.permutation(q);
      const auto got = apply_permutation(pi, LogRatioVec(x));
      CHECK(oracle::max_abs(got.values(), oracle::permute(pi.image(), x)) <= 1e-15);
    }
}

TEST_CASE("permutation action is a group action and linear") {
  Rng rng(derive_seed(2, 0));
  for (int q = 3; q <= 6; ++q)
    for (int t = 0; t < 100; ++t) {
      std::vector<double> xv(static_cast<std::size_t>(q - 1)), yv(xv.size());
      for (double& e : xv) e = rng.uniform(-3, 3);
      for (double& e : yv) e = rng.uniform(-3, 3);
      const LogRatioVec x(xv), y(yv);
      const auto pi = rng.permutation(q), sigma = rng.permutation(q);
      const auto lhs = apply_permutation(pi, apply_permutation(sigma, x));
      const auto rhs = apply_permutation(compose(pi, sigma), x);
      CHECK(max_abs_diff(lhs, rhs) <= 1e-12);

      const double lam = rng.uniform(-2, 2), mu = rng.uniform(-2, 2);
      const auto lin = apply_permutation(pi, lam * x + mu * y);
      const auto sep = lam * apply_permutation(pi, x) + mu * apply_permutation(pi, y);
      CHECK(max_abs_diff(lin, sep) <= 1e-12);

      CHECK(max_abs_diff(apply_permutation(pi.inverse(), apply_permutation(pi, x)), x) <= 1e-12);
    }
}

TEST_CASE("sum of a permuted vector drops the coordinate sent to the reference color") {
  Rng rng(derive_seed(3, 0));
  for (int q = 3; q <= 5; ++q)
    for (const auto& pi : all_permutations(q)) {
      std::vector<double> xv(static_cast<std::size_t>(q - 1));
      for (double& e : xv) e = rng.uniform(-3, 3);
      const LogRatioVec x(xv);
      const int j = pi.inverse()(q - 1);
      const double xj = j == q - 1 ? 0.0 : xv[static_cast<std::size_t>(j)];
      CHECK(apply_permutation(pi, x).sum() == Approx(x.sum() - q * xj).margin(1e-12));
    }
}

TEST_CASE("pinned patterns relabel to the pattern of the new color") {
  const auto p1 = LogRatioVec::pinned(4, 0);
  const auto moved = apply_permutation(Permutation::transposition(4, 0, 2), p1);
  REQUIRE(moved.pinned_color());
  CHECK(*moved.pinned_color() == 2);
  const auto last = apply_permutation(Permutation::transposition(4, 0, 3), p1);
  REQUIRE(last.pinned_color());
  CHECK(*last.pinned_color() == 3);
}

TEST_CASE("log-ratio vectors accept only the two infinite patterns") {
  const double inf = INFINITY;
  CHECK_NOTHROW(LogRatioVec({inf, 0.0}));
  CHECK_NOTHROW(LogRatioVec({-inf, -inf}));
  CHECK_THROWS(LogRatioVec({inf, 1.0}));
  CHECK_THROWS(LogRatioVec({inf, inf}));
  CHECK_THROWS(LogRatioVec({-inf, 0.0}));
  CHECK_THROWS(LogRatioVec({NAN, 0.0}));
}

TEST_CASE("all permutations enumerates q! distinct bijections and refuses large q") {
  CHECK(all_permutations(4).size() == 24);
  CHECK_THROWS_AS(all_permutations(9), BudgetError);
}
