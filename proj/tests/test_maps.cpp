#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "potts/maps.hpp"
#include "potts/oracle.hpp"
#include "potts/polytope.hpp"
#include "potts/random.hpp"

using namespace potts;
using Catch::Approx;

namespace {

std::vector<double> random_x(Rng& rng, int q, double lo, double hi) {
  std::vector<double> x(static_cast<std::size_t>(q - 1));
  for (double& e : x) e = rng.uniform(lo, hi);
  return x;
}

}  // namespace

TEST_CASE("G vanishes on the all-ones vector") {
  for (double d : {3.0, 10.0, 250.5, kInfiniteDegree}) {
    const ModelParams p(4, d, 0.7);
    const std::vector<double> ones(3, 1.0);
    for (double g : G_map(ones, p)) CHECK(g == 0.0);
  }
}

TEST_CASE("limit G on a diagonal point") {
  const ModelParams p(3, kInfiniteDegree, 1.0);
  const double e = std::exp(-1.0);
  const std::vector<double> z{e, e};
  const double expect = 3 * (1 - e) / (2 * e + 1);
  for (double g : G_map(z, p)) CHECK(g == Approx(expect).epsilon(1e-15));
  // f(2) of the phi building block: -q expm1(-x/(q-1)) / ((q-1) e^{-x/(q-1)} + 1) at x = 2.
  const double f2 = -3 * std::expm1(-1.0) / (2 * std::exp(-1.0) + 1);
  CHECK(expect == Approx(f2).epsilon(1e-15));
}

TEST_CASE("G rejects a nonpositive denominator") {
  const ModelParams p(5, 2.0, 1.0);  // w = -2/3
  const std::vector<double> z{0.1, 0.1, 0.1, 0.1};
  CHECK_THROWS_AS(G_map(z, p), DomainError);
}

TEST_CASE("zero is a fixed point of F") {
  for (int q = 3; q <= 6; ++q)
    for (double d : {2.5, 10.0, 1e4, kInfiniteDegree})
      for (double a : {0.3, 1.0}) {
        const auto y = F_map(LogRatioVec::zeros(q), ModelParams(q, d, a));
        for (double v : y.values()) CHECK(v == 0.0);
      }
}

TEST_CASE("F at the pinned patterns") {
  const ModelParams p(3, 10.0, 1.0);
  const auto y = F_map(LogRatioVec::pinned(3, 0), p);
  CHECK(y[0] == Approx(10 * std::log(8.0 / 11.0)).epsilon(1e-14));
  CHECK(y[1] == 0.0);
  // -inf * 1: every coordinate d log(1 + k/w).
  const auto r = F_map(LogRatioVec::pinned(3, 2), p);
  const double k = 3.0 / 11.0;
  for (double v : r.values()) CHECK(v == Approx(10 * std::log1p(k / (1 - k))).epsilon(1e-14));
  // Limit map values -alpha q e_i and alpha q 1.
  const ModelParams lim(4, kInfiniteDegree, 0.5);
  const auto a = F_map(LogRatioVec::pinned(4, 1), lim);
  CHECK(a[0] == 0.0);
  CHECK(a[1] == Approx(-2.0));
  CHECK(a[2] == 0.0);
  const auto b = F_map(LogRatioVec::pinned(4, 3), lim);
  for (double v : b.values()) CHECK(v == Approx(2.0));
}

TEST_CASE("F matches the reference formula") {
  Rng rng(derive_seed(10, 0));
  for (int t = 0; t < 500; ++t) {
    const int q = rng.uniform_int(3, 7);
    const double d = rng.uniform(1.5, 500.0);
    const double a = rng.uniform(0.05, 1.0);
    const auto x = random_x(rng, q, -4, 4);
    const ModelParams p(q, d, a);
    double den = 1.0 - a * q / (d + 1);
    for (double xi : x) den += std::exp(xi);
    if (den <= 0.0) {
      CHECK_THROWS_AS(F_map(LogRatioVec(x), p), DomainError);
      continue;
    }
    const auto want = oracle::F(x, q, d, a);
    bool finite = true;
    for (double v : want) finite = finite && std::isfinite(v);
    if (!finite) continue;
    const auto got = F_map(LogRatioVec(x), p);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(got[i] == Approx(want[i]).margin(1e-11).epsilon(1e-12));
  }
  for (int t = 0; t < 200; ++t) {
    const int q = rng.uniform_int(3, 7);
    const double a = rng.uniform(0.05, 1.0);
    const auto x = random_x(rng, q, -6, 6);
    const auto got = F_map(LogRatioVec(x), ModelParams(q, kInfiniteDegree, a));
    CHECK(oracle::max_abs(got.values(), oracle::F(x, q, INFINITY, a)) <= 1e-12);
  }
}

TEST_CASE("F preserves the diagonal") {
  const ModelParams p(5, 2.0, 1.0);
  for (double t : {-1.0, 0.5, 3.0}) {
    const auto y = F_map(LogRatioVec::diagonal(5, t), p);
    for (double v : y.values()) CHECK(v == Approx(y[0]).margin(1e-12));
  }
  Rng rng(derive_seed(11, 0));
  for (int k = 0; k < 100; ++k) {
    const ModelParams pp(rng.uniform_int(3, 8), rng.uniform(2.0, 1e3), rng.uniform(0.1, 1.0));
    const auto y = F_map(LogRatioVec::diagonal(pp.q(), rng.uniform(-3, 3)), pp);
    for (double v : y.values()) CHECK(std::abs(v - y[0]) <= 1e-12);
  }
}

TEST_CASE("F commutes with the color action") {
  Rng rng(derive_seed(12, 0));
  for (int q = 3; q <= 5; ++q)
    for (double d : {3.0, 50.0, kInfiniteDegree})
      for (int t = 0; t < 50; ++t) {
        // Keep the weight w = 1 - alpha q / (d + 1) positive.
        const double amax = std::min(1.0, 0.95 * (d + 1) / q);
        const ModelParams p(q, d, rng.uniform(0.2 * amax, amax));
        const LogRatioVec x(random_x(rng, q, -3, 3));
        const auto pi = rng.permutation(q);
        const auto lhs = apply_permutation(pi, F_map(x, p));
        const auto rhs = F_map(apply_permutation(pi, x), p);
        CHECK(max_abs_diff(lhs, rhs) <= 1e-10);
      }
}

TEST_CASE("inverse undoes F") {
  Rng rng(derive_seed(13, 0));
  for (int t = 0; t < 1000; ++t) {
    const int q = rng.uniform_int(3, 7);
    const double d = t % 4 == 0 ? kInfiniteDegree : rng.uniform(2.0, 1e4);
    const ModelParams p(q, d, rng.uniform(0.1, 1.0));
    const LogRatioVec x(random_x(rng, q, -3, 3));
    const auto y = F_map(x, p);
    const auto back = F_inverse(y.values(), p);
    CHECK(max_abs_diff(back, x) <= 1e-10);
  }
  const ModelParams p(4, 7.0, 1.0);
  const std::vector<double> zero(3, 0.0);
  const auto z = F_inverse(zero, p);
  for (double v : z.values()) CHECK(std::abs(v) <= 1e-15);
}

TEST_CASE("inverse reports points outside the image") {
  const ModelParams p(3, kInfiniteDegree, 1.0);
  const std::vector<double> y{-2.0, -2.0};  // sum y + q < 0
  CHECK_FALSE(try_F_inverse(y, p).has_value());
  CHECK_THROWS_AS(F_inverse(y, p), DomainError);
  const std::vector<double> edge{-1.5, -1.5};  // sum y + q = 0
  CHECK_FALSE(try_F_inverse(edge, p).has_value());
}

TEST_CASE("Jacobian at the fixed point is a negative multiple of the identity") {
  // The diagonal entry is -alpha d / (d + 1 - alpha).
  const auto J = jacobian_F(LogRatioVec::zeros(4), ModelParams(4, 9.0, 1.0));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(J(i, j) == Approx(i == j ? -1.0 : 0.0).margin(1e-12));
  const auto H = jacobian_F(LogRatioVec::zeros(4), ModelParams(4, 9.0, 0.5));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(H(i, j) == Approx(i == j ? -4.5 / 9.5 : 0.0).margin(1e-12));
  const auto L = jacobian_F(LogRatioVec::zeros(3), ModelParams(3, kInfiniteDegree, 1.0));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(L(i, j) == Approx(i == j ? -1.0 : 0.0).margin(1e-12));
}

TEST_CASE("Jacobian matches central differences of the reference map") {
  Rng rng(derive_seed(14, 0));
  for (int t = 0; t < 200; ++t) {
    const int q = t < 50 ? 3 : rng.uniform_int(3, 6);
    const double d = t < 50 ? 5.0 : (t % 5 == 0 ? kInfiniteDegree : rng.uniform(2.0, 1e3));
    const double a = rng.uniform(0.2, 1.0);
    const ModelParams p(q, d, a);
    const auto x = random_x(rng, q, -1.5, 1.5);
    double den = std::isinf(d) ? 1.0 : 1.0 - a * q / (d + 1);
    for (double xi : x) den += std::exp(xi);
    if (den < 0.3) continue;
    const auto J = jacobian_F(LogRatioVec(x), p);
    const auto fd = oracle::fd_jacobian([&](const std::vector<double>& u) { return oracle::F(u, q, d, a); }, x, 1e-5);
    for (int i = 0; i < q - 1; ++i)
      for (int j = 0; j < q - 1; ++j)
        CHECK(J(i, j) == Approx(fd[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]).margin(1e-6));
  }
}

TEST_CASE("second-order term of the two-step map vanishes at zero") {
  const double h = 1e-3;
  for (int q = 3; q <= 5; ++q) {
    const ModelParams p(q, kInfiniteDegree, 1.0);
    const int n = q - 1;
    auto Phi = [&](std::vector<double> x) { return F_twice(LogRatioVec(std::move(x)), p).values(); };
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        std::vector<double> pp(static_cast<std::size_t>(n), 0.0), pm = pp, mp = pp, mm = pp;
        pp[a] += h, pp[b] += h;
        pm[a] += h, pm[b] -= h;
        mp[a] -= h, mp[b] += h;
        mm[a] -= h, mm[b] -= h;
        const auto fpp = Phi(pp), fpm = Phi(pm), fmp = Phi(mp), fmm = Phi(mm);
        for (int i = 0; i < n; ++i) {
          const double second = (fpp[i] - fpm[i] - fmp[i] + fmm[i]) / (4 * h * h);
          CHECK(std::abs(second) <= 1e-4);
        }
      }
  }
}

TEST_CASE("finite-degree maps converge uniformly to the limit map") {
  for (int q = 3; q <= 5; ++q) {
    const auto grid = sample_P(q + 1.0, q, 2000, derive_seed(15, static_cast<std::uint64_t>(q)));
    const ModelParams lim(q, kInfiniteDegree, 1.0);
    double prev = INFINITY;
    for (double d : {10.0, 1e2, 1e3, 1e4}) {
      const ModelParams p(q, d, 1.0);
      double sup = 0.0;
      for (const auto& x : grid) sup = std::max(sup, max_abs_diff(F_map(x, p), F_map(x, lim)));
      CHECK(sup < prev);
      prev = sup;
    }
    CHECK(prev < 1e-2);
  }
}

TEST_CASE("phi at zero, outside the range and on a grid") {
  for (int q = 3; q <= 10; ++q) CHECK(phi(0.0, q) == 0.0);
  const double v = phi(6.0, 5);
  CHECK(v < 5.0);
  CHECK(v > 0.0);
  CHECK_THROWS_AS(phi(-0.1, 3), DomainError);
  for (int q = 3; q <= 10; ++q)
    for (int k = 1; k <= 1000; ++k) {
      const double x = 0.05 * k;
      REQUIRE(phi(x, q) < x);
    }
}

TEST_CASE("phi matches the composed reference limit map") {
  for (int q = 3; q <= 10; ++q)
    for (double x : {0.01, 0.3, 1.0, 2.5, 7.0, 40.0}) CHECK(phi(x, q) == Approx(oracle::phi(x, q)).epsilon(1e-12));
}

TEST_CASE("cubic contraction coefficient of phi") {
  const double x = 1e-2;
  const double c3 = (x - phi(x, 3)) / (x * x * x);
  CHECK(c3 == Approx(1.0 / 24.0).epsilon(0.01));
  for (int q = 3; q <= 10; ++q) {
    const double want = 1.0 / (6.0 * (q - 1) * (q - 1));
    CHECK((x - phi(x, q)) / (x * x * x) == Approx(want).epsilon(0.01));
  }
}

TEST_CASE("finite-degree phi") {
  CHECK(phi_d(0.0, ModelParams(4, 7.0, 1.0)) == 0.0);
  CHECK(phi_d(1.0, ModelParams(3, 1e6, 1.0)) == Approx(phi(1.0, 3)).margin(1e-4));
  for (int d = 2; d <= 50; ++d) CHECK(phi_d(2.0, ModelParams(4, d, 1.0)) < 2.0);
}

TEST_CASE("recursion step on equal children") {
  const ModelParams p(3, 4.0, 1.0);
  const std::vector<LogRatioVec> zeros(4, LogRatioVec::zeros(3));
  const auto z = recursion_step(zeros, p);
  for (double v : z.values()) CHECK(v == 0.0);
  const std::vector<LogRatioVec> pinned(4, LogRatioVec::pinned(3, 0));
  const auto r = recursion_step(pinned, p);
  CHECK(r[0] == Approx(4 * std::log(1 - 3.0 / 5.0)).epsilon(1e-14));
  CHECK(r[1] == 0.0);
  CHECK_THROWS(recursion_step(std::vector<LogRatioVec>(3, LogRatioVec::zeros(3)), p));
}

TEST_CASE("recursion on a depth-two tree matches plain enumeration") {
  Rng rng(derive_seed(16, 0));
  const auto tree = TreeSpec::regular(2, 2);
  for (int t = 0; t < 30; ++t) {
    const double w = rng.uniform(0.05, 0.99);
    const auto tau = BoundaryCondition::random(tree, 3, rng);
    const auto got = recursion_log_ratios(tree, tau, params_for_weight(3, 2, w));
    CHECK(oracle::max_abs(got.values(), oracle::root_ratios(tree, tau, 3, w)) <= 1e-12);
  }
}

TEST_CASE("rescaling closed form and identity") {
  const auto one = rescaling_d_prime(ModelParams(4, 9.0, 1.0));
  CHECK(one.d_prime == 9.0);
  CHECK(one.ratio == 1.0);
  const auto half = rescaling_d_prime(ModelParams(4, 9.0, 0.5));
  CHECK(half.d_prime == Approx(19.0).epsilon(1e-15));
  CHECK(half.ratio == Approx(9.0 / 19.0).epsilon(1e-15));
  Rng rng(derive_seed(17, 0));
  for (int t = 0; t < 100; ++t) {
    const LogRatioVec x(random_x(rng, 4, -2, 2));
    const auto lhs = F_map(x, ModelParams(4, 9.0, 0.5));
    const auto rhs = half.ratio * F_map(x, ModelParams(4, half.d_prime, 1.0));
    CHECK(max_abs_diff(lhs, rhs) <= 1e-12);
  }
}
