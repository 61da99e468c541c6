#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <cmath>

#include "oracles.hpp"
#include "potts/appendix.hpp"
#include "potts/maps.hpp"
#include "potts/random.hpp"

using namespace potts;
using Catch::Approx;
using LD = long double;

namespace {

std::array<double, 3> admissible_triple(Rng& rng) {
  std::array<double, 3> x;
  do {
    for (double& v : x) v = rng.uniform();
    std::sort(x.begin(), x.end(), std::greater<>());
  } while (!(x[0] > x[1]));
  return x;
}

}  // namespace

TEST_CASE("Delta vanishes when the two leading variables coincide") {
  Rng rng(derive_seed(60, 0));
  for (int t = 0; t < 200; ++t) {
    const int q = rng.uniform_int(3, 8);
    const int l = rng.uniform_int(1, q - 2);
    const double a = rng.uniform(), b = rng.uniform() * a;
    CHECK(std::abs(Delta_func(a, a, b, static_cast<double>(q - 1), l)) <= 1e-12);
  }
}

TEST_CASE("Delta equals the gap between consecutive v values") {
  Rng rng(derive_seed(61, 0));
  for (int t = 0; t < 10000; ++t) {
    const int q = rng.uniform_int(3, 8);
    const int l = rng.uniform_int(1, q - 2);
    const auto x = admissible_triple(rng);
    const TripleParams tp(x[0], x[1], x[2], l, q);
    const auto y = tp.expanded();
    const double gap = oracle::v(l - 1, y, q) - oracle::v(l, y, q);
    const LD delta = Delta_func<LD>(x[0], x[1], x[2], q - 1, l);
    CHECK(std::abs(static_cast<double>(delta) - gap) <= 1e-10 * std::max(1.0, std::abs(gap)));
    CHECK(delta > 0);
  }
}

TEST_CASE("y recovers the original variables at t = q - 1") {
  Rng rng(derive_seed(62, 0));
  for (int t = 0; t < 2000; ++t) {
    const int q = rng.uniform_int(3, 8);
    const int l = rng.uniform_int(1, q - 2);
    const auto x = admissible_triple(rng);
    const auto C = TripleParams(x[0], x[1], x[2], l, q).C();
    CHECK(C[0] >= 0.0);
    CHECK(C[0] < C[1]);
    CHECK(C[1] <= C[2]);
    const auto y = y_of_t(C[0], C[1], C[2], l, static_cast<double>(q - 1));
    for (int i = 0; i < 3; ++i) CHECK(y[i] == Approx(x[i]).margin(1e-12));
  }
}

TEST_CASE("y keeps every A_i fixed along t") {
  Rng rng(derive_seed(63, 0));
  for (int k = 0; k < 500; ++k) {
    const int l = rng.uniform_int(1, 6);
    const double C1 = rng.uniform(0, 1), C2 = C1 + rng.uniform(0.01, 1), C3 = C2 + rng.uniform(0, 1);
    const double t = rng.uniform(l + 1.0, l + 5.0);
    const auto y = y_of_t(C1, C2, C3, l, t);
    CHECK(A_func(1, y[0], y[1], y[2], t, l) == Approx(C1).margin(1e-12));
    CHECK(A_func(2, y[0], y[1], y[2], t, l) == Approx(C2).margin(1e-12));
    CHECK(A_func(3, y[0], y[1], y[2], t, l) == Approx(C3).margin(1e-12));
  }
}

TEST_CASE("equal constants give the symmetric degenerate point") {
  for (double C : {0.0, 0.4, 1.3})
    for (int l = 1; l <= 4; ++l)
      for (double t : {l + 1.0, l + 2.5}) {
        const auto y = y_of_t(C, C, C, l, t);
        CHECK(y[0] == Approx(y[1]).margin(1e-14));
        CHECK(y[1] == Approx(y[2]).margin(1e-14));
        for (int i = 1; i <= 3; ++i) CHECK(A_func(i, y[0], y[1], y[2], t, l) == Approx(C).margin(1e-14));
      }
}

TEST_CASE("y rejects a vanishing denominator") {
  // C3 (t-l-1) + C1 l + C2 + t + 1 = 0 at l = 1, t = 2 for C1 = -1, C2 = -2.
  CHECK_THROWS_AS(y_of_t(-1.0, -2.0, 5.0, 1, 2.0), DomainError);
}

TEST_CASE("closed-form coefficients sum to a multiple of C2 - C1") {
  Rng rng(derive_seed(64, 0));
  for (int k = 0; k < 1000; ++k) {
    const int l = rng.uniform_int(1, 6);
    const double C1 = rng.uniform(0, 2), C2 = rng.uniform(0, 2), C3 = rng.uniform(0, 2);
    const auto cf = r_closed_forms(C1, C2, C3, l);
    CHECK(cf.u1 + cf.u2 == Approx((l + 2 + C2 + l * C1) * (C2 - C1)).margin(1e-12));
    CHECK(cf.r_at_l_plus_1 == Approx(cf.u1 * std::exp(C1) + cf.u2 * std::exp(C2)).margin(1e-12));
  }
  const auto eq = r_closed_forms(0.7, 0.7, 1.1, 2);
  CHECK(std::abs(eq.u1 + eq.u2) <= 1e-15);
  CHECK(std::abs(eq.r_at_l_plus_1) <= 1e-14);
}

TEST_CASE("r is affine in t and its closed forms are positive") {
  Rng rng(derive_seed(65, 0));
  for (int t = 0; t < 5000; ++t) {
    const int q = rng.uniform_int(3, 8);
    const int l = rng.uniform_int(1, q - 2);
    const auto x = admissible_triple(rng);
    const auto Cd = TripleParams(x[0], x[1], x[2], l, q).C();
    const LD C1 = Cd[0], C2 = Cd[1], C3 = Cd[2];
    const LD r0 = r_of_t(C1, C2, C3, l, static_cast<LD>(l + 1));
    const LD r1 = r_of_t(C1, C2, C3, l, static_cast<LD>(l + 2));
    const LD r2 = r_of_t(C1, C2, C3, l, static_cast<LD>(l + 3.5));
    const LD scale = std::max({std::abs(r0), std::abs(r1), std::abs(r2)});
    // Points l+1, l+2, l+3.5 on a line.
    CHECK(static_cast<double>(std::abs(r2 - r0 - 2.5L * (r1 - r0)) / scale) <= 1e-9);
    const auto cf = r_closed_forms(C1, C2, C3, l);
    CHECK(static_cast<double>(std::abs(cf.r_at_l_plus_1 - r0) / scale) <= 1e-9);
    CHECK(static_cast<double>(std::abs(cf.slope - (r1 - r0)) / scale) <= 1e-9);
    CHECK(cf.r_at_l_plus_1 > 0);
    CHECK(cf.slope > 0);
  }
}

TEST_CASE("triple parameters validate their ordering") {
  CHECK_THROWS_AS(TripleParams(0.5, 0.5, 0.1, 1, 4), InputError);
  CHECK_THROWS_AS(TripleParams(0.5, 0.4, 0.6, 1, 4), InputError);
  CHECK_THROWS_AS(TripleParams(1.2, 0.4, 0.1, 1, 4), InputError);
  CHECK_THROWS_AS(TripleParams(0.9, 0.4, 0.1, 3, 4), InputError);
  const TripleParams tp(0.9, 0.4, 0.1, 2, 6);
  const std::vector<double> want{0.9, 0.9, 0.4, 0.1, 0.1};
  CHECK(tp.expanded() == want);
}

TEST_CASE("v is symmetric in its coordinates") {
  Rng rng(derive_seed(66, 0));
  for (int k = 0; k < 200; ++k) {
    const int q = rng.uniform_int(3, 8);
    const std::vector<double> diag(static_cast<std::size_t>(q - 1), rng.uniform());
    const auto v = v_values(diag, q);
    for (double e : v) CHECK(e == Approx(v[0]).epsilon(1e-14));
    std::vector<double> y(static_cast<std::size_t>(q - 1));
    for (double& e : y) e = rng.uniform();
    const int l = rng.uniform_int(0, q - 3);
    y[static_cast<std::size_t>(l + 1)] = y[static_cast<std::size_t>(l)];
    CHECK(v_func(l, y, q) == Approx(v_func(l + 1, y, q)).epsilon(1e-14));
    for (int i = 0; i < q - 1; ++i) CHECK(v_func(i, y, q) == Approx(oracle::v(i, y, q)).epsilon(1e-13));
  }
}

TEST_CASE("psi orders coordinates exactly as v does") {
  Rng rng(derive_seed(67, 0));
  for (int k = 0; k < 1000; ++k) {
    const int q = rng.uniform_int(3, 8);
    std::vector<double> x(static_cast<std::size_t>(q - 1));
    for (double& e : x) e = rng.uniform(-3, 1);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::exp(x[i]);
    const auto ps = psi_vector(LogRatioVec(x), q);
    const auto v = v_values(y, q);
    for (int i = 0; i < q - 1; ++i)
      for (int j = 0; j < q - 1; ++j) {
        const double dp = ps[static_cast<std::size_t>(i)] - ps[static_cast<std::size_t>(j)];
        const double dv = v[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(j)];
        if (std::abs(dv) > 1e-9 * std::abs(v[0])) CHECK((dp > 0) == (dv > 0));
      }
  }
}

TEST_CASE("psi is constant on the diagonal and is the gradient of the two-step sum") {
  for (int q = 3; q <= 6; ++q) {
    const auto ps = psi_vector(LogRatioVec::diagonal(q, -0.7), q);
    for (double e : ps) CHECK(e == Approx(ps[0]).epsilon(1e-14));
  }
  for (int q = 3; q <= 5; ++q) {
    Rng rng(derive_seed(68, static_cast<std::uint64_t>(q)));
    for (int k = 0; k < 1000; ++k) {
      std::vector<double> x(static_cast<std::size_t>(q - 1));
      for (double& e : x) e = rng.uniform(-3, 3);
      const double h = 1e-5;
      for (int i = 0; i < q - 1; ++i) {
        auto xp = x, xm = x;
        xp[static_cast<std::size_t>(i)] += h;
        xm[static_cast<std::size_t>(i)] -= h;
        auto sum_of = [&](const std::vector<double>& u) {
          const auto once = oracle::F(u, q, INFINITY, 1.0);
          const auto twice = oracle::F(once, q, INFINITY, 1.0);
          double s = 0;
          for (double e : twice) s += e;
          return s;
        };
        const double fd = (sum_of(xp) - sum_of(xm)) / (2 * h);
        CHECK(psi(i, LogRatioVec(x), q) == Approx(fd).margin(1e-6));
      }
    }
    CHECK(psi_gradient_check(q, 1000, 69).max_error <= 1e-6);
  }
}

TEST_CASE("balancing the trailing block does not increase the gap") {
  const std::vector<double> eq{0.8, 0.3, 0.3, 0.3};
  const auto r0 = balancing_check(eq, 1, 5);
  CHECK(r0.lhs == r0.rhs);
  CHECK(r0.holds);
  Rng rng(derive_seed(70, 0));
  for (int t = 0; t < 10000; ++t) {
    std::vector<double> y(4);
    for (double& e : y) e = rng.uniform();
    std::sort(y.begin(), y.end(), std::greater<>());
    if (!(y[0] > y[1])) continue;
    const auto r = balancing_check(y, 1, 5);
    CHECK(r.holds);
    CHECK(r.lhs >= r.rhs - 1e-12);
  }
  CHECK_THROWS_AS(balancing_check(std::vector<double>{0.3, 0.8, 0.1, 0.0}, 1, 5), InputError);
  CHECK_THROWS_AS(balancing_check(std::vector<double>{0.8, 0.7, 0.1, 0.0}, 2, 5), InputError);
  CHECK_THROWS_AS(balancing_check(std::vector<double>{0.8, 0.3, 0.1}, 1, 5), InputError);
}

TEST_CASE("battery is clean and reproducible") {
  const auto a = appendix_battery(6, 3000, 71, 1);
  CHECK(a.violations() == 0);
  CHECK(a.rows.size() == 1 + 2 + 3 + 4);
  CHECK(a.max_linearity_residual <= kLinearityTol);
  const auto b = appendix_battery(6, 3000, 71, 4);
  CHECK(a.table().rows().size() == b.table().rows().size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].min_margin == b.rows[i].min_margin);
    CHECK(a.rows[i].seed == b.rows[i].seed);
  }
  CHECK_THROWS(appendix_battery(6, 0, 1));
}
