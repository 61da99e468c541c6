#pragma once

// Gradient machinery of the two-step limit functional <Phi(x), 1> and the
// three-variable identities behind the ordering of v_l and v_{l+1}.
//
// The scalar formulas are templates so the sweeps can run in long double:
// Delta cancels heavily as x1 -> x2 and binary64 leaves only ~1e-9 relative
// accuracy in the linearity check of r.
//
// Indices: v and psi coordinates are 0-based; l is the 1-based block length
// of the lemma (1 <= l <= q-2) and A_func takes i in {1, 2, 3}.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "potts/model.hpp"
#include "potts/report.hpp"

namespace potts {

template <class T>
T A_func(int i, T y1, T y2, T y3, T t, int l) {
  const T y[3] = {y1, y2, y3};
  return (t + 1) * (1 - y[i - 1]) / (1 + l * y1 + y2 + (t - (l + 1)) * y3);
}

template <class T>
T Delta_func(T y1, T y2, T y3, T t, int l) {
  using std::exp;
  const T m = t - l - 1;
  return (y1 * y3 * m + (l + 1) * y1 + (l + 1) * y1 * y2 - l * y2) * exp(A_func(1, y1, y2, y3, t, l)) +
         (-y2 * y3 * m - (l + 1) * y1 * y2 + y1 - 2 * y2) * exp(A_func(2, y1, y2, y3, t, l)) +
         (y1 - y2) * (1 - y3) * m * exp(A_func(3, y1, y2, y3, t, l));
}

/// C3 (t-l-1) + C1 l + C2 + t + 1: the common denominator of y(t).
template <class T>
T y_denominator(T C1, T C2, T C3, int l, T t) {
  return C3 * (t - l - 1) + C1 * l + C2 + t + 1;
}

/// The point y(t) with A_i(y(t); t) = C_i for every t. Throws DomainError
/// when the denominator vanishes.
template <class T>
std::array<T, 3> y_of_t(T C1, T C2, T C3, int l, T t) {
  const T den = y_denominator(C1, C2, C3, l, t);
  if (den == 0) throw DomainError("y_of_t: zero denominator");
  return {(C1 * (l - t - 1) + C3 * (t - l - 1) + C2 + t + 1) / den,
          (C3 * (t - l - 1) + C1 * l - C2 * t + t + 1) / den,
          (C1 * l - C3 * (l + 2) + C2 + t + 1) / den};
}

/// Delta(y(t); t) / ((1+t)/den)^2, which is affine in t.
template <class T>
T r_of_t(T C1, T C2, T C3, int l, T t) {
  const auto y = y_of_t(C1, C2, C3, l, t);
  const T ratio = (1 + t) / y_denominator(C1, C2, C3, l, t);
  return Delta_func(y[0], y[1], y[2], t, l) / (ratio * ratio);
}

template <class T>
struct RClosedForms {
  T u1;
  T u2;
  T r_at_l_plus_1;  // u1 e^{C1} + u2 e^{C2}
  T slope;
};

template <class T>
RClosedForms<T> r_closed_forms(T C1, T C2, T C3, int l) {
  using std::exp;
  const T u1 = 2 + l + C2 - 2 * C1 + l * C1 * C2 - l * C1 * C1;
  const T u2 = -(2 + l + l * C1 - (l + 1) * C2 + C1 * C2 - C2 * C2);
  const T s = (1 + C3 - C1) * exp(C1) - (1 + C3 - C2) * exp(C2) + (C2 - C1) * C3 * exp(C3);
  return {u1, u2, u1 * exp(C1) + u2 * exp(C2), s};
}

/// (x1, x2, x3, l, q) with 1 >= x1 > x2 >= x3 >= 0 and 1 <= l <= q-2.
struct TripleParams {
  double x1, x2, x3;
  int l;
  int q;

  TripleParams(double x1, double x2, double x3, int l, int q);
  /// C_i = A_i(x1, x2, x3; q-1); satisfies 0 <= C1 < C2 <= C3.
  std::array<double, 3> C() const;
  /// (x1 repeated l times, x2, x3 repeated q-l-2 times).
  std::vector<double> expanded() const;
};

/// v_i(y) = y_i (e^{G_i}(1 + sum y) + sum_j e^{G_j}(1 - y_j)), G = G_inf(y).
std::vector<double> v_values(std::span<const double> y, int q);
double v_func(int i, std::span<const double> y, int q);

/// <F_inf(F_inf(x)), 1> for the alpha = 1 limit map.
double diagonal_functional(const LogRatioVec& x, int q);

/// Closed-form gradient of diagonal_functional.
std::vector<double> psi_vector(const LogRatioVec& x, int q);
double psi(int i, const LogRatioVec& x, int q);

struct BalancingReport {
  /// v_l(y) - v_{l+1}(y) and the same at the fully averaged point.
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  /// Every single pair-averaging step also does not increase the gap.
  bool pairwise_holds = true;
  /// Smallest finite-difference g'' seen and largest |g(t) - g(gap - t)|.
  double min_g_second_derivative = 0.0;
  double max_g_asymmetry = 0.0;
};

/// Requires 1 >= y_1 = ... = y_l > y_{l+1} >= ... >= y_{q-1} >= 0 (else InputError).
BalancingReport balancing_check(std::span<const double> y, int l, int q);

struct BatteryRow {
  int q = 0;
  int l = 0;
  double x1 = 0.0, x2 = 0.0, x3 = 0.0;
  double Delta = 0.0;
  double r_l1 = 0.0;
  double slope = 0.0;
  double min_margin = 0.0;  // min(Delta, r(l+1), slope) at this draw
  std::uint64_t seed = 0;   // chunk seed that produced the draw
};

struct BatteryReport {
  int q_max = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  /// Worst-margin draw per (q, l).
  std::vector<BatteryRow> rows;
  std::size_t positivity_violations = 0;
  std::size_t linearity_violations = 0;
  std::size_t closed_form_violations = 0;
  std::size_t identity_violations = 0;
  double max_linearity_residual = 0.0;
  double max_closed_form_error = 0.0;
  double max_identity_error = 0.0;

  std::size_t violations() const noexcept {
    return positivity_violations + linearity_violations + closed_form_violations + identity_violations;
  }
  CsvTable table() const;
  KeyValueRecord record() const;
};

inline constexpr double kLinearityTol = 1e-9;
inline constexpr double kClosedFormTol = 1e-9;
inline constexpr double kIdentityTol = 1e-10;

/// For every q in 3..q_max and l in 1..q-2, `trials` uniform admissible
/// (x1, x2, x3): checks Delta > 0, the Delta = v_l - v_{l+1} identity, the
/// linearity of r on t = l+1, l+2, l+3 (relative second difference), the
/// closed forms of r(l+1) and the slope, and their positivity. Evaluated in
/// long double except for the v-identity.
BatteryReport appendix_battery(int q_max, std::size_t trials, std::uint64_t seed, int threads = 1);

struct GradientCheck {
  std::size_t points = 0;
  double max_error = 0.0;
};

/// psi against central differences (step 1e-5) of diagonal_functional at
/// points uniform in [-3, 3]^{q-1}.
GradientCheck psi_gradient_check(int q, std::size_t points, std::uint64_t seed);

}  // namespace potts
