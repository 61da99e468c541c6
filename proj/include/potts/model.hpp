#pragma once

// Model parameters, log-ratio vectors and the S_q action on R^{q-1}.
//
// Colors are 0-based throughout the library: color q-1 is the reference
// color that every log-ratio is taken against. The text file formats and
// the CLI use 1-based colors.

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace potts {

/// A point outside the domain of a map, or parameters outside their range.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed user input (files, flags, hypothesis violations).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation would exceed its configured enumeration budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kInfiniteDegree = std::numeric_limits<double>::infinity();

/// Edge interaction w = 1 - alpha*q/(d+1) of the physical model on T_{d+1}.
/// Rejects q < 3, d < 2, alpha outside (0,1] and any combination with w < 0.
double interaction_weight(int q, int d, double alpha);

/// The tuple (q, d, alpha) that governs the recursion maps.
///
/// d is any real > 1, or kInfiniteDegree for the limit maps. The derived
/// weight w may be negative for small d (the maps stay defined wherever
/// their denominators are positive); use interaction_weight() when a
/// physical weight is required.
class ModelParams {
 public:
  ModelParams(int q, double d, double alpha = 1.0);

  static ModelParams limit(int q, double alpha = 1.0) {
    return ModelParams(q, kInfiniteDegree, alpha);
  }

  int q() const noexcept { return q_; }
  int dim() const noexcept { return q_ - 1; }
  double d() const noexcept { return d_; }
  double alpha() const noexcept { return alpha_; }
  bool is_limit() const noexcept { return d_ == kInfiniteDegree; }
  /// alpha*q/(d+1); zero for the limit map.
  double coupling() const noexcept { return coupling_; }
  /// 1 - alpha*q/(d+1); one for the limit map.
  double w() const noexcept { return 1.0 - coupling_; }
  /// True when d is a finite integer (required for tree recursion).
  bool has_integer_degree() const noexcept;

  std::string describe() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  int q_;
  double d_;
  double alpha_;
  double coupling_;
};

/// How a log-ratio vector relates to the depth-0 boundary patterns.
enum class RatioKind {
  Finite,
  /// +inf * e_i: the vertex is pinned to color i < q-1.
  PinnedColor,
  /// -inf * 1: the vertex is pinned to the reference color q-1.
  PinnedReference,
};

/// (R_1, ..., R_{q-1}) with R_i = log Z_i - log Z_{q}.
///
/// Entries are finite except for the two depth-0 patterns +inf*e_i and
/// -inf*1; every other infinite or NaN configuration is rejected on
/// construction.
class LogRatioVec {
 public:
  LogRatioVec() = default;
  explicit LogRatioVec(std::vector<double> entries);
  LogRatioVec(std::initializer_list<double> entries)
      : LogRatioVec(std::vector<double>(entries)) {}

  static LogRatioVec zeros(int q);
  static LogRatioVec diagonal(int q, double t);
  /// scale * e_i.
  static LogRatioVec basis(int q, int i, double scale);
  /// The depth-0 pattern of a vertex pinned to `color`.
  static LogRatioVec pinned(int q, int color);

  int q() const noexcept { return static_cast<int>(v_.size()) + 1; }
  std::size_t size() const noexcept { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }
  std::span<const double> entries() const noexcept { return v_; }
  const std::vector<double>& values() const noexcept { return v_; }

  RatioKind kind() const noexcept { return kind_; }
  bool is_finite() const noexcept { return kind_ == RatioKind::Finite; }
  /// Pinned color for the two infinite patterns.
  std::optional<int> pinned_color() const;
  double sum() const;

  friend bool operator==(const LogRatioVec&, const LogRatioVec&) = default;

 private:
  std::vector<double> v_;
  RatioKind kind_ = RatioKind::Finite;
};

// Linear algebra on finite vectors (dimension mismatch -> InputError).
LogRatioVec operator+(const LogRatioVec& a, const LogRatioVec& b);
LogRatioVec operator-(const LogRatioVec& a, const LogRatioVec& b);
LogRatioVec operator*(double s, const LogRatioVec& a);
LogRatioVec midpoint(const LogRatioVec& a, const LogRatioVec& b);
double max_abs_diff(const LogRatioVec& a, const LogRatioVec& b);

std::ostream& operator<<(std::ostream& os, const LogRatioVec& x);

/// A bijection of {0, ..., q-1}, stored as its image array.
class Permutation {
 public:
  explicit Permutation(std::vector<int> image);

  static Permutation identity(int q);
  static Permutation transposition(int q, int a, int b);

  int size() const noexcept { return static_cast<int>(image_.size()); }
  int operator()(int j) const { return image_[static_cast<std::size_t>(j)]; }
  const std::vector<int>& image() const noexcept { return image_; }
  Permutation inverse() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> image_;
};

/// (pi o sigma)(j) = pi(sigma(j)).
Permutation compose(const Permutation& pi, const Permutation& sigma);

/// All q! permutations in lexicographic order. Only for q <= 8.
std::vector<Permutation> all_permutations(int q);

/// Standard-representation action: embed x as (x_1..x_{q-1}, 0) in R^q,
/// move entry j to position pi(j), and subtract the new last coordinate.
/// The two pinned patterns are mapped to the pattern of the relabeled color.
LogRatioVec apply_permutation(const Permutation& pi, const LogRatioVec& x);

}  // namespace potts
