#pragma once

// Sampled verification drivers: two-step forward invariance of P_c, the
// decreasing level sequence built from it, diagonal minimality of the
// two-step limit map, and decay of root information with depth.
//
// All results are sampled evidence, not proofs.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "potts/model.hpp"
#include "potts/polytope.hpp"
#include "potts/report.hpp"

namespace potts {

/// Slack allowed when comparing a sampled level against phi(c).
inline constexpr double kPhiSlack = 1e-6;

struct InvarianceReport {
  ModelParams params{3, 2.0, 1.0};
  double c_in = 0.0;
  /// max level_of(F(F(x))) over the sample set.
  double c_out_estimate = 0.0;
  double margin = 0.0;  // c_in - c_out_estimate
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
  /// Sample attaining c_out_estimate.
  std::vector<double> argmax;
  /// phi(c_in), present for the alpha = 1 limit map.
  std::optional<double> phi_bound;

  bool phi_ok() const noexcept { return !phi_bound || c_out_estimate <= *phi_bound + kPhiSlack; }
  bool pass() const noexcept { return margin > 0.0 && phi_ok(); }
  KeyValueRecord record() const;
  static std::vector<std::string> csv_header();
  void add_csv_row(CsvTable& table) const;
};

/// Estimates the smallest c' with F(F(D_c)) inside P_{c'}: `samples`
/// uniform points of D_c plus the corners 0, -c e_i and the face center
/// -c/(q-1) * 1. By equivariance this bounds F(F(P_c)) as well.
/// Requires c in (0, q+1].
InvarianceReport two_step_level(double c, const ModelParams& p, std::size_t samples, std::uint64_t seed,
                                int threads = 1);

/// Safety slack added to each sampled level in contraction_sequence.
inline constexpr double kSequenceSlack = 1e-6;

enum class SequenceStatus { ReachedEpsilon, MaxIterations, NonDecreasing };
std::string to_string(SequenceStatus s);

struct ContractionSequence {
  std::vector<double> levels;  // c_1 = q+1, c_2, ...
  SequenceStatus status = SequenceStatus::MaxIterations;
  std::string diagnostic;
};

/// c_{n+1} = two_step_level(c_n).c_out_estimate + kSequenceSlack, stopping
/// once c_n < epsilon, after max_iters steps, or when a step fails to
/// decrease (reported, the sequence keeps only strictly decreasing levels).
ContractionSequence contraction_sequence(const ModelParams& p, double epsilon, int max_iters,
                                         std::size_t samples, std::uint64_t seed, int threads = 1);

struct DiagonalReport {
  CertificationReport base;
  /// <Phi(-c/(q-1) * 1), 1>.
  double diagonal_value = 0.0;
  /// Smallest margin among samples at sup-distance >= off_diagonal_gap from the diagonal point.
  double strict_min_margin = 0.0;
  std::size_t strict_count = 0;
  double off_diagonal_gap = 0.0;
};

/// Tolerance of the minimality comparison.
inline constexpr double kMinimalityTol = 1e-10;

/// For x uniform on the face -c Delta, checks <Phi(x),1> >= <Phi(diag),1> -
/// kMinimalityTol with Phi the two-step limit map (alpha = 1).
DiagonalReport diagonal_minimality_check(double c, int q, std::size_t samples, std::uint64_t seed,
                                         int threads = 1);

enum class BoundaryStrategy { Mono, Random, Both };
BoundaryStrategy parse_boundary_strategy(const std::string& s);
std::string to_string(BoundaryStrategy s);

struct ConvergenceConfig {
  int q = 5;
  int d = 200;
  /// Edge weight in (0, 1]; w = 1 gives identically uniform roots.
  double w = 1.0;
  int n_max = 12;
  BoundaryStrategy boundary = BoundaryStrategy::Both;
  int trials = 50;
  /// Distinct subtree types per level of a random boundary.
  int pool = 16;
  /// 0-based leaf color of the monochromatic boundary.
  int mono_color = 0;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct ConvergenceRow {
  int depth = 0;
  std::optional<double> mono_dev;
  std::optional<double> random_max_dev;
  double max_dev = 0.0;
  double bound = 0.0;  // C * alpha^{n/2}, C fixed by depth 1
};

struct ConvergenceReport {
  ConvergenceConfig config;
  double alpha = 0.0;
  std::vector<ConvergenceRow> rows;
  /// max over n of max_dev(n+2)/max_dev(n).
  double max_two_depth_ratio = 0.0;
  /// sqrt(max_two_depth_ratio): per-level geometric rate.
  double rate = 0.0;
  /// max_dev(n+2) < max_dev(n) for every n (or both zero).
  bool decreasing = true;

  /// rate <= sqrt(alpha) * 1.05 and decreasing.
  bool pass() const noexcept;
  CsvTable table() const;
  KeyValueRecord record() const;
};

/// Maximum deviation max_i |Pr[root = i | tau] - 1/q| on T^n_{d+1} for
/// n = 1..n_max, exact by message passing. Random boundaries are drawn as
/// shared-subtree trees (see SharedTree::random_pooled), one per trial and
/// depth, seeded by derive_seed(derive_seed(seed, n), trial).
ConvergenceReport convergence_experiment(const ConvergenceConfig& config);

/// Front end with w = 1 - alpha q/(d+1).
ConvergenceReport convergence_experiment(int q, int d, double alpha, int n_max, BoundaryStrategy boundary,
                                         int trials, std::uint64_t seed, int threads = 1);

}  // namespace potts
