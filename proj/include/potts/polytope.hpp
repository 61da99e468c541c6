#pragma once

// The symmetric polytopes P_c = intersection over pi of pi . {x : sum x >= -c},
// their fundamental simplices D_c = conv{-c e_1, ..., -c e_{q-1}, 0}, and
// a sampled probe for convexity of F(P_c).
//
// Membership needs only q of the q! half-spaces. With x~ = (x, 0), the
// permuted half-space pi . H reads sum_j x~_j - q x~_k >= -c for k =
// pi^{-1}(q), so the distinct constraints are indexed by k = 1..q:
//   k <  q:  S - q x_k >= -c
//   k == q:  S         >= -c
// where S = sum_i x_i.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "potts/maps.hpp"
#include "potts/model.hpp"
#include "potts/report.hpp"

namespace potts {

/// The level c >= 0 that names P_c and D_c.
class PolytopeLevel {
 public:
  explicit PolytopeLevel(double c);
  double value() const noexcept { return c_; }
  friend auto operator<=>(const PolytopeLevel&, const PolytopeLevel&) = default;

 private:
  double c_;
};

struct MembershipReport {
  bool inside = false;
  /// Smallest constraint slack; inside iff margin >= 0.
  double margin = 0.0;
  /// 0-based index of the tightest constraint; q-1 is the S >= -c one.
  int witness_constraint = 0;
};

MembershipReport membership_P(const LogRatioVec& x, PolytopeLevel c, int q);

/// Smallest c with x in P_c: max(-S, max_k (q x_k - S)).
double level_of(const LogRatioVec& x, int q);

/// x in D_c: every x_i <= 0 and sum x >= -c.
bool membership_D(const LogRatioVec& x, PolytopeLevel c, int q);

/// Uniform samples of D_c, chunked and seeded per the splitting rule in random.hpp.
std::vector<LogRatioVec> sample_D(double c, int q, std::size_t count, std::uint64_t seed, int threads = 1);
/// Uniform samples of the face -c Delta = {x <= 0, sum x = -c}.
std::vector<LogRatioVec> sample_face(double c, int q, std::size_t count, std::uint64_t seed, int threads = 1);
/// Uniform samples of P_c: a uniform D_c point moved by a uniform permutation.
std::vector<LogRatioVec> sample_P(double c, int q, std::size_t count, std::uint64_t seed, int threads = 1);

/// Verdict tolerances for image membership.
inline constexpr double kImageSlack = 1e-9;
inline constexpr double kWitnessExcess = 1e-6;

/// Structured result of a sampled sweep. Labeled sampled evidence.
struct CertificationReport {
  std::string check;
  ModelParams params{3, 2.0, 1.0};
  double c = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  /// Trials whose verdict failed (beyond the slack).
  std::size_t violations = 0;
  /// Smallest observed margin over all trials.
  double min_margin = 0.0;
  /// Worst trial, reported when it violates by more than kWitnessExcess.
  std::optional<std::vector<double>> witness;
  std::string note;

  bool pass() const noexcept { return violations == 0; }
  KeyValueRecord record() const;
  static std::vector<std::string> csv_header();
  void add_csv_row(CsvTable& table) const;
};

/// Midpoints of image pairs (F(x) + F(y))/2 with x, y uniform in P_c are
/// pulled back through the exact inverse; a midpoint fails when it is not in
/// the image or its preimage has level above c + kImageSlack. The margin
/// of a trial is c - level(preimage) (or -inf when outside the image). The
/// witness lists x, y and the image midpoint, concatenated.
CertificationReport convexity_probe(double c, const ModelParams& p, std::size_t pairs, std::uint64_t seed,
                                    int threads = 1);

/// Diagnostic for the limit map: <grad g(y), 1> with g = prod_i G_inf^{-1}(y)_i,
/// the normal of the image hypersurface G_inf(exp{sum x = -c}) at y. Negative
/// wherever the inverse is positive. Throws DomainError outside that region.
double limit_normal_sum(std::span<const double> y, int q);

}  // namespace potts
