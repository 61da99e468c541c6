#pragma once

// The recursion maps in log-ratio coordinates.
//
//   G_i(z) = (1 - z_i) / (sum_j z_j + w),        w = 1 - alpha*q/(d+1)
//   F_i(x) = d * log(1 + alpha*q/(d+1) * G_i(exp x))
//
// and their d -> infinity limits G_inf,i(z) = q(1 - z_i)/(sum_j z_j + 1),
// F_inf = alpha * G_inf o exp.

#include <optional>
#include <span>
#include <vector>

#include "potts/model.hpp"
#include "potts/tree.hpp"

namespace potts {

/// Dense row-major square matrix.
struct Matrix {
  int n = 0;
  std::vector<double> a;

  explicit Matrix(int size) : n(size), a(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i * n + j)]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i * n + j)]; }
};

/// G_{d,alpha}(z) for positive z; the alpha-free q(1-z_i)/(sum z + 1) for
/// the limit. Throws DomainError on a nonpositive denominator.
std::vector<double> G_map(std::span<const double> z, const ModelParams& p);

/// F_{d,alpha}(x), including the limits at the two pinned patterns:
/// +inf*e_i -> d*log(w)*e_i and -inf*1 -> d*log(1 + alpha*q/(d+1-alpha*q))*1
/// (-alpha*q*e_i and alpha*q*1 for the limit map).
LogRatioVec F_map(const LogRatioVec& x, const ModelParams& p);

/// F o F.
LogRatioVec F_twice(const LogRatioVec& x, const ModelParams& p);

/// Exact inverse of F_map; nullopt when y is not in the image.
std::optional<LogRatioVec> try_F_inverse(std::span<const double> y, const ModelParams& p);
/// As try_F_inverse, throwing DomainError("not in image") instead.
LogRatioVec F_inverse(std::span<const double> y, const ModelParams& p);

/// Analytic Jacobian dF_i/dx_j at a finite x.
Matrix jacobian_F(const LogRatioVec& x, const ModelParams& p);

/// The diagonal restriction g o f of the two-step limit map (alpha = 1):
/// phi(x) = -<F_inf(F_inf(-x/(q-1) * 1)), 1>.
double phi(double x, int q);

/// -<F_d(F_d(-x/(q-1) * 1)), 1> for finite d.
double phi_d(double x, const ModelParams& p);

/// (1/d) * sum of F(child) over exactly d children; requires integer d.
LogRatioVec recursion_step(std::span<const LogRatioVec> children, const ModelParams& p);

struct Rescaling {
  double d_prime;
  double ratio;  // d / d_prime
};

/// d' = (d+1)/alpha - 1, so that F_{d,alpha} = (d/d') * F_{d',1}.
Rescaling rescaling_d_prime(const ModelParams& p);

/// Root log-ratios of T^n_{d+1} obtained by applying recursion_step level by
/// level from the leaf patterns. Requires every leaf pinned, a regular tree
/// of down-degree p.d(), and depth >= 1.
LogRatioVec recursion_log_ratios(const TreeSpec& tree, const BoundaryCondition& tau, const ModelParams& p);
/// Same on a shared-subtree description; each distinct type is evaluated once.
LogRatioVec recursion_log_ratios(const SharedTree& tree, const ModelParams& p);

/// Recursion parameters for edge weight w in (0,1): alpha = (1-w)(d+1)/q.
ModelParams params_for_weight(int q, int d, double w);

}  // namespace potts
