#pragma once

// Ground truth for finite trees: partition functions by brute-force
// enumeration and by exact leaf-to-root message passing, and the root
// log-ratios and conditional distributions derived from them.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "potts/model.hpp"
#include "potts/tree.hpp"

namespace potts {

/// Largest number of colorings brute_force_Z will enumerate.
inline constexpr double kBruteForceBudget = 1e7;

/// Sum over colorings extending tau (and the optional root pin) of
/// w^{#monochromatic edges}. Throws BudgetError if q^{free} > kBruteForceBudget.
double brute_force_Z(const TreeSpec& tree, const BoundaryCondition& tau, int q, double w,
                     std::optional<int> pinned_root = std::nullopt);

/// log Z_i for each root color i (restricted partition functions), computed
/// leaf-to-root with per-vertex normalization. -inf where Z_i = 0.
std::vector<double> root_color_log_weights(const TreeSpec& tree, const BoundaryCondition& tau, int q, double w);
std::vector<double> root_color_log_weights(const SharedTree& tree, double w);

/// Same quantity as brute_force_Z, by message passing.
double dp_Z(const TreeSpec& tree, const BoundaryCondition& tau, int q, double w,
            std::optional<int> pinned_root = std::nullopt);
double dp_log_Z(const TreeSpec& tree, const BoundaryCondition& tau, int q, double w,
                std::optional<int> pinned_root = std::nullopt);

/// (log Z_1 - log Z_q, ..., log Z_{q-1} - log Z_q) at the root. Requires a
/// depth >= 1 tree with every leaf pinned and w in (0, 1].
LogRatioVec root_log_ratios(const TreeSpec& tree, const BoundaryCondition& tau, int q, double w);
LogRatioVec root_log_ratios(const SharedTree& tree, double w);

/// Pr[root = i | leaves = tau], i = 0..q-1.
std::vector<double> conditional_root_distribution(const TreeSpec& tree, const BoundaryCondition& tau, int q,
                                                  double w);
std::vector<double> conditional_root_distribution(const SharedTree& tree, double w);

/// max_i |p_i - 1/q|.
double max_deviation_from_uniform(std::span<const double> p);

/// Cap on candidate multisets per level in enumerate_Rn.
inline constexpr std::size_t kRnMultisetBudget = 2'000'000;

/// The distinct root log-ratio vectors of T^n_{d+1} over all boundary
/// conditions, deduplicated at 1e-12 and sorted lexicographically. Uses
/// the fact that the root vector depends only on the multiset of child
/// vectors. Bounded to n <= 3, d <= 4, q <= 4 and kRnMultisetBudget.
std::vector<LogRatioVec> enumerate_Rn(int n, int d, int q, double w);

}  // namespace potts
