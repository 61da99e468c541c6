#include "potts/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace potts {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_inputs(const TreeSpec& tree, const BoundaryCondition& tau, int q, double w) {
  if (q < 2) throw InputError("oracle: q must be >= 2");
  if (tau.q() != q) throw InputError("oracle: boundary condition built for a different q");
  if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("oracle: w must be a finite nonnegative real");
  (void)tree;
}

double log_sum_exp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  // Summing in ascending order makes the result independent of color labels.
  std::vector<double> e(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) e[i] = std::exp(v[i] - m);
  std::sort(e.begin(), e.end());
  double s = 0.0;
  for (double x : e) s += x;
  return m + std::log(s);
}

// msg[c] = log sum_{c'} exp(lw[c']) w^{[c == c']}: the factor a child with
// log weights lw contributes to its parent colored c.
void edge_message(std::span<const double> lw, double w, std::span<double> msg) {
  const std::size_t q = lw.size();
  double m = kNegInf;
  for (double x : lw) m = std::max(m, x);
  if (m == kNegInf) {
    std::fill(msg.begin(), msg.end(), kNegInf);
    return;
  }
  double buf[128];
  std::vector<double> heap;
  double* ep = buf;
  if (q > 64) {
    heap.resize(2 * q);
    ep = heap.data();
  }
  double* sorted = ep + q;
  for (std::size_t c = 0; c < q; ++c) sorted[c] = ep[c] = std::exp(lw[c] - m);
  // Ascending summation order keeps messages exactly equivariant under relabeling.
  std::sort(sorted, sorted + q);
  for (std::size_t c = 0; c < q; ++c) {
    double others = 0.0;
    bool skipped = false;
    for (std::size_t k = 0; k < q; ++k) {
      if (!skipped && sorted[k] == ep[c]) {
        skipped = true;
        continue;
      }
      others += sorted[k];
    }
    const double total = others + w * ep[c];
    msg[c] = total > 0.0 ? m + std::log(total) : kNegInf;
  }
}

// Shifts lw to max 0 and adds the shift to offset.
void normalize(std::span<double> lw, double& offset) {
  double m = kNegInf;
  for (double x : lw) m = std::max(m, x);
  if (m == kNegInf) return;
  for (double& x : lw) x -= m;
  offset += m;
}

std::vector<double> leaf_weights(int q, std::optional<int> color) {
  std::vector<double> lw(static_cast<std::size_t>(q), color ? kNegInf : 0.0);
  if (color) lw[static_cast<std::size_t>(*color)] = 0.0;
  return lw;
}

// Root log weights as a normalized vector (max 0) plus the removed log
// scale; log Z_i = lw[i] + offset. Keeping the two apart preserves the
// precision of ratios when log Z itself is huge.
struct RootWeights {
  std::vector<double> lw;
  double offset = 0.0;
};

// Message passing over nodes whose children all precede them in `order`.
template <class Children, class Base>
RootWeights run_dp(std::size_t count, int q, double w, std::size_t root, Children children_of, Base base_of,
                   bool reverse) {
  const auto qs = static_cast<std::size_t>(q);
  std::vector<double> lw(count * qs), msg(count * qs), off(count, 0.0);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t v = reverse ? count - 1 - k : k;
    std::span<double> mine(lw.data() + v * qs, qs);
    const auto base = base_of(v);
    std::copy(base.begin(), base.end(), mine.begin());
    for (int u : children_of(v)) {
      const auto us = static_cast<std::size_t>(u);
      for (std::size_t c = 0; c < qs; ++c) mine[c] += msg[us * qs + c];
      off[v] += off[us];
    }
    normalize(mine, off[v]);
    edge_message(mine, w, std::span<double>(msg.data() + v * qs, qs));
  }
  return {std::vector<double>(lw.begin() + static_cast<std::ptrdiff_t>(root * qs),
                              lw.begin() + static_cast<std::ptrdiff_t>((root + 1) * qs)),
          off[root]};
}

RootWeights tree_weights(const TreeSpec& tree, const BoundaryCondition& tau, int q, double w) {
  return run_dp(
      static_cast<std::size_t>(tree.vertex_count()), q, w, 0,
      [&](std::size_t v) { return tree.children(static_cast<int>(v)); },
      [&](std::size_t v) { return leaf_weights(q, tau.color(static_cast<int>(v))); }, true);
}

RootWeights shared_weights(const SharedTree& tree, double w) {
  if (tree.root() < 0) throw InputError("SharedTree: root not set");
  if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("oracle: w must be a finite nonnegative real");
  const auto& nodes = tree.nodes();
  return run_dp(
      nodes.size(), tree.q(), w, static_cast<std::size_t>(tree.root()),
      [&](std::size_t v) { return std::span<const int>(nodes[v].children); },
      [&](std::size_t v) {
        const int c = nodes[v].color;
        return leaf_weights(tree.q(), c >= 0 ? std::optional<int>(c) : std::nullopt);
      },
      false);
}

std::vector<double> absolute(const RootWeights& r) {
  std::vector<double> out = r.lw;
  for (double& x : out) x += r.offset;
  return out;
}

LogRatioVec ratios_from_weights(const std::vector<double>& lw) {
  const std::size_t q = lw.size();
  if (lw[q - 1] == kNegInf) throw DomainError("root_log_ratios: Z_q = 0 at the root");
  std::vector<double> r(q - 1);
  for (std::size_t i = 0; i + 1 < q; ++i) {
    if (lw[i] == kNegInf) throw DomainError("root_log_ratios: Z_i = 0 at the root");
    r[i] = lw[i] - lw[q - 1];
  }
  return LogRatioVec(std::move(r));
}

std::vector<double> distribution_from_weights(const std::vector<double>& lw) {
  const double total = log_sum_exp(lw);
  if (total == kNegInf) throw DomainError("conditional_root_distribution: partition function is zero");
  std::vector<double> p(lw.size());
  for (std::size_t i = 0; i < lw.size(); ++i) p[i] = std::exp(lw[i] - total);
  return p;
}

void check_ratio_tree(const TreeSpec& tree, const BoundaryCondition& tau, int q, double w) {
  check_inputs(tree, tau, q, w);
  if (!(w > 0.0 && w <= 1.0)) throw DomainError("root_log_ratios: w must lie in (0,1]");
  if (tree.vertex_count() == 1)
    throw InputError(
        "depth-0 tree: the root log-ratio is the formal pattern +inf*e_i or -inf*1, which the recursion layer "
        "handles by convention; the oracle requires n >= 1");
  if (!tau.pins_all_leaves(tree)) throw InputError("root_log_ratios: every leaf must be pinned");
  if (tau.color(0)) throw InputError("root_log_ratios: the root must be free");
}

}  // namespace

double brute_force_Z(const TreeSpec& tree, const BoundaryCondition& tau, int q, double w,
                     std::optional<int> pinned_root) {
  check_inputs(tree, tau, q, w);
  const int n = tree.vertex_count();
  std::vector<int> color(static_cast<std::size_t>(n), -1);
  std::vector<int> free;
  for (int v = 0; v < n; ++v) {
    if (auto c = tau.color(v)) color[static_cast<std::size_t>(v)] = *c;
    if (v == 0 && pinned_root) {
      if (*pinned_root < 0 || *pinned_root >= q) throw InputError("brute_force_Z: root color out of range");
      if (color[0] >= 0 && color[0] != *pinned_root) return 0.0;
      color[0] = *pinned_root;
    }
    if (color[static_cast<std::size_t>(v)] < 0) free.push_back(v);
  }
  if (static_cast<double>(free.size()) * std::log(static_cast<double>(q)) > std::log(kBruteForceBudget) + 1e-9)
    throw BudgetError("brute_force_Z: q^" + std::to_string(free.size()) +
                      " colorings exceed the enumeration budget; use dp_Z");

  std::vector<double> w_pow(static_cast<std::size_t>(n), 1.0);
  for (std::size_t k = 1; k < w_pow.size(); ++k) w_pow[k] = w_pow[k - 1] * w;

  for (int v : free) color[static_cast<std::size_t>(v)] = 0;
  double total = 0.0;
  while (true) {
    int mono = 0;
    for (int v = 1; v < n; ++v)
      mono += color[static_cast<std::size_t>(v)] == color[static_cast<std::size_t>(tree.parent(v))];
    total += w_pow[static_cast<std::size_t>(mono)];
    std::size_t k = 0;
    for (; k < free.size(); ++k) {
      int& c = color[static_cast<std::size_t>(free[k])];
      if (++c < q) break;
      c = 0;
    }
    if (k == free.size()) break;
  }
  return total;
}

std::vector<double> root_color_log_weights(const TreeSpec& tree, const BoundaryCondition& tau, int q, double w) {
  check_inputs(tree, tau, q, w);
  return absolute(tree_weights(tree, tau, q, w));
}

std::vector<double> root_color_log_weights(const SharedTree& tree, double w) {
  return absolute(shared_weights(tree, w));
}

double dp_log_Z(const TreeSpec& tree, const BoundaryCondition& tau, int q, double w, std::optional<int> pinned_root) {
  if (tree.vertex_count() > 1'000'000) throw BudgetError("dp_Z: more than 10^6 vertices");
  check_inputs(tree, tau, q, w);
  const auto r = tree_weights(tree, tau, q, w);
  if (pinned_root) {
    if (*pinned_root < 0 || *pinned_root >= q) throw InputError("dp_Z: root color out of range");
    return r.lw[static_cast<std::size_t>(*pinned_root)] + r.offset;
  }
  return log_sum_exp(r.lw) + r.offset;
}

double dp_Z(const TreeSpec& tree, const BoundaryCondition& tau, int q, double w, std::optional<int> pinned_root) {
  return std::exp(dp_log_Z(tree, tau, q, w, pinned_root));
}

LogRatioVec root_log_ratios(const TreeSpec& tree, const BoundaryCondition& tau, int q, double w) {
  check_ratio_tree(tree, tau, q, w);
  return ratios_from_weights(tree_weights(tree, tau, q, w).lw);
}

LogRatioVec root_log_ratios(const SharedTree& tree, double w) {
  if (!(w > 0.0 && w <= 1.0)) throw DomainError("root_log_ratios: w must lie in (0,1]");
  if (tree.root() >= 0 && tree.nodes()[static_cast<std::size_t>(tree.root())].children.empty())
    throw InputError("depth-0 tree: the oracle requires n >= 1");
  return ratios_from_weights(shared_weights(tree, w).lw);
}

std::vector<double> conditional_root_distribution(const TreeSpec& tree, const BoundaryCondition& tau, int q,
                                                  double w) {
  check_inputs(tree, tau, q, w);
  return distribution_from_weights(tree_weights(tree, tau, q, w).lw);
}

std::vector<double> conditional_root_distribution(const SharedTree& tree, double w) {
  return distribution_from_weights(shared_weights(tree, w).lw);
}

double max_deviation_from_uniform(std::span<const double> p) {
  const double u = 1.0 / static_cast<double>(p.size());
  double m = 0.0;
  for (double x : p) m = std::max(m, std::abs(x - u));
  return m;
}

namespace {

// Normalized per-color log weights identify a subtree type up to scale.
using Weights = std::vector<double>;

Weights normalized(Weights lw) {
  const double top = lw.back();
  for (double& x : lw) x -= top;
  return lw;
}

bool lex_less(const Weights& a, const Weights& b) { return a < b; }

bool near_equal(const Weights& a, const Weights& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    if (std::abs(a[i] - b[i]) > 1e-12) return false;
  }
  return true;
}

void dedup(std::vector<Weights>& v) {
  std::sort(v.begin(), v.end(), lex_less);
  std::vector<Weights> out;
  for (auto& x : v)
    if (out.empty() || !near_equal(out.back(), x)) out.push_back(std::move(x));
  v = std::move(out);
}

double multiset_count(std::size_t kinds, int size) {
  // C(kinds + size - 1, size)
  double r = 1.0;
  for (int i = 1; i <= size; ++i) r = r * static_cast<double>(kinds + static_cast<std::size_t>(i) - 1) / i;
  return r;
}

}  // namespace

std::vector<LogRatioVec> enumerate_Rn(int n, int d, int q, double w) {
  if (n < 1 || n > 3 || d < 1 || d > 4 || q < 2 || q > 4)
    throw BudgetError("enumerate_Rn: supported for 1 <= n <= 3, d <= 4, q <= 4");
  if (!(w > 0.0 && w <= 1.0)) throw DomainError("enumerate_Rn: w must lie in (0,1]");

  std::vector<Weights> level;
  for (int c = 0; c < q; ++c) level.push_back(leaf_weights(q, c));

  for (int depth = 1; depth <= n; ++depth) {
    if (multiset_count(level.size(), d) > static_cast<double>(kRnMultisetBudget))
      throw BudgetError("enumerate_Rn: too many child multisets at depth " + std::to_string(depth));
    std::vector<Weights> messages(level.size(), Weights(static_cast<std::size_t>(q)));
    for (std::size_t k = 0; k < level.size(); ++k) edge_message(level[k], w, messages[k]);
    std::vector<Weights> next;
    std::vector<std::size_t> pick(static_cast<std::size_t>(d), 0);  // non-decreasing indices
    while (true) {
      Weights parent(static_cast<std::size_t>(q), 0.0);
      for (std::size_t k : pick)
        for (int c = 0; c < q; ++c) parent[static_cast<std::size_t>(c)] += messages[k][static_cast<std::size_t>(c)];
      next.push_back(normalized(std::move(parent)));
      std::size_t pos = pick.size();
      while (pos > 0 && pick[pos - 1] + 1 == level.size()) --pos;
      if (pos == 0) break;
      ++pick[pos - 1];
      for (std::size_t j = pos; j < pick.size(); ++j) pick[j] = pick[pos - 1];
    }
    dedup(next);
    level = std::move(next);
  }

  std::vector<LogRatioVec> out;
  out.reserve(level.size());
  for (const auto& lw : level) out.push_back(ratios_from_weights(lw));
  return out;
}

}  // namespace potts
