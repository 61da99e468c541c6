#pragma once

// Rooted trees, boundary conditions and the boundary-file text format.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "potts/model.hpp"

namespace potts {

class Rng;

/// An immutable rooted tree. Vertex 0 is the root and every vertex's parent
/// has a smaller index (BFS order for the regular constructor).
class TreeSpec {
 public:
  /// parent[0] must be -1 and parent[v] < v for v > 0.
  static TreeSpec from_parents(std::vector<int> parent);

  /// T^n_{d+1}: the root and every internal vertex have d children, all
  /// leaves sit at depth n. n = 0 is the single root vertex.
  static TreeSpec regular(int d, int depth);

  int vertex_count() const noexcept { return static_cast<int>(parent_.size()); }
  int edge_count() const noexcept { return vertex_count() - 1; }
  int parent(int v) const { return parent_.at(static_cast<std::size_t>(v)); }
  std::span<const int> children(int v) const;
  int depth(int v) const { return depth_.at(static_cast<std::size_t>(v)); }
  /// Vertices without children, in index order (the root if it is alone).
  const std::vector<int>& leaves() const noexcept { return leaves_; }
  bool is_leaf(int v) const { return children(v).empty(); }

  /// Down-degree and depth when the tree is some T^n_{d+1}.
  std::optional<int> regular_degree() const noexcept { return regular_degree_; }
  std::optional<int> regular_depth() const noexcept { return regular_depth_; }

 private:
  std::vector<int> parent_;
  std::vector<int> child_offset_;
  std::vector<int> child_list_;
  std::vector<int> depth_;
  std::vector<int> leaves_;
  std::optional<int> regular_degree_;
  std::optional<int> regular_depth_;

  void index();
};

/// A partial coloring of the vertices; unpinned vertices are free.
class BoundaryCondition {
 public:
  static BoundaryCondition all_free(const TreeSpec& tree, int q);
  /// leaf_colors[k] is the color of tree.leaves()[k].
  static BoundaryCondition on_leaves(const TreeSpec& tree, int q, std::span<const int> leaf_colors);
  static BoundaryCondition monochromatic(const TreeSpec& tree, int q, int color);
  static BoundaryCondition random(const TreeSpec& tree, int q, Rng& rng);

  int q() const noexcept { return q_; }
  std::optional<int> color(int v) const;
  void pin(int v, int color);
  std::size_t pinned_count() const;
  /// True when every leaf of `tree` is pinned (the tau : Lambda_n -> [q] case).
  bool pins_all_leaves(const TreeSpec& tree) const;
  /// Colors of the leaves in tree.leaves() order; requires pins_all_leaves.
  std::vector<int> leaf_colors(const TreeSpec& tree) const;
  /// Every pinned color c replaced by pi(c).
  BoundaryCondition relabeled(const Permutation& pi) const;

  friend bool operator==(const BoundaryCondition&, const BoundaryCondition&) = default;

 private:
  BoundaryCondition(int q, std::size_t n) : q_(q), colors_(n, -1) {}
  int q_;
  std::vector<int> colors_;
};

/// Per-color counts of the pinned children of one vertex.
struct ColorCount {
  std::vector<int> counts;
  int total() const;
  friend auto operator<=>(const ColorCount&, const ColorCount&) = default;
};

/// Color counts of the pinned children of every vertex whose children are
/// all pinned leaves, sorted (the multiset that determines the depth-1
/// log-ratios).
std::vector<ColorCount> leaf_parent_counts(const TreeSpec& tree, const BoundaryCondition& tau);

/// A rooted tree with a boundary condition, stored as a DAG of distinct
/// subtree types. Lets boundary conditions on T^n_{d+1} with d^n leaves be
/// described and evaluated exactly without materializing every vertex.
class SharedTree {
 public:
  struct Node {
    int color = -1;           // pinned color of a leaf type, -1 for internal
    std::vector<int> children;  // child type ids (repetition allowed)
  };

  explicit SharedTree(int q) : q_(q) {}

  int add_leaf(int color);
  int add_internal(std::vector<int> children);
  void set_root(int id);

  int q() const noexcept { return q_; }
  int root() const noexcept { return root_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  /// Depth of the levels below the root, or nullopt if leaves sit at mixed depths.
  std::optional<int> uniform_depth() const;

  /// Every leaf of T^depth_{d+1} pinned to `color`.
  static SharedTree monochromatic(int q, int d, int depth, int color);
  /// A random boundary on T^depth_{d+1}: each level holds `pool` random
  /// subtree types whose d children are drawn uniformly from the level
  /// below (colors at the bottom level).
  static SharedTree random_pooled(int q, int d, int depth, int pool, Rng& rng);

  /// Materializes the full tree; throws BudgetError above max_vertices.
  std::pair<TreeSpec, BoundaryCondition> expand(std::size_t max_vertices = 1'000'000) const;

 private:
  int q_;
  int root_ = -1;
  std::vector<Node> nodes_;
};

/// The boundary-file format:
///
///     # comment lines and blank lines are ignored
///     q d n
///     leaf_index color
///     ...
///
/// describes T^n_{d+1} with leaves numbered 0..d^n-1 in BFS order and
/// colors 1..q. Leaves without a line stay free.
struct BoundaryFile {
  int q = 0;
  int d = 0;
  int depth = 0;
  TreeSpec tree;
  BoundaryCondition tau;
};

/// Throws InputError with "line N: ..." on malformed input.
BoundaryFile read_boundary_file(std::istream& in);
void write_boundary_file(std::ostream& out, const BoundaryFile& file);

}  // namespace potts
