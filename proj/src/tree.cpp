#include "potts/tree.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "potts/random.hpp"

namespace potts {

TreeSpec TreeSpec::from_parents(std::vector<int> parent) {
  if (parent.empty() || parent[0] != -1) throw InputError("TreeSpec: vertex 0 must be the root (parent -1)");
  for (std::size_t v = 1; v < parent.size(); ++v)
    if (parent[v] < 0 || parent[v] >= static_cast<int>(v))
      throw InputError("TreeSpec: parent of vertex " + std::to_string(v) + " must precede it");
  TreeSpec t;
  t.parent_ = std::move(parent);
  t.index();
  return t;
}

TreeSpec TreeSpec::regular(int d, int depth) {
  if (d < 1) throw InputError("TreeSpec::regular: d must be >= 1");
  if (depth < 0) throw InputError("TreeSpec::regular: depth must be >= 0");
  std::size_t total = 1, level = 1;
  for (int k = 0; k < depth; ++k) {
    level *= static_cast<std::size_t>(d);
    total += level;
    if (total > 20'000'000) throw BudgetError("TreeSpec::regular: tree too large to materialize");
  }
  std::vector<int> parent;
  parent.reserve(total);
  parent.push_back(-1);
  std::size_t begin = 0, end = 1;
  for (int k = 0; k < depth; ++k) {
    for (std::size_t v = begin; v < end; ++v)
      for (int c = 0; c < d; ++c) parent.push_back(static_cast<int>(v));
    begin = end;
    end = parent.size();
  }
  return from_parents(std::move(parent));
}

void TreeSpec::index() {
  const std::size_t n = parent_.size();
  std::vector<int> count(n, 0);
  for (std::size_t v = 1; v < n; ++v) ++count[static_cast<std::size_t>(parent_[v])];
  child_offset_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) child_offset_[v + 1] = child_offset_[v] + count[v];
  child_list_.assign(n - 1, 0);
  std::vector<int> fill(child_offset_.begin(), child_offset_.end() - 1);
  for (std::size_t v = 1; v < n; ++v)
    child_list_[static_cast<std::size_t>(fill[static_cast<std::size_t>(parent_[v])]++)] = static_cast<int>(v);
  depth_.assign(n, 0);
  for (std::size_t v = 1; v < n; ++v) depth_[v] = depth_[static_cast<std::size_t>(parent_[v])] + 1;
  leaves_.clear();
  for (std::size_t v = 0; v < n; ++v)
    if (count[v] == 0) leaves_.push_back(static_cast<int>(v));

  // Regular iff all internal vertices share a child count and all leaves a depth.
  regular_degree_.reset();
  regular_depth_.reset();
  int degree = -1;
  bool regular = true;
  for (std::size_t v = 0; v < n && regular; ++v) {
    if (count[v] == 0) continue;
    if (degree < 0) degree = count[v];
    regular = count[v] == degree;
  }
  const int leaf_depth = depth_[static_cast<std::size_t>(leaves_.front())];
  for (int leaf : leaves_) regular = regular && depth_[static_cast<std::size_t>(leaf)] == leaf_depth;
  if (regular) {
    regular_degree_ = degree < 0 ? 0 : degree;
    regular_depth_ = leaf_depth;
  }
}

std::span<const int> TreeSpec::children(int v) const {
  const auto b = static_cast<std::size_t>(child_offset_.at(static_cast<std::size_t>(v)));
  const auto e = static_cast<std::size_t>(child_offset_.at(static_cast<std::size_t>(v) + 1));
  return std::span<const int>(child_list_).subspan(b, e - b);
}

BoundaryCondition BoundaryCondition::all_free(const TreeSpec& tree, int q) {
  if (q < 2) throw InputError("BoundaryCondition: q must be >= 2");
  return BoundaryCondition(q, static_cast<std::size_t>(tree.vertex_count()));
}

BoundaryCondition BoundaryCondition::on_leaves(const TreeSpec& tree, int q, std::span<const int> leaf_colors) {
  if (leaf_colors.size() != tree.leaves().size())
    throw InputError("BoundaryCondition: need exactly one color per leaf");
  auto tau = all_free(tree, q);
  for (std::size_t k = 0; k < leaf_colors.size(); ++k) tau.pin(tree.leaves()[k], leaf_colors[k]);
  return tau;
}

BoundaryCondition BoundaryCondition::monochromatic(const TreeSpec& tree, int q, int color) {
  std::vector<int> colors(tree.leaves().size(), color);
  return on_leaves(tree, q, colors);
}

BoundaryCondition BoundaryCondition::random(const TreeSpec& tree, int q, Rng& rng) {
  std::vector<int> colors(tree.leaves().size());
  for (int& c : colors) c = rng.uniform_int(0, q - 1);
  return on_leaves(tree, q, colors);
}

std::optional<int> BoundaryCondition::color(int v) const {
  const int c = colors_.at(static_cast<std::size_t>(v));
  if (c < 0) return std::nullopt;
  return c;
}

void BoundaryCondition::pin(int v, int color) {
  if (color < 0 || color >= q_) throw InputError("BoundaryCondition: color out of range");
  colors_.at(static_cast<std::size_t>(v)) = color;
}

std::size_t BoundaryCondition::pinned_count() const {
  return static_cast<std::size_t>(std::count_if(colors_.begin(), colors_.end(), [](int c) { return c >= 0; }));
}

bool BoundaryCondition::pins_all_leaves(const TreeSpec& tree) const {
  if (colors_.size() != static_cast<std::size_t>(tree.vertex_count())) return false;
  return std::all_of(tree.leaves().begin(), tree.leaves().end(),
                     [&](int leaf) { return colors_[static_cast<std::size_t>(leaf)] >= 0; });
}

std::vector<int> BoundaryCondition::leaf_colors(const TreeSpec& tree) const {
  if (!pins_all_leaves(tree)) throw InputError("BoundaryCondition: not every leaf is pinned");
  std::vector<int> out;
  out.reserve(tree.leaves().size());
  for (int leaf : tree.leaves()) out.push_back(colors_[static_cast<std::size_t>(leaf)]);
  return out;
}

BoundaryCondition BoundaryCondition::relabeled(const Permutation& pi) const {
  if (pi.size() != q_) throw InputError("BoundaryCondition::relabeled: permutation size must equal q");
  BoundaryCondition out = *this;
  for (int& c : out.colors_)
    if (c >= 0) c = pi(c);
  return out;
}

int ColorCount::total() const {
  int s = 0;
  for (int k : counts) s += k;
  return s;
}

std::vector<ColorCount> leaf_parent_counts(const TreeSpec& tree, const BoundaryCondition& tau) {
  std::vector<ColorCount> out;
  for (int v = 0; v < tree.vertex_count(); ++v) {
    auto ch = tree.children(v);
    if (ch.empty()) continue;
    ColorCount cc{std::vector<int>(static_cast<std::size_t>(tau.q()), 0)};
    bool all_pinned_leaves = true;
    for (int u : ch) {
      auto col = tau.color(u);
      if (!tree.is_leaf(u) || !col) {
        all_pinned_leaves = false;
        break;
      }
      ++cc.counts[static_cast<std::size_t>(*col)];
    }
    if (all_pinned_leaves) out.push_back(std::move(cc));
  }
  std::sort(out.begin(), out.end());
  return out;
}

int SharedTree::add_leaf(int color) {
  if (color < 0 || color >= q_) throw InputError("SharedTree: color out of range");
  nodes_.push_back(Node{color, {}});
  return static_cast<int>(nodes_.size()) - 1;
}

int SharedTree::add_internal(std::vector<int> children) {
  if (children.empty()) throw InputError("SharedTree: internal node needs children");
  for (int c : children)
    if (c < 0 || c >= static_cast<int>(nodes_.size())) throw InputError("SharedTree: unknown child type");
  nodes_.push_back(Node{-1, std::move(children)});
  return static_cast<int>(nodes_.size()) - 1;
}

void SharedTree::set_root(int id) {
  if (id < 0 || id >= static_cast<int>(nodes_.size())) throw InputError("SharedTree: unknown root type");
  root_ = id;
}

std::optional<int> SharedTree::uniform_depth() const {
  if (root_ < 0) return std::nullopt;
  std::vector<int> depth(nodes_.size(), 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.children.empty()) continue;
    int dc = depth[static_cast<std::size_t>(n.children.front())];
    for (int c : n.children)
      if (depth[static_cast<std::size_t>(c)] != dc) return std::nullopt;
    depth[i] = dc + 1;
  }
  return depth[static_cast<std::size_t>(root_)];
}

SharedTree SharedTree::monochromatic(int q, int d, int depth, int color) {
  if (d < 1 || depth < 1) throw InputError("SharedTree::monochromatic: need d >= 1 and depth >= 1");
  SharedTree t(q);
  int id = t.add_leaf(color);
  for (int k = 0; k < depth; ++k) id = t.add_internal(std::vector<int>(static_cast<std::size_t>(d), id));
  t.set_root(id);
  return t;
}

SharedTree SharedTree::random_pooled(int q, int d, int depth, int pool, Rng& rng) {
  if (d < 1 || depth < 1 || pool < 1) throw InputError("SharedTree::random_pooled: need d, depth, pool >= 1");
  SharedTree t(q);
  std::vector<int> below;
  for (int c = 0; c < q; ++c) below.push_back(t.add_leaf(c));
  for (int level = depth - 1; level >= 0; --level) {
    const int width = level == 0 ? 1 : pool;
    std::vector<int> current;
    for (int k = 0; k < width; ++k) {
      std::vector<int> ch(static_cast<std::size_t>(d));
      for (int& c : ch) c = below[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(below.size()) - 1))];
      current.push_back(t.add_internal(std::move(ch)));
    }
    below = std::move(current);
  }
  t.set_root(below.front());
  return t;
}

std::pair<TreeSpec, BoundaryCondition> SharedTree::expand(std::size_t max_vertices) const {
  if (root_ < 0) throw InputError("SharedTree: root not set");
  // BFS over (type) expanding repeated children.
  std::vector<int> parent{-1};
  std::vector<int> type{root_};
  for (std::size_t v = 0; v < type.size(); ++v) {
    for (int c : nodes_[static_cast<std::size_t>(type[v])].children) {
      parent.push_back(static_cast<int>(v));
      type.push_back(c);
      if (type.size() > max_vertices) throw BudgetError("SharedTree::expand: tree exceeds vertex budget");
    }
  }
  TreeSpec tree = TreeSpec::from_parents(std::move(parent));
  BoundaryCondition tau = BoundaryCondition::all_free(tree, q_);
  for (std::size_t v = 0; v < type.size(); ++v) {
    const auto& n = nodes_[static_cast<std::size_t>(type[v])];
    if (n.children.empty() && n.color >= 0) tau.pin(static_cast<int>(v), n.color);
  }
  return {std::move(tree), std::move(tau)};
}

namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw InputError("line " + std::to_string(line) + ": " + what);
}

}  // namespace

BoundaryFile read_boundary_file(std::istream& in) {
  std::string text;
  int line_no = 0;
  bool have_header = false;
  int q = 0, d = 0, n = 0;
  std::optional<TreeSpec> tree;
  std::optional<BoundaryCondition> tau;
  std::vector<bool> seen;
  while (std::getline(in, text)) {
    ++line_no;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    auto first = text.find_first_not_of(" \t");
    if (first == std::string::npos || text[first] == '#') continue;
    std::istringstream ls(text);
    if (!have_header) {
      if (!(ls >> q >> d >> n)) parse_fail(line_no, "expected header 'q d n'");
      std::string extra;
      if (ls >> extra) parse_fail(line_no, "trailing text after header");
      if (q < 2) parse_fail(line_no, "q must be >= 2");
      if (d < 1) parse_fail(line_no, "d must be >= 1");
      if (n < 0) parse_fail(line_no, "n must be >= 0");
      try {
        tree = TreeSpec::regular(d, n);
      } catch (const BudgetError& e) {
        parse_fail(line_no, e.what());
      }
      tau = BoundaryCondition::all_free(*tree, q);
      seen.assign(tree->leaves().size(), false);
      have_header = true;
      continue;
    }
    long long leaf = -1;
    int color = 0;
    if (!(ls >> leaf >> color)) parse_fail(line_no, "expected 'leaf_index color'");
    std::string extra;
    if (ls >> extra) parse_fail(line_no, "trailing text after leaf entry");
    if (leaf < 0 || leaf >= static_cast<long long>(tree->leaves().size()))
      parse_fail(line_no, "leaf index " + std::to_string(leaf) + " out of range");
    if (color < 1 || color > q) parse_fail(line_no, "color " + std::to_string(color) + " outside 1.." + std::to_string(q));
    if (seen[static_cast<std::size_t>(leaf)]) parse_fail(line_no, "leaf " + std::to_string(leaf) + " listed twice");
    seen[static_cast<std::size_t>(leaf)] = true;
    tau->pin(tree->leaves()[static_cast<std::size_t>(leaf)], color - 1);
  }
  if (!have_header) parse_fail(line_no + 1, "missing header 'q d n'");
  return BoundaryFile{q, d, n, std::move(*tree), std::move(*tau)};
}

void write_boundary_file(std::ostream& out, const BoundaryFile& file) {
  out << file.q << ' ' << file.d << ' ' << file.depth << '\n';
  const auto& leaves = file.tree.leaves();
  for (std::size_t k = 0; k < leaves.size(); ++k)
    if (auto c = file.tau.color(leaves[k])) out << k << ' ' << (*c + 1) << '\n';
}

}  // namespace potts
