#include "potts/maps.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace potts {

namespace {

void check_dim(std::size_t n, const ModelParams& p, const char* what) {
  if (n != static_cast<std::size_t>(p.dim()))
    throw InputError(std::string(what) + ": expected " + std::to_string(p.dim()) + " coordinates");
}

// exp(x) rescaled by exp(-m), m = max(0, max x): keeps every entry in
// (0, 1] so large arguments cannot overflow.
struct ScaledExp {
  std::vector<double> z;  // exp(x_j - m)
  double one;             // exp(-m)
  double sum;             // sum_j z_j
};

ScaledExp scaled_exp(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, v);
  ScaledExp s{std::vector<double>(x.size()), std::exp(-m), 0.0};
  for (std::size_t j = 0; j < x.size(); ++j) {
    s.z[j] = std::exp(x[j] - m);
    s.sum += s.z[j];
  }
  return s;
}

std::vector<double> F_finite_values(std::span<const double> x, const ModelParams& p) {
  const auto e = scaled_exp(x);
  const double k = p.coupling();
  const double den = e.sum + p.w() * e.one;
  if (!(den > 0.0)) throw DomainError("F_map: nonpositive denominator sum(exp x) + w");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double kg = k * (e.one - e.z[i]) / den;
    if (!(kg > -1.0)) throw DomainError("F_map: logarithm argument is nonpositive");
    out[i] = p.d() * std::log1p(kg);
  }
  return out;
}

std::vector<double> F_limit_values(std::span<const double> x, const ModelParams& p) {
  const auto e = scaled_exp(x);
  const double scale = p.alpha() * p.q() / (e.sum + e.one);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = scale * (e.one - e.z[i]);
  return out;
}

}  // namespace

std::vector<double> G_map(std::span<const double> z, const ModelParams& p) {
  check_dim(z.size(), p, "G_map");
  double sum = 0.0;
  for (double v : z) {
    if (!(v > 0.0)) throw DomainError("G_map: coordinates must be positive");
    sum += v;
  }
  const double den = p.is_limit() ? (sum + 1.0) / p.q() : sum + p.w();
  if (!(den > 0.0)) throw DomainError("G_map: nonpositive denominator");
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = (1.0 - z[i]) / den;
  return out;
}

LogRatioVec F_map(const LogRatioVec& x, const ModelParams& p) {
  check_dim(x.size(), p, "F_map");
  const int q = p.q();
  switch (x.kind()) {
    case RatioKind::PinnedColor: {
      const double v = p.is_limit() ? -p.alpha() * q : p.d() * std::log(p.w());
      if (!std::isfinite(v)) throw DomainError("F_map: pinned pattern needs w > 0");
      return LogRatioVec::basis(q, *x.pinned_color(), v);
    }
    case RatioKind::PinnedReference: {
      const double v = p.is_limit() ? p.alpha() * q : p.d() * std::log1p(p.coupling() / p.w());
      if (!(p.w() > 0.0)) throw DomainError("F_map: pinned pattern needs w > 0");
      return LogRatioVec::diagonal(q, v);
    }
    case RatioKind::Finite:
      break;
  }
  return LogRatioVec(p.is_limit() ? F_limit_values(x.entries(), p) : F_finite_values(x.entries(), p));
}

LogRatioVec F_twice(const LogRatioVec& x, const ModelParams& p) { return F_map(F_map(x, p), p); }

std::optional<LogRatioVec> try_F_inverse(std::span<const double> y, const ModelParams& p) {
  check_dim(y.size(), p, "F_inverse");
  const double q = p.q();
  std::vector<double> g(y.size());
  double gsum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) return std::nullopt;
    g[i] = p.is_limit() ? y[i] / p.alpha() : std::expm1(y[i] / p.d()) / p.coupling();
    gsum += g[i];
  }
  // G_i = (1 - z_i)/s with s = sum z + w solves to s = (q - 1 + w)/(1 + sum G).
  double scale;
  if (p.is_limit()) {
    const double den = gsum + q;
    if (!(den > 0.0)) return std::nullopt;
    scale = q / den;
  } else {
    const double den = 1.0 + gsum;
    if (!(den > 0.0)) return std::nullopt;
    scale = (q - 1.0 + p.w()) / den;
  }
  std::vector<double> x(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double z = 1.0 - g[i] * scale;
    if (!(z > 0.0)) return std::nullopt;
    x[i] = std::log(z);
  }
  return LogRatioVec(std::move(x));
}

LogRatioVec F_inverse(std::span<const double> y, const ModelParams& p) {
  auto x = try_F_inverse(y, p);
  if (!x) throw DomainError("F_inverse: point is not in the image of F");
  return *x;
}

Matrix jacobian_F(const LogRatioVec& x, const ModelParams& p) {
  check_dim(x.size(), p, "jacobian_F");
  if (!x.is_finite()) throw DomainError("jacobian_F: x must be finite");
  const int n = p.dim();
  const auto e = scaled_exp(x.entries());
  Matrix J(n);
  if (p.is_limit()) {
    const double s = e.sum + e.one;
    const double pre = -p.alpha() * p.q() / s;
    for (int i = 0; i < n; ++i) {
      const double gi = (e.one - e.z[static_cast<std::size_t>(i)]) / s;
      for (int j = 0; j < n; ++j) J(i, j) = pre * ((i == j ? 1.0 : 0.0) + gi) * e.z[static_cast<std::size_t>(j)];
    }
    return J;
  }
  const double k = p.coupling();
  const double s = e.sum + p.w() * e.one;
  if (!(s > 0.0)) throw DomainError("jacobian_F: nonpositive denominator");
  for (int i = 0; i < n; ++i) {
    const double gi = (e.one - e.z[static_cast<std::size_t>(i)]) / s;
    const double pre = -p.d() * k / (s * (1.0 + k * gi));
    for (int j = 0; j < n; ++j) J(i, j) = pre * ((i == j ? 1.0 : 0.0) + gi) * e.z[static_cast<std::size_t>(j)];
  }
  return J;
}

double phi(double x, int q) {
  if (!(x >= 0.0)) throw DomainError("phi: x must be >= 0");
  if (q < 3) throw DomainError("phi: q must be >= 3");
  const double qm = q - 1.0;
  const double a = std::exp(-x / qm);
  const double f = -q * std::expm1(-x / qm) / (qm * a + 1.0);
  return qm * q * std::expm1(f) / (qm * std::exp(f) + 1.0);
}

double phi_d(double x, const ModelParams& p) {
  if (!(x >= 0.0)) throw DomainError("phi_d: x must be >= 0");
  if (p.is_limit()) throw DomainError("phi_d: requires finite d (use phi for the limit)");
  return -F_twice(LogRatioVec::diagonal(p.q(), -x / p.dim()), p).sum();
}

LogRatioVec recursion_step(std::span<const LogRatioVec> children, const ModelParams& p) {
  if (!p.has_integer_degree()) throw DomainError("recursion_step: d must be a finite integer");
  if (children.size() != static_cast<std::size_t>(p.d()))
    throw InputError("recursion_step: expected exactly d = " + std::to_string(static_cast<long long>(p.d())) +
                     " children, got " + std::to_string(children.size()));
  std::vector<double> acc(static_cast<std::size_t>(p.dim()), 0.0);
  for (const auto& c : children) {
    const auto y = F_map(c, p);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += y[i];
  }
  for (double& a : acc) a /= p.d();
  return LogRatioVec(std::move(acc));
}

Rescaling rescaling_d_prime(const ModelParams& p) {
  if (p.is_limit()) throw DomainError("rescaling_d_prime: d must be finite");
  const double d_prime = (p.d() + 1.0) / p.alpha() - 1.0;
  return {d_prime, p.alpha() * p.d() / (p.d() + 1.0 - p.alpha())};
}

LogRatioVec recursion_log_ratios(const TreeSpec& tree, const BoundaryCondition& tau, const ModelParams& p) {
  if (tau.q() != p.q()) throw InputError("recursion_log_ratios: boundary condition built for a different q");
  if (!tree.regular_degree() || *tree.regular_depth() < 1 ||
      static_cast<double>(*tree.regular_degree()) != p.d())
    throw InputError("recursion_log_ratios: tree must be T^n_{d+1} with n >= 1 and down-degree d");
  if (!tau.pins_all_leaves(tree)) throw InputError("recursion_log_ratios: every leaf must be pinned");

  std::vector<LogRatioVec> ratio(static_cast<std::size_t>(tree.vertex_count()));
  std::vector<LogRatioVec> kids;
  for (int v = tree.vertex_count() - 1; v >= 0; --v) {
    if (tree.is_leaf(v)) {
      ratio[static_cast<std::size_t>(v)] = LogRatioVec::pinned(p.q(), *tau.color(v));
      continue;
    }
    kids.clear();
    for (int u : tree.children(v)) kids.push_back(ratio[static_cast<std::size_t>(u)]);
    ratio[static_cast<std::size_t>(v)] = recursion_step(kids, p);
  }
  return ratio[0];
}

LogRatioVec recursion_log_ratios(const SharedTree& tree, const ModelParams& p) {
  if (tree.q() != p.q()) throw InputError("recursion_log_ratios: shared tree built for a different q");
  if (tree.root() < 0) throw InputError("recursion_log_ratios: root not set");
  const auto& nodes = tree.nodes();
  if (nodes[static_cast<std::size_t>(tree.root())].children.empty())
    throw InputError("recursion_log_ratios: depth-0 tree");
  std::vector<LogRatioVec> ratio(nodes.size());
  std::vector<LogRatioVec> kids;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].children.empty()) {
      ratio[i] = LogRatioVec::pinned(p.q(), nodes[i].color);
      continue;
    }
    kids.clear();
    for (int c : nodes[i].children) kids.push_back(ratio[static_cast<std::size_t>(c)]);
    ratio[i] = recursion_step(kids, p);
  }
  return ratio[static_cast<std::size_t>(tree.root())];
}

ModelParams params_for_weight(int q, int d, double w) {
  if (!(w > 0.0 && w < 1.0)) throw DomainError("params_for_weight: w must lie in (0,1)");
  return ModelParams(q, static_cast<double>(d), (1.0 - w) * (d + 1.0) / q);
}

}  // namespace potts
