#include "potts/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

namespace potts {

double interaction_weight(int q, int d, double alpha) {
  if (q < 3) throw DomainError("interaction_weight: q must be >= 3");
  if (d < 2) throw DomainError("interaction_weight: d must be >= 2");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("interaction_weight: alpha must lie in (0,1]");
  const double w = 1.0 - alpha * q / (d + 1.0);
  if (w < 0.0) {
    std::ostringstream msg;
    msg << "interaction_weight: w = " << w << " < 0 for q=" << q << ", d=" << d << ", alpha=" << alpha;
    throw DomainError(msg.str());
  }
  return w;
}

ModelParams::ModelParams(int q, double d, double alpha) : q_(q), d_(d), alpha_(alpha) {
  if (q < 3) throw DomainError("ModelParams: q must be >= 3");
  if (!(d > 1.0)) throw DomainError("ModelParams: d must be > 1 or infinite");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("ModelParams: alpha must lie in (0,1]");
  coupling_ = is_limit() ? 0.0 : alpha * q / (d + 1.0);
}

bool ModelParams::has_integer_degree() const noexcept {
  return !is_limit() && d_ == std::floor(d_) && d_ < 1e9;
}

std::string ModelParams::describe() const {
  std::ostringstream os;
  os << "q=" << q_ << " d=";
  if (is_limit())
    os << "inf";
  else
    os << d_;
  os << " alpha=" << alpha_;
  return os.str();
}

LogRatioVec::LogRatioVec(std::vector<double> entries) : v_(std::move(entries)) {
  if (v_.size() < 2) throw InputError("LogRatioVec: need q-1 >= 2 entries");
  int plus = 0, minus = 0, finite_nonzero = 0;
  for (double e : v_) {
    if (std::isnan(e)) throw DomainError("LogRatioVec: NaN entry");
    if (e == std::numeric_limits<double>::infinity())
      ++plus;
    else if (e == -std::numeric_limits<double>::infinity())
      ++minus;
    else if (e != 0.0)
      ++finite_nonzero;
  }
  if (plus == 0 && minus == 0) return;
  if (plus == 1 && minus == 0 && finite_nonzero == 0) {
    kind_ = RatioKind::PinnedColor;
    return;
  }
  if (minus == static_cast<int>(v_.size())) {
    kind_ = RatioKind::PinnedReference;
    return;
  }
  throw DomainError("LogRatioVec: infinite entries must form +inf*e_i or -inf*1");
}

LogRatioVec LogRatioVec::zeros(int q) { return LogRatioVec(std::vector<double>(static_cast<std::size_t>(q - 1), 0.0)); }

LogRatioVec LogRatioVec::diagonal(int q, double t) {
  return LogRatioVec(std::vector<double>(static_cast<std::size_t>(q - 1), t));
}

LogRatioVec LogRatioVec::basis(int q, int i, double scale) {
  std::vector<double> v(static_cast<std::size_t>(q - 1), 0.0);
  v.at(static_cast<std::size_t>(i)) = scale;
  return LogRatioVec(std::move(v));
}

LogRatioVec LogRatioVec::pinned(int q, int color) {
  if (color < 0 || color >= q) throw InputError("LogRatioVec::pinned: color out of range");
  const double inf = std::numeric_limits<double>::infinity();
  if (color == q - 1) return LogRatioVec(std::vector<double>(static_cast<std::size_t>(q - 1), -inf));
  return basis(q, color, inf);
}

std::optional<int> LogRatioVec::pinned_color() const {
  switch (kind_) {
    case RatioKind::PinnedReference:
      return q() - 1;
    case RatioKind::PinnedColor:
      for (std::size_t i = 0; i < v_.size(); ++i)
        if (std::isinf(v_[i])) return static_cast<int>(i);
      return std::nullopt;
    case RatioKind::Finite:
      break;
  }
  return std::nullopt;
}

double LogRatioVec::sum() const { return std::accumulate(v_.begin(), v_.end(), 0.0); }

namespace {

void require_compatible(const LogRatioVec& a, const LogRatioVec& b) {
  if (a.size() != b.size()) throw InputError("LogRatioVec: dimension mismatch");
  if (!a.is_finite() || !b.is_finite()) throw DomainError("LogRatioVec: arithmetic on infinite pattern");
}

}  // namespace

LogRatioVec operator+(const LogRatioVec& a, const LogRatioVec& b) {
  require_compatible(a, b);
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] + b[i];
  return LogRatioVec(std::move(r));
}

LogRatioVec operator-(const LogRatioVec& a, const LogRatioVec& b) {
  require_compatible(a, b);
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] - b[i];
  return LogRatioVec(std::move(r));
}

LogRatioVec operator*(double s, const LogRatioVec& a) {
  if (!a.is_finite()) throw DomainError("LogRatioVec: arithmetic on infinite pattern");
  std::vector<double> r(a.values());
  for (double& e : r) e *= s;
  return LogRatioVec(std::move(r));
}

LogRatioVec midpoint(const LogRatioVec& a, const LogRatioVec& b) {
  require_compatible(a, b);
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = 0.5 * (a[i] + b[i]);
  return LogRatioVec(std::move(r));
}

double max_abs_diff(const LogRatioVec& a, const LogRatioVec& b) {
  if (a.size() != b.size()) throw InputError("LogRatioVec: dimension mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;  // equal infinities
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

std::ostream& operator<<(std::ostream& os, const LogRatioVec& x) {
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  return os << ')';
}

Permutation::Permutation(std::vector<int> image) : image_(std::move(image)) {
  std::vector<bool> seen(image_.size(), false);
  for (int v : image_) {
    if (v < 0 || v >= static_cast<int>(image_.size()) || seen[static_cast<std::size_t>(v)])
      throw InputError("Permutation: image is not a bijection");
    seen[static_cast<std::size_t>(v)] = true;
  }
}

Permutation Permutation::identity(int q) {
  std::vector<int> im(static_cast<std::size_t>(q));
  std::iota(im.begin(), im.end(), 0);
  return Permutation(std::move(im));
}

Permutation Permutation::transposition(int q, int a, int b) {
  std::vector<int> im(static_cast<std::size_t>(q));
  std::iota(im.begin(), im.end(), 0);
  std::swap(im.at(static_cast<std::size_t>(a)), im.at(static_cast<std::size_t>(b)));
  return Permutation(std::move(im));
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(image_.size());
  for (std::size_t j = 0; j < image_.size(); ++j) inv[static_cast<std::size_t>(image_[j])] = static_cast<int>(j);
  return Permutation(std::move(inv));
}

Permutation compose(const Permutation& pi, const Permutation& sigma) {
  if (pi.size() != sigma.size()) throw InputError("compose: size mismatch");
  std::vector<int> im(static_cast<std::size_t>(pi.size()));
  for (int j = 0; j < pi.size(); ++j) im[static_cast<std::size_t>(j)] = pi(sigma(j));
  return Permutation(std::move(im));
}

std::vector<Permutation> all_permutations(int q) {
  if (q < 1 || q > 8) throw BudgetError("all_permutations: full enumeration supported only for q <= 8");
  std::vector<int> im(static_cast<std::size_t>(q));
  std::iota(im.begin(), im.end(), 0);
  std::vector<Permutation> out;
  do {
    out.emplace_back(im);
  } while (std::next_permutation(im.begin(), im.end()));
  return out;
}

LogRatioVec apply_permutation(const Permutation& pi, const LogRatioVec& x) {
  const int q = x.q();
  if (pi.size() != q) throw InputError("apply_permutation: permutation size must equal q");
  if (auto color = x.pinned_color()) return LogRatioVec::pinned(q, pi(*color));

  std::vector<double> embedded(static_cast<std::size_t>(q), 0.0);
  for (int j = 0; j < q - 1; ++j) embedded[static_cast<std::size_t>(pi(j))] = x[static_cast<std::size_t>(j)];
  embedded[static_cast<std::size_t>(pi(q - 1))] = 0.0;
  const double shift = embedded.back();
  embedded.pop_back();
  for (double& e : embedded) e -= shift;
  return LogRatioVec(std::move(embedded));
}

}  // namespace potts
