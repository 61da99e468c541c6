#include "potts/appendix.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "potts/maps.hpp"
#include "potts/random.hpp"

namespace potts {

TripleParams::TripleParams(double x1_, double x2_, double x3_, int l_, int q_)
    : x1(x1_), x2(x2_), x3(x3_), l(l_), q(q_) {
  if (q < 3) throw InputError("TripleParams: q must be >= 3");
  if (l < 1 || l > q - 2) throw InputError("TripleParams: l must lie in 1..q-2");
  if (!(1.0 >= x1 && x1 > x2 && x2 >= x3 && x3 >= 0.0))
    throw InputError("TripleParams: need 1 >= x1 > x2 >= x3 >= 0");
}

std::array<double, 3> TripleParams::C() const {
  const double t = q - 1.0;
  return {A_func(1, x1, x2, x3, t, l), A_func(2, x1, x2, x3, t, l), A_func(3, x1, x2, x3, t, l)};
}

std::vector<double> TripleParams::expanded() const {
  std::vector<double> y(static_cast<std::size_t>(l), x1);
  y.push_back(x2);
  y.insert(y.end(), static_cast<std::size_t>(q - l - 2), x3);
  return y;
}

std::vector<double> v_values(std::span<const double> y, int q) {
  if (static_cast<int>(y.size()) != q - 1) throw InputError("v_values: expected q-1 coordinates");
  double s = 1.0;
  for (double v : y) s += v;
  if (!(s > 0.0)) throw DomainError("v_values: nonpositive denominator");
  std::vector<double> eG(y.size());
  double tail = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    eG[j] = std::exp(q * (1.0 - y[j]) / s);
    tail += eG[j] * (1.0 - y[j]);
  }
  std::vector<double> v(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) v[i] = y[i] * (eG[i] * s + tail);
  return v;
}

double v_func(int i, std::span<const double> y, int q) { return v_values(y, q).at(static_cast<std::size_t>(i)); }

double diagonal_functional(const LogRatioVec& x, int q) { return F_twice(x, ModelParams::limit(q)).sum(); }

std::vector<double> psi_vector(const LogRatioVec& x, int q) {
  if (static_cast<int>(x.size()) != q - 1) throw InputError("psi: expected q-1 coordinates");
  if (!x.is_finite()) throw DomainError("psi: x must be finite");
  const auto F = F_map(x, ModelParams::limit(q));
  std::vector<double> ex(x.size()), eF(x.size());
  double sx = 1.0, sF = 1.0, tail = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    ex[j] = std::exp(x[j]);
    eF[j] = std::exp(F[j]);
    sx += ex[j];
    sF += eF[j];
  }
  for (std::size_t j = 0; j < x.size(); ++j) tail += eF[j] * (1.0 - ex[j]);
  const double pre = static_cast<double>(q) * q * q / (sF * sF * sx * sx);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = pre * ex[i] * (eF[i] * sx + tail);
  return out;
}

double psi(int i, const LogRatioVec& x, int q) { return psi_vector(x, q).at(static_cast<std::size_t>(i)); }

namespace {

double v_gap(std::span<const double> y, int l, int q) {
  const auto v = v_values(y, q);
  return v[static_cast<std::size_t>(l - 1)] - v[static_cast<std::size_t>(l)];
}

}  // namespace

BalancingReport balancing_check(std::span<const double> y, int l, int q) {
  if (static_cast<int>(y.size()) != q - 1) throw InputError("balancing_check: expected q-1 coordinates");
  if (l < 1 || l > q - 2) throw InputError("balancing_check: l must lie in 1..q-2");
  const auto L = static_cast<std::size_t>(l);
  bool ok = y[0] <= 1.0 && y.back() >= 0.0 && y[L - 1] > y[L];
  for (std::size_t j = 1; j < L; ++j) ok = ok && y[j] == y[0];
  for (std::size_t j = L; j + 1 < y.size(); ++j) ok = ok && y[j] >= y[j + 1];
  if (!ok) throw InputError("balancing_check: need 1 >= y_1 = ... = y_l > y_{l+1} >= ... >= y_{q-1} >= 0");

  BalancingReport rep;
  std::vector<double> x(y.begin(), y.end());
  if (x.size() > L + 1) {
    double mean = 0.0;
    for (std::size_t j = L + 1; j < x.size(); ++j) mean += x[j];
    mean /= static_cast<double>(x.size() - L - 1);
    for (std::size_t j = L + 1; j < x.size(); ++j) x[j] = mean;
  }
  rep.lhs = v_gap(y, l, q);
  rep.rhs = v_gap(x, l, q);
  rep.holds = rep.lhs >= rep.rhs - 1e-10;

  // Single pair-averaging steps over trailing coordinates i, i+1, and the
  // convex symmetric profile g(t) along each.
  double s = 1.0;
  for (double v : y) s += v;
  rep.min_g_second_derivative = std::numeric_limits<double>::infinity();
  for (std::size_t i = L + 1; i + 1 < y.size(); ++i) {
    std::vector<double> avg(y.begin(), y.end());
    avg[i] = avg[i + 1] = 0.5 * (y[i] + y[i + 1]);
    if (v_gap(avg, l, q) > rep.lhs + 1e-10) rep.pairwise_holds = false;

    const double span_t = y[i] - y[i + 1];
    auto g = [&](double t) {
      return std::exp(q * (1.0 - y[i] + t) / s) * (1.0 - y[i] + t) +
             std::exp(q * (1.0 - y[i + 1] - t) / s) * (1.0 - y[i + 1] - t);
    };
    const double h = 1e-4;
    for (int k = 0; k <= 4; ++k) {
      const double t = span_t * k / 4.0;
      rep.min_g_second_derivative = std::min(rep.min_g_second_derivative, (g(t + h) - 2 * g(t) + g(t - h)) / (h * h));
      rep.max_g_asymmetry = std::max(rep.max_g_asymmetry, std::abs(g(t) - g(span_t - t)));
    }
  }
  if (rep.min_g_second_derivative == std::numeric_limits<double>::infinity()) rep.min_g_second_derivative = 0.0;
  return rep;
}

CsvTable BatteryReport::table() const {
  CsvTable t({"q", "l", "x1", "x2", "x3", "Delta", "r_l1", "slope", "min_margin", "seed"});
  for (const auto& r : rows)
    t.row().add(r.q).add(r.l).add(r.x1).add(r.x2).add(r.x3).add(r.Delta).add(r.r_l1).add(r.slope).add(r.min_margin).add(
        r.seed);
  return t;
}

KeyValueRecord BatteryReport::record() const {
  KeyValueRecord r;
  r.set("check", std::string("appendix_battery"))
      .set("q_max", q_max)
      .set("trials", static_cast<std::uint64_t>(trials))
      .set("seed", seed)
      .set("positivity_violations", static_cast<std::uint64_t>(positivity_violations))
      .set("linearity_violations", static_cast<std::uint64_t>(linearity_violations))
      .set("closed_form_violations", static_cast<std::uint64_t>(closed_form_violations))
      .set("identity_violations", static_cast<std::uint64_t>(identity_violations))
      .set("max_linearity_residual", max_linearity_residual)
      .set("max_closed_form_error", max_closed_form_error)
      .set("max_identity_error", max_identity_error)
      .set("status", std::string(violations() == 0 ? "PASS" : "FAIL"))
      .set("evidence", std::string("sampled"));
  return r;
}

BatteryReport appendix_battery(int q_max, std::size_t trials, std::uint64_t seed, int threads) {
  if (q_max < 3) throw InputError("appendix_battery: q_max must be >= 3");
  if (trials == 0) throw InputError("appendix_battery: trials must be >= 1");
  using L = long double;

  struct Partial {
    BatteryRow worst;
    bool have = false;
    std::size_t pos = 0, lin = 0, cf = 0, ident = 0;
    double lin_res = 0.0, cf_err = 0.0, ident_err = 0.0;
  };

  BatteryReport rep;
  rep.q_max = q_max;
  rep.trials = trials;
  rep.seed = seed;
  for (int q = 3; q <= q_max; ++q) {
    for (int l = 1; l <= q - 2; ++l) {
      const auto pair_seed = derive_seed(seed, static_cast<std::uint64_t>(q * 64 + l));
      auto parts = run_chunks(trials, threads, [&](std::size_t k, std::size_t begin, std::size_t end) {
        const auto chunk_seed = derive_seed(pair_seed, k);
        Rng rng(chunk_seed);
        Partial part;
        for (std::size_t n = begin; n < end; ++n) {
          std::array<double, 3> x;
          do {
            for (double& v : x) v = rng.uniform();
            std::sort(x.begin(), x.end(), std::greater<>());
          } while (!(x[0] > x[1]));
          const TripleParams tp(x[0], x[1], x[2], l, q);

          const L lt = static_cast<L>(q - 1);
          const L X1 = x[0], X2 = x[1], X3 = x[2];
          const L C1 = A_func(1, X1, X2, X3, lt, l);
          const L C2 = A_func(2, X1, X2, X3, lt, l);
          const L C3 = A_func(3, X1, X2, X3, lt, l);
          const L delta = Delta_func(X1, X2, X3, lt, l);

          const L r0 = r_of_t(C1, C2, C3, l, static_cast<L>(l + 1));
          const L r1 = r_of_t(C1, C2, C3, l, static_cast<L>(l + 2));
          const L r2 = r_of_t(C1, C2, C3, l, static_cast<L>(l + 3));
          const L scale = std::max({std::abs(r0), std::abs(r1), std::abs(r2)});
          const double lin = static_cast<double>(std::abs(r0 - 2 * r1 + r2) / scale);
          const auto cf = r_closed_forms(C1, C2, C3, l);
          const double cf_err = static_cast<double>(
              std::max(std::abs(cf.r_at_l_plus_1 - r0), std::abs(cf.slope - (r1 - r0))) / scale);

          const double dv = v_gap(tp.expanded(), l, q);
          const double ident = std::abs(static_cast<double>(delta) - dv) / std::max(1.0, std::abs(dv));

          part.lin_res = std::max(part.lin_res, lin);
          part.cf_err = std::max(part.cf_err, cf_err);
          part.ident_err = std::max(part.ident_err, ident);
          part.lin += lin > kLinearityTol;
          part.cf += cf_err > kClosedFormTol;
          part.ident += ident > kIdentityTol;
          const double margin = static_cast<double>(std::min({delta, cf.r_at_l_plus_1, cf.slope}));
          part.pos += !(margin > 0.0);
          if (!part.have || margin < part.worst.min_margin) {
            part.have = true;
            part.worst = {q,
                          l,
                          x[0],
                          x[1],
                          x[2],
                          static_cast<double>(delta),
                          static_cast<double>(cf.r_at_l_plus_1),
                          static_cast<double>(cf.slope),
                          margin,
                          chunk_seed};
          }
        }
        return part;
      });
      BatteryRow worst;
      bool have = false;
      for (const auto& part : parts) {
        rep.positivity_violations += part.pos;
        rep.linearity_violations += part.lin;
        rep.closed_form_violations += part.cf;
        rep.identity_violations += part.ident;
        rep.max_linearity_residual = std::max(rep.max_linearity_residual, part.lin_res);
        rep.max_closed_form_error = std::max(rep.max_closed_form_error, part.cf_err);
        rep.max_identity_error = std::max(rep.max_identity_error, part.ident_err);
        if (part.have && (!have || part.worst.min_margin < worst.min_margin)) {
          worst = part.worst;
          have = true;
        }
      }
      rep.rows.push_back(worst);
    }
  }
  return rep;
}

GradientCheck psi_gradient_check(int q, std::size_t points, std::uint64_t seed) {
  Rng rng(seed);
  GradientCheck out;
  out.points = points;
  const double h = 1e-5;
  for (std::size_t n = 0; n < points; ++n) {
    std::vector<double> x(static_cast<std::size_t>(q - 1));
    for (double& v : x) v = rng.uniform(-3.0, 3.0);
    const auto grad = psi_vector(LogRatioVec(x), q);
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      const double fd =
          (diagonal_functional(LogRatioVec(xp), q) - diagonal_functional(LogRatioVec(xm), q)) / (2.0 * h);
      out.max_error = std::max(out.max_error, std::abs(fd - grad[i]));
    }
  }
  return out;
}

}  // namespace potts
