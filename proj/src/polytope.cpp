#include "potts/polytope.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "potts/random.hpp"

namespace potts {

PolytopeLevel::PolytopeLevel(double c) : c_(c) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("PolytopeLevel: c must be a finite real >= 0");
}

namespace {

void check_point(const LogRatioVec& x, int q, const char* what) {
  if (static_cast<int>(x.size()) != q - 1)
    throw InputError(std::string(what) + ": expected " + std::to_string(q - 1) + " coordinates");
  if (!x.is_finite()) throw DomainError(std::string(what) + ": x must be finite");
}

std::vector<double> sample_D_point(double c, int q, Rng& rng) {
  auto b = rng.dirichlet(q);
  b.pop_back();  // weight of the vertex 0
  for (double& v : b) v *= -c;
  return b;
}

template <class Gen>
std::vector<LogRatioVec> chunked_samples(std::size_t count, std::uint64_t seed, int threads, Gen gen) {
  auto parts = run_chunks(count, threads, [&](std::size_t k, std::size_t begin, std::size_t end) {
    Rng rng(derive_seed(seed, k));
    std::vector<LogRatioVec> out;
    out.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) out.push_back(gen(rng));
    return out;
  });
  std::vector<LogRatioVec> all;
  all.reserve(count);
  for (auto& part : parts)
    for (auto& x : part) all.push_back(std::move(x));
  return all;
}

void check_sampler(double c, int q) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("sampler: c must be > 0");
  if (q < 3) throw DomainError("sampler: q must be >= 3");
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += format_double(v[i]);
  }
  return s;
}

}  // namespace

MembershipReport membership_P(const LogRatioVec& x, PolytopeLevel c, int q) {
  check_point(x, q, "membership_P");
  const double S = x.sum();
  MembershipReport r;
  r.witness_constraint = q - 1;
  r.margin = S + c.value();
  for (int k = 0; k < q - 1; ++k) {
    const double slack = S - q * x[static_cast<std::size_t>(k)] + c.value();
    if (slack < r.margin) {
      r.margin = slack;
      r.witness_constraint = k;
    }
  }
  r.inside = r.margin >= 0.0;
  return r;
}

double level_of(const LogRatioVec& x, int q) {
  check_point(x, q, "level_of");
  const double S = x.sum();
  double c = -S;
  for (double v : x.entries()) c = std::max(c, q * v - S);
  return c;
}

bool membership_D(const LogRatioVec& x, PolytopeLevel c, int q) {
  check_point(x, q, "membership_D");
  for (double v : x.entries())
    if (v > 0.0) return false;
  return x.sum() >= -c.value();
}

std::vector<LogRatioVec> sample_D(double c, int q, std::size_t count, std::uint64_t seed, int threads) {
  check_sampler(c, q);
  return chunked_samples(count, seed, threads, [&](Rng& rng) { return LogRatioVec(sample_D_point(c, q, rng)); });
}

std::vector<LogRatioVec> sample_face(double c, int q, std::size_t count, std::uint64_t seed, int threads) {
  check_sampler(c, q);
  return chunked_samples(count, seed, threads, [&](Rng& rng) {
    auto b = rng.dirichlet(q - 1);
    for (double& v : b) v *= -c;
    return LogRatioVec(std::move(b));
  });
}

std::vector<LogRatioVec> sample_P(double c, int q, std::size_t count, std::uint64_t seed, int threads) {
  check_sampler(c, q);
  return chunked_samples(count, seed, threads, [&](Rng& rng) {
    LogRatioVec x(sample_D_point(c, q, rng));
    return apply_permutation(rng.permutation(q), x);
  });
}

KeyValueRecord CertificationReport::record() const {
  KeyValueRecord r;
  r.set("check", check)
      .set("q", params.q())
      .set("d", params.d())
      .set("alpha", params.alpha())
      .set("c", c)
      .set("trials", static_cast<std::uint64_t>(trials))
      .set("seed", seed)
      .set("violations", static_cast<std::uint64_t>(violations))
      .set("min_margin", min_margin)
      .set("status", std::string(pass() ? "PASS" : "FAIL"))
      .set("witness", witness ? join(*witness) : std::string())
      .set("evidence", std::string("sampled"));
  if (!note.empty()) r.set("note", note);
  return r;
}

std::vector<std::string> CertificationReport::csv_header() {
  return {"check", "q", "d", "alpha", "c", "trials", "seed", "violations", "min_margin", "status", "witness"};
}

void CertificationReport::add_csv_row(CsvTable& table) const {
  table.row()
      .add(check)
      .add(params.q())
      .add(params.d())
      .add(params.alpha())
      .add(c)
      .add(static_cast<std::uint64_t>(trials))
      .add(seed)
      .add(static_cast<std::uint64_t>(violations))
      .add(min_margin)
      .add(pass() ? "PASS" : "FAIL")
      .add(witness ? join(*witness) : std::string());
}

CertificationReport convexity_probe(double c, const ModelParams& p, std::size_t pairs, std::uint64_t seed,
                                    int threads) {
  check_sampler(c, p.q());
  const int q = p.q();
  struct Partial {
    std::size_t violations = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    std::vector<double> worst;
  };
  auto parts = run_chunks(pairs, threads, [&](std::size_t k, std::size_t begin, std::size_t end) {
    Rng rng(derive_seed(seed, k));
    Partial part;
    for (std::size_t t = begin; t < end; ++t) {
      const auto x = apply_permutation(rng.permutation(q), LogRatioVec(sample_D_point(c, q, rng)));
      const auto y = apply_permutation(rng.permutation(q), LogRatioVec(sample_D_point(c, q, rng)));
      const auto mid = midpoint(F_map(x, p), F_map(y, p));
      const auto pre = try_F_inverse(mid.entries(), p);
      const double margin = pre ? c - level_of(*pre, q) : -std::numeric_limits<double>::infinity();
      if (margin < -kImageSlack) ++part.violations;
      if (margin < part.min_margin) {
        part.min_margin = margin;
        part.worst = x.values();
        part.worst.insert(part.worst.end(), y.values().begin(), y.values().end());
        part.worst.insert(part.worst.end(), mid.values().begin(), mid.values().end());
      }
    }
    return part;
  });

  CertificationReport rep;
  rep.check = "convexity";
  rep.params = p;
  rep.c = c;
  rep.trials = pairs;
  rep.seed = seed;
  rep.min_margin = std::numeric_limits<double>::infinity();
  std::vector<double> worst;
  for (const auto& part : parts) {
    rep.violations += part.violations;
    if (part.min_margin < rep.min_margin) {
      rep.min_margin = part.min_margin;
      worst = part.worst;
    }
  }
  if (rep.min_margin < -kWitnessExcess) rep.witness = std::move(worst);
  if (rep.violations > 0 && !rep.witness) rep.note = "violations within numerical noise only";
  return rep;
}

double limit_normal_sum(std::span<const double> y, int q) {
  if (static_cast<int>(y.size()) != q - 1) throw InputError("limit_normal_sum: expected q-1 coordinates");
  double ysum = 0.0;
  for (double v : y) ysum += v;
  const double den = ysum + q;
  if (!(den > 0.0)) throw DomainError("limit_normal_sum: y lies on the wrong side of sum y = -q");
  std::vector<double> z(y.size());
  double prod = 1.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    z[i] = 1.0 - q * y[i] / den;
    if (!(z[i] > 0.0)) throw DomainError("limit_normal_sum: G_inf^{-1}(y) is not positive");
    prod *= z[i];
  }
  double total = 0.0;
  for (double zj : z) total += prod / zj * (-(q - 1.0) * zj - 1.0) / den;
  return total;
}

}  // namespace potts
