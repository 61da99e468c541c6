#include "potts/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "potts/maps.hpp"
#include "potts/oracle.hpp"
#include "potts/random.hpp"
#include "potts/tree.hpp"

namespace potts {

namespace {

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += format_double(v[i]);
  }
  return s;
}

bool is_unit_limit(const ModelParams& p) { return p.is_limit() && p.alpha() == 1.0; }

std::vector<double> sample_D_point(double c, int q, Rng& rng) {
  auto b = rng.dirichlet(q);
  b.pop_back();
  for (double& v : b) v *= -c;
  return b;
}

struct Best {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<double> at;

  void offer(double v, const LogRatioVec& x) {
    if (v > value) {
      value = v;
      at = x.values();
    }
  }
};

}  // namespace

KeyValueRecord InvarianceReport::record() const {
  KeyValueRecord r;
  r.set("check", std::string("two_step"))
      .set("q", params.q())
      .set("d", params.d())
      .set("alpha", params.alpha())
      .set("c_in", c_in)
      .set("c_out_estimate", c_out_estimate)
      .set("margin", margin)
      .set("samples", static_cast<std::uint64_t>(sample_count))
      .set("seed", seed)
      .set("phi_bound", phi_bound ? format_double(*phi_bound) : std::string())
      .set("status", std::string(pass() ? "PASS" : "FAIL"))
      .set("argmax", join(argmax))
      .set("evidence", std::string("sampled"));
  return r;
}

std::vector<std::string> InvarianceReport::csv_header() {
  return {"check", "q", "d", "alpha", "c", "samples", "seed", "c_out_estimate", "margin", "phi_bound", "status"};
}

void InvarianceReport::add_csv_row(CsvTable& table) const {
  table.row()
      .add("two_step")
      .add(params.q())
      .add(params.d())
      .add(params.alpha())
      .add(c_in)
      .add(static_cast<std::uint64_t>(sample_count))
      .add(seed)
      .add(c_out_estimate)
      .add(margin)
      .add(phi_bound ? format_double(*phi_bound) : std::string())
      .add(pass() ? "PASS" : "FAIL");
}

InvarianceReport two_step_level(double c, const ModelParams& p, std::size_t samples, std::uint64_t seed,
                                int threads) {
  const int q = p.q();
  if (!(c > 0.0 && c <= q + 1.0)) throw DomainError("two_step_level: c must lie in (0, q+1]");
  auto level2 = [&](const LogRatioVec& x) { return level_of(F_twice(x, p), q); };

  Best best;
  best.offer(level2(LogRatioVec::zeros(q)), LogRatioVec::zeros(q));
  for (int i = 0; i < q - 1; ++i) {
    const auto corner = LogRatioVec::basis(q, i, -c);
    best.offer(level2(corner), corner);
  }
  const auto center = LogRatioVec::diagonal(q, -c / (q - 1));
  best.offer(level2(center), center);

  auto parts = run_chunks(samples, threads, [&](std::size_t k, std::size_t begin, std::size_t end) {
    Rng rng(derive_seed(seed, k));
    Best local;
    for (std::size_t i = begin; i < end; ++i) {
      LogRatioVec x(sample_D_point(c, q, rng));
      local.offer(level2(x), x);
    }
    return local;
  });
  for (const auto& part : parts)
    if (part.value > best.value) best = part;

  InvarianceReport rep;
  rep.params = p;
  rep.c_in = c;
  rep.c_out_estimate = best.value;
  rep.margin = c - best.value;
  rep.sample_count = samples + static_cast<std::size_t>(q) + 1;
  rep.seed = seed;
  rep.argmax = best.at;
  if (is_unit_limit(p)) rep.phi_bound = phi(c, q);
  return rep;
}

std::string to_string(SequenceStatus s) {
  switch (s) {
    case SequenceStatus::ReachedEpsilon:
      return "reached_epsilon";
    case SequenceStatus::MaxIterations:
      return "max_iterations";
    case SequenceStatus::NonDecreasing:
      return "non_decreasing";
  }
  return "unknown";
}

ContractionSequence contraction_sequence(const ModelParams& p, double epsilon, int max_iters,
                                         std::size_t samples, std::uint64_t seed, int threads) {
  if (!(epsilon > 0.0)) throw DomainError("contraction_sequence: epsilon must be > 0");
  if (max_iters < 1) throw InputError("contraction_sequence: max_iters must be >= 1");
  ContractionSequence seq;
  seq.levels.push_back(p.q() + 1.0);
  for (int n = 0; n < max_iters; ++n) {
    const double c = seq.levels.back();
    if (c < epsilon) {
      seq.status = SequenceStatus::ReachedEpsilon;
      return seq;
    }
    const auto rep = two_step_level(c, p, samples, derive_seed(seed, static_cast<std::uint64_t>(n)), threads);
    const double next = rep.c_out_estimate + kSequenceSlack;
    if (!(next < c)) {
      seq.status = SequenceStatus::NonDecreasing;
      seq.diagnostic = "step " + std::to_string(n + 1) + ": sampled level " + format_double(next) +
                       " is not below " + format_double(c);
      return seq;
    }
    seq.levels.push_back(next);
  }
  seq.status = seq.levels.back() < epsilon ? SequenceStatus::ReachedEpsilon : SequenceStatus::MaxIterations;
  return seq;
}

DiagonalReport diagonal_minimality_check(double c, int q, std::size_t samples, std::uint64_t seed, int threads) {
  if (!(c > 0.0)) throw DomainError("diagonal_minimality_check: c must be > 0");
  const auto p = ModelParams::limit(q);
  auto functional = [&](const LogRatioVec& x) { return F_twice(x, p).sum(); };
  const auto center = LogRatioVec::diagonal(q, -c / (q - 1));
  const double base = functional(center);
  const double gap = 0.05 * c;

  struct Partial {
    std::size_t violations = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    std::vector<double> worst;
    double strict_min = std::numeric_limits<double>::infinity();
    std::size_t strict_count = 0;
  };
  auto parts = run_chunks(samples, threads, [&](std::size_t k, std::size_t begin, std::size_t end) {
    Rng rng(derive_seed(seed, k));
    Partial part;
    for (std::size_t i = begin; i < end; ++i) {
      auto b = rng.dirichlet(q - 1);
      for (double& v : b) v *= -c;
      LogRatioVec x(std::move(b));
      const double margin = functional(x) - base;
      if (margin < -kMinimalityTol) ++part.violations;
      if (margin < part.min_margin) {
        part.min_margin = margin;
        part.worst = x.values();
      }
      if (max_abs_diff(x, center) >= gap) {
        ++part.strict_count;
        part.strict_min = std::min(part.strict_min, margin);
      }
    }
    return part;
  });

  DiagonalReport rep;
  rep.base.check = "diagonal_minimality";
  rep.base.params = p;
  rep.base.c = c;
  rep.base.trials = samples;
  rep.base.seed = seed;
  rep.base.min_margin = std::numeric_limits<double>::infinity();
  rep.diagonal_value = base;
  rep.strict_min_margin = std::numeric_limits<double>::infinity();
  rep.off_diagonal_gap = gap;
  std::vector<double> worst;
  for (const auto& part : parts) {
    rep.base.violations += part.violations;
    if (part.min_margin < rep.base.min_margin) {
      rep.base.min_margin = part.min_margin;
      worst = part.worst;
    }
    rep.strict_count += part.strict_count;
    rep.strict_min_margin = std::min(rep.strict_min_margin, part.strict_min);
  }
  if (rep.base.violations > 0) rep.base.witness = std::move(worst);
  return rep;
}

BoundaryStrategy parse_boundary_strategy(const std::string& s) {
  if (s == "mono") return BoundaryStrategy::Mono;
  if (s == "random") return BoundaryStrategy::Random;
  if (s == "both") return BoundaryStrategy::Both;
  throw InputError("boundary strategy must be mono, random or both");
}

std::string to_string(BoundaryStrategy s) {
  switch (s) {
    case BoundaryStrategy::Mono:
      return "mono";
    case BoundaryStrategy::Random:
      return "random";
    case BoundaryStrategy::Both:
      return "both";
  }
  return "unknown";
}

bool ConvergenceReport::pass() const noexcept {
  return decreasing && rate <= std::sqrt(alpha) * 1.05;
}

CsvTable ConvergenceReport::table() const {
  CsvTable t({"depth", "mono_dev", "random_max_dev", "max_dev", "bound"});
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : rows) t.row().add(r.depth).add(opt(r.mono_dev)).add(opt(r.random_max_dev)).add(r.max_dev).add(r.bound);
  return t;
}

KeyValueRecord ConvergenceReport::record() const {
  KeyValueRecord r;
  r.set("check", std::string("convergence"))
      .set("q", config.q)
      .set("d", config.d)
      .set("alpha", alpha)
      .set("w", config.w)
      .set("n_max", config.n_max)
      .set("boundary", to_string(config.boundary))
      .set("trials", config.trials)
      .set("pool", config.pool)
      .set("seed", config.seed)
      .set("max_two_depth_ratio", max_two_depth_ratio)
      .set("rate", rate)
      .set("decreasing", decreasing)
      .set("status", std::string(pass() ? "PASS" : "FAIL"))
      .set("evidence", std::string("exact per boundary, sampled over boundaries"));
  return r;
}

ConvergenceReport convergence_experiment(const ConvergenceConfig& cfg) {
  if (cfg.q < 3) throw DomainError("convergence_experiment: q must be >= 3");
  if (cfg.d < 2) throw DomainError("convergence_experiment: d must be >= 2");
  if (cfg.n_max < 1) throw InputError("convergence_experiment: n_max must be >= 1");
  if (!(cfg.w > 0.0 && cfg.w <= 1.0)) throw DomainError("convergence_experiment: w must lie in (0,1]");
  if (cfg.boundary != BoundaryStrategy::Mono && (cfg.trials < 1 || cfg.pool < 1))
    throw InputError("convergence_experiment: trials and pool must be >= 1");
  if (cfg.mono_color < 0 || cfg.mono_color >= cfg.q) throw InputError("convergence_experiment: bad mono color");

  ConvergenceReport rep;
  rep.config = cfg;
  rep.alpha = (1.0 - cfg.w) * (cfg.d + 1.0) / cfg.q;
  const bool mono = cfg.boundary != BoundaryStrategy::Random;
  const bool random = cfg.boundary != BoundaryStrategy::Mono;

  for (int n = 1; n <= cfg.n_max; ++n) {
    ConvergenceRow row;
    row.depth = n;
    if (mono) {
      const auto tree = SharedTree::monochromatic(cfg.q, cfg.d, n, cfg.mono_color);
      row.mono_dev = max_deviation_from_uniform(conditional_root_distribution(tree, cfg.w));
      row.max_dev = *row.mono_dev;
    }
    if (random) {
      const auto depth_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(n));
      auto devs = run_chunks(
          static_cast<std::size_t>(cfg.trials), cfg.threads,
          [&](std::size_t t, std::size_t, std::size_t) {
            Rng rng(derive_seed(depth_seed, t));
            const auto tree = SharedTree::random_pooled(cfg.q, cfg.d, n, cfg.pool, rng);
            return max_deviation_from_uniform(conditional_root_distribution(tree, cfg.w));
          },
          1);
      row.random_max_dev = *std::max_element(devs.begin(), devs.end());
      row.max_dev = std::max(row.max_dev, *row.random_max_dev);
    }
    rep.rows.push_back(row);
  }

  const double C = rep.alpha > 0.0 ? rep.rows.front().max_dev / std::sqrt(rep.alpha) : 0.0;
  for (auto& row : rep.rows) row.bound = C * std::pow(rep.alpha, row.depth / 2.0);

  for (std::size_t i = 0; i + 2 < rep.rows.size(); ++i) {
    const double a = rep.rows[i].max_dev;
    const double b = rep.rows[i + 2].max_dev;
    if (a == 0.0) {
      if (b != 0.0) rep.decreasing = false;
      continue;
    }
    rep.max_two_depth_ratio = std::max(rep.max_two_depth_ratio, b / a);
    if (!(b < a)) rep.decreasing = false;
  }
  rep.rate = std::sqrt(rep.max_two_depth_ratio);
  return rep;
}

ConvergenceReport convergence_experiment(int q, int d, double alpha, int n_max, BoundaryStrategy boundary,
                                         int trials, std::uint64_t seed, int threads) {
  ConvergenceConfig cfg;
  cfg.q = q;
  cfg.d = d;
  cfg.w = interaction_weight(q, d, alpha);
  cfg.n_max = n_max;
  cfg.boundary = boundary;
  cfg.trials = trials;
  cfg.seed = seed;
  cfg.threads = threads;
  return convergence_experiment(cfg);
}

}  // namespace potts
