// potts: command-line front end for the recursion experiments.
//
//   potts recursion --q 5 --d 200 --alpha 0.5 --n-max 12 --boundary both --seed 7
//   potts certify   --q 5 --d 1000 --c-grid 0.5:6:0.5 --samples 100000 --seed 1
//   potts lemmas    --q-max 8 --trials 100000 --seed 3
//   potts oracle    --tree tau.txt --w 0.5 [--check-recursion]
//
// Exit codes: 0 pass, 2 fail, 1 usage or input error.

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "potts/appendix.hpp"
#include "potts/certifier.hpp"
#include "potts/maps.hpp"
#include "potts/oracle.hpp"
#include "potts/polytope.hpp"
#include "potts/random.hpp"
#include "potts/report.hpp"
#include "potts/tree.hpp"

namespace {

using namespace potts;

constexpr int kExitPass = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFail = 2;

struct RunConfig {
  int q = 5;
  std::string d = "200";
  std::optional<double> alpha;
  std::optional<double> w;
  int n_max = 12;
  int depth = 3;
  std::string boundary = "both";
  int trials = 50;
  int lemma_trials = 100000;
  int pool = 16;
  std::optional<double> c;
  std::string c_grid;
  std::size_t samples = 100000;
  std::size_t pairs = 10000;
  std::uint64_t seed = 0;
  std::string output;
  std::string format = "csv";
  int threads = 1;
  std::string tree;
  bool generate = false;
  bool check_recursion = false;
  int q_max = 8;
  std::size_t gradient_points = 1000;
};

struct Result {
  int code = kExitPass;
  std::string body;
  KeyValueRecord summary;
};

double parse_degree(const std::string& s) {
  if (s == "inf" || s == "INFINITY" || s == "infinity") return kInfiniteDegree;
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw InputError("--d must be an integer >= 2 or 'inf'");
  if (v < 2) throw InputError("--d must be >= 2");
  return static_cast<double>(v);
}

int parse_int_degree(const std::string& s) {
  const double d = parse_degree(s);
  if (d == kInfiniteDegree) throw InputError("--d inf is not supported by this subcommand");
  if (d > 1e6) throw InputError("--d is too large for tree computations");
  return static_cast<int>(d);
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw InputError("");
    } catch (const std::exception&) {
      throw InputError("--c-grid must be start:stop:step");
    }
  }
  if (parts.size() != 3) throw InputError("--c-grid must be start:stop:step");
  const double start = parts[0], stop = parts[1], step = parts[2];
  if (!(step > 0.0) || !(start <= stop)) throw InputError("--c-grid needs step > 0 and start <= stop");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-12)) + 1;
  if (count > 100000) throw InputError("--c-grid has too many points");
  std::vector<double> grid;
  for (std::size_t i = 0; i < count; ++i) {
    double v = start + static_cast<double>(i) * step;
    if (std::abs(v - stop) <= 1e-12) v = stop;
    grid.push_back(v);
  }
  return grid;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw InputError(msg);
}

void check_common(const RunConfig& cfg) {
  require(cfg.format == "csv" || cfg.format == "text", "--format must be csv or text");
  require(cfg.threads >= 1, "--threads must be >= 1");
}

void check_alpha(const RunConfig& cfg) {
  if (cfg.alpha) require(*cfg.alpha > 0.0 && *cfg.alpha <= 1.0, "--alpha must lie in (0,1]");
}

// One "column=value ..." line per row.
std::string text_rows(const CsvTable& table) {
  std::string out;
  for (const auto& row : table.rows()) {
    const auto& cells = row.cells();
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ' ';
      out += table.header()[i] + "=" + cells[i];
    }
    out += '\n';
  }
  return out;
}

std::string render(const RunConfig& cfg, const CsvTable& table, const KeyValueRecord& summary) {
  if (cfg.format == "csv") return table.str();
  return summary.str() + text_rows(table);
}

Result cmd_recursion(const RunConfig& cfg) {
  require(cfg.q >= 3, "--q must be >= 3");
  require(cfg.alpha.has_value(), "--alpha is required");
  check_alpha(cfg);
  require(cfg.n_max >= 1 && cfg.n_max <= 64, "--n-max must lie in 1..64");
  require(cfg.trials >= 1, "--trials must be >= 1");
  require(cfg.pool >= 1, "--pool must be >= 1");
  const int d = parse_int_degree(cfg.d);

  ConvergenceConfig cc;
  cc.q = cfg.q;
  cc.d = d;
  cc.w = interaction_weight(cfg.q, d, *cfg.alpha);
  require(cc.w > 0.0, "--alpha gives w = 0 at this q and d; the log-ratios need w > 0");
  cc.n_max = cfg.n_max;
  cc.boundary = parse_boundary_strategy(cfg.boundary);
  cc.trials = cfg.trials;
  cc.pool = cfg.pool;
  cc.seed = cfg.seed;
  cc.threads = cfg.threads;
  const auto rep = convergence_experiment(cc);

  Result r;
  r.summary = rep.record();
  r.body = render(cfg, rep.table(), r.summary);
  r.code = rep.pass() ? kExitPass : kExitFail;
  return r;
}

Result cmd_certify(const RunConfig& cfg) {
  require(cfg.q >= 3, "--q must be >= 3");
  check_alpha(cfg);
  const double d = parse_degree(cfg.d);
  const ModelParams p(cfg.q, d, cfg.alpha.value_or(1.0));
  require(cfg.c.has_value() != !cfg.c_grid.empty(), "exactly one of --c or --c-grid is required");
  const auto grid = cfg.c ? std::vector<double>{*cfg.c} : parse_grid(cfg.c_grid);
  for (double c : grid) require(c > 0.0 && c <= cfg.q + 1.0, "c must lie in (0, q+1]");
  require(cfg.samples >= 1, "--samples must be >= 1");

  CsvTable table({"check", "q", "d", "alpha", "c", "trials", "seed", "c_out_estimate", "margin", "phi_bound",
                  "violations", "status", "witness"});
  bool all_pass = true;
  std::size_t failures = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double c = grid[i];
    const auto s2 = derive_seed(cfg.seed, 2 * i);
    const auto inv = two_step_level(c, p, cfg.samples, s2, cfg.threads);
    table.row()
        .add("two_step")
        .add(p.q())
        .add(p.d())
        .add(p.alpha())
        .add(c)
        .add(static_cast<std::uint64_t>(inv.sample_count))
        .add(s2)
        .add(inv.c_out_estimate)
        .add(inv.margin)
        .add(inv.phi_bound ? format_double(*inv.phi_bound) : std::string())
        .add("")
        .add(inv.pass() ? "PASS" : "FAIL")
        .add("");
    if (!inv.pass()) ++failures;
    if (cfg.pairs > 0) {
      const auto s3 = derive_seed(cfg.seed, 2 * i + 1);
      const auto conv = convexity_probe(c, p, cfg.pairs, s3, cfg.threads);
      std::string witness;
      if (conv.witness)
        for (std::size_t k = 0; k < conv.witness->size(); ++k)
          witness += (k ? " " : "") + format_double((*conv.witness)[k]);
      table.row()
          .add("convexity")
          .add(p.q())
          .add(p.d())
          .add(p.alpha())
          .add(c)
          .add(static_cast<std::uint64_t>(conv.trials))
          .add(s3)
          .add("")
          .add(conv.min_margin)
          .add("")
          .add(static_cast<std::uint64_t>(conv.violations))
          .add(conv.pass() ? "PASS" : "FAIL")
          .add(witness);
      if (!conv.pass()) ++failures;
    }
  }
  all_pass = failures == 0;

  Result r;
  r.summary.set("check", std::string("certify"))
      .set("q", p.q())
      .set("d", p.d())
      .set("alpha", p.alpha())
      .set("grid_points", static_cast<std::uint64_t>(grid.size()))
      .set("samples", static_cast<std::uint64_t>(cfg.samples))
      .set("pairs", static_cast<std::uint64_t>(cfg.pairs))
      .set("seed", cfg.seed)
      .set("failures", static_cast<std::uint64_t>(failures))
      .set("status", std::string(all_pass ? "PASS" : "FAIL"))
      .set("evidence", std::string("sampled"));
  r.body = render(cfg, table, r.summary);
  r.code = all_pass ? kExitPass : kExitFail;
  return r;
}

Result cmd_lemmas(const RunConfig& cfg) {
  require(cfg.q_max >= 3 && cfg.q_max <= 64, "--q-max must lie in 3..64");
  require(cfg.lemma_trials >= 1, "--trials must be >= 1");
  const auto battery = appendix_battery(cfg.q_max, static_cast<std::size_t>(cfg.lemma_trials), cfg.seed, cfg.threads);
  double grad_err = 0.0;
  for (int q = 3; q <= cfg.q_max; ++q)
    grad_err = std::max(
        grad_err,
        psi_gradient_check(q, cfg.gradient_points, derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(q)))
            .max_error);
  const bool grad_ok = grad_err <= 1e-6;

  Result r;
  r.summary = battery.record();
  r.summary.set("gradient_points", static_cast<std::uint64_t>(cfg.gradient_points))
      .set("gradient_max_error", grad_err)
      .set("gradient_status", std::string(grad_ok ? "PASS" : "FAIL"));
  r.body = render(cfg, battery.table(), r.summary);
  r.code = battery.violations() == 0 && grad_ok ? kExitPass : kExitFail;
  return r;
}

BoundaryFile generated_boundary(const RunConfig& cfg) {
  require(cfg.q >= 2, "--q must be >= 2");
  require(cfg.depth >= 0, "--depth must be >= 0");
  const int d = parse_int_degree(cfg.d);
  auto tree = TreeSpec::regular(d, cfg.depth);
  if (cfg.boundary == "mono") {
    auto tau = BoundaryCondition::monochromatic(tree, cfg.q, 0);
    return BoundaryFile{cfg.q, d, cfg.depth, std::move(tree), std::move(tau)};
  }
  require(cfg.boundary == "random" || cfg.boundary == "both", "--boundary must be mono or random");
  Rng rng(derive_seed(cfg.seed, 0));
  auto tau = BoundaryCondition::random(tree, cfg.q, rng);
  return BoundaryFile{cfg.q, d, cfg.depth, std::move(tree), std::move(tau)};
}

BoundaryFile load_boundary(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open tree file " + path);
  return read_boundary_file(in);
}

Result cmd_oracle(const RunConfig& cfg) {
  require(cfg.generate != !cfg.tree.empty(), "exactly one of --tree FILE or --generate is required");
  const auto bf = cfg.generate ? generated_boundary(cfg) : load_boundary(cfg.tree);
  if (bf.depth == 0)
    throw InputError(
        "depth-0 input: the root is itself the leaf, so its log-ratio is the formal pattern +inf*e_i or -inf*1, "
        "which only the recursion layer handles (by convention); the oracle needs n >= 1");

  require(cfg.w.has_value() != cfg.alpha.has_value(), "exactly one of --w or --alpha is required");
  double w = 0.0;
  if (cfg.w) {
    w = *cfg.w;
    require(w >= 0.0 && std::isfinite(w), "--w must be a finite real >= 0");
  } else {
    check_alpha(cfg);
    w = interaction_weight(bf.q, bf.d, *cfg.alpha);
  }

  Result r;
  r.summary.set("check", std::string("oracle")).set("q", bf.q).set("d", bf.d).set("n", bf.depth).set("w", w);
  r.summary.set("pinned_leaves", static_cast<std::uint64_t>(bf.tau.pinned_count()));
  double Z = 0.0;
  std::string method = "dp";
  try {
    Z = brute_force_Z(bf.tree, bf.tau, bf.q, w);
    method = "brute_force";
  } catch (const BudgetError&) {
    Z = dp_Z(bf.tree, bf.tau, bf.q, w);
  }
  const double logZ = dp_log_Z(bf.tree, bf.tau, bf.q, w);
  r.summary.set("Z", Z).set("Z_method", method).set("log_Z", logZ);

  if (logZ > -std::numeric_limits<double>::infinity()) {
    const auto dist = conditional_root_distribution(bf.tree, bf.tau, bf.q, w);
    for (int i = 0; i < bf.q; ++i) r.summary.set("p_" + std::to_string(i + 1), dist[static_cast<std::size_t>(i)]);
    r.summary.set("max_deviation", max_deviation_from_uniform(dist));
  }

  const bool ratios_defined = bf.tau.pins_all_leaves(bf.tree) && w > 0.0 && w <= 1.0 && !bf.tau.color(0);
  r.code = kExitPass;
  if (ratios_defined) {
    const auto R = root_log_ratios(bf.tree, bf.tau, bf.q, w);
    for (std::size_t i = 0; i < R.size(); ++i) r.summary.set("R_" + std::to_string(i + 1), R[i]);
    if (cfg.check_recursion) {
      require(bf.q >= 3 && bf.d >= 2 && w < 1.0, "--check-recursion needs q >= 3, d >= 2 and w < 1");
      const auto p = params_for_weight(bf.q, bf.d, w);
      const auto rec = recursion_log_ratios(bf.tree, bf.tau, p);
      const double diff = max_abs_diff(R, rec);
      r.summary.set("recursion_max_abs_diff", diff).set("recursion_check", std::string(diff <= 1e-9 ? "PASS" : "FAIL"));
      if (!(diff <= 1e-9)) r.code = kExitFail;
    }
  } else if (cfg.check_recursion) {
    throw InputError("--check-recursion needs every leaf pinned, a free root and w in (0,1]");
  }

  if (cfg.format == "csv") {
    CsvTable t({"quantity", "value"});
    for (const auto& [k, v] : r.summary.entries()) t.row().add(k).add(v);
    r.body = t.str();
  } else {
    r.body = r.summary.str();
  }
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Potts tree recursion: experiments, certifiers and exact oracle"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "Master seed (64-bit)");
    sub->add_option("--output", cfg.output, "Output file (written atomically; manifest at <output>.manifest)");
    sub->add_option("--format", cfg.format, "csv or text");
    sub->add_option("--threads", cfg.threads, "Worker threads (results do not depend on it)");
  };

  auto* rec = app.add_subcommand("recursion", "Decay of root information with depth");
  rec->add_option("--q", cfg.q, "Number of colors (>= 3)");
  rec->add_option("--d", cfg.d, "Down-degree d (integer >= 2)");
  rec->add_option("--alpha", cfg.alpha, "alpha in (0,1]; w = 1 - alpha q/(d+1)");
  rec->add_option("--n-max", cfg.n_max, "Largest depth");
  rec->add_option("--boundary", cfg.boundary, "mono, random or both");
  rec->add_option("--trials", cfg.trials, "Random boundaries per depth");
  rec->add_option("--pool", cfg.pool, "Distinct subtree types per level of a random boundary");
  add_common(rec);

  auto* cert = app.add_subcommand("certify", "Two-step invariance and convexity probe over a c grid");
  cert->add_option("--q", cfg.q, "Number of colors (>= 3)");
  cert->add_option("--d", cfg.d, "Down-degree d (integer >= 2) or inf");
  cert->add_option("--alpha", cfg.alpha, "alpha in (0,1], default 1");
  cert->add_option("--c", cfg.c, "Single level c in (0, q+1]");
  cert->add_option("--c-grid", cfg.c_grid, "start:stop:step, endpoints inclusive");
  cert->add_option("--samples", cfg.samples, "D_c samples per level");
  cert->add_option("--pairs", cfg.pairs, "Convexity pairs per level (0 skips the probe)");
  add_common(cert);

  auto* lem = app.add_subcommand("lemmas", "Appendix identity and positivity battery");
  lem->add_option("--q-max", cfg.q_max, "Largest q (>= 3)");
  lem->add_option("--trials", cfg.lemma_trials, "Draws per (q, l)");
  lem->add_option("--gradient-points", cfg.gradient_points, "Points per q for the gradient check");
  add_common(lem);

  auto* orc = app.add_subcommand("oracle", "Exact partition function and root marginals");
  orc->add_option("--tree", cfg.tree, "Boundary file (header 'q d n', then 'leaf_index color' lines)");
  orc->add_flag("--generate", cfg.generate, "Generate T^n_{d+1} from --q --d --depth --boundary --seed");
  orc->add_option("--q", cfg.q, "Number of colors for --generate");
  orc->add_option("--d", cfg.d, "Down-degree for --generate");
  orc->add_option("--depth", cfg.depth, "Depth n for --generate");
  orc->add_option("--boundary", cfg.boundary, "mono or random for --generate");
  orc->add_option("--w", cfg.w, "Edge weight w >= 0");
  orc->add_option("--alpha", cfg.alpha, "alpha in (0,1] instead of --w");
  orc->add_flag("--check-recursion", cfg.check_recursion, "Compare against the recursion maps (tol 1e-9)");
  add_common(orc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  const auto started = std::chrono::steady_clock::now();
  Result result;
  std::string name;
  try {
    check_common(cfg);
    if (rec->parsed()) {
      name = "recursion";
      result = cmd_recursion(cfg);
    } else if (cert->parsed()) {
      name = "certify";
      result = cmd_certify(cfg);
    } else if (lem->parsed()) {
      name = "lemmas";
      result = cmd_lemmas(cfg);
    } else {
      name = "oracle";
      result = cmd_oracle(cfg);
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  try {
    if (cfg.output.empty()) {
      std::cout << result.body;
    } else {
      write_file_atomic(cfg.output, result.body);
      KeyValueRecord manifest;
      manifest.set("subcommand", name);
      std::string cmdline;
      for (int i = 0; i < argc; ++i) cmdline += (i ? " " : "") + std::string(argv[i]);
      manifest.set("command", cmdline).set("seed", cfg.seed).set("threads", cfg.threads);
      manifest.set("seed_rule", std::string("chunk k uses mt19937_64(derive_seed(seed, k)), chunk size 4096"));
      for (const auto& [k, v] : result.summary.entries()) manifest.set("result." + k, v);
      manifest.set("git_describe", build_version()).set("wall_time_s", wall).set("exit_code", result.code);
      write_file_atomic(cfg.output + ".manifest", manifest.str());
      std::cout << "status=" << (result.code == kExitPass ? "PASS" : "FAIL") << " output=" << cfg.output << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return result.code;
}
