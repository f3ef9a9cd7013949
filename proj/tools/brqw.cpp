// brqw: balanced random quantum walk laboratory.
//
// Subcommands: simulate, exact-sum, classes, polymer, mass, report,
// crosscheck. All machine outputs embed "schema": 1 (JSON) or a fixed
// CSV header; identical config + seed gives byte-identical output for
// any worker count.
//
// Exit codes: 0 success, 1 crosscheck z-score failure, 2 validation
// error, 3 enumeration/node budget exceeded, 4 I/O error.
#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "brqw/io.hpp"

using namespace brqw;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitBudget = 3;
constexpr int kExitIo = 4;

std::size_t default_workers() {
  if (const char* env = std::getenv("BRQW_WORKERS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<std::size_t>(v);
    throw std::invalid_argument("BRQW_WORKERS must be a positive integer");
  }
  return 1;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

struct CommonOpts {
  std::string graph = "lattice";
  int d = 2;
  std::string coin = "hadamard";
  int tau0 = 0;
  std::string norm;
  std::size_t workers = default_workers();
  std::uint64_t budget = kDefaultEnumerationBudget;
  std::string output;
};

NormKind resolve_norm(const CommonOpts& o, const Graph& g) {
  return o.norm.empty() ? g.default_norm() : parse_norm_kind(o.norm);
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_coin = true) {
  cmd->add_option("--graph", o.graph, "Graph kind: lattice|tree")
      ->check(CLI::IsMember({"lattice", "tree"}))
      ->capture_default_str();
  cmd->add_option("--d", o.d, "Half the coordination number (alphabet 2d)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  if (with_coin)
    cmd->add_option("--coin", o.coin, "Coin: fourier|hadamard|<csv file>")->capture_default_str();
  cmd->add_option("--tau0", o.tau0, "Initial coin letter index in [0, 2d)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--norm", o.norm, "Endpoint norm: tree|l1|linf|lp (default by graph)");
  cmd->add_option("--workers", o.workers, "Worker thread count (env BRQW_WORKERS)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--budget", o.budget, "Enumeration budget (paths/nodes visited)")
      ->capture_default_str();
  cmd->add_option("-o,--output", o.output, "Output file ('-' for stdout)");
}

Graph make_graph(const CommonOpts& o) {
  Graph g(parse_graph_kind(o.graph), o.d);
  if (o.tau0 < 0 || o.tau0 >= 2 * o.d)
    throw std::invalid_argument("tau0: letter index out of range for d=" + std::to_string(o.d));
  return g;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"balanced random quantum walk laboratory"};
  app.require_subcommand(1);
  // --config goes before the subcommand; sections in the file name the
  // subcommand, e.g.  [exact-sum]\n n=4\n alpha=0,0.2
  app.set_config("--config", "", "Read options from an ini/toml config file");

  // ---- simulate ----
  CommonOpts sim;
  int sim_n = 4;
  double sim_alpha = 0.0;
  std::uint64_t sim_samples = 1000, sim_seed = 1;
  std::uint64_t sim_node_budget = kDefaultNodeBudget;
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo disorder average of the moment");
  add_common(simulate, sim);
  simulate->add_option("--n", sim_n, "Number of walk steps")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--alpha", sim_alpha, "Moment exponent alpha >= 0")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  simulate->add_option("--samples", sim_samples, "Disorder realisations M >= 2")->capture_default_str();
  simulate->add_option("--seed", sim_seed, "Master RNG seed")->capture_default_str();
  simulate->add_option("--node-budget", sim_node_budget, "State support budget")->capture_default_str();

  // ---- exact-sum ----
  CommonOpts ex;
  int ex_n = 4;
  std::vector<double> ex_alphas{0.0};
  auto* exact = app.add_subcommand("exact-sum", "Exact disorder-averaged moment via classes");
  add_common(exact, ex);
  exact->add_option("--n", ex_n, "Path length")->check(CLI::PositiveNumber)->capture_default_str();
  exact->add_option("--alpha", ex_alphas, "Alpha grid (comma separated)")
      ->delimiter(',')
      ->capture_default_str();

  // ---- classes ----
  CommonOpts cl;
  int cl_n = 4;
  bool cl_dump = false;
  auto* classes = app.add_subcommand("classes", "Phase-content class census");
  add_common(classes, cl);
  classes->add_option("--n", cl_n, "Path length")->check(CLI::PositiveNumber)->capture_default_str();
  classes->add_flag("--dump", cl_dump, "Dump every class as JSON (n <= 6)");

  // ---- polymer ----
  CommonOpts po;
  po.coin.clear();
  std::string po_family = "saw";
  int po_n_max = 8;
  std::vector<double> po_alphas{0.0};
  std::vector<double> po_zs;
  std::string po_prefix;
  auto* polymer = app.add_subcommand("polymer", "Partition functions, free-energy and alpha_c brackets");
  add_common(polymer, po, /*with_coin=*/false);
  polymer->add_option("--family", po_family, "Path family: saw|sp")
      ->check(CLI::IsMember({"saw", "sp"}))
      ->capture_default_str();
  polymer->add_option("--n-max", po_n_max, "Largest path length")->check(CLI::PositiveNumber)->capture_default_str();
  polymer->add_option("--alpha", po_alphas, "Alpha grid")->delimiter(',')->capture_default_str();
  polymer->add_option("--z", po_zs, "z grid for susceptibility partial sums")->delimiter(',');
  polymer->add_option("--output-prefix", po_prefix, "Write <prefix>_zn.csv, _lambda.csv, _chi.csv, _summary.json");

  // ---- mass ----
  int ma_d = 2, ma_L_max = 4, ma_n_max = 12;
  double ma_z = 0.0;
  bool ma_z_critical = false;
  std::string ma_output;
  std::uint64_t ma_budget = kDefaultEnumerationBudget;
  auto* mass = app.add_subcommand("mass", "Plane generating functions and mass estimate");
  mass->add_option("--d", ma_d, "Lattice dimension")->check(CLI::PositiveNumber)->capture_default_str();
  auto* zopt = mass->add_option("--z", ma_z, "Activity z > 0");
  mass->add_flag("--z-critical", ma_z_critical, "Use z = 1/(2d)")->excludes(zopt);
  mass->add_option("--L-max", ma_L_max, "Largest plane distance")->check(CLI::PositiveNumber)->capture_default_str();
  mass->add_option("--n-max", ma_n_max, "Series truncation order")->check(CLI::PositiveNumber)->capture_default_str();
  mass->add_option("--budget", ma_budget, "Enumeration budget")->capture_default_str();
  mass->add_option("-o,--output", ma_output, "CSV output file ('-' for stdout)");

  // ---- report ----
  int re_d = 2;
  bool re_bounds = false;
  int re_n_max = 8;
  std::string re_output;
  auto* report = app.add_subcommand("report", "Closed-form bound formulas");
  report->add_option("--d", re_d, "Dimension")->check(CLI::PositiveNumber)->capture_default_str();
  report->add_flag("--bounds", re_bounds, "Emit the bound formula report");
  report->add_option("--n-max", re_n_max, "Truncation for the connective interval")->capture_default_str();
  report->add_option("-o,--output", re_output, "Output file ('-' for stdout)");

  // ---- crosscheck ----
  CommonOpts cc;
  int cc_n_max = 4;
  std::vector<double> cc_alphas{0.0, 0.1};
  std::uint64_t cc_samples = 2000, cc_seed = 1;
  auto* cross = app.add_subcommand("crosscheck", "Monte-Carlo vs exact enumeration z-scores");
  add_common(cross, cc);
  cross->add_option("--n-max", cc_n_max, "Largest step count")->check(CLI::PositiveNumber)->capture_default_str();
  cross->add_option("--alpha", cc_alphas, "Alpha grid")->delimiter(',')->capture_default_str();
  cross->add_option("--samples", cc_samples, "Disorder realisations")->capture_default_str();
  cross->add_option("--seed", cc_seed, "Master RNG seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitValidation;
  }

  try {
    if (simulate->parsed()) {
      if (sim_samples < 2) throw std::invalid_argument("samples: must be >= 2");
      Graph g = make_graph(sim);
      SkeletonMatrix coin = coin_by_name(sim.coin, sim.d);
      NormKind nk = resolve_norm(sim, g);
      nlohmann::json j =
          simulate_record(g, sim.coin, coin, Letter{static_cast<std::uint8_t>(sim.tau0)}, sim_n,
                          sim_alpha, nk, sim_samples, sim_seed, sim.workers, sim_node_budget);
      write_output(sim.output, j.dump(2) + "\n");
      std::cerr << "E(M_n) ~ " << fmt(j["mean"].get<double>()) << " +- "
                << fmt(j["stderr"].get<double>()) << "  (n=" << sim_n << ", alpha=" << sim_alpha
                << ", M=" << sim_samples << ")\n";
    } else if (exact->parsed()) {
      Graph g = make_graph(ex);
      SkeletonMatrix coin = coin_by_name(ex.coin, ex.d);
      NormKind nk = resolve_norm(ex, g);
      std::string csv =
          render_exact_sum_csv(g, coin, ex_n, Letter{static_cast<std::uint8_t>(ex.tau0)},
                               ex_alphas, nk, ex.workers, ex.budget);
      write_output(ex.output, csv);
    } else if (classes->parsed()) {
      if (cl_dump && cl_n > 6)
        throw std::invalid_argument("n: --dump is limited to n <= 6 (output size)");
      Graph g = make_graph(cl);
      SkeletonMatrix coin = coin_by_name(cl.coin, cl.d);
      Letter tau0{static_cast<std::uint8_t>(cl.tau0)};
      if (cl_dump) {
        write_output(cl.output, render_classes_json(g, coin, cl_n, tau0, cl.workers, cl.budget));
      } else {
        ZeroClassCensus c = zero_class_census(g, cl_n, tau0, coin, cl.workers, cl.budget);
        nlohmann::json j;
        j["schema"] = kSchemaVersion;
        j["params"] = {{"graph", graph_kind_name(g.kind)}, {"d", g.d}, {"coin", cl.coin},
                       {"n", cl_n},                        {"tau0", cl.tau0}};
        j["class_count"] = c.class_count;
        j["zero_class_count"] = c.zero_class_count;
        j["paths_in_zero_classes"] = c.paths_in_zero_classes;
        write_output(cl.output, j.dump(2) + "\n");
      }
    } else if (polymer->parsed()) {
      Graph g = make_graph(po);
      PathFamily X = po_family == "saw" ? PathFamily::SAW : PathFamily::SP;
      NormKind nk = resolve_norm(po, g);
      for (double a : po_alphas)
        if (a < 0) throw std::invalid_argument("alpha: must be >= 0");

      std::string zn = "family,alpha,n,Z_n\n";
      for (double a : po_alphas)
        for (int n = 0; n <= po_n_max; ++n)
          zn += po_family + "," + fmt(a) + "," + std::to_string(n) + "," +
                fmt(partition_function(X, g, n, a, nk, po.budget)) + "\n";

      std::string lam = "alpha,lambda_lower,lambda_upper,argmin_n\n";
      for (double a : po_alphas) {
        LambdaBounds b = lambda_bounds(X, g, a, po_n_max, nk, po.budget);
        lam += fmt(a) + "," + fmt(b.lower) + "," + fmt(b.upper.value) + "," +
               std::to_string(b.argmin_n) + "\n";
      }

      std::string chi = "alpha,z,chi_partial,last_term,below_estimated_z_c\n";
      for (double a : po_alphas)
        for (double z : po_zs) {
          Susceptibility s = susceptibility(X, g, a, z, po_n_max, nk, po.budget);
          chi += fmt(a) + "," + fmt(z) + "," + fmt(s.partial.value) + "," +
                 fmt(s.partial.last_term) + "," + (s.below_estimated_z_c ? "1" : "0") + "\n";
        }

      AlphaCBracket ac = alpha_c_bracket(g, po_n_max, po.budget);
      nlohmann::json summary;
      summary["schema"] = kSchemaVersion;
      summary["params"] = {{"family", po_family}, {"graph", graph_kind_name(g.kind)},
                           {"d", g.d},            {"n_max", po_n_max},
                           {"norm", norm_kind_name(nk)}};
      summary["alpha_c_lower"] = ac.lower;
      summary["alpha_c_upper_same_family"] = ac.upper;
      summary["alpha_c_walk_upper"] = ac.walk_upper;
      auto [mu_lo, mu_hi] = connective_estimate(X, g, po_n_max, po.budget);
      summary["connective_interval"] = {mu_lo, mu_hi};
      summary["bounds"] = bounds_report(g.d, std::min(po_n_max, 8), po.budget);

      if (!po_prefix.empty()) {
        write_output(po_prefix + "_zn.csv", zn);
        write_output(po_prefix + "_lambda.csv", lam);
        write_output(po_prefix + "_chi.csv", chi);
        write_output(po_prefix + "_summary.json", summary.dump(2) + "\n");
      } else {
        write_output(po.output, zn + "\n" + lam + "\n" + chi + "\n" + summary.dump(2) + "\n");
      }
    } else if (mass->parsed()) {
      if (ma_z_critical) ma_z = 1.0 / (2.0 * ma_d);
      if (ma_z <= 0) throw std::invalid_argument("z: must be > 0 (or pass --z-critical)");
      MassEstimate m = mass_estimate(ma_d, ma_z, ma_L_max, ma_n_max, 0.1, ma_budget);
      write_output(ma_output, render_mass_csv(m));
      nlohmann::json j = mass_summary(ma_d, m);
      std::cerr << j.dump(2) << "\n";
      std::cerr << "note: truncated per-L values over-estimate (-ln G_L)/L; diagnostic only\n";
    } else if (report->parsed()) {
      if (!re_bounds) throw std::invalid_argument("report: pass --bounds");
      write_output(re_output, bounds_report(re_d, re_n_max).dump(2) + "\n");
    } else if (cross->parsed()) {
      if (cc_samples < 2) throw std::invalid_argument("samples: must be >= 2");
      Graph g = make_graph(cc);
      SkeletonMatrix coin = coin_by_name(cc.coin, cc.d);
      NormKind nk = resolve_norm(cc, g);
      auto rows = crosscheck(g, coin, Letter{static_cast<std::uint8_t>(cc.tau0)}, cc_n_max,
                             cc_alphas, nk, cc_samples, cc_seed, cc.workers, cc.budget);
      std::string csv = "n,alpha,exact,mc_mean,mc_stderr,z_score\n";
      bool ok = true;
      for (const auto& r : rows) {
        csv += std::to_string(r.n) + "," + fmt(r.alpha) + "," + fmt(r.exact) + "," +
               fmt(r.mc_mean) + "," + fmt(r.mc_stderr) + "," + fmt(r.z_score) + "\n";
        if (!(std::abs(r.z_score) <= 4.0)) ok = false;
      }
      write_output(cc.output, csv);
      if (!ok) {
        std::cerr << "crosscheck failed: a |z-score| exceeds 4\n";
        return 1;
      }
    }
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}
