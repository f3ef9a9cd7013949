#pragma once

#include <nlohmann/json.hpp>

#include <complex>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "brqw/coin.hpp"
#include "brqw/correlation.hpp"
#include "brqw/dynamics.hpp"
#include "brqw/graph.hpp"
#include "brqw/paths.hpp"
#include "brqw/polymer.hpp"

namespace brqw {

inline constexpr int kSchemaVersion = 1;

// Shortest exact decimal representation; identical across runs.
inline std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string graph_kind_name(GraphKind k) {
  return k == GraphKind::Lattice ? "lattice" : "tree";
}

inline std::string norm_kind_name(NormKind nk) {
  switch (nk) {
    case NormKind::TreeDepth: return "tree";
    case NormKind::L1: return "l1";
    case NormKind::Linf: return "linf";
    case NormKind::Lp: return "lp";
  }
  return "?";
}

inline NormKind parse_norm_kind(const std::string& s) {
  if (s == "tree") return NormKind::TreeDepth;
  if (s == "l1") return NormKind::L1;
  if (s == "linf") return NormKind::Linf;
  if (s == "lp") return NormKind::Lp;
  throw std::invalid_argument("unknown norm kind: " + s + " (expected tree|l1|linf|lp)");
}

inline GraphKind parse_graph_kind(const std::string& s) {
  if (s == "lattice") return GraphKind::Lattice;
  if (s == "tree") return GraphKind::Tree;
  throw std::invalid_argument("unknown graph kind: " + s + " (expected lattice|tree)");
}

// Coin matrix file: 2d lines, each with 2d complex entries as
// re,im pairs, i.e. 4d comma-separated numbers per line.
inline SkeletonMatrix load_coin_csv(std::istream& in, int d) {
  std::vector<std::complex<double>> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> nums;
    while (std::getline(ss, cell, ',')) nums.push_back(std::stod(cell));
    if (nums.size() != static_cast<std::size_t>(4 * d))
      throw std::invalid_argument("coin file: expected " + std::to_string(4 * d) +
                                  " numbers per row (re,im pairs)");
    for (std::size_t i = 0; i + 1 < nums.size(); i += 2)
      entries.emplace_back(nums[i], nums[i + 1]);
  }
  if (entries.size() != static_cast<std::size_t>(4 * d * d))
    throw std::invalid_argument("coin file: expected " + std::to_string(2 * d) + " rows");
  return SkeletonMatrix::from_entries(d, std::move(entries));
}

inline SkeletonMatrix load_coin_csv_file(const std::string& path, int d) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open coin file: " + path);
  return load_coin_csv(in, d);
}

// `fourier`, `hadamard`, or a path to a CSV matrix file.
inline SkeletonMatrix coin_by_name(const std::string& name, int d) {
  if (name == "fourier") return SkeletonMatrix::fourier(d);
  if (name == "hadamard") return SkeletonMatrix::hadamard(d);
  return load_coin_csv_file(name, d);
}

inline std::string vertex_to_string(const Graph& g, const Vertex& v) {
  std::string s;
  if (g.kind == GraphKind::Lattice) {
    s = "(";
    for (std::size_t i = 0; i < v.data().size(); ++i) {
      if (i) s += ",";
      s += std::to_string(v.data()[i]);
    }
    s += ")";
  } else {
    if (v.data().empty()) return "e";
    for (std::size_t i = 0; i < v.data().size(); ++i) {
      if (i) s += " ";
      s += letter_name(Letter{static_cast<std::uint8_t>(v.data()[i])}, g.d);
    }
  }
  return s;
}

// ---- machine-readable renderings (deterministic byte-for-byte) ----

inline std::string render_exact_sum_csv(const Graph& g, const SkeletonMatrix& coin, int n,
                                        Letter tau0, const std::vector<double>& alphas,
                                        NormKind nk, std::size_t workers,
                                        std::uint64_t budget = kDefaultEnumerationBudget) {
  std::string out = "n,alpha,S_n,class_count,zero_class_count,paths_in_zero_classes\n";
  ClassTable t = build_class_table(g, n, tau0, &coin, workers, budget);
  ZeroClassCensus census;
  census.class_count = t.classes.size();
  for (const auto& [k, e] : t.classes)
    if (t.entry_is_zero(e)) {
      ++census.zero_class_count;
      census.paths_in_zero_classes += e.cardinality;
    }
  auto keys = t.sorted_keys();
  for (double a : alphas) {
    double s = 0;
    for (const std::string* k : keys) {
      const ClassTable::Entry& e = t.classes.at(*k);
      double w = std::exp(a * g.norm(e.endpoint, nk));
      if (t.sign_exact)
        for (std::int64_t x : e.int_amp) s += w * static_cast<double>(x) * static_cast<double>(x);
      else
        for (const auto& x : e.amp) s += w * std::norm(x);
    }
    s /= std::pow(static_cast<double>(g.alphabet_size()), n);
    out += std::to_string(n) + "," + fmt(a) + "," + fmt(s) + "," +
           std::to_string(census.class_count) + "," + std::to_string(census.zero_class_count) +
           "," + std::to_string(census.paths_in_zero_classes) + "\n";
  }
  return out;
}

inline nlohmann::json simulate_record(const Graph& g, const std::string& coin_name,
                                      const SkeletonMatrix& coin, Letter tau0, int n,
                                      double alpha, NormKind nk, std::uint64_t M,
                                      std::uint64_t seed, std::size_t workers,
                                      std::uint64_t node_budget = kDefaultNodeBudget) {
  McResult r = mc_expectation(g, coin, tau0, n, alpha, nk, M, seed, workers, node_budget);
  nlohmann::json j;
  j["schema"] = kSchemaVersion;
  j["params"] = {{"graph", graph_kind_name(g.kind)}, {"d", g.d},     {"coin", coin_name},
                 {"tau0", tau0.index},               {"n", n},       {"alpha", alpha},
                 {"norm", norm_kind_name(nk)},       {"samples", M}, {"seed", seed}};
  j["mean"] = r.mean;
  j["stderr"] = r.stderr_;
  return j;
}

inline std::string render_classes_json(const Graph& g, const SkeletonMatrix& coin, int n,
                                       Letter tau0, std::size_t workers,
                                       std::uint64_t budget = kDefaultEnumerationBudget) {
  ClassTable t = build_class_table(g, n, tau0, &coin, workers, budget);
  nlohmann::json j;
  j["schema"] = kSchemaVersion;
  j["params"] = {{"graph", graph_kind_name(g.kind)}, {"d", g.d}, {"n", n}, {"tau0", tau0.index}};
  nlohmann::json list = nlohmann::json::array();
  for (const std::string* k : t.sorted_keys()) {
    const ClassTable::Entry& e = t.classes.at(*k);
    nlohmann::json cj;
    Path rep{tau0, e.representative};
    PhaseContent pc = phase_content(g, rep);
    nlohmann::json content = nlohmann::json::array();
    for (const auto& item : pc.items)
      content.push_back({{"arrival", vertex_to_string(g, item.arrival)},
                         {"departure", vertex_to_string(g, item.departure)},
                         {"multiplicity", item.multiplicity}});
    cj["content"] = content;
    cj["cardinality"] = e.cardinality;
    cj["endpoint"] = vertex_to_string(g, e.endpoint);
    nlohmann::json amps = nlohmann::json::array();
    for (const auto& a : e.amp) amps.push_back({{"re", a.real()}, {"im", a.imag()}});
    cj["amplitude"] = amps;
    cj["is_zero"] = t.entry_is_zero(e);
    list.push_back(std::move(cj));
  }
  j["classes"] = list;
  return j.dump(2) + "\n";
}

// Bound formulas evaluated for a given d (the `report` subcommand).
inline nlohmann::json bounds_report(int d, int n_max_connective = 8,
                                    std::uint64_t budget = kDefaultEnumerationBudget) {
  nlohmann::json j;
  j["schema"] = kSchemaVersion;
  j["d"] = d;
  j["tree_saw_alpha_c"] = std::log(2.0 * d / (2.0 * d - 1.0));
  if (d >= 2) {
    DecoratedTreeBound b = decorated_tree_bound(d);
    j["tree_decorated_alpha_threshold"] = b.alpha_threshold;
    j["tree_decorated_alpha_threshold_alt_form"] = b.alt_form;
    j["tree_decorated_asymptotic_check"] = b.asymptotic_check;
    j["tree_localisation_length_lower"] = 1.0 / b.alpha_threshold;
  }
  j["lattice_l1_alpha_c_upper"] = std::log(2.0);
  j["lattice_localisation_length_lower"] = 1.0 / std::log(2.0);
  if (d >= 2) {
    auto [mu_lo, mu_hi] = connective_estimate(PathFamily::SAW, Graph::lattice(d - 1),
                                              n_max_connective, budget);
    j["mu_dminus1_interval"] = {mu_lo, mu_hi};
    j["linf_alpha_c_upper_from_mu_upper"] = linf_alpha_bound(d, mu_lo);
    j["linf_alpha_c_upper_from_mu_lower"] = linf_alpha_bound(d, mu_hi);
    j["mu_literature_asymptotic"] = "mu(d) = 2d - 1 + O(1/d) (displayed only, never used)";
  }
  return j;
}

inline std::string render_mass_csv(const MassEstimate& m) {
  std::string out = "L,G_L,mass_L\n";
  for (std::size_t i = 0; i < m.per_L.size(); ++i)
    out += std::to_string(i + 1) + "," + fmt(m.G_L[i]) + "," + fmt(m.per_L[i]) + "\n";
  return out;
}

inline nlohmann::json mass_summary(int d, const MassEstimate& m) {
  nlohmann::json j;
  j["schema"] = kSchemaVersion;
  j["params"] = {{"d", d}, {"z", m.z}, {"L_max", m.L_max}, {"n_max", m.n_max}};
  j["mass_hat"] = m.sup_estimate;
  j["xi_hat"] = 1.0 / m.sup_estimate;
  j["sandwich_ok"] = m.sandwich_ok;
  j["caveat_small_d"] = m.caveat_small_d;
  j["bias"] = "truncated per-L values over-estimate (-ln G_L)/L; diagnostic, not certified";
  return j;
}

struct CrosscheckRow {
  int n{0};
  double alpha{0};
  double exact{0};
  double mc_mean{0};
  double mc_stderr{0};
  double z_score{0};
};

// Monte-Carlo vs exact enumeration on the same parameters; the z-score
// is |mc - exact| / stderr (0 when both the difference and the spread
// vanish, as at alpha = 0).
inline std::vector<CrosscheckRow> crosscheck(const Graph& g, const SkeletonMatrix& coin,
                                             Letter tau0, int n_max,
                                             const std::vector<double>& alphas, NormKind nk,
                                             std::uint64_t M, std::uint64_t seed,
                                             std::size_t workers,
                                             std::uint64_t budget = kDefaultEnumerationBudget) {
  auto grid = mc_expectation_grid(g, coin, tau0, n_max, alphas, nk, M, seed, workers);
  std::vector<CrosscheckRow> rows;
  for (int n = 1; n <= n_max; ++n) {
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      CrosscheckRow r;
      r.n = n;
      r.alpha = alphas[j];
      r.exact = exact_S_n(g, n, tau0, coin, alphas[j], nk, workers, budget);
      const McResult& mc = grid[static_cast<std::size_t>(n - 1)][j];
      r.mc_mean = mc.mean;
      r.mc_stderr = mc.stderr_;
      double diff = std::abs(r.mc_mean - r.exact);
      double negligible = 1e-9 * std::max(1.0, std::abs(r.exact));
      r.z_score = (diff <= negligible)
                      ? 0.0
                      : (mc.stderr_ == 0.0 ? std::numeric_limits<double>::infinity()
                                           : diff / mc.stderr_);
      rows.push_back(r);
    }
  }
  return rows;
}

}  // namespace brqw
