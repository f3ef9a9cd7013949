// Acceptance suite: one pass/fail line per criterion, nonzero exit if
// any criterion fails. Tolerances are pinned in-line.
#include <cstdio>
#include <set>

#include "brqw/io.hpp"

using namespace brqw;

namespace {

int failures = 0;

void report(int criterion, const char* what, bool ok) {
  std::printf("[%s] criterion %2d: %s\n", ok ? "PASS" : "FAIL", criterion, what);
  if (!ok) ++failures;
}

std::vector<Letter> mk(std::initializer_list<int> idx) {
  std::vector<Letter> out;
  for (int i : idx) out.push_back(Letter{static_cast<std::uint8_t>(i)});
  return out;
}

// ---- criterion 1: exact normalisation at alpha = 0 ----
bool crit1() {
  SkeletonMatrix had = SkeletonMatrix::hadamard(2);
  SkeletonMatrix fou = SkeletonMatrix::fourier(2);
  for (GraphKind kind : {GraphKind::Lattice, GraphKind::Tree}) {
    Graph g(kind, 2);
    for (const SkeletonMatrix* c : {&had, &fou})
      for (int n = 1; n <= 8; ++n) {
        double s = exact_S_n(g, n, Letter{0}, *c, 0.0, g.default_norm(), 8);
        if (std::abs(s - 1.0) > 1e-10) return false;
      }
  }
  return true;
}

// ---- criterion 2: Monte-Carlo vs exact enumeration ----
bool crit2() {
  Graph g = Graph::lattice(2);
  SkeletonMatrix c = SkeletonMatrix::hadamard(2);
  std::vector<double> alphas{0.0, 0.1, 0.2};
  auto grid = mc_expectation_grid(g, c, Letter{0}, 6, alphas, NormKind::L1, 10000, 20240824, 8);
  int within3 = 0, total = 0;
  bool all_within4 = true;
  for (int n = 2; n <= 6; ++n)
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      double exact = exact_S_n(g, n, Letter{0}, c, alphas[j], NormKind::L1, 8);
      const McResult& mc = grid[static_cast<std::size_t>(n - 1)][j];
      double diff = std::abs(mc.mean - exact);
      ++total;
      if (diff <= std::max(3.0 * mc.stderr_, 1e-9)) ++within3;
      if (diff > std::max(4.0 * mc.stderr_, 1e-9)) all_within4 = false;
    }
  return total == 15 && within3 >= 14 && all_within4;
}

// ---- criterion 3: the cancelling length-6 class ----
bool crit3() {
  Graph g = Graph::lattice(2);
  SkeletonMatrix c = SkeletonMatrix::hadamard(2);
  ClassTable t = build_class_table(g, 6, Letter{1}, &c, 8);
  PhaseContent pc = phase_content(g, Path{Letter{1}, mk({0, 0, 2, 2, 0, 1})});
  PhaseContent pc2 = phase_content(g, Path{Letter{1}, mk({0, 2, 0, 0, 2, 1})});
  if (!(pc == pc2)) return false;
  auto it = t.classes.find(pc.key());
  if (it == t.classes.end()) return false;
  if (it->second.cardinality != 2) return false;
  for (std::int64_t a : it->second.int_amp)
    if (a != 0) return false;
  ZeroClassCensus census = zero_class_census(g, 6, Letter{1}, c, 8);
  return census.zero_class_count >= 1;
}

// ---- criterion 4: tree closed forms ----
bool crit4() {
  std::uint64_t budget = 500'000'000ULL;
  for (int d : {2, 3}) {
    Graph g = Graph::tree(d);
    for (int n = 0; n <= 10; ++n)
      for (double a : {0.0, 0.4}) {
        double z = partition_function(PathFamily::SAW, g, n, a, NormKind::TreeDepth, budget);
        double want = tree_saw_partition(d, n, a);
        if (std::abs(z - want) > 1e-12 * want) return false;
      }
  }
  {
    // d = 4 via a single enumeration pass (histogram), same exactness
    Graph g = Graph::tree(4);
    auto hist = saw_norm_histograms(g, 10, NormKind::TreeDepth, budget);
    for (int n = 0; n <= 10; ++n)
      for (double a : {0.0, 0.4}) {
        double z = partition_from_histogram(hist[static_cast<std::size_t>(n)], a);
        double want = tree_saw_partition(4, n, a);
        if (std::abs(z - want) > 1e-12 * want) return false;
      }
  }
  // susceptibility partial sums at n_max = 40 vs the exact geometric sum
  for (int d : {2, 3, 4})
    for (double a : {0.0, 0.2}) {
      double q_target = 0.5;
      double z = q_target / ((2.0 * d - 1.0) * std::exp(a));
      double partial = 0;
      for (int n = 0; n <= 40; ++n) partial += std::pow(z, n) * tree_saw_partition(d, n, a);
      if (std::abs(partial - tree_saw_susceptibility(d, a, z)) > 1e-8) return false;
    }
  return true;
}

// ---- criterion 5: bound formulas ----
bool crit5() {
  nlohmann::json j = bounds_report(2, 6);
  if (std::abs(j["tree_saw_alpha_c"].get<double>() - std::log(4.0 / 3.0)) > 1e-14) return false;
  DecoratedTreeBound b2 = decorated_tree_bound(2);
  if (std::abs(b2.alpha_threshold - std::log(52.0 / 45.0)) > 1e-14) return false;
  if (std::abs(b2.alpha_threshold - b2.alt_form) > 1e-15) return false;
  DecoratedTreeBound b10 = decorated_tree_bound(10);
  if (b10.asymptotic_check < 0.9 || b10.asymptotic_check > 1.1) return false;
  return std::abs(j["lattice_l1_alpha_c_upper"].get<double>() - std::log(2.0)) < 1e-14;
}

// ---- criterion 6: lattice recursion ----
bool crit6() {
  for (int n = 0; n <= 6; ++n)
    for (int L = -n; L <= n; ++L) {
      LiftCheck c = lattice_lift_check(2, n, L);
      if (c.lhs < c.rhs) return false;
    }
  for (int d : {2, 3}) {
    Graph g = Graph::lattice(d);
    for (int n = 1; n <= 6; ++n)
      for (double a : {0.0, 0.3}) {
        double z = partition_function(PathFamily::SAW, g, n, a, NormKind::L1);
        if (z < std::pow(d * std::exp(a), n) * (1.0 - 1e-12)) return false;
      }
  }
  return true;
}

// ---- criterion 7: polymer properties ----
bool crit7() {
  SkeletonMatrix c = SkeletonMatrix::hadamard(2);
  for (GraphKind kind : {GraphKind::Lattice, GraphKind::Tree}) {
    Graph g(kind, 2);
    NormKind nk = g.default_norm();
    for (PathFamily X : {PathFamily::SAW, PathFamily::SP}) {
      // subadditivity
      for (double a : {0.0, 0.5, 1.0}) {
        std::vector<double> Z(9);
        for (int n = 0; n <= 8; ++n)
          Z[static_cast<std::size_t>(n)] = partition_function(X, g, n, a, nk);
        for (int n = 1; n <= 7; ++n)
          for (int m = 1; n + m <= 8; ++m)
            if (Z[static_cast<std::size_t>(n + m)] >
                Z[static_cast<std::size_t>(n)] * Z[static_cast<std::size_t>(m)] * (1 + 1e-12))
              return false;
      }
      // log-convexity in alpha on a 5-point grid
      double grid[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
      for (int n = 1; n <= 8; ++n) {
        double lnz[5];
        for (int i = 0; i < 5; ++i)
          lnz[i] = std::log(partition_function(X, g, n, grid[i], nk));
        for (int i = 1; i < 4; ++i)
          if (lnz[i + 1] - 2 * lnz[i] + lnz[i - 1] < -1e-9) return false;
      }
    }
    // restriction chain: S_n >= (2d)^{-n} Z_SP >= (2d)^{-n} Z_SAW
    for (int n = 1; n <= 8; ++n)
      for (double a : {0.0, 0.3}) {
        double s = exact_S_n(g, n, Letter{0}, c, a, nk, 8);
        double zsp = partition_function(PathFamily::SP, g, n, a, nk);
        double zsaw = partition_function(PathFamily::SAW, g, n, a, nk);
        double scale = std::pow(4.0, -n);
        if (s < scale * zsp * (1 - 1e-10)) return false;
        if (zsp < zsaw * (1 - 1e-12)) return false;
      }
  }
  return true;
}

// ---- criterion 8: decorated paths are single-path classes ----
bool crit8() {
  Graph t = Graph::tree(2);
  for (int n = 3; n <= 8; ++n) {
    auto paths = render_decorated_paths(2, n);
    if (bigint(paths.size()) != decorated_path_census(2, n)) return false;
    std::set<std::vector<std::uint8_t>> seen;
    ClassTable table = build_class_table(t, n, Letter{0}, nullptr, 8);
    std::uint64_t sp = 0;
    for (const auto& [k, e] : table.classes) sp += e.cardinality == 1;
    if (decorated_path_census(2, n) > bigint(sp)) return false;
    for (const auto& p : paths) {
      std::vector<std::uint8_t> raw;
      for (Letter l : p) raw.push_back(l.index);
      if (!seen.insert(raw).second) return false;
      if (!is_single_path_class(table, t, p)) return false;
    }
  }
  return true;
}

// ---- criterion 9: correlation oracles and mass monotonicity ----
double brute_two_point_z2(double z, std::vector<int> target, double alpha, int n_max) {
  std::set<std::vector<int>> seen;
  std::vector<int> pos{0, 0};
  seen.insert(pos);
  long double value = 0;
  double w = std::exp(alpha * (std::abs(target[0]) + std::abs(target[1])));
  if (target == pos) value += w;
  auto rec = [&](auto&& self, int depth) -> void {
    if (depth == n_max) return;
    for (int axis = 0; axis < 2; ++axis)
      for (int dir : {1, -1}) {
        pos[static_cast<std::size_t>(axis)] += dir;
        if (seen.insert(pos).second) {
          if (pos == target) value += std::pow(z, depth + 1) * w;
          self(self, depth + 1);
          seen.erase(pos);
        }
        pos[static_cast<std::size_t>(axis)] -= dir;
      }
  };
  rec(rec, 0);
  return static_cast<double>(value);
}

double brute_plane_z2(double z, int L, int n_max) {
  std::set<std::vector<int>> seen;
  std::vector<int> pos{0, 0};
  seen.insert(pos);
  long double value = 0;
  auto rec = [&](auto&& self, int depth) -> void {
    if (depth == n_max) return;
    for (int axis = 0; axis < 2; ++axis)
      for (int dir : {1, -1}) {
        pos[static_cast<std::size_t>(axis)] += dir;
        if (seen.insert(pos).second) {
          if (pos[0] == L) value += std::pow(z, depth + 1);
          self(self, depth + 1);
          seen.erase(pos);
        }
        pos[static_cast<std::size_t>(axis)] -= dir;
      }
  };
  rec(rec, 0);
  return static_cast<double>(value);
}

bool crit9() {
  Graph g = Graph::lattice(2);
  for (auto target : std::vector<std::vector<int>>{{0, 0}, {1, 0}, {2, 1}, {-1, 3}})
    for (double z : {0.1, 0.2}) {
      SeriesEstimate s = two_point(g, z, Vertex::lattice({target[0], target[1]}), 0.15, 8);
      if (std::abs(s.value - brute_two_point_z2(z, target, 0.15, 8)) > 1e-14) return false;
    }
  for (int L : {1, 2, 3})
    for (double z : {0.1, 0.2}) {
      SeriesEstimate s = plane_generating(2, z, L, 8);
      if (std::abs(s.value - brute_plane_z2(z, L, 8)) > 1e-14) return false;
    }
  double prev = std::numeric_limits<double>::infinity();
  for (double z : {0.1, 0.15, 0.2, 0.25}) {
    double m = mass_estimate(2, z, 3, 10).sup_estimate;
    if (m > prev + 1e-12) return false;
    prev = m;
  }
  return true;
}

// ---- criterion 10: byte determinism across worker counts ----
bool crit10() {
  Graph gl = Graph::lattice(2);
  Graph gt = Graph::tree(2);
  SkeletonMatrix had = SkeletonMatrix::hadamard(2);
  SkeletonMatrix fou = SkeletonMatrix::fourier(2);
  std::string c1 = render_exact_sum_csv(gl, had, 5, Letter{0}, {0.0, 0.2}, NormKind::L1, 1);
  std::string c8 = render_exact_sum_csv(gl, had, 5, Letter{0}, {0.0, 0.2}, NormKind::L1, 8);
  if (c1 != c8) return false;
  std::string s1 = simulate_record(gt, "fourier", fou, Letter{0}, 5, 0.3, NormKind::TreeDepth,
                                   200, 77, 1).dump();
  std::string s8 = simulate_record(gt, "fourier", fou, Letter{0}, 5, 0.3, NormKind::TreeDepth,
                                   200, 77, 8).dump();
  std::string s8b = simulate_record(gt, "fourier", fou, Letter{0}, 5, 0.3, NormKind::TreeDepth,
                                    200, 77, 8).dump();
  if (s1 != s8 || s8 != s8b) return false;
  std::string j1 = render_classes_json(gt, had, 4, Letter{0}, 1);
  std::string j8 = render_classes_json(gt, had, 4, Letter{0}, 8);
  return j1 == j8;
}

}  // namespace

int main() {
  report(1, "exact moment sum equals 1 at alpha=0 (n<=8, both graphs, both coins)", crit1());
  report(2, "Monte-Carlo mean within sampling error of exact enumeration (15 cells)", crit2());
  report(3, "cancelling length-6 class found: cardinality 2, exact zero accumulator", crit3());
  report(4, "tree partition and susceptibility closed forms (d<=4, n<=10 / n_max=40)", crit4());
  report(5, "bound formulas: ln(4/3), ln(52/45) twice, asymptotic check, ln 2", crit5());
  report(6, "dimensional lift inequality and (d e^alpha)^n lower bound", crit6());
  report(7, "subadditivity, log-convexity, and the restriction chain", crit7());
  report(8, "decorated census renders to distinct single-path-class members", crit8());
  report(9, "correlation oracles to 1e-14 and mass monotone in z", crit9());
  report(10, "byte-identical outputs for worker counts 1 and 8", crit10());
  if (failures) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all 10 criteria passed\n");
  return 0;
}
