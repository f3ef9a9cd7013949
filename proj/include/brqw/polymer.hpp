#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <unordered_set>
#include <vector>

#include "brqw/errors.hpp"
#include "brqw/graph.hpp"
#include "brqw/paths.hpp"

namespace brqw {

using bigint = boost::multiprecision::cpp_int;

enum class PathFamily { SAW, SP };

// Exact partial sum of a defining series, with explicit truncation
// bookkeeping.
struct SeriesEstimate {
  double value{0};
  int truncation_order{0};
  double last_term{0};
  bool monotone_nondecreasing{true};
};

namespace detail {

inline bigint binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  bigint r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= (n - k + i);
    r /= i;
  }
  return r;
}

inline bigint ipow(bigint base, int exp) {
  bigint r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

}  // namespace detail

// Depth-first enumeration of self-avoiding walks from the origin, with
// an occupied-vertex hash set for pruning. Visits every SAW of length
// 1..n_max once and calls visit(length, endpoint, letters). Kept
// independent of the exhaustive enumeration in paths.hpp so the two can
// serve as mutual oracles.
template <typename Visitor>
void enumerate_saws(const Graph& g, int n_max, Visitor&& visit,
                    std::uint64_t budget = kDefaultEnumerationBudget) {
  std::vector<Letter> letters;
  std::vector<Vertex> stack;
  stack.push_back(g.origin());
  std::uint64_t visited = 0;
  int m = g.alphabet_size();

  if (g.kind == GraphKind::Tree) {
    // On a tree a walk is self-avoiding iff it never backtracks, so the
    // occupied set is redundant; prune on the last letter only.
    auto dfs = [&](auto&& self, int depth) -> void {
      if (depth == n_max) return;
      for (int i = 0; i < m; ++i) {
        Letter l{static_cast<std::uint8_t>(i)};
        if (!letters.empty() && l == inverse(letters.back(), g.d)) continue;
        if (++visited > budget) throw BudgetExceeded("SAW enumeration exceeds budget");
        letters.push_back(l);
        stack.push_back(g.step(stack.back(), l));
        visit(depth + 1, stack.back(), letters);
        self(self, depth + 1);
        stack.pop_back();
        letters.pop_back();
      }
    };
    dfs(dfs, 0);
    return;
  }

  std::unordered_set<Vertex, VertexHash> occupied;
  occupied.insert(stack.back());
  auto dfs = [&](auto&& self, int depth) -> void {
    if (depth == n_max) return;
    for (int i = 0; i < m; ++i) {
      Letter l{static_cast<std::uint8_t>(i)};
      Vertex next = g.step(stack.back(), l);
      if (occupied.contains(next)) continue;
      if (++visited > budget) throw BudgetExceeded("SAW enumeration exceeds budget");
      letters.push_back(l);
      occupied.insert(next);
      stack.push_back(next);
      visit(depth + 1, stack.back(), letters);
      self(self, depth + 1);
      stack.pop_back();
      occupied.erase(next);
      letters.pop_back();
    }
  };
  dfs(dfs, 0);
}

// Endpoint-norm histograms for SAWs: result[n] maps the endpoint norm to
// the number of length-n SAWs with that norm (result[0] is the empty
// walk). Makes Z_n(alpha) cheap to evaluate on alpha grids.
inline std::vector<std::map<double, std::uint64_t>> saw_norm_histograms(
    const Graph& g, int n_max, NormKind nk, std::uint64_t budget = kDefaultEnumerationBudget) {
  std::vector<std::map<double, std::uint64_t>> h(static_cast<std::size_t>(n_max) + 1);
  h[0][0.0] = 1;
  enumerate_saws(
      g, n_max,
      [&](int len, const Vertex& end, const std::vector<Letter>&) {
        ++h[static_cast<std::size_t>(len)][g.norm(end, nk)];
      },
      budget);
  return h;
}

inline std::uint64_t saw_count(const Graph& g, int n,
                               std::uint64_t budget = kDefaultEnumerationBudget) {
  if (n == 0) return 1;
  std::uint64_t c = 0;
  enumerate_saws(
      g, n, [&](int len, const Vertex&, const std::vector<Letter>&) { c += (len == n); },
      budget);
  return c;
}

inline double partition_from_histogram(const std::map<double, std::uint64_t>& hist,
                                       double alpha) {
  double z = 0;
  for (const auto& [r, cnt] : hist) z += static_cast<double>(cnt) * std::exp(alpha * r);
  return z;
}

// Z_{X_n}(alpha) = sum over the family of e^{alpha |x_n|}.
inline double partition_function(PathFamily X, const Graph& g, int n, double alpha, NormKind nk,
                                 std::uint64_t budget = kDefaultEnumerationBudget) {
  if (n == 0) return 1.0;
  // long double accumulators: the sums run over up to ~10^7 positive
  // terms and are checked against closed forms to 1e-12 relative
  if (X == PathFamily::SAW) {
    long double z = 0;
    enumerate_saws(
        g, n,
        [&](int len, const Vertex& end, const std::vector<Letter>&) {
          if (len == n) z += std::exp(alpha * g.norm(end, nk));
        },
        budget);
    return static_cast<double>(z);
  }
  // SP: exhaustive enumeration with class grouping
  ClassTable t = build_class_table(g, n, Letter{0}, nullptr, 1, budget);
  long double z = 0;
  for (const std::string* k : t.sorted_keys()) {
    const ClassTable::Entry& e = t.classes.at(*k);
    if (e.cardinality == 1) z += std::exp(alpha * g.norm(e.endpoint, nk));
  }
  return static_cast<double>(z);
}

// Tree closed forms: there are 2d(2d-1)^{n-1} SAWs of length n, all at
// distance n from the root.
inline double tree_saw_partition(int d, int n, double alpha) {
  if (n == 0) return 1.0;
  double m = 2.0 * d;
  return m / (m - 1.0) * std::pow((m - 1.0) * std::exp(alpha), n);
}

inline double tree_saw_lambda(int d, double alpha) { return std::log(2.0 * d - 1.0) + alpha; }

// Exact sum of the geometric series sum_n z^n Z_{SAW_n}(alpha) on the
// tree, with the n=0 term equal to 1 (the empty walk):
//   1 + (2d/(2d-1)) q/(1-q),  q = z(2d-1)e^alpha < 1.
inline double tree_saw_susceptibility(int d, double alpha, double z) {
  double q = z * (2.0 * d - 1.0) * std::exp(alpha);
  if (q >= 1.0) throw std::invalid_argument("tree susceptibility: series diverges, q >= 1");
  return 1.0 + (2.0 * d) / (2.0 * d - 1.0) * q / (1.0 - q);
}

struct LambdaBounds {
  SeriesEstimate upper;  // min over n <= n_max of (ln Z_n)/n; valid since Lambda = inf_n
  double lower{0};       // closed form: ln((2d-1)e^a) on the tree, ln(d e^a) on Z^d
  int argmin_n{0};
};

inline LambdaBounds lambda_bounds(PathFamily X, const Graph& g, double alpha, int n_max,
                                  NormKind nk, std::uint64_t budget = kDefaultEnumerationBudget) {
  if (alpha < 0) throw std::invalid_argument("lambda_bounds: alpha must be >= 0");
  if (n_max < 1) throw std::invalid_argument("lambda_bounds: n_max must be >= 1");
  LambdaBounds b;
  double best = std::numeric_limits<double>::infinity();
  double last = 0;
  for (int n = 1; n <= n_max; ++n) {
    double zn = partition_function(X, g, n, alpha, nk, budget);
    double ln = std::log(zn) / n;
    last = ln;
    if (ln < best) {
      best = ln;
      b.argmin_n = n;
    }
  }
  b.upper.value = best;
  b.upper.truncation_order = n_max;
  b.upper.last_term = last;
  b.upper.monotone_nondecreasing = false;
  b.lower = g.kind == GraphKind::Tree ? tree_saw_lambda(g.d, alpha)
                                      : std::log(static_cast<double>(g.d)) + alpha;
  return b;
}

// Certified interval containing the connective constant e^{Lambda_X(0)}.
inline std::pair<double, double> connective_estimate(PathFamily X, const Graph& g, int n_max,
                                                     std::uint64_t budget = kDefaultEnumerationBudget) {
  double lower = g.kind == GraphKind::Tree ? 2.0 * g.d - 1.0 : static_cast<double>(g.d);
  double upper = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_max; ++n) {
    double zn = partition_function(X, g, n, 0.0, g.default_norm(), budget);
    upper = std::min(upper, std::pow(zn, 1.0 / n));
  }
  return {lower, upper};
}

struct Susceptibility {
  SeriesEstimate partial;     // exact partial sum of sum_n z^n Z_n(alpha)
  double z{0};
  double z_c_estimate{0};     // e^{-Lambda_upper}: an upper estimate of z_c(alpha)
  bool below_estimated_z_c{false};
};

// Partial sum of chi_alpha(z) = sum_{n >= 0} z^n Z_{X_n}(alpha).
// Divergence is reported via the diagnostics, never as an error.
inline Susceptibility susceptibility(PathFamily X, const Graph& g, double alpha, double z,
                                     int n_max, NormKind nk,
                                     std::uint64_t budget = kDefaultEnumerationBudget) {
  if (z < 0) throw std::invalid_argument("susceptibility: z must be >= 0");
  Susceptibility s;
  s.z = z;
  double sum = 1.0;  // n = 0, the empty path
  double term = 1.0;
  double lambda_upper = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_max; ++n) {
    double zn = partition_function(X, g, n, alpha, nk, budget);
    lambda_upper = std::min(lambda_upper, std::log(zn) / n);
    term = std::pow(z, n) * zn;
    sum += term;
  }
  s.partial.value = sum;
  s.partial.truncation_order = n_max;
  s.partial.last_term = term;
  s.partial.monotone_nondecreasing = true;
  s.z_c_estimate = std::exp(-lambda_upper);
  s.below_estimated_z_c = z < s.z_c_estimate;
  return s;
}

struct DecoratedTreeBound {
  double alpha_threshold{0};   // divergence threshold at z = 1/(2d)
  double alt_form{0};          // same quantity via the displayed closed form
  double asymptotic_check{0};  // threshold * 2d^2, -> 1 as d -> infinity
  bool cond_z2_ok{false};      // z^2(2d-1) < 1 at z = 1/(2d)
  bool cond_zea_ok{false};     // z e^alpha (2d-1) < 1 at the threshold
};

// Divergence condition for the decorated-path susceptibility bound on
// the tree, evaluated at z = 1/(2d).
inline DecoratedTreeBound decorated_tree_bound(int d) {
  if (d < 2) throw std::invalid_argument("decorated_tree_bound: d must be >= 2");
  DecoratedTreeBound b;
  double z = 1.0 / (2.0 * d);
  double m = 2.0 * d - 1.0;
  b.alpha_threshold = std::log((1.0 - z * z * m) / ((1.0 - z * z) * z * m));
  double u = 1.0 / (2.0 * d);
  b.alt_form = std::log((1.0 - u + u * u) / ((1.0 - u) * (1.0 - u * u)));
  b.asymptotic_check = b.alpha_threshold * 2.0 * d * d;
  b.cond_z2_ok = z * z * m < 1.0;
  b.cond_zea_ok = z * std::exp(b.alpha_threshold) * m < 1.0;
  return b;
}

struct AlphaCBracket {
  double lower{0};       // root of Lambda_upper(alpha) = ln(2d); <= alpha_c(SAW)
  double upper{0};       // closed form for the SAW family itself
  double walk_upper{0};  // best bound on the walk's alpha_c (SP / recursion based)
};

// Bracket for the SAW-family critical exponent Lambda_SAW(alpha_c) =
// ln(2d), plus the best available upper bound on the walk's alpha_c.
// On the tree the walk bound comes from the decorated-path (SP) family
// and can lie below the SAW bracket; it is reported separately for that
// reason.
inline AlphaCBracket alpha_c_bracket(const Graph& g, int n_max,
                                     std::uint64_t budget = kDefaultEnumerationBudget) {
  AlphaCBracket b;
  double target = std::log(2.0 * g.d);
  NormKind nk = g.default_norm();
  auto hist = saw_norm_histograms(g, n_max, nk, budget);
  auto lambda_upper = [&](double alpha) {
    double best = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= n_max; ++n)
      best = std::min(best, std::log(partition_from_histogram(hist[static_cast<std::size_t>(n)], alpha)) / n);
    return best;
  };
  double lo = 0.0, hi = target + 1.0;
  if (lambda_upper(lo) >= target) {
    b.lower = 0.0;
  } else {
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
      double mid = 0.5 * (lo + hi);
      (lambda_upper(mid) < target ? lo : hi) = mid;
    }
    b.lower = lo;
  }
  if (g.kind == GraphKind::Tree) {
    b.upper = std::log(2.0 * g.d / (2.0 * g.d - 1.0));
    b.walk_upper = g.d >= 2 ? std::min(b.upper, decorated_tree_bound(g.d).alpha_threshold)
                            : b.upper;
  } else {
    b.upper = std::log(2.0);
    b.walk_upper = b.upper;
  }
  if (b.lower > b.upper + 1e-9)
    throw std::logic_error("alpha_c_bracket: lower bound exceeds family upper bound");
  return b;
}

// Counting sum for decorated SAW backbones on the tree: SAW backbones of
// length k with j decorations of total length rho, n = k + 2 rho.
inline bigint decorated_path_census(int d, int n) {
  if (n < 3) throw std::invalid_argument("decorated_path_census: n must be >= 3");
  bigint total = 0;
  for (int k = 1; k + 2 <= n; ++k) {
    if ((n - k) % 2 != 0) continue;
    int rho = (n - k) / 2;
    if (rho < 1) continue;
    bigint backbones = bigint(2 * d) * detail::ipow(2 * d - 1, k - 1);
    for (int j = 1; j <= std::min(k + 1, rho); ++j) {
      total += backbones * detail::binomial(k + 1, j) * detail::binomial(rho - 1, j - 1) *
               detail::ipow(2 * (d - 1), j) * detail::ipow(2 * d - 1, rho - j);
    }
  }
  return total;
}

namespace detail {

// Allowed first letters of a decoration at backbone site i: everything
// except the backbone's two directions there. At the two ends the
// missing direction is replaced by the straight continuation, keeping
// exactly 2(d-1) choices per site as in the counting sum.
inline std::vector<Letter> decoration_first_letters(const std::vector<Letter>& backbone, int site,
                                                    int d) {
  std::uint8_t f1, f2;
  int k = static_cast<int>(backbone.size());
  if (site == 0) {
    f1 = backbone.front().index;
    f2 = inverse(backbone.front(), d).index;
  } else if (site == k) {
    f1 = backbone.back().index;
    f2 = inverse(backbone.back(), d).index;
  } else {
    f1 = backbone[static_cast<std::size_t>(site)].index;  // toward next site
    f2 = inverse(backbone[static_cast<std::size_t>(site) - 1], d).index;  // toward previous
  }
  std::vector<Letter> out;
  for (int i = 0; i < 2 * d; ++i)
    if (i != f1 && i != f2) out.push_back(Letter{static_cast<std::uint8_t>(i)});
  return out;
}

}  // namespace detail

// Renders every configuration counted by decorated_path_census as an
// explicit letter sequence: the SAW backbone with each decoration run
// out and back in sequence at its site. Tree semantics.
inline std::vector<std::vector<Letter>> render_decorated_paths(int d, int n) {
  if (n < 3) throw std::invalid_argument("render_decorated_paths: n must be >= 3");
  std::vector<std::vector<Letter>> out;
  int m = 2 * d;

  // all non-backtracking letter sequences of length k
  auto backbones = [&](int k) {
    std::vector<std::vector<Letter>> bs;
    std::vector<Letter> cur;
    auto rec = [&](auto&& self) -> void {
      if (static_cast<int>(cur.size()) == k) {
        bs.push_back(cur);
        return;
      }
      for (int i = 0; i < m; ++i) {
        Letter l{static_cast<std::uint8_t>(i)};
        if (!cur.empty() && l == inverse(cur.back(), d)) continue;
        cur.push_back(l);
        self(self);
        cur.pop_back();
      }
    };
    rec(rec);
    return bs;
  };

  // decorations: first letter from the allowed set, then non-backtracking
  auto decorations = [&](const std::vector<Letter>& firsts, int r) {
    std::vector<std::vector<Letter>> ds;
    std::vector<Letter> cur;
    auto rec = [&](auto&& self) -> void {
      if (static_cast<int>(cur.size()) == r) {
        ds.push_back(cur);
        return;
      }
      if (cur.empty()) {
        for (Letter l : firsts) {
          cur.push_back(l);
          self(self);
          cur.pop_back();
        }
      } else {
        for (int i = 0; i < m; ++i) {
          Letter l{static_cast<std::uint8_t>(i)};
          if (l == inverse(cur.back(), d)) continue;
          cur.push_back(l);
          self(self);
          cur.pop_back();
        }
      }
    };
    rec(rec);
    return ds;
  };

  for (int k = 1; k + 2 <= n; ++k) {
    if ((n - k) % 2 != 0) continue;
    int rho = (n - k) / 2;
    if (rho < 1) continue;
    for (const auto& backbone : backbones(k)) {
      for (int j = 1; j <= std::min(k + 1, rho); ++j) {
        // site subsets of size j among the k+1 backbone sites
        std::vector<int> sites(static_cast<std::size_t>(j));
        auto choose_sites = [&](auto&& self, int from, int picked) -> void {
          if (picked == j) {
            // compositions of rho into j positive parts
            std::vector<int> parts(static_cast<std::size_t>(j));
            auto compose = [&](auto&& cself, int idx, int remaining) -> void {
              if (idx == j - 1) {
                parts[static_cast<std::size_t>(idx)] = remaining;
                // choose each decoration independently
                std::vector<std::vector<std::vector<Letter>>> site_decos(
                    static_cast<std::size_t>(j));
                for (int i = 0; i < j; ++i)
                  site_decos[static_cast<std::size_t>(i)] = decorations(
                      detail::decoration_first_letters(backbone, sites[static_cast<std::size_t>(i)], d),
                      parts[static_cast<std::size_t>(i)]);
                std::vector<std::size_t> pick(static_cast<std::size_t>(j), 0);
                auto emit = [&](auto&& eself, int idx2) -> void {
                  if (idx2 == j) {
                    std::vector<Letter> path;
                    path.reserve(static_cast<std::size_t>(n));
                    int next_site = 0;
                    for (int site = 0; site <= k; ++site) {
                      if (next_site < j && sites[static_cast<std::size_t>(next_site)] == site) {
                        const auto& deco =
                            site_decos[static_cast<std::size_t>(next_site)]
                                      [pick[static_cast<std::size_t>(next_site)]];
                        for (Letter l : deco) path.push_back(l);
                        for (auto it = deco.rbegin(); it != deco.rend(); ++it)
                          path.push_back(inverse(*it, d));
                        ++next_site;
                      }
                      if (site < k) path.push_back(backbone[static_cast<std::size_t>(site)]);
                    }
                    out.push_back(std::move(path));
                    return;
                  }
                  for (pick[static_cast<std::size_t>(idx2)] = 0;
                       pick[static_cast<std::size_t>(idx2)] <
                       site_decos[static_cast<std::size_t>(idx2)].size();
                       ++pick[static_cast<std::size_t>(idx2)])
                    eself(eself, idx2 + 1);
                };
                emit(emit, 0);
                return;
              }
              for (int p = 1; p <= remaining - (j - 1 - idx); ++p) {
                parts[static_cast<std::size_t>(idx)] = p;
                cself(cself, idx + 1, remaining - p);
              }
            };
            compose(compose, 0, rho);
            return;
          }
          for (int s = from; s <= k; ++s) {
            sites[static_cast<std::size_t>(picked)] = s;
            self(self, s + 1, picked + 1);
          }
        };
        choose_sites(choose_sites, 0, 0);
      }
    }
  }
  return out;
}

struct LiftCheck {
  bigint lhs;  // # SAW_n in Z^d ending on the hyperplane {x_1 = L}
  bigint rhs;  // binom(n,|L|) * # SAW_{n-|L|} in Z^{d-1}
};

// Exact check of the dimensional lifting inequality lhs >= rhs.
inline LiftCheck lattice_lift_check(int d, int n, int L,
                                    std::uint64_t budget = kDefaultEnumerationBudget) {
  if (d < 2) throw std::invalid_argument("lattice_lift_check: d must be >= 2");
  if (std::abs(L) > n) throw std::invalid_argument("lattice_lift_check: |L| must be <= n");
  LiftCheck c;
  std::uint64_t lhs = 0;
  enumerate_saws(
      Graph::lattice(d), n,
      [&](int len, const Vertex& end, const std::vector<Letter>&) {
        if (len == n && end.data()[0] == L) ++lhs;
      },
      budget);
  if (n == 0 && L == 0) lhs = 1;
  c.lhs = lhs;
  c.rhs = detail::binomial(n, std::abs(L)) *
          bigint(saw_count(Graph::lattice(d - 1), n - std::abs(L), budget));
  return c;
}

// Report-only l^infty bound: alpha_c(inf) <= ln(2d - mu(d-1)) for a
// user-supplied estimate of the connective constant mu(d-1).
inline double linf_alpha_bound(int d, double mu_lower_dim) {
  double arg = 2.0 * d - mu_lower_dim;
  if (arg <= 0) throw std::invalid_argument("linf_alpha_bound: 2d - mu must be positive");
  return std::log(arg);
}

}  // namespace brqw
