#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "brqw/graph.hpp"
#include "brqw/polymer.hpp"

namespace brqw {

// SAW two-point function G_alpha(z,x) = sum_n z^n #{SAW_n ending at x} e^{alpha|x|},
// exact partial sum up to n_max. On the tree the series is exact already
// at n = |x| (there is a unique SAW from the root to x).
inline SeriesEstimate two_point(const Graph& g, double z, const Vertex& x, double alpha,
                                int n_max, std::uint64_t budget = kDefaultEnumerationBudget) {
  if (z < 0) throw std::invalid_argument("two_point: z must be >= 0");
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n_max) + 1, 0);
  if (x == g.origin()) counts[0] = 1;
  enumerate_saws(
      g, n_max,
      [&](int len, const Vertex& end, const std::vector<Letter>&) {
        if (end == x) ++counts[static_cast<std::size_t>(len)];
      },
      budget);
  NormKind nk = g.default_norm();
  double w = std::exp(alpha * g.norm(x, nk));
  SeriesEstimate s;
  double term = 0;
  for (int n = 0; n <= n_max; ++n) {
    term = std::pow(z, n) * static_cast<double>(counts[static_cast<std::size_t>(n)]) * w;
    s.value += term;
  }
  s.truncation_order = n_max;
  s.last_term = term;
  s.monotone_nondecreasing = true;
  return s;
}

// Closed form of the tree two-point function, (z e^alpha)^{|x|}.
inline double tree_two_point(int /*d*/, double z, int depth, double alpha) {
  return std::pow(z * std::exp(alpha), depth);
}

// Plane generating function G_L(z): SAWs from the origin to {x_1 = L}.
inline SeriesEstimate plane_generating(int d, double z, int L, int n_max,
                                       std::uint64_t budget = kDefaultEnumerationBudget) {
  if (L < 1) throw std::invalid_argument("plane_generating: L must be >= 1");
  if (z < 0) throw std::invalid_argument("plane_generating: z must be >= 0");
  Graph g = Graph::lattice(d);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n_max) + 1, 0);
  enumerate_saws(
      g, n_max,
      [&](int len, const Vertex& end, const std::vector<Letter>&) {
        if (end.data()[0] == L) ++counts[static_cast<std::size_t>(len)];
      },
      budget);
  SeriesEstimate s;
  double term = 0;
  for (int n = 0; n <= n_max; ++n) {
    term = std::pow(z, n) * static_cast<double>(counts[static_cast<std::size_t>(n)]);
    s.value += term;
  }
  s.truncation_order = n_max;
  s.last_term = term;
  s.monotone_nondecreasing = true;
  return s;
}

struct MassEstimate {
  double z{0};
  int L_max{0};
  int n_max{0};
  std::vector<double> G_L;            // truncated G_L(z), L = 1..L_max
  std::vector<double> per_L;          // (-ln G_L^trunc)/L
  double sup_estimate{0};             // sup over L of per_L
  std::vector<bool> sandwich_ok;      // per-L check of the G_L sandwich
  bool truncation_overestimates{true};  // partial sums underestimate G_L, so
                                        // per_L overestimates (-ln G_L)/L
  bool caveat_small_d{false};         // d < 5: outside the well-controlled regime
};

// Truncated estimator of the mass m_d(z) = sup_L (-ln G_L(z))/L. The
// per-L values are exact functionals of partial sums, hence biased
// upward; the result is a diagnostic estimate, not a certified bound.
inline MassEstimate mass_estimate(int d, double z, int L_max, int n_max, double slack = 0.1,
                                  std::uint64_t budget = kDefaultEnumerationBudget) {
  if (z <= 0) throw std::invalid_argument("mass_estimate: z must be > 0");
  if (L_max < 1) throw std::invalid_argument("mass_estimate: L_max must be >= 1");
  Graph g = Graph::lattice(d);
  // one enumeration pass for all L
  std::vector<std::vector<std::uint64_t>> counts(
      static_cast<std::size_t>(L_max) + 1,
      std::vector<std::uint64_t>(static_cast<std::size_t>(n_max) + 1, 0));
  std::vector<std::uint64_t> total(static_cast<std::size_t>(n_max) + 1, 0);
  total[0] = 1;
  enumerate_saws(
      g, n_max,
      [&](int len, const Vertex& end, const std::vector<Letter>&) {
        ++total[static_cast<std::size_t>(len)];
        std::int32_t c = end.data()[0];
        if (c >= 1 && c <= L_max) ++counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(len)];
      },
      budget);

  MassEstimate e;
  e.z = z;
  e.L_max = L_max;
  e.n_max = n_max;
  e.caveat_small_d = d < 5;
  double chi0 = 0;
  for (int n = 0; n <= n_max; ++n)
    chi0 += std::pow(z, n) * static_cast<double>(total[static_cast<std::size_t>(n)]);
  for (int L = 1; L <= L_max; ++L) {
    double gl = 0;
    for (int n = 0; n <= n_max; ++n)
      gl += std::pow(z, n) * static_cast<double>(counts[static_cast<std::size_t>(L)][static_cast<std::size_t>(n)]);
    e.G_L.push_back(gl);
    e.per_L.push_back(-std::log(gl) / L);
  }
  e.sup_estimate = *std::max_element(e.per_L.begin(), e.per_L.end());
  for (int L = 1; L <= L_max; ++L) {
    double gl = e.G_L[static_cast<std::size_t>(L - 1)];
    bool lower_ok = std::exp(-e.sup_estimate * L) <= gl * (1.0 + 1e-12);
    bool upper_ok = gl <= chi0 * chi0 * std::exp(-e.sup_estimate * L * (1.0 - slack)) * (1.0 + 1e-12);
    e.sandwich_ok.push_back(lower_ok && upper_ok);
  }
  return e;
}

struct LocalisationLengthBound {
  double mass_hat{0};          // truncated mass estimate at z = 1/(2d)
  double xi_hat{0};            // 1/mass_hat
  double L_bound{0};           // = xi_hat (diagnostic, not certified)
  double unconditional{0};     // 1/ln(2), valid for every d
  bool caveat_small_d{false};
};

// Correlation-length route to the localisation length: xi_d(1/(2d)),
// estimated by truncation, reported next to the unconditional 1/ln(2).
inline LocalisationLengthBound localisation_length_bound(int d, int L_max, int n_max,
                                                         std::uint64_t budget = kDefaultEnumerationBudget) {
  if (d < 2) throw std::invalid_argument("localisation_length_bound: d must be >= 2");
  LocalisationLengthBound b;
  MassEstimate m = mass_estimate(d, 1.0 / (2.0 * d), L_max, n_max, 0.1, budget);
  b.mass_hat = m.sup_estimate;
  b.xi_hat = 1.0 / m.sup_estimate;
  b.L_bound = b.xi_hat;
  b.unconditional = 1.0 / std::log(2.0);
  b.caveat_small_d = m.caveat_small_d;
  return b;
}

}  // namespace brqw
