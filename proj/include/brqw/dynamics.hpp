#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <thread>
#include <unordered_map>
#include <vector>

#include "brqw/coin.hpp"
#include "brqw/errors.hpp"
#include "brqw/graph.hpp"

namespace brqw {

inline constexpr std::uint64_t kDefaultNodeBudget = 10'000'000ULL;

// One realisation of the i.i.d. uniform phases, attached to oriented
// edges (arrival, departure). Phases are generated lazily by a keyed
// hash of (seed, canonical edge encoding): reproducible, thread-safe,
// no stored table.
class DisorderRealization {
public:
  explicit DisorderRealization(std::uint64_t seed) : seed_(seed), zero_(false) {}

  // The omega == 0 realisation, for which U_omega = U(C).
  static DisorderRealization zero() {
    DisorderRealization d(0);
    d.zero_ = true;
    return d;
  }

  std::uint64_t seed() const { return seed_; }
  bool is_zero() const { return zero_; }

  // Phase in [0, 2pi) on the oriented edge (arrival, departure).
  double phase(const Vertex& arrival, const Vertex& departure) const {
    if (zero_) return 0.0;
    std::uint64_t h = 0xCBF29CE484222325ULL;
    h = hash_vertex(arrival, h);
    h = detail::fnv1a("|", 1, h);
    h = hash_vertex(departure, h);
    h = detail::splitmix64(h ^ seed_);
    // top 53 bits -> [0,1)
    double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    return 2.0 * std::numbers::pi * u;
  }

private:
  static std::uint64_t hash_vertex(const Vertex& v, std::uint64_t h) {
    const auto& d = v.data();
    std::uint64_t len = d.size();
    h = detail::fnv1a(&len, sizeof(len), h);
    return detail::fnv1a(d.data(), d.size() * sizeof(std::int32_t), h);
  }

  std::uint64_t seed_;
  bool zero_;
};

// Sparse wave function over the canonical basis (site, coin letter).
class WalkState {
public:
  struct Key {
    Vertex site;
    Letter coin;
    friend bool operator==(const Key& a, const Key& b) {
      return a.coin == b.coin && a.site == b.site;
    }
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return static_cast<std::size_t>(detail::splitmix64(k.site.hash() ^ (k.coin.index * 0x9E3779B97F4A7C15ULL)));
    }
  };
  using Map = std::unordered_map<Key, std::complex<double>, KeyHash>;

  explicit WalkState(Graph g) : graph_(g) {}

  // e tensor tau0
  static WalkState initial(Graph g, Letter tau0) {
    g.check_letter(tau0);
    WalkState s(g);
    s.amp_[Key{g.origin(), tau0}] = 1.0;
    return s;
  }

  const Graph& graph() const { return graph_; }
  const Map& amplitudes() const { return amp_; }
  Map& amplitudes() { return amp_; }
  std::size_t support_size() const { return amp_.size(); }

  double norm_sq() const {
    double s = 0;
    for (const auto& [k, a] : amp_) s += std::norm(a);
    return s;
  }

private:
  Graph graph_;
  Map amp_;
};

// One step of U_omega(C) = D_omega U(C): the amplitude at (x tau, tau)
// receives e^{i omega(x tau, x)} C_{tau sigma} times the amplitude at
// (x, sigma), summed over sigma.
inline WalkState apply_U(const WalkState& state, const SkeletonMatrix& coin,
                         const DisorderRealization& disorder,
                         std::uint64_t node_budget = kDefaultNodeBudget) {
  const Graph& g = state.graph();
  if (coin.dim() != g.d) throw std::invalid_argument("apply_U: coin dimension mismatch");
  WalkState out(g);
  auto& dst = out.amplitudes();
  dst.reserve(state.support_size() * 2);
  int m = g.alphabet_size();
  for (const auto& [key, amp] : state.amplitudes()) {
    for (int t = 0; t < m; ++t) {
      Letter tau{static_cast<std::uint8_t>(t)};
      Vertex y = g.step(key.site, tau);
      std::complex<double> coeff =
          coin.entry(tau, key.coin) * std::polar(1.0, disorder.phase(y, key.site));
      dst[WalkState::Key{std::move(y), tau}] += coeff * amp;
    }
    if (dst.size() > node_budget)
      throw BudgetExceeded("walk support exceeds node budget of " + std::to_string(node_budget));
  }
  return out;
}

// sum_{x,tau} e^{alpha |x|} |psi(x,tau)|^2
inline double exponential_moment(const WalkState& state, double alpha, NormKind nk) {
  const Graph& g = state.graph();
  double s = 0;
  for (const auto& [k, a] : state.amplitudes())
    s += std::exp(alpha * g.norm(k.site, nk)) * std::norm(a);
  return s;
}

struct McResult {
  double mean{0};
  double stderr_{0};
  std::uint64_t samples{0};
};

namespace detail {

inline std::uint64_t realization_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + 0x9E3779B97F4A7C15ULL * (index + 1));
}

inline McResult reduce_values(const std::vector<double>& values) {
  McResult r;
  r.samples = values.size();
  double sum = 0;
  for (double v : values) sum += v;
  r.mean = sum / static_cast<double>(values.size());
  double ss = 0;
  for (double v : values) ss += (v - r.mean) * (v - r.mean);
  r.stderr_ = std::sqrt(ss / (static_cast<double>(values.size()) - 1.0) /
                        static_cast<double>(values.size()));
  return r;
}

// Runs fn(m) for m in [0, M) across `workers` threads writing disjoint
// indices; the reduction order is by index, so results are independent
// of the schedule.
template <typename Fn>
void for_each_index(std::uint64_t M, std::size_t workers, Fn&& fn) {
  if (workers <= 1) {
    for (std::uint64_t m = 0; m < M; ++m) fn(m);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      for (std::uint64_t m = w; m < M; m += workers) fn(m);
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace detail

// Monte-Carlo estimate of E(S_n(alpha)) over M independent disorder
// realisations. Deterministic given (seed, M, n) for any worker count:
// per-realisation seeds are derived from the master seed by index and
// the reduction runs in index order.
inline McResult mc_expectation(const Graph& g, const SkeletonMatrix& coin, Letter tau0, int n,
                               double alpha, NormKind nk, std::uint64_t M, std::uint64_t seed,
                               std::size_t workers = 1,
                               std::uint64_t node_budget = kDefaultNodeBudget) {
  if (M < 2) throw std::invalid_argument("mc_expectation: M must be >= 2");
  std::vector<double> values(M);
  detail::for_each_index(M, workers, [&](std::uint64_t m) {
    DisorderRealization omega(detail::realization_seed(seed, m));
    WalkState psi = WalkState::initial(g, tau0);
    for (int step = 0; step < n; ++step) psi = apply_U(psi, coin, omega, node_budget);
    values[m] = exponential_moment(psi, alpha, nk);
  });
  return detail::reduce_values(values);
}

// Grid variant: one evolution per realisation serves every (n, alpha)
// cell with n <= n_max. Cell (i,j) of the result is step n = i+1 and
// alphas[j]. Same seed derivation as mc_expectation.
inline std::vector<std::vector<McResult>> mc_expectation_grid(
    const Graph& g, const SkeletonMatrix& coin, Letter tau0, int n_max,
    const std::vector<double>& alphas, NormKind nk, std::uint64_t M, std::uint64_t seed,
    std::size_t workers = 1, std::uint64_t node_budget = kDefaultNodeBudget) {
  if (M < 2) throw std::invalid_argument("mc_expectation_grid: M must be >= 2");
  if (n_max < 1) throw std::invalid_argument("mc_expectation_grid: n_max must be >= 1");
  std::size_t cells = static_cast<std::size_t>(n_max) * alphas.size();
  std::vector<double> values(cells * M);
  detail::for_each_index(M, workers, [&](std::uint64_t m) {
    DisorderRealization omega(detail::realization_seed(seed, m));
    WalkState psi = WalkState::initial(g, tau0);
    for (int step = 1; step <= n_max; ++step) {
      psi = apply_U(psi, coin, omega, node_budget);
      for (std::size_t j = 0; j < alphas.size(); ++j) {
        std::size_t cell = static_cast<std::size_t>(step - 1) * alphas.size() + j;
        values[cell * M + m] = exponential_moment(psi, alphas[j], nk);
      }
    }
  });
  std::vector<std::vector<McResult>> out(static_cast<std::size_t>(n_max));
  for (int i = 0; i < n_max; ++i) {
    out[static_cast<std::size_t>(i)].resize(alphas.size());
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      std::size_t cell = static_cast<std::size_t>(i) * alphas.size() + j;
      std::vector<double> v(values.begin() + static_cast<std::ptrdiff_t>(cell * M),
                            values.begin() + static_cast<std::ptrdiff_t>((cell + 1) * M));
      out[static_cast<std::size_t>(i)][j] = detail::reduce_values(v);
    }
  }
  return out;
}

}  // namespace brqw
