#include <doctest.h>

#include <map>
#include <vector>

#include "brqw/dynamics.hpp"

using namespace brqw;

TEST_CASE("one step from the origin spreads probability 1/(2d) per neighbour") {
  for (int d : {1, 2}) {
    Graph g = Graph::lattice(d);
    SkeletonMatrix c = SkeletonMatrix::fourier(d);
    DisorderRealization omega(123);
    WalkState psi = apply_U(WalkState::initial(g, Letter{0}), c, omega);
    CHECK(psi.support_size() == static_cast<std::size_t>(2 * d));
    for (const auto& [k, a] : psi.amplitudes()) {
      CHECK(std::norm(a) == doctest::Approx(1.0 / (2 * d)).epsilon(1e-12));
      // the coin letter equals the step just taken
      CHECK(g.step(g.origin(), k.coin) == k.site);
    }
  }
}

TEST_CASE("zero disorder matches the deterministic walk") {
  Graph g = Graph::lattice(2);
  SkeletonMatrix c = SkeletonMatrix::hadamard(2);
  WalkState a = WalkState::initial(g, Letter{0});
  WalkState b = WalkState::initial(g, Letter{0});
  DisorderRealization zero = DisorderRealization::zero();
  for (int step = 0; step < 6; ++step) {
    a = apply_U(a, c, zero);
    // manual deterministic step as an oracle
    WalkState next(g);
    for (const auto& [k, amp] : b.amplitudes())
      for (int t = 0; t < 4; ++t) {
        Letter tau{static_cast<std::uint8_t>(t)};
        next.amplitudes()[WalkState::Key{g.step(k.site, tau), tau}] +=
            c.entry(tau, k.coin) * amp;
      }
    b = std::move(next);
    for (const auto& [k, amp] : b.amplitudes())
      CHECK(std::abs(a.amplitudes().at(k) - amp) < 1e-13);
  }
}

TEST_CASE("sparse evolution matches a dense matrix oracle") {
  Graph g = Graph::lattice(2);
  SkeletonMatrix c = SkeletonMatrix::fourier(2);
  DisorderRealization omega(987654321);
  int n = 4;
  // basis: all (site, coin) with |site|_1 <= n+1
  std::map<std::pair<std::vector<std::int32_t>, int>, std::size_t> index;
  std::vector<WalkState::Key> basis;
  int R = n + 1;
  for (int x = -R; x <= R; ++x)
    for (int y = -R; y <= R; ++y) {
      if (std::abs(x) + std::abs(y) > R) continue;
      for (int t = 0; t < 4; ++t) {
        Vertex v = Vertex::lattice({x, y});
        index[{v.data(), t}] = basis.size();
        basis.push_back(WalkState::Key{v, Letter{static_cast<std::uint8_t>(t)}});
      }
    }
  std::size_t N = basis.size();
  std::vector<std::complex<double>> U(N * N, 0.0);
  for (std::size_t col = 0; col < N; ++col) {
    const auto& k = basis[col];
    if (g.norm(k.site, NormKind::L1) >= R) continue;  // stays inside the box for n steps
    for (int t = 0; t < 4; ++t) {
      Letter tau{static_cast<std::uint8_t>(t)};
      Vertex yv = g.step(k.site, tau);
      std::size_t row = index.at({yv.data(), t});
      U[row * N + col] = c.entry(tau, k.coin) * std::polar(1.0, omega.phase(yv, k.site));
    }
  }
  std::vector<std::complex<double>> vec(N, 0.0);
  vec[index.at({g.origin().data(), 0})] = 1.0;
  WalkState psi = WalkState::initial(g, Letter{0});
  for (int step = 0; step < n; ++step) {
    psi = apply_U(psi, c, omega);
    std::vector<std::complex<double>> next(N, 0.0);
    for (std::size_t r = 0; r < N; ++r)
      for (std::size_t col = 0; col < N; ++col) next[r] += U[r * N + col] * vec[col];
    vec = std::move(next);
  }
  for (std::size_t i = 0; i < N; ++i) {
    auto it = psi.amplitudes().find(basis[i]);
    std::complex<double> sparse = it == psi.amplitudes().end() ? 0.0 : it->second;
    CHECK(std::abs(sparse - vec[i]) < 1e-10);
  }
}

TEST_CASE("norm is conserved and support stays in the light cone") {
  for (GraphKind kind : {GraphKind::Lattice, GraphKind::Tree}) {
    Graph g(kind, 2);
    SkeletonMatrix c = SkeletonMatrix::fourier(2);
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL, 6ULL, 7ULL, 8ULL, 9ULL, 10ULL}) {
      DisorderRealization omega(seed);
      WalkState psi = WalkState::initial(g, Letter{2});
      int n_max = kind == GraphKind::Lattice ? 50 : 12;
      for (int n = 1; n <= n_max; ++n) {
        psi = apply_U(psi, c, omega);
        if (n % 10 == 0 || n == n_max) {
          CHECK(psi.norm_sq() == doctest::Approx(1.0).epsilon(1e-10));
          for (const auto& [k, a] : psi.amplitudes())
            CHECK(g.norm(k.site, g.default_norm()) <= n + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("exponential moment identities") {
  Graph g = Graph::lattice(2);
  SkeletonMatrix c = SkeletonMatrix::hadamard(2);
  DisorderRealization omega(5);
  WalkState psi = WalkState::initial(g, Letter{0});
  for (int n = 0; n < 5; ++n) {
    // alpha = 0 gives the norm, which is 1
    CHECK(exponential_moment(psi, 0.0, NormKind::L1) == doctest::Approx(1.0).epsilon(1e-12));
    psi = apply_U(psi, c, omega);
  }
  // after one step every site has |x| = 1, so the moment is exactly e^alpha
  WalkState one = apply_U(WalkState::initial(g, Letter{0}), c, omega);
  for (double a : {0.0, 0.3, 1.0})
    CHECK(exponential_moment(one, a, NormKind::L1) == doctest::Approx(std::exp(a)).epsilon(1e-12));
}

TEST_CASE("monte carlo: n=1 is deterministic, alpha=0 has zero variance") {
  Graph g = Graph::lattice(2);
  SkeletonMatrix c = SkeletonMatrix::fourier(2);
  McResult r1 = mc_expectation(g, c, Letter{0}, 1, 0.4, NormKind::L1, 16, 99);
  CHECK(r1.mean == doctest::Approx(std::exp(0.4)).epsilon(1e-12));
  CHECK(r1.stderr_ < 1e-13);
  McResult r0 = mc_expectation(g, c, Letter{0}, 5, 0.0, NormKind::L1, 16, 99);
  CHECK(r0.mean == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r0.stderr_ < 1e-10);
  CHECK(r0.samples == 16);
}

TEST_CASE("monte carlo results are bit-identical across worker counts") {
  Graph g = Graph::tree(2);
  SkeletonMatrix c = SkeletonMatrix::fourier(2);
  McResult a = mc_expectation(g, c, Letter{1}, 6, 0.25, NormKind::TreeDepth, 32, 4242, 1);
  McResult b = mc_expectation(g, c, Letter{1}, 6, 0.25, NormKind::TreeDepth, 32, 4242, 4);
  McResult e = mc_expectation(g, c, Letter{1}, 6, 0.25, NormKind::TreeDepth, 32, 4242, 8);
  CHECK(a.mean == b.mean);
  CHECK(a.stderr_ == b.stderr_);
  CHECK(a.mean == e.mean);
  CHECK(a.stderr_ == e.stderr_);
}

TEST_CASE("grid evaluation agrees with per-cell calls") {
  Graph g = Graph::lattice(2);
  SkeletonMatrix c = SkeletonMatrix::hadamard(2);
  std::vector<double> alphas{0.0, 0.2, 0.5};
  auto grid = mc_expectation_grid(g, c, Letter{0}, 4, alphas, NormKind::L1, 24, 777, 4);
  REQUIRE(grid.size() == 4);
  for (int n = 1; n <= 4; ++n)
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      McResult cell = grid[static_cast<std::size_t>(n - 1)][j];
      McResult solo = mc_expectation(g, c, Letter{0}, n, alphas[j], NormKind::L1, 24, 777);
      CHECK(cell.mean == doctest::Approx(solo.mean).epsilon(1e-14));
      CHECK(cell.stderr_ == doctest::Approx(solo.stderr_).epsilon(1e-12));
    }
}

TEST_CASE("guards: sample size and node budget") {
  Graph g = Graph::lattice(2);
  SkeletonMatrix c = SkeletonMatrix::hadamard(2);
  CHECK_THROWS_AS(mc_expectation(g, c, Letter{0}, 2, 0.1, NormKind::L1, 1, 1),
                  std::invalid_argument);
  DisorderRealization omega(1);
  WalkState psi = WalkState::initial(g, Letter{0});
  psi = apply_U(psi, c, omega);
  psi = apply_U(psi, c, omega);
  CHECK_THROWS_AS(apply_U(psi, c, omega, 4), BudgetExceeded);
}
