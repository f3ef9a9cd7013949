#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "brqw/graph.hpp"

namespace brqw {

// A skeleton matrix C in U(2d) in the ordered basis
// {a_1,...,a_d, a_1^{-1},...,a_d^{-1}} (row tau, column sigma).
// Balanced skeletons have |C_{tau,sigma}| = 1/sqrt(2d) for every entry.
class SkeletonMatrix {
public:
  static constexpr double kUnitarityTol = 1e-12;

  // C^b_{j,k} = e^{-i pi j k / d} / sqrt(2d), j,k in {0,...,2d-1}.
  static SkeletonMatrix fourier(int d) {
    require_dim(d);
    int m = 2 * d;
    std::vector<std::complex<double>> e(static_cast<std::size_t>(m) * m);
    double s = 1.0 / std::sqrt(static_cast<double>(m));
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        double theta = -std::numbers::pi * j * k / d;
        e[idx(j, k, m)] = std::polar(s, theta);
      }
    return SkeletonMatrix(d, std::move(e));
  }

  // Real Hadamard skeleton, entries +-1/sqrt(2d).
  // d = 2 is the matrix with -1 on the diagonal and +1 elsewhere; other
  // powers of two use the Sylvester construction (d = 1 gives
  // [[1,1],[1,-1]]/sqrt(2)). Other sizes are rejected.
  static SkeletonMatrix hadamard(int d) {
    require_dim(d);
    if ((d & (d - 1)) != 0)
      throw std::invalid_argument("hadamard coin: d must be a power of two, got d=" +
                                  std::to_string(d));
    int m = 2 * d;
    std::vector<int> sign(static_cast<std::size_t>(m) * m, 1);
    if (d == 2) {
      for (int j = 0; j < m; ++j) sign[idx(j, j, m)] = -1;
    } else {
      // Sylvester: H_{2n} = [[H_n, H_n], [H_n, -H_n]] starting from H_1 = [1].
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          int bits = j & k;
          int parity = 0;
          while (bits) {
            parity ^= (bits & 1);
            bits >>= 1;
          }
          sign[idx(j, k, m)] = parity ? -1 : 1;
        }
    }
    std::vector<std::complex<double>> e(static_cast<std::size_t>(m) * m);
    double s = 1.0 / std::sqrt(static_cast<double>(m));
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = sign[i] * s;
    return SkeletonMatrix(d, std::move(e));
  }

  // Arbitrary entries, row-major 2d x 2d; unitarity is validated.
  static SkeletonMatrix from_entries(int d, std::vector<std::complex<double>> entries) {
    require_dim(d);
    if (entries.size() != static_cast<std::size_t>(4 * d * d))
      throw std::invalid_argument("from_entries: expected a 2d x 2d matrix");
    return SkeletonMatrix(d, std::move(entries));
  }

  int dim() const { return d_; }
  int size() const { return 2 * d_; }

  std::complex<double> entry(Letter row, Letter col) const {
    return e_[idx(row.index, col.index, 2 * d_)];
  }
  std::complex<double> entry(int row, int col) const { return e_[idx(row, col, 2 * d_)]; }

  bool balanced() const { return balanced_; }

  // True when every entry is exactly +-1/sqrt(2d); class amplitudes can
  // then be tracked as signed integers.
  bool sign_exact() const { return sign_exact_; }
  int sign(Letter row, Letter col) const {
    return e_[idx(row.index, col.index, 2 * d_)].real() > 0 ? 1 : -1;
  }

  // alpha_{tau,sigma} with C_{tau,sigma} = e^{i alpha}/sqrt(2d),
  // principal value in (-pi, pi].
  double phase(Letter row, Letter col) const {
    if (!balanced_) throw std::invalid_argument("phase: skeleton is not balanced");
    return std::arg(entry(row, col));
  }

  double unitarity_residual() const {
    int m = 2 * d_;
    double worst = 0;
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        std::complex<double> s = 0;
        for (int l = 0; l < m; ++l) s += e_[idx(j, l, m)] * std::conj(e_[idx(k, l, m)]);
        if (j == k) s -= 1.0;
        worst = std::max(worst, std::abs(s));
      }
    return worst;
  }

  double balance_residual() const {
    double target = 1.0 / std::sqrt(static_cast<double>(2 * d_));
    double worst = 0;
    for (const auto& z : e_) worst = std::max(worst, std::abs(std::abs(z) - target));
    return worst;
  }

private:
  SkeletonMatrix(int d, std::vector<std::complex<double>> e) : d_(d), e_(std::move(e)) {
    if (unitarity_residual() > kUnitarityTol)
      throw std::invalid_argument("skeleton matrix is not unitary (residual " +
                                  std::to_string(unitarity_residual()) + ")");
    balanced_ = balance_residual() < kUnitarityTol;
    sign_exact_ = balanced_;
    if (sign_exact_) {
      double s = 1.0 / std::sqrt(static_cast<double>(2 * d_));
      for (const auto& z : e_) {
        if (std::abs(z.imag()) > 0 || (z.real() != s && z.real() != -s)) {
          sign_exact_ = false;
          break;
        }
      }
    }
  }

  static void require_dim(int d) {
    if (d < 1) throw std::invalid_argument("skeleton: d must be >= 1");
  }
  static std::size_t idx(int r, int c, int m) {
    return static_cast<std::size_t>(r) * m + c;
  }

  int d_;
  std::vector<std::complex<double>> e_;
  bool balanced_{false};
  bool sign_exact_{false};
};

}  // namespace brqw
