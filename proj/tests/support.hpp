// Deterministic random generators shared by the test suites.
#pragma once

#include <cstdint>
#include <random>

#include "negcalc/tensor.hpp"

namespace testsupport {

using negcalc::Index;
using negcalc::Matrix;
using negcalc::Vector;

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Matrix random_complex(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      m(i, j) = negcalc::Complex(dist(rng), dist(rng));
    }
  }
  return m;
}

inline Matrix random_hermitian(Index n, std::mt19937_64& rng) {
  Matrix g = random_complex(n, n, rng);
  return 0.5 * (g + g.adjoint()).eval();
}

// Hermitian with all |eigenvalue| above floor_ratio * max|eigenvalue|, so
// trace-norm derivatives are well defined and finite differences behave.
inline Matrix random_hermitian_nonsingular(Index n, std::mt19937_64& rng,
                                           double floor_ratio = 5e-2) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    Matrix a = random_hermitian(n, rng);
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    const double max_abs = es.eigenvalues().cwiseAbs().maxCoeff();
    const double min_abs = es.eigenvalues().cwiseAbs().minCoeff();
    if (min_abs > floor_ratio * max_abs) return a;
  }
  throw std::runtime_error("random_hermitian_nonsingular: no well-conditioned draw");
}

inline Matrix random_hermitian_traceless(Index n, std::mt19937_64& rng) {
  Matrix a = random_hermitian(n, rng);
  a -= (a.trace() / static_cast<double>(n)) * Matrix::Identity(n, n);
  return a;
}

inline Matrix random_density(Index n, std::mt19937_64& rng) {
  Matrix g = random_complex(n, n, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return rho;
}

inline Vector random_state(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = negcalc::Complex(dist(rng), dist(rng));
  return v / v.norm();
}

}  // namespace testsupport
