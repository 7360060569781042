// Independent brute-force ground truth: eigensum negativity, central finite
// differences with Richardson refinement, and rank/spectrum probes.
//
// Deliberately self-contained: nothing here may share code with the
// trace-norm derivative path it is used to check.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "negcalc/errors.hpp"
#include "negcalc/tensor.hpp"

namespace negcalc::oracle {

// Central-difference scheme: strictly decreasing step sizes, derivative order
// 1..4, optional Richardson refinement across the steps.
struct FdScheme {
  std::vector<double> steps;
  int order = 1;
  bool richardson = true;

  void validate() const {
    if (order < 1 || order > 4) throw std::invalid_argument("FdScheme: order 1..4");
    if (steps.empty()) throw std::invalid_argument("FdScheme: no steps");
    const double floor =
        10.0 * std::pow(std::numeric_limits<double>::epsilon(),
                        1.0 / static_cast<double>(order + 1));
    double prev = std::numeric_limits<double>::infinity();
    for (double h : steps) {
      if (!(h < prev)) throw std::invalid_argument("FdScheme: steps must decrease");
      if (!(h > floor)) {
        throw std::invalid_argument("FdScheme: step below cancellation floor");
      }
      prev = h;
    }
  }

  static FdScheme central(int order) {
    switch (order) {
      case 1: return {{1e-4, 1e-5, 1e-6}, 1, true};
      case 2: return {{1e-3, 1e-4}, 2, true};
      case 3: return {{1e-2, 5e-3, 2.5e-3}, 3, true};
      default: return {{2e-2, 1e-2}, 4, true};
    }
  }
};

struct FdResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

namespace detail {

// Raw central-difference stencils, all with O(h^2) truncation error so one
// Richardson tableau in h^2 covers every order.
inline double stencil(const std::function<double(double)>& f, double x, double h,
                      int order) {
  switch (order) {
    case 1:
      return (f(x + h) - f(x - h)) / (2.0 * h);
    case 2:
      return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    case 3:
      return (f(x + 2 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2 * h)) /
             (2.0 * h * h * h);
    default:
      return (f(x + 2 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h) +
              f(x - 2 * h)) /
             (h * h * h * h);
  }
}

inline double stencil_weight_sum(int order) {
  switch (order) {
    case 1: return 1.0;   // (1+1)/2
    case 2: return 4.0;   // 1+2+1
    case 3: return 3.0;   // (1+2+2+1)/2
    default: return 16.0;
  }
}

}  // namespace detail

inline FdResult fd_scalar(const std::function<double(double)>& f, double x0,
                          const FdScheme& scheme) {
  scheme.validate();
  const std::size_t m = scheme.steps.size();
  std::vector<double> raw(m);
  double f_scale = std::abs(f(x0));
  for (std::size_t i = 0; i < m; ++i) {
    raw[i] = detail::stencil(f, x0, scheme.steps[i], scheme.order);
    f_scale = std::max(f_scale, std::abs(f(x0 + scheme.steps[i])));
    if (!std::isfinite(raw[i])) {
      throw std::runtime_error("fd_scalar: non-finite sample");
    }
  }

  const double h_min = scheme.steps.back();
  const double round_off = 4.0 * detail::stencil_weight_sum(scheme.order) *
                           std::numeric_limits<double>::epsilon() *
                           std::max(1.0, f_scale) /
                           std::pow(h_min, scheme.order);

  FdResult out;
  if (!scheme.richardson || m == 1) {
    out.value = raw.back();
    const double spread = (m >= 2) ? std::abs(raw[m - 1] - raw[m - 2])
                                   : std::abs(raw[0]);
    out.error_estimate = spread + round_off;
    return out;
  }

  // Neville tableau in powers of h^2 (truncation errors are even in h).
  std::vector<std::vector<double>> t(m);
  for (std::size_t i = 0; i < m; ++i) {
    t[i].resize(i + 1);
    t[i][0] = raw[i];
    for (std::size_t j = 1; j <= i; ++j) {
      const double ratio = scheme.steps[i - j] / scheme.steps[i];
      const double r2j = std::pow(ratio * ratio, static_cast<double>(j));
      t[i][j] = t[i][j - 1] + (t[i][j - 1] - t[i - 1][j - 1]) / (r2j - 1.0);
    }
  }
  out.value = t[m - 1][m - 1];
  const double spread = std::abs(t[m - 1][m - 1] - t[m - 1][m - 2]);
  out.error_estimate = 2.0 * spread + round_off;
  return out;
}

// n-th derivative of s -> g(A + sV) at s = 0.
inline FdResult fd_directional(const Matrix& a, const Matrix& v,
                               const std::function<double(const Matrix&)>& g,
                               int order, const FdScheme& scheme) {
  FdScheme s = scheme;
  s.order = order;
  return fd_scalar([&](double t) { return g((a + t * v).eval()); }, 0.0, s);
}

// Negativity as the plain eigensum over the negative spectrum of rho^{T_B}.
inline double negativity_eigensum(const Matrix& rho_tb) {
  if (rho_tb.rows() != rho_tb.cols()) {
    throw std::invalid_argument("negativity_eigensum: not square");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho_tb);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("negativity_eigensum: eigensolver failed");
  }
  double out = 0.0;
  for (Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double lam = solver.eigenvalues()(i);
    if (lam < 0.0) out -= lam;
  }
  return out;
}

// Number of Schmidt coefficients of |psi> above the rank cutoff, i.e. the
// rank of the d_A x d_B coefficient matrix psi[a*d_B + b].
inline Index schmidt_rank(const Vector& psi, BipartiteDims dims,
                          double cutoff = 1e-10) {
  dims.validate();
  if (psi.size() != dims.total()) {
    throw std::invalid_argument("schmidt_rank: length does not equal d_A*d_B");
  }
  Matrix coeff(dims.d_A, dims.d_B);
  for (Index a = 0; a < dims.d_A; ++a)
    for (Index b = 0; b < dims.d_B; ++b) coeff(a, b) = psi(a * dims.d_B + b);
  const RealVector sv = Eigen::JacobiSVD<Matrix>(coeff).singularValues();
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) rank += sv(i) > cutoff ? 1 : 0;
  return rank;
}

// Rank of a Hermitian matrix counted over |eigenvalue| > cutoff.
inline Index hermitian_rank(const Matrix& a, double cutoff = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  Index rank = 0;
  for (Index i = 0; i < solver.eigenvalues().size(); ++i) {
    rank += std::abs(solver.eigenvalues()(i)) > cutoff ? 1 : 0;
  }
  return rank;
}

}  // namespace negcalc::oracle
