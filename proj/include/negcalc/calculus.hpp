// Derivatives of the trace norm: matrix absolute value and sign, unpatterned
// Wirtinger Jacobians and Hessians, their Hermitian-patterned counterparts,
// and the iterative n-th-order directional differential scheme.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "negcalc/errors.hpp"
#include "negcalc/tensor.hpp"

namespace negcalc {

using RowVector = Eigen::RowVectorXcd;

// Hermiticity deviation accepted before an argument is rejected, relative to
// max(1, largest entry magnitude).
inline constexpr double kHermitianTol = 1e-10;

// An argument counts as singular when min|eigenvalue| <= tol * max(1,
// max|eigenvalue|). Derivative operations refuse at singular arguments
// rather than regularize.
inline constexpr double kSingularityTol = 1e-8;

inline void require_hermitian(const Matrix& a, const char* what,
                              double tol = kHermitianTol) {
  if (a.rows() != a.cols()) {
    throw PatternViolationError(std::string(what) + ": matrix is not square");
  }
  const double dev = (a - a.adjoint()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (dev > tol * scale) {
    throw PatternViolationError(std::string(what) +
                                ": matrix is not Hermitian within tolerance");
  }
}

// Eigendecomposition of a Hermitian matrix with eigenvalues in decreasing
// order (index-stable, so results are reproducible across runs).
struct EigDecomp {
  Matrix U;
  RealVector eigenvalues;

  Index n() const noexcept { return eigenvalues.size(); }

  Matrix reconstruct() const {
    return U * eigenvalues.asDiagonal() * U.adjoint();
  }

  double min_abs_eigenvalue() const { return eigenvalues.cwiseAbs().minCoeff(); }
  double max_abs_eigenvalue() const { return eigenvalues.cwiseAbs().maxCoeff(); }

  bool invertible(double tol = kSingularityTol) const {
    return min_abs_eigenvalue() > tol * std::max(1.0, max_abs_eigenvalue());
  }

  void require_invertible(const char* what, double tol = kSingularityTol) const {
    if (!invertible(tol)) {
      throw SingularMatrixError(
          std::string(what) + ": argument is singular within tolerance",
          min_abs_eigenvalue());
    }
  }

  // Exact +/-1 signs of the eigenvalues.
  RealVector signs() const {
    RealVector s(n());
    for (Index i = 0; i < n(); ++i) s(i) = eigenvalues(i) >= 0.0 ? 1.0 : -1.0;
    return s;
  }
};

inline EigDecomp hermitian_eig(const Matrix& a, double tol = kHermitianTol) {
  require_hermitian(a, "hermitian_eig", tol);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_eig: eigensolver failed");
  }
  EigDecomp out;
  out.U = solver.eigenvectors().rowwise().reverse();
  out.eigenvalues = solver.eigenvalues().reverse();
  return out;
}

// |A| = U |Lambda| U^dagger for Hermitian A.
inline Matrix matrix_abs(const EigDecomp& eig) {
  return eig.U * eig.eigenvalues.cwiseAbs().asDiagonal() * eig.U.adjoint();
}

inline Matrix matrix_abs(const Matrix& a) { return matrix_abs(hermitian_eig(a)); }

// sign(A) = U sign(Lambda) U^dagger, so that A = sign(A)|A|. Requires a
// nonsingular argument.
inline Matrix hermitian_sign(const EigDecomp& eig, double tol = kSingularityTol) {
  eig.require_invertible("hermitian_sign", tol);
  return eig.U * eig.signs().asDiagonal() * eig.U.adjoint();
}

inline Matrix hermitian_sign(const Matrix& a, double tol = kSingularityTol) {
  return hermitian_sign(hermitian_eig(a), tol);
}

// Trace norm ||X||_1 = Tr sqrt(X^dagger X), the sum of singular values.
inline double trace_norm(const Matrix& x) {
  return Eigen::JacobiSVD<Matrix>(x).singularValues().sum();
}

inline double trace_distance(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw std::invalid_argument("trace_distance: shape mismatch");
  }
  return 0.5 * trace_norm(rho - sigma);
}

namespace detail {

// |X| and |X|^{-1} for a general (invertible) complex matrix via SVD:
// X = W S V^dagger gives |X| = V S V^dagger.
struct AbsFactors {
  Matrix abs;
  Matrix inv_abs;
};

inline AbsFactors abs_factors(const Matrix& x, double tol, const char* what) {
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  const double min_sv = s(s.size() - 1);
  if (min_sv <= tol * std::max(1.0, s(0))) {
    throw SingularMatrixError(
        std::string(what) + ": argument is singular within tolerance", min_sv);
  }
  AbsFactors out;
  out.abs = svd.matrixV() * s.asDiagonal() * svd.matrixV().adjoint();
  out.inv_abs =
      svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixV().adjoint();
  return out;
}

inline double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

}  // namespace detail

// Wirtinger derivatives of ||X||_1 with respect to vec X and vec X^*:
//   D_X     = 1/2 vec^T[ X^* (|X|^{-1})^T ]
//   D_{X^*} = 1/2 vec^T[ (|X|^{-1})^T X^T ] K
struct WirtingerJacobian {
  RowVector d_x;
  RowVector d_xstar;
};

inline WirtingerJacobian trace_norm_jacobian_unpatterned(
    const Matrix& x, double tol = kSingularityTol) {
  if (x.rows() != x.cols()) {
    throw std::invalid_argument("trace_norm_jacobian_unpatterned: not square");
  }
  const auto f = detail::abs_factors(x, tol, "trace_norm_jacobian_unpatterned");
  const auto k = commutation_matrix(x.rows(), x.rows());
  WirtingerJacobian out;
  out.d_x = 0.5 * vec((x.conjugate() * f.inv_abs.transpose()).eval()).transpose();
  Vector pre = vec((f.inv_abs.transpose() * x.transpose()).eval());
  // right-multiplying a row vector by the (symmetric) commutation matrix
  out.d_xstar = 0.5 * k.apply(pre).transpose();
  return out;
}

// Jacobian of ||A||_1 with respect to a Hermitian argument:
// vec^T(U^* sign(Lambda) U^T), exactly twice the unpatterned derivative
// evaluated at A.
inline RowVector trace_norm_jacobian_hermitian(const EigDecomp& eig,
                                               double tol = kSingularityTol) {
  eig.require_invertible("trace_norm_jacobian_hermitian", tol);
  Matrix m = eig.U.conjugate() * eig.signs().asDiagonal() * eig.U.transpose();
  return vec(m).transpose();
}

inline RowVector trace_norm_jacobian_hermitian(const Matrix& a,
                                               double tol = kSingularityTol) {
  return trace_norm_jacobian_hermitian(hermitian_eig(a), tol);
}

// Hessian of ||A||_1 with respect to a Hermitian argument, spectral form:
//   K (U^* kron U) [1 - sign kron sign] (|Lambda| (+) |Lambda|)^{-1} (U^T kron U^dagger).
// The diagonal factor is assembled elementwise, so it vanishes identically on
// the positive cone and never requires a dense inversion.
inline Matrix trace_norm_hessian_hermitian(const EigDecomp& eig,
                                           double tol = kSingularityTol) {
  eig.require_invertible("trace_norm_hessian_hermitian", tol);
  const Index n = eig.n();
  const RealVector s = eig.signs();
  const RealVector abs = eig.eigenvalues.cwiseAbs();
  RealVector diag(n * n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      diag(i * n + j) = (1.0 - s(i) * s(j)) / (abs(i) + abs(j));
    }
  }
  Matrix w = kron(eig.U.conjugate(), eig.U);
  Matrix core = w * diag.asDiagonal() * w.adjoint();
  return commutation_matrix(n, n).apply_to_rows(core);
}

inline Matrix trace_norm_hessian_hermitian(const Matrix& a,
                                           double tol = kSingularityTol) {
  return trace_norm_hessian_hermitian(hermitian_eig(a), tol);
}

// Kronecker-sum form of the same Hessian,
//   1/2 K [ (|A|^{-1})_(+) - A_(+) (|A|_(+))^{-1} (|A|^{-1})_(+) (|A|_(+))^{-1} A_(+) ],
// with M_(+) = M^T kron 1 + 1 kron M. Dense and O(n^6); kept as the
// independent cross-check of the spectral form.
inline Matrix trace_norm_hessian_hermitian_kron(const Matrix& a,
                                                double tol = kSingularityTol) {
  const EigDecomp eig = hermitian_eig(a);
  eig.require_invertible("trace_norm_hessian_hermitian_kron", tol);
  const Index n = eig.n();
  const Matrix abs = matrix_abs(eig);
  const Matrix inv_abs = eig.U * eig.eigenvalues.cwiseAbs().cwiseInverse().asDiagonal() *
                         eig.U.adjoint();
  const Matrix a_op = kron_sum(a.transpose(), a);
  const Matrix abs_op = kron_sum(abs.transpose(), abs);
  const Matrix inv_abs_op = kron_sum(inv_abs.transpose(), inv_abs);
  Eigen::PartialPivLU<Matrix> lu(abs_op);
  Matrix inner = 0.5 * (inv_abs_op - a_op * lu.solve(inv_abs_op * lu.solve(a_op)));
  return commutation_matrix(n, n).apply_to_rows(inner);
}

// Second-differential coefficient matrices of ||X||_1 in the expansion
//   d^2 g = dvec^T X (B10) dvec X + dvec^T X^* (B00) dvec X
//         + dvec^T X (B11) dvec X^* + dvec^T X^* (B01) dvec X^*,
// obtained by inserting the Sylvester solution for dvec|X| into d^2||X||_1.
// Materialized only for testing; the production path is the spectral form.
struct TraceNormBMatrices {
  Matrix b00, b01, b10, b11;
};

inline TraceNormBMatrices trace_norm_b_matrices(const Matrix& x,
                                                double tol = kSingularityTol) {
  if (x.rows() != x.cols()) {
    throw std::invalid_argument("trace_norm_b_matrices: not square");
  }
  const Index n = x.rows();
  const auto f = detail::abs_factors(x, tol, "trace_norm_b_matrices");
  const Matrix id = Matrix::Identity(n, n);
  const Matrix kd = commutation_matrix(n, n).dense().cast<Complex>();
  const Matrix abs_op = kron_sum(f.abs.transpose(), f.abs);
  Eigen::PartialPivLU<Matrix> lu(abs_op);
  // dvec|X| = P dvec X + Q dvec X^*
  const Matrix p = lu.solve(kron(id, x.adjoint()));
  const Matrix q = lu.solve(kron(x.transpose(), id) * kd);
  const Matrix mid = kd * kron(id, f.inv_abs);
  TraceNormBMatrices out;
  out.b10 = -p.transpose() * mid * p;
  out.b00 = kron(f.inv_abs.transpose(), id) - q.transpose() * mid * p;
  out.b11 = -p.transpose() * mid * q;
  out.b01 = -q.transpose() * mid * q;
  return out;
}

// The four unpatterned Hessians of ||X||_1, symmetrized from the B matrices.
struct UnpatternedHessians {
  Matrix h_xx;            // H_{X,X}
  Matrix h_xstar_xstar;   // H_{X^*,X^*}
  Matrix h_x_xstar;       // H_{X,X^*}
  Matrix h_xstar_x;       // H_{X^*,X} = H_{X,X^*}^T
};

inline UnpatternedHessians trace_norm_hessians_unpatterned(
    const Matrix& x, double tol = kSingularityTol) {
  const auto b = trace_norm_b_matrices(x, tol);
  UnpatternedHessians out;
  out.h_xx = 0.5 * (b.b10 + b.b10.transpose().eval());
  out.h_xstar_xstar = 0.5 * (b.b01 + b.b01.transpose().eval());
  out.h_x_xstar = 0.5 * (b.b00 + b.b11.transpose().eval());
  out.h_xstar_x = out.h_x_xstar.transpose();
  return out;
}

// Hermitian-pattern assembly of the Hessian from the unpatterned pieces:
// H_{A,A} = H_{X,X} + K H_{X,X^*} + H_{X^*,X} K + K H_{X^*,X^*} K at X = A.
inline Matrix hermitian_hessian_from_unpatterned(const UnpatternedHessians& h) {
  const Index n2 = h.h_xx.rows();
  const Index n = static_cast<Index>(std::llround(std::sqrt(double(n2))));
  const Matrix kd = commutation_matrix(n, n).dense().cast<Complex>();
  return h.h_xx + kd * h.h_x_xstar + h.h_xstar_x * kd + kd * h.h_xstar_xstar * kd;
}

// Directional differentials d^k||A + sV||_1 / ds^k at s = 0 for k = 1..order,
// computed by solving |X| d^k|X| + d^k|X| |X| = C_k in the eigenbasis of A.
// C_1 = AV + VA and C_2 = 2V^2 - 2(d|X|)^2 follow from d(|X||X|) = d(X^dag X);
// for k >= 3, d^k(X^dag X) = 0 along a straight line, which gives
// C_k = -sum_{j=1}^{k-1} binom(k,j) d^j|X| d^{k-j}|X|.
inline std::vector<double> directional_differentials(const Matrix& a,
                                                     const Matrix& v, int order,
                                                     double tol = kSingularityTol,
                                                     int max_order = 4) {
  if (order < 1 || order > max_order) {
    throw std::invalid_argument("directional_differentials: order out of range");
  }
  require_hermitian(v, "directional_differentials (direction)");
  const EigDecomp eig = hermitian_eig(a);
  eig.require_invertible("directional_differentials", tol);
  const Index n = eig.n();
  const RealVector lam = eig.eigenvalues;
  const RealVector abs = lam.cwiseAbs();

  const Matrix vt = eig.U.adjoint() * v * eig.U;  // direction in the eigenbasis

  auto solve_sylvester = [&](const Matrix& c) {
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) m(i, j) = c(i, j) / (abs(i) + abs(j));
    return m;
  };
  auto differential = [&](const Matrix& c) {
    Complex tr = 0.0;
    for (Index i = 0; i < n; ++i) tr += c(i, i) / abs(i);
    return 0.5 * tr.real();
  };

  std::vector<Matrix> d_abs;  // d^k|X| in the eigenbasis
  std::vector<double> out;
  d_abs.reserve(order);
  out.reserve(order);

  Matrix c1(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) c1(i, j) = (lam(i) + lam(j)) * vt(i, j);
  out.push_back(differential(c1));
  d_abs.push_back(solve_sylvester(c1));

  if (order >= 2) {
    Matrix c2 = 2.0 * vt * vt - 2.0 * d_abs[0] * d_abs[0];
    out.push_back(differential(c2));
    d_abs.push_back(solve_sylvester(c2));
  }
  for (int k = 3; k <= order; ++k) {
    Matrix c = Matrix::Zero(n, n);
    for (int j = 1; j <= k - 1; ++j) {
      c -= detail::binomial(k, j) * d_abs[j - 1] * d_abs[k - j - 1];
    }
    out.push_back(differential(c));
    d_abs.push_back(solve_sylvester(c));
  }
  return out;
}

// Directional derivative of g(X) = Tr(X^alpha) at Hermitian A along Hermitian
// V, computed through the patterned rule D_A = [D_X + (D_{X^*})K]_{X=A} and
// through the plain unpatterned derivative evaluated at A. Since g does not
// depend on X^*, the two must coincide.
struct AnalyticShortcutPair {
  double patterned;
  double unpatterned;
};

inline AnalyticShortcutPair analytic_shortcut_check(const Matrix& a,
                                                    const Matrix& v, int alpha) {
  if (alpha < 1) throw std::invalid_argument("analytic_shortcut_check: alpha >= 1");
  require_hermitian(a, "analytic_shortcut_check");
  require_hermitian(v, "analytic_shortcut_check (direction)");
  const Index n = a.rows();
  Matrix apow = Matrix::Identity(n, n);
  for (int i = 0; i < alpha - 1; ++i) apow = (apow * a).eval();

  // D_X Tr(X^alpha) = alpha vec^T((X^{alpha-1})^T); D_{X^*} Tr(X^alpha) = 0.
  RowVector d_x = static_cast<double>(alpha) * vec(apow.transpose().eval()).transpose();
  RowVector d_xstar = RowVector::Zero(n * n);

  const auto k = commutation_matrix(n, n);
  RowVector patterned_row = d_x + k.apply(d_xstar.transpose()).transpose();

  AnalyticShortcutPair out;
  out.patterned = (patterned_row * vec(v)).value().real();
  out.unpatterned =
      ((d_x * vec(v)).value() + (d_xstar * vec(v.conjugate().eval())).value()).real();
  return out;
}

}  // namespace negcalc
