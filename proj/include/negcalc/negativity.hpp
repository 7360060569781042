// Negativity, logarithmic negativity, Renyi-2 entropy of the reduced state,
// and the perturbative expansion of negativity through second order plus the
// resummed special form.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "negcalc/calculus.hpp"
#include "negcalc/errors.hpp"
#include "negcalc/tensor.hpp"

namespace negcalc {

// Validated bipartite state: Hermitian, unit trace, positive semidefinite
// within tolerance.
class DensityMatrix {
 public:
  DensityMatrix(Matrix rho, BipartiteDims dims, double tol = 1e-10)
      : rho_(std::move(rho)), dims_(dims) {
    dims_.validate_against(rho_, "DensityMatrix");
    require_hermitian(rho_, "DensityMatrix", tol);
    if (std::abs(rho_.trace() - Complex(1.0)) > tol) {
      throw PatternViolationError("DensityMatrix: trace is not 1");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_);
    if (es.eigenvalues().minCoeff() < -tol) {
      throw PatternViolationError("DensityMatrix: negative eigenvalue beyond tolerance");
    }
  }

  const Matrix& matrix() const noexcept { return rho_; }
  BipartiteDims dims() const noexcept { return dims_; }
  Index side() const noexcept { return rho_.rows(); }

 private:
  Matrix rho_;
  BipartiteDims dims_;
};

namespace detail {

inline void require_traceless_hermitian(const Matrix& m, const char* what,
                                        double tol = 1e-10) {
  require_hermitian(m, what, tol);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (std::abs(m.trace()) > tol * scale) {
    throw PatternViolationError(std::string(what) + ": direction is not traceless");
  }
}

}  // namespace detail

inline EigDecomp partial_transpose_spectrum(const DensityMatrix& rho) {
  return hermitian_eig(partial_transpose(rho.matrix(), rho.dims()));
}

// N(rho) = sum of |negative eigenvalues| of rho^{T_B}. Cross-checked against
// the trace-norm form (||rho^{T_B}||_1 - 1)/2, which runs through an SVD
// rather than the eigensolve.
inline double negativity(const DensityMatrix& rho) {
  const EigDecomp eig = partial_transpose_spectrum(rho);
  double eigensum = 0.0;
  for (Index i = 0; i < eig.n(); ++i) {
    if (eig.eigenvalues(i) < 0.0) eigensum -= eig.eigenvalues(i);
  }
  const double via_norm =
      0.5 * (trace_norm(partial_transpose(rho.matrix(), rho.dims())) - 1.0);
  if (std::abs(eigensum - via_norm) > 1e-12) {
    throw std::runtime_error("negativity: eigensum and trace-norm forms disagree");
  }
  return eigensum;
}

// E_N = log2(2N + 1) = log2 ||rho^{T_B}||_1.
inline double log_negativity(const DensityMatrix& rho) {
  return std::log2(2.0 * negativity(rho) + 1.0);
}

// Renyi-2 entropy of the reduced state: -log Tr[(Tr_B rho)^2].
inline double renyi2_entropy(const DensityMatrix& rho) {
  const Matrix reduced = partial_trace_b(rho.matrix(), rho.dims());
  return -std::log((reduced * reduced).trace().real());
}

struct InvertibilityReport {
  double min_abs_eig = 0.0;
  bool invertible = false;
};

inline InvertibilityReport invertibility_report(const DensityMatrix& rho,
                                                double tol = kSingularityTol) {
  const EigDecomp eig = partial_transpose_spectrum(rho);
  return {eig.min_abs_eigenvalue(), eig.invertible(tol)};
}

namespace detail {

inline double contract_real(const RowVector& row, const Vector& v, const char* what) {
  const Complex value = (row * v).value();
  if (std::abs(value.imag()) > 1e-9 * std::max(1.0, std::abs(value.real()) + v.norm())) {
    throw std::runtime_error(std::string(what) + ": contraction is not real");
  }
  return value.real();
}

}  // namespace detail

// dN = 1/2 vec^T[U^* sign(Lambda) U^T] K_B vec(drho) at the spectrum of
// rho^{T_B}. Refuses (with the offending min |eigenvalue|) when rho^{T_B} is
// singular within tolerance.
inline double negativity_d1(const EigDecomp& pt_spectrum, BipartiteDims dims,
                            const Matrix& drho, double tol = kSingularityTol) {
  detail::require_traceless_hermitian(drho, "negativity_d1");
  const RowVector jac = trace_norm_jacobian_hermitian(pt_spectrum, tol);
  const Vector w = partial_commutation_matrix(dims).apply(vec(drho));
  return 0.5 * detail::contract_real(jac, w, "negativity_d1");
}

inline double negativity_d1(const DensityMatrix& rho, const Matrix& drho,
                            double tol = kSingularityTol) {
  return negativity_d1(partial_transpose_spectrum(rho), rho.dims(), drho, tol);
}

// d2N = 1/2 [K_B vec(drho)]^T H [K_B vec(drho)]
//     + 1/2 vec^T[U^* sign(Lambda) U^T] K_B vec(d2rho),
// with H the patterned Hessian of the trace norm at rho^{T_B}.
inline double negativity_d2(const EigDecomp& pt_spectrum, BipartiteDims dims,
                            const Matrix& drho, const Matrix& d2rho,
                            double tol = kSingularityTol) {
  detail::require_traceless_hermitian(drho, "negativity_d2");
  detail::require_traceless_hermitian(d2rho, "negativity_d2");
  const auto kb = partial_commutation_matrix(dims);
  const Vector w = kb.apply(vec(drho));
  const Matrix hess = trace_norm_hessian_hermitian(pt_spectrum, tol);
  const Complex quad = (w.transpose() * (hess * w)).value();
  if (std::abs(quad.imag()) > 1e-9 * std::max(1.0, std::abs(quad.real()))) {
    throw std::runtime_error("negativity_d2: quadratic form is not real");
  }
  const RowVector jac = trace_norm_jacobian_hermitian(pt_spectrum, tol);
  const double linear =
      detail::contract_real(jac, kb.apply(vec(d2rho)), "negativity_d2");
  return 0.5 * quad.real() + 0.5 * linear;
}

inline double negativity_d2(const DensityMatrix& rho, const Matrix& drho,
                            const Matrix& d2rho, double tol = kSingularityTol) {
  return negativity_d2(partial_transpose_spectrum(rho), rho.dims(), drho, d2rho, tol);
}

// Parameterized family rho(mu) with analytic partial derivatives. The engine
// never differentiates a trajectory numerically; suppliers must provide
// Hermitian traceless partials.
struct Trajectory {
  std::function<DensityMatrix(double)> state;
  std::function<Matrix(double, int)> partial;  // (mu, order >= 1)
};

// Negativity value and local derivative data at an expansion point.
struct ExpansionResult {
  double t0 = 0.0;
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  bool resummed_valid = false;  // set by drivers that also ran the resummed form
  EigDecomp spectrum;           // of rho^{T_B}(t0)
  double min_abs_eig = 0.0;

  double predict(double t) const {
    const double dt = t - t0;
    return value + d1 * dt + 0.5 * d2 * dt * dt;
  }
};

inline ExpansionResult taylor_expand(const Trajectory& traj, double t0, int order,
                                     double tol = kSingularityTol) {
  if (order < 1 || order > 2) {
    throw std::invalid_argument("taylor_expand: order must be 1 or 2");
  }
  const DensityMatrix rho = traj.state(t0);
  ExpansionResult out;
  out.t0 = t0;
  out.value = negativity(rho);
  out.spectrum = partial_transpose_spectrum(rho);
  out.min_abs_eig = out.spectrum.min_abs_eigenvalue();
  const Matrix drho = traj.partial(t0, 1);
  out.d1 = negativity_d1(out.spectrum, rho.dims(), drho, tol);
  if (order >= 2) {
    out.d2 = negativity_d2(out.spectrum, rho.dims(), drho, traj.partial(t0, 2), tol);
  }
  return out;
}

// Resummed special expansion:
//   N(t) = N(t0) + 1/2 vec^T[U^* sign(Lambda) U^T]|_{t0} K_B vec[rho(t) - rho(t0)].
// Valid whenever every higher trace-norm differential vanishes along the
// path; there is no a priori criterion, so validity is certified empirically
// against the exact negativity at t.
struct ResummedValue {
  double value = 0.0;
  bool validated = false;
};

inline ResummedValue resummed_expansion(const Trajectory& traj, double t0, double t,
                                        double tol = kSingularityTol,
                                        double validate_tol = 1e-8) {
  const DensityMatrix rho0 = traj.state(t0);
  const EigDecomp eig = partial_transpose_spectrum(rho0);
  const RowVector jac = trace_norm_jacobian_hermitian(eig, tol);
  const DensityMatrix rho_t = traj.state(t);
  const Vector w = partial_commutation_matrix(rho0.dims())
                       .apply(vec((rho_t.matrix() - rho0.matrix()).eval()));
  ResummedValue out;
  out.value = negativity(rho0) + 0.5 * detail::contract_real(jac, w, "resummed_expansion");
  out.validated = std::abs(out.value - negativity(rho_t)) <= validate_tol;
  return out;
}

}  // namespace negcalc
