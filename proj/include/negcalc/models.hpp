// Concrete systems: Jaynes-Cummings closed evolution (the analytic 2x2
// sector and the bound-entangled 2x4 initial state) and the open two-cavity
// system with analytic dependence on time and the initial mixing parameter.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "negcalc/calculus.hpp"
#include "negcalc/errors.hpp"
#include "negcalc/negativity.hpp"
#include "negcalc/tensor.hpp"

namespace negcalc {

// ---------------------------- Jaynes-Cummings --------------------------------

struct JcmParams {
  double omega = 10.0;  // mode frequency
  double delta = 1.0;   // detuning
  double g = 5.0;       // coupling
  Index n_fock = 8;     // Fock-space truncation

  double rabi() const { return std::sqrt(delta * delta + 16.0 * g * g); }
};

namespace detail {

inline Matrix annihilation(Index n) {
  Matrix a = Matrix::Zero(n, n);
  for (Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

}  // namespace detail

// H = omega 1 (x) a^dag a + (omega - delta) sigma^dag sigma (x) 1
//     - i g (sigma (x) a^dag - sigma^dag (x) a)
// in the atom (x) field ordering with atom basis {|g>, |e>}. Conserves the
// total excitation number.
inline Matrix jcm_hamiltonian(const JcmParams& params) {
  if (params.n_fock < 2) throw std::invalid_argument("jcm_hamiltonian: n_fock >= 2");
  const Index nf = params.n_fock;
  const Matrix a = detail::annihilation(nf);
  const Matrix id_f = Matrix::Identity(nf, nf);
  Matrix sigma = Matrix::Zero(2, 2);  // |g><e|
  sigma(0, 1) = 1.0;
  Matrix excited = Matrix::Zero(2, 2);  // sigma^dag sigma = |e><e|
  excited(1, 1) = 1.0;

  Matrix h = params.omega * kron(Matrix::Identity(2, 2), (a.adjoint() * a).eval()) +
             (params.omega - params.delta) * kron(excited, id_f);
  h -= Complex(0.0, params.g) *
       (kron(sigma, a.adjoint().eval()) - kron(sigma.adjoint().eval(), a));
  return h;
}

inline Matrix jcm_total_excitation(Index n_fock) {
  const Matrix a = detail::annihilation(n_fock);
  Matrix excited = Matrix::Zero(2, 2);
  excited(1, 1) = 1.0;
  return kron(Matrix::Identity(2, 2), (a.adjoint() * a).eval()) +
         kron(excited, Matrix::Identity(n_fock, n_fock));
}

// Iterated von Neumann partials d^k rho / dt^k = (-i)^k ad_H^k(rho),
// k = 1..order. Each result is Hermitian and traceless.
inline std::vector<Matrix> von_neumann_partials(const Matrix& h, const Matrix& rho,
                                                int order) {
  if (order < 1) throw std::invalid_argument("von_neumann_partials: order >= 1");
  if (h.rows() != rho.rows() || h.cols() != rho.cols()) {
    throw std::invalid_argument("von_neumann_partials: shape mismatch");
  }
  std::vector<Matrix> out;
  out.reserve(order);
  Matrix current = rho;
  for (int k = 0; k < order; ++k) {
    current = (Complex(0.0, -1.0) * (h * current - current * h)).eval();
    out.push_back(current);
  }
  return out;
}

// rho(t) = e^{-iHt} rho0 e^{iHt} through the eigendecomposition of H.
inline DensityMatrix evolve_closed(const Matrix& h, const DensityMatrix& rho0,
                                   double t) {
  const EigDecomp eig = hermitian_eig(h);
  Vector phases(eig.n());
  for (Index i = 0; i < eig.n(); ++i) {
    phases(i) = std::exp(Complex(0.0, -eig.eigenvalues(i) * t));
  }
  const Matrix u_t = eig.U * phases.asDiagonal() * eig.U.adjoint();
  return DensityMatrix((u_t * rho0.matrix() * u_t.adjoint()).eval(), rho0.dims());
}

// Restrict a (2, n_fock) operator to field levels [lo, hi] (both inclusive).
inline Matrix restrict_field_levels(const Matrix& op, Index n_fock, Index lo, Index hi) {
  if (op.rows() != 2 * n_fock || lo < 0 || hi >= n_fock || lo > hi) {
    throw std::invalid_argument("restrict_field_levels: bad level window");
  }
  const Index nb = hi - lo + 1;
  Matrix out(2 * nb, 2 * nb);
  for (Index a = 0; a < 2; ++a)
    for (Index ap = 0; ap < 2; ++ap)
      out.block(a * nb, ap * nb, nb, nb) =
          op.block(a * n_fock + lo, ap * n_fock + lo, nb, nb);
  return out;
}

// Truncate a state to field levels [lo, hi]; the population outside the
// window must be below leak_tol.
inline DensityMatrix truncate_field_levels(const DensityMatrix& rho, Index lo,
                                           Index hi, double leak_tol = 1e-12) {
  const Index nf = rho.dims().d_B;
  if (rho.dims().d_A != 2) {
    throw std::invalid_argument("truncate_field_levels: expects a (2, n) state");
  }
  Matrix kept = restrict_field_levels(rho.matrix(), nf, lo, hi);
  const double leakage = 1.0 - kept.trace().real();
  if (std::abs(leakage) > leak_tol) {
    throw PatternViolationError("truncate_field_levels: leakage above tolerance");
  }
  return DensityMatrix(kept, {2, hi - lo + 1});
}

// Embed a (2, d_B) state into field levels [0, d_B) of a (2, n_fock) space.
inline DensityMatrix embed_field_levels(const DensityMatrix& rho, Index n_fock) {
  const Index nb = rho.dims().d_B;
  if (rho.dims().d_A != 2 || n_fock < nb) {
    throw std::invalid_argument("embed_field_levels: bad target size");
  }
  Matrix out = Matrix::Zero(2 * n_fock, 2 * n_fock);
  for (Index a = 0; a < 2; ++a)
    for (Index ap = 0; ap < 2; ++ap)
      out.block(a * n_fock, ap * n_fock, nb, nb) =
          rho.matrix().block(a * nb, ap * nb, nb, nb);
  return DensityMatrix(out, {2, n_fock});
}

// Closed-form |psi(t)><psi(t)| for the initial state |e> (x) |3>, reduced to
// the invariant {|g>,|e>} (x) {|3>,|4>} sector as a (2,2) state. With the
// Hamiltonian above the amplitudes are
//   <e,3|psi> = cos(Omega t/2) + i (Delta/Omega) sin(Omega t/2)
//   <g,4|psi> = -(4g/Omega) sin(Omega t/2)
// up to a dropped global phase.
inline DensityMatrix jcm_analytic_state(double t, const JcmParams& params) {
  const double omega_r = params.rabi();
  const double half = 0.5 * omega_r * t;
  const Complex c_e3(std::cos(half), params.delta / omega_r * std::sin(half));
  const Complex c_g4 = -4.0 * params.g / omega_r * std::sin(half);
  Vector psi = Vector::Zero(4);  // basis (g,3),(g,4),(e,3),(e,4)
  psi(1) = c_g4;
  psi(2) = c_e3;
  return DensityMatrix((psi * psi.adjoint()).eval(), {2, 2});
}

// Closed-form dN/dt for the analytic 2x2 sector:
//   2 g sin(Omega t) [Delta^2 + (4g)^2 cos(Omega t)]
//   / (Omega sqrt(Delta^2 (1 - cos Omega t)^2 + Omega^2 sin^2(Omega t))).
// The denominator vanishes exactly at separable instants, where negativity
// has a kink and no derivative exists.
inline double jcm_analytic_dndt(double t, const JcmParams& params,
                                double separable_tol = 1e-9) {
  const double omega_r = params.rabi();
  const double c = std::cos(omega_r * t), s = std::sin(omega_r * t);
  const double d2 = params.delta * params.delta;
  const double radicand = d2 * (1.0 - c) * (1.0 - c) + omega_r * omega_r * s * s;
  // scale-free closeness to a separable instant: N = 2g sqrt(radicand)/Omega^2
  if (std::sqrt(radicand) <= separable_tol * omega_r * omega_r) {
    throw SeparablePointError("jcm_analytic_dndt: separable instant");
  }
  return 2.0 * params.g * s * (d2 + 16.0 * params.g * params.g * c) /
         (omega_r * std::sqrt(radicand));
}

// Analytic 2x2 trajectory: closed-form state, von Neumann partials against
// the Hamiltonian restricted to the {|3>,|4>} field sector.
inline Trajectory jcm_analytic_trajectory(const JcmParams& params) {
  JcmParams full = params;
  if (full.n_fock < 5) full.n_fock = 5;
  const Matrix h_eff = restrict_field_levels(jcm_hamiltonian(full), full.n_fock, 3, 4);
  return Trajectory{
      [params](double t) { return jcm_analytic_state(t, params); },
      [params, h_eff](double t, int order) {
        auto partials =
            von_neumann_partials(h_eff, jcm_analytic_state(t, params).matrix(), order);
        return partials.back();
      }};
}

// Bound-entangled (2,4) initial state: PPT (zero negativity) yet entangled.
// Diagonal weights (4,4,9,9 | 1,1,1,1)/30 with |g,b+1><e,b| coherences.
inline DensityMatrix bound_entangled_state() {
  Matrix rho = Matrix::Zero(8, 8);
  rho.diagonal() << 4, 4, 9, 9, 1, 1, 1, 1;
  rho(1, 4) = 2.0;  // <g,1| rho |e,0>
  rho(2, 5) = 2.0;  // <g,2| rho |e,1>
  rho(3, 6) = 3.0;  // <g,3| rho |e,2>
  rho(4, 1) = 2.0;
  rho(5, 2) = 2.0;
  rho(6, 3) = 3.0;
  rho /= 30.0;
  return DensityMatrix(rho, {2, 4});
}

// Unitary JCM evolution of the bound-entangled state. Evolution happens in
// the full (2, n_fock) space; states and partials are handed out on the
// invariant (2,5) support (field levels 0..4, the highest level the coupling
// reaches from the initial support), where rho^{T_B} can be inverted. On any
// larger padding rho^{T_B} carries exact zero rows and every trace-norm
// derivative would be refused as singular.
inline Trajectory jcm_bound_trajectory(const JcmParams& params) {
  JcmParams p = params;
  if (p.n_fock < 5) throw std::invalid_argument("jcm_bound_trajectory: n_fock >= 5");
  const Matrix h = jcm_hamiltonian(p);
  const EigDecomp h_eig = hermitian_eig(h);
  const DensityMatrix rho0 = embed_field_levels(bound_entangled_state(), p.n_fock);

  auto evolve = [h_eig, rho0](double t) {
    Vector phases(h_eig.n());
    for (Index i = 0; i < h_eig.n(); ++i) {
      phases(i) = std::exp(Complex(0.0, -h_eig.eigenvalues(i) * t));
    }
    Matrix u_t = h_eig.U * phases.asDiagonal() * h_eig.U.adjoint();
    return DensityMatrix((u_t * rho0.matrix() * u_t.adjoint()).eval(), rho0.dims());
  };

  const Index nf = p.n_fock;
  return Trajectory{
      [evolve](double t) { return truncate_field_levels(evolve(t), 0, 4); },
      [evolve, h, nf](double t, int order) {
        auto partials = von_neumann_partials(h, evolve(t).matrix(), order);
        return restrict_field_levels(partials.back(), nf, 0, 4);
      }};
}

// ---------------------------- open cavity pair -------------------------------

struct CavityParams {
  double p = 0.35;  // initial mixing weight in [0,1]
  double t = 0.0;   // time in units of the decay constant

  void validate() const {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("CavityParams: p outside [0,1]");
    }
    if (!(t >= 0.0)) throw std::invalid_argument("CavityParams: t < 0");
  }
};

namespace detail {

// Polynomial in u = exp(-t). Since du/dt = -u, time derivatives stay in the
// same family: d^m/dt^m (u^k) = (-k)^m u^k. This sidesteps the chi'(t)
// divergence at t = 0; every matrix element is a polynomial in u.
struct UPoly {
  std::vector<double> c;  // value = sum_k c[k] u^k

  double eval(double u) const {
    double acc = 0.0, pw = 1.0;
    for (double ck : c) {
      acc += ck * pw;
      pw *= u;
    }
    return acc;
  }

  double eval_dt(double u, int order) const {
    double acc = 0.0, pw = 1.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      acc += c[k] * std::pow(-static_cast<double>(k), order) * pw;
      pw *= u;
    }
    return acc;
  }

  friend UPoly operator*(const UPoly& a, const UPoly& b) {
    UPoly out;
    out.c.assign(a.c.size() + b.c.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c.size(); ++i)
      for (std::size_t j = 0; j < b.c.size(); ++j) out.c[i + j] += a.c[i] * b.c[j];
    return out;
  }

  friend UPoly operator+(const UPoly& a, const UPoly& b) {
    UPoly out;
    out.c.assign(std::max(a.c.size(), b.c.size()), 0.0);
    for (std::size_t i = 0; i < a.c.size(); ++i) out.c[i] += a.c[i];
    for (std::size_t i = 0; i < b.c.size(); ++i) out.c[i] += b.c[i];
    return out;
  }

  friend UPoly operator*(double s, const UPoly& a) {
    UPoly out = a;
    for (double& ck : out.c) ck *= s;
    return out;
  }
};

// Matrix element affine in the mixing weight: value = base(u) + p * lin(u).
struct CavityEntry {
  UPoly base, lin;

  double value(double u, double p) const { return base.eval(u) + p * lin.eval(u); }
  double dt(double u, double p, int order) const {
    return base.eval_dt(u, order) + p * lin.eval_dt(u, order);
  }
  double dp(double u) const { return lin.eval(u); }
};

struct CavityTable {
  // index pairs (0-based) carrying nonzero entries: diagonal + (0,5),(1,6),(2,7)
  CavityEntry diag[8];
  CavityEntry off[3];
};

inline const CavityTable& cavity_table() {
  static const CavityTable table = [] {
    const UPoly one{{1.0}};
    const UPoly u{{0.0, 1.0}};
    const UPoly v{{1.0, -1.0}};  // v = chi^2 = 1 - u
    const UPoly u2 = u * u, u3 = u2 * u, u4 = u3 * u;
    const UPoly v2 = v * v, v4 = v2 * v2;
    const UPoly uv = u * v;
    const double rt3 = std::sqrt(3.0);
    const double rt32 = std::sqrt(1.5);

    CavityTable t;
    t.diag[0] = {0.5 * (v2 + v4), 0.5 * (one + (-1.0) * v4)};
    t.diag[1] = {0.5 * (uv * (UPoly{{2.0}} + 3.0 * v2)),
                 -0.5 * (uv * (one + 3.0 * v2))};
    t.diag[2] = {0.5 * (u2 * (one + 3.0 * v2)), -0.5 * (u2 * (one + 3.0 * v2))};
    t.diag[3] = {0.5 * (u3 * v), -0.5 * (u3 * v)};
    t.diag[4] = {0.5 * (uv * v2), 0.5 * (uv * (one + (-1.0) * v2))};
    t.diag[5] = {1.5 * (u2 * v2), 0.5 * (u2 * (one + (-3.0) * v2))};
    t.diag[6] = {1.5 * (u3 * v), -1.5 * (u3 * v)};
    t.diag[7] = {0.5 * u4, -0.5 * u4};
    t.off[0] = {0.5 * rt3 * (u * v2), 0.5 * (u * (one + (-rt3) * v2))};
    t.off[1] = {rt32 * (u2 * v), -rt32 * (u2 * v)};
    t.off[2] = {0.5 * u3, -0.5 * u3};
    return t;
  }();
  return table;
}

inline Matrix cavity_matrix_from(const CavityParams& params,
                                 double (*pick)(const CavityEntry&, double, double)) {
  const double u = std::exp(-params.t);
  const auto& table = cavity_table();
  Matrix m = Matrix::Zero(8, 8);
  for (Index i = 0; i < 8; ++i) m(i, i) = pick(table.diag[i], u, params.p);
  const Index rows[3] = {0, 1, 2}, cols[3] = {5, 6, 7};
  for (int k = 0; k < 3; ++k) {
    const double val = pick(table.off[k], u, params.p);
    m(rows[k], cols[k]) = val;
    m(cols[k], rows[k]) = val;
  }
  return m;
}

}  // namespace detail

// The 8x8 two-cavity state rho(t; p) in the |cavity1> (x) |cavity2> basis
// {|0,0>,|0,1>,...,|1,3>}, as a (2,4) bipartite state.
inline DensityMatrix cavity_state(const CavityParams& params) {
  params.validate();
  Matrix m = detail::cavity_matrix_from(
      params, [](const detail::CavityEntry& e, double u, double p) {
        return e.value(u, p);
      });
  return DensityMatrix(m, {2, 4});
}

enum class CavityWrt { Time, Mixing };

// Analytic partial derivative of the cavity state, order 1 or 2. Derivatives
// with respect to p are exact (the entries are affine in p, so order 2 is
// identically zero); time derivatives differentiate the u-polynomials.
inline Matrix cavity_partial(const CavityParams& params, CavityWrt wrt, int order) {
  params.validate();
  if (order < 1 || order > 2) throw std::invalid_argument("cavity_partial: order 1|2");
  const double u = std::exp(-params.t);
  const auto& table = detail::cavity_table();
  Matrix m = Matrix::Zero(8, 8);
  auto fill = [&](auto&& entry_value) {
    for (Index i = 0; i < 8; ++i) m(i, i) = entry_value(table.diag[i]);
    const Index rows[3] = {0, 1, 2}, cols[3] = {5, 6, 7};
    for (int k = 0; k < 3; ++k) {
      const double val = entry_value(table.off[k]);
      m(rows[k], cols[k]) = val;
      m(cols[k], rows[k]) = val;
    }
  };
  if (wrt == CavityWrt::Time) {
    fill([&](const detail::CavityEntry& e) { return e.dt(u, params.p, order); });
  } else if (order == 1) {
    fill([&](const detail::CavityEntry& e) { return e.dp(u); });
  }  // order-2 mixing derivative is identically zero
  return m;
}

inline Trajectory cavity_time_trajectory(double p) {
  return Trajectory{
      [p](double t) { return cavity_state({p, t}); },
      [p](double t, int order) { return cavity_partial({p, t}, CavityWrt::Time, order); }};
}

inline Trajectory cavity_mixing_trajectory(double t) {
  return Trajectory{
      [t](double p) { return cavity_state({p, t}); },
      [t](double p, int order) {
        return cavity_partial({p, t}, CavityWrt::Mixing, order);
      }};
}

}  // namespace negcalc
