// Acceptance suite: end-to-end criteria with pinned tolerances and runtime
// budgets. Prints one pass/fail line per criterion; exits nonzero if any
// criterion fails.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "negcalc/negcalc.hpp"

using namespace negcalc;

namespace {

std::string format(const char* pattern, ...) {
  char buf[256];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return buf;
}

void demand(bool ok, const std::string& why) {
  if (!ok) throw std::runtime_error(why);
}

void demand_le(double value, double bound, const char* what) {
  if (!(value <= bound)) {
    throw std::runtime_error(format("%s: %.3e exceeds %.3e", what, value, bound));
  }
}

Matrix random_complex(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = Complex(dist(rng), dist(rng));
  return m;
}

Matrix random_hermitian(Index n, std::mt19937_64& rng) {
  Matrix g = random_complex(n, n, rng);
  return 0.5 * (g + g.adjoint()).eval();
}

Matrix random_hermitian_nonsingular(Index n, std::mt19937_64& rng) {
  for (;;) {
    Matrix a = random_hermitian(n, rng);
    EigDecomp eig = hermitian_eig(a);
    if (eig.min_abs_eigenvalue() > 5e-2 * eig.max_abs_eigenvalue()) return a;
  }
}

Vector random_state(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = Complex(dist(rng), dist(rng));
  return v / v.norm();
}

// relative error with a denominator floor, so near-zero references compare
// against an absolute scale instead of dividing by noise
double rel_err(double got, double expect, double floor = 1e-2) {
  return std::abs(got - expect) / std::max(std::abs(expect), floor);
}

// ---------------------------------------------------------------------------

// Criterion 1: K_B equals the elementwise partial transpose exactly, is an
// involution, reduces to K at d_A = 1, and its signed eigenbasis reconstructs
// it with the stated sector counts.
std::string criterion_superoperator() {
  std::mt19937_64 rng(1001);
  for (auto dims : {BipartiteDims{2, 2}, BipartiteDims{2, 3}, BipartiteDims{2, 4}}) {
    auto kb = partial_commutation_matrix(dims);
    const Index d = dims.total();
    for (int trial = 0; trial < 200; ++trial) {
      Matrix rho = random_hermitian(d, rng);
      Matrix via = unvec(kb.apply(vec(rho)), d, d);
      demand((via - partial_transpose(rho, dims)).cwiseAbs().maxCoeff() == 0.0,
             "K_B vec(rho) differs from the elementwise partial transpose");
    }
    RealMatrix dense = kb.dense();
    demand((dense * dense - RealMatrix::Identity(d * d, d * d)).cwiseAbs().maxCoeff() ==
               0.0,
           "K_B^2 != 1");
    auto basis = partial_commutation_eigenbasis(dims);
    demand(basis.plus_count == dims.d_A * dims.d_A * dims.d_B * (dims.d_B + 1) / 2,
           "k count wrong");
    demand(basis.minus_count == dims.d_A * dims.d_A * dims.d_B * (dims.d_B - 1) / 2,
           "l count wrong");
    demand_le((basis.reconstruct() - dense).cwiseAbs().maxCoeff(), 1e-12,
              "eigenbasis reconstruction");
  }
  for (Index n : {2, 3, 4}) {
    demand(partial_commutation_matrix({1, n}).source() ==
               commutation_matrix(n, n).source(),
           "K_B at d_A = 1 differs from K");
  }
  return "dims (2,2),(2,3),(2,4), 200 samples each; reconstruction <= 1e-12";
}

// Criterion 2: patterned Jacobian vs Richardson-refined central differences
// over every independent real parameter, and the twice-the-unpatterned
// relation.
std::string criterion_jacobian() {
  std::mt19937_64 rng(1002);
  double worst_fd = 0.0, worst_twice = 0.0;
  for (Index n : {4, 6}) {
    for (int trial = 0; trial < 50; ++trial) {
      Matrix a = random_hermitian_nonsingular(n, rng);
      RowVector j = trace_norm_jacobian_hermitian(a);
      for (Index r = 0; r < n; ++r) {
        for (Index c = r; c < n; ++c) {
          std::vector<Matrix> dirs;
          if (r == c) {
            dirs.push_back(single_entry(n, r, r));
          } else {
            dirs.push_back(single_entry(n, r, c) + single_entry(n, c, r));
            dirs.push_back(Complex(0, 1) * (single_entry(n, r, c) - single_entry(n, c, r)));
          }
          for (const Matrix& dir : dirs) {
            const double predicted = (j * vec(dir)).value().real();
            auto fd = oracle::fd_scalar(
                [&](double s) { return trace_norm((a + s * dir).eval()); }, 0.0,
                oracle::FdScheme::central(1));
            worst_fd = std::max(worst_fd, rel_err(predicted, fd.value));
          }
        }
      }
      WirtingerJacobian unpat = trace_norm_jacobian_unpatterned(a);
      worst_twice =
          std::max(worst_twice, (j - 2.0 * unpat.d_x).cwiseAbs().maxCoeff());
    }
  }
  demand_le(worst_fd, 1e-5, "gradient vs finite differences");
  demand_le(worst_twice, 1e-10, "twice-the-unpatterned relation");
  return format("50 instances each of 4x4 and 6x6; max rel err %.1e; "
                "pattern relation %.1e",
                worst_fd, worst_twice);
}

// Criterion 3: Hessian correctness in all forms.
std::string criterion_hessian() {
  std::mt19937_64 rng(1003);
  double worst_forms = 0.0, worst_fd = 0.0, worst_relations = 0.0;
  for (int trial = 0; trial < 25; ++trial) {
    const Index n = 4;
    Matrix a = random_hermitian_nonsingular(n, rng);
    Matrix spectral = trace_norm_hessian_hermitian(a);
    worst_forms = std::max(
        worst_forms,
        (spectral - trace_norm_hessian_hermitian_kron(a)).cwiseAbs().maxCoeff());

    Matrix assembled =
        hermitian_hessian_from_unpatterned(trace_norm_hessians_unpatterned(a));
    Matrix kd = commutation_matrix(n, n).dense().cast<Complex>();
    worst_relations =
        std::max(worst_relations, (assembled - spectral).cwiseAbs().maxCoeff());
    worst_relations = std::max(
        worst_relations, (kd * assembled - kd * spectral).cwiseAbs().maxCoeff());
    worst_relations = std::max(
        worst_relations, (assembled * kd - spectral * kd).cwiseAbs().maxCoeff());
    worst_relations = std::max(
        worst_relations,
        (kd * assembled * kd - kd * spectral * kd).cwiseAbs().maxCoeff());

    Matrix v = random_hermitian(n, rng);
    Vector w = vec(v);
    const double quad = (w.transpose() * (spectral * w)).value().real();
    auto fd = oracle::fd_directional(
        a, v, [](const Matrix& x) { return trace_norm(x); }, 2,
        oracle::FdScheme::central(2));
    worst_fd =
        std::max(worst_fd, std::abs(quad - fd.value) / std::max(1.0, std::abs(fd.value)));

    Matrix g = random_complex(n, n, rng);
    Matrix pd = g * g.adjoint() + 0.2 * Matrix::Identity(n, n);
    demand(trace_norm_hessian_hermitian(pd).cwiseAbs().maxCoeff() == 0.0,
           "Hessian not exactly zero at a positive definite argument");
  }
  demand_le(worst_forms, 1e-10, "Kronecker-sum vs spectral form");
  demand_le(worst_fd, 1e-4, "quadratic form vs finite differences");
  demand_le(worst_relations, 1e-10, "K-relations between Hessians");
  return format("forms %.1e; FD %.1e; K-relations %.1e; PSD zero exact",
                worst_forms, worst_fd, worst_relations);
}

// Criterion 4: JCM 2x2 analytic reproduction at (omega,Delta,g) = (10,1,5).
std::string criterion_jcm_2x2() {
  const JcmParams params{10.0, 1.0, 5.0, 8};
  const double omega_r = params.rabi();
  const double period = 2.0 * M_PI / omega_r;
  Trajectory traj = jcm_analytic_trajectory(params);
  double worst_d1 = 0.0, worst_n = 0.0;
  int used = 0;
  for (int i = 0; i < 100; ++i) {
    const double t = period * (i + 0.5) / 100.0;
    const DensityMatrix rho = traj.state(t);
    // closed-form negativity for the sector state
    const double c = std::cos(omega_r * t), s = std::sin(omega_r * t);
    const double analytic_n =
        2.0 * params.g / (omega_r * omega_r) *
        std::sqrt(params.delta * params.delta * (1.0 - c) * (1.0 - c) +
                  omega_r * omega_r * s * s);
    const double engine_n = negativity(rho);
    const double oracle_n =
        oracle::negativity_eigensum(partial_transpose(rho.matrix(), rho.dims()));
    worst_n = std::max(worst_n, std::abs(engine_n - oracle_n));
    worst_n = std::max(worst_n, std::abs(engine_n - analytic_n));
    if (analytic_n < 1e-3) continue;  // separable instant: kink, no derivative
    const double closed = jcm_analytic_dndt(t, params);
    const double engine = negativity_d1(rho, traj.partial(t, 1));
    worst_d1 = std::max(worst_d1, rel_err(engine, closed, 1.0));
    ++used;
  }
  demand(used >= 90, "too few non-separable sample times");
  demand_le(worst_d1, 1e-10, "dN/dt closed form vs engine");
  demand_le(worst_n, 1e-12, "negativity closed form vs engine vs oracle");
  return format("%d sampled times; dN/dt rel err %.1e; N agreement %.1e", used,
                worst_d1, worst_n);
}

// Criterion 5: bound-entangled dynamics on the invariant (2,5) support.
std::string criterion_bound_entangled() {
  const JcmParams params{10.0, 1.0, 5.0, 8};
  const double unit = 2.0 * M_PI / params.g;

  // t = 0: PPT yet entangled, on the natural (2,4) dims
  DensityMatrix rho0 = bound_entangled_state();
  demand_le(negativity(rho0), 1e-12, "initial negativity");
  EigDecomp pt0 = partial_transpose_spectrum(rho0);
  demand(pt0.eigenvalues.minCoeff() >= -1e-12, "rho^{T_B}(0) not PSD");
  demand(renyi2_entropy(rho0) > 0.2, "reduced Renyi-2 should witness correlations");

  Trajectory traj = jcm_bound_trajectory(params);

  // at t = 0 the (2,5) embedding has an exactly singular partial transpose:
  // derivative formulas must refuse rather than fabricate values
  bool refused = false;
  try {
    (void)negativity_d1(traj.state(0.0), traj.partial(0.0, 1));
  } catch (const SingularMatrixError&) {
    refused = true;
  }
  demand(refused, "derivative at the singular t=0 point was not refused");

  // 20 expansion points away from kinks: rank by conditioning of rho^{T_B},
  // keep them separated so they probe different regions
  std::vector<std::pair<double, double>> candidates;  // (min |eig|, t)
  for (int i = 1; i <= 1500; ++i) {
    const double t = 3.0 * unit * i / 1500.0;
    EigDecomp eig = partial_transpose_spectrum(traj.state(t));
    candidates.emplace_back(eig.min_abs_eigenvalue(), t);
  }
  std::sort(candidates.rbegin(), candidates.rend());
  std::vector<double> points;
  for (const auto& [margin, t] : candidates) {
    bool separated = true;
    for (double chosen : points) separated &= std::abs(chosen - t) > 0.01 * unit;
    if (separated) points.push_back(t);
    if (points.size() == 20) break;
  }
  demand(points.size() == 20, "could not find 20 well-conditioned points");

  auto neg_at = [&](double t) {
    DensityMatrix rho = traj.state(t);
    return oracle::negativity_eigensum(partial_transpose(rho.matrix(), rho.dims()));
  };
  double worst_d1 = 0.0, worst_d2 = 0.0;
  for (double t0 : points) {
    DensityMatrix rho = traj.state(t0);
    const Matrix drho = traj.partial(t0, 1);
    const double d1 = negativity_d1(rho, drho);
    const double d2 = negativity_d2(rho, drho, traj.partial(t0, 2));
    auto fd1 = oracle::fd_scalar(neg_at, t0, {{1e-5, 3e-6, 1e-6}, 1, true});
    auto fd2 = oracle::fd_scalar(neg_at, t0, {{4e-4, 2e-4, 1e-4}, 2, true});
    worst_d1 = std::max(worst_d1, rel_err(d1, fd1.value, 1.0));
    worst_d2 = std::max(worst_d2, rel_err(d2, fd2.value, 1.0));
  }
  demand_le(worst_d1, 1e-5, "d1 vs finite differences");
  demand_le(worst_d2, 1e-5, "d2 vs finite differences");

  // wherever rho^{T_B}(t) is strictly PSD the derivatives must vanish; with
  // the full (untruncated) coupling such instants are absent at t > 0, so
  // the clause is also exercised by the cavity dead zone in criterion 6
  int psd_instants = 0;
  for (int i = 1; i <= 600; ++i) {
    const double t = 3.0 * unit * i / 600.0;
    DensityMatrix rho = traj.state(t);
    EigDecomp eig = partial_transpose_spectrum(rho);
    if (eig.eigenvalues.minCoeff() > 0.0 && eig.invertible()) {
      ++psd_instants;
      const Matrix drho = traj.partial(t, 1);
      demand_le(std::abs(negativity_d1(rho, drho)), 1e-10, "d1 on a PSD instant");
      demand_le(std::abs(negativity_d2(rho, drho, traj.partial(t, 2))), 1e-10,
                "d2 on a PSD instant");
    }
  }
  return format("20 points: d1 rel err %.1e, d2 rel err %.1e; strictly-PSD "
                "instants on (0,3] units: %d (none exist for the full coupling)",
                worst_d1, worst_d2, psd_instants);
}

// Criterion 6: open-system reproduction: PSD grid, sudden death with exactly
// vanishing derivatives, dN/dp vs finite differences, kink locations.
std::string criterion_cavity() {
  // unit trace and PSD on the (t,p) grid
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      const Matrix m = cavity_state({j / 19.0, 2.0 * i / 19.0}).matrix();
      demand_le(std::abs(m.trace().real() - 1.0), 1e-13, "trace");
      Eigen::SelfAdjointEigenSolver<Matrix> es(m);
      demand(es.eigenvalues().minCoeff() >= -1e-12, "PSD floor violated");
    }
  }

  // sudden death at p = 0.35 with exactly zero derivatives afterwards
  Trajectory traj = cavity_time_trajectory(0.35);
  double death = -1.0;
  for (int i = 0; i <= 300; ++i) {
    const double t = 3.0 * i / 300.0;
    const DensityMatrix rho = traj.state(t);
    const double n = negativity(rho);
    if (death < 0.0 && t > 0.0 && n < 1e-12) death = t;
    if (death >= 0.0) {
      demand_le(n, 1e-12, "negativity after sudden death");
      demand_le(std::abs(negativity_d1(rho, traj.partial(t, 1))), 1e-12,
                "d1 after sudden death");
      demand_le(std::abs(negativity_d2(rho, traj.partial(t, 1), traj.partial(t, 2))),
                1e-12, "d2 after sudden death");
    }
  }
  demand(death > 0.5 && death < 2.0, "no finite-time death found at p = 0.35");

  // dN/dp from the patterned Jacobian vs finite differences, away from kinks
  double worst_dp = 0.0;
  for (double t : {0.4, 0.8, 1.2}) {
    Trajectory mix = cavity_mixing_trajectory(t);
    for (int j = 0; j < 12; ++j) {
      const double p = 0.52 + 0.04 * j;  // right of every kink location
      DensityMatrix rho = mix.state(p);
      EigDecomp eig = partial_transpose_spectrum(rho);
      if (eig.min_abs_eigenvalue() < 1e-3) continue;
      const double predicted = negativity_d1(rho, mix.partial(p, 1));
      auto fd = oracle::fd_scalar(
          [&](double pp) {
            DensityMatrix r = mix.state(pp);
            return oracle::negativity_eigensum(
                partial_transpose(r.matrix(), r.dims()));
          },
          p, oracle::FdScheme::central(1));
      worst_dp = std::max(worst_dp, rel_err(predicted, fd.value, 1.0));
    }
  }
  demand_le(worst_dp, 1e-6, "dN/dp vs finite differences");

  // kink locations from the d1 series
  const double expect_p[3] = {0.14, 0.04, 0.43};
  const double expect_t[3] = {0.4, 0.8, 1.2};
  std::string kinks;
  for (int k = 0; k < 3; ++k) {
    RunConfig config;
    config.experiment = Experiment::CavityMixing;
    config.params = {{"t", expect_t[k]}, {"grid", 501.0}};
    auto records = run_sweep(config).records;
    auto found = locate_kink(records);
    demand(!found.empty(), "no kink located");
    double nearest = found[0];
    for (double cand : found) {
      if (std::abs(cand - expect_p[k]) < std::abs(nearest - expect_p[k])) {
        nearest = cand;
      }
    }
    demand_le(std::abs(nearest - expect_p[k]), 0.02, "kink location");
    kinks += format(" t=%.1f: p=%.3f", expect_t[k], nearest);
  }
  return format("death at t=%.2f; dN/dp rel err %.1e; kinks%s", death, worst_dp,
                kinks.c_str());
}

// Criterion 7: order-3 directional differential vs high-order differences.
std::string criterion_higher_order() {
  std::mt19937_64 rng(1007);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 3 + trial % 3;
    Matrix a = random_hermitian_nonsingular(n, rng);
    Matrix v = random_hermitian(n, rng);
    const double d3 = directional_differentials(a, v, 3)[2];
    auto fd = oracle::fd_directional(
        a, v, [](const Matrix& x) { return trace_norm(x); }, 3,
        oracle::FdScheme::central(3));
    worst = std::max(worst, rel_err(d3, fd.value, 1.0));
  }
  demand_le(worst, 1e-3, "order-3 differential vs finite differences");
  return format("20 instances; max rel err %.1e", worst);
}

// Criterion 8: analytic-function shortcut for Tr(X^alpha).
std::string criterion_analytic_shortcut() {
  std::mt19937_64 rng(1008);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a = random_hermitian(4, rng);
    Matrix v = random_hermitian(4, rng);
    for (int alpha : {1, 2, 3}) {
      auto pair = analytic_shortcut_check(a, v, alpha);
      worst = std::max(worst, std::abs(pair.patterned - pair.unpatterned));
    }
  }
  demand_le(worst, 1e-10, "patterned vs unpatterned directional derivative");
  return format("alpha in {1,2,3}; max |difference| %.1e", worst);
}

// Criterion 9: rank(rho^{T_B}) = r^2 on random pure states.
std::string criterion_schmidt_rank() {
  std::mt19937_64 rng(1009);
  for (auto dims : {BipartiteDims{2, 2}, BipartiteDims{3, 3}}) {
    for (int trial = 0; trial < 100; ++trial) {
      Vector psi = random_state(dims.total(), rng);
      const Index r = oracle::schmidt_rank(psi, dims);
      Matrix rho_tb = partial_transpose((psi * psi.adjoint()).eval(), dims);
      demand(oracle::hermitian_rank(rho_tb) == r * r, "rank(rho^{T_B}) != r^2");
    }
  }
  return "100 pure states each at (2,2) and (3,3); rank cutoff 1e-10";
}

struct Criterion {
  int id;
  const char* label;
  double time_limit_s;
  std::function<std::string()> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "superoperator correctness", 10.0, criterion_superoperator},
      {2, "Jacobian correctness", 30.0, criterion_jacobian},
      {3, "Hessian correctness", 60.0, criterion_hessian},
      {4, "JCM 2x2 analytic reproduction", 10.0, criterion_jcm_2x2},
      {5, "bound-entangled dynamics", 60.0, criterion_bound_entangled},
      {6, "open-system reproduction", 60.0, criterion_cavity},
      {7, "higher-order scheme", 30.0, criterion_higher_order},
      {8, "analytic-shortcut property", 10.0, criterion_analytic_shortcut},
      {9, "Schmidt-rank fact", 10.0, criterion_schmidt_rank},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool passed = true;
    try {
      detail = criterion.body();
    } catch (const std::exception& e) {
      passed = false;
      detail = e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (elapsed > criterion.time_limit_s) {
      passed = false;
      detail += format(" [exceeded %.0f s budget]", criterion.time_limit_s);
    }
    std::printf("[%s] criterion %d: %s — %s (%.2f s)\n", passed ? "PASS" : "FAIL",
                criterion.id, criterion.label, detail.c_str(), elapsed);
    failures += passed ? 0 : 1;
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu acceptance criteria passed\n", criteria.size());
  return 0;
}
