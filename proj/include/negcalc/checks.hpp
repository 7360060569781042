// Self-contained invariant suite behind the `invariants` command: every
// structural identity of the library checked against brute force on seeded
// random inputs. One CheckResult per named property.
#pragma once

#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "negcalc/calculus.hpp"
#include "negcalc/models.hpp"
#include "negcalc/negativity.hpp"
#include "negcalc/oracle.hpp"
#include "negcalc/tensor.hpp"

namespace negcalc::checks {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline std::string fmt(const char* pattern, double value) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), pattern, value);
  return buf;
}

inline Matrix random_complex(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = Complex(dist(rng), dist(rng));
  return m;
}

inline Matrix random_hermitian(Index n, std::mt19937_64& rng) {
  Matrix g = random_complex(n, n, rng);
  return 0.5 * (g + g.adjoint()).eval();
}

inline Matrix random_hermitian_nonsingular(Index n, std::mt19937_64& rng) {
  for (;;) {
    Matrix a = random_hermitian(n, rng);
    EigDecomp eig = hermitian_eig(a);
    if (eig.min_abs_eigenvalue() > 5e-2 * eig.max_abs_eigenvalue()) return a;
  }
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
  for (Index i = 0; i < n; ++i) v(i) = Complex(dist(rng), dist(rng));
  return v / v.norm();
}

}  // namespace detail

inline std::vector<CheckResult> run_invariant_suite(std::uint64_t seed, int samples) {
  using detail::fmt;
  std::vector<CheckResult> results;
  auto run = [&](const char* name, auto&& body) {
    CheckResult r;
    r.name = name;
    try {
      r.detail = body();
      r.passed = true;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = e.what();
    }
    results.push_back(std::move(r));
  };
  auto demand = [](bool ok, const std::string& why) {
    if (!ok) throw std::runtime_error(why);
  };
  const int n_small = std::max(4, samples / 4);

  run("commutation-transposes-vec", [&] {
    std::mt19937_64 rng(seed + 1);
    double worst = 0.0;
    for (Index m = 1; m <= 5; ++m) {
      for (Index n = 1; n <= 5; ++n) {
        for (int trial = 0; trial < n_small; ++trial) {
          Matrix x = detail::random_complex(m, n, rng);
          Vector got = commutation_matrix(m, n).apply(vec(x));
          worst = std::max(
              worst, (got - vec(x.transpose().eval())).cwiseAbs().maxCoeff());
        }
      }
    }
    if (worst != 0.0) throw std::runtime_error("K vec(X) != vec(X^T)");
    return std::string("exact on all m,n <= 5");
  });

  run("commutation-symmetric-self-inverse", [&] {
    for (Index n = 2; n <= 5; ++n) {
      RealMatrix k = commutation_matrix(n, n).dense();
      demand((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0, "K not symmetric");
      demand((k * k - RealMatrix::Identity(n * n, n * n)).cwiseAbs().maxCoeff() == 0.0,
             "K^2 != 1");
    }
    return std::string("exact for n <= 5");
  });

  run("partial-commutation-involution", [&] {
    for (auto dims :
         {BipartiteDims{2, 2}, BipartiteDims{2, 3}, BipartiteDims{2, 4}}) {
      RealMatrix kb = partial_commutation_matrix(dims).dense();
      const Index d2 = dims.total() * dims.total();
      demand((kb * kb - RealMatrix::Identity(d2, d2)).cwiseAbs().maxCoeff() == 0.0,
             "K_B^2 != 1");
      demand(kb.cwiseAbs().sum() == static_cast<double>(d2), "K_B not a permutation");
    }
    return std::string("permutation and involution at (2,2),(2,3),(2,4)");
  });

  run("partial-commutation-matches-partial-transpose", [&] {
    std::mt19937_64 rng(seed + 2);
    for (auto dims :
         {BipartiteDims{2, 2}, BipartiteDims{2, 3}, BipartiteDims{2, 4}}) {
      auto kb = partial_commutation_matrix(dims);
      for (int trial = 0; trial < samples; ++trial) {
        Matrix rho = detail::random_hermitian(dims.total(), rng);
        Matrix via = unvec(kb.apply(vec(rho)), dims.total(), dims.total());
        demand((via - partial_transpose(rho, dims)).cwiseAbs().maxCoeff() == 0.0,
               "K_B vec disagrees with elementwise partial transpose");
      }
    }
    return fmt("exact on %.0f samples per dims", double(samples));
  });

  run("partial-commutation-reduces-to-commutation", [&] {
    for (Index n : {2, 3, 4, 5}) {
      demand(partial_commutation_matrix({1, n}).source() ==
                 commutation_matrix(n, n).source(),
             "K_B at d_A=1 differs from K");
    }
    return std::string("K_B = K at d_A = 1, n <= 5");
  });

  run("partial-commutation-eigenbasis", [&] {
    double worst = 0.0;
    for (auto dims :
         {BipartiteDims{2, 2}, BipartiteDims{2, 3}, BipartiteDims{2, 4}}) {
      auto basis = partial_commutation_eigenbasis(dims);
      demand(basis.plus_count ==
                 dims.d_A * dims.d_A * dims.d_B * (dims.d_B + 1) / 2,
             "symmetric count k wrong");
      demand(basis.minus_count ==
                 dims.d_A * dims.d_A * dims.d_B * (dims.d_B - 1) / 2,
             "antisymmetric count l wrong");
      RealMatrix kb = partial_commutation_matrix(dims).dense();
      worst = std::max(worst, (basis.reconstruct() - kb).cwiseAbs().maxCoeff());
      const Index d2 = dims.total() * dims.total();
      worst = std::max(worst, (basis.V.transpose() * basis.V -
                               RealMatrix::Identity(d2, d2))
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    demand(worst <= 1e-12, "reconstruction above 1e-12");
    return fmt("max reconstruction residual %.1e", worst);
  });

  run("partial-transpose-involution", [&] {
    std::mt19937_64 rng(seed + 3);
    for (int trial = 0; trial < samples; ++trial) {
      BipartiteDims dims{2, 2 + trial % 3};
      Matrix rho = detail::random_hermitian(dims.total(), rng);
      Matrix pt = partial_transpose(rho, dims);
      demand((partial_transpose(pt, dims) - rho).cwiseAbs().maxCoeff() == 0.0,
             "involution failed");
      demand(std::abs((pt - rho).trace()) < 1e-13, "trace not preserved");
      demand((pt - pt.adjoint().eval()).cwiseAbs().maxCoeff() < 1e-13,
             "Hermiticity not preserved");
    }
    return fmt("%.0f samples", double(samples));
  });

  run("trace-norm-scale-covariance", [&] {
    std::mt19937_64 rng(seed + 4);
    double worst = 0.0;
    for (int trial = 0; trial < n_small; ++trial) {
      Matrix a = detail::random_hermitian_nonsingular(4, rng);
      worst = std::max(worst, std::abs(trace_norm((-2.5 * a).eval()) -
                                       2.5 * trace_norm(a)));
      RowVector j1 = trace_norm_jacobian_hermitian(a);
      RowVector j2 = trace_norm_jacobian_hermitian((3.0 * a).eval());
      worst = std::max(worst, (j1 - j2).cwiseAbs().maxCoeff());
    }
    demand(worst <= 1e-11, "scale covariance violated");
    return fmt("max deviation %.1e", worst);
  });

  run("patterned-jacobian-real-directions", [&] {
    std::mt19937_64 rng(seed + 5);
    double worst = 0.0;
    for (int trial = 0; trial < samples; ++trial) {
      Matrix a = detail::random_hermitian_nonsingular(4, rng);
      RowVector j = trace_norm_jacobian_hermitian(a);
      Matrix v = detail::random_hermitian(4, rng);
      worst = std::max(worst, std::abs((j * vec(v)).value().imag()));
    }
    demand(worst <= 1e-10, "directional derivative has imaginary part");
    return fmt("max |Im| %.1e", worst);
  });

  run("patterned-jacobian-gradient-fd", [&] {
    std::mt19937_64 rng(seed + 6);
    double worst = 0.0;
    for (int trial = 0; trial < std::max(2, samples / 10); ++trial) {
      const Index n = trial % 2 == 0 ? 4 : 6;
      Matrix a = detail::random_hermitian_nonsingular(n, rng);
      RowVector j = trace_norm_jacobian_hermitian(a);
      for (Index i = 0; i < n; ++i) {
        for (Index k = i; k < n; ++k) {
          std::vector<Matrix> dirs;
          if (i == k) {
            dirs.push_back(single_entry(n, i, i));
          } else {
            dirs.push_back(single_entry(n, i, k) + single_entry(n, k, i));
            dirs.push_back(Complex(0, 1) *
                           (single_entry(n, i, k) - single_entry(n, k, i)));
          }
          for (const Matrix& dir : dirs) {
            const double predicted = (j * vec(dir)).value().real();
            auto fd = oracle::fd_scalar(
                [&](double s) { return trace_norm((a + s * dir).eval()); }, 0.0,
                oracle::FdScheme::central(1));
            worst = std::max(worst, std::abs(predicted - fd.value) /
                                        std::max(std::abs(fd.value), 1e-2));
          }
        }
      }
    }
    demand(worst <= 1e-5, "gradient check above 1e-5");
    return fmt("max rel err %.1e", worst);
  });

  run("patterned-jacobian-twice-unpatterned", [&] {
    std::mt19937_64 rng(seed + 7);
    double worst = 0.0;
    for (int trial = 0; trial < n_small; ++trial) {
      Matrix a = detail::random_hermitian_nonsingular(5, rng);
      RowVector patterned = trace_norm_jacobian_hermitian(a);
      WirtingerJacobian unpat = trace_norm_jacobian_unpatterned(a);
      worst = std::max(worst, (patterned - 2.0 * unpat.d_x).cwiseAbs().maxCoeff());
    }
    demand(worst <= 1e-10, "patterned != 2x unpatterned");
    return fmt("max deviation %.1e", worst);
  });

  run("hessian-positive-cone-zero", [&] {
    std::mt19937_64 rng(seed + 8);
    for (int trial = 0; trial < n_small; ++trial) {
      Matrix g = detail::random_complex(4, 4, rng);
      Matrix pd = g * g.adjoint() + 0.1 * Matrix::Identity(4, 4);
      demand(trace_norm_hessian_hermitian(pd).cwiseAbs().maxCoeff() == 0.0,
             "Hessian nonzero at positive definite argument");
    }
    return std::string("identically zero on the positive cone");
  });

  run("hessian-cross-form", [&] {
    std::mt19937_64 rng(seed + 9);
    double worst = 0.0;
    for (int trial = 0; trial < n_small; ++trial) {
      Matrix a = detail::random_hermitian_nonsingular(4, rng);
      Matrix spectral = trace_norm_hessian_hermitian(a);
      worst = std::max(worst, (spectral - trace_norm_hessian_hermitian_kron(a))
                                  .cwiseAbs()
                                  .maxCoeff());
      Matrix assembled =
          hermitian_hessian_from_unpatterned(trace_norm_hessians_unpatterned(a));
      worst = std::max(worst, (spectral - assembled).cwiseAbs().maxCoeff());
      Matrix kd = commutation_matrix(4, 4).dense().cast<Complex>();
      Matrix kh = kd * spectral;
      worst = std::max(worst, (kh - kh.adjoint().eval()).cwiseAbs().maxCoeff());
    }
    demand(worst <= 1e-10, "Hessian forms disagree beyond 1e-10");
    return fmt("max cross-form deviation %.1e", worst);
  });

  run("hessian-quadratic-form-fd", [&] {
    std::mt19937_64 rng(seed + 10);
    double worst = 0.0;
    for (int trial = 0; trial < n_small; ++trial) {
      Matrix a = detail::random_hermitian_nonsingular(4, rng);
      Matrix h = trace_norm_hessian_hermitian(a);
      Matrix v = detail::random_hermitian(4, rng);
      Vector w = vec(v);
      const double quad = (w.transpose() * (h * w)).value().real();
      auto fd = oracle::fd_directional(
          a, v, [](const Matrix& x) { return trace_norm(x); }, 2,
          oracle::FdScheme::central(2));
      worst = std::max(worst, std::abs(quad - fd.value) /
                                  std::max(1.0, std::abs(fd.value)));
    }
    demand(worst <= 1e-4, "quadratic form vs FD above 1e-4");
    return fmt("max rel err %.1e", worst);
  });

  run("negativity-two-forms", [&] {
    std::mt19937_64 rng(seed + 11);
    double worst = 0.0;
    for (auto dims :
         {BipartiteDims{2, 2}, BipartiteDims{2, 3}, BipartiteDims{2, 4}}) {
      for (int trial = 0; trial < samples; ++trial) {
        Matrix rho = detail::random_density(dims.total(), rng);
        const double engine = negativity(DensityMatrix(rho, dims));
        const double eigensum =
            oracle::negativity_eigensum(partial_transpose(rho, dims));
        worst = std::max(worst, std::abs(engine - eigensum));
      }
    }
    demand(worst <= 1e-12, "trace-norm and eigensum forms disagree");
    return fmt("max |difference| %.1e", worst);
  });

  run("negativity-d1-fd", [&] {
    std::mt19937_64 rng(seed + 12);
    const BipartiteDims dims{2, 3};
    double worst = 0.0;
    int done = 0;
    while (done < n_small) {
      Matrix rho = detail::random_density(6, rng);
      if (hermitian_eig(partial_transpose(rho, dims)).min_abs_eigenvalue() < 5e-2) {
        continue;
      }
      Matrix drho = detail::random_hermitian_traceless(6, rng);
      const double predicted = negativity_d1(DensityMatrix(rho, dims), drho);
      auto fd = oracle::fd_scalar(
          [&](double s) {
            return oracle::negativity_eigensum(
                partial_transpose((rho + s * drho).eval(), dims));
          },
          0.0, oracle::FdScheme::central(1));
      worst = std::max(worst, std::abs(predicted - fd.value) /
                                  std::max(1.0, std::abs(fd.value)));
      ++done;
    }
    demand(worst <= 1e-6, "d1 vs FD above 1e-6");
    return fmt("max rel err %.1e", worst);
  });

  run("directional-differentials-fd", [&] {
    std::mt19937_64 rng(seed + 13);
    double worst = 0.0;
    for (int trial = 0; trial < n_small; ++trial) {
      Matrix a = detail::random_hermitian_nonsingular(4, rng);
      Matrix v = detail::random_hermitian(4, rng);
      auto d = directional_differentials(a, v, 3);
      for (int order = 1; order <= 3; ++order) {
        auto fd = oracle::fd_directional(
            a, v, [](const Matrix& x) { return trace_norm(x); }, order,
            oracle::FdScheme::central(order));
        const double tol_scale = order == 3 ? 1e-3 : 1e-5;
        worst = std::max(worst, std::abs(d[order - 1] - fd.value) /
                                    (tol_scale * std::max(1.0, std::abs(fd.value))));
      }
    }
    demand(worst <= 1.0, "differential vs FD beyond per-order tolerance");
    return fmt("worst tolerance fraction %.2f", worst);
  });

  run("analytic-shortcut", [&] {
    std::mt19937_64 rng(seed + 14);
    double worst = 0.0;
    for (int trial = 0; trial < n_small; ++trial) {
      Matrix a = detail::random_hermitian(4, rng);
      Matrix v = detail::random_hermitian(4, rng);
      for (int alpha : {1, 2, 3}) {
        auto pair = analytic_shortcut_check(a, v, alpha);
        worst = std::max(worst, std::abs(pair.patterned - pair.unpatterned));
      }
    }
    demand(worst <= 1e-10, "patterned and unpatterned derivatives differ");
    return fmt("max |difference| %.1e", worst);
  });

  run("schmidt-rank-partial-transpose", [&] {
    std::mt19937_64 rng(seed + 15);
    for (auto dims : {BipartiteDims{2, 2}, BipartiteDims{3, 3}}) {
      for (int trial = 0; trial < samples; ++trial) {
        Vector psi = detail::random_state(dims.total(), rng);
        const Index r = oracle::schmidt_rank(psi, dims);
        Matrix rho_tb = partial_transpose((psi * psi.adjoint()).eval(), dims);
        demand(oracle::hermitian_rank(rho_tb) == r * r,
               "rank(rho^{T_B}) != r^2");
      }
    }
    return fmt("r^2 law held on %.0f pure states per dims", double(samples));
  });

  run("jcm-analytic-dndt", [&] {
    const JcmParams params{10.0, 1.0, 5.0, 8};
    Trajectory traj = jcm_analytic_trajectory(params);
    const double period = 2.0 * M_PI / params.rabi();
    double worst = 0.0;
    for (int i = 1; i <= 25; ++i) {
      const double t = 0.93 * period * i / 26.0;
      const double closed = jcm_analytic_dndt(t, params);
      const double engine = negativity_d1(traj.state(t), traj.partial(t, 1));
      worst = std::max(worst,
                       std::abs(closed - engine) / std::max(1.0, std::abs(closed)));
    }
    demand(worst <= 1e-10, "closed form vs engine above 1e-10");
    return fmt("max rel err %.1e", worst);
  });

  run("jcm-excitation-conservation", [&] {
    const JcmParams params{10.0, 1.0, 5.0, 6};
    const Matrix h = jcm_hamiltonian(params);
    const Matrix n_op = jcm_total_excitation(6);
    const double comm = (h * n_op - n_op * h).cwiseAbs().maxCoeff();
    demand(comm <= 1e-12, "[H, N] != 0");
    Vector e3 = Vector::Zero(12);
    e3(9) = 1.0;
    DensityMatrix rho0((e3 * e3.adjoint()).eval(), {2, 6});
    const Matrix rt = evolve_closed(h, rho0, 1.3).matrix();
    const double kept = rt(9, 9).real() + rt(4, 4).real();
    demand(std::abs(1.0 - kept) <= 1e-12, "sector leakage above 1e-12");
    return fmt("commutator %.1e, sector leakage below 1e-12", comm);
  });

  run("cavity-grid-psd-trace", [&] {
    double min_eig = 1.0, worst_trace = 0.0;
    for (int i = 0; i < 20; ++i) {
      for (int j = 0; j < 20; ++j) {
        const CavityParams at{j / 19.0, 2.0 * i / 19.0};
        const Matrix m = cavity_state(at).matrix();
        worst_trace = std::max(worst_trace, std::abs(m.trace().real() - 1.0));
        Eigen::SelfAdjointEigenSolver<Matrix> es(m);
        min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
        for (int order : {1, 2}) {
          const Matrix d = cavity_partial(at, CavityWrt::Time, order);
          if (std::abs(d.trace().real()) > 1e-13) {
            throw std::runtime_error("time partial not traceless");
          }
        }
      }
    }
    demand(min_eig >= -1e-12, "cavity state not PSD on the grid");
    demand(worst_trace <= 1e-13, "cavity trace drifts from 1");
    return fmt("grid eigenvalue floor %.1e", min_eig);
  });

  run("fd-error-estimates", [&] {
    std::mt19937_64 rng(seed + 16);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    int covered = 0, total = 0;
    for (int trial = 0; trial < std::max(40, samples); ++trial) {
      const double a = 2.0 * unif(rng), b = 3.0 * unif(rng), c = unif(rng);
      const double x0 = unif(rng);
      auto f = [&](double x) { return a * std::sin(b * x) + c * x * x * x; };
      for (int order = 1; order <= 2; ++order) {
        const double exact = order == 1
                                 ? a * b * std::cos(b * x0) + 3.0 * c * x0 * x0
                                 : -a * b * b * std::sin(b * x0) + 6.0 * c * x0;
        auto fd = oracle::fd_scalar(f, x0, oracle::FdScheme::central(order));
        ++total;
        if (std::abs(fd.value - exact) <= fd.error_estimate) ++covered;
      }
    }
    demand(covered * 100 >= total * 95, "error estimate coverage below 95%");
    return fmt("coverage %.1f%%", 100.0 * covered / total);
  });

  return results;
}

}  // namespace negcalc::checks
