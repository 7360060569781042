// Kronecker/vectorization algebra: vec, the single-entry basis, commutation
// matrices, partial transposition, and the partial commutation matrix that
// implements it on vectorized operators.
#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "negcalc/errors.hpp"

namespace negcalc {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;
using Complex = std::complex<double>;

// Dimensions d_A, d_B of a bipartite system. Joint indices put the A index
// slow: |a,b> sits at a*d_B + b. This layout, together with column-major
// vec, is normative for everything built on top.
struct BipartiteDims {
  Index d_A = 1;
  Index d_B = 1;

  Index total() const noexcept { return d_A * d_B; }

  void validate() const {
    if (d_A < 1 || d_B < 1) {
      throw std::invalid_argument("BipartiteDims: dimensions must be >= 1");
    }
  }

  void validate_against(const Matrix& m, const char* what) const {
    validate();
    if (m.rows() != m.cols() || m.rows() != total()) {
      throw std::invalid_argument(std::string(what) +
                                  ": matrix side does not equal d_A*d_B");
    }
  }
};

// vec stacks columns: entry (i,j) of an m x n matrix lands at j*m + i.
inline Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

inline Matrix unvec(const Vector& v, Index rows, Index cols) {
  if (rows < 0 || cols < 0 || v.size() != rows * cols) {
    throw std::invalid_argument("unvec: vector length does not equal rows*cols");
  }
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

// Single-entry matrix J^{ij}: one at (i,j), zero elsewhere. Indices 0-based.
inline Matrix single_entry(Index n, Index i, Index j) {
  if (i < 0 || j < 0 || i >= n || j >= n) {
    throw std::out_of_range("single_entry: index out of range");
  }
  Matrix m = Matrix::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  return Eigen::kroneckerProduct(a, b);
}

// Kronecker sum A (+) B = A x 1_m + 1_n x B for square A (n x n), B (m x m).
inline Matrix kron_sum(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols()) {
    throw std::invalid_argument("kron_sum: inputs must be square");
  }
  return kron(a, Matrix::Identity(b.rows(), b.rows())) +
         kron(Matrix::Identity(a.rows(), a.rows()), b);
}

// Permutation acting on vectorized operators; stores the index map so that
// apply() costs O(dim) while dense() materializes the 0/1 matrix on demand.
class PermutationSuperop {
 public:
  explicit PermutationSuperop(std::vector<Index> source) : src_(std::move(source)) {
    std::vector<bool> seen(src_.size(), false);
    for (Index s : src_) {
      if (s < 0 || s >= static_cast<Index>(src_.size()) || seen[s]) {
        throw std::invalid_argument("PermutationSuperop: source map is not a bijection");
      }
      seen[s] = true;
    }
  }

  Index dim() const noexcept { return static_cast<Index>(src_.size()); }

  // Row q of the result is entry src[q] of the input.
  Vector apply(const Vector& v) const {
    if (v.size() != dim()) {
      throw std::invalid_argument("PermutationSuperop::apply: length mismatch");
    }
    Vector out(dim());
    for (Index q = 0; q < dim(); ++q) out(q) = v(src_[q]);
    return out;
  }

  // Left-multiplication by the permutation: row q of the result is row src[q].
  Matrix apply_to_rows(const Matrix& m) const {
    if (m.rows() != dim()) {
      throw std::invalid_argument("PermutationSuperop::apply_to_rows: row mismatch");
    }
    Matrix out(m.rows(), m.cols());
    for (Index q = 0; q < dim(); ++q) out.row(q) = m.row(src_[q]);
    return out;
  }

  RealMatrix dense() const {
    RealMatrix out = RealMatrix::Zero(dim(), dim());
    for (Index q = 0; q < dim(); ++q) out(q, src_[q]) = 1.0;
    return out;
  }

  const std::vector<Index>& source() const noexcept { return src_; }

 private:
  std::vector<Index> src_;
};

// Commutation matrix K_{mn}: K vec(X) = vec(X^T) for every m x n matrix X.
inline PermutationSuperop commutation_matrix(Index m, Index n) {
  if (m < 1 || n < 1) {
    throw std::invalid_argument("commutation_matrix: dimensions must be >= 1");
  }
  std::vector<Index> src(static_cast<std::size_t>(m * n));
  for (Index q = 0; q < m * n; ++q) {
    const Index i = q / n;  // output slot q holds X^T(j,i) = X(i,j)
    const Index j = q % n;
    src[static_cast<std::size_t>(q)] = j * m + i;
  }
  return PermutationSuperop(std::move(src));
}

// Partial transposition over subsystem B: each d_B x d_B block is transposed
// in place. Involutive; preserves Hermiticity and trace.
inline Matrix partial_transpose(const Matrix& rho, BipartiteDims dims) {
  dims.validate_against(rho, "partial_transpose");
  Matrix out(rho.rows(), rho.cols());
  for (Index ai = 0; ai < dims.d_A; ++ai) {
    for (Index aj = 0; aj < dims.d_A; ++aj) {
      out.block(ai * dims.d_B, aj * dims.d_B, dims.d_B, dims.d_B) =
          rho.block(ai * dims.d_B, aj * dims.d_B, dims.d_B, dims.d_B).transpose();
    }
  }
  return out;
}

// Partial commutation matrix K_B: vec(rho^{T_B}) = K_B vec(rho). Equals the
// sum over single-entry matrices (1_{d_A} x J^{ji}) x (1_{d_A} x J^{ij}) and
// reduces to the commutation matrix when d_A = 1. Self-inverse.
inline PermutationSuperop partial_commutation_matrix(BipartiteDims dims) {
  dims.validate();
  const Index d = dims.total();
  std::vector<Index> src(static_cast<std::size_t>(d * d));
  for (Index q = 0; q < d * d; ++q) {
    const Index row = q % d;  // output entry (row, col) in column-major vec
    const Index col = q / d;
    const Index a = row / dims.d_B, bp = row % dims.d_B;
    const Index ap = col / dims.d_B, b = col % dims.d_B;
    // rho^{T_B}[(a,b'),(a',b)] = rho[(a,b),(a',b')]
    const Index src_row = a * dims.d_B + b;
    const Index src_col = ap * dims.d_B + bp;
    src[static_cast<std::size_t>(q)] = src_col * d + src_row;
  }
  return PermutationSuperop(std::move(src));
}

// Eigenbasis form of K_B: V diag(+1_k, -1_l) V^T with the k symmetric-sector
// columns first. Columns are vectorized J^{ij}_{d_A} x E with E running over
// Frobenius-normalized symmetric then antisymmetric d_B x d_B matrices.
struct KbEigenbasis {
  RealMatrix V;
  Index plus_count = 0;   // k
  Index minus_count = 0;  // l

  RealVector signs() const {
    RealVector s(plus_count + minus_count);
    s.head(plus_count).setOnes();
    s.tail(minus_count).setConstant(-1.0);
    return s;
  }

  RealMatrix reconstruct() const { return V * signs().asDiagonal() * V.transpose(); }
};

inline KbEigenbasis partial_commutation_eigenbasis(BipartiteDims dims) {
  dims.validate();
  const Index da = dims.d_A, db = dims.d_B, d = dims.total();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  std::vector<RealMatrix> sym, antisym;
  for (Index b = 0; b < db; ++b) {
    RealMatrix e = RealMatrix::Zero(db, db);
    e(b, b) = 1.0;
    sym.push_back(e);
  }
  for (Index b = 0; b < db; ++b) {
    for (Index c = b + 1; c < db; ++c) {
      RealMatrix e = RealMatrix::Zero(db, db);
      e(b, c) = inv_sqrt2;
      e(c, b) = inv_sqrt2;
      sym.push_back(e);
      RealMatrix o = RealMatrix::Zero(db, db);
      o(b, c) = inv_sqrt2;
      o(c, b) = -inv_sqrt2;
      antisym.push_back(o);
    }
  }

  KbEigenbasis basis;
  basis.plus_count = da * da * static_cast<Index>(sym.size());
  basis.minus_count = da * da * static_cast<Index>(antisym.size());
  basis.V.resize(d * d, d * d);

  Index col = 0;
  auto emit = [&](const std::vector<RealMatrix>& block) {
    for (Index i = 0; i < da; ++i) {
      for (Index j = 0; j < da; ++j) {
        RealMatrix jij = RealMatrix::Zero(da, da);
        jij(i, j) = 1.0;
        for (const RealMatrix& e : block) {
          RealMatrix elem = Eigen::kroneckerProduct(jij, e);
          basis.V.col(col++) = Eigen::Map<const RealVector>(elem.data(), elem.size());
        }
      }
    }
  };
  emit(sym);
  emit(antisym);
  return basis;
}

// Reduced state over A: out(a,a') = sum_b rho[(a,b),(a',b)].
inline Matrix partial_trace_b(const Matrix& rho, BipartiteDims dims) {
  dims.validate_against(rho, "partial_trace_b");
  Matrix out = Matrix::Zero(dims.d_A, dims.d_A);
  for (Index a = 0; a < dims.d_A; ++a) {
    for (Index ap = 0; ap < dims.d_A; ++ap) {
      for (Index b = 0; b < dims.d_B; ++b) {
        out(a, ap) += rho(a * dims.d_B + b, ap * dims.d_B + b);
      }
    }
  }
  return out;
}

}  // namespace negcalc
