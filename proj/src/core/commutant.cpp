#include "core/commutant.hpp"

#include <gmpxx.h>

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace permsim {

namespace {

Eigen::MatrixXd to_dense(const AdjacencyMatrix& a) {
  Eigen::MatrixXd m(a.n, a.n);
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) m(i, j) = static_cast<double>(a(i, j));
  return m;
}

// rows: n row sums, n column sums, then the n^2 intertwining equations
// S X - X T = 0 over vec(X) in column-major order.
Eigen::MatrixXd constraint_matrix(const AdjacencyMatrix& s,
                                  const AdjacencyMatrix& t) {
  int n = s.n;
  int cols = n * n;
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(2 * n + cols, cols);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) k(i, i + j * n) = 1.0;  // row sum i
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) k(n + j, i + j * n) = 1.0;  // column sum j
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int r = 2 * n + i + j * n;
      for (int l = 0; l < n; ++l) {
        k(r, l + j * n) += static_cast<double>(s(i, l));
        k(r, i + l * n) -= static_cast<double>(t(l, j));
      }
    }
  return k;
}

void require_compatible(const AdjacencyMatrix& s, const AdjacencyMatrix& t) {
  if (s.n != t.n) throw std::invalid_argument("matrix orders differ");
  if (!s.symmetric() || !t.symmetric())
    throw std::invalid_argument("both matrices must be symmetric");
  if (!s.degree.has_value() || !t.degree.has_value())
    throw std::invalid_argument("both matrices must have constant row sums");
  if (*s.degree != *t.degree)
    throw std::invalid_argument("row-sum mismatch between the two matrices");
}

}  // namespace

SpectralData spectral_data(const AdjacencyMatrix& a) {
  if (!a.symmetric())
    throw std::invalid_argument("spectral data needs a symmetric matrix");
  if (!a.degree.has_value())
    throw std::invalid_argument("spectral data needs a regular matrix");
  if (!a.connected)
    throw std::invalid_argument("spectral data needs a connected matrix");
  int n = a.n;
  double row_sum = static_cast<double>(*a.degree);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_dense(a));
  if (es.info() != Eigen::Success)
    throw InternalError("eigendecomposition failed");

  // descending order
  Eigen::VectorXd evals = es.eigenvalues().reverse();
  Eigen::MatrixXd q = es.eigenvectors().rowwise().reverse();

  SpectralData out;
  double tol = 1e-7 * std::max(1.0, std::abs(row_sum));
  for (int i = 0; i < n; ++i) {
    if (out.eigenvalues.empty() || out.eigenvalues.back() - evals(i) > tol) {
      out.eigenvalues.push_back(evals(i));
      out.multiplicities.push_back(1);
    } else {
      ++out.multiplicities.back();
    }
  }
  if (out.multiplicities[0] != 1)
    throw InternalError("leading eigenvalue is not simple on a connected input");
  if (std::abs(out.eigenvalues[0] - row_sum) > tol)
    throw InternalError("leading eigenvalue does not match the row sum");
  for (size_t i = 1; i < out.multiplicities.size(); ++i)
    out.delta += out.multiplicities[i] * out.multiplicities[i];

  // pin the leading eigenvector to 1/sqrt(n)
  Eigen::VectorXd ones = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
  if (q.col(0).dot(ones) < 0) q.col(0) = -q.col(0);
  if ((q.col(0) - ones).norm() > 1e-8)
    throw InternalError("leading eigenvector deviates from the constant vector");
  q.col(0) = ones;
  out.q = q;

  // orthonormality and block-diagonalization checks
  Eigen::MatrixXd qtq = q.transpose() * q;
  if ((qtq - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10)
    throw InternalError("eigenvector matrix is not orthonormal");
  Eigen::MatrixXd d = q.transpose() * to_dense(a) * q;
  int offset = 0;
  for (size_t c = 0; c < out.eigenvalues.size(); ++c) {
    int m = out.multiplicities[c];
    d.block(offset, offset, m, m) -=
        out.eigenvalues[c] * Eigen::MatrixXd::Identity(m, m);
    offset += m;
  }
  if (d.cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, std::abs(row_sum)))
    throw InternalError("eigenbasis does not block-diagonalize the matrix");
  return out;
}

CommutantBasis commutant_basis(const AdjacencyMatrix& s,
                               const AdjacencyMatrix& t) {
  require_compatible(s, t);
  int n = s.n;
  Eigen::MatrixXd k = constraint_matrix(s, t);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(k, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double cutoff = sv.size() ? 1e-9 * sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  int dim = n * n - rank;

  CommutantBasis basis;
  basis.n = n;
  basis.dim = dim;
  basis.w.reserve(dim);
  double s_norm = to_dense(s).norm();
  for (int c = 0; c < dim; ++c) {
    Eigen::VectorXd v = svd.matrixV().col(n * n - 1 - c);
    Eigen::MatrixXd w = Eigen::Map<Eigen::MatrixXd>(v.data(), n, n);
    double residual = (to_dense(s) * w - w * to_dense(t)).norm();
    if (residual > 1e-8 * std::max(1.0, s_norm))
      throw InternalError("nullspace vector violates the intertwining equation");
    if (w.rowwise().sum().cwiseAbs().maxCoeff() > 1e-8 ||
        w.colwise().sum().cwiseAbs().maxCoeff() > 1e-8)
      throw InternalError("nullspace vector violates the sum constraints");
    basis.w.push_back(std::move(w));
  }
  for (int a = 0; a < dim; ++a)
    for (int b = a; b < dim; ++b) {
      double ip = (basis.w[a].array() * basis.w[b].array()).sum();
      if (std::abs(ip - (a == b ? 1.0 : 0.0)) > 1e-10)
        throw InternalError("basis is not orthonormal");
    }

  basis.entry_functionals = inequality_vectors(basis);
  return basis;
}

Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
inequality_vectors(const CommutantBasis& basis) {
  int n = basis.n;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> u(
      n * n, basis.dim);
  for (int a = 0; a < basis.dim; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        u(i * n + j, a) = basis.w[a](i, j);
  for (int r = 0; r < u.rows(); ++r)
    if (u.row(r).norm() > 1.0 + 1e-12)
      throw InternalError("entry functional exceeds unit norm");
  return u;
}

int sylvester_nullity(const AdjacencyMatrix& s, const AdjacencyMatrix& t) {
  require_compatible(s, t);
  int n = s.n;
  Eigen::MatrixXd k = constraint_matrix(s, t);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(k);
  const auto& sv = svd.singularValues();
  double cutoff = sv.size() ? 1e-9 * sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return n * n - rank;
}

int sylvester_nullity_exact(const AdjacencyMatrix& s, const AdjacencyMatrix& t) {
  require_compatible(s, t);
  int n = s.n;
  if (n > 16)
    throw OverCapError("exact nullity is capped at order 16");
  int rows = 2 * n + n * n, cols = n * n;
  std::vector<mpz_class> m(static_cast<size_t>(rows) * cols);
  auto at = [&](int r, int c) -> mpz_class& {
    return m[static_cast<size_t>(r) * cols + c];
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) at(i, i + j * n) = 1;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) at(n + j, i + j * n) = 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int r = 2 * n + i + j * n;
      for (int l = 0; l < n; ++l) {
        at(r, l + j * n) += s(i, l);
        at(r, i + l * n) -= t(l, j);
      }
    }

  // fraction-free elimination
  mpz_class prev = 1;
  int rank = 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int pivot = -1;
    for (int r = rank; r < rows; ++r)
      if (at(r, c) != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    if (pivot != rank)
      for (int j = c; j < cols; ++j) std::swap(at(pivot, j), at(rank, j));
    for (int r = rank + 1; r < rows; ++r) {
      for (int j = c + 1; j < cols; ++j) {
        mpz_class v = at(rank, c) * at(r, j) - at(r, c) * at(rank, j);
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        at(r, j) = v;
      }
      at(r, c) = 0;
    }
    prev = at(rank, c);
    ++rank;
  }
  return cols - rank;
}

namespace {

// predicted cross dimension: sum of multiplicity products over shared
// non-leading eigenvalues
int predicted_cross_dimension(const SpectralData& sa, const SpectralData& sb,
                              double tol) {
  int dim = 0;
  for (size_t i = 1; i < sa.eigenvalues.size(); ++i)
    for (size_t j = 1; j < sb.eigenvalues.size(); ++j)
      if (std::abs(sa.eigenvalues[i] - sb.eigenvalues[j]) <= tol)
        dim += sa.multiplicities[i] * sb.multiplicities[j];
  return dim;
}

int arbitrated_dimension(const AdjacencyMatrix& x, const AdjacencyMatrix& y,
                         int predicted) {
  int numeric = sylvester_nullity(x, y);
  if (numeric == predicted) return numeric;
  return sylvester_nullity_exact(x, y);
}

}  // namespace

DimensionTriple dimension_triple(const AdjacencyMatrix& a,
                                 const AdjacencyMatrix& b) {
  auto sa = spectral_data(a);
  auto sb = spectral_data(b);
  double tol = 1e-7 * std::max(1.0, std::abs(sa.eigenvalues[0]));

  DimensionTriple t;
  t.aa = arbitrated_dimension(a, a, sa.delta);
  t.bb = arbitrated_dimension(b, b, sb.delta);
  t.ab = arbitrated_dimension(a, b, predicted_cross_dimension(sa, sb, tol));
  t.equal = (t.aa == t.ab && t.ab == t.bb);
  return t;
}

Eigen::VectorXd matrix_coordinates(const CommutantBasis& basis,
                                   const Eigen::MatrixXd& x) {
  Eigen::VectorXd c(basis.dim);
  for (int a = 0; a < basis.dim; ++a)
    c(a) = (basis.w[a].array() * x.array()).sum();
  return c;
}

Eigen::MatrixXd coordinates_matrix(const CommutantBasis& basis,
                                   const Eigen::VectorXd& coords) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(basis.n, basis.n);
  for (int a = 0; a < basis.dim; ++a) x += coords(a) * basis.w[a];
  return x;
}

}  // namespace permsim
