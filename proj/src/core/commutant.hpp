#ifndef PERMSIM_CORE_COMMUTANT_HPP
#define PERMSIM_CORE_COMMUTANT_HPP

#include <Eigen/Dense>
#include <vector>

#include "core/adjacency.hpp"

namespace permsim {

// Clustered spectrum of a symmetric regular connected matrix. Eigenvalues
// are distinct and descending; the leading one is the row sum with
// multiplicity one, and the first column of q is 1/sqrt(n).
struct SpectralData {
  std::vector<double> eigenvalues;
  std::vector<int> multiplicities;
  int delta = 0;  // sum of squared multiplicities, leading one excluded
  Eigen::MatrixXd q;
};

SpectralData spectral_data(const AdjacencyMatrix& a);

// Orthonormal basis (Frobenius inner product) of the intertwiner subspace
//   { X : X 1 = X^T 1 = 0,  S X - X T = 0 }.
// entry_functionals row (i*n+j) holds the coordinates of the (i,j) entry
// functional in this basis; its rows have Euclidean norm at most 1.
struct CommutantBasis {
  int n = 0;
  int dim = 0;
  std::vector<Eigen::MatrixXd> w;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      entry_functionals;
};

CommutantBasis commutant_basis(const AdjacencyMatrix& s,
                               const AdjacencyMatrix& t);

// The inequality description of the polytope image: the body is
// { x : u_(i,j)^T x >= -1/n for all i,j } with u rows taken from here.
Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
inequality_vectors(const CommutantBasis& basis);

// Nullity of the stacked constraint system, floating-point rank with the
// 1e-9 relative singular-value cutoff.
int sylvester_nullity(const AdjacencyMatrix& s, const AdjacencyMatrix& t);

// Exact integer rank (fraction-free elimination); the authoritative value
// when the floating-point and spectral answers disagree. Capped at n = 16.
int sylvester_nullity_exact(const AdjacencyMatrix& s, const AdjacencyMatrix& t);

struct DimensionTriple {
  int aa = 0, ab = 0, bb = 0;
  bool equal = false;
};

// Dimensions of the three intertwiner subspaces for (A,A), (A,B), (B,B).
// Every value is cross-checked against the spectral prediction and
// arbitrated exactly on disagreement.
DimensionTriple dimension_triple(const AdjacencyMatrix& a,
                                 const AdjacencyMatrix& b);

// Coordinates of a matrix in the basis, and back.
Eigen::VectorXd matrix_coordinates(const CommutantBasis& basis,
                                   const Eigen::MatrixXd& x);
Eigen::MatrixXd coordinates_matrix(const CommutantBasis& basis,
                                   const Eigen::VectorXd& coords);

}  // namespace permsim

#endif
