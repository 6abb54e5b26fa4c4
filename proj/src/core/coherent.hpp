#ifndef PERMSIM_CORE_COHERENT_HPP
#define PERMSIM_CORE_COHERENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/adjacency.hpp"

namespace permsim {

// One (0,1) element of a canonical coherent basis, stored by its support.
struct BasisElement {
  std::vector<std::pair<int, int>> support;  // sorted row-major
  bool diagonal = false;
  bool symmetric = false;
  int transpose_partner = -1;  // index of the element equal to the transpose
  int64_t row_degree = 0;      // ones per nonzero row
  int64_t col_degree = 0;      // ones per nonzero column
};

// Disjoint (0,1) basis of a coherent algebra. Element order is canonical:
// it is derived from refinement signatures only, so relabeling the
// vertices of the input never changes which class gets which index.
// Diagonal classes come first.
struct CanonicalBasis {
  int n = 0;
  std::vector<BasisElement> elements;
  int dim() const { return static_cast<int>(elements.size()); }
  std::vector<int> position_class() const;  // class index per (i*n+j)
};

// Integer tensor with E_i E_j = sum_k t(i,j,k) E_k, stored sparsely.
struct StructureTensor {
  int d = 0;
  std::vector<std::vector<std::pair<int, int64_t>>> slices;  // (k, t) sorted
  const std::vector<std::pair<int, int64_t>>& slice(int i, int j) const {
    return slices[static_cast<size_t>(i) * d + j];
  }
  int64_t at(int i, int j, int k) const;
};

// Minimal coherent algebra containing the given matrices (and I, J).
// The refinement loop runs at most n^2 rounds.
CanonicalBasis coherent_closure(const std::vector<AdjacencyMatrix>& mats);

// Same, for real inputs: entries within 1e-12 relative tolerance are
// merged into one level before refinement.
CanonicalBasis coherent_closure_real(const std::vector<std::vector<double>>& mats,
                                     int n);

// Exhaustive structural check; throws InternalError on violation.
void check_basis_invariants(const CanonicalBasis& basis);

// Throws InternalError when some product is not constant on some class,
// i.e. the input was not actually coherent.
StructureTensor structure_tensor(const CanonicalBasis& basis);

// Flag- and tensor-preserving bijection between two bases, or nullopt.
// nullopt soundly refutes permutational similarity of the generators.
std::optional<std::vector<int>> match_algebras(const CanonicalBasis& a,
                                               const StructureTensor& ta,
                                               const CanonicalBasis& b,
                                               const StructureTensor& tb);

enum class ReductionReading {
  WeightedSum,      // weighted sum of off-diagonal classes plus a diagonal fill
  RawPlusDiagonal,  // audit variant: original matrix plus a diagonal fill
};

struct ReducedPair {
  AdjacencyMatrix a1, b1;
  std::vector<int64_t> weights_a, weights_b;  // per element; 0 on diagonal classes
  int64_t row_sum_a = 0, row_sum_b = 0;
  // True when the supplied isomorphism maps classes weight-to-weight;
  // both sides always use the canonical weight assignment.
  bool iota_weight_consistent = true;
};

// Builds a symmetric positive integer pair with equal row sums and entries
// below n^3, permutationally similar iff the originals are. Off-diagonal
// classes get weights 1..p following the canonical element order, transpose
// partners sharing a weight; the diagonal is filled to equalize row sums.
ReducedPair reduce_to_regular_pair(const CanonicalBasis& a,
                                   const CanonicalBasis& b,
                                   const std::vector<int>& iota,
                                   ReductionReading reading =
                                       ReductionReading::WeightedSum,
                                   const AdjacencyMatrix* raw_a = nullptr,
                                   const AdjacencyMatrix* raw_b = nullptr);

// Exact comparison of tr(A^k) for k = 1..n in arbitrary precision;
// equivalent to equality of characteristic polynomials for symmetric inputs.
bool traces_of_powers_equal(const AdjacencyMatrix& a, const AdjacencyMatrix& b);

// Text dump: one block per element, then sparse tensor lines. 1-based.
std::string dump_basis(const CanonicalBasis& basis, const StructureTensor& tensor);

}  // namespace permsim

#endif
