#ifndef PERMSIM_CORE_ADJACENCY_HPP
#define PERMSIM_CORE_ADJACENCY_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace permsim {

// A structural invariant of the library itself was violated.
class InternalError : public std::runtime_error {
 public:
  explicit InternalError(const std::string& what) : std::runtime_error(what) {}
};

// A size-capped operation was asked to exceed its cap.
class OverCapError : public std::runtime_error {
 public:
  explicit OverCapError(const std::string& what) : std::runtime_error(what) {}
};

// Dense square matrix with nonnegative integer entries, plus the graph
// metadata the pipeline keys decisions on. Entries are row-major.
// `degree` is set iff every row sum and every column sum equals it.
struct AdjacencyMatrix {
  int n = 0;
  std::vector<int64_t> entries;
  std::optional<int64_t> degree;
  bool connected = false;

  int64_t operator()(int i, int j) const {
    return entries[static_cast<size_t>(i) * n + j];
  }
  int64_t& at(int i, int j) { return entries[static_cast<size_t>(i) * n + j]; }

  bool symmetric() const;
  std::vector<int64_t> row_sums() const;
  std::vector<int64_t> col_sums() const;

  // Validates shape and nonnegativity, computes degree and connectivity.
  static AdjacencyMatrix build(int n, std::vector<int64_t> entries);
};

bool operator==(const AdjacencyMatrix& a, const AdjacencyMatrix& b);

enum class InputClass { Regular, NotRegular, Disconnected };

struct ValidationResult {
  InputClass kind = InputClass::NotRegular;
  int64_t degree = 0;  // meaningful only when kind == Regular
};

// Regular means symmetric, connected and with a common row/column sum.
// The class tells the decider whether the regularizing reduction is needed.
ValidationResult validate_input(const AdjacencyMatrix& a);

}  // namespace permsim

#endif
