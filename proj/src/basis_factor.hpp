#ifndef PMEDIAN_SRC_BASIS_FACTOR_HPP
#define PMEDIAN_SRC_BASIS_FACTOR_HPP

#include <span>
#include <vector>

namespace pmedian::internal {

// Compressed sparse columns.
struct SparseColumns {
  int num_rows = 0;
  std::vector<int> start{0};
  std::vector<int> index;
  std::vector<double> value;

  int num_cols() const { return static_cast<int>(start.size()) - 1; }
  void append(std::span<const int> rows, std::span<const double> values);
  void clear(int rows) {
    num_rows = rows;
    start.assign(1, 0);
    index.clear();
    value.clear();
  }
};

// LU factors of a square basis B = [a_{h(0)} ... a_{h(m-1)}] with
// product-form updates.
//
// Column singletons are peeled first (they end up solved last), then row
// singletons, and what remains (the nucleus) is factorized densely with
// partial pivoting. Basis matrices of the master's dual are mostly unit
// columns plus one column per tight cut, so the nucleus stays small.
class BasisFactor {
 public:
  // Returns false when B is singular; dependent_slots() and
  // unpivoted_rows() then have equal length and pair up for a repair.
  bool factorize(const SparseColumns& a, std::span<const int> head);

  // In: right-hand side indexed by row. Out: solution indexed by slot.
  void ftran(std::vector<double>& x) const;
  // In: vector indexed by slot. Out: y with y^T B = c^T, indexed by row.
  void btran(std::vector<double>& c) const;

  // Slot `slot` now holds a column whose ftran is alpha.
  void update(int slot, const std::vector<double>& alpha);

  int num_updates() const { return static_cast<int>(etas_.size()); }
  const std::vector<int>& dependent_slots() const { return dependent_slots_; }
  const std::vector<int>& unpivoted_rows() const { return unpivoted_rows_; }

 private:
  struct Pivot {
    int row;
    int slot;
    double value;
  };
  struct Eta {
    int slot;
    double pivot;
    std::vector<int> index;
    std::vector<double> value;
  };

  void solve_nucleus(std::vector<double>& rhs) const;
  void solve_nucleus_transposed(std::vector<double>& rhs) const;

  int m_ = 0;
  SparseColumns cols_;  // basis columns by slot
  std::vector<Pivot> col_pivots_;
  std::vector<Pivot> row_pivots_;
  std::vector<int> nucleus_rows_;
  std::vector<int> nucleus_slots_;
  std::vector<char> in_nucleus_row_;
  std::vector<double> lu_;       // nucleus, row-major n x n
  std::vector<Eta> etas_;
  std::vector<int> dependent_slots_;
  std::vector<int> unpivoted_rows_;
  mutable std::vector<double> work_;
};

}  // namespace pmedian::internal

#endif  // PMEDIAN_SRC_BASIS_FACTOR_HPP
