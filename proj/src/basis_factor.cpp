#include "basis_factor.hpp"

#include <algorithm>
#include <cmath>

namespace pmedian::internal {
namespace {

constexpr double kSingletonTolerance = 1e-11;
constexpr double kNucleusTolerance = 1e-11;

}  // namespace

void SparseColumns::append(std::span<const int> rows, std::span<const double> values) {
  index.insert(index.end(), rows.begin(), rows.end());
  value.insert(value.end(), values.begin(), values.end());
  start.push_back(static_cast<int>(index.size()));
}

bool BasisFactor::factorize(const SparseColumns& a, std::span<const int> head) {
  m_ = static_cast<int>(head.size());
  const int m = m_;
  cols_.clear(a.num_rows);
  for (int s = 0; s < m; ++s) {
    const int c = head[s];
    const int b = a.start[c];
    const int e = a.start[c + 1];
    cols_.append(std::span(a.index).subspan(b, e - b),
                 std::span(a.value).subspan(b, e - b));
  }
  col_pivots_.clear();
  row_pivots_.clear();
  etas_.clear();
  dependent_slots_.clear();
  unpivoted_rows_.clear();

  // Row-wise pattern of the basis.
  std::vector<int> row_start(m + 1, 0);
  for (int k : cols_.index) ++row_start[k + 1];
  for (int r = 0; r < m; ++r) row_start[r + 1] += row_start[r];
  std::vector<int> row_slots(cols_.index.size());
  {
    std::vector<int> fill(row_start.begin(), row_start.end() - 1);
    for (int s = 0; s < m; ++s) {
      for (int k = cols_.start[s]; k < cols_.start[s + 1]; ++k) {
        row_slots[fill[cols_.index[k]]++] = s;
      }
    }
  }

  std::vector<char> row_active(m, 1);
  std::vector<char> slot_active(m, 1);
  std::vector<int> col_count(m);
  std::vector<int> row_count(m);
  for (int s = 0; s < m; ++s) col_count[s] = cols_.start[s + 1] - cols_.start[s];

  // Column singletons.
  std::vector<int> queue;
  for (int s = 0; s < m; ++s) {
    if (col_count[s] == 1) queue.push_back(s);
  }
  while (!queue.empty()) {
    const int s = queue.back();
    queue.pop_back();
    if (!slot_active[s] || col_count[s] != 1) continue;
    int row = -1;
    double val = 0.0;
    for (int k = cols_.start[s]; k < cols_.start[s + 1]; ++k) {
      if (row_active[cols_.index[k]]) {
        row = cols_.index[k];
        val = cols_.value[k];
        break;
      }
    }
    if (row < 0 || std::abs(val) < kSingletonTolerance) continue;
    col_pivots_.push_back({row, s, val});
    row_active[row] = 0;
    slot_active[s] = 0;
    for (int k = row_start[row]; k < row_start[row + 1]; ++k) {
      const int other = row_slots[k];
      if (slot_active[other] && --col_count[other] == 1) queue.push_back(other);
    }
  }

  // Row singletons among what is left.
  for (int r = 0; r < m; ++r) {
    row_count[r] = 0;
    if (!row_active[r]) continue;
    for (int k = row_start[r]; k < row_start[r + 1]; ++k) {
      if (slot_active[row_slots[k]]) ++row_count[r];
    }
    if (row_count[r] == 1) queue.push_back(r);
  }
  while (!queue.empty()) {
    const int r = queue.back();
    queue.pop_back();
    if (!row_active[r] || row_count[r] != 1) continue;
    int slot = -1;
    for (int k = row_start[r]; k < row_start[r + 1]; ++k) {
      if (slot_active[row_slots[k]]) {
        slot = row_slots[k];
        break;
      }
    }
    double val = 0.0;
    for (int k = cols_.start[slot]; k < cols_.start[slot + 1]; ++k) {
      if (cols_.index[k] == r) val += cols_.value[k];
    }
    if (std::abs(val) < kSingletonTolerance) continue;
    row_pivots_.push_back({r, slot, val});
    row_active[r] = 0;
    slot_active[slot] = 0;
    for (int k = cols_.start[slot]; k < cols_.start[slot + 1]; ++k) {
      const int other = cols_.index[k];
      if (row_active[other] && --row_count[other] == 1) queue.push_back(other);
    }
  }

  // Dense nucleus.
  nucleus_rows_.clear();
  nucleus_slots_.clear();
  in_nucleus_row_.assign(m, 0);
  std::vector<int> nucleus_pos(m, -1);
  for (int r = 0; r < m; ++r) {
    if (row_active[r]) {
      nucleus_pos[r] = static_cast<int>(nucleus_rows_.size());
      nucleus_rows_.push_back(r);
      in_nucleus_row_[r] = 1;
    }
  }
  for (int s = 0; s < m; ++s) {
    if (slot_active[s]) nucleus_slots_.push_back(s);
  }
  const int n = static_cast<int>(nucleus_rows_.size());
  lu_.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int j = 0; j < n; ++j) {
    const int s = nucleus_slots_[j];
    for (int k = cols_.start[s]; k < cols_.start[s + 1]; ++k) {
      const int pos = nucleus_pos[cols_.index[k]];
      if (pos >= 0) lu_[static_cast<std::size_t>(pos) * n + j] += cols_.value[k];
    }
  }
  int step = 0;
  for (int j = 0; j < n; ++j) {
    int best = -1;
    double best_abs = kNucleusTolerance;
    for (int r = step; r < n; ++r) {
      const double v = std::abs(lu_[static_cast<std::size_t>(r) * n + j]);
      if (v > best_abs) {
        best_abs = v;
        best = r;
      }
    }
    if (best < 0) {
      dependent_slots_.push_back(nucleus_slots_[j]);
      continue;
    }
    if (best != step) {
      std::swap_ranges(lu_.begin() + static_cast<std::ptrdiff_t>(best) * n,
                       lu_.begin() + static_cast<std::ptrdiff_t>(best + 1) * n,
                       lu_.begin() + static_cast<std::ptrdiff_t>(step) * n);
      std::swap(nucleus_rows_[best], nucleus_rows_[step]);
    }
    double* pivot_row = lu_.data() + static_cast<std::size_t>(step) * n;
    const double pivot = pivot_row[j];
    for (int r = step + 1; r < n; ++r) {
      double* row = lu_.data() + static_cast<std::size_t>(r) * n;
      if (row[j] == 0.0) continue;
      const double f = row[j] / pivot;
      row[j] = f;
      for (int c = j + 1; c < n; ++c) row[c] -= f * pivot_row[c];
    }
    ++step;
  }
  if (!dependent_slots_.empty()) {
    for (int r = step; r < n; ++r) unpivoted_rows_.push_back(nucleus_rows_[r]);
    return false;
  }
  // Rows were swapped in place, so nucleus_rows_[i] is now the row of the
  // i-th pivot; the permutation is already folded into nucleus_rows_.
  work_.assign(m, 0.0);
  return true;
}

void BasisFactor::solve_nucleus(std::vector<double>& rhs) const {
  const int n = static_cast<int>(nucleus_slots_.size());
  for (int i = 0; i < n; ++i) {
    const double* row = lu_.data() + static_cast<std::size_t>(i) * n;
    double v = rhs[i];
    for (int k = 0; k < i; ++k) v -= row[k] * rhs[k];
    rhs[i] = v;
  }
  for (int i = n - 1; i >= 0; --i) {
    const double* row = lu_.data() + static_cast<std::size_t>(i) * n;
    double v = rhs[i];
    for (int k = i + 1; k < n; ++k) v -= row[k] * rhs[k];
    rhs[i] = v / row[i];
  }
}

void BasisFactor::solve_nucleus_transposed(std::vector<double>& rhs) const {
  const int n = static_cast<int>(nucleus_slots_.size());
  // U^T z = c.
  for (int i = 0; i < n; ++i) {
    double v = rhs[i];
    for (int k = 0; k < i; ++k) v -= lu_[static_cast<std::size_t>(k) * n + i] * rhs[k];
    rhs[i] = v / lu_[static_cast<std::size_t>(i) * n + i];
  }
  // L^T w = z.
  for (int i = n - 1; i >= 0; --i) {
    double v = rhs[i];
    for (int k = i + 1; k < n; ++k) v -= lu_[static_cast<std::size_t>(k) * n + i] * rhs[k];
    rhs[i] = v;
  }
}

void BasisFactor::ftran(std::vector<double>& x) const {
  std::vector<double>& b = x;  // consumed as the row-indexed right-hand side
  std::vector<double>& out = work_;
  std::fill(out.begin(), out.end(), 0.0);

  for (const auto& pv : row_pivots_) {
    const double v = b[pv.row] / pv.value;
    out[pv.slot] = v;
    if (v == 0.0) continue;
    for (int k = cols_.start[pv.slot]; k < cols_.start[pv.slot + 1]; ++k) {
      if (cols_.index[k] != pv.row) b[cols_.index[k]] -= cols_.value[k] * v;
    }
  }
  const int n = static_cast<int>(nucleus_slots_.size());
  if (n > 0) {
    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = b[nucleus_rows_[i]];
    solve_nucleus(rhs);
    for (int j = 0; j < n; ++j) {
      const int s = nucleus_slots_[j];
      const double v = rhs[j];
      out[s] = v;
      if (v == 0.0) continue;
      for (int k = cols_.start[s]; k < cols_.start[s + 1]; ++k) {
        if (!in_nucleus_row_[cols_.index[k]]) b[cols_.index[k]] -= cols_.value[k] * v;
      }
    }
  }
  for (auto it = col_pivots_.rbegin(); it != col_pivots_.rend(); ++it) {
    const double v = b[it->row] / it->value;
    out[it->slot] = v;
    if (v == 0.0) continue;
    for (int k = cols_.start[it->slot]; k < cols_.start[it->slot + 1]; ++k) {
      if (cols_.index[k] != it->row) b[cols_.index[k]] -= cols_.value[k] * v;
    }
  }
  for (const auto& eta : etas_) {
    const double v = out[eta.slot] / eta.pivot;
    out[eta.slot] = v;
    if (v == 0.0) continue;
    for (std::size_t k = 0; k < eta.index.size(); ++k) out[eta.index[k]] -= eta.value[k] * v;
  }
  x.swap(out);
}

void BasisFactor::btran(std::vector<double>& c) const {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double v = c[it->slot];
    for (std::size_t k = 0; k < it->index.size(); ++k) v -= it->value[k] * c[it->index[k]];
    c[it->slot] = v / it->pivot;
  }
  std::vector<double>& y = work_;
  std::fill(y.begin(), y.end(), 0.0);
  auto column_dot = [&](int slot, int skip_row) {
    double sum = 0.0;
    for (int k = cols_.start[slot]; k < cols_.start[slot + 1]; ++k) {
      if (cols_.index[k] != skip_row) sum += cols_.value[k] * y[cols_.index[k]];
    }
    return sum;
  };
  for (const auto& pv : col_pivots_) {
    y[pv.row] = (c[pv.slot] - column_dot(pv.slot, pv.row)) / pv.value;
  }
  const int n = static_cast<int>(nucleus_slots_.size());
  if (n > 0) {
    std::vector<double> rhs(n);
    for (int j = 0; j < n; ++j) {
      const int s = nucleus_slots_[j];
      double sum = 0.0;
      for (int k = cols_.start[s]; k < cols_.start[s + 1]; ++k) {
        if (!in_nucleus_row_[cols_.index[k]]) sum += cols_.value[k] * y[cols_.index[k]];
      }
      rhs[j] = c[s] - sum;
    }
    solve_nucleus_transposed(rhs);
    for (int i = 0; i < n; ++i) y[nucleus_rows_[i]] = rhs[i];
  }
  for (auto it = row_pivots_.rbegin(); it != row_pivots_.rend(); ++it) {
    y[it->row] = (c[it->slot] - column_dot(it->slot, it->row)) / it->value;
  }
  c.swap(y);
}

void BasisFactor::update(int slot, const std::vector<double>& alpha) {
  Eta eta;
  eta.slot = slot;
  eta.pivot = alpha[slot];
  for (int i = 0; i < m_; ++i) {
    if (i != slot && alpha[i] != 0.0) {
      eta.index.push_back(i);
      eta.value.push_back(alpha[i]);
    }
  }
  etas_.push_back(std::move(eta));
}

}  // namespace pmedian::internal
