#ifndef PMEDIAN_SIMPLEX_HPP
#define PMEDIAN_SIMPLEX_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "pmedian/benders.hpp"

namespace pmedian {

using RowId = std::int64_t;

// One master row: theta_client + sum_j coeff_j * y_j >= rhs, coeff_j > 0.
struct LpRow {
  RowId id = 0;
  int client = 0;
  double rhs = 0.0;
  std::vector<SiteCoeff> coeffs;
};

// The master LP shape:
//
//   min  sum_i theta_i
//   s.t. sum_j y_j = p
//        theta_i + sum_j c_rj y_j >= b_r      for every row r of client i
//        lower_j <= y_j <= upper_j,  theta_i >= 0
//
// Rows live in a copy-on-write store, so copies (one per branch-and-bound
// node, say) share them until one side mutates.
class LpModel {
 public:
  LpModel(int num_sites, int num_clients, double p);

  int num_sites() const { return num_sites_; }
  int num_clients() const { return num_clients_; }
  double p() const { return p_; }

  RowId add_row(int client, std::vector<SiteCoeff> coeffs, double rhs);
  RowId add_cut(const BendersCut& cut) { return add_row(cut.client, cut.coeffs, cut.rhs); }
  // Returns false if no row has this id.
  bool remove_row(RowId id);

  std::size_t num_rows() const { return rows_->rows.size(); }
  std::span<const LpRow> rows() const { return rows_->rows; }
  const LpRow* find_row(RowId id) const;

  double lower(int site) const { return lower_[site]; }
  double upper(int site) const { return upper_[site]; }
  std::span<const double> lower_bounds() const { return lower_; }
  std::span<const double> upper_bounds() const { return upper_; }
  void set_bounds(int site, double lower, double upper);

  // Identifies the row store; changes whenever rows are removed or the store
  // is cloned. Appending keeps it.
  std::uint64_t structure_tag() const { return rows_->tag; }

 private:
  struct RowStore {
    std::vector<LpRow> rows;
    std::uint64_t tag = 0;
  };

  RowStore& mutable_rows();

  int num_sites_;
  int num_clients_;
  double p_;
  RowId next_id_ = 0;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::shared_ptr<RowStore> rows_;
};

// Copy of model with y_site's bounds collapsed to value (0 or 1). Throws
// InfeasibleFixing if the site is already fixed to the other value.
LpModel fix_variable(const LpModel& model, int site, int value);

enum class LpStatus { kOptimal, kInfeasible };

// Warm-start handle: the set of basic variables of the solver's internal
// (dual) form, keyed by stable identifiers.
struct BasisEntry {
  enum class Kind : std::uint8_t {
    kThetaSign,    // theta_i >= 0, index = client
    kLowerBound,   // y_j >= lower_j, index = site
    kUpperBound,   // y_j <= upper_j, index = site
    kCardinality,  // sum y = p
    kRow,          // index = RowId
  };
  Kind kind;
  std::int64_t index;

  friend bool operator==(const BasisEntry&, const BasisEntry&) = default;
};

struct Basis {
  std::vector<BasisEntry> entries;
  bool empty() const { return entries.empty(); }
};

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;       // sum_i theta_i
  double dual_objective = 0.0;  // value of the dual solution, a valid bound
  std::vector<double> y;
  std::vector<double> theta;
  double cardinality_dual = 0.0;         // multiplier of sum y = p
  std::vector<double> row_duals;         // >= 0, in model row order
  std::vector<double> lower_bound_duals; // >= 0, per site
  std::vector<double> upper_bound_duals; // >= 0, per site
  // rc_j = lower_bound_dual_j - upper_bound_dual_j: >= 0 at the lower bound,
  // <= 0 at the upper bound.
  std::vector<double> reduced_costs;
  std::vector<double> theta_reduced_costs;
  Basis basis;
  long iterations = 0;
};

struct SimplexOptions {
  double feasibility_tolerance = 1e-9;
  double optimality_tolerance = 1e-9;
  double pivot_tolerance = 1e-9;
  int refactor_interval = 64;
  // Consecutive degenerate pivots before switching to Bland's rule.
  int degenerate_threshold = 200;
  // 0 selects an automatic cap proportional to the problem size.
  long max_iterations = 0;
};

// Bounded revised simplex for LpModel.
//
// Works on the dual of the model: one column per row, per bound and for the
// cardinality constraint, one row per theta_i and y_j. The dual's basis has
// num_clients + num_sites rows however many cuts exist; new cuts enter as
// nonbasic columns and bound changes only move costs, so the previous basis
// stays feasible across cut rounds and branching. A solver object keeps that
// basis between calls on the same model.
class SimplexSolver {
 public:
  explicit SimplexSolver(SimplexOptions options = {});
  ~SimplexSolver();
  SimplexSolver(SimplexSolver&&) noexcept;
  SimplexSolver& operator=(SimplexSolver&&) noexcept;

  // warm, when given, replaces the basis kept from the previous call.
  LpSolution solve(const LpModel& model, const Basis* warm = nullptr);

  // Forget the kept basis; the next solve starts from the slack basis.
  void reset();

  long total_iterations() const;
  long total_refactorizations() const;

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

LpSolution lp_solve(const LpModel& model, const Basis* warm = nullptr);

}  // namespace pmedian

#endif  // PMEDIAN_SIMPLEX_HPP
