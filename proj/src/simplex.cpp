#include "pmedian/simplex.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "basis_factor.hpp"
#include "pmedian/errors.hpp"

namespace pmedian {
namespace {

std::atomic<std::uint64_t> g_next_tag{1};

std::uint64_t fresh_tag() { return g_next_tag.fetch_add(1); }

}  // namespace

LpModel::LpModel(int num_sites, int num_clients, double p)
    : num_sites_(num_sites),
      num_clients_(num_clients),
      p_(p),
      lower_(num_sites, 0.0),
      upper_(num_sites, 1.0),
      rows_(std::make_shared<RowStore>()) {
  if (num_sites < 1 || num_clients < 1) {
    throw ContractViolation("LpModel needs at least one site and one client");
  }
  rows_->tag = fresh_tag();
}

LpModel::RowStore& LpModel::mutable_rows() {
  if (rows_.use_count() > 1) {
    auto copy = std::make_shared<RowStore>(*rows_);
    copy->tag = fresh_tag();
    rows_ = std::move(copy);
  }
  return *rows_;
}

RowId LpModel::add_row(int client, std::vector<SiteCoeff> coeffs, double rhs) {
  if (client < 0 || client >= num_clients_) {
    throw ContractViolation("row client " + std::to_string(client) + " out of range");
  }
  for (const auto& c : coeffs) {
    if (c.site < 0 || c.site >= num_sites_) {
      throw ContractViolation("row site " + std::to_string(c.site) + " out of range");
    }
  }
  LpRow row;
  row.id = next_id_++;
  row.client = client;
  row.rhs = rhs;
  row.coeffs = std::move(coeffs);
  mutable_rows().rows.push_back(std::move(row));
  return next_id_ - 1;
}

bool LpModel::remove_row(RowId id) {
  const auto& rows = rows_->rows;
  const auto it = std::find_if(rows.begin(), rows.end(),
                               [id](const LpRow& r) { return r.id == id; });
  if (it == rows.end()) return false;
  const auto pos = it - rows.begin();
  auto& store = mutable_rows();
  store.rows.erase(store.rows.begin() + pos);
  store.tag = fresh_tag();
  return true;
}

const LpRow* LpModel::find_row(RowId id) const {
  const auto& rows = rows_->rows;
  // Ids are increasing in row order.
  const auto it = std::lower_bound(rows.begin(), rows.end(), id,
                                   [](const LpRow& r, RowId v) { return r.id < v; });
  if (it == rows.end() || it->id != id) return nullptr;
  return &*it;
}

void LpModel::set_bounds(int site, double lower, double upper) {
  if (site < 0 || site >= num_sites_) {
    throw ContractViolation("site " + std::to_string(site) + " out of range");
  }
  lower_[site] = lower;
  upper_[site] = upper;
}

LpModel fix_variable(const LpModel& model, int site, int value) {
  if (value != 0 && value != 1) throw ContractViolation("fix value must be 0 or 1");
  const double v = value;
  if (model.lower(site) > v || model.upper(site) < v) {
    throw InfeasibleFixing("y_" + std::to_string(site) + " is already fixed to " +
                           std::to_string(1 - value));
  }
  LpModel copy = model;
  copy.set_bounds(site, v, v);
  return copy;
}

// The solver works on the dual D of the (distance-scaled) model P:
//
//   max  p mu + sum_r (b_r / s) pi_r + sum_j l_j v_j - sum_j u_j w_j
//   s.t. sum_{r of i} pi_r + t_i = 1                       (row i, per client)
//        mu + sum_r (c_rj / s) pi_r + v_j - w_j = 0        (row N + j, per site)
//        pi, v, w, t >= 0, mu free
//
// with s the largest row rhs. Columns are t_i, v_j, w_j, mu, then one per
// model row. The slack basis {t_i, v_j} is feasible for any bounds, and the
// simplex multipliers of an optimal basis are the primal (theta / s, y).
class SimplexSolver::Impl {
 public:
  explicit Impl(SimplexOptions options) : opt_(options) {}

  LpSolution solve(const LpModel& model, const Basis* warm);
  void reset() {
    built_ = false;
    have_basis_ = false;
    head_.clear();
  }

  long total_iterations = 0;
  long total_refactorizations = 0;

 private:
  int t_col(int i) const { return i; }
  int v_col(int j) const { return n_clients_ + j; }
  int w_col(int j) const { return n_clients_ + n_sites_ + j; }
  int mu_col() const { return n_clients_ + 2 * n_sites_; }
  int first_row_col() const { return mu_col() + 1; }
  int num_cols() const { return cols_.num_cols(); }

  void sync(const LpModel& model);
  void rebuild(const LpModel& model);
  void append_row(const LpRow& row);
  BasisEntry entry_of(int col) const;
  int col_of(const BasisEntry& e) const;
  std::vector<BasisEntry> current_entries() const;
  void install_basis(const std::vector<BasisEntry>& entries);
  void install_slack_basis();
  void factorize_with_repair();
  void recompute_primal();
  void compute_multipliers();
  double reduced_cost(int col) const;
  int choose_entering(bool bland);
  int scan_range(int begin, int end, bool bland, double& best_score) const;
  bool basis_feasible() const;
  LpSolution extract(const LpModel& model, LpStatus status) const;

  SimplexOptions opt_;
  bool built_ = false;
  std::uint64_t tag_ = 0;
  int n_clients_ = 0;
  int n_sites_ = 0;
  int m_ = 0;
  double scale_ = 1.0;
  internal::SparseColumns cols_;
  std::vector<double> cost_;
  std::vector<RowId> row_ids_;  // per row column
  std::unordered_map<RowId, int> row_col_;

  bool have_basis_ = false;
  std::vector<int> head_;
  std::vector<int> slot_of_;
  std::vector<double> xb_;
  std::vector<double> lambda_;
  internal::BasisFactor factor_;
  int price_cursor_ = 0;
  long iterations_ = 0;
};

void SimplexSolver::Impl::rebuild(const LpModel& model) {
  n_clients_ = model.num_clients();
  n_sites_ = model.num_sites();
  m_ = n_clients_ + n_sites_;
  scale_ = 1.0;
  for (const auto& row : model.rows()) scale_ = std::max(scale_, std::abs(row.rhs));
  cols_.clear(m_);
  cost_.clear();
  row_ids_.clear();
  row_col_.clear();
  const double one = 1.0;
  const double minus_one = -1.0;
  for (int i = 0; i < n_clients_; ++i) {
    const int r = i;
    cols_.append(std::span(&r, 1), std::span(&one, 1));
    cost_.push_back(0.0);
  }
  for (int j = 0; j < n_sites_; ++j) {
    const int r = n_clients_ + j;
    cols_.append(std::span(&r, 1), std::span(&one, 1));
    cost_.push_back(0.0);
  }
  for (int j = 0; j < n_sites_; ++j) {
    const int r = n_clients_ + j;
    cols_.append(std::span(&r, 1), std::span(&minus_one, 1));
    cost_.push_back(0.0);
  }
  {
    std::vector<int> rows(n_sites_);
    std::vector<double> values(n_sites_, 1.0);
    for (int j = 0; j < n_sites_; ++j) rows[j] = n_clients_ + j;
    cols_.append(rows, values);
    cost_.push_back(0.0);
  }
  for (const auto& row : model.rows()) append_row(row);
  tag_ = model.structure_tag();
  built_ = true;
}

void SimplexSolver::Impl::append_row(const LpRow& row) {
  std::vector<int> rows;
  std::vector<double> values;
  rows.reserve(row.coeffs.size() + 1);
  values.reserve(row.coeffs.size() + 1);
  rows.push_back(row.client);
  values.push_back(1.0);
  for (const auto& [site, coeff] : row.coeffs) {
    rows.push_back(n_clients_ + site);
    values.push_back(coeff / scale_);
  }
  row_col_[row.id] = num_cols();
  row_ids_.push_back(row.id);
  cols_.append(rows, values);
  cost_.push_back(row.rhs / scale_);
}

BasisEntry SimplexSolver::Impl::entry_of(int col) const {
  using K = BasisEntry::Kind;
  if (col < n_clients_) return {K::kThetaSign, col};
  if (col < n_clients_ + n_sites_) return {K::kLowerBound, col - n_clients_};
  if (col < mu_col()) return {K::kUpperBound, col - n_clients_ - n_sites_};
  if (col == mu_col()) return {K::kCardinality, 0};
  return {K::kRow, row_ids_[col - first_row_col()]};
}

int SimplexSolver::Impl::col_of(const BasisEntry& e) const {
  using K = BasisEntry::Kind;
  switch (e.kind) {
    case K::kThetaSign:
      return e.index >= 0 && e.index < n_clients_ ? t_col(static_cast<int>(e.index)) : -1;
    case K::kLowerBound:
      return e.index >= 0 && e.index < n_sites_ ? v_col(static_cast<int>(e.index)) : -1;
    case K::kUpperBound:
      return e.index >= 0 && e.index < n_sites_ ? w_col(static_cast<int>(e.index)) : -1;
    case K::kCardinality:
      return mu_col();
    case K::kRow: {
      const auto it = row_col_.find(e.index);
      return it == row_col_.end() ? -1 : it->second;
    }
  }
  return -1;
}

std::vector<BasisEntry> SimplexSolver::Impl::current_entries() const {
  std::vector<BasisEntry> entries;
  entries.reserve(head_.size());
  for (int c : head_) entries.push_back(entry_of(c));
  return entries;
}

void SimplexSolver::Impl::sync(const LpModel& model) {
  const bool same_shape = built_ && model.num_clients() == n_clients_ &&
                          model.num_sites() == n_sites_;
  if (same_shape && model.structure_tag() == tag_ &&
      model.num_rows() >= row_ids_.size()) {
    const auto rows = model.rows();
    for (std::size_t r = row_ids_.size(); r < rows.size(); ++r) append_row(rows[r]);
  } else {
    std::vector<BasisEntry> saved;
    if (same_shape && have_basis_) saved = current_entries();
    rebuild(model);
    if (!saved.empty()) {
      install_basis(saved);
    } else {
      have_basis_ = false;
    }
  }
  const auto lower = model.lower_bounds();
  const auto upper = model.upper_bounds();
  for (int j = 0; j < n_sites_; ++j) {
    cost_[v_col(j)] = lower[j];
    cost_[w_col(j)] = -upper[j];
  }
  cost_[mu_col()] = model.p();
  slot_of_.resize(num_cols(), -1);
}

void SimplexSolver::Impl::install_slack_basis() {
  head_.resize(m_);
  for (int i = 0; i < n_clients_; ++i) head_[i] = t_col(i);
  for (int j = 0; j < n_sites_; ++j) head_[n_clients_ + j] = v_col(j);
  have_basis_ = true;
}

void SimplexSolver::Impl::install_basis(const std::vector<BasisEntry>& entries) {
  std::vector<char> used(num_cols(), 0);
  std::vector<char> row_has_unit(m_, 0);
  head_.clear();
  for (const auto& e : entries) {
    const int c = col_of(e);
    if (c < 0 || used[c]) continue;
    if (static_cast<int>(head_.size()) == m_) break;
    used[c] = 1;
    head_.push_back(c);
    if (c < mu_col()) row_has_unit[cols_.index[cols_.start[c]]] = 1;
  }
  for (int r = 0; r < m_ && static_cast<int>(head_.size()) < m_; ++r) {
    if (row_has_unit[r]) continue;
    const int c = r < n_clients_ ? t_col(r) : v_col(r - n_clients_);
    if (used[c]) continue;
    used[c] = 1;
    head_.push_back(c);
  }
  for (int c = 0; c < mu_col() && static_cast<int>(head_.size()) < m_; ++c) {
    if (!used[c]) {
      used[c] = 1;
      head_.push_back(c);
    }
  }
  have_basis_ = true;
}

void SimplexSolver::Impl::factorize_with_repair() {
  slot_of_.assign(num_cols(), -1);
  for (int attempt = 0;; ++attempt) {
    ++total_refactorizations;
    if (factor_.factorize(cols_, head_)) break;
    if (attempt > m_) throw SolverFailure("basis repair did not converge", iterations_);
    std::vector<char> basic(num_cols(), 0);
    for (int c : head_) basic[c] = 1;
    const auto& slots = factor_.dependent_slots();
    const auto& rows = factor_.unpivoted_rows();
    for (std::size_t k = 0; k < slots.size() && k < rows.size(); ++k) {
      const int r = rows[k];
      int c = r < n_clients_ ? t_col(r) : v_col(r - n_clients_);
      if (basic[c] && r >= n_clients_) c = w_col(r - n_clients_);
      basic[head_[slots[k]]] = 0;
      head_[slots[k]] = c;
      basic[c] = 1;
    }
  }
  for (int s = 0; s < m_; ++s) slot_of_[head_[s]] = s;
}

void SimplexSolver::Impl::recompute_primal() {
  xb_.assign(m_, 0.0);
  for (int i = 0; i < n_clients_; ++i) xb_[i] = 1.0;
  factor_.ftran(xb_);
}

void SimplexSolver::Impl::compute_multipliers() {
  lambda_.resize(m_);
  for (int s = 0; s < m_; ++s) lambda_[s] = cost_[head_[s]];
  factor_.btran(lambda_);
}

double SimplexSolver::Impl::reduced_cost(int col) const {
  double d = cost_[col];
  for (int k = cols_.start[col]; k < cols_.start[col + 1]; ++k) {
    d -= cols_.value[k] * lambda_[cols_.index[k]];
  }
  return d;
}

bool SimplexSolver::Impl::basis_feasible() const {
  for (int s = 0; s < m_; ++s) {
    if (head_[s] != mu_col() && xb_[s] < -opt_.feasibility_tolerance) return false;
  }
  return true;
}

// Best (or, under Bland, first) improving column in [begin, end).
int SimplexSolver::Impl::scan_range(int begin, int end, bool bland,
                                    double& best_score) const {
  int best = -1;
  for (int c = begin; c < end; ++c) {
    if (slot_of_[c] >= 0) continue;
    const double d = reduced_cost(c);
    const double score = c == mu_col() ? std::abs(d) : d;
    if (score > opt_.optimality_tolerance && score > best_score) {
      best_score = score;
      best = c;
      if (bland) break;
    }
  }
  return best;
}

int SimplexSolver::Impl::choose_entering(bool bland) {
  double best_score = 0.0;
  int best = scan_range(0, first_row_col(), bland, best_score);
  if (bland && best >= 0) return best;
  const int n_rows = num_cols() - first_row_col();
  if (n_rows == 0) return best;
  if (bland) return scan_range(first_row_col(), num_cols(), true, best_score);

  const int window = std::max(256, n_rows / 8);
  if (price_cursor_ >= n_rows) price_cursor_ = 0;
  int scanned = 0;
  while (scanned < n_rows) {
    const int begin = price_cursor_;
    const int end = std::min(n_rows, begin + window);
    const int found = scan_range(first_row_col() + begin, first_row_col() + end, false,
                                 best_score);
    if (found >= 0) best = found;
    scanned += end - begin;
    price_cursor_ = end >= n_rows ? 0 : end;
    if (best >= 0) break;
  }
  return best;
}

LpSolution SimplexSolver::Impl::solve(const LpModel& model, const Basis* warm) {
  sync(model);
  if (warm != nullptr && !warm->empty()) {
    install_basis(warm->entries);
  } else if (!have_basis_ || static_cast<int>(head_.size()) != m_) {
    install_slack_basis();
  }
  factorize_with_repair();
  recompute_primal();
  if (!basis_feasible()) {
    install_slack_basis();
    factorize_with_repair();
    recompute_primal();
  }

  const long cap = opt_.max_iterations > 0
                       ? opt_.max_iterations
                       : 50L * (m_ + num_cols()) + 10000L;
  iterations_ = 0;
  int degenerate_run = 0;
  bool bland = false;
  std::vector<double> alpha(m_);
  LpStatus status = LpStatus::kOptimal;
  bool restarted = false;

  for (;;) {
    if (iterations_ >= cap) {
      total_iterations += iterations_;
      throw SolverFailure("simplex iteration limit reached", iterations_);
    }
    compute_multipliers();
    int q = choose_entering(bland);
    if (q < 0) {
      if (factor_.num_updates() > 0) {
        // Confirm optimality on fresh factors.
        factorize_with_repair();
        recompute_primal();
        compute_multipliers();
        q = choose_entering(false);
      }
      if (q < 0) {
        if (!basis_feasible() && !restarted) {
          restarted = true;
          install_slack_basis();
          factorize_with_repair();
          recompute_primal();
          continue;
        }
        status = LpStatus::kOptimal;
        break;
      }
    }

    const double d = reduced_cost(q);
    const double dir = d > 0.0 ? 1.0 : -1.0;
    std::fill(alpha.begin(), alpha.end(), 0.0);
    for (int k = cols_.start[q]; k < cols_.start[q + 1]; ++k) {
      alpha[cols_.index[k]] += cols_.value[k];
    }
    factor_.ftran(alpha);

    // Harris ratio test over the sign-constrained basics.
    int leave = -1;
    if (bland) {
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int s = 0; s < m_; ++s) {
        if (head_[s] == mu_col()) continue;
        const double a = dir * alpha[s];
        if (a <= opt_.pivot_tolerance) continue;
        const double ratio = std::max(0.0, xb_[s]) / a;
        if (ratio < best_ratio ||
            (ratio == best_ratio && leave >= 0 && head_[s] < head_[leave])) {
          best_ratio = ratio;
          leave = s;
        }
      }
    } else {
      double bound = std::numeric_limits<double>::infinity();
      for (int s = 0; s < m_; ++s) {
        if (head_[s] == mu_col()) continue;
        const double a = dir * alpha[s];
        if (a <= opt_.pivot_tolerance) continue;
        bound = std::min(bound, (xb_[s] + opt_.feasibility_tolerance) / a);
      }
      double best_a = 0.0;
      for (int s = 0; s < m_; ++s) {
        if (head_[s] == mu_col()) continue;
        const double a = dir * alpha[s];
        if (a <= opt_.pivot_tolerance) continue;
        if (xb_[s] / a <= bound && a > best_a) {
          best_a = a;
          leave = s;
        }
      }
    }
    if (leave < 0) {
      if (factor_.num_updates() > 0) {
        factorize_with_repair();
        recompute_primal();
        continue;
      }
      status = LpStatus::kInfeasible;
      break;
    }

    const double a_leave = dir * alpha[leave];
    const double step = std::max(0.0, xb_[leave]) / a_leave;
    for (int s = 0; s < m_; ++s) {
      if (alpha[s] != 0.0) xb_[s] -= step * dir * alpha[s];
    }
    xb_[leave] = dir * step;
    slot_of_[head_[leave]] = -1;
    head_[leave] = q;
    slot_of_[q] = leave;
    ++iterations_;

    if (step * a_leave < 1e-12) {
      if (++degenerate_run >= opt_.degenerate_threshold) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }

    factor_.update(leave, alpha);
    if (factor_.num_updates() >= opt_.refactor_interval) {
      factorize_with_repair();
      recompute_primal();
    }
  }
  total_iterations += iterations_;
  compute_multipliers();
  return extract(model, status);
}

LpSolution SimplexSolver::Impl::extract(const LpModel& model, LpStatus status) const {
  LpSolution sol;
  sol.status = status;
  sol.iterations = iterations_;
  if (status != LpStatus::kOptimal) return sol;

  std::vector<double> x(num_cols(), 0.0);
  for (int s = 0; s < m_; ++s) {
    const int c = head_[s];
    x[c] = c == mu_col() ? xb_[s] : std::max(0.0, xb_[s]);
  }

  sol.theta.resize(n_clients_);
  sol.theta_reduced_costs.resize(n_clients_);
  for (int i = 0; i < n_clients_; ++i) {
    sol.theta[i] = std::max(0.0, lambda_[i] * scale_);
    sol.theta_reduced_costs[i] = x[t_col(i)];
    sol.objective += sol.theta[i];
  }
  sol.y.resize(n_sites_);
  sol.lower_bound_duals.resize(n_sites_);
  sol.upper_bound_duals.resize(n_sites_);
  sol.reduced_costs.resize(n_sites_);
  for (int j = 0; j < n_sites_; ++j) {
    sol.y[j] = std::clamp(lambda_[n_clients_ + j], model.lower(j), model.upper(j));
    sol.lower_bound_duals[j] = x[v_col(j)] * scale_;
    sol.upper_bound_duals[j] = x[w_col(j)] * scale_;
    sol.reduced_costs[j] = sol.lower_bound_duals[j] - sol.upper_bound_duals[j];
  }
  sol.cardinality_dual = x[mu_col()] * scale_;

  const auto rows = model.rows();
  sol.row_duals.resize(rows.size());
  double dual = model.p() * x[mu_col()];
  for (int j = 0; j < n_sites_; ++j) {
    dual += model.lower(j) * x[v_col(j)] - model.upper(j) * x[w_col(j)];
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const int c = first_row_col() + static_cast<int>(r);
    sol.row_duals[r] = x[c];
    dual += cost_[c] * x[c];
  }
  sol.dual_objective = dual * scale_;
  sol.basis.entries = current_entries();
  return sol;
}

SimplexSolver::SimplexSolver(SimplexOptions options)
    : impl_(std::make_unique<Impl>(options)) {}
SimplexSolver::~SimplexSolver() = default;
SimplexSolver::SimplexSolver(SimplexSolver&&) noexcept = default;
SimplexSolver& SimplexSolver::operator=(SimplexSolver&&) noexcept = default;

LpSolution SimplexSolver::solve(const LpModel& model, const Basis* warm) {
  return impl_->solve(model, warm);
}

void SimplexSolver::reset() { impl_->reset(); }

long SimplexSolver::total_iterations() const { return impl_->total_iterations; }
long SimplexSolver::total_refactorizations() const {
  return impl_->total_refactorizations;
}

LpSolution lp_solve(const LpModel& model, const Basis* warm) {
  SimplexSolver solver;
  return solver.solve(model, warm);
}

}  // namespace pmedian
