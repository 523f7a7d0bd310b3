#include "pmedian/master.hpp"

#include <ostream>

namespace pmedian {

bool CutPool::contains(int client, int ktilde) const {
  return find(client, ktilde) != nullptr;
}

const CutPool::Entry* CutPool::find(int client, int ktilde) const {
  const auto& m = by_client_[client];
  const auto it = m.find(ktilde);
  return it == m.end() ? nullptr : &it->second;
}

void CutPool::dump(std::ostream& out) const {
  for (int i = 0; i < n_clients(); ++i) {
    for (const auto& [k, e] : by_client_[i]) {
      out << i + 1 << '\t' << k << '\t' << e.cut.rhs << '\t' << e.cut.coeffs.size()
          << '\t' << (e.active ? "active" : "inactive") << '\n';
    }
  }
}

int add_cuts(CutPool& pool, LpModel& model, std::span<const BendersCut> cuts) {
  int added = 0;
  for (const auto& cut : cuts) {
    auto& entries = pool.by_client_[cut.client];
    auto [it, inserted] = entries.try_emplace(cut.ktilde);
    CutPool::Entry& e = it->second;
    if (inserted) {
      e.cut = cut;
      ++pool.size_;
    } else if (e.active) {
      continue;
    }
    e.row = model.add_cut(e.cut);
    e.active = true;
    ++pool.active_;
    ++added;
  }
  return added;
}

std::vector<int> saturation_index(const CutPool& pool, const LpSolution& sol) {
  std::vector<int> khat(pool.n_clients(), -1);
  for (int i = 0; i < pool.n_clients(); ++i) {
    for (const auto& [k, e] : pool.entries(i)) {
      if (!e.active) continue;
      const double slack = sol.theta[i] - e.cut.evaluate(sol.y);
      if (slack <= kSaturationTolerance) khat[i] = k;  // map is ordered by k
    }
  }
  return khat;
}

int reduce_constraints(CutPool& pool, LpModel& model, const LpSolution& sol) {
  const std::vector<int> khat = saturation_index(pool, sol);
  int removed = 0;
  for (int i = 0; i < pool.n_clients(); ++i) {
    int keep_up_to = khat[i];
    if (keep_up_to < 0) {
      // Nothing saturated: keep the lowest active cut.
      for (const auto& [k, e] : pool.by_client_[i]) {
        if (e.active) {
          keep_up_to = k;
          break;
        }
      }
    }
    for (auto& [k, e] : pool.by_client_[i]) {
      if (!e.active || k <= keep_up_to) continue;
      model.remove_row(e.row);
      e.active = false;
      e.row = -1;
      --pool.active_;
      ++removed;
    }
  }
  return removed;
}

FixingResult reduced_cost_fixing(double lb, double ub, const LpSolution& sol,
                                 LpModel& model) {
  FixingResult result;
  const int m = model.num_sites();
  constexpr double kAtBound = 1e-9;
  int ones = 0;
  int zeros = 0;
  for (int j = 0; j < m; ++j) {
    const double lo = model.lower(j);
    const double hi = model.upper(j);
    if (lo == hi) {
      (lo > 0.5 ? ones : zeros) += 1;
      continue;
    }
    const double rc = sol.reduced_costs[j];
    if (sol.y[j] <= lo + kAtBound && lb + rc > ub + kFixingMargin) {
      result.fixed_to_zero.push_back(j);
    } else if (sol.y[j] >= hi - kAtBound && lb - rc > ub + kFixingMargin) {
      result.fixed_to_one.push_back(j);
    }
  }
  ones += static_cast<int>(result.fixed_to_one.size());
  zeros += static_cast<int>(result.fixed_to_zero.size());
  if (ones > model.p() || m - zeros < model.p()) {
    result.proves_optimal = true;
    return result;
  }
  for (int j : result.fixed_to_zero) model.set_bounds(j, 0.0, 0.0);
  for (int j : result.fixed_to_one) model.set_bounds(j, 1.0, 1.0);
  return result;
}

}  // namespace pmedian
