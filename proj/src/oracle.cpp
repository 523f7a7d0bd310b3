#include "pmedian/oracle.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "pmedian/errors.hpp"
#include "pmedian/simplex.hpp"

namespace pmedian::oracle {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (int t = 1; t <= k; ++t) {
    // c * (n - k + t) / t stays exact since c is C(n - k + t - 1, t - 1).
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + t);
    if (c > std::numeric_limits<std::uint64_t>::max() / num) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    c = c * num / t;
  }
  return c;
}

OracleResult enumerate_opt(const Instance& inst) {
  const int n = inst.n_clients();
  const int m = inst.n_sites();
  const int p = inst.p();
  const std::uint64_t subsets = binomial(m, p);
  if (subsets > kMaxSubsets) {
    throw GuardExceeded("C(" + std::to_string(m) + ", " + std::to_string(p) + ") = " +
                        std::to_string(subsets) + " subsets exceeds the enumeration guard");
  }
  // near[d] holds the nearest distance per client over the first d picks.
  std::vector<std::vector<Distance>> near(
      p + 1, std::vector<Distance>(n, std::numeric_limits<Distance>::max()));
  std::vector<int> pick(p);
  OracleResult best;
  best.optimum = std::numeric_limits<Distance>::max();

  // Iterative lexicographic enumeration; depth d chooses pick[d].
  int d = 0;
  pick[0] = 0;
  for (;;) {
    if (pick[d] > m - p + d) {
      if (d == 0) break;
      --d;
      ++pick[d];
      continue;
    }
    const int j = pick[d];
    for (int i = 0; i < n; ++i) near[d + 1][i] = std::min(near[d][i], inst.dist(i, j));
    if (d + 1 == p) {
      Distance total = 0;
      for (int i = 0; i < n; ++i) total += near[p][i];
      if (total < best.optimum) {
        best.optimum = total;
        best.open = pick;
        best.count = 1;
      } else if (total == best.optimum) {
        ++best.count;
      }
      ++pick[d];
    } else {
      ++d;
      pick[d] = pick[d - 1] + 1;
    }
  }
  return best;
}

double full_f4_lp_value(const Instance& inst, const Preprocessed& prep) {
  if (prep.total_levels() > kMaxF4Rows) {
    throw GuardExceeded("K = " + std::to_string(prep.total_levels()) +
                        " rows exceeds the full-formulation guard");
  }
  LpModel model(inst.n_sites(), inst.n_clients(), inst.p());
  for (int i = 0; i < inst.n_clients(); ++i) {
    for (Distance level : prep.levels(i)) {
      std::vector<SiteCoeff> coeffs;
      for (int j = 0; j < inst.n_sites(); ++j) {
        const Distance d = inst.dist(i, j);
        if (d < level) coeffs.push_back({j, static_cast<double>(level - d)});
      }
      model.add_row(i, std::move(coeffs), static_cast<double>(level));
    }
  }
  const LpSolution sol = lp_solve(model);
  if (sol.status != LpStatus::kOptimal) {
    throw SolverFailure("full formulation LP reported infeasible", sol.iterations);
  }
  return sol.objective;
}

double sp_lp_value(int client, SiteVector ybar, const Preprocessed& prep) {
  const auto levels = prep.levels(client);
  const int count = static_cast<int>(levels.size());
  double value = static_cast<double>(levels[0]);
  for (int k = 0; k + 1 < count; ++k) {
    double mass = 0.0;
    for (int j = 0; j < prep.n_sites(); ++j) {
      if (prep.dist(client, j) <= levels[k]) mass += ybar[j];
    }
    value += static_cast<double>(levels[k + 1] - levels[k]) * std::max(0.0, 1.0 - mass);
  }
  return value;
}

int naive_ktilde(int client, SiteVector ybar, const Preprocessed& prep) {
  const auto levels = prep.levels(client);
  const int count = static_cast<int>(levels.size());
  int result = 0;
  for (int k = 0; k < count; ++k) {
    double mass = 0.0;
    for (int j = 0; j < prep.n_sites(); ++j) {
      if (prep.dist(client, j) <= levels[k]) mass += ybar[j];
    }
    if (1.0 - mass > kResidualTolerance) {
      if (k + 1 == count) {
        throw ContractViolation("open mass below one for client " + std::to_string(client));
      }
      result = k + 1;
    }
  }
  return result;
}

}  // namespace pmedian::oracle
