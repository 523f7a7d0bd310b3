#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pmedian::testing {

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Instance random_instance(Rng& rng, int n, int m, int p, int lo, int hi,
                         bool symmetric) {
  std::vector<Distance> dist(static_cast<std::size_t>(n) * m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (symmetric && j < i) {
        dist[static_cast<std::size_t>(i) * m + j] =
            dist[static_cast<std::size_t>(j) * m + i];
      } else if (symmetric && i == j) {
        dist[static_cast<std::size_t>(i) * m + j] = 0;
      } else {
        dist[static_cast<std::size_t>(i) * m + j] = uniform_int(rng, lo, hi);
      }
    }
  }
  return Instance(n, m, p, std::move(dist), "random");
}

std::vector<double> random_fractional_y(Rng& rng, int m, int p) {
  // Start from p units spread evenly, then move mass between random pairs.
  std::vector<double> y(m, static_cast<double>(p) / m);
  for (int step = 0; step < 4 * m; ++step) {
    const int a = uniform_int(rng, 0, m - 1);
    const int b = uniform_int(rng, 0, m - 1);
    if (a == b) continue;
    const double room = std::min(y[a], 1.0 - y[b]);
    const double t = uniform_real(rng, 0.0, room);
    y[a] -= t;
    y[b] += t;
  }
  // Occasionally snap some coordinates to the bounds to exercise ties.
  if (uniform_int(rng, 0, 3) == 0) {
    for (int step = 0; step < m; ++step) {
      const int a = uniform_int(rng, 0, m - 1);
      const int b = uniform_int(rng, 0, m - 1);
      if (a == b) continue;
      const double t = std::min(y[a], 1.0 - y[b]);
      y[a] -= t;
      y[b] += t;
    }
  }
  return y;
}

std::vector<double> random_binary_y(Rng& rng, int m, int p) {
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<double> y(m, 0.0);
  for (int k = 0; k < p; ++k) y[idx[k]] = 1.0;
  return y;
}

Distance brute_force_value(const Instance& inst, const std::vector<int>& open) {
  Distance total = 0;
  for (int i = 0; i < inst.n_clients(); ++i) {
    Distance best = std::numeric_limits<Distance>::max();
    for (int j : open) best = std::min(best, inst.dist(i, j));
    total += best;
  }
  return total;
}

namespace {

// Inequality rows a x >= b plus one equality row, over x = (theta, y).
struct DenseLp {
  int n = 0;
  std::vector<std::vector<double>> ge;
  std::vector<double> ge_rhs;
  std::vector<double> eq;
  double eq_rhs = 0.0;
  std::vector<double> cost;
};

DenseLp to_dense(const LpModel& model) {
  const int nc = model.num_clients();
  const int ns = model.num_sites();
  DenseLp lp;
  lp.n = nc + ns;
  lp.cost.assign(lp.n, 0.0);
  for (int i = 0; i < nc; ++i) lp.cost[i] = 1.0;
  for (const auto& row : model.rows()) {
    std::vector<double> a(lp.n, 0.0);
    a[row.client] = 1.0;
    for (const auto& [site, coeff] : row.coeffs) a[nc + site] += coeff;
    lp.ge.push_back(std::move(a));
    lp.ge_rhs.push_back(row.rhs);
  }
  for (int i = 0; i < nc; ++i) {
    std::vector<double> a(lp.n, 0.0);
    a[i] = 1.0;
    lp.ge.push_back(std::move(a));
    lp.ge_rhs.push_back(0.0);
  }
  for (int j = 0; j < ns; ++j) {
    std::vector<double> a(lp.n, 0.0);
    a[nc + j] = 1.0;
    lp.ge.push_back(a);
    lp.ge_rhs.push_back(model.lower(j));
    a[nc + j] = -1.0;
    lp.ge.push_back(std::move(a));
    lp.ge_rhs.push_back(-model.upper(j));
  }
  lp.eq.assign(lp.n, 0.0);
  for (int j = 0; j < ns; ++j) lp.eq[nc + j] = 1.0;
  lp.eq_rhs = model.p();
  return lp;
}

constexpr double kEps = 1e-9;

}  // namespace

std::optional<double> dense_lp_value(const LpModel& model) {
  // All variables are >= 0 here (theta >= 0 and y >= lower >= 0), so use
  // standard form directly: rows a x - s = b and the equality, with an
  // artificial per row.
  const DenseLp lp = to_dense(model);
  const int rows = static_cast<int>(lp.ge.size()) + 1;
  const int n_struct = lp.n;
  const int n_slack = rows - 1;
  const int n_art = rows;
  const int cols = n_struct + n_slack + n_art;
  std::vector<std::vector<double>> t(rows, std::vector<double>(cols + 1, 0.0));
  for (int r = 0; r < rows - 1; ++r) {
    for (int c = 0; c < n_struct; ++c) t[r][c] = lp.ge[r][c];
    t[r][n_struct + r] = -1.0;
    t[r][cols] = lp.ge_rhs[r];
  }
  for (int c = 0; c < n_struct; ++c) t[rows - 1][c] = lp.eq[c];
  t[rows - 1][cols] = lp.eq_rhs;
  for (int r = 0; r < rows; ++r) {
    if (t[r][cols] < 0) {
      for (auto& v : t[r]) v = -v;
    }
    t[r][n_struct + n_slack + r] = 1.0;
  }
  std::vector<int> basis(rows);
  for (int r = 0; r < rows; ++r) basis[r] = n_struct + n_slack + r;

  auto run = [&](const std::vector<double>& cost, int allowed) -> bool {
    for (;;) {
      // Reduced costs d_c = cost_c - sum_r cost_{basis r} t[r][c].
      int enter = -1;
      for (int c = 0; c < allowed; ++c) {
        if (std::find(basis.begin(), basis.end(), c) != basis.end()) continue;
        double d = cost[c];
        for (int r = 0; r < rows; ++r) d -= cost[basis[r]] * t[r][c];
        if (d < -kEps) {
          enter = c;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < rows; ++r) {
        if (t[r][enter] > kEps) {
          const double ratio = t[r][cols] / t[r][enter];
          if (ratio < best - kEps ||
              (std::abs(ratio - best) <= kEps && leave >= 0 && basis[r] < basis[leave])) {
            best = ratio;
            leave = r;
          }
        }
      }
      if (leave < 0) return false;
      const double piv = t[leave][enter];
      for (auto& v : t[leave]) v /= piv;
      for (int r = 0; r < rows; ++r) {
        if (r == leave || t[r][enter] == 0.0) continue;
        const double f = t[r][enter];
        for (int c = 0; c <= cols; ++c) t[r][c] -= f * t[leave][c];
      }
      basis[leave] = enter;
    }
  };

  std::vector<double> phase1(cols, 0.0);
  for (int c = n_struct + n_slack; c < cols; ++c) phase1[c] = 1.0;
  run(phase1, cols);
  double infeas = 0.0;
  for (int r = 0; r < rows; ++r) {
    if (basis[r] >= n_struct + n_slack) infeas += t[r][cols];
  }
  if (infeas > 1e-7) return std::nullopt;
  // Drive remaining (zero-valued) artificials out of the basis when possible.
  for (int r = 0; r < rows; ++r) {
    if (basis[r] < n_struct + n_slack) continue;
    for (int c = 0; c < n_struct + n_slack; ++c) {
      if (std::abs(t[r][c]) > 1e-7 &&
          std::find(basis.begin(), basis.end(), c) == basis.end()) {
        const double piv = t[r][c];
        for (auto& v : t[r]) v /= piv;
        for (int q = 0; q < rows; ++q) {
          if (q == r || t[q][c] == 0.0) continue;
          const double f = t[q][c];
          for (int k = 0; k <= cols; ++k) t[q][k] -= f * t[r][k];
        }
        basis[r] = c;
        break;
      }
    }
  }
  std::vector<double> phase2(cols, 0.0);
  for (int c = 0; c < n_struct; ++c) phase2[c] = lp.cost[c];
  // Artificials stuck in the basis sit at zero on redundant rows; keep them
  // out of pricing.
  if (!run(phase2, n_struct + n_slack)) return std::nullopt;  // unbounded
  double value = 0.0;
  for (int r = 0; r < rows; ++r) {
    if (basis[r] < n_struct) value += lp.cost[basis[r]] * t[r][cols];
  }
  return value;
}

std::optional<double> vertex_lp_value(const LpModel& model) {
  const DenseLp lp = to_dense(model);
  const int n = lp.n;
  const int m = static_cast<int>(lp.ge.size());
  std::optional<double> best;
  // Choose n - 1 inequalities to hold with equality alongside the equality row.
  std::vector<int> pick(n - 1);
  if (n - 1 > m) return std::nullopt;
  for (int k = 0; k < n - 1; ++k) pick[k] = k;
  for (;;) {
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1));
    for (int k = 0; k < n - 1; ++k) {
      for (int c = 0; c < n; ++c) a[k][c] = lp.ge[pick[k]][c];
      a[k][n] = lp.ge_rhs[pick[k]];
    }
    for (int c = 0; c < n; ++c) a[n - 1][c] = lp.eq[c];
    a[n - 1][n] = lp.eq_rhs;
    bool singular = false;
    for (int c = 0; c < n && !singular; ++c) {
      int piv = c;
      for (int r = c + 1; r < n; ++r) {
        if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
      }
      if (std::abs(a[piv][c]) < 1e-12) {
        singular = true;
        break;
      }
      std::swap(a[piv], a[c]);
      for (int r = 0; r < n; ++r) {
        if (r == c) continue;
        const double f = a[r][c] / a[c][c];
        for (int k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
      }
    }
    if (!singular) {
      std::vector<double> x(n);
      for (int c = 0; c < n; ++c) x[c] = a[c][n] / a[c][c];
      bool feasible = true;
      for (int r = 0; r < m && feasible; ++r) {
        double lhs = 0.0;
        for (int c = 0; c < n; ++c) lhs += lp.ge[r][c] * x[c];
        if (lhs < lp.ge_rhs[r] - 1e-9) feasible = false;
      }
      if (feasible) {
        double value = 0.0;
        for (int c = 0; c < n; ++c) value += lp.cost[c] * x[c];
        if (!best || value < *best) best = value;
      }
    }
    int k = n - 2;
    while (k >= 0 && pick[k] == m - (n - 1) + k) --k;
    if (k < 0) break;
    ++pick[k];
    for (int t = k + 1; t < n - 1; ++t) pick[t] = pick[t - 1] + 1;
  }
  return best;
}

}  // namespace pmedian::testing
