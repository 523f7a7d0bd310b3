#include "pmedian/heuristics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace pmedian {
namespace {

constexpr Distance kFar = std::numeric_limits<Distance>::max() / 4;

IntegerSolution make_solution(std::vector<int> open, const Instance& inst,
                              const Preprocessed& prep) {
  std::sort(open.begin(), open.end());
  IntegerSolution sol;
  sol.value = evaluate(open, inst, prep);
  sol.open = std::move(open);
  return sol;
}

std::vector<int> greedy(const Instance& inst) {
  const int n = inst.n_clients();
  const int m = inst.n_sites();
  std::vector<Distance> best(n, kFar);
  std::vector<char> open(m, 0);
  std::vector<int> chosen;
  for (int step = 0; step < inst.p(); ++step) {
    int pick = -1;
    Distance pick_cost = 0;
    for (int j = 0; j < m; ++j) {
      if (open[j]) continue;
      Distance cost = 0;
      for (int i = 0; i < n; ++i) cost += std::min(best[i], inst.dist(i, j));
      if (pick < 0 || cost < pick_cost) {
        pick = j;
        pick_cost = cost;
      }
    }
    open[pick] = 1;
    chosen.push_back(pick);
    for (int i = 0; i < n; ++i) best[i] = std::min(best[i], inst.dist(i, pick));
  }
  return chosen;
}

// Nearest and second-nearest open site per client.
struct Assignment {
  std::vector<int> first;
  std::vector<Distance> d1;
  std::vector<Distance> d2;

  void compute(const std::vector<char>& is_open, const Instance& inst,
               const Preprocessed& prep) {
    const int n = inst.n_clients();
    first.assign(n, -1);
    d1.assign(n, kFar);
    d2.assign(n, kFar);
    for (int i = 0; i < n; ++i) {
      for (std::int32_t j : prep.order(i)) {
        if (!is_open[j]) continue;
        if (first[i] < 0) {
          first[i] = j;
          d1[i] = inst.dist(i, j);
        } else {
          d2[i] = inst.dist(i, j);
          break;
        }
      }
    }
  }
};

void interchange(std::vector<int>& open_sites, const Instance& inst,
                 const Preprocessed& prep, std::uint64_t seed) {
  const int n = inst.n_clients();
  const int m = inst.n_sites();
  if (inst.p() == m) return;
  std::vector<char> is_open(m, 0);
  for (int j : open_sites) is_open[j] = 1;
  Assignment a;
  a.compute(is_open, inst, prep);
  std::vector<Distance> loss(m, 0);

  const long budget = 10L * m;
  long swaps = 0;
  int pos = static_cast<int>(seed % static_cast<std::uint64_t>(m));
  int since_improvement = 0;
  while (since_improvement < m && swaps < budget) {
    const int in = pos;
    pos = pos + 1 == m ? 0 : pos + 1;
    ++since_improvement;
    if (is_open[in]) continue;

    Distance gain = 0;
    for (int j : open_sites) loss[j] = 0;
    for (int i = 0; i < n; ++i) {
      const Distance d = inst.dist(i, in);
      if (d < a.d1[i]) {
        gain += a.d1[i] - d;
      } else {
        loss[a.first[i]] += std::min(d, a.d2[i]) - a.d1[i];
      }
    }
    int out = -1;
    for (int j : open_sites) {
      if (out < 0 || loss[j] < loss[out] || (loss[j] == loss[out] && j < out)) out = j;
    }
    if (gain - loss[out] <= 0) continue;

    is_open[out] = 0;
    is_open[in] = 1;
    *std::find(open_sites.begin(), open_sites.end(), out) = in;
    a.compute(is_open, inst, prep);
    ++swaps;
    since_improvement = 0;
  }
}

}  // namespace

Distance evaluate(std::span<const int> open, const Instance& inst,
                  const Preprocessed& prep) {
  if (static_cast<int>(open.size()) != inst.p()) {
    throw std::invalid_argument("expected " + std::to_string(inst.p()) +
                                " open sites, got " + std::to_string(open.size()));
  }
  std::vector<char> is_open(inst.n_sites(), 0);
  for (int j : open) {
    if (j < 0 || j >= inst.n_sites()) {
      throw std::invalid_argument("site " + std::to_string(j) + " out of range");
    }
    if (is_open[j]) throw std::invalid_argument("site " + std::to_string(j) + " opened twice");
    is_open[j] = 1;
  }
  Distance total = 0;
  for (int i = 0; i < inst.n_clients(); ++i) {
    for (std::int32_t j : prep.order(i)) {
      if (is_open[j]) {
        total += inst.dist(i, j);
        break;
      }
    }
  }
  return total;
}

IntegerSolution initial_solution(const Instance& inst, const Preprocessed& prep,
                                 std::uint64_t seed, InitialMode mode) {
  if (mode == InitialMode::kRandom) {
    std::vector<int> sites(inst.n_sites());
    std::iota(sites.begin(), sites.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(sites.begin(), sites.end(), rng);
    sites.resize(inst.p());
    return make_solution(std::move(sites), inst, prep);
  }
  std::vector<int> open = greedy(inst);
  interchange(open, inst, prep, seed);
  return make_solution(std::move(open), inst, prep);
}

IntegerSolution round_solution(SiteVector ybar, const Instance& inst,
                               const Preprocessed& prep) {
  std::vector<int> sites(inst.n_sites());
  std::iota(sites.begin(), sites.end(), 0);
  std::stable_sort(sites.begin(), sites.end(),
                   [&](int a, int b) { return ybar[a] > ybar[b]; });
  sites.resize(inst.p());
  return make_solution(std::move(sites), inst, prep);
}

std::vector<double> to_site_vector(std::span<const int> open, int n_sites) {
  std::vector<double> y(n_sites, 0.0);
  for (int j : open) y[j] = 1.0;
  return y;
}

}  // namespace pmedian
