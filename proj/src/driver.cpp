#include "pmedian/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <queue>
#include <utility>

#include "pmedian/errors.hpp"

namespace pmedian {
namespace {

constexpr double kIntegralityTolerance = 1e-6;
constexpr double kConvergenceTolerance = 1e-9;

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double relative_gap(double ub, double lb) {
  if (ub <= 0.0) return 0.0;
  return std::max(0.0, (ub - lb) / ub);
}

// A node whose bound reaches this cannot hold an integer solution better
// than ub, since objective values are integers.
double prune_threshold(double ub) {
  return ub - 1.0 + std::max(1e-6, 1e-9 * std::abs(ub));
}

bool is_integral(std::span<const double> y) {
  return std::all_of(y.begin(), y.end(), [](double v) {
    return std::abs(v - std::round(v)) <= kIntegralityTolerance;
  });
}

std::vector<int> open_sites_of(std::span<const double> y) {
  std::vector<int> open;
  for (int j = 0; j < static_cast<int>(y.size()); ++j) {
    if (y[j] > 0.5) open.push_back(j);
  }
  return open;
}

void notify_cuts(const SolveParams& params, const SeparationResult& sep) {
  if (!params.on_cut) return;
  for (const auto& cut : sep.cuts) params.on_cut(cut);
}

void report(const SolveParams& params, int phase, long iter, double lb, double ub,
            long nodes, const MasterState& master) {
  if (!params.on_progress) return;
  Progress p;
  p.phase = phase;
  p.iter = iter;
  p.lb = lb;
  p.ub = ub;
  p.gap = relative_gap(ub, lb);
  p.nodes = nodes;
  p.elapsed = elapsed_since(master.start);
  params.on_progress(p);
}

struct Node {
  std::vector<std::pair<int, int>> fixings;  // (site, value)
  double bound = 0.0;
  int depth = 0;
  long seq = 0;
  std::shared_ptr<const Basis> basis;
};

// Best bound first, then deeper, then older.
struct NodeAfter {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.seq > b.seq;
  }
};

}  // namespace

std::string format_progress(const Progress& p) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%d\t%ld\t%.6f\t%.6f\t%.6f\t%ld\t%.3f", p.phase, p.iter,
                p.lb, p.ub, p.gap, p.nodes, p.elapsed);
  return buf;
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kFeasible:
      return "feasible";
    case SolveStatus::kInfeasible:
      return "infeasible";
  }
  return "unknown";
}

Phase1Result phase1(const Instance& inst, const Preprocessed& prep,
                    const IntegerSolution& initial, const SolveParams& params,
                    MasterState& master) {
  const int n = inst.n_clients();
  const int m = inst.n_sites();
  const long cap = params.phase1_max_rounds > 0 ? params.phase1_max_rounds : 10L * n;
  const auto phase_start = std::chrono::steady_clock::now();

  Phase1Result res;
  res.incumbent = initial;
  auto offer = [&](const IntegerSolution& cand) {
    if (cand.value < res.incumbent.value) res.incumbent = cand;
  };

  // Seed the master with the cuts of the initial solution.
  const std::vector<double> y_h = to_site_vector(initial.open, m);
  const std::vector<double> zero(n, 0.0);
  SeparationResult sep = separate(y_h, zero, prep);
  notify_cuts(params, sep);
  ++res.rounds;
  double ub_mp = sep.upper_bound;
  add_cuts(master.pool, master.model, sep.cuts);

  double lb = 0.0;
  LpSolution sol;
  bool stale = true;  // cuts were added since sol was computed
  for (long lp_round = 0;; ++lp_round) {
    if (elapsed_since(master.start) > params.time_limit) {
      res.timed_out = true;
      break;
    }
    if (lp_round >= cap) break;
    sol = master.solver.solve(master.model);
    stale = false;
    if (sol.status != LpStatus::kOptimal) {
      throw SolverFailure("master LP infeasible in phase 1", sol.iterations);
    }
    lb = std::max(lb, sol.objective);

    sep = separate(sol.y, sol.theta, prep);
    notify_cuts(params, sep);
    ++res.rounds;
    ub_mp = std::min(ub_mp, sep.upper_bound);
    if (is_integral(sol.y)) {
      const std::vector<int> open = open_sites_of(sol.y);
      if (static_cast<int>(open.size()) == inst.p()) {
        offer({open, evaluate(open, inst, prep)});
      }
    } else if (params.rounding) {
      offer(round_solution(sol.y, inst, prep));
    }
    const int added = add_cuts(master.pool, master.model, sep.cuts);
    stale = added > 0;
    report(params, 1, res.rounds, lb, static_cast<double>(res.incumbent.value), 0, master);
    if (added == 0 || lb >= ub_mp - kConvergenceTolerance * std::abs(ub_mp)) {
      res.converged = true;
      break;
    }
    if (master.pool.size() > params.max_cuts) break;
  }
  if (stale && !res.timed_out) {
    // Bring the final solution in line with the final cut set.
    sol = master.solver.solve(master.model);
    if (sol.status != LpStatus::kOptimal) {
      throw SolverFailure("master LP infeasible in phase 1", sol.iterations);
    }
    lb = std::max(lb, sol.objective);
  }

  res.lb1 = lb;
  res.lp = sol;
  res.y = sol.y;
  if (sol.status == LpStatus::kOptimal) res.khat = saturation_index(master.pool, sol);
  res.seconds = elapsed_since(phase_start);
  return res;
}

SolveResult phase2(const Instance& inst, const Preprocessed& prep,
                   const Phase1Result& first, const SolveParams& params,
                   MasterState& master) {
  const int m = inst.n_sites();
  SolveResult res;
  IntegerSolution incumbent = first.incumbent;
  long rounds = 0;
  long nodes = 0;

  const std::vector<double> root_lower(master.model.lower_bounds().begin(),
                                       master.model.lower_bounds().end());
  const std::vector<double> root_upper(master.model.upper_bounds().begin(),
                                       master.model.upper_bounds().end());

  std::priority_queue<Node, std::vector<Node>, NodeAfter> open;
  long seq = 0;
  {
    Node root;
    root.bound = first.lb1;
    root.seq = seq++;
    if (!first.lp.basis.empty()) root.basis = std::make_shared<const Basis>(first.lp.basis);
    open.push(std::move(root));
  }

  auto ub = [&] { return static_cast<double>(incumbent.value); };
  std::string stop;

  while (!open.empty()) {
    if (elapsed_since(master.start) > params.time_limit) {
      stop = "time limit";
      break;
    }
    if (open.size() > params.max_open_nodes || master.pool.size() > params.max_cuts) {
      stop = "memory guard";
      break;
    }
    Node node = open.top();
    open.pop();
    if (node.bound >= prune_threshold(ub())) {
      // Every remaining node is at least as bad.
      while (!open.empty()) open.pop();
      break;
    }
    ++nodes;

    for (int j = 0; j < m; ++j) master.model.set_bounds(j, root_lower[j], root_upper[j]);
    for (const auto& [site, value] : node.fixings) {
      master.model.set_bounds(site, value, value);
    }

    const Basis* warm = node.basis.get();
    double bound = node.bound;
    int branch_site = -1;
    std::shared_ptr<const Basis> child_basis;
    for (;;) {
      const LpSolution sol = master.solver.solve(master.model, warm);
      warm = nullptr;
      if (sol.status != LpStatus::kOptimal) break;
      bound = std::max(bound, sol.objective);
      if (bound >= prune_threshold(ub())) break;

      const bool integral = is_integral(sol.y);
      if (integral || params.phase2_fractional_separation) {
        const SeparationResult sep = separate(sol.y, sol.theta, prep);
        notify_cuts(params, sep);
        ++rounds;
        if (integral) {
          const std::vector<int> sites = open_sites_of(sol.y);
          if (static_cast<int>(sites.size()) == inst.p()) {
            const Distance value = evaluate(sites, inst, prep);
            if (value < incumbent.value) {
              incumbent = {sites, value};
              report(params, 2, first.rounds + rounds, bound, ub(), nodes, master);
            }
          }
        }
        if (add_cuts(master.pool, master.model, sep.cuts) > 0) continue;
        if (integral) break;
      }
      // Most fractional site, lowest index on ties.
      double best = -1.0;
      for (int j = 0; j < m; ++j) {
        const double f = std::abs(sol.y[j] - std::round(sol.y[j]));
        if (f > kIntegralityTolerance && f > best + 1e-12) {
          best = f;
          branch_site = j;
        }
      }
      child_basis = std::make_shared<const Basis>(sol.basis);
      break;
    }

    if (branch_site >= 0) {
      for (int value : {1, 0}) {
        Node child;
        child.fixings = node.fixings;
        child.fixings.emplace_back(branch_site, value);
        child.bound = bound;
        child.depth = node.depth + 1;
        child.seq = seq++;
        child.basis = child_basis;
        open.push(std::move(child));
      }
    }
    if (nodes % 1000 == 0) {
      const double lb = open.empty() ? ub() : std::min(open.top().bound, ub());
      report(params, 2, first.rounds + rounds, lb, ub(), nodes, master);
    }
  }

  for (int j = 0; j < m; ++j) master.model.set_bounds(j, root_lower[j], root_upper[j]);

  res.value = incumbent.value;
  res.open = incumbent.open;
  res.nodes = nodes;
  res.iterations = first.rounds + rounds;
  if (open.empty() && stop.empty()) {
    res.status = SolveStatus::kOptimal;
    res.lower_bound = ub();
    res.termination = "tree exhausted";
  } else {
    res.status = SolveStatus::kFeasible;
    double lb = ub();
    if (!open.empty()) lb = std::min(lb, open.top().bound);
    res.lower_bound = std::max(first.lb1, lb);
    res.termination = stop;
  }
  res.gap = relative_gap(ub(), res.lower_bound);
  report(params, 2, res.iterations, res.lower_bound, ub(), nodes, master);
  return res;
}

SolveResult solve(const Instance& inst, const SolveParams& params) {
  MasterState master(inst.n_sites(), inst.n_clients(), inst.p());
  const Preprocessed prep(inst);
  const IntegerSolution initial = initial_solution(inst, prep, params.seed, params.initial);

  Phase1Result first = phase1(inst, prep, initial, params, master);
  const double t1 = elapsed_since(master.start);

  SolveResult res;
  auto finish = [&](SolveResult r) {
    r.t1 = t1;
    r.lb1 = first.lb1;
    r.ub1 = first.incumbent.value;
    r.initial_value = initial.value;
    r.removed_cuts = res.removed_cuts;
    r.fixed_to_zero = res.fixed_to_zero;
    r.fixed_to_one = res.fixed_to_one;
    r.cuts = master.pool.size();
    r.lp_iterations = master.solver.total_iterations();
    r.phase1_converged = first.converged;
    r.total_seconds = elapsed_since(master.start);
    return r;
  };
  auto closed_at_root = [&](std::string why) {
    SolveResult r;
    r.status = SolveStatus::kOptimal;
    r.value = first.incumbent.value;
    r.open = first.incumbent.open;
    r.lower_bound = static_cast<double>(first.incumbent.value);
    r.iterations = first.rounds;
    r.termination = std::move(why);
    return finish(std::move(r));
  };

  if (first.timed_out) {
    SolveResult r;
    r.status = SolveStatus::kFeasible;
    r.value = first.incumbent.value;
    r.open = first.incumbent.open;
    r.lower_bound = first.lb1;
    r.gap = relative_gap(static_cast<double>(r.value), r.lower_bound);
    r.iterations = first.rounds;
    r.termination = "time limit";
    return finish(std::move(r));
  }

  const double ub1 = static_cast<double>(first.incumbent.value);
  if (first.lb1 >= prune_threshold(ub1)) return closed_at_root("root bound");

  if (params.reduction) {
    res.removed_cuts = reduce_constraints(master.pool, master.model, first.lp);
  }
  if (params.rc_fixing) {
    const FixingResult fix =
        reduced_cost_fixing(first.lp.objective, ub1, first.lp, master.model);
    if (fix.proves_optimal) return closed_at_root("reduced-cost fixing");
    res.fixed_to_zero = static_cast<int>(fix.fixed_to_zero.size());
    res.fixed_to_one = static_cast<int>(fix.fixed_to_one.size());
  }
  return finish(phase2(inst, prep, first, params, master));
}

}  // namespace pmedian
