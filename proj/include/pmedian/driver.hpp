#ifndef PMEDIAN_DRIVER_HPP
#define PMEDIAN_DRIVER_HPP

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pmedian/benders.hpp"
#include "pmedian/heuristics.hpp"
#include "pmedian/instance.hpp"
#include "pmedian/master.hpp"
#include "pmedian/simplex.hpp"

namespace pmedian {

struct Progress {
  int phase = 1;
  long iter = 0;
  double lb = 0.0;
  double ub = 0.0;
  double gap = 0.0;
  long nodes = 0;
  double elapsed = 0.0;
};

// "phase\titer\tLB\tUB\tgap\tnodes\telapsed".
std::string format_progress(const Progress& p);

struct SolveParams {
  double time_limit = 36000.0;  // seconds
  std::uint64_t seed = 0;
  InitialMode initial = InitialMode::kHeuristic;
  bool rounding = true;
  bool reduction = true;
  bool rc_fixing = true;
  bool phase2_fractional_separation = false;
  // 0 selects 10 * N.
  long phase1_max_rounds = 0;
  // Open-node and cut-pool caps; exceeding either stops the search.
  std::size_t max_open_nodes = 2'000'000;
  std::size_t max_cuts = 50'000'000;

  std::function<void(const Progress&)> on_progress;
  // Sees every cut generated by separation, duplicates included.
  std::function<void(const BendersCut&)> on_cut;
};

enum class SolveStatus { kOptimal, kFeasible, kInfeasible };

std::string to_string(SolveStatus status);

// The master problem shared by both phases.
struct MasterState {
  MasterState(int n_sites, int n_clients, int p)
      : model(n_sites, n_clients, p), pool(n_clients) {}

  LpModel model;
  CutPool pool;
  SimplexSolver solver;
  // Time limits and elapsed times are measured from here.
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

struct Phase1Result {
  double lb1 = 0.0;
  IntegerSolution incumbent;  // value is UB1
  std::vector<double> y;      // final LP point
  LpSolution lp;              // final LP solution on the current model
  std::vector<int> khat;      // saturation index per client, -1 if none
  long rounds = 0;            // separation rounds
  double seconds = 0.0;
  bool converged = false;
  bool timed_out = false;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kInfeasible;
  Distance value = 0;          // incumbent (UB)
  std::vector<int> open;
  double lower_bound = 0.0;
  double gap = 0.0;            // (UB - LB) / UB
  long iterations = 0;         // separation rounds, both phases
  long nodes = 0;              // branch-and-bound nodes processed
  double t1 = 0.0;             // seconds until the end of phase 1
  double total_seconds = 0.0;
  double lb1 = 0.0;
  Distance ub1 = 0;
  Distance initial_value = 0;
  int removed_cuts = 0;
  int fixed_to_zero = 0;
  int fixed_to_one = 0;
  std::size_t cuts = 0;        // distinct cuts generated
  long lp_iterations = 0;
  bool phase1_converged = false;
  std::string termination;     // why the search stopped
};

Phase1Result phase1(const Instance& inst, const Preprocessed& prep,
                    const IntegerSolution& initial, const SolveParams& params,
                    MasterState& master);

// Branch-and-Benders-cut from the phase-1 state; the caller has already
// applied constraint reduction and fixing to master.model.
SolveResult phase2(const Instance& inst, const Preprocessed& prep,
                   const Phase1Result& first, const SolveParams& params,
                   MasterState& master);

SolveResult solve(const Instance& inst, const SolveParams& params = {});

}  // namespace pmedian

#endif  // PMEDIAN_DRIVER_HPP
