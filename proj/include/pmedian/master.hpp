#ifndef PMEDIAN_MASTER_HPP
#define PMEDIAN_MASTER_HPP

#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "pmedian/benders.hpp"
#include "pmedian/simplex.hpp"

namespace pmedian {

// Slack below which a cut counts as saturated by an LP solution.
inline constexpr double kSaturationTolerance = 1e-6;
// Margin on the reduced-cost fixing test LB + |rc| > UB.
inline constexpr double kFixingMargin = 1e-6;

// Every Benders cut ever generated, at most one per (client, ktilde). Active
// cuts are exactly the rows of the master model.
class CutPool {
 public:
  struct Entry {
    BendersCut cut;
    bool active = false;
    RowId row = -1;  // valid while active
  };

  explicit CutPool(int n_clients) : by_client_(n_clients) {}

  int n_clients() const { return static_cast<int>(by_client_.size()); }
  bool contains(int client, int ktilde) const;
  const Entry* find(int client, int ktilde) const;
  // Entries of one client, keyed by ktilde.
  const std::map<int, Entry>& entries(int client) const { return by_client_[client]; }

  std::size_t size() const { return size_; }
  std::size_t num_active() const { return active_; }

  // Client, ktilde, rhs, support size and state per line.
  void dump(std::ostream& out) const;

 private:
  friend int add_cuts(CutPool&, LpModel&, std::span<const BendersCut>);
  friend int reduce_constraints(CutPool&, LpModel&, const LpSolution&);

  std::vector<std::map<int, Entry>> by_client_;
  std::size_t size_ = 0;
  std::size_t active_ = 0;
};

// Adds cuts whose (client, ktilde) is new, and re-activates inactive ones.
// Returns how many rows were added to the model.
int add_cuts(CutPool& pool, LpModel& model, std::span<const BendersCut> cuts);

// Per client, the largest ktilde among active cuts saturated by sol (slack at
// most kSaturationTolerance), or -1 if none is.
std::vector<int> saturation_index(const CutPool& pool, const LpSolution& sol);

// Removes every active cut with ktilde above the client's saturation index.
// A client without a saturated cut keeps its lowest-ktilde cut. Removed cuts
// stay in the pool, inactive. Returns the number removed.
int reduce_constraints(CutPool& pool, LpModel& model, const LpSolution& sol);

struct FixingResult {
  std::vector<int> fixed_to_zero;
  std::vector<int> fixed_to_one;
  // The fixings leave no feasible y, which proves ub optimal.
  bool proves_optimal = false;
};

// Fixes y_j to 0 when it sits at its lower bound with lb + rc_j > ub, and to
// 1 when it sits at its upper bound with lb - rc_j > ub, both with margin
// kFixingMargin. sol must be the LP solution that produced lb.
FixingResult reduced_cost_fixing(double lb, double ub, const LpSolution& sol,
                                 LpModel& model);

}  // namespace pmedian

#endif  // PMEDIAN_MASTER_HPP
