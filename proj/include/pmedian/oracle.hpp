#ifndef PMEDIAN_ORACLE_HPP
#define PMEDIAN_ORACLE_HPP

#include <cstdint>
#include <vector>

#include "pmedian/benders.hpp"
#include "pmedian/instance.hpp"

// Ground truth for tests: nothing here is on the production solve path.
namespace pmedian::oracle {

inline constexpr std::uint64_t kMaxSubsets = 10'000'000;
inline constexpr std::int64_t kMaxF4Rows = 2'000'000;

struct OracleResult {
  Distance optimum = 0;
  std::vector<int> open;      // lexicographically first optimal set
  std::uint64_t count = 0;    // number of optimal sets
};

// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(int n, int k);

// Exhaustive search over all p-subsets. Throws GuardExceeded when there are
// more than kMaxSubsets.
OracleResult enumerate_opt(const Instance& inst);

// LP relaxation value of the compact theta formulation with every row
// theta_i >= D_i^k - sum_{j: d_ij < D_i^k} (D_i^k - d_ij) y_j written out,
// one per client and distance level. Rows are built from the distance
// matrix directly. Throws GuardExceeded above kMaxF4Rows rows.
double full_f4_lp_value(const Instance& inst, const Preprocessed& prep);

// D^1 + sum_k (D^{k+1} - D^k) max(0, 1 - sum_{j: d_ij <= D^k} ybar_j), by a
// plain scan per level.
double sp_lp_value(int client, SiteVector ybar, const Preprocessed& prep);

// The cut index by its definition: the largest level number k (1-based)
// with 1 - sum_{j: d_ij <= D^k} ybar_j > kResidualTolerance, or 0 if the
// nearest level already holds unit mass. Naive per-level scan.
int naive_ktilde(int client, SiteVector ybar, const Preprocessed& prep);

}  // namespace pmedian::oracle

#endif  // PMEDIAN_ORACLE_HPP
