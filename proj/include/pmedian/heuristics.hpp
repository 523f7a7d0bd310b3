#ifndef PMEDIAN_HEURISTICS_HPP
#define PMEDIAN_HEURISTICS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "pmedian/benders.hpp"
#include "pmedian/instance.hpp"

namespace pmedian {

struct IntegerSolution {
  std::vector<int> open;  // ascending site indices, exactly p of them
  Distance value = 0;

  friend bool operator==(const IntegerSolution&, const IntegerSolution&) = default;
};

enum class InitialMode { kHeuristic, kRandom };

// Sum over clients of the distance to the nearest open site. Throws
// std::invalid_argument unless open holds exactly p distinct valid sites.
Distance evaluate(std::span<const int> open, const Instance& inst,
                  const Preprocessed& prep);

// kHeuristic: greedy opening followed by first-improvement swaps (at most
// 10 * M applied swaps); the seed rotates the swap scan. kRandom: p sites
// drawn uniformly from the seed.
IntegerSolution initial_solution(const Instance& inst, const Preprocessed& prep,
                                 std::uint64_t seed,
                                 InitialMode mode = InitialMode::kHeuristic);

// Opens the p sites with the largest ybar, ties by ascending index.
IntegerSolution round_solution(SiteVector ybar, const Instance& inst,
                               const Preprocessed& prep);

// 0/1 vector of length n_sites with ones at open.
std::vector<double> to_site_vector(std::span<const int> open, int n_sites);

}  // namespace pmedian

#endif  // PMEDIAN_HEURISTICS_HPP
