#ifndef PMEDIAN_LP_EXPORT_HPP
#define PMEDIAN_LP_EXPORT_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>

#include "pmedian/instance.hpp"

namespace pmedian {

// F1: assignment variables x_ij. F2: one z per client and distance level
// covering every closer site. F3: the same z chained level to level. F4: one
// theta per client with one row per distance level.
enum class Formulation { kF1, kF2, kF3, kF4 };

std::optional<Formulation> formulation_from_string(std::string_view s);
std::string_view to_string(Formulation f);

// Refuse to write models with more nonzeros than this.
inline constexpr std::int64_t kMaxExportNonzeros = 200'000'000;

struct ModelSize {
  std::int64_t variables = 0;
  std::int64_t constraints = 0;
  std::int64_t nonzeros = 0;
};

// Size of the model write_lp would produce, without writing it.
ModelSize model_size(const Instance& inst, const Preprocessed& prep, Formulation f);

// Writes the model in CPLEX LP format. Variables and constraints appear in
// index order, so the output is byte-identical for identical input. Names
// are 1-based: y3, x2_5, z2_1, theta4. Throws GuardExceeded when the model
// is larger than kMaxExportNonzeros.
ModelSize write_lp(const Instance& inst, const Preprocessed& prep, Formulation f,
                   std::ostream& out);

}  // namespace pmedian

#endif  // PMEDIAN_LP_EXPORT_HPP
