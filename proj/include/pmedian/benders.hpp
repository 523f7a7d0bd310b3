#ifndef PMEDIAN_BENDERS_HPP
#define PMEDIAN_BENDERS_HPP

#include <span>
#include <string>
#include <vector>

#include "pmedian/instance.hpp"

namespace pmedian {

// Master solution values y_j in [0, 1], fractional or binary.
using SiteVector = std::span<const double>;

// Residual mass below this counts as zero when locating the cut index.
inline constexpr double kResidualTolerance = 1e-9;
// A cut is emitted when theta_i < value - (abs + rel * rhs).
inline constexpr double kViolationAbsTolerance = 1e-9;
inline constexpr double kViolationRelTolerance = 1e-12;

struct SiteCoeff {
  int site;
  double coeff;

  friend bool operator==(const SiteCoeff&, const SiteCoeff&) = default;
};

// theta_client >= rhs - sum_j coeff_j * y_j, with every coeff_j > 0.
//
// Built for level index ktilde (0-based, in [0, K_i - 1]): rhs is
// levels(client)[ktilde], support is every site whose distance level is below
// ktilde, each with coefficient rhs - d_ij. ktilde == 0 gives theta >= D_i^1.
struct BendersCut {
  int client = 0;
  int ktilde = 0;
  double rhs = 0.0;
  std::vector<SiteCoeff> coeffs;

  // rhs - sum coeff_j * y_j.
  double evaluate(SiteVector y) const;

  friend bool operator==(const BendersCut&, const BendersCut&) = default;
};

struct SeparationResult {
  double upper_bound = 0.0;       // sum_i OPT(SP_i(ybar))
  std::vector<BendersCut> cuts;   // in client order
};

struct DualCheck {
  double primal_value = 0.0;
  double dual_value = 0.0;
};

// Largest level index whose cumulative open mass stays below one, found by a
// single scan of the client's sorted sites. Throws ContractViolation when the
// total mass is below one.
int compute_ktilde(int client, SiteVector ybar, const Preprocessed& prep);

// OPT(SP_i(ybar)) in closed form given ktilde. For binary ybar this is the
// distance from the client to its nearest open site.
double subproblem_value(int client, int ktilde, SiteVector ybar,
                        const Preprocessed& prep);

BendersCut build_cut(int client, int ktilde, const Preprocessed& prep);

// One pass over all clients: total subproblem value plus one cut for each
// client whose theta underestimates its subproblem value.
SeparationResult separate(SiteVector ybar, std::span<const double> thetabar,
                          const Preprocessed& prep);

// Primal z_k = max(0, 1 - mass within level k), k = 0..K_i-1.
std::vector<double> subproblem_primal(int client, SiteVector ybar,
                                      const Preprocessed& prep);
// Dual v_k = D^{ktilde+1} - D^k for k <= ktilde (1-based), 0 beyond.
std::vector<double> subproblem_dual(int client, int ktilde,
                                    const Preprocessed& prep);

// Evaluates the primal objective at subproblem_primal and the dual objective
// at subproblem_dual. Throws std::logic_error if the dual is infeasible.
DualCheck dual_check(int client, int ktilde, SiteVector ybar,
                     const Preprocessed& prep);

// "theta_3 >= 5 - 3 y_3" with 1-based indices, for diffing.
std::string format_cut(const BendersCut& cut);

}  // namespace pmedian

#endif  // PMEDIAN_BENDERS_HPP
