#include "pmedian/benders.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pmedian/errors.hpp"

namespace pmedian {

double BendersCut::evaluate(SiteVector y) const {
  double value = rhs;
  for (const auto& [site, coeff] : coeffs) value -= coeff * y[site];
  return value;
}

int compute_ktilde(int client, SiteVector ybar, const Preprocessed& prep) {
  const auto order = prep.order(client);
  const int m = prep.n_sites();
  int ktilde = 0;
  int r = 0;
  double residual = 1.0 - ybar[order[0]];
  while (residual > kResidualTolerance && r < m - 1) {
    if (prep.rank(client, order[r + 1]) > prep.rank(client, order[r])) ++ktilde;
    ++r;
    residual -= ybar[order[r]];
  }
  if (residual > kResidualTolerance) {
    throw ContractViolation("open mass " + std::to_string(1.0 - residual) +
                            " < 1 for client " + std::to_string(client) +
                            ": the cut index is undefined");
  }
  return ktilde;
}

double subproblem_value(int client, int ktilde, SiteVector ybar,
                        const Preprocessed& prep) {
  const auto levels = prep.levels(client);
  const double top = static_cast<double>(levels[ktilde]);
  double value = top;
  for (std::int32_t site : prep.order(client)) {
    const auto rank = prep.rank(client, site);
    if (rank >= ktilde) break;
    value -= (top - static_cast<double>(levels[rank])) * ybar[site];
  }
  return value;
}

BendersCut build_cut(int client, int ktilde, const Preprocessed& prep) {
  if (ktilde < 0 || ktilde >= prep.num_levels(client)) {
    throw std::out_of_range("ktilde " + std::to_string(ktilde) + " outside [0, " +
                            std::to_string(prep.num_levels(client)) + ")");
  }
  const auto levels = prep.levels(client);
  BendersCut cut;
  cut.client = client;
  cut.ktilde = ktilde;
  cut.rhs = static_cast<double>(levels[ktilde]);
  for (std::int32_t site : prep.order(client)) {
    const auto rank = prep.rank(client, site);
    if (rank >= ktilde) break;
    cut.coeffs.push_back({site, static_cast<double>(levels[ktilde] - levels[rank])});
  }
  return cut;
}

SeparationResult separate(SiteVector ybar, std::span<const double> thetabar,
                          const Preprocessed& prep) {
  SeparationResult result;
  for (int i = 0; i < prep.n_clients(); ++i) {
    const int ktilde = compute_ktilde(i, ybar, prep);
    const double value = subproblem_value(i, ktilde, ybar, prep);
    result.upper_bound += value;
    const double rhs = static_cast<double>(prep.levels(i)[ktilde]);
    const double slack = kViolationAbsTolerance + kViolationRelTolerance * rhs;
    if (thetabar[i] < value - slack) {
      result.cuts.push_back(build_cut(i, ktilde, prep));
    }
  }
  return result;
}

std::vector<double> subproblem_primal(int client, SiteVector ybar,
                                      const Preprocessed& prep) {
  const int levels = prep.num_levels(client);
  std::vector<double> mass(levels, 0.0);
  for (int j = 0; j < prep.n_sites(); ++j) mass[prep.rank(client, j)] += ybar[j];
  std::vector<double> z(levels);
  double cumulative = 0.0;
  for (int k = 0; k < levels; ++k) {
    cumulative += mass[k];
    z[k] = std::max(0.0, 1.0 - cumulative);
  }
  return z;
}

std::vector<double> subproblem_dual(int client, int ktilde,
                                    const Preprocessed& prep) {
  const auto levels = prep.levels(client);
  std::vector<double> v(levels.size(), 0.0);
  // 1-based k <= ktilde is 0-based k < ktilde.
  for (int k = 0; k < ktilde; ++k) {
    v[k] = static_cast<double>(levels[ktilde] - levels[k]);
  }
  return v;
}

DualCheck dual_check(int client, int ktilde, SiteVector ybar,
                     const Preprocessed& prep) {
  const auto levels = prep.levels(client);
  const int count = static_cast<int>(levels.size());
  std::vector<double> mass(count, 0.0);
  for (int j = 0; j < prep.n_sites(); ++j) mass[prep.rank(client, j)] += ybar[j];

  DualCheck check;
  const auto z = subproblem_primal(client, ybar, prep);
  check.primal_value = static_cast<double>(levels[0]);
  for (int k = 0; k + 1 < count; ++k) {
    check.primal_value += static_cast<double>(levels[k + 1] - levels[k]) * z[k];
  }

  const auto v = subproblem_dual(client, ktilde, prep);
  for (int k = 0; k < count; ++k) {
    if (v[k] < 0.0) throw std::logic_error("constructed dual has v_k < 0");
    if (k + 1 < count &&
        v[k] - v[k + 1] > static_cast<double>(levels[k + 1] - levels[k]) + 1e-9) {
      throw std::logic_error("constructed dual violates v_k - v_{k+1} <= D^{k+1} - D^k");
    }
  }
  check.dual_value = static_cast<double>(levels[0]) + v[0] * (1.0 - mass[0]);
  for (int k = 1; k < count; ++k) check.dual_value -= v[k] * mass[k];
  return check;
}

std::string format_cut(const BendersCut& cut) {
  std::ostringstream out;
  out << "theta_" << cut.client + 1 << " >= " << cut.rhs;
  for (const auto& [site, coeff] : cut.coeffs) {
    out << " - " << coeff << " y_" << site + 1;
  }
  return out.str();
}

}  // namespace pmedian
