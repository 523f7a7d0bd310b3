#include "pmedian/lp_export.hpp"

#include <ostream>
#include <string>
#include <vector>

#include "pmedian/errors.hpp"

namespace pmedian {
namespace {

// CPLEX caps LP-format lines at 560 characters; wrap well before that.
constexpr std::size_t kWrapColumn = 240;

class LinearWriter {
 public:
  explicit LinearWriter(std::ostream& out) : out_(out) {}

  void begin(const std::string& label) {
    line_ = " " + label + ":";
    first_ = true;
  }
  void term(std::int64_t coeff, const std::string& var) {
    if (coeff == 0) return;
    std::string t;
    if (first_) {
      if (coeff < 0) t = "-";
    } else {
      t = coeff < 0 ? " -" : " +";
    }
    const std::int64_t mag = coeff < 0 ? -coeff : coeff;
    t += " ";
    if (mag != 1) t += std::to_string(mag) + " ";
    t += var;
    push(t);
    first_ = false;
  }
  void constant(std::int64_t value) {
    if (value == 0) return;
    std::string t = first_ ? "" : " +";
    t += " " + std::to_string(value);
    push(t);
    first_ = false;
  }
  void end(const std::string& tail) {
    if (first_) push(" 0 y1");
    push(tail.empty() ? tail : " " + tail);
    out_ << line_ << '\n';
    line_.clear();
  }

 private:
  void push(const std::string& t) {
    if (line_.size() + t.size() > kWrapColumn) {
      out_ << line_ << '\n';
      line_ = "   ";
    }
    line_ += t;
  }

  std::ostream& out_;
  std::string line_;
  bool first_ = true;
};

std::string y(int j) { return "y" + std::to_string(j + 1); }
std::string x(int i, int j) { return "x" + std::to_string(i + 1) + "_" + std::to_string(j + 1); }
std::string z(int i, int k) { return "z" + std::to_string(i + 1) + "_" + std::to_string(k + 1); }
std::string theta(int i) { return "theta" + std::to_string(i + 1); }

}  // namespace

std::optional<Formulation> formulation_from_string(std::string_view s) {
  if (s == "f1" || s == "F1") return Formulation::kF1;
  if (s == "f2" || s == "F2") return Formulation::kF2;
  if (s == "f3" || s == "F3") return Formulation::kF3;
  if (s == "f4" || s == "F4") return Formulation::kF4;
  return std::nullopt;
}

std::string_view to_string(Formulation f) {
  switch (f) {
    case Formulation::kF1:
      return "F1";
    case Formulation::kF2:
      return "F2";
    case Formulation::kF3:
      return "F3";
    case Formulation::kF4:
      return "F4";
  }
  return "?";
}

ModelSize model_size(const Instance& inst, const Preprocessed& prep, Formulation f) {
  const std::int64_t n = inst.n_clients();
  const std::int64_t m = inst.n_sites();
  const std::int64_t k = prep.total_levels();
  ModelSize s;
  switch (f) {
    case Formulation::kF1:
      s.variables = m + n * m;
      s.constraints = 1 + n * (1 + m);
      s.nonzeros = m + n * m + 2 * n * m;
      break;
    case Formulation::kF2:
    case Formulation::kF4: {
      s.variables = f == Formulation::kF2 ? m + k : m + n;
      s.constraints = 1 + k;
      s.nonzeros = m + k;
      for (int i = 0; i < n; ++i) {
        // Sites at level <= t (F2) or < t (F4), summed over levels t.
        std::vector<std::int64_t> per_level(prep.num_levels(i), 0);
        for (int j = 0; j < m; ++j) ++per_level[prep.rank(i, j)];
        std::int64_t below = 0;
        for (std::int64_t c : per_level) {
          s.nonzeros += f == Formulation::kF2 ? below + c : below;
          below += c;
        }
      }
      break;
    }
    case Formulation::kF3:
      s.variables = m + k;
      s.constraints = 1 + k;
      s.nonzeros = m + n * m + k + (k - n);
      break;
  }
  return s;
}

ModelSize write_lp(const Instance& inst, const Preprocessed& prep, Formulation f,
                   std::ostream& out) {
  const ModelSize size = model_size(inst, prep, f);
  if (size.nonzeros > kMaxExportNonzeros) {
    throw GuardExceeded(std::string(to_string(f)) + " would have " +
                        std::to_string(size.nonzeros) +
                        " nonzeros; export a smaller instance or another formulation");
  }
  const int n = inst.n_clients();
  const int m = inst.n_sites();
  LinearWriter w(out);

  out << "\\ p-median model " << to_string(f);
  if (!inst.name().empty()) out << " for " << inst.name();
  out << "\n\\ N = " << n << ", M = " << m << ", p = " << inst.p() << "\n";
  out << "Minimize\n";
  w.begin("obj");
  switch (f) {
    case Formulation::kF1:
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) w.term(inst.dist(i, j), x(i, j));
      }
      break;
    case Formulation::kF2:
    case Formulation::kF3: {
      std::int64_t base = 0;
      for (int i = 0; i < n; ++i) {
        const auto levels = prep.levels(i);
        base += levels[0];
        for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
          w.term(levels[k + 1] - levels[k], z(i, static_cast<int>(k)));
        }
      }
      w.constant(base);
      break;
    }
    case Formulation::kF4:
      for (int i = 0; i < n; ++i) w.term(1, theta(i));
      break;
  }
  w.end("");

  out << "Subject To\n";
  w.begin("card");
  for (int j = 0; j < m; ++j) w.term(1, y(j));
  w.end("= " + std::to_string(inst.p()));

  switch (f) {
    case Formulation::kF1:
      for (int i = 0; i < n; ++i) {
        w.begin("assign" + std::to_string(i + 1));
        for (int j = 0; j < m; ++j) w.term(1, x(i, j));
        w.end("= 1");
      }
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
          w.begin("link" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
          w.term(1, x(i, j));
          w.term(-1, y(j));
          w.end("<= 0");
        }
      }
      break;
    case Formulation::kF2:
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < prep.num_levels(i); ++k) {
          w.begin("cover" + std::to_string(i + 1) + "_" + std::to_string(k + 1));
          w.term(1, z(i, k));
          for (int j = 0; j < m; ++j) {
            if (prep.rank(i, j) <= k) w.term(1, y(j));
          }
          w.end(">= 1");
        }
      }
      break;
    case Formulation::kF3:
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < prep.num_levels(i); ++k) {
          w.begin("chain" + std::to_string(i + 1) + "_" + std::to_string(k + 1));
          w.term(1, z(i, k));
          if (k > 0) w.term(-1, z(i, k - 1));
          for (int j = 0; j < m; ++j) {
            if (prep.rank(i, j) == k) w.term(1, y(j));
          }
          w.end(k == 0 ? ">= 1" : ">= 0");
        }
      }
      break;
    case Formulation::kF4:
      for (int i = 0; i < n; ++i) {
        const auto levels = prep.levels(i);
        for (int k = 0; k < prep.num_levels(i); ++k) {
          w.begin("cut" + std::to_string(i + 1) + "_" + std::to_string(k + 1));
          w.term(1, theta(i));
          for (int j = 0; j < m; ++j) {
            if (prep.rank(i, j) < k) w.term(levels[k] - inst.dist(i, j), y(j));
          }
          w.end(">= " + std::to_string(levels[k]));
        }
      }
      break;
  }

  out << "Binaries\n";
  std::string line;
  for (int j = 0; j < m; ++j) {
    const std::string name = y(j);
    if (line.size() + name.size() + 1 > kWrapColumn) {
      out << line << '\n';
      line.clear();
    }
    line += " " + name;
  }
  out << line << '\n';
  out << "End\n";
  return size;
}

}  // namespace pmedian
