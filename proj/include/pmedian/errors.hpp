#ifndef PMEDIAN_ERRORS_HPP
#define PMEDIAN_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pmedian {

// Malformed input text. line() is 1-based, 0 when no line applies.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A file could not be opened or read.
class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The instance admits no feasible assignment (e.g. a disconnected graph).
class InfeasibleInstanceError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition.
class ContractViolation : public std::logic_error {
  using std::logic_error::logic_error;
};

// A size guard refused to materialize something too large.
class GuardExceeded : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fixing a variable contradicts an existing fixing; the node is infeasible.
class InfeasibleFixing : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The LP solver could not make progress.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, long iterations)
      : std::runtime_error(what + " (after " + std::to_string(iterations) +
                           " iterations)"),
        iterations_(iterations) {}

  long iterations() const { return iterations_; }

 private:
  long iterations_;
};

}  // namespace pmedian

#endif  // PMEDIAN_ERRORS_HPP
