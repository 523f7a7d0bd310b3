#ifndef PMEDIAN_REPORT_HPP
#define PMEDIAN_REPORT_HPP

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pmedian/driver.hpp"

namespace pmedian {

// One row of a results table: name, N=M, p, OPT/BKN, LB1, UB1, T1, gap,
// iter, Ttot.
struct ReportRecord {
  std::string name;
  int n = 0;
  int m = 0;
  int p = 0;
  std::string status;          // optimal | feasible | infeasible | error
  std::optional<Distance> value;
  double lb1 = 0.0;
  Distance ub1 = 0;
  double t1 = 0.0;
  double gap = 0.0;
  long iter = 0;
  long nodes = 0;
  double total_seconds = 0.0;
  bool time_limited = false;
  std::string error;
};

ReportRecord make_record(const std::string& name, const Instance& inst,
                         const SolveResult& result);
ReportRecord make_error_record(const std::string& name, const std::string& message);

// Mean total time over the records solved to optimality, nullopt if none.
std::optional<double> average_total_time(std::span<const ReportRecord> records);

// Aligned text table; time-limited runs show "TL" in the Ttot column, and a
// final row averages Ttot over optimally solved runs.
void write_table(std::ostream& out, std::span<const ReportRecord> records);

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const ReportRecord& r);
void write_csv(std::ostream& out, std::span<const ReportRecord> records);

}  // namespace pmedian

#endif  // PMEDIAN_REPORT_HPP
