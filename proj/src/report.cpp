#include "pmedian/report.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace pmedian {
namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> cells(const ReportRecord& r) {
  const bool ok = r.error.empty();
  return {
      r.name,
      ok ? std::to_string(r.n) : "",
      ok ? std::to_string(r.p) : "",
      r.value ? std::to_string(*r.value) : "-",
      ok ? fixed(r.lb1, 2) : "-",
      ok ? std::to_string(r.ub1) : "-",
      ok ? fixed(r.t1, 2) : "-",
      ok ? fixed(100.0 * r.gap, 2) : "-",
      ok ? std::to_string(r.iter) : "-",
      ok ? (r.time_limited ? std::string("TL") : fixed(r.total_seconds, 2)) : "-",
      ok ? r.status : "error: " + r.error,
  };
}

}  // namespace

ReportRecord make_record(const std::string& name, const Instance& inst,
                         const SolveResult& result) {
  ReportRecord r;
  r.name = name;
  r.n = inst.n_clients();
  r.m = inst.n_sites();
  r.p = inst.p();
  r.status = to_string(result.status);
  if (result.status != SolveStatus::kInfeasible) r.value = result.value;
  r.lb1 = result.lb1;
  r.ub1 = result.ub1;
  r.t1 = result.t1;
  r.gap = result.gap;
  r.iter = result.iterations;
  r.nodes = result.nodes;
  r.total_seconds = result.total_seconds;
  r.time_limited = result.status == SolveStatus::kFeasible;
  return r;
}

ReportRecord make_error_record(const std::string& name, const std::string& message) {
  ReportRecord r;
  r.name = name;
  r.status = "error";
  r.error = message;
  return r;
}

std::optional<double> average_total_time(std::span<const ReportRecord> records) {
  double sum = 0.0;
  int count = 0;
  for (const auto& r : records) {
    if (r.error.empty() && r.status == "optimal") {
      sum += r.total_seconds;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

void write_table(std::ostream& out, std::span<const ReportRecord> records) {
  const std::vector<std::string> header = {"name", "N=M", "p",   "OPT/BKN", "LB1", "UB1",
                                           "T1",   "gap%", "iter", "Ttot",    "status"};
  std::vector<std::vector<std::string>> rows;
  rows.push_back(header);
  for (const auto& r : records) rows.push_back(cells(r));
  if (const auto avg = average_total_time(records)) {
    std::vector<std::string> last(header.size());
    last[0] = "average";
    last[9] = fixed(*avg, 2);
    rows.push_back(std::move(last));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::string& cell = row[c];
      if (c == 0 || c + 1 == row.size()) {
        line += cell + std::string(width[c] - cell.size(), ' ');
      } else {
        line += std::string(width[c] - cell.size(), ' ') + cell;
      }
      if (c + 1 < row.size()) line += "  ";
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  }
}

void write_csv_header(std::ostream& out) {
  out << "name,n,m,p,status,value,lb1,ub1,t1,gap,iter,nodes,ttot,time_limited,error\n";
}

void write_csv_row(std::ostream& out, const ReportRecord& r) {
  out << csv_escape(r.name) << ',' << r.n << ',' << r.m << ',' << r.p << ',' << r.status
      << ',' << (r.value ? std::to_string(*r.value) : "") << ',' << fixed(r.lb1, 6) << ','
      << r.ub1 << ',' << fixed(r.t1, 3) << ',' << fixed(r.gap, 8) << ',' << r.iter << ','
      << r.nodes << ',' << fixed(r.total_seconds, 3) << ',' << (r.time_limited ? 1 : 0)
      << ',' << csv_escape(r.error) << '\n';
}

void write_csv(std::ostream& out, std::span<const ReportRecord> records) {
  write_csv_header(out);
  for (const auto& r : records) write_csv_row(out, r);
}

}  // namespace pmedian
