// Command-line front end: solve, export, bench, generate-rw.
//
// Exit codes: 0 optimal (or success), 2 feasible but not proven optimal,
// 3 infeasible, 4 input error, 5 internal error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pmedian/driver.hpp"
#include "pmedian/errors.hpp"
#include "pmedian/instance.hpp"
#include "pmedian/lp_export.hpp"
#include "pmedian/report.hpp"

namespace {

using namespace pmedian;

constexpr int kExitOptimal = 0;
constexpr int kExitFeasible = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitInput = 4;
constexpr int kExitInternal = 5;

// PMEDIAN_LOG: 0 silent (default), 1 progress lines on stderr.
int log_level() {
  const char* v = std::getenv("PMEDIAN_LOG");
  if (v == nullptr) return 0;
  return std::atoi(v);
}

struct InstanceArgs {
  std::string path;
  std::string format = "orlib";
  std::optional<int> p;
  bool override_p = false;
};

struct SolveArgs {
  double time_limit = 36000.0;
  std::uint64_t seed = 0;
  std::string initial = "heuristic";
  bool no_rounding = false;
  bool no_reduction = false;
  bool no_rcfix = false;
  bool frac_sep = false;
};

void add_instance_options(CLI::App* cmd, InstanceArgs& a) {
  cmd->add_option("instance", a.path, "Instance file")->required();
  cmd->add_option("--format", a.format, "Instance format")
      ->check(CLI::IsMember({"orlib", "tsplib", "rw", "native"}));
  cmd->add_option("--p", a.p, "Number of medians")->check(CLI::PositiveNumber);
  cmd->add_flag("--override-p", a.override_p,
                "With --format orlib, replace the header's p instead of checking it");
}

void add_solve_options(CLI::App* cmd, SolveArgs& a) {
  cmd->add_option("--time-limit", a.time_limit, "Seconds")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", a.seed, "Heuristic seed");
  cmd->add_option("--initial", a.initial, "Initial solution")
      ->check(CLI::IsMember({"heuristic", "random"}));
  cmd->add_flag("--no-rounding", a.no_rounding, "Disable the phase-1 rounding heuristic");
  cmd->add_flag("--no-reduction", a.no_reduction, "Keep every cut after phase 1");
  cmd->add_flag("--no-rcfix", a.no_rcfix, "Disable reduced-cost fixing");
  cmd->add_flag("--phase2-frac-sep", a.frac_sep, "Separate fractional points in phase 2");
}

Instance load(const InstanceArgs& a) {
  const auto format = format_from_string(a.format);
  if (!format) throw std::invalid_argument("unknown format " + a.format);
  Instance inst = load_instance(a.path, *format, a.p, a.override_p);
  if (inst.name().empty()) {
    inst = Instance(inst.n_clients(), inst.n_sites(), inst.p(),
                    std::vector<Distance>(inst.matrix().begin(), inst.matrix().end()),
                    std::filesystem::path(a.path).stem().string());
  }
  return inst;
}

SolveParams make_params(const SolveArgs& a) {
  SolveParams params;
  params.time_limit = a.time_limit;
  params.seed = a.seed;
  params.initial = a.initial == "random" ? InitialMode::kRandom : InitialMode::kHeuristic;
  params.rounding = !a.no_rounding;
  params.reduction = !a.no_reduction;
  params.rc_fixing = !a.no_rcfix;
  params.phase2_fractional_separation = a.frac_sep;
  if (log_level() >= 1) {
    params.on_progress = [](const Progress& p) { std::cerr << format_progress(p) << '\n'; };
  }
  return params;
}

int exit_code(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return kExitOptimal;
    case SolveStatus::kFeasible:
      return kExitFeasible;
    case SolveStatus::kInfeasible:
      return kExitInfeasible;
  }
  return kExitInternal;
}

// Runs f, mapping exceptions to exit codes with a message on stderr.
template <typename F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitInput;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitInput;
  } catch (const InfeasibleInstanceError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const GuardExceeded& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

void append_csv(const std::string& path, const std::vector<ReportRecord>& records) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot write " + path);
  if (fresh) write_csv_header(out);
  for (const auto& r : records) write_csv_row(out, r);
}

int cmd_solve(const InstanceArgs& ia, const SolveArgs& sa, const std::string& csv,
              const std::string& out_path) {
  const Instance inst = load(ia);
  const SolveResult result = solve(inst, make_params(sa));
  const ReportRecord record = make_record(inst.name(), inst, result);
  write_table(std::cout, std::span(&record, 1));
  std::cout << "open:";
  for (int j : result.open) std::cout << ' ' << j + 1;
  std::cout << '\n';
  if (!csv.empty()) append_csv(csv, {record});
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write " + out_path);
    out << "status " << to_string(result.status) << "\nvalue " << result.value
        << "\nlower_bound " << result.lower_bound << "\nopen";
    for (int j : result.open) out << ' ' << j + 1;
    out << '\n';
  }
  return exit_code(result.status);
}

int cmd_export(const InstanceArgs& ia, const std::string& which, const std::string& out_path) {
  const Instance inst = load(ia);
  const auto f = formulation_from_string(which);
  if (!f) throw std::invalid_argument("unknown formulation " + which);
  const Preprocessed prep(inst);
  if (out_path.empty() || out_path == "-") {
    write_lp(inst, prep, *f, std::cout);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + out_path);
    write_lp(inst, prep, *f, out);
  }
  return kExitOptimal;
}

struct BenchRun {
  std::string path;
  std::string format;
  std::optional<int> p;
};

// One run per line: "path format [p]". '#' starts a comment; relative paths
// are taken from the manifest's directory.
std::vector<BenchRun> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  const auto base = std::filesystem::path(path).parent_path();
  std::vector<BenchRun> runs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream tokens(line);
    BenchRun run;
    if (!(tokens >> run.path)) continue;
    if (!(tokens >> run.format)) throw ParseError("manifest run needs a format", line_no);
    std::string p;
    if (tokens >> p) {
      try {
        run.p = std::stoi(p);
      } catch (const std::exception&) {
        throw ParseError("bad p '" + p + "'", line_no);
      }
    }
    if (std::filesystem::path(run.path).is_relative()) run.path = (base / run.path).string();
    runs.push_back(std::move(run));
  }
  return runs;
}

int cmd_bench(const std::string& manifest, const SolveArgs& sa, const std::string& csv) {
  const std::vector<BenchRun> runs = read_manifest(manifest);
  std::vector<ReportRecord> records;
  for (const auto& run : runs) {
    std::string name = std::filesystem::path(run.path).stem().string();
    if (run.p) name += "_p" + std::to_string(*run.p);
    try {
      InstanceArgs ia;
      ia.path = run.path;
      ia.format = run.format;
      ia.p = run.p;
      ia.override_p = run.format == "orlib";
      const Instance inst = load(ia);
      const SolveResult result = solve(inst, make_params(sa));
      records.push_back(make_record(name, inst, result));
    } catch (const std::exception& e) {
      records.push_back(make_error_record(name, e.what()));
    }
    if (log_level() >= 1) std::cerr << "done " << name << '\n';
  }
  write_table(std::cout, records);
  if (!csv.empty()) {
    std::ofstream out(csv);
    if (!out) throw IoError("cannot write " + csv);
    write_csv(out, records);
  }
  return kExitOptimal;
}

int cmd_generate_rw(int n, std::uint64_t seed, int p, const std::string& out_path) {
  const Instance inst = generate_rw(n, seed, p);
  const std::string text = format_rw_matrix(inst);
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write " + out_path);
    out << text;
  }
  return kExitOptimal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact p-median solver by Benders decomposition"};
  app.require_subcommand(1);

  InstanceArgs solve_ia;
  SolveArgs solve_sa;
  std::string solve_csv;
  std::string solve_out;
  auto* solve_cmd = app.add_subcommand("solve", "Solve an instance to optimality");
  add_instance_options(solve_cmd, solve_ia);
  add_solve_options(solve_cmd, solve_sa);
  solve_cmd->add_option("--csv", solve_csv, "Append the result record to this CSV file");
  solve_cmd->add_option("--out", solve_out, "Write the solution to this file");

  InstanceArgs export_ia;
  std::string export_which;
  std::string export_out;
  auto* export_cmd = app.add_subcommand("export", "Write a formulation in LP format");
  add_instance_options(export_cmd, export_ia);
  export_cmd->add_option("--export", export_which, "Formulation")
      ->required()
      ->check(CLI::IsMember({"f1", "f2", "f3", "f4"}));
  export_cmd->add_option("--out", export_out, "Output file (default stdout)");

  std::string manifest;
  SolveArgs bench_sa;
  std::string bench_csv;
  auto* bench_cmd = app.add_subcommand("bench", "Solve every run of a manifest");
  bench_cmd->add_option("manifest", manifest, "Lines of: path format [p]")->required();
  add_solve_options(bench_cmd, bench_sa);
  bench_cmd->add_option("--csv", bench_csv, "Write the records to this CSV file");

  int rw_n = 0;
  std::uint64_t rw_seed = 0;
  int rw_p = 1;
  std::string rw_out;
  auto* rw_cmd = app.add_subcommand("generate-rw", "Write a random asymmetric matrix");
  rw_cmd->add_option("--n", rw_n, "Size")->required();
  rw_cmd->add_option("--seed", rw_seed, "Seed");
  rw_cmd->add_option("--p", rw_p, "p stored with the instance");
  rw_cmd->add_option("--out", rw_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  return guarded([&] {
    if (*solve_cmd) return cmd_solve(solve_ia, solve_sa, solve_csv, solve_out);
    if (*export_cmd) return cmd_export(export_ia, export_which, export_out);
    if (*bench_cmd) return cmd_bench(manifest, bench_sa, bench_csv);
    return cmd_generate_rw(rw_n, rw_seed, rw_p, rw_out);
  });
}
