#include "pmedian/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"

#include "pmedian/errors.hpp"

namespace pmedian {
namespace {

constexpr Distance kUnreachable = std::numeric_limits<Distance>::max() / 4;

void check_matrix_size(std::int64_t n_clients, std::int64_t n_sites) {
  if (n_clients * n_sites > kMaxMatrixEntries) {
    throw GuardExceeded("instance of " + std::to_string(n_clients) + " x " +
                        std::to_string(n_sites) +
                        " exceeds the dense matrix guard of " +
                        std::to_string(kMaxMatrixEntries) + " entries");
  }
}

// Splits text into lines, tracking 1-based line numbers.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    while (pos_ <= text_.size()) {
      if (pos_ == text_.size()) {
        pos_ = text_.size() + 1;
        return false;
      }
      std::size_t end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      line = text_.substr(pos_, end - pos_);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      pos_ = end + 1;
      ++line_no_;
      return true;
    }
    return false;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool to_number(std::string_view tok, T& out) {
  const char* begin = tok.data();
  const char* end = tok.data() + tok.size();
  if constexpr (std::is_integral_v<T>) {
    if (begin != end && *begin == '+') ++begin;
  }
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

template <typename T>
T number_or_throw(std::string_view tok, std::size_t line, const char* what) {
  T value{};
  if (!to_number(tok, value)) {
    throw ParseError(std::string("expected ") + what + ", got '" +
                         std::string(tok) + "'",
                     line);
  }
  return value;
}

void check_p(int p, int n_sites) {
  if (p < 1 || p > n_sites) {
    throw ContractViolation("p = " + std::to_string(p) +
                            " outside [1, " + std::to_string(n_sites) + "]");
  }
}

}  // namespace

Instance::Instance(int n_clients, int n_sites, int p, std::vector<Distance> dist,
                   std::string name)
    : n_clients_(n_clients),
      n_sites_(n_sites),
      p_(p),
      dist_(std::move(dist)),
      name_(std::move(name)) {
  if (n_clients < 1 || n_sites < 1) {
    throw ContractViolation("instance needs at least one client and one site");
  }
  check_matrix_size(n_clients, n_sites);
  if (dist_.size() != static_cast<std::size_t>(n_clients) * n_sites) {
    throw ContractViolation("distance matrix has " +
                            std::to_string(dist_.size()) + " entries, expected " +
                            std::to_string(static_cast<std::int64_t>(n_clients) *
                                           n_sites));
  }
  check_p(p, n_sites);
  for (Distance d : dist_) {
    if (d < 0) throw ContractViolation("negative distance in matrix");
  }
}

Instance Instance::with_p(int p) const {
  check_p(p, n_sites_);
  Instance copy = *this;
  copy.p_ = p;
  return copy;
}

Preprocessed::Preprocessed(const Instance& inst)
    : n_clients_(inst.n_clients()), n_sites_(inst.n_sites()) {
  const std::size_t n = n_clients_;
  const std::size_t m = n_sites_;
  order_.resize(n * m);
  rank_.resize(n * m);
  level_start_.assign(n + 1, 0);
  levels_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = inst.row(static_cast<int>(i));
    auto order = std::span(order_).subspan(i * m, m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::int32_t a, std::int32_t b) { return row[a] < row[b]; });
    level_start_[i] = static_cast<std::int64_t>(levels_.size());
    std::int32_t level = -1;
    for (std::size_t r = 0; r < m; ++r) {
      const Distance d = row[order[r]];
      if (r == 0 || d != levels_.back()) {
        levels_.push_back(d);
        ++level;
      }
      rank_[i * m + order[r]] = level;
    }
  }
  level_start_[n] = static_cast<std::int64_t>(levels_.size());
}

Preprocessed preprocess(const Instance& inst) { return Preprocessed(inst); }

Instance parse_orlib(std::string_view text, std::optional<int> p_override,
                     std::string name) {
  LineReader reader(text);
  std::string_view line;
  std::vector<std::string_view> toks;
  while (reader.next(line)) {
    toks = tokens(line);
    if (!toks.empty()) break;
  }
  if (toks.empty()) throw ParseError("empty OR-Library file", 0);
  if (toks.size() != 3) {
    throw ParseError("header must be 'N E p'", reader.line_no());
  }
  const std::size_t header_line = reader.line_no();
  const auto n = number_or_throw<std::int64_t>(toks[0], header_line, "vertex count");
  const auto e = number_or_throw<std::int64_t>(toks[1], header_line, "edge count");
  const auto p = number_or_throw<std::int64_t>(toks[2], header_line, "p");
  if (n < 1 || e < 0) throw ParseError("invalid header counts", header_line);
  check_matrix_size(n, n);

  const std::size_t nn = static_cast<std::size_t>(n);
  std::vector<Distance> dist(nn * nn, kUnreachable);
  // Last occurrence wins for repeated edges, so collect them first.
  std::vector<Distance> edge(nn * nn, -1);
  std::int64_t seen = 0;
  while (seen < e && reader.next(line)) {
    toks = tokens(line);
    if (toks.empty()) continue;
    const std::size_t ln = reader.line_no();
    if (toks.size() != 3) throw ParseError("edge line must be 'u v cost'", ln);
    const auto u = number_or_throw<std::int64_t>(toks[0], ln, "vertex");
    const auto v = number_or_throw<std::int64_t>(toks[1], ln, "vertex");
    const auto c = number_or_throw<std::int64_t>(toks[2], ln, "edge cost");
    if (u < 1 || u > n || v < 1 || v > n) {
      throw ParseError("vertex out of range [1, " + std::to_string(n) + "]", ln);
    }
    if (c < 0) throw ParseError("negative edge cost", ln);
    edge[(u - 1) * nn + (v - 1)] = c;
    edge[(v - 1) * nn + (u - 1)] = c;
    ++seen;
  }
  if (seen < e) {
    throw ParseError("expected " + std::to_string(e) + " edges, found " +
                         std::to_string(seen),
                     reader.line_no());
  }
  for (std::size_t i = 0; i < nn * nn; ++i) {
    if (edge[i] >= 0) dist[i] = edge[i];
  }
  for (std::size_t i = 0; i < nn; ++i) dist[i * nn + i] = 0;

  // Floyd-Warshall.
  for (std::size_t k = 0; k < nn; ++k) {
    const Distance* row_k = dist.data() + k * nn;
    for (std::size_t i = 0; i < nn; ++i) {
      Distance* row_i = dist.data() + i * nn;
      const Distance dik = row_i[k];
      if (dik >= kUnreachable) continue;
      for (std::size_t j = 0; j < nn; ++j) {
        const Distance via = dik + row_k[j];
        if (via < row_i[j]) row_i[j] = via;
      }
    }
  }
  for (std::size_t i = 0; i < nn; ++i) {
    for (std::size_t j = 0; j < nn; ++j) {
      if (dist[i * nn + j] >= kUnreachable) {
        throw InfeasibleInstanceError("graph is disconnected: vertex " +
                                      std::to_string(j + 1) +
                                      " unreachable from vertex " +
                                      std::to_string(i + 1));
      }
    }
  }
  const int final_p = p_override ? *p_override : static_cast<int>(p);
  if (final_p < 1 || final_p > n) {
    throw ParseError("p = " + std::to_string(final_p) + " outside [1, N]",
                     p_override ? 0 : header_line);
  }
  return Instance(static_cast<int>(n), static_cast<int>(n), final_p,
                  std::move(dist), std::move(name));
}

Instance parse_tsplib(std::string_view text, int p) {
  LineReader reader(text);
  std::string_view line;
  std::string name;
  std::int64_t dimension = -1;
  std::string weight_type;
  bool in_coords = false;
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<char> have;
  while (reader.next(line)) {
    const std::size_t ln = reader.line_no();
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t == "EOF") break;
    if (in_coords) {
      const auto toks = tokens(t);
      std::int64_t first_id = 0;
      if (!to_number(toks[0], first_id)) {
        in_coords = false;  // next section keyword
      } else {
        if (toks.size() != 3) throw ParseError("coordinate line must be 'id x y'", ln);
        const auto id = number_or_throw<std::int64_t>(toks[0], ln, "node id");
        if (id < 1 || id > dimension) throw ParseError("node id out of range", ln);
        xs[id - 1] = number_or_throw<double>(toks[1], ln, "x coordinate");
        ys[id - 1] = number_or_throw<double>(toks[2], ln, "y coordinate");
        have[id - 1] = 1;
        continue;
      }
    }
    if (t == "NODE_COORD_SECTION") {
      if (dimension < 1) throw ParseError("NODE_COORD_SECTION before DIMENSION", ln);
      if (weight_type != "EUC_2D") {
        throw ParseError("unsupported EDGE_WEIGHT_TYPE '" + weight_type +
                             "' (only EUC_2D)",
                         ln);
      }
      xs.assign(dimension, 0.0);
      ys.assign(dimension, 0.0);
      have.assign(dimension, 0);
      in_coords = true;
      continue;
    }
    const auto colon = t.find(':');
    std::string key(trim(colon == std::string_view::npos ? t : t.substr(0, colon)));
    std::string value(colon == std::string_view::npos ? std::string_view{}
                                                     : trim(t.substr(colon + 1)));
    if (key == "NAME") {
      name = value;
    } else if (key == "DIMENSION") {
      dimension = number_or_throw<std::int64_t>(value, ln, "dimension");
      if (dimension < 1) throw ParseError("DIMENSION must be positive", ln);
      check_matrix_size(dimension, dimension);
    } else if (key == "EDGE_WEIGHT_TYPE") {
      weight_type = value;
      if (weight_type != "EUC_2D") {
        throw ParseError("unsupported EDGE_WEIGHT_TYPE '" + weight_type +
                             "' (only EUC_2D)",
                         ln);
      }
    } else if (key.ends_with("_SECTION")) {
      throw ParseError("unsupported section " + key, ln);
    }
  }
  if (dimension < 1) throw ParseError("missing DIMENSION", 0);
  if (have.empty()) throw ParseError("missing NODE_COORD_SECTION", 0);
  for (std::int64_t i = 0; i < dimension; ++i) {
    if (!have[i]) {
      throw ParseError("missing coordinates for node " + std::to_string(i + 1), 0);
    }
  }
  const std::size_t n = static_cast<std::size_t>(dimension);
  std::vector<Distance> dist(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double dx = xs[i] - xs[j];
      const double dy = ys[i] - ys[j];
      dist[i * n + j] = static_cast<Distance>(std::floor(std::sqrt(dx * dx + dy * dy)));
    }
  }
  if (p < 1 || p > dimension) {
    throw ParseError("p = " + std::to_string(p) + " outside [1, N]", 0);
  }
  return Instance(static_cast<int>(n), static_cast<int>(n), p, std::move(dist),
                  std::move(name));
}

Instance parse_rw_matrix(std::string_view text, int p, std::string name) {
  LineReader reader(text);
  std::string_view line;
  std::int64_t n = -1;
  std::vector<Distance> dist;
  std::size_t filled = 0;
  while (reader.next(line)) {
    const std::size_t ln = reader.line_no();
    for (auto tok : tokens(line)) {
      if (n < 0) {
        n = number_or_throw<std::int64_t>(tok, ln, "matrix size");
        if (n < 1) throw ParseError("matrix size must be positive", ln);
        check_matrix_size(n, n);
        dist.resize(static_cast<std::size_t>(n * n));
        continue;
      }
      if (filled == dist.size()) throw ParseError("trailing data after matrix", ln);
      const auto d = number_or_throw<Distance>(tok, ln, "distance");
      if (d < 0) throw ParseError("negative distance", ln);
      dist[filled++] = d;
    }
  }
  if (n < 0) throw ParseError("empty matrix file", 0);
  if (filled != dist.size()) {
    throw ParseError("expected " + std::to_string(dist.size()) +
                         " distances, found " + std::to_string(filled),
                     reader.line_no());
  }
  if (p < 1 || p > n) throw ParseError("p outside [1, n]", 0);
  return Instance(static_cast<int>(n), static_cast<int>(n), p, std::move(dist),
                  std::move(name));
}

std::string format_rw_matrix(const Instance& inst) {
  if (inst.n_clients() != inst.n_sites()) {
    throw ContractViolation("matrix format needs N == M");
  }
  std::ostringstream out;
  out << inst.n_clients() << '\n';
  for (int i = 0; i < inst.n_clients(); ++i) {
    for (int j = 0; j < inst.n_sites(); ++j) {
      if (j) out << ' ';
      out << inst.dist(i, j);
    }
    out << '\n';
  }
  return out.str();
}

Instance parse_native(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
    const int n = doc.at("n_clients").get<int>();
    const int m = doc.at("n_sites").get<int>();
    const int p = doc.at("p").get<int>();
    const auto& rows = doc.at("dist");
    if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
      throw ParseError("'dist' must hold n_clients rows", 0);
    }
    check_matrix_size(n, m);
    std::vector<Distance> dist;
    dist.reserve(static_cast<std::size_t>(n) * m);
    for (const auto& row : rows) {
      if (!row.is_array() || static_cast<int>(row.size()) != m) {
        throw ParseError("every 'dist' row must hold n_sites entries", 0);
      }
      for (const auto& d : row) dist.push_back(d.get<Distance>());
    }
    return Instance(n, m, p, std::move(dist), doc.value("name", std::string{}));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid instance JSON: ") + e.what(), 0);
  }
}

std::string format_native(const Instance& inst) {
  nlohmann::json doc;
  doc["name"] = inst.name();
  doc["n_clients"] = inst.n_clients();
  doc["n_sites"] = inst.n_sites();
  doc["p"] = inst.p();
  auto rows = nlohmann::json::array();
  for (int i = 0; i < inst.n_clients(); ++i) {
    auto r = inst.row(i);
    rows.push_back(std::vector<Distance>(r.begin(), r.end()));
  }
  doc["dist"] = std::move(rows);
  return doc.dump() + "\n";
}

Instance generate_rw(int n, std::uint64_t seed, int p) {
  if (n < 2) throw std::invalid_argument("RW instances need n >= 2");
  std::mt19937_64 engine(seed);
  const std::uint64_t range = static_cast<std::uint64_t>(n);
  // Largest multiple of range representable; draws above it are rejected.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % range;
  std::vector<Distance> dist(static_cast<std::size_t>(n) * n);
  for (auto& d : dist) {
    std::uint64_t x;
    do {
      x = engine();
    } while (x >= limit);
    d = static_cast<Distance>(x % range) + 1;
  }
  return Instance(n, n, p, std::move(dist),
                  "rw" + std::to_string(n) + "_s" + std::to_string(seed));
}

std::optional<InstanceFormat> format_from_string(std::string_view s) {
  if (s == "orlib") return InstanceFormat::kOrlib;
  if (s == "tsplib") return InstanceFormat::kTsplib;
  if (s == "rw") return InstanceFormat::kRw;
  if (s == "native") return InstanceFormat::kNative;
  return std::nullopt;
}

Instance load_instance(const std::string& path, InstanceFormat format,
                       std::optional<int> p, bool override_p) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path + "'");
  const std::string text = buf.str();
  std::string stem = path.substr(path.find_last_of('/') + 1);
  stem = stem.substr(0, stem.find('.'));
  auto checked_p = [&](const Instance& inst) {
    if (*p < 1 || *p > inst.n_sites()) {
      throw ParseError("p = " + std::to_string(*p) + " outside [1, " +
                           std::to_string(inst.n_sites()) + "]",
                       0);
    }
    return inst.with_p(*p);
  };

  switch (format) {
    case InstanceFormat::kOrlib: {
      Instance inst = parse_orlib(text, std::nullopt, stem);
      if (p && *p != inst.p()) {
        if (!override_p) {
          throw ParseError("--p " + std::to_string(*p) +
                               " disagrees with the file header p = " +
                               std::to_string(inst.p()),
                           0);
        }
        inst = checked_p(inst);
      }
      return inst;
    }
    case InstanceFormat::kTsplib: {
      if (!p) throw ParseError("TSPLIB instances need p", 0);
      Instance inst = parse_tsplib(text, *p);
      if (inst.name().empty()) {
        return Instance(inst.n_clients(), inst.n_sites(), inst.p(), inst.matrix(), stem);
      }
      return inst;
    }
    case InstanceFormat::kRw:
      if (!p) throw ParseError("matrix instances need p", 0);
      return parse_rw_matrix(text, *p, stem);
    case InstanceFormat::kNative: {
      Instance inst = parse_native(text);
      if (p && *p != inst.p()) inst = checked_p(inst);
      return inst;
    }
  }
  throw ContractViolation("unknown instance format");
}

}  // namespace pmedian
