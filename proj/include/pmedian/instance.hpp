#ifndef PMEDIAN_INSTANCE_HPP
#define PMEDIAN_INSTANCE_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pmedian {

using Distance = std::int64_t;

// Dense matrices are refused beyond this many entries (N * M). The sorted-site
// matrix alone costs 4 bytes per entry, the rank matrix another 4.
inline constexpr std::int64_t kMaxMatrixEntries = 150'000'000;

// N clients, M candidate sites, p medians and an N x M matrix of
// non-negative integer distances (row-major, client-major). Rows need not be
// symmetric with columns.
class Instance {
 public:
  Instance() = default;
  Instance(int n_clients, int n_sites, int p, std::vector<Distance> dist,
           std::string name = {});

  int n_clients() const { return n_clients_; }
  int n_sites() const { return n_sites_; }
  int p() const { return p_; }
  const std::string& name() const { return name_; }

  Distance dist(int client, int site) const {
    return dist_[static_cast<std::size_t>(client) * n_sites_ + site];
  }
  std::span<const Distance> row(int client) const {
    return {dist_.data() + static_cast<std::size_t>(client) * n_sites_,
            static_cast<std::size_t>(n_sites_)};
  }
  const std::vector<Distance>& matrix() const { return dist_; }

  // Same distances, different number of medians.
  Instance with_p(int p) const;

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  int n_clients_ = 0;
  int n_sites_ = 0;
  int p_ = 0;
  std::vector<Distance> dist_;
  std::string name_;
};

// Per-client sorted distance structures shared by every solver component.
//
// For client i: levels(i) holds the K_i distinct distances D_i^1 < ... <
// D_i^{K_i} (0-based here: levels(i)[k] is D_i^{k+1}); order(i) lists all sites
// by non-decreasing distance, ties by ascending site index; rank(i, j) is the
// level index k with d_ij == levels(i)[k].
class Preprocessed {
 public:
  explicit Preprocessed(const Instance& inst);

  int n_clients() const { return n_clients_; }
  int n_sites() const { return n_sites_; }

  int num_levels(int client) const {
    return static_cast<int>(level_start_[client + 1] - level_start_[client]);
  }
  std::span<const Distance> levels(int client) const {
    return {levels_.data() + level_start_[client],
            static_cast<std::size_t>(num_levels(client))};
  }
  std::span<const std::int32_t> order(int client) const {
    return {order_.data() + static_cast<std::size_t>(client) * n_sites_,
            static_cast<std::size_t>(n_sites_)};
  }
  std::int32_t rank(int client, int site) const {
    return rank_[static_cast<std::size_t>(client) * n_sites_ + site];
  }
  Distance dist(int client, int site) const {
    return levels_[level_start_[client] + rank(client, site)];
  }
  // K = sum_i K_i.
  std::int64_t total_levels() const {
    return static_cast<std::int64_t>(levels_.size());
  }

  friend bool operator==(const Preprocessed&, const Preprocessed&) = default;

 private:
  int n_clients_ = 0;
  int n_sites_ = 0;
  std::vector<Distance> levels_;
  std::vector<std::int64_t> level_start_;
  std::vector<std::int32_t> order_;
  std::vector<std::int32_t> rank_;
};

Preprocessed preprocess(const Instance& inst);

// OR-Library pmed text: "N E p" then E lines "u v cost" (1-based vertices),
// turned into all-pairs shortest path distances. A repeated edge keeps the
// cost of its last occurrence. p_override replaces the header's p.
Instance parse_orlib(std::string_view text,
                     std::optional<int> p_override = std::nullopt,
                     std::string name = {});

// TSPLIB NODE_COORD_SECTION with EDGE_WEIGHT_TYPE EUC_2D. Distances are the
// Euclidean distance rounded down, not the TSPLIB nearest-integer rule.
Instance parse_tsplib(std::string_view text, int p);

// Dense matrix text: n, then n rows of n integers.
Instance parse_rw_matrix(std::string_view text, int p, std::string name = {});
std::string format_rw_matrix(const Instance& inst);

// JSON dump: {"name", "n_clients", "n_sites", "p", "dist": [[...], ...]}.
Instance parse_native(std::string_view text);
std::string format_native(const Instance& inst);

// n x n matrix, every entry (diagonal included) uniform in [1, n], drawn
// row-major from mt19937_64 with unbiased rejection sampling.
Instance generate_rw(int n, std::uint64_t seed, int p = 1);

enum class InstanceFormat { kOrlib, kTsplib, kRw, kNative };

std::optional<InstanceFormat> format_from_string(std::string_view s);

// Reads and parses a file. p is required for formats that do not embed it.
// For OR-Library files a given p must equal the header's unless override_p.
Instance load_instance(const std::string& path, InstanceFormat format,
                       std::optional<int> p, bool override_p = false);

}  // namespace pmedian

#endif  // PMEDIAN_INSTANCE_HPP
