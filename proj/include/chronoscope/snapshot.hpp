#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace chronoscope {

struct Edge {
  std::string source;
  std::string target;
  std::uint64_t weight = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

using NodePages = std::map<std::string, std::uint64_t>;

// Weighted directed graph over third-level domains for one calendar year.
// Edges are kept sorted by (source, target); construction rejects self-loops,
// zero weights and duplicate pairs. Instances are immutable.
class YearSnapshot {
 public:
  YearSnapshot() = default;
  YearSnapshot(int year, std::vector<Edge> edges, NodePages node_pages = {});

  int year() const noexcept { return year_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  const NodePages& node_pages() const noexcept { return node_pages_; }
  bool empty() const noexcept { return edges_.empty(); }

  /// Sorted union of edge endpoints and node_pages keys.
  std::vector<std::string> nodes() const;
  std::uint64_t total_weight() const noexcept;

  YearSnapshot with_node_pages(NodePages pages) const;
  /// Every weight multiplied by `factor` (> 0).
  YearSnapshot scaled(std::uint64_t factor) const;

  friend bool operator==(const YearSnapshot&, const YearSnapshot&) = default;

 private:
  int year_ = 0;
  std::vector<Edge> edges_;
  NodePages node_pages_;
};

/// Per-pair maximum of two snapshots of the same year. Associative,
/// commutative and idempotent.
YearSnapshot merge_snapshots(const YearSnapshot& a, const YearSnapshot& b);

// "#snapshot v1 year=<Y>" header followed by sorted "source\ttarget\tweight"
// lines. Node pages are not part of this format; see the node-pages file.
void write_snapshot(std::ostream& out, const YearSnapshot& snapshot);
std::string snapshot_to_string(const YearSnapshot& snapshot);
YearSnapshot read_snapshot(std::istream& in);
YearSnapshot snapshot_from_string(const std::string& text);

void write_snapshot_file(const std::filesystem::path& path, const YearSnapshot& snapshot);
YearSnapshot read_snapshot_file(const std::filesystem::path& path);

/// Write then read back through the file format.
YearSnapshot snapshot_roundtrip(const YearSnapshot& snapshot);

// "year\tthird_level_domain\tpage_count" rows.
std::map<int, NodePages> read_node_pages(std::istream& in);
std::map<int, NodePages> read_node_pages_file(const std::filesystem::path& path);
void write_node_pages(std::ostream& out, int year, const NodePages& pages);

}  // namespace chronoscope
