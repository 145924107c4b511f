#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chronoscope/snapshot.hpp"

namespace chronoscope {

// Index-based weighted digraph induced on a node subset of a snapshot.
// Nodes are sorted by name; arcs keep the snapshot's (source, target) order.
class WeightedDigraph {
 public:
  struct Arc {
    std::size_t node;
    double weight;
  };

  /// Induced subgraph on `nodes` (duplicates ignored). Nodes without edges
  /// are kept as isolated vertices.
  static WeightedDigraph induced(const YearSnapshot& snapshot, std::span<const std::string> nodes);
  /// Whole snapshot.
  static WeightedDigraph from_snapshot(const YearSnapshot& snapshot);

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  std::span<const Arc> out_arcs(std::size_t v) const { return out_[v]; }
  std::span<const Arc> in_arcs(std::size_t v) const { return in_[v]; }

  double out_strength(std::size_t v) const noexcept { return out_strength_[v]; }
  double in_strength(std::size_t v) const noexcept { return in_strength_[v]; }
  double total_weight() const noexcept { return total_weight_; }
  std::size_t arc_count() const noexcept { return arc_count_; }

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<Arc>> out_;
  std::vector<std::vector<Arc>> in_;
  std::vector<double> out_strength_;
  std::vector<double> in_strength_;
  double total_weight_ = 0.0;
  std::size_t arc_count_ = 0;
};

}  // namespace chronoscope
