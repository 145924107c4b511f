#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chronoscope/domain.hpp"
#include "chronoscope/snapshot.hpp"

namespace chronoscope {

enum class LinkCounting {
  Weighted,  // sum of hyperlink counts
  Distinct,  // number of distinct linked pairs
};

struct SldCount {
  int year = 0;
  std::string sld;
  std::uint64_t node_count = 0;
  double share = 0.0;
  // False when the year has no nodes at all; share is then reported as 0.
  bool share_defined = false;
};

/// One row per registered SLD (plus "other" when present), sorted by SLD.
std::vector<SldCount> node_counts_by_sld(const YearSnapshot& snapshot, const SuffixPolicy& policy);

double within_sld_links_per_node(const YearSnapshot& snapshot, std::string_view sld,
                                 const SuffixPolicy& policy,
                                 LinkCounting counting = LinkCounting::Weighted);

struct FlowCell {
  std::string source_sld;
  std::string target_sld;
  // Absent for diagonal cells when self flows are excluded from the absolute view.
  std::optional<std::uint64_t> absolute;
  double normalized = 0.0;
  std::uint64_t target_nodes = 0;
  bool zero_target_nodes = false;
};

struct SldFlowMatrix {
  int year = 0;
  std::vector<FlowCell> cells;  // sorted by (source, target); only non-zero flows

  std::uint64_t absolute_total() const noexcept;
};

SldFlowMatrix inter_sld_flows(const YearSnapshot& snapshot, const SuffixPolicy& policy,
                              bool include_self, LinkCounting counting = LinkCounting::Weighted);

// CSV emitters backing the plot-ready outputs.
std::string sld_series_header();
std::string sld_series_rows(const std::vector<SldCount>& rows);
std::string flows_csv(const SldFlowMatrix& matrix);
std::string within_sld_header();
std::string within_sld_rows(const YearSnapshot& snapshot, const SuffixPolicy& policy,
                            LinkCounting counting);

}  // namespace chronoscope
