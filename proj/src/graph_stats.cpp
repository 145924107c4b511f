#include "chronoscope/graph_stats.hpp"

#include <map>
#include <sstream>

#include "chronoscope/text.hpp"

namespace chronoscope {
namespace {

std::map<std::string, std::uint64_t> sld_node_counts(const YearSnapshot& snapshot,
                                                     const SuffixPolicy& policy) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& node : snapshot.nodes()) ++counts[std::string(sld_of_domain(node, policy))];
  return counts;
}

}  // namespace

std::vector<SldCount> node_counts_by_sld(const YearSnapshot& snapshot, const SuffixPolicy& policy) {
  auto counts = sld_node_counts(snapshot, policy);
  for (const auto& sld : policy.registered_slds()) counts.try_emplace(sld, 0);
  std::uint64_t total = 0;
  for (const auto& [sld, n] : counts) total += n;

  std::vector<SldCount> rows;
  rows.reserve(counts.size());
  for (const auto& [sld, n] : counts) {
    SldCount row{snapshot.year(), sld, n, 0.0, total > 0};
    if (total > 0) row.share = static_cast<double>(n) / static_cast<double>(total);
    rows.push_back(std::move(row));
  }
  return rows;
}

double within_sld_links_per_node(const YearSnapshot& snapshot, std::string_view sld,
                                 const SuffixPolicy& policy, LinkCounting counting) {
  if (!policy.is_registered(sld) && sld != kOtherSld) {
    throw Error(ErrorCode::UnknownSld, "SLD '" + std::string(sld) + "' is not registered");
  }
  std::uint64_t nodes = 0;
  for (const auto& node : snapshot.nodes()) {
    if (sld_of_domain(node, policy) == sld) ++nodes;
  }
  if (nodes == 0) return 0.0;
  std::uint64_t links = 0;
  for (const auto& e : snapshot.edges()) {
    if (sld_of_domain(e.source, policy) == sld && sld_of_domain(e.target, policy) == sld) {
      links += counting == LinkCounting::Weighted ? e.weight : 1;
    }
  }
  return static_cast<double>(links) / static_cast<double>(nodes);
}

std::uint64_t SldFlowMatrix::absolute_total() const noexcept {
  std::uint64_t total = 0;
  for (const auto& c : cells) total += c.absolute.value_or(0);
  return total;
}

SldFlowMatrix inter_sld_flows(const YearSnapshot& snapshot, const SuffixPolicy& policy,
                              bool include_self, LinkCounting counting) {
  const auto nodes = sld_node_counts(snapshot, policy);
  std::map<std::pair<std::string, std::string>, std::uint64_t> sums;
  for (const auto& e : snapshot.edges()) {
    sums[{std::string(sld_of_domain(e.source, policy)), std::string(sld_of_domain(e.target, policy))}] +=
        counting == LinkCounting::Weighted ? e.weight : 1;
  }
  SldFlowMatrix matrix;
  matrix.year = snapshot.year();
  for (const auto& [key, total] : sums) {
    FlowCell cell;
    cell.source_sld = key.first;
    cell.target_sld = key.second;
    if (include_self || key.first != key.second) cell.absolute = total;
    auto it = nodes.find(key.second);
    cell.target_nodes = it == nodes.end() ? 0 : it->second;
    cell.zero_target_nodes = cell.target_nodes == 0;
    if (!cell.zero_target_nodes) {
      cell.normalized = static_cast<double>(total) / static_cast<double>(cell.target_nodes);
    }
    matrix.cells.push_back(std::move(cell));
  }
  return matrix;
}

std::string sld_series_header() { return "year,sld,node_count,share\n"; }

std::string sld_series_rows(const std::vector<SldCount>& rows) {
  std::ostringstream out;
  for (const auto& r : rows) {
    if (!r.share_defined) continue;
    out << r.year << ',' << r.sld << ',' << r.node_count << ',' << text::format_double(r.share) << '\n';
  }
  return out.str();
}

std::string flows_csv(const SldFlowMatrix& matrix) {
  std::ostringstream out;
  out << "source_sld,target_sld,absolute,normalized\n";
  for (const auto& c : matrix.cells) {
    out << c.source_sld << ',' << c.target_sld << ',';
    if (c.absolute) out << *c.absolute;
    out << ',' << text::format_double(c.normalized) << '\n';
  }
  return out.str();
}

std::string within_sld_header() { return "year,sld,node_count,links_per_node\n"; }

std::string within_sld_rows(const YearSnapshot& snapshot, const SuffixPolicy& policy,
                            LinkCounting counting) {
  std::ostringstream out;
  for (const auto& row : node_counts_by_sld(snapshot, policy)) {
    if (row.node_count == 0) continue;
    out << row.year << ',' << row.sld << ',' << row.node_count << ','
        << text::format_double(within_sld_links_per_node(snapshot, row.sld, policy, counting)) << '\n';
  }
  return out.str();
}

}  // namespace chronoscope
