#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chronoscope/digraph.hpp"
#include "chronoscope/snapshot.hpp"

namespace chronoscope {

// ---------------------------------------------------------------------------
// Centrality

enum class Measure : std::size_t {
  InDegree,
  OutDegree,
  InStrength,
  OutStrength,
  PageRank,
  Betweenness,
  Closeness,
  Harmonic,
  Hub,
  Authority,
};

inline constexpr std::size_t kMeasureCount = 10;

inline constexpr std::array<Measure, kMeasureCount> kAllMeasures = {
    Measure::InDegree,    Measure::OutDegree, Measure::InStrength, Measure::OutStrength,
    Measure::PageRank,    Measure::Betweenness, Measure::Closeness, Measure::Harmonic,
    Measure::Hub,         Measure::Authority};

std::string_view to_string(Measure m) noexcept;

enum class PathLength {
  InverseWeight,  // a link of weight w has length 1/w
  Unit,
};

struct CentralityOptions {
  PathLength path_length = PathLength::InverseWeight;
  double damping = 0.85;
  double pagerank_tolerance = 1e-12;
  int pagerank_max_iterations = 200;
  double hits_tolerance = 1e-12;
  int hits_max_iterations = 1000;
};

// Ten centrality values per node of an induced subgraph.
//
// Closeness and harmonic use incoming distances (how near the other nodes are
// to reaching this one); closeness is the Wasserman-Faust form
// (r / (n - 1)) * (r / sum of distances) over the r nodes that can reach it.
// Betweenness is the unnormalized directed count. Hub/authority scores are
// HITS vectors normalized to sum 1.
class CentralityTable {
 public:
  CentralityTable() = default;
  CentralityTable(std::vector<std::string> nodes, std::array<std::vector<double>, kMeasureCount> columns);

  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  std::span<const double> values(Measure m) const noexcept {
    return columns_[static_cast<std::size_t>(m)];
  }
  double value(std::string_view node, Measure m) const;

  std::string to_csv() const;

 private:
  std::vector<std::string> nodes_;
  std::array<std::vector<double>, kMeasureCount> columns_;
};

CentralityTable centrality_suite(const YearSnapshot& snapshot, std::span<const std::string> node_filter,
                                 const CentralityOptions& options = {});

// Individual measures on a prebuilt graph.
std::vector<double> pagerank(const WeightedDigraph& g, double damping = 0.85,
                             double tolerance = 1e-12, int max_iterations = 200);
std::vector<double> betweenness(const WeightedDigraph& g, PathLength lengths = PathLength::InverseWeight);
struct HitsScores {
  std::vector<double> hubs;
  std::vector<double> authorities;
};
HitsScores hits(const WeightedDigraph& g, double tolerance = 1e-12, int max_iterations = 1000);
/// Shortest-path lengths from every node *to* `target`; +inf when unreachable.
std::vector<double> incoming_distances(const WeightedDigraph& g, std::size_t target, PathLength lengths);

// ---------------------------------------------------------------------------
// Rank correlation

/// Fractional ranks (1-based, ties share their average rank).
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation of the average-rank vectors.
double spearman_rank_correlation(std::span<const double> xs, std::span<const double> ys);

struct RankingTable {
  int year = 0;
  std::map<std::string, std::int64_t> ranks;  // 1 = best
};

RankingTable read_ranking_file(const std::filesystem::path& path, int year = 0);

struct MeasureCorrelation {
  Measure measure;
  double rho = 0.0;  // NaN when the measure is constant over the overlap
  std::size_t n_overlap = 0;
  bool degenerate = false;
};

struct LeagueCorrelation {
  std::vector<MeasureCorrelation> measures;
  std::size_t dropped_from_table = 0;    // centrality nodes without a rank
  std::size_t dropped_from_ranking = 0;  // ranked nodes absent from the table

  std::string to_csv() const;
};

/// Positive rho means more central nodes hold better (smaller) league ranks.
LeagueCorrelation rank_centrality_vs_league(const CentralityTable& table, const RankingTable& ranking);

// ---------------------------------------------------------------------------
// Partitions

inline constexpr std::string_view kUnaffiliated = "unaffiliated";

struct Partition {
  std::map<std::string, std::string> labels;

  /// Group of `node`, or kUnaffiliated when unmapped.
  std::string_view group_of(std::string_view node) const;
  std::set<std::string> members_of(std::string_view group) const;
  std::set<std::string> groups() const;
};

Partition read_partition_file(const std::filesystem::path& path);

struct GroupModularity {
  std::string group;
  double internal_weight = 0.0;
  double expected_weight = 0.0;  // out_strength(group) * in_strength(group) / m
};

struct ModularityResult {
  double q = 0.0;
  double total_weight = 0.0;
  std::vector<GroupModularity> groups;

  std::string to_csv() const;
};

/// Directed weighted modularity
/// Q = (1/m) sum_ij [A_ij - s_i^out s_j^in / m] delta(c_i, c_j)
/// on the subgraph induced by `node_filter`.
ModularityResult modularity(const YearSnapshot& snapshot, const Partition& partition,
                            std::span<const std::string> node_filter);

struct GroupDensity {
  std::size_t members = 0;
  std::size_t linked_pairs = 0;
  double density = 0.0;
};

/// Fraction of ordered member pairs joined by at least one edge.
GroupDensity group_internal_density(const YearSnapshot& snapshot, const std::set<std::string>& members);

/// First tab-separated column of every non-comment line.
std::vector<std::string> read_node_list(const std::filesystem::path& path);

}  // namespace chronoscope
