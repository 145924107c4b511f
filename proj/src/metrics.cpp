#include "chronoscope/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "chronoscope/error.hpp"
#include "chronoscope/text.hpp"

namespace chronoscope {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Path lengths that agree to this relative precision are treated as equal
// when counting shortest paths.
constexpr double kTieTolerance = 1e-10;

bool same_length(double a, double b) {
  return std::abs(a - b) <= kTieTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

double arc_length(double weight, PathLength lengths) {
  return lengths == PathLength::Unit ? 1.0 : 1.0 / weight;
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

void normalize_sum(std::vector<double>& v) {
  double total = std::accumulate(v.begin(), v.end(), 0.0);
  if (total > 0.0) {
    for (auto& x : v) x /= total;
  }
}

struct QueueItem {
  double dist;
  std::size_t node;
  bool operator>(const QueueItem& o) const {
    return dist > o.dist || (dist == o.dist && node > o.node);
  }
};
using MinQueue = std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>>;

std::vector<std::string> load_first_column(const std::filesystem::path& path, std::size_t min_fields,
                                           const char* what,
                                           std::vector<std::vector<std::string>>* rows) {
  std::vector<std::string> first;
  text::for_each_line(path, [&](std::string_view line, std::size_t line_no) {
    if (text::is_comment_or_blank(line)) return;
    auto fields = text::split_tabs(line);
    if (fields.size() < min_fields || fields[0].empty()) {
      throw Error(ErrorCode::MalformedLine, std::string("bad ") + what + " line " +
                                                std::to_string(line_no) + ": '" + std::string(line) + "'");
    }
    first.emplace_back(fields[0]);
    if (rows) rows->emplace_back(fields.begin(), fields.end());
  });
  return first;
}

}  // namespace

std::string_view to_string(Measure m) noexcept {
  switch (m) {
    case Measure::InDegree: return "in_degree";
    case Measure::OutDegree: return "out_degree";
    case Measure::InStrength: return "in_strength";
    case Measure::OutStrength: return "out_strength";
    case Measure::PageRank: return "pagerank";
    case Measure::Betweenness: return "betweenness";
    case Measure::Closeness: return "closeness";
    case Measure::Harmonic: return "harmonic";
    case Measure::Hub: return "hub";
    case Measure::Authority: return "authority";
  }
  return "unknown";
}

CentralityTable::CentralityTable(std::vector<std::string> nodes,
                                 std::array<std::vector<double>, kMeasureCount> columns)
    : nodes_(std::move(nodes)), columns_(std::move(columns)) {
  for (const auto& col : columns_) {
    if (col.size() != nodes_.size()) {
      throw Error(ErrorCode::InvalidArgument, "centrality column length differs from node count");
    }
  }
}

double CentralityTable::value(std::string_view node, Measure m) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), node,
                             [](const std::string& a, std::string_view b) { return a < b; });
  if (it == nodes_.end() || *it != node) {
    throw Error(ErrorCode::InvalidArgument, "node '" + std::string(node) + "' not in table");
  }
  return values(m)[static_cast<std::size_t>(it - nodes_.begin())];
}

std::string CentralityTable::to_csv() const {
  std::ostringstream out;
  out << "node";
  for (auto m : kAllMeasures) out << ',' << to_string(m);
  out << '\n';
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    out << nodes_[i];
    for (auto m : kAllMeasures) out << ',' << text::format_double(values(m)[i]);
    out << '\n';
  }
  return out.str();
}

std::vector<double> pagerank(const WeightedDigraph& g, double damping, double tolerance,
                             int max_iterations) {
  const auto n = g.size();
  if (n == 0) return {};
  const double nd = static_cast<double>(n);
  std::vector<double> rank(n, 1.0 / nd);
  std::vector<double> next(n);
  for (int iter = 0; iter < max_iterations; ++iter) {
    double dangling = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (g.out_strength(v) == 0.0) dangling += rank[v];
    }
    const double base = (1.0 - damping) / nd + damping * dangling / nd;
    std::fill(next.begin(), next.end(), base);
    for (std::size_t v = 0; v < n; ++v) {
      const double s = g.out_strength(v);
      if (s == 0.0) continue;
      for (const auto& arc : g.out_arcs(v)) next[arc.node] += damping * rank[v] * (arc.weight / s);
    }
    const double change = l1_distance(rank, next);
    rank.swap(next);
    if (change < tolerance) return rank;
  }
  throw Error(ErrorCode::ConvergenceFailure,
              "pagerank did not converge in " + std::to_string(max_iterations) + " iterations");
}

HitsScores hits(const WeightedDigraph& g, double tolerance, int max_iterations) {
  const auto n = g.size();
  HitsScores out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  if (n == 0 || g.arc_count() == 0) return out;
  // Weights relative to the total make the iteration exactly invariant under
  // integer rescaling of the snapshot.
  const double total = g.total_weight();
  std::vector<double> hubs(n, 1.0 / static_cast<double>(n));
  std::vector<double> auths(n, 0.0);
  std::vector<double> next_hubs(n);
  for (int iter = 0; iter < max_iterations; ++iter) {
    std::vector<double> next_auths(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      for (const auto& arc : g.in_arcs(v)) next_auths[v] += (arc.weight / total) * hubs[arc.node];
    }
    normalize_sum(next_auths);
    std::fill(next_hubs.begin(), next_hubs.end(), 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      for (const auto& arc : g.out_arcs(v)) next_hubs[v] += (arc.weight / total) * next_auths[arc.node];
    }
    normalize_sum(next_hubs);
    const double change = l1_distance(hubs, next_hubs) + l1_distance(auths, next_auths);
    hubs.swap(next_hubs);
    auths.swap(next_auths);
    if (change < tolerance) {
      out.hubs = std::move(hubs);
      out.authorities = std::move(auths);
      return out;
    }
  }
  throw Error(ErrorCode::ConvergenceFailure,
              "HITS did not converge in " + std::to_string(max_iterations) + " iterations");
}

std::vector<double> betweenness(const WeightedDigraph& g, PathLength lengths) {
  // Brandes' accumulation over single-source shortest-path DAGs.
  const auto n = g.size();
  std::vector<double> result(n, 0.0);
  std::vector<double> dist(n);
  std::vector<double> sigma(n);
  std::vector<double> delta(n);
  std::vector<char> settled(n);
  std::vector<std::vector<std::size_t>> preds(n);
  std::vector<std::size_t> order;
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(settled.begin(), settled.end(), 0);
    for (auto& p : preds) p.clear();
    order.clear();
    dist[s] = 0.0;
    sigma[s] = 1.0;
    MinQueue queue;
    queue.push({0.0, s});
    while (!queue.empty()) {
      auto [d, v] = queue.top();
      queue.pop();
      if (settled[v] || d != dist[v]) continue;
      settled[v] = 1;
      order.push_back(v);
      for (const auto& arc : g.out_arcs(v)) {
        const auto w = arc.node;
        if (settled[w]) continue;
        const double nd = d + arc_length(arc.weight, lengths);
        if (dist[w] == kInf || (nd < dist[w] && !same_length(nd, dist[w]))) {
          dist[w] = nd;
          sigma[w] = sigma[v];
          preds[w].assign(1, v);
          queue.push({nd, w});
        } else if (same_length(nd, dist[w])) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const auto w = *it;
      for (auto v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) result[w] += delta[w];
    }
  }
  return result;
}

std::vector<double> incoming_distances(const WeightedDigraph& g, std::size_t target, PathLength lengths) {
  std::vector<double> dist(g.size(), kInf);
  std::vector<char> settled(g.size(), 0);
  dist[target] = 0.0;
  MinQueue queue;
  queue.push({0.0, target});
  while (!queue.empty()) {
    auto [d, v] = queue.top();
    queue.pop();
    if (settled[v]) continue;
    settled[v] = 1;
    for (const auto& arc : g.in_arcs(v)) {
      const double nd = d + arc_length(arc.weight, lengths);
      if (nd < dist[arc.node]) {
        dist[arc.node] = nd;
        queue.push({nd, arc.node});
      }
    }
  }
  return dist;
}

CentralityTable centrality_suite(const YearSnapshot& snapshot, std::span<const std::string> node_filter,
                                 const CentralityOptions& options) {
  if (node_filter.empty()) throw Error(ErrorCode::EmptyFilter, "centrality needs a non-empty node set");
  const auto g = WeightedDigraph::induced(snapshot, node_filter);
  const auto n = g.size();
  std::array<std::vector<double>, kMeasureCount> cols;
  auto col = [&cols](Measure m) -> std::vector<double>& { return cols[static_cast<std::size_t>(m)]; };
  for (auto& c : cols) c.assign(n, 0.0);

  for (std::size_t v = 0; v < n; ++v) {
    col(Measure::InDegree)[v] = static_cast<double>(g.in_arcs(v).size());
    col(Measure::OutDegree)[v] = static_cast<double>(g.out_arcs(v).size());
    col(Measure::InStrength)[v] = g.in_strength(v);
    col(Measure::OutStrength)[v] = g.out_strength(v);
  }
  col(Measure::PageRank) =
      pagerank(g, options.damping, options.pagerank_tolerance, options.pagerank_max_iterations);
  col(Measure::Betweenness) = betweenness(g, options.path_length);

  const double others = static_cast<double>(n) - 1.0;
  for (std::size_t v = 0; v < n; ++v) {
    auto dist = incoming_distances(g, v, options.path_length);
    double total = 0.0;
    double harmonic = 0.0;
    std::size_t reach = 0;
    for (std::size_t u = 0; u < n; ++u) {
      if (u == v || dist[u] == kInf) continue;
      ++reach;
      total += dist[u];
      harmonic += 1.0 / dist[u];
    }
    if (reach > 0 && total > 0.0) {
      const double r = static_cast<double>(reach);
      col(Measure::Closeness)[v] = (r / total) * (r / others);
    }
    col(Measure::Harmonic)[v] = harmonic;
  }

  auto scores = hits(g, options.hits_tolerance, options.hits_max_iterations);
  col(Measure::Hub) = std::move(scores.hubs);
  col(Measure::Authority) = std::move(scores.authorities);
  return CentralityTable(g.names(), std::move(cols));
}

std::vector<double> average_ranks(std::span<const double> values) {
  const auto n = values.size();
  for (double v : values) {
    if (std::isnan(v)) throw Error(ErrorCode::InvalidArgument, "cannot rank NaN values");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // positions i..j-1 hold ranks i+1..j
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

double spearman_rank_correlation(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorCode::LengthMismatch, "spearman inputs differ in length (" + std::to_string(xs.size()) +
                                               " vs " + std::to_string(ys.size()) + ")");
  }
  if (xs.size() < 2) throw Error(ErrorCode::DegenerateInput, "spearman needs at least two observations");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double n = static_cast<double>(rx.size());
  // Average ranks always have mean (n + 1) / 2.
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::DegenerateInput, "spearman input is constant");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

RankingTable read_ranking_file(const std::filesystem::path& path, int year) {
  RankingTable table;
  table.year = year;
  std::vector<std::vector<std::string>> rows;
  load_first_column(path, 2, "ranking", &rows);
  for (const auto& row : rows) {
    auto rank = text::parse_int<std::int64_t>(row[1]);
    if (!rank || *rank < 1) {
      throw Error(ErrorCode::MalformedLine, "bad rank for " + row[0] + ": '" + row[1] + "'");
    }
    table.ranks[row[0]] = *rank;
  }
  return table;
}

std::string LeagueCorrelation::to_csv() const {
  std::ostringstream out;
  out << "measure,rho,n_overlap\n";
  for (const auto& m : measures) {
    out << to_string(m.measure) << ',' << text::format_double(m.rho) << ',' << m.n_overlap << '\n';
  }
  return out.str();
}

LeagueCorrelation rank_centrality_vs_league(const CentralityTable& table, const RankingTable& ranking) {
  LeagueCorrelation out;
  std::vector<std::size_t> rows;
  std::vector<double> league;
  for (std::size_t i = 0; i < table.nodes().size(); ++i) {
    auto it = ranking.ranks.find(table.nodes()[i]);
    if (it == ranking.ranks.end()) {
      ++out.dropped_from_table;
      continue;
    }
    rows.push_back(i);
    league.push_back(static_cast<double>(it->second));
  }
  out.dropped_from_ranking = ranking.ranks.size() - rows.size();
  if (rows.size() < 2) {
    throw Error(ErrorCode::InsufficientOverlap,
                "only " + std::to_string(rows.size()) + " node(s) appear in both table and ranking");
  }
  for (auto m : kAllMeasures) {
    const auto values = table.values(m);
    // Negated so that rank 1 goes to the most central node.
    std::vector<double> negated;
    negated.reserve(rows.size());
    for (auto r : rows) negated.push_back(-values[r]);
    MeasureCorrelation mc{m, 0.0, rows.size(), false};
    try {
      mc.rho = spearman_rank_correlation(negated, league);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateInput) throw;
      mc.rho = std::numeric_limits<double>::quiet_NaN();
      mc.degenerate = true;
    }
    out.measures.push_back(mc);
  }
  return out;
}

std::string_view Partition::group_of(std::string_view node) const {
  auto it = labels.find(std::string(node));
  return it == labels.end() ? kUnaffiliated : std::string_view(it->second);
}

std::set<std::string> Partition::members_of(std::string_view group) const {
  std::set<std::string> out;
  for (const auto& [node, label] : labels) {
    if (label == group) out.insert(node);
  }
  return out;
}

std::set<std::string> Partition::groups() const {
  std::set<std::string> out;
  for (const auto& [node, label] : labels) out.insert(label);
  return out;
}

Partition read_partition_file(const std::filesystem::path& path) {
  Partition p;
  std::vector<std::vector<std::string>> rows;
  load_first_column(path, 2, "partition", &rows);
  for (const auto& row : rows) {
    if (row[1].empty()) throw Error(ErrorCode::MalformedLine, "empty group label for " + row[0]);
    p.labels[row[0]] = row[1];
  }
  return p;
}

std::string ModularityResult::to_csv() const {
  std::ostringstream out;
  out << "group,internal_weight,expected_weight,q_contribution\n";
  double internal = 0.0, expected = 0.0;
  for (const auto& g : groups) {
    internal += g.internal_weight;
    expected += g.expected_weight;
    out << g.group << ',' << text::format_double(g.internal_weight) << ','
        << text::format_double(g.expected_weight) << ','
        << text::format_double((g.internal_weight - g.expected_weight) / total_weight) << '\n';
  }
  out << "total," << text::format_double(internal) << ',' << text::format_double(expected) << ','
      << text::format_double(q) << '\n';
  return out.str();
}

ModularityResult modularity(const YearSnapshot& snapshot, const Partition& partition,
                            std::span<const std::string> node_filter) {
  const auto g = WeightedDigraph::induced(snapshot, node_filter);
  const double m = g.total_weight();
  if (!(m > 0.0)) throw Error(ErrorCode::EmptyGraph, "induced subgraph has no edge weight");

  std::vector<std::string> group_names;
  std::vector<std::size_t> group_of(g.size());
  {
    std::map<std::string, std::size_t> index;
    for (std::size_t v = 0; v < g.size(); ++v) {
      auto label = std::string(partition.group_of(g.names()[v]));
      auto [it, inserted] = index.try_emplace(label, 0);
      if (inserted) it->second = index.size() - 1;
      group_of[v] = it->second;
    }
    group_names.resize(index.size());
    for (const auto& [name, i] : index) group_names[i] = name;
  }

  const auto k = group_names.size();
  std::vector<double> internal(k, 0.0), out_sum(k, 0.0), in_sum(k, 0.0);
  for (std::size_t v = 0; v < g.size(); ++v) {
    out_sum[group_of[v]] += g.out_strength(v);
    in_sum[group_of[v]] += g.in_strength(v);
    for (const auto& arc : g.out_arcs(v)) {
      if (group_of[arc.node] == group_of[v]) internal[group_of[v]] += arc.weight;
    }
  }

  ModularityResult result;
  result.total_weight = m;
  double q = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    GroupModularity gm{group_names[c], internal[c], out_sum[c] * in_sum[c] / m};
    q += (gm.internal_weight - gm.expected_weight) / m;
    result.groups.push_back(std::move(gm));
  }
  std::sort(result.groups.begin(), result.groups.end(),
            [](const GroupModularity& a, const GroupModularity& b) { return a.group < b.group; });
  result.q = q;
  return result;
}

GroupDensity group_internal_density(const YearSnapshot& snapshot, const std::set<std::string>& members) {
  if (members.size() < 2) {
    throw Error(ErrorCode::TooFewMembers, "density needs at least two members, got " +
                                              std::to_string(members.size()));
  }
  GroupDensity out;
  out.members = members.size();
  for (const auto& e : snapshot.edges()) {
    if (members.count(e.source) && members.count(e.target)) ++out.linked_pairs;
  }
  const double pairs = static_cast<double>(out.members) * static_cast<double>(out.members - 1);
  out.density = static_cast<double>(out.linked_pairs) / pairs;
  return out;
}

std::vector<std::string> read_node_list(const std::filesystem::path& path) {
  return load_first_column(path, 1, "node list", nullptr);
}

}  // namespace chronoscope
