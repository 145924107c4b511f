#include "chronoscope/digraph.hpp"

#include <algorithm>

namespace chronoscope {

WeightedDigraph WeightedDigraph::induced(const YearSnapshot& snapshot,
                                         std::span<const std::string> nodes) {
  WeightedDigraph g;
  g.names_.assign(nodes.begin(), nodes.end());
  std::sort(g.names_.begin(), g.names_.end());
  g.names_.erase(std::unique(g.names_.begin(), g.names_.end()), g.names_.end());
  const auto n = g.names_.size();
  g.out_.resize(n);
  g.in_.resize(n);
  g.out_strength_.assign(n, 0.0);
  g.in_strength_.assign(n, 0.0);
  for (const auto& e : snapshot.edges()) {
    auto s = g.index_of(e.source);
    if (!s) continue;
    auto t = g.index_of(e.target);
    if (!t) continue;
    const auto w = static_cast<double>(e.weight);
    g.out_[*s].push_back(Arc{*t, w});
    g.in_[*t].push_back(Arc{*s, w});
    g.out_strength_[*s] += w;
    g.in_strength_[*t] += w;
    g.total_weight_ += w;
    ++g.arc_count_;
  }
  return g;
}

WeightedDigraph WeightedDigraph::from_snapshot(const YearSnapshot& snapshot) {
  auto nodes = snapshot.nodes();
  return induced(snapshot, nodes);
}

std::optional<std::size_t> WeightedDigraph::index_of(std::string_view name) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), name,
                             [](const std::string& a, std::string_view b) { return a < b; });
  if (it == names_.end() || *it != name) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

}  // namespace chronoscope
