#include <doctest.h>

#include <map>
#include <random>

#include "chronoscope/graph_stats.hpp"
#include "chronoscope/graphml.hpp"
#include "chronoscope/metrics.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace chronoscope;

namespace {

const SldCount& row_for(const std::vector<SldCount>& rows, std::string_view sld) {
  for (const auto& r : rows) {
    if (r.sld == sld) return r;
  }
  FAIL("missing row " << sld);
  return rows.front();
}

const FlowCell* cell_for(const SldFlowMatrix& m, const std::string& s, const std::string& t) {
  for (const auto& c : m.cells) {
    if (c.source_sld == s && c.target_sld == t) return &c;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("node_counts_by_sld") {
  const auto policy = default_suffix_policy();
  YearSnapshot snap(2001, {{"a.ac.uk", "b.ac.uk", 1}, {"c.co.uk", "a.ac.uk", 1}});
  auto rows = node_counts_by_sld(snap, policy);
  CHECK(rows.size() == 4);
  CHECK(row_for(rows, "ac.uk").node_count == 2);
  CHECK(row_for(rows, "ac.uk").share == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(row_for(rows, "co.uk").node_count == 1);
  CHECK(row_for(rows, "co.uk").share == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(row_for(rows, "gov.uk").node_count == 0);
  CHECK(row_for(rows, "gov.uk").share_defined);

  auto empty = node_counts_by_sld(YearSnapshot(2001, {}), policy);
  CHECK(empty.size() == 4);
  for (const auto& r : empty) {
    CHECK(r.node_count == 0);
    CHECK(r.share == 0.0);
    CHECK_FALSE(r.share_defined);
  }
  CHECK(sld_series_rows(empty).empty());

  auto with_pages = snap.with_node_pages({{"d.gov.uk", 12}});
  CHECK(row_for(node_counts_by_sld(with_pages, policy), "gov.uk").node_count == 1);
}

TEST_CASE("unregistered SLDs collect under other") {
  const auto policy = default_suffix_policy();
  YearSnapshot snap(2001, {{"a.ac.uk", "bbc.net.uk", 1}});
  auto rows = node_counts_by_sld(snap, policy);
  CHECK(row_for(rows, kOtherSld).node_count == 1);
  CHECK(within_sld_links_per_node(snap, kOtherSld, policy) == 0.0);
}

TEST_CASE("within_sld_links_per_node") {
  const auto policy = default_suffix_policy();
  YearSnapshot three(2001, {{"a.ac.uk", "b.ac.uk", 2}, {"b.ac.uk", "c.ac.uk", 3}, {"c.ac.uk", "a.ac.uk", 1}});
  CHECK(within_sld_links_per_node(three, "ac.uk", policy) == 2.0);
  CHECK(within_sld_links_per_node(three, "ac.uk", policy, LinkCounting::Distinct) == 1.0);

  YearSnapshot none(2001, {{"a.ac.uk", "x.co.uk", 5}, {"y.co.uk", "b.ac.uk", 5}});
  CHECK(within_sld_links_per_node(none, "ac.uk", policy) == 0.0);
  CHECK(within_sld_links_per_node(none, "gov.uk", policy) == 0.0);

  // 6-node mixed graph: brute-force edge filter.
  YearSnapshot mixed(2001, {{"a.ac.uk", "b.ac.uk", 4},
                            {"b.ac.uk", "c.ac.uk", 1},
                            {"a.ac.uk", "x.co.uk", 9},
                            {"x.co.uk", "y.co.uk", 2},
                            {"z.co.uk", "c.ac.uk", 7},
                            {"y.co.uk", "z.co.uk", 3}});
  std::map<std::string, double> num, den;
  for (const auto& n : mixed.nodes()) den[std::string(sld_of_domain(n, policy))] += 1;
  for (const auto& e : mixed.edges()) {
    auto s = sld_of_domain(e.source, policy);
    if (s == sld_of_domain(e.target, policy)) num[std::string(s)] += static_cast<double>(e.weight);
  }
  CHECK(within_sld_links_per_node(mixed, "ac.uk", policy) == num["ac.uk"] / den["ac.uk"]);
  CHECK(within_sld_links_per_node(mixed, "co.uk", policy) == num["co.uk"] / den["co.uk"]);

  CHECK(code_of([&] { within_sld_links_per_node(mixed, "ltd.uk", policy); }) == ErrorCode::UnknownSld);
}

TEST_CASE("inter_sld_flows") {
  const auto policy = default_suffix_policy();
  std::vector<Edge> edges = {{"a.co.uk", "o1.org.uk", 4}, {"b.co.uk", "o2.org.uk", 6},
                             {"a.ac.uk", "b.ac.uk", 3}};
  NodePages pages;
  for (int i = 1; i <= 5; ++i) pages["o" + std::to_string(i) + ".org.uk"] = 1;
  YearSnapshot snap(2002, edges, pages);

  auto m = inter_sld_flows(snap, policy, false);
  const auto* co_org = cell_for(m, "co.uk", "org.uk");
  REQUIRE(co_org);
  CHECK(co_org->absolute == 10u);
  CHECK(co_org->normalized == 2.0);
  CHECK(co_org->target_nodes == 5);

  const auto* ac_ac = cell_for(m, "ac.uk", "ac.uk");
  REQUIRE(ac_ac);
  CHECK_FALSE(ac_ac->absolute.has_value());
  CHECK(ac_ac->normalized == 1.5);
  CHECK(flows_csv(m).find("ac.uk,ac.uk,,1.5\n") != std::string::npos);

  auto with_self = inter_sld_flows(snap, policy, true);
  CHECK(cell_for(with_self, "ac.uk", "ac.uk")->absolute == 3u);
  CHECK(with_self.absolute_total() == snap.total_weight());

  auto distinct = inter_sld_flows(snap, policy, true, LinkCounting::Distinct);
  CHECK(cell_for(distinct, "co.uk", "org.uk")->absolute == 2u);

  CHECK(inter_sld_flows(YearSnapshot(2002, {}), policy, true).cells.empty());
  CHECK(flows_csv(inter_sld_flows(YearSnapshot(2002, {}), policy, true)) ==
        "source_sld,target_sld,absolute,normalized\n");
}

TEST_CASE("statistics invariants on random snapshots") {
  const auto policy = default_suffix_policy();
  std::mt19937_64 rng(41);
  for (int iter = 0; iter < 50; ++iter) {
    auto snap = oracle::random_snapshot(rng, 5 + iter % 20, 0.2, 50, 2003, true);
    double share_sum = 0;
    for (const auto& r : node_counts_by_sld(snap, policy)) share_sum += r.share;
    if (!snap.nodes().empty()) CHECK(std::abs(share_sum - 1.0) <= 1e-12);

    auto m = inter_sld_flows(snap, policy, true);
    CHECK(m.absolute_total() == snap.total_weight());
    for (const auto& c : m.cells) {
      CHECK(c.normalized * static_cast<double>(c.target_nodes) ==
            doctest::Approx(static_cast<double>(*c.absolute)).epsilon(1e-9));
    }

    // Monotonicity: adding an edge never decreases any cell.
    std::vector<Edge> more(snap.edges().begin(), snap.edges().end());
    const std::string extra_src = "zz1.gov.uk", extra_dst = "zz2.org.uk";
    more.push_back({extra_src, extra_dst, 3});
    auto bigger = inter_sld_flows(YearSnapshot(2003, more), policy, true);
    for (const auto& c : m.cells) {
      const auto* b = cell_for(bigger, c.source_sld, c.target_sld);
      REQUIRE(b);
      CHECK(*b->absolute >= *c.absolute);
    }
  }
}

TEST_CASE("csv emitters") {
  const auto policy = default_suffix_policy();
  YearSnapshot snap(2001, {{"a.ac.uk", "b.ac.uk", 2}, {"c.co.uk", "a.ac.uk", 1}});
  CHECK(sld_series_header() == "year,sld,node_count,share\n");
  CHECK(sld_series_rows(node_counts_by_sld(snap, policy)) ==
        "2001,ac.uk,2,0.6666666666666666\n2001,co.uk,1,0.3333333333333333\n"
        "2001,gov.uk,0,0\n2001,org.uk,0,0\n");
  CHECK(within_sld_rows(snap, policy, LinkCounting::Weighted) == "2001,ac.uk,2,1\n2001,co.uk,1,0\n");
}

TEST_CASE("graphml export") {
  const auto policy = default_suffix_policy();
  YearSnapshot snap(2001, {{"a.ac.uk", "b.ac.uk", 2}, {"c.co.uk", "a.ac.uk", 1}});
  Partition p{{{"a.ac.uk", "russell"}}};
  auto xml = to_graphml(snap, policy, &p);
  CHECK(xml.starts_with("<?xml"));
  CHECK(xml.find("edgedefault=\"directed\"") != std::string::npos);
  CHECK(xml.find("<node id=\"a.ac.uk\">") != std::string::npos);
  CHECK(xml.find(">russell<") != std::string::npos);
  CHECK(xml.find(">unaffiliated<") != std::string::npos);
  CHECK(xml.find("source=\"c.co.uk\" target=\"a.ac.uk\"") != std::string::npos);
  CHECK(to_graphml(snap, policy) == to_graphml(snap, policy));
}
