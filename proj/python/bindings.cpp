#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "chronoscope/cli.hpp"
#include "chronoscope/domain.hpp"
#include "chronoscope/graph_stats.hpp"
#include "chronoscope/graphml.hpp"
#include "chronoscope/gravity.hpp"
#include "chronoscope/ingest.hpp"
#include "chronoscope/metrics.hpp"
#include "chronoscope/snapshot.hpp"
#include "chronoscope/synth.hpp"

namespace py = pybind11;
namespace cs = chronoscope;

namespace {

using EdgeTuple = std::tuple<std::string, std::string, std::uint64_t>;

cs::SuffixPolicy policy_or_default(const std::optional<cs::SuffixPolicy>& policy) {
  return policy ? *policy : cs::default_suffix_policy();
}

cs::UnknownSldMode parse_unknown(const std::string& mode) {
  if (mode == "reject") return cs::UnknownSldMode::Reject;
  if (mode == "treat-as-2-level") return cs::UnknownSldMode::TreatAsTwoLevel;
  throw cs::Error(cs::ErrorCode::InvalidArgument, "unknown-SLD mode must be reject or treat-as-2-level");
}

cs::YearSnapshot make_snapshot(int year, const std::vector<EdgeTuple>& edges, const cs::NodePages& pages) {
  std::vector<cs::Edge> out;
  out.reserve(edges.size());
  for (const auto& [s, t, w] : edges) out.push_back(cs::Edge{s, t, w});
  return cs::YearSnapshot(year, std::move(out), pages);
}

std::vector<EdgeTuple> edge_tuples(const cs::YearSnapshot& snap) {
  std::vector<EdgeTuple> out;
  out.reserve(snap.edges().size());
  for (const auto& e : snap.edges()) out.emplace_back(e.source, e.target, e.weight);
  return out;
}

std::vector<std::string> nodes_or_all(const cs::YearSnapshot& snap, const std::optional<std::vector<std::string>>& nodes) {
  return nodes ? *nodes : snap.nodes();
}

cs::Partition to_partition(const std::map<std::string, std::string>& labels) { return cs::Partition{labels}; }

cs::GeoTable to_geo(const std::map<std::string, std::pair<double, double>>& geo) {
  cs::GeoTable out;
  for (const auto& [name, ll] : geo) out[name] = cs::GeoPoint::checked(ll.first, ll.second);
  return out;
}

std::map<std::string, std::pair<double, double>> from_geo(const cs::GeoTable& geo) {
  std::map<std::string, std::pair<double, double>> out;
  for (const auto& [name, p] : geo) out[name] = {p.latitude, p.longitude};
  return out;
}

py::dict summary_dict(const cs::IngestSummary& s) {
  py::dict d;
  d["lines"] = s.lines;
  d["records"] = s.records;
  d["blank_lines"] = s.blank_lines;
  d["malformed_lines"] = s.malformed_lines;
  d["malformed_urls"] = s.malformed_urls;
  d["out_of_scope"] = s.out_of_scope;
  d["unknown_sld"] = s.unknown_sld;
  d["self_loops"] = s.self_loops;
  d["skipped"] = s.skipped();
  d["sessions"] = s.sessions;
  return d;
}

cs::IngestOptions ingest_options(std::int64_t gap_seconds, const std::string& year_select, bool strict) {
  cs::IngestOptions o;
  o.gap_seconds = gap_seconds;
  o.year_select = cs::parse_year_select(year_select);
  o.strict = strict;
  return o;
}

py::dict fit_dict(const cs::GravityFit& f) {
  py::dict d;
  d["a"] = f.exponent;
  d["std_error"] = f.std_error;
  d["intercept"] = f.intercept;
  d["rss"] = f.rss;
  d["n_points"] = f.n_points;
  d["window"] = f.window;
  d["d_min_km"] = f.d_min_km;
  d["d_max_km"] = f.d_max_km;
  return d;
}

std::vector<cs::StrengthPair> to_pairs(const std::vector<std::pair<double, double>>& points) {
  std::vector<cs::StrengthPair> out;
  out.reserve(points.size());
  for (const auto& [d, s] : points) out.push_back(cs::StrengthPair{"", "", 0.0, s, d});
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Longitudinal web-domain link analysis: ingest, statistics, centrality, gravity fits.";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&]() { return py::exception<cs::Error>(m, "ChronoscopeError", PyExc_ValueError); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const cs::Error& e) {
      const auto& cls = error_type.get_stored();
      py::object exc = cls(std::string(cs::to_string(e.code())), e.what());
      PyErr_SetObject(cls.ptr(), exc.ptr());
    }
  });

  // domain
  py::class_<cs::SuffixPolicy>(m, "SuffixPolicy")
      .def(py::init([](const std::string& cctld, const std::vector<std::string>& slds, const std::string& unknown) {
             return cs::SuffixPolicy(cctld, slds, parse_unknown(unknown));
           }),
           py::arg("cctld"), py::arg("slds"), py::arg("unknown_sld") = "reject")
      .def_property_readonly("cctld", &cs::SuffixPolicy::cctld)
      .def_property_readonly("registered_slds", &cs::SuffixPolicy::registered_slds)
      .def("is_registered", [](const cs::SuffixPolicy& p, const std::string& s) { return p.is_registered(s); })
      .def("with_unknown_sld", [](const cs::SuffixPolicy& p, const std::string& mode) {
        return p.with_unknown_mode(parse_unknown(mode));
      });
  m.def("default_suffix_policy", &cs::default_suffix_policy);
  m.def("load_suffix_policy", [](const std::filesystem::path& path, const std::string& unknown) {
    return cs::load_suffix_policy(path, parse_unknown(unknown));
  }, py::arg("path"), py::arg("unknown_sld") = "reject");

  py::class_<cs::DomainKey>(m, "DomainKey")
      .def_readonly("tld", &cs::DomainKey::tld)
      .def_readonly("sld", &cs::DomainKey::sld)
      .def_readonly("third_level", &cs::DomainKey::third_level)
      .def("__eq__", [](const cs::DomainKey& a, const cs::DomainKey& b) { return a == b; })
      .def("__repr__", [](const cs::DomainKey& k) {
        return "DomainKey(tld='" + k.tld + "', sld='" + k.sld + "', third_level='" + k.third_level + "')";
      });
  m.def("parse_domain_key", [](const std::string& url, const std::optional<cs::SuffixPolicy>& policy) {
    return cs::parse_domain_key(url, policy_or_default(policy));
  }, py::arg("url"), py::arg("policy") = py::none());
  m.def("classify_sld", [](const cs::DomainKey& key, const std::optional<cs::SuffixPolicy>& policy) {
    return cs::classify_sld(key, policy_or_default(policy));
  }, py::arg("key"), py::arg("policy") = py::none());
  m.def("canonical_url", &cs::canonical_url);

  // snapshots and ingest
  py::class_<cs::YearSnapshot>(m, "YearSnapshot")
      .def(py::init(&make_snapshot), py::arg("year"), py::arg("edges"), py::arg("node_pages") = cs::NodePages{})
      .def_property_readonly("year", &cs::YearSnapshot::year)
      .def_property_readonly("edges", &edge_tuples)
      .def_property_readonly("node_pages", &cs::YearSnapshot::node_pages)
      .def("nodes", &cs::YearSnapshot::nodes)
      .def("total_weight", &cs::YearSnapshot::total_weight)
      .def("scaled", &cs::YearSnapshot::scaled)
      .def("to_string", &cs::snapshot_to_string)
      .def_static("from_string", &cs::snapshot_from_string)
      .def("write", [](const cs::YearSnapshot& s, const std::filesystem::path& p) { cs::write_snapshot_file(p, s); })
      .def_static("read", &cs::read_snapshot_file)
      .def("__eq__", [](const cs::YearSnapshot& a, const cs::YearSnapshot& b) { return a == b; })
      .def("__len__", [](const cs::YearSnapshot& s) { return s.edges().size(); })
      .def("__repr__", [](const cs::YearSnapshot& s) {
        return "YearSnapshot(year=" + std::to_string(s.year()) + ", edges=" + std::to_string(s.edges().size()) + ")";
      });
  m.def("merge_snapshots", &cs::merge_snapshots);

  m.def("ingest_text", [](const std::string& text, const std::optional<cs::SuffixPolicy>& policy,
                          std::int64_t gap_seconds, const std::string& year_select, bool strict) {
    cs::IngestAccumulator acc(policy_or_default(policy), ingest_options(gap_seconds, year_select, strict));
    acc.add_text(text);
    auto snaps = acc.build();
    return py::make_tuple(snaps, summary_dict(acc.summary()));
  }, py::arg("text"), py::arg("policy") = py::none(), py::arg("gap_seconds") = cs::kDefaultGapSeconds,
     py::arg("year_select") = "per-pair-max", py::arg("strict") = false,
     "Ingest tab-separated link lines; returns ({year: YearSnapshot}, summary).");
  m.def("ingest_files", [](const std::vector<std::filesystem::path>& paths, const std::optional<cs::SuffixPolicy>& policy,
                           std::int64_t gap_seconds, const std::string& year_select, bool strict) {
    const auto options = ingest_options(gap_seconds, year_select, strict);
    cs::IngestAccumulator acc(policy_or_default(policy), options);
    {
      py::gil_scoped_release release;
      for (const auto& p : paths) acc.add_file(p);
    }
    auto snaps = acc.build();
    return py::make_tuple(snaps, summary_dict(acc.summary()));
  }, py::arg("paths"), py::arg("policy") = py::none(), py::arg("gap_seconds") = cs::kDefaultGapSeconds,
     py::arg("year_select") = "per-pair-max", py::arg("strict") = false);
  m.def("session_starts", [](const std::vector<std::int64_t>& times, std::int64_t gap) {
    return cs::session_starts(times, gap);
  }, py::arg("times"), py::arg("gap_seconds") = cs::kDefaultGapSeconds);
  m.def("utc_year", &cs::utc_year);

  // statistics
  m.def("node_counts_by_sld", [](const cs::YearSnapshot& snap, const std::optional<cs::SuffixPolicy>& policy) {
    py::list rows;
    for (const auto& r : cs::node_counts_by_sld(snap, policy_or_default(policy))) {
      py::dict d;
      d["year"] = r.year;
      d["sld"] = r.sld;
      d["node_count"] = r.node_count;
      d["share"] = r.share;
      d["share_defined"] = r.share_defined;
      rows.append(d);
    }
    return rows;
  }, py::arg("snapshot"), py::arg("policy") = py::none());
  m.def("within_sld_links_per_node", [](const cs::YearSnapshot& snap, const std::string& sld,
                                        const std::optional<cs::SuffixPolicy>& policy, bool distinct) {
    return cs::within_sld_links_per_node(snap, sld, policy_or_default(policy),
                                         distinct ? cs::LinkCounting::Distinct : cs::LinkCounting::Weighted);
  }, py::arg("snapshot"), py::arg("sld"), py::arg("policy") = py::none(), py::arg("distinct") = false);
  m.def("inter_sld_flows", [](const cs::YearSnapshot& snap, bool include_self,
                              const std::optional<cs::SuffixPolicy>& policy, bool distinct) {
    py::list rows;
    auto matrix = cs::inter_sld_flows(snap, policy_or_default(policy), include_self,
                                      distinct ? cs::LinkCounting::Distinct : cs::LinkCounting::Weighted);
    for (const auto& c : matrix.cells) {
      py::dict d;
      d["source_sld"] = c.source_sld;
      d["target_sld"] = c.target_sld;
      d["absolute"] = c.absolute ? py::cast(*c.absolute) : py::none();
      d["normalized"] = c.normalized;
      d["target_nodes"] = c.target_nodes;
      rows.append(d);
    }
    return rows;
  }, py::arg("snapshot"), py::arg("include_self") = false, py::arg("policy") = py::none(),
     py::arg("distinct") = false);

  // metrics
  m.def("centrality", [](const cs::YearSnapshot& snap, const std::optional<std::vector<std::string>>& nodes,
                         bool unit_lengths) {
    cs::CentralityOptions options;
    options.path_length = unit_lengths ? cs::PathLength::Unit : cs::PathLength::InverseWeight;
    const auto filter = nodes_or_all(snap, nodes);
    cs::CentralityTable table;
    {
      py::gil_scoped_release release;
      table = cs::centrality_suite(snap, filter, options);
    }
    py::dict out;
    out["nodes"] = table.nodes();
    for (auto measure : cs::kAllMeasures) {
      auto v = table.values(measure);
      out[py::str(std::string(cs::to_string(measure)))] = std::vector<double>(v.begin(), v.end());
    }
    return out;
  }, py::arg("snapshot"), py::arg("nodes") = py::none(), py::arg("unit_lengths") = false,
     "Ten centrality measures on the induced subgraph; returns {'nodes': [...], measure: [...]}.");
  m.def("spearman", [](const std::vector<double>& xs, const std::vector<double>& ys) {
    return cs::spearman_rank_correlation(xs, ys);
  });
  m.def("average_ranks", [](const std::vector<double>& v) { return cs::average_ranks(v); });
  m.def("correlate_with_ranking", [](const cs::YearSnapshot& snap, const std::map<std::string, std::int64_t>& ranks,
                                     const std::optional<std::vector<std::string>>& nodes) {
    std::vector<std::string> filter;
    if (nodes) {
      filter = *nodes;
    } else {
      for (const auto& [node, rank] : ranks) filter.push_back(node);
    }
    const auto result = cs::rank_centrality_vs_league(cs::centrality_suite(snap, filter),
                                                      cs::RankingTable{snap.year(), ranks});
    py::dict out;
    for (const auto& mc : result.measures) out[py::str(std::string(cs::to_string(mc.measure)))] = mc.rho;
    return out;
  }, py::arg("snapshot"), py::arg("ranking"), py::arg("nodes") = py::none());
  m.def("modularity", [](const cs::YearSnapshot& snap, const std::map<std::string, std::string>& partition,
                         const std::optional<std::vector<std::string>>& nodes) {
    return cs::modularity(snap, to_partition(partition), nodes_or_all(snap, nodes)).q;
  }, py::arg("snapshot"), py::arg("partition"), py::arg("nodes") = py::none());
  m.def("group_density", [](const cs::YearSnapshot& snap, const std::set<std::string>& members) {
    return cs::group_internal_density(snap, members).density;
  });

  // gravity
  m.def("haversine_km", [](double lat1, double lon1, double lat2, double lon2) {
    return cs::haversine_km(cs::GeoPoint::checked(lat1, lon1), cs::GeoPoint::checked(lat2, lon2));
  });
  m.def("normalized_strengths", [](const cs::YearSnapshot& snap,
                                   const std::map<std::string, std::pair<double, double>>& geo,
                                   const std::optional<std::vector<std::string>>& nodes) {
    std::vector<std::string> filter;
    if (nodes) {
      filter = *nodes;
    } else {
      for (const auto& [node, ll] : geo) filter.push_back(node);
    }
    std::vector<std::tuple<std::string, std::string, double, double>> out;
    for (const auto& p : cs::normalized_strengths(snap, filter, to_geo(geo)).pairs) {
      out.emplace_back(p.source, p.target, p.sigma, p.distance_km);
    }
    return out;
  }, py::arg("snapshot"), py::arg("geo"), py::arg("nodes") = py::none(),
     "Returns [(source, target, sigma, distance_km)].");
  m.def("distance_strength_series", [](const std::vector<std::pair<double, double>>& points, std::size_t window,
                                       double d_min_km) {
    std::vector<std::pair<double, double>> out;
    for (const auto& p : cs::distance_strength_series(to_pairs(points), window, d_min_km)) {
      out.emplace_back(p.distance_km, p.sigma);
    }
    return out;
  }, py::arg("points"), py::arg("window") = cs::kDefaultWindow, py::arg("d_min_km") = cs::kDefaultMinDistanceKm,
     "points are (distance_km, sigma) pairs.");
  m.def("fit_gravity_exponent", [](const std::vector<std::pair<double, double>>& series) {
    std::vector<cs::SeriesPoint> pts;
    for (const auto& [d, s] : series) pts.push_back({d, s});
    return fit_dict(cs::fit_gravity_exponent(pts));
  });
  m.def("analyze_gravity", [](const cs::YearSnapshot& snap, const std::map<std::string, std::pair<double, double>>& geo,
                              std::size_t window, double d_min_km, bool fit_raw, const std::string& symmetrize) {
    cs::GravityOptions options;
    options.window = window;
    options.d_min_km = d_min_km;
    options.fit_raw = fit_raw;
    if (symmetrize == "mean") {
      options.symmetrize = cs::Symmetrize::Mean;
    } else if (symmetrize != "none") {
      throw cs::Error(cs::ErrorCode::InvalidArgument, "symmetrize must be none or mean");
    }
    std::vector<std::string> nodes;
    for (const auto& [node, ll] : geo) nodes.push_back(node);
    return fit_dict(cs::analyze_gravity(snap, nodes, to_geo(geo), options).fit);
  }, py::arg("snapshot"), py::arg("geo"), py::arg("window") = cs::kDefaultWindow,
     py::arg("d_min_km") = cs::kDefaultMinDistanceKm, py::arg("fit_raw") = false, py::arg("symmetrize") = "none");

  // synthetic data
  m.def("gen_geo_points", [](std::uint64_t seed, std::size_t n, const std::string& layout) {
    return from_geo(cs::synth::gen_geo_points(seed, n, cs::synth::parse_layout(layout)));
  }, py::arg("seed"), py::arg("n"), py::arg("layout") = "sphere");
  m.def("gen_gravity_graph", [](std::uint64_t seed, std::size_t n, double exponent, double noise,
                                const std::map<std::string, std::pair<double, double>>& geo, int year) {
    cs::synth::SynthSpec spec;
    spec.seed = seed;
    spec.n_nodes = n;
    spec.planted_exponent = exponent;
    spec.noise_scale = noise;
    spec.year = year;
    return cs::synth::gen_gravity_graph(spec, to_geo(geo));
  }, py::arg("seed"), py::arg("n"), py::arg("exponent"), py::arg("noise"), py::arg("geo"), py::arg("year") = 2010);
  m.def("gen_partitioned_graph", [](std::uint64_t seed, std::size_t n, std::size_t groups, double p_intra,
                                    double p_inter, double noise, int year) {
    cs::synth::SynthSpec spec;
    spec.seed = seed;
    spec.n_nodes = n;
    spec.noise_scale = noise;
    spec.year = year;
    spec.planted_partition = cs::synth::PlantedPartition{groups, p_intra, p_inter};
    return py::make_tuple(cs::synth::gen_partitioned_graph(spec), cs::synth::planted_partition(spec).labels);
  }, py::arg("seed"), py::arg("n"), py::arg("groups"), py::arg("p_intra"), py::arg("p_inter"),
     py::arg("noise") = 0.0, py::arg("year") = 2010, "Returns (YearSnapshot, {node: group}).");

  m.def("to_graphml", [](const cs::YearSnapshot& snap, const std::optional<std::map<std::string, std::string>>& partition) {
    const auto policy = cs::default_suffix_policy();
    if (!partition) return cs::to_graphml(snap, policy);
    const auto p = to_partition(*partition);
    return cs::to_graphml(snap, policy, &p);
  }, py::arg("snapshot"), py::arg("partition") = py::none());

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::vector<std::string> argv{"chronoscope"};
    argv.insert(argv.end(), args.begin(), args.end());
    std::ostringstream out, err;
    int status;
    {
      py::gil_scoped_release release;
      status = cs::run_cli(argv, out, err);
    }
    return py::make_tuple(status, out.str(), err.str());
  }, py::arg("args"), "Runs the command line; returns (exit_status, stdout, stderr).");
}
