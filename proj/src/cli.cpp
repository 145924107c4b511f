#include "chronoscope/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <future>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "chronoscope/domain.hpp"
#include "chronoscope/error.hpp"
#include "chronoscope/graph_stats.hpp"
#include "chronoscope/graphml.hpp"
#include "chronoscope/gravity.hpp"
#include "chronoscope/ingest.hpp"
#include "chronoscope/metrics.hpp"
#include "chronoscope/snapshot.hpp"
#include "chronoscope/synth.hpp"
#include "chronoscope/text.hpp"

namespace chronoscope {
namespace {

namespace fs = std::filesystem;

struct CommonConfig {
  std::string policy_path;
  std::string unknown_sld = "reject";
  std::string out_dir;
  std::optional<int> year;
};

struct Config {
  CommonConfig common;
  // ingest
  std::vector<std::string> link_files;
  std::int64_t gap_seconds = kDefaultGapSeconds;
  std::string year_select = "per-pair-max";
  bool strict = false;
  std::string node_pages;
  unsigned jobs = 1;
  // analysis inputs
  std::vector<std::string> snapshots;
  std::string node_filter;
  std::string ranking;
  std::string partition;
  std::string group;
  std::string geo;
  // stats
  bool distinct = false;
  bool include_self = false;
  // centrality
  bool unit_lengths = false;
  // gravity
  std::size_t window = kDefaultWindow;
  double d_min_km = kDefaultMinDistanceKm;
  double d_max_km = std::numeric_limits<double>::infinity();
  bool fit_raw = false;
  std::string symmetrize = "none";
  // synth
  std::string synth_kind;
  std::uint64_t seed = 1;
  std::size_t nodes = 200;
  double exponent = 0.28;
  double noise = 0.3;
  std::size_t groups = 2;
  double p_intra = 0.1;
  double p_inter = 0.01;
  std::string layout = "sphere";
  int synth_year = 2010;
  // export
  std::string format = "graphml";
};

SuffixPolicy load_policy(const CommonConfig& c) {
  UnknownSldMode mode = UnknownSldMode::Reject;
  if (c.unknown_sld == "treat-as-2-level") {
    mode = UnknownSldMode::TreatAsTwoLevel;
  } else if (c.unknown_sld != "reject") {
    throw Error(ErrorCode::InvalidArgument, "unknown --unknown-sld mode '" + c.unknown_sld + "'");
  }
  if (c.policy_path.empty()) return default_suffix_policy().with_unknown_mode(mode);
  return load_suffix_policy(c.policy_path, mode);
}

fs::path out_dir(const CommonConfig& c) {
  fs::path dir = c.out_dir;
  if (dir.empty()) {
    if (const char* env = std::getenv("CHRONOSCOPE_OUT"); env && *env) dir = env;
  }
  if (dir.empty()) dir = ".";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::vector<YearSnapshot> load_snapshots(const Config& c) {
  std::vector<YearSnapshot> out;
  for (const auto& path : c.snapshots) {
    auto snap = read_snapshot_file(path);
    if (c.common.year && snap.year() != *c.common.year) continue;
    out.push_back(std::move(snap));
  }
  if (out.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                c.common.year ? "no snapshot for year " + std::to_string(*c.common.year)
                              : std::string("no snapshots given"));
  }
  return out;
}

std::vector<std::string> nodes_or_all(const Config& c, const YearSnapshot& snap) {
  if (!c.node_filter.empty()) return read_node_list(c.node_filter);
  return snap.nodes();
}

std::string year_file(std::string_view stem, int year, std::string_view ext) {
  return std::string(stem) + "_" + std::to_string(year) + std::string(ext);
}

int cmd_ingest(const Config& c, std::ostream& out) {
  const auto policy = load_policy(c.common);
  IngestOptions options;
  options.gap_seconds = c.gap_seconds;
  options.year_select = parse_year_select(c.year_select);
  options.strict = c.strict;
  if (options.gap_seconds <= 0) throw Error(ErrorCode::InvalidArgument, "--gap-seconds must be positive");

  IngestAccumulator total(policy, options);
  if (c.jobs <= 1 || c.link_files.size() <= 1) {
    for (const auto& f : c.link_files) total.add_file(f);
  } else {
    // Shards are parsed concurrently and merged in command-line order.
    std::vector<std::future<IngestAccumulator>> parts;
    std::size_t next = 0;
    while (next < c.link_files.size()) {
      parts.clear();
      for (unsigned j = 0; j < c.jobs && next < c.link_files.size(); ++j, ++next) {
        parts.push_back(std::async(std::launch::async, [&policy, options, path = c.link_files[next]] {
          IngestAccumulator acc(policy, options);
          acc.add_file(path);
          return acc;
        }));
      }
      for (auto& p : parts) total.merge(p.get());
    }
  }
  auto snapshots = total.build();

  std::map<int, NodePages> pages;
  if (!c.node_pages.empty()) pages = read_node_pages_file(c.node_pages);

  const auto dir = out_dir(c.common);
  for (const auto& [year, snap] : snapshots) {
    if (c.common.year && year != *c.common.year) continue;
    write_snapshot_file(dir / year_file("snapshot", year, ".tsv"), snap);
  }
  for (const auto& [year, nodes] : pages) {
    if (c.common.year && year != *c.common.year) continue;
    std::ostringstream body;
    write_node_pages(body, year, nodes);
    text::write_file(dir / year_file("nodes", year, ".tsv"), body.str());
  }
  const auto& s = total.summary();
  text::write_file(dir / "ingest_summary.csv", s.to_csv());
  out << "ingest: lines=" << s.lines << " records=" << s.records << " sessions=" << s.sessions
      << " years=" << snapshots.size() << " skipped=" << s.skipped() << " (self_loops=" << s.self_loops
      << " malformed_lines=" << s.malformed_lines << " malformed_urls=" << s.malformed_urls
      << " out_of_scope=" << s.out_of_scope << " unknown_sld=" << s.unknown_sld << ")\n";
  return kExitOk;
}

int cmd_stats(const Config& c, std::ostream& out) {
  const auto policy = load_policy(c.common);
  auto snapshots = load_snapshots(c);
  std::map<int, NodePages> pages;
  if (!c.node_pages.empty()) pages = read_node_pages_file(c.node_pages);
  const auto counting = c.distinct ? LinkCounting::Distinct : LinkCounting::Weighted;
  const auto dir = out_dir(c.common);

  std::sort(snapshots.begin(), snapshots.end(),
            [](const YearSnapshot& a, const YearSnapshot& b) { return a.year() < b.year(); });
  std::string series = sld_series_header();
  std::string within = within_sld_header();
  for (auto snap : snapshots) {
    if (auto it = pages.find(snap.year()); it != pages.end()) snap = snap.with_node_pages(it->second);
    series += sld_series_rows(node_counts_by_sld(snap, policy));
    within += within_sld_rows(snap, policy, counting);
    text::write_file(dir / year_file("flows", snap.year(), ".csv"),
                     flows_csv(inter_sld_flows(snap, policy, c.include_self, counting)));
  }
  text::write_file(dir / "sld_series.csv", series);
  text::write_file(dir / "within_sld.csv", within);
  out << "stats: " << snapshots.size() << " snapshot(s) written to " << dir.string() << '\n';
  return kExitOk;
}

int cmd_centrality(const Config& c, std::ostream& out) {
  CentralityOptions options;
  options.path_length = c.unit_lengths ? PathLength::Unit : PathLength::InverseWeight;
  const auto dir = out_dir(c.common);
  for (const auto& snap : load_snapshots(c)) {
    auto table = centrality_suite(snap, nodes_or_all(c, snap), options);
    text::write_file(dir / year_file("centrality", snap.year(), ".csv"), table.to_csv());
    out << "centrality " << snap.year() << ": " << table.nodes().size() << " nodes\n";
  }
  return kExitOk;
}

int cmd_correlate(const Config& c, std::ostream& out) {
  CentralityOptions options;
  options.path_length = c.unit_lengths ? PathLength::Unit : PathLength::InverseWeight;
  const auto dir = out_dir(c.common);
  for (const auto& snap : load_snapshots(c)) {
    const auto ranking = read_ranking_file(c.ranking, snap.year());
    std::vector<std::string> nodes;
    if (!c.node_filter.empty()) {
      nodes = read_node_list(c.node_filter);
    } else {
      for (const auto& [node, rank] : ranking.ranks) nodes.push_back(node);
    }
    const auto result = rank_centrality_vs_league(centrality_suite(snap, nodes, options), ranking);
    text::write_file(dir / year_file("correlations", snap.year(), ".csv"), result.to_csv());
    out << "correlate " << snap.year() << ": n_overlap=" << result.measures.front().n_overlap
        << " dropped_from_table=" << result.dropped_from_table
        << " dropped_from_ranking=" << result.dropped_from_ranking << '\n';
  }
  return kExitOk;
}

int cmd_modularity(const Config& c, std::ostream& out) {
  const auto partition = read_partition_file(c.partition);
  const auto dir = out_dir(c.common);
  for (const auto& snap : load_snapshots(c)) {
    const auto result = modularity(snap, partition, nodes_or_all(c, snap));
    text::write_file(dir / year_file("modularity", snap.year(), ".csv"), result.to_csv());
    out << "modularity " << snap.year() << ": q=" << text::format_double(result.q) << '\n';
  }
  return kExitOk;
}

int cmd_density(const Config& c, std::ostream& out) {
  const auto partition = read_partition_file(c.partition);
  const auto dir = out_dir(c.common);
  for (const auto& snap : load_snapshots(c)) {
    std::ostringstream csv;
    csv << "group,members,linked_pairs,density\n";
    for (const auto& group : partition.groups()) {
      if (!c.group.empty() && group != c.group) continue;
      const auto members = partition.members_of(group);
      if (members.size() < 2 && c.group.empty()) continue;
      const auto d = group_internal_density(snap, members);
      csv << group << ',' << d.members << ',' << d.linked_pairs << ',' << text::format_double(d.density) << '\n';
    }
    if (!c.group.empty() && partition.members_of(c.group).empty()) {
      throw Error(ErrorCode::TooFewMembers, "group '" + c.group + "' has no members");
    }
    text::write_file(dir / year_file("density", snap.year(), ".csv"), csv.str());
    out << "density " << snap.year() << ": written\n";
  }
  return kExitOk;
}

Symmetrize parse_symmetrize(const std::string& s) {
  if (s == "none") return Symmetrize::None;
  if (s == "mean") return Symmetrize::Mean;
  throw Error(ErrorCode::InvalidArgument, "unknown --symmetrize mode '" + s + "'");
}

int cmd_gravity(const Config& c, std::ostream& out) {
  const auto geo = read_geo_file(c.geo);
  GravityOptions options;
  options.window = c.window;
  options.d_min_km = c.d_min_km;
  options.d_max_km = c.d_max_km;
  options.fit_raw = c.fit_raw;
  options.symmetrize = parse_symmetrize(c.symmetrize);
  const auto dir = out_dir(c.common);
  for (const auto& snap : load_snapshots(c)) {
    std::vector<std::string> nodes;
    if (!c.node_filter.empty()) {
      nodes = read_node_list(c.node_filter);
    } else {
      for (const auto& [node, point] : geo) nodes.push_back(node);
    }
    const auto result = analyze_gravity(snap, nodes, geo, options);
    text::write_file(dir / year_file("gravity_series", snap.year(), ".csv"), gravity_series_csv(result.series));
    text::write_file(dir / year_file("gravity_fit", snap.year(), ".csv"), gravity_fit_csv(result.fit, options));
    text::write_file(dir / year_file("geo_links", snap.year(), ".csv"),
                     geo_links_csv(result.strengths.pairs, geo));
    out << "gravity " << snap.year() << ": a=" << text::format_double(result.fit.exponent)
        << " std_error=" << text::format_double(result.fit.std_error) << " pairs=" << result.strengths.pairs.size()
        << " excluded=" << result.strengths.excluded << '\n';
  }
  return kExitOk;
}

int cmd_synth(const Config& c, std::ostream& out) {
  synth::SynthSpec spec;
  spec.seed = c.seed;
  spec.n_nodes = c.nodes;
  spec.noise_scale = c.noise;
  spec.year = c.synth_year;
  const auto dir = out_dir(c.common);
  if (c.synth_kind == "gravity") {
    spec.planted_exponent = c.exponent;
    const auto geo = synth::gen_geo_points(c.seed, c.nodes, synth::parse_layout(c.layout));
    const auto snap = synth::gen_gravity_graph(spec, geo);
    write_snapshot_file(dir / year_file("snapshot", spec.year, ".tsv"), snap);
    write_geo_file(dir / "geo.tsv", geo);
    out << "synth gravity: " << snap.edges().size() << " edges, a=" << text::format_double(c.exponent) << '\n';
  } else {
    spec.planted_partition = synth::PlantedPartition{c.groups, c.p_intra, c.p_inter};
    const auto snap = synth::gen_partitioned_graph(spec);
    const auto partition = synth::planted_partition(spec);
    write_snapshot_file(dir / year_file("snapshot", spec.year, ".tsv"), snap);
    std::ostringstream body;
    for (const auto& [node, label] : partition.labels) body << node << '\t' << label << '\n';
    text::write_file(dir / "partition.tsv", body.str());
    out << "synth partition: " << snap.edges().size() << " edges, " << c.groups << " groups\n";
  }
  return kExitOk;
}

int cmd_export(const Config& c, std::ostream& out) {
  const auto policy = load_policy(c.common);
  std::optional<Partition> partition;
  if (!c.partition.empty()) partition = read_partition_file(c.partition);
  const auto dir = out_dir(c.common);
  for (const auto& snap : load_snapshots(c)) {
    text::write_file(dir / year_file("graph", snap.year(), ".graphml"),
                     to_graphml(snap, policy, partition ? &*partition : nullptr));
    out << "export " << snap.year() << ": graphml\n";
  }
  return kExitOk;
}

std::string single_line(std::string s) {
  for (auto& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Longitudinal web-domain link analysis", "chronoscope"};
  app.require_subcommand(1);

  auto add_common = [&c](CLI::App* sub, bool policy) {
    if (policy) {
      sub->add_option("--policy", c.common.policy_path, "Suffix policy file (default: built-in .uk policy)");
      sub->add_option("--unknown-sld", c.common.unknown_sld, "reject | treat-as-2-level")
          ->check(CLI::IsMember({"reject", "treat-as-2-level"}));
    }
    sub->add_option("--out-dir", c.common.out_dir, "Output directory (fallback: $CHRONOSCOPE_OUT, then .)");
    sub->add_option("--year", c.common.year, "Only process this year");
  };
  auto add_snapshots = [&c](CLI::App* sub) {
    sub->add_option("snapshots", c.snapshots, "Snapshot files")->required()->check(CLI::ExistingFile);
  };

  auto* ingest = app.add_subcommand("ingest", "Build yearly snapshots from link files");
  add_common(ingest, true);
  ingest->add_option("links", c.link_files, "Link files (shards)")->required()->check(CLI::ExistingFile);
  ingest->add_option("--gap-seconds", c.gap_seconds, "Session gap in seconds")->capture_default_str();
  ingest->add_option("--year-select", c.year_select, "per-pair-max | best-session")
      ->check(CLI::IsMember({"per-pair-max", "best-session"}))
      ->capture_default_str();
  ingest->add_flag("--strict", c.strict, "Treat skipped lines (except self-loops) as fatal");
  ingest->add_option("--node-pages", c.node_pages, "Node-pages file")->check(CLI::ExistingFile);
  ingest->add_option("--jobs", c.jobs, "Shards parsed concurrently")->check(CLI::PositiveNumber);

  auto* stats = app.add_subcommand("stats", "Per-SLD node counts, shares and flow matrices");
  add_common(stats, true);
  add_snapshots(stats);
  stats->add_flag("--distinct", c.distinct, "Count distinct links instead of summed weights");
  stats->add_flag("--include-self", c.include_self, "Keep within-SLD totals in the absolute flow view");
  stats->add_option("--node-pages", c.node_pages, "Node-pages file")->check(CLI::ExistingFile);

  auto* centrality = app.add_subcommand("centrality", "Ten centrality measures per node");
  add_common(centrality, false);
  add_snapshots(centrality);
  centrality->add_option("--node-filter", c.node_filter, "Node list restricting the graph")
      ->check(CLI::ExistingFile);
  centrality->add_flag("--unit-lengths", c.unit_lengths, "Unit edge lengths for path-based measures");

  auto* correlate = app.add_subcommand("correlate", "Spearman correlation of centralities with a ranking");
  add_common(correlate, false);
  add_snapshots(correlate);
  correlate->add_option("--ranking", c.ranking, "Ranking file")->required()->check(CLI::ExistingFile);
  correlate->add_option("--node-filter", c.node_filter, "Node list (default: ranked nodes)")
      ->check(CLI::ExistingFile);
  correlate->add_flag("--unit-lengths", c.unit_lengths, "Unit edge lengths for path-based measures");

  auto* mod = app.add_subcommand("modularity", "Directed weighted modularity of a partition");
  add_common(mod, false);
  add_snapshots(mod);
  mod->add_option("--partition", c.partition, "Partition file")->required()->check(CLI::ExistingFile);
  mod->add_option("--node-filter", c.node_filter, "Node list restricting the graph")->check(CLI::ExistingFile);

  auto* density = app.add_subcommand("density", "Internal link density of partition groups");
  add_common(density, false);
  add_snapshots(density);
  density->add_option("--partition", c.partition, "Partition file")->required()->check(CLI::ExistingFile);
  density->add_option("--group", c.group, "Only this group");

  auto* gravity = app.add_subcommand("gravity", "Distance decay of normalized link strength");
  add_common(gravity, false);
  add_snapshots(gravity);
  gravity->add_option("--geo", c.geo, "Geo file")->required()->check(CLI::ExistingFile);
  gravity->add_option("--node-filter", c.node_filter, "Node list (default: geo nodes)")->check(CLI::ExistingFile);
  gravity->add_option("--window", c.window, "Moving-average window")->capture_default_str()->check(CLI::PositiveNumber);
  gravity->add_option("--d-min-km", c.d_min_km, "Lower distance bound")->capture_default_str();
  gravity->add_option("--d-max-km", c.d_max_km, "Upper distance bound (default: none)");
  gravity->add_flag("--fit-raw", c.fit_raw, "Fit unsmoothed pairs instead of the moving average");
  gravity->add_option("--symmetrize", c.symmetrize, "none | mean")
      ->check(CLI::IsMember({"none", "mean"}))
      ->capture_default_str();

  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic snapshots with planted structure");
  synth_cmd->add_option("kind", c.synth_kind, "gravity | partition")
      ->required()
      ->check(CLI::IsMember({"gravity", "partition"}));
  synth_cmd->add_option("--out-dir", c.common.out_dir, "Output directory");
  synth_cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--nodes", c.nodes, "Number of nodes")->capture_default_str();
  synth_cmd->add_option("--exponent", c.exponent, "Planted gravity exponent")->capture_default_str();
  synth_cmd->add_option("--noise", c.noise, "Lognormal noise scale")->capture_default_str();
  synth_cmd->add_option("--layout", c.layout, "sphere | box")
      ->check(CLI::IsMember({"sphere", "box"}))
      ->capture_default_str();
  synth_cmd->add_option("--groups", c.groups, "Planted groups")->capture_default_str();
  synth_cmd->add_option("--p-intra", c.p_intra, "Within-group link probability")->capture_default_str();
  synth_cmd->add_option("--p-inter", c.p_inter, "Cross-group link probability")->capture_default_str();
  synth_cmd->add_option("--year", c.synth_year, "Snapshot year")->capture_default_str();

  auto* exp = app.add_subcommand("export", "GraphML export for network-diagram tools");
  add_common(exp, true);
  add_snapshots(exp);
  exp->add_option("--format", c.format, "graphml")->check(CLI::IsMember({"graphml"}))->capture_default_str();
  exp->add_option("--partition", c.partition, "Partition file for node groups")->check(CLI::ExistingFile);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream tmp_out, tmp_err;
    app.exit(e, tmp_out, tmp_err);
    err << tmp_err.str() << tmp_out.str();
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(c, out);
    if (stats->parsed()) return cmd_stats(c, out);
    if (centrality->parsed()) return cmd_centrality(c, out);
    if (correlate->parsed()) return cmd_correlate(c, out);
    if (mod->parsed()) return cmd_modularity(c, out);
    if (density->parsed()) return cmd_density(c, out);
    if (gravity->parsed()) return cmd_gravity(c, out);
    if (synth_cmd->parsed()) return cmd_synth(c, out);
    if (exp->parsed()) return cmd_export(c, out);
  } catch (const Error& e) {
    err << "chronoscope: error code=" << to_string(e.code()) << " message=" << single_line(e.what()) << '\n';
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "chronoscope: error code=Internal message=" << single_line(e.what()) << '\n';
    return kExitDataError;
  }
  return kExitUsage;
}

}  // namespace chronoscope
