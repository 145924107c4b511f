#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "chronoscope/cli.hpp"
#include "chronoscope/snapshot.hpp"
#include "chronoscope/text.hpp"
#include "test_util.hpp"

using namespace chronoscope;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "chronoscope");
  std::ostringstream out, err;
  const int status = run_cli(args, out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) { return text::read_file(p); }

std::vector<std::string> csv_row(const std::string& csv, std::size_t row) {
  std::istringstream in(csv);
  std::string line;
  for (std::size_t i = 0; i <= row; ++i) std::getline(in, line);
  std::vector<std::string> cells;
  std::istringstream cell_in(line);
  for (std::string cell; std::getline(cell_in, cell, ',');) cells.push_back(cell);
  return cells;
}

}  // namespace

TEST_CASE("cli: ingest on a small link file") {
  TempDir dir;
  std::ofstream(dir / "links.tsv") << "850003200\thttp://ox.ac.uk/a\thttp://cam.ac.uk/b\n"
                                      "850003300\thttp://ox.ac.uk/a\thttp://ox.ac.uk/b\n"
                                      "850003400\thttp://www.cam.ac.uk/\thttp://fco.gov.uk/\n"
                                      "850003500\thttp://cam.ac.uk/x\thttp://cam.ac.uk/y\n";
  auto r = run({"ingest", (dir / "links.tsv").string(), "--out-dir", (dir / "out").string()});
  CHECK(r.status == kExitOk);
  CHECK(r.out.find("self_loops=2") != std::string::npos);
  auto snap = read_snapshot_file(dir / "out" / "snapshot_1996.tsv");
  CHECK(snap.edges().size() == 2);
  CHECK(slurp(dir / "out" / "ingest_summary.csv").find("self_loops,2\n") != std::string::npos);

  // --strict ignores self-loops but fails on anything else.
  std::ofstream(dir / "bad.tsv") << "850003200\thttp://ox.ac.uk/a\thttp://example.com/\n";
  auto strict = run({"ingest", (dir / "bad.tsv").string(), "--strict", "--out-dir", (dir / "s").string()});
  CHECK(strict.status == kExitDataError);
  CHECK(strict.err.starts_with("chronoscope: error code=OutOfScopeTld message="));
  CHECK(std::count(strict.err.begin(), strict.err.end(), '\n') == 1);
  CHECK(run({"ingest", (dir / "bad.tsv").string(), "--out-dir", (dir / "s").string()}).status == kExitOk);
}

TEST_CASE("cli: sharded ingest matches a single file") {
  TempDir dir;
  std::string all;
  std::vector<std::string> shards(3);
  for (int i = 0; i < 600; ++i) {
    const std::string line = std::to_string(900000000 + (i * 37) % 5000) + "\thttp://s" + std::to_string(i % 5) +
                             ".ac.uk/\thttp://t" + std::to_string(i % 7) + ".co.uk/\n";
    all += line;
    shards[static_cast<std::size_t>(i * 7 % 3)] += line;
  }
  text::write_file(dir / "all.tsv", all);
  for (std::size_t k = 0; k < 3; ++k) text::write_file(dir / ("s" + std::to_string(k) + ".tsv"), shards[k]);
  REQUIRE(run({"ingest", (dir / "all.tsv").string(), "--out-dir", (dir / "a").string()}).status == 0);
  REQUIRE(run({"ingest", (dir / "s2.tsv").string(), (dir / "s0.tsv").string(), (dir / "s1.tsv").string(),
               "--jobs", "3", "--out-dir", (dir / "b").string()})
              .status == 0);
  CHECK(slurp(dir / "a" / "snapshot_1998.tsv") == slurp(dir / "b" / "snapshot_1998.tsv"));
}

TEST_CASE("cli: stats on an empty snapshot writes header-only csvs") {
  TempDir dir;
  write_snapshot_file(dir / "snapshot_2000.tsv", YearSnapshot(2000, {}));
  auto r = run({"stats", (dir / "snapshot_2000.tsv").string(), "--out-dir", dir.path().string()});
  CHECK(r.status == kExitOk);
  CHECK(slurp(dir / "sld_series.csv") == "year,sld,node_count,share\n");
  CHECK(slurp(dir / "within_sld.csv") == "year,sld,node_count,links_per_node\n");
  CHECK(slurp(dir / "flows_2000.csv") == "source_sld,target_sld,absolute,normalized\n");
}

TEST_CASE("cli: gravity on synthetic output recovers the planted exponent") {
  TempDir dir;
  auto s = run({"synth", "gravity", "--seed", "3", "--exponent", "0.3", "--out-dir", dir.path().string()});
  REQUIRE(s.status == kExitOk);
  auto g = run({"gravity", (dir / "snapshot_2010.tsv").string(), "--geo", (dir / "geo.tsv").string(),
                "--out-dir", dir.path().string()});
  REQUIRE(g.status == kExitOk);
  const auto fit = slurp(dir / "gravity_fit_2010.csv");
  CHECK(csv_row(fit, 0) == std::vector<std::string>{"a", "std_error", "n_points", "window", "d_min", "d_max",
                                                    "intercept", "rss", "fit_input"});
  const double a = std::stod(csv_row(fit, 1)[0]);
  CHECK(a >= 0.25);
  CHECK(a <= 0.35);
  CHECK(csv_row(fit, 1)[3] == "500");
  CHECK(csv_row(fit, 1)[4] == "20");
  CHECK(slurp(dir / "gravity_series_2010.csv").starts_with("mean_d_km,mean_sigma\n"));
  CHECK(slurp(dir / "geo_links_2010.csv").starts_with("source,target,source_lat"));
}

TEST_CASE("cli: every analysis command accepts synth output and is reproducible") {
  TempDir dir;
  const auto d = dir.path().string();
  REQUIRE(run({"synth", "partition", "--seed", "4", "--nodes", "30", "--p-intra", "0.4", "--p-inter", "0.05",
               "--noise", "0.5", "--out-dir", d})
              .status == 0);
  const auto snap = (dir / "snapshot_2010.tsv").string();
  const auto part = (dir / "partition.tsv").string();
  {
    std::ofstream rank(dir / "ranking.tsv");
    for (int i = 1; i <= 30; ++i) {
      auto digits = std::to_string(i);
      rank << "u" << std::string(4 - digits.size(), '0') << digits << ".ac.uk\t" << i << '\n';
    }
  }
  const std::vector<std::vector<std::string>> commands = {
      {"stats", snap, "--distinct"},
      {"stats", snap, "--include-self"},
      {"centrality", snap},
      {"centrality", snap, "--unit-lengths"},
      {"correlate", snap, "--ranking", (dir / "ranking.tsv").string()},
      {"modularity", snap, "--partition", part},
      {"density", snap, "--partition", part},
      {"density", snap, "--partition", part, "--group", "g1"},
      {"export", snap, "--partition", part},
  };
  for (const auto& cmd : commands) {
    auto first_args = cmd;
    first_args.insert(first_args.end(), {"--out-dir", d + "/one"});
    auto second_args = cmd;
    second_args.insert(second_args.end(), {"--out-dir", d + "/two"});
    auto first = run(first_args);
    INFO(cmd[0] << ": " << first.err);
    CHECK(first.status == kExitOk);
    CHECK(run(second_args).status == kExitOk);
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir / "one")) {
    CHECK(slurp(entry.path()) == slurp(dir / "two" / entry.path().filename()));
  }
  CHECK(std::filesystem::exists(dir / "one" / "graph_2010.graphml"));
  const auto mod = slurp(dir / "one" / "modularity_2010.csv");
  CHECK(mod.starts_with("group,internal_weight,expected_weight,q_contribution\n"));
  CHECK(std::stod(csv_row(mod, 3)[3]) > 0.2);
  CHECK(csv_row(slurp(dir / "one" / "centrality_2010.csv"), 0).size() == 11);
  CHECK(slurp(dir / "one" / "correlations_2010.csv").starts_with("measure,rho,n_overlap\n"));

  // Synth itself is byte-reproducible.
  REQUIRE(run({"synth", "partition", "--seed", "4", "--nodes", "30", "--p-intra", "0.4", "--p-inter", "0.05",
               "--noise", "0.5", "--out-dir", d + "/again"})
              .status == 0);
  CHECK(slurp(dir / "again" / "snapshot_2010.tsv") == slurp(snap));
  CHECK(slurp(dir / "again" / "partition.tsv") == slurp(part));
}

TEST_CASE("cli: exit codes and error lines") {
  TempDir dir;
  CHECK(run({}).status == kExitUsage);
  CHECK(run({"frobnicate"}).status == kExitUsage);
  CHECK(run({"ingest"}).status == kExitUsage);
  CHECK(run({"ingest", (dir / "missing.tsv").string()}).status == kExitUsage);
  CHECK(run({"synth", "tree"}).status == kExitUsage);
  auto help = run({"--help"});
  CHECK(help.status == kExitOk);
  CHECK(help.out.find("gravity") != std::string::npos);

  std::ofstream(dir / "broken.tsv") << "#snapshot v9 year=2000\n";
  auto bad = run({"centrality", (dir / "broken.tsv").string(), "--out-dir", dir.path().string()});
  CHECK(bad.status == kExitDataError);
  CHECK(bad.err.starts_with("chronoscope: error code=FormatVersion message="));
  CHECK(std::count(bad.err.begin(), bad.err.end(), '\n') == 1);

  write_snapshot_file(dir / "snapshot_2000.tsv", YearSnapshot(2000, {}));
  auto year = run({"centrality", (dir / "snapshot_2000.tsv").string(), "--year", "2001"});
  CHECK(year.status == kExitDataError);
  auto empty = run({"centrality", (dir / "snapshot_2000.tsv").string(), "--out-dir", dir.path().string()});
  CHECK(empty.status == kExitDataError);
  CHECK(empty.err.find("code=EmptyFilter") != std::string::npos);

  auto spec = run({"synth", "partition", "--p-intra", "0.1", "--p-inter", "0.5", "--out-dir", dir.path().string()});
  CHECK(spec.status == kExitDataError);
  CHECK(spec.err.find("code=InvalidSpec") != std::string::npos);
}

TEST_CASE("cli: CHRONOSCOPE_OUT is the output fallback") {
  TempDir dir;
  const auto target = dir / "from_env";
  ::setenv("CHRONOSCOPE_OUT", target.string().c_str(), 1);
  auto r = run({"synth", "partition", "--nodes", "10"});
  ::unsetenv("CHRONOSCOPE_OUT");
  CHECK(r.status == kExitOk);
  CHECK(std::filesystem::exists(target / "snapshot_2010.tsv"));
}
