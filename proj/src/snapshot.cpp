#include "chronoscope/snapshot.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <tuple>
#include <sstream>

#include "chronoscope/error.hpp"
#include "chronoscope/text.hpp"

namespace chronoscope {

YearSnapshot::YearSnapshot(int year, std::vector<Edge> edges, NodePages node_pages)
    : year_(year), edges_(std::move(edges)), node_pages_(std::move(node_pages)) {
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.source, a.target) < std::tie(b.source, b.target);
  });
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    if (e.source.empty() || e.target.empty()) {
      throw Error(ErrorCode::InvalidSnapshot, "edge with empty endpoint");
    }
    if (e.source == e.target) throw Error(ErrorCode::InvalidSnapshot, "self-loop on " + e.source);
    if (e.weight == 0) {
      throw Error(ErrorCode::InvalidSnapshot, "zero weight on " + e.source + " -> " + e.target);
    }
    if (i > 0 && edges_[i - 1].source == e.source && edges_[i - 1].target == e.target) {
      throw Error(ErrorCode::InvalidSnapshot, "duplicate edge " + e.source + " -> " + e.target);
    }
  }
}

std::vector<std::string> YearSnapshot::nodes() const {
  std::set<std::string> all;
  for (const auto& e : edges_) {
    all.insert(e.source);
    all.insert(e.target);
  }
  for (const auto& [name, pages] : node_pages_) all.insert(name);
  return {all.begin(), all.end()};
}

std::uint64_t YearSnapshot::total_weight() const noexcept {
  std::uint64_t total = 0;
  for (const auto& e : edges_) total += e.weight;
  return total;
}

YearSnapshot YearSnapshot::with_node_pages(NodePages pages) const {
  YearSnapshot copy = *this;
  copy.node_pages_ = std::move(pages);
  return copy;
}

YearSnapshot YearSnapshot::scaled(std::uint64_t factor) const {
  if (factor == 0) throw Error(ErrorCode::InvalidArgument, "scale factor must be positive");
  YearSnapshot copy = *this;
  for (auto& e : copy.edges_) e.weight *= factor;
  return copy;
}

YearSnapshot merge_snapshots(const YearSnapshot& a, const YearSnapshot& b) {
  if (a.year() != b.year()) {
    throw Error(ErrorCode::InvalidArgument, "cannot merge snapshots of different years");
  }
  std::vector<Edge> merged;
  merged.reserve(a.edges().size() + b.edges().size());
  auto ia = a.edges().begin();
  auto ib = b.edges().begin();
  auto less = [](const Edge& x, const Edge& y) {
    return std::tie(x.source, x.target) < std::tie(y.source, y.target);
  };
  while (ia != a.edges().end() || ib != b.edges().end()) {
    if (ib == b.edges().end() || (ia != a.edges().end() && less(*ia, *ib))) {
      merged.push_back(*ia++);
    } else if (ia == a.edges().end() || less(*ib, *ia)) {
      merged.push_back(*ib++);
    } else {
      merged.push_back(Edge{ia->source, ia->target, std::max(ia->weight, ib->weight)});
      ++ia;
      ++ib;
    }
  }
  NodePages pages = a.node_pages();
  for (const auto& [name, count] : b.node_pages()) {
    auto& slot = pages[name];
    slot = std::max(slot, count);
  }
  return YearSnapshot(a.year(), std::move(merged), std::move(pages));
}

void write_snapshot(std::ostream& out, const YearSnapshot& snapshot) {
  out << "#snapshot v1 year=" << snapshot.year() << '\n';
  for (const auto& e : snapshot.edges()) {
    out << e.source << '\t' << e.target << '\t' << e.weight << '\n';
  }
}

std::string snapshot_to_string(const YearSnapshot& snapshot) {
  std::ostringstream out;
  write_snapshot(out, snapshot);
  return out.str();
}

YearSnapshot read_snapshot(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::FormatVersion, "missing snapshot header");
  constexpr std::string_view kPrefix = "#snapshot ";
  std::string_view header = line;
  if (header.ends_with('\r')) header.remove_suffix(1);
  if (!header.starts_with(kPrefix)) {
    throw Error(ErrorCode::FormatVersion, "not a snapshot file: '" + line + "'");
  }
  header.remove_prefix(kPrefix.size());
  if (!header.starts_with("v1 ")) {
    throw Error(ErrorCode::FormatVersion, "unsupported snapshot version: '" + line + "'");
  }
  header.remove_prefix(3);
  if (!header.starts_with("year=")) throw Error(ErrorCode::FormatVersion, "header lacks year");
  auto year = text::parse_int<int>(header.substr(5));
  if (!year) throw Error(ErrorCode::FormatVersion, "bad year in header: '" + line + "'");

  std::vector<Edge> edges;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = text::split_tabs(line);
    std::optional<std::uint64_t> weight;
    if (fields.size() == 3) weight = text::parse_int<std::uint64_t>(fields[2]);
    if (!weight) {
      throw Error(ErrorCode::InvalidSnapshot,
                  "bad snapshot line " + std::to_string(line_no) + ": '" + line + "'");
    }
    edges.push_back(Edge{std::string(fields[0]), std::string(fields[1]), *weight});
  }
  return YearSnapshot(*year, std::move(edges));
}

YearSnapshot snapshot_from_string(const std::string& text) {
  std::istringstream in(text);
  return read_snapshot(in);
}

void write_snapshot_file(const std::filesystem::path& path, const YearSnapshot& snapshot) {
  text::write_file(path, snapshot_to_string(snapshot));
}

YearSnapshot read_snapshot_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open snapshot " + path.string());
  return read_snapshot(in);
}

YearSnapshot snapshot_roundtrip(const YearSnapshot& snapshot) {
  return snapshot_from_string(snapshot_to_string(snapshot)).with_node_pages(snapshot.node_pages());
}

std::map<int, NodePages> read_node_pages(std::istream& in) {
  std::map<int, NodePages> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::is_comment_or_blank(line)) continue;
    auto fields = text::split_tabs(line);
    std::optional<int> year;
    std::optional<std::uint64_t> pages;
    if (fields.size() == 3) {
      year = text::parse_int<int>(fields[0]);
      pages = text::parse_int<std::uint64_t>(fields[2]);
    }
    if (!year || !pages || fields[1].empty()) {
      throw Error(ErrorCode::MalformedLine,
                  "bad node-pages line " + std::to_string(line_no) + ": '" + line + "'");
    }
    out[*year][std::string(fields[1])] = *pages;
  }
  return out;
}

std::map<int, NodePages> read_node_pages_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open node-pages file " + path.string());
  return read_node_pages(in);
}

void write_node_pages(std::ostream& out, int year, const NodePages& pages) {
  for (const auto& [name, count] : pages) out << year << '\t' << name << '\t' << count << '\n';
}

}  // namespace chronoscope
