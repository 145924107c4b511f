#include "chronoscope/ingest.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>
#include <tuple>
#include <utility>

#include "chronoscope/text.hpp"

namespace chronoscope {
namespace {

struct SplitLine {
  bool ok = false;
  std::int64_t time = 0;
  std::string_view source;
  std::string_view target;
};

SplitLine split_link_line(std::string_view line) {
  SplitLine out;
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  auto t1 = line.find('\t');
  if (t1 == std::string_view::npos) return out;
  auto t2 = line.find('\t', t1 + 1);
  if (t2 == std::string_view::npos || line.find('\t', t2 + 1) != std::string_view::npos) return out;
  auto time = text::parse_int<std::int64_t>(line.substr(0, t1));
  if (!time || *time < 0) return out;
  out.ok = true;
  out.time = *time;
  out.source = line.substr(t1 + 1, t2 - t1 - 1);
  out.target = line.substr(t2 + 1);
  return out;
}

bool better_session(const Session& a, const Session& b) {
  auto ta = a.total_weight();
  auto tb = b.total_weight();
  if (ta != tb) return ta > tb;
  return std::tie(a.start_time, a.end_time) < std::tie(b.start_time, b.end_time);
}

}  // namespace

std::uint64_t Session::total_weight() const noexcept {
  std::uint64_t total = 0;
  for (const auto& [target, w] : edge_weights) total += w;
  return total;
}

YearSelect parse_year_select(std::string_view name) {
  if (name == "per-pair-max") return YearSelect::PerPairMax;
  if (name == "best-session") return YearSelect::BestSession;
  throw Error(ErrorCode::InvalidArgument, "unknown year-select mode '" + std::string(name) + "'");
}

std::string_view to_string(YearSelect mode) noexcept {
  return mode == YearSelect::PerPairMax ? "per-pair-max" : "best-session";
}

int utc_year(std::int64_t unix_seconds) {
  using namespace std::chrono;
  const sys_days day = floor<days>(sys_seconds{seconds{unix_seconds}});
  return static_cast<int>(year_month_day{day}.year());
}

LinkRecord parse_link_line(std::string_view line, const SuffixPolicy& policy) {
  auto split = split_link_line(line);
  if (!split.ok) throw Error(ErrorCode::MalformedLine, "malformed link line: '" + std::string(line) + "'");
  LinkRecord rec{split.time, parse_domain_key(split.source, policy),
                 parse_domain_key(split.target, policy)};
  if (rec.source.third_level == rec.target.third_level) {
    throw Error(ErrorCode::SelfLoop, "self-loop on " + rec.source.third_level);
  }
  return rec;
}

std::vector<std::size_t> session_starts(std::span<const std::int64_t> times,
                                        std::int64_t gap_seconds) {
  if (gap_seconds <= 0) throw Error(ErrorCode::InvalidArgument, "gap_seconds must be positive");
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i == 0) {
      starts.push_back(0);
      continue;
    }
    if (times[i] < times[i - 1]) {
      throw Error(ErrorCode::UnsortedInput, "crawl times decrease at index " + std::to_string(i));
    }
    if (times[i] - times[i - 1] > gap_seconds) starts.push_back(i);
  }
  return starts;
}

std::vector<Session> sessionize(std::span<const LinkRecord> records, std::int64_t gap_seconds) {
  std::vector<std::int64_t> times;
  times.reserve(records.size());
  for (const auto& r : records) {
    if (r.source.third_level != records.front().source.third_level) {
      throw Error(ErrorCode::InvalidArgument, "sessionize expects records of a single source domain");
    }
    times.push_back(r.crawl_time);
  }
  auto starts = session_starts(times, gap_seconds);
  std::vector<Session> sessions;
  sessions.reserve(starts.size());
  for (std::size_t s = 0; s < starts.size(); ++s) {
    std::size_t begin = starts[s];
    std::size_t end = s + 1 < starts.size() ? starts[s + 1] : records.size();
    Session session;
    session.source_domain = records[begin].source.third_level;
    session.start_time = records[begin].crawl_time;
    session.end_time = records[end - 1].crawl_time;
    for (std::size_t i = begin; i < end; ++i) ++session.edge_weights[records[i].target.third_level];
    sessions.push_back(std::move(session));
  }
  return sessions;
}

YearSnapshot select_year_snapshot(int year, std::span<const Session> sessions, YearSelect mode) {
  for (const auto& s : sessions) {
    if (utc_year(s.start_time) != year) {
      throw Error(ErrorCode::InvalidArgument, "session starting at " + std::to_string(s.start_time) +
                                                  " is not in year " + std::to_string(year));
    }
  }
  std::map<std::pair<std::string, std::string>, std::uint64_t> best;
  if (mode == YearSelect::PerPairMax) {
    for (const auto& s : sessions) {
      for (const auto& [target, w] : s.edge_weights) {
        auto& slot = best[{s.source_domain, target}];
        slot = std::max(slot, w);
      }
    }
  } else {
    std::map<std::string, const Session*> chosen;
    for (const auto& s : sessions) {
      auto [it, inserted] = chosen.try_emplace(s.source_domain, &s);
      if (!inserted && better_session(s, *it->second)) it->second = &s;
    }
    for (const auto& [source, s] : chosen) {
      for (const auto& [target, w] : s->edge_weights) best[{source, target}] = w;
    }
  }
  std::vector<Edge> edges;
  edges.reserve(best.size());
  for (const auto& [pair, w] : best) edges.push_back(Edge{pair.first, pair.second, w});
  return YearSnapshot(year, std::move(edges));
}

void IngestSummary::merge(const IngestSummary& o) noexcept {
  lines += o.lines;
  records += o.records;
  blank_lines += o.blank_lines;
  malformed_lines += o.malformed_lines;
  malformed_urls += o.malformed_urls;
  out_of_scope += o.out_of_scope;
  unknown_sld += o.unknown_sld;
  self_loops += o.self_loops;
  sessions += o.sessions;
}

std::string IngestSummary::to_csv() const {
  std::ostringstream out;
  out << "key,value\n"
      << "lines," << lines << '\n'
      << "records," << records << '\n'
      << "blank_lines," << blank_lines << '\n'
      << "malformed_lines," << malformed_lines << '\n'
      << "malformed_urls," << malformed_urls << '\n'
      << "out_of_scope," << out_of_scope << '\n'
      << "unknown_sld," << unknown_sld << '\n'
      << "self_loops," << self_loops << '\n'
      << "skipped," << skipped() << '\n'
      << "sessions," << sessions << '\n';
  return out.str();
}

IngestAccumulator::IngestAccumulator(SuffixPolicy policy, IngestOptions options)
    : policy_(std::move(policy)), options_(options) {
  if (options_.gap_seconds <= 0) throw Error(ErrorCode::InvalidArgument, "gap_seconds must be positive");
}

std::uint32_t IngestAccumulator::intern(std::string_view name) {
  if (auto it = ids_.find(name); it != ids_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

void IngestAccumulator::reject(ErrorCode code, std::string_view line) {
  switch (code) {
    case ErrorCode::MalformedLine: ++summary_.malformed_lines; break;
    case ErrorCode::OutOfScopeTld: ++summary_.out_of_scope; break;
    case ErrorCode::UnknownSld: ++summary_.unknown_sld; break;
    case ErrorCode::SelfLoop: ++summary_.self_loops; return;
    default: ++summary_.malformed_urls; break;
  }
  if (options_.strict) {
    throw Error(code, std::string(to_string(code)) + " at input line " +
                          std::to_string(summary_.lines) + ": '" + std::string(line) + "'");
  }
}

void IngestAccumulator::add_line(std::string_view line) {
  ++summary_.lines;
  if (line.empty() || line == "\r") {
    ++summary_.blank_lines;
    return;
  }
  auto split = split_link_line(line);
  if (!split.ok) return reject(ErrorCode::MalformedLine, line);
  auto src = resolve_url(split.source, policy_, scratch_source_);
  if (!src.ok) return reject(src.error, line);
  auto dst = resolve_url(split.target, policy_, scratch_target_);
  if (!dst.ok) return reject(dst.error, line);
  if (src.third_level == dst.third_level) return reject(ErrorCode::SelfLoop, line);
  records_.push_back(Record{split.time, intern(src.third_level), intern(dst.third_level)});
  ++summary_.records;
}

void IngestAccumulator::add_text(std::string_view text) {
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    add_line(text.substr(start, nl - start));
    start = nl + 1;
  }
}

void IngestAccumulator::add_file(const std::filesystem::path& path) {
  text::for_each_line(path, [this](std::string_view line, std::size_t) { add_line(line); });
}

void IngestAccumulator::merge(const IngestAccumulator& other) {
  if (&other == this) return;
  std::vector<std::uint32_t> remap(other.names_.size());
  for (std::size_t i = 0; i < other.names_.size(); ++i) remap[i] = intern(other.names_[i]);
  records_.reserve(records_.size() + other.records_.size());
  for (const auto& r : other.records_) {
    records_.push_back(Record{r.time, remap[r.source], remap[r.target]});
  }
  summary_.merge(other.summary_);
}

std::map<int, YearSnapshot> IngestAccumulator::build() {
  std::sort(records_.begin(), records_.end(), [](const Record& a, const Record& b) {
    return std::tie(a.source, a.time, a.target) < std::tie(b.source, b.time, b.target);
  });

  using PairKey = std::uint64_t;
  auto pair_key = [](std::uint32_t s, std::uint32_t t) { return (PairKey{s} << 32) | t; };
  // year -> pair -> weight
  std::map<int, std::unordered_map<PairKey, std::uint64_t>> per_year;
  struct Best {
    std::uint64_t total = 0;
    std::vector<std::pair<std::uint32_t, std::uint64_t>> weights;
  };
  // (year, source) -> heaviest session
  std::map<std::pair<int, std::uint32_t>, Best> best_sessions;

  summary_.sessions = 0;
  std::vector<std::int64_t> times;
  std::vector<std::uint32_t> targets;
  std::vector<std::pair<std::uint32_t, std::uint64_t>> counts;
  std::size_t group_begin = 0;
  while (group_begin < records_.size()) {
    const auto source = records_[group_begin].source;
    std::size_t group_end = group_begin;
    times.clear();
    while (group_end < records_.size() && records_[group_end].source == source) {
      times.push_back(records_[group_end].time);
      ++group_end;
    }
    auto starts = session_starts(times, options_.gap_seconds);
    summary_.sessions += starts.size();
    for (std::size_t s = 0; s < starts.size(); ++s) {
      std::size_t begin = group_begin + starts[s];
      std::size_t end = s + 1 < starts.size() ? group_begin + starts[s + 1] : group_end;
      targets.clear();
      for (std::size_t i = begin; i < end; ++i) targets.push_back(records_[i].target);
      std::sort(targets.begin(), targets.end());
      counts.clear();
      for (auto t : targets) {
        if (!counts.empty() && counts.back().first == t) {
          ++counts.back().second;
        } else {
          counts.emplace_back(t, 1);
        }
      }
      const int year = utc_year(records_[begin].time);
      if (options_.year_select == YearSelect::PerPairMax) {
        auto& pairs = per_year[year];
        for (auto [t, w] : counts) {
          auto& slot = pairs[pair_key(source, t)];
          slot = std::max(slot, w);
        }
      } else {
        const auto total = static_cast<std::uint64_t>(end - begin);
        auto [it, inserted] = best_sessions.try_emplace({year, source});
        // Sessions arrive in time order, so ties keep the earliest one.
        if (inserted || total > it->second.total) {
          it->second = Best{total, counts};
        }
      }
    }
    group_begin = group_end;
  }

  if (options_.year_select == YearSelect::BestSession) {
    for (const auto& [key, best] : best_sessions) {
      auto& pairs = per_year[key.first];
      for (auto [t, w] : best.weights) pairs[pair_key(key.second, t)] = w;
    }
  }

  std::map<int, YearSnapshot> out;
  for (const auto& [year, pairs] : per_year) {
    std::vector<Edge> edges;
    edges.reserve(pairs.size());
    for (const auto& [key, w] : pairs) {
      edges.push_back(Edge{names_[key >> 32], names_[key & 0xffffffffu], w});
    }
    out.emplace(year, YearSnapshot(year, std::move(edges)));
  }
  return out;
}

}  // namespace chronoscope
