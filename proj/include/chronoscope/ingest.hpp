#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chronoscope/domain.hpp"
#include "chronoscope/snapshot.hpp"

namespace chronoscope {

inline constexpr std::int64_t kDefaultGapSeconds = 1000;

struct LinkRecord {
  std::int64_t crawl_time = 0;
  DomainKey source;
  DomainKey target;

  friend bool operator==(const LinkRecord&, const LinkRecord&) = default;
};

struct Session {
  std::string source_domain;
  std::int64_t start_time = 0;
  std::int64_t end_time = 0;
  std::map<std::string, std::uint64_t> edge_weights;

  std::uint64_t total_weight() const noexcept;
  friend bool operator==(const Session&, const Session&) = default;
};

enum class YearSelect {
  PerPairMax,   // each (source, target) pair takes its largest weight over the year
  BestSession,  // each source keeps only its heaviest session of the year
};

YearSelect parse_year_select(std::string_view name);
std::string_view to_string(YearSelect mode) noexcept;

/// UTC calendar year of a unix timestamp.
int utc_year(std::int64_t unix_seconds);

/// Parses "crawl_time\tsource_url\ttarget_url". Throws MalformedLine, the
/// domain parse errors, or SelfLoop when both ends share a third-level domain.
LinkRecord parse_link_line(std::string_view line, const SuffixPolicy& policy);

/// Chained grouping of one source's time-sorted records. A new session starts
/// when the gap to the previous record exceeds `gap_seconds`.
std::vector<Session> sessionize(std::span<const LinkRecord> records,
                                std::int64_t gap_seconds = kDefaultGapSeconds);

/// Indices where sessions start, for any ascending timestamp sequence.
/// Throws UnsortedInput on a decrease.
std::vector<std::size_t> session_starts(std::span<const std::int64_t> times,
                                        std::int64_t gap_seconds);

/// Combines the sessions of one calendar year into a snapshot.
YearSnapshot select_year_snapshot(int year, std::span<const Session> sessions,
                                  YearSelect mode = YearSelect::PerPairMax);

struct IngestSummary {
  std::uint64_t lines = 0;
  std::uint64_t records = 0;
  std::uint64_t blank_lines = 0;
  std::uint64_t malformed_lines = 0;
  std::uint64_t malformed_urls = 0;
  std::uint64_t out_of_scope = 0;
  std::uint64_t unknown_sld = 0;
  std::uint64_t self_loops = 0;
  std::uint64_t sessions = 0;

  std::uint64_t skipped() const noexcept {
    return malformed_lines + malformed_urls + out_of_scope + unknown_sld + self_loops;
  }
  void merge(const IngestSummary& other) noexcept;
  /// "key,value" rows.
  std::string to_csv() const;
};

struct IngestOptions {
  std::int64_t gap_seconds = kDefaultGapSeconds;
  YearSelect year_select = YearSelect::PerPairMax;
  // Any skipped line other than a self-loop becomes fatal.
  bool strict = false;
};

// Streaming accumulator for link lines. Shards may be fed to separate
// accumulators and merged in any order; the resulting snapshots are identical
// to feeding every line to a single accumulator.
class IngestAccumulator {
 public:
  IngestAccumulator(SuffixPolicy policy, IngestOptions options = {});

  void add_line(std::string_view line);
  void add_text(std::string_view text);
  void add_file(const std::filesystem::path& path);
  void merge(const IngestAccumulator& other);

  /// Sessionizes and selects one snapshot per calendar year.
  std::map<int, YearSnapshot> build();

  const IngestSummary& summary() const noexcept { return summary_; }
  std::size_t record_count() const noexcept { return records_.size(); }

 private:
  struct Record {
    std::int64_t time;
    std::uint32_t source;
    std::uint32_t target;
  };

  std::uint32_t intern(std::string_view name);
  void reject(ErrorCode code, std::string_view line);

  SuffixPolicy policy_;
  IngestOptions options_;
  IngestSummary summary_;
  std::unordered_map<std::string, std::uint32_t, StringHash, std::equal_to<>> ids_;
  std::vector<std::string> names_;
  std::vector<Record> records_;
  std::string scratch_source_;
  std::string scratch_target_;
};

}  // namespace chronoscope
