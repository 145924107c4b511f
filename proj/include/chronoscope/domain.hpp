#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>

#include "chronoscope/error.hpp"

namespace chronoscope {

// Label used for SLDs outside the registered set (treat-as-2-level keys and
// statistics rows for unregistered suffixes).
inline constexpr std::string_view kOtherSld = "other";

enum class UnknownSldMode { Reject, TreatAsTwoLevel };

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

using StringSet = std::unordered_set<std::string, StringHash, std::equal_to<>>;

class SuffixPolicy {
 public:
  // Labels are lowercased; throws InvalidPolicy when an SLD is not directly
  // or transitively under the ccTLD, duplicates collide, or the set is empty.
  SuffixPolicy(std::string cctld, const std::vector<std::string>& slds,
               UnknownSldMode unknown = UnknownSldMode::Reject);

  const std::string& cctld() const noexcept { return cctld_; }
  const std::set<std::string>& registered_slds() const noexcept { return sorted_; }
  UnknownSldMode unknown_mode() const noexcept { return unknown_; }
  std::size_t max_sld_labels() const noexcept { return max_labels_; }

  bool is_registered(std::string_view sld) const { return lookup_.find(sld) != lookup_.end(); }

  SuffixPolicy with_unknown_mode(UnknownSldMode mode) const;

 private:
  std::string cctld_;
  std::set<std::string> sorted_;
  StringSet lookup_;
  UnknownSldMode unknown_;
  std::size_t max_labels_ = 2;
};

/// ".uk" with ac.uk, co.uk, gov.uk, org.uk; unknown SLDs rejected.
SuffixPolicy default_suffix_policy();

/// One SLD per line, '#' starts a comment, first non-comment line is the ccTLD.
SuffixPolicy parse_suffix_policy(std::string_view text,
                                 UnknownSldMode unknown = UnknownSldMode::Reject);
SuffixPolicy load_suffix_policy(const std::filesystem::path& path,
                                UnknownSldMode unknown = UnknownSldMode::Reject);

struct DomainKey {
  std::string tld;
  std::string sld;
  std::string third_level;

  friend bool operator==(const DomainKey&, const DomainKey&) = default;
};

// Non-throwing resolution used on the ingest hot path. On success the views
// point into `scratch`, which must outlive them.
struct HostResolution {
  bool ok = false;
  ErrorCode error = ErrorCode::MalformedUrl;
  std::string_view third_level;
  std::string_view sld;
};

HostResolution resolve_url(std::string_view url, const SuffixPolicy& policy,
                           std::string& scratch);

/// Extracts the hostname part of an absolute URL ("scheme://[user@]host[:port]...").
/// Returns an empty view when no hostname is present.
std::string_view url_host(std::string_view url) noexcept;

DomainKey parse_domain_key(std::string_view url, const SuffixPolicy& policy);

/// Registered SLD of the key, or kOtherSld for treat-as-2-level keys.
std::string classify_sld(const DomainKey& key, const SuffixPolicy& policy);

/// SLD of a bare third-level domain name as stored in snapshots.
std::string_view sld_of_domain(std::string_view third_level, const SuffixPolicy& policy);

/// "http://" + third_level + "/"; parsing it yields the same key.
std::string canonical_url(const DomainKey& key);

}  // namespace chronoscope
