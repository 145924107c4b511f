#include "chronoscope/domain.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <vector>

namespace chronoscope {
namespace {

char ascii_lower(char c) noexcept {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), ascii_lower);
  return out;
}

std::size_t count_labels(std::string_view s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '.')) + 1;
}

bool valid_label_char(char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
}

// Last `n` dot-separated labels of `host`; whole host if it has fewer.
std::string_view last_labels(std::string_view host, std::size_t n) {
  std::size_t end = host.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (end == 0) return host;
    auto dot = host.rfind('.', end - 1);
    if (dot == std::string_view::npos) return host;
    end = dot;
  }
  return host.substr(end + 1);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

SuffixPolicy::SuffixPolicy(std::string cctld, const std::vector<std::string>& slds,
                           UnknownSldMode unknown)
    : cctld_(lowercase(cctld)), unknown_(unknown) {
  if (cctld_.empty() || cctld_.find('.') != std::string::npos) {
    throw Error(ErrorCode::InvalidPolicy, "ccTLD must be a single non-empty label: '" + cctld + "'");
  }
  if (slds.empty()) throw Error(ErrorCode::InvalidPolicy, "policy has no registered SLDs");
  const std::string suffix = "." + cctld_;
  for (const auto& raw : slds) {
    auto sld = lowercase(raw);
    if (sld.size() <= suffix.size() || !sld.ends_with(suffix)) {
      throw Error(ErrorCode::InvalidPolicy, "SLD '" + sld + "' is not under ." + cctld_);
    }
    if (!sorted_.insert(sld).second) {
      throw Error(ErrorCode::InvalidPolicy, "duplicate SLD '" + sld + "'");
    }
    max_labels_ = std::max(max_labels_, count_labels(sld));
    lookup_.insert(std::move(sld));
  }
}

SuffixPolicy SuffixPolicy::with_unknown_mode(UnknownSldMode mode) const {
  SuffixPolicy copy = *this;
  copy.unknown_ = mode;
  return copy;
}

SuffixPolicy default_suffix_policy() {
  return SuffixPolicy("uk", {"ac.uk", "co.uk", "gov.uk", "org.uk"});
}

SuffixPolicy parse_suffix_policy(std::string_view text, UnknownSldMode unknown) {
  std::string cctld;
  std::vector<std::string> slds;
  bool have_tld = false;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    if (!have_tld) {
      cctld = std::string(view);
      have_tld = true;
    } else {
      slds.emplace_back(view);
    }
  }
  if (!have_tld) throw Error(ErrorCode::InvalidPolicy, "policy file names no ccTLD");
  return SuffixPolicy(std::move(cctld), slds, unknown);
}

SuffixPolicy load_suffix_policy(const std::filesystem::path& path, UnknownSldMode unknown) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open policy file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_suffix_policy(buf.str(), unknown);
}

std::string_view url_host(std::string_view url) noexcept {
  auto sep = url.find("://");
  if (sep == std::string_view::npos || sep == 0) return {};
  auto rest = url.substr(sep + 3);
  auto end = rest.find_first_of("/?#");
  auto authority = rest.substr(0, end);
  if (auto at = authority.rfind('@'); at != std::string_view::npos) authority.remove_prefix(at + 1);
  if (!authority.empty() && authority.front() == '[') return {};  // IP literal
  if (auto colon = authority.find(':'); colon != std::string_view::npos) {
    authority = authority.substr(0, colon);
  }
  return authority;
}

HostResolution resolve_url(std::string_view url, const SuffixPolicy& policy, std::string& scratch) {
  HostResolution res;
  auto host = url_host(url);
  if (host.empty()) return res;

  scratch.resize(host.size());
  for (std::size_t i = 0; i < host.size(); ++i) {
    char c = ascii_lower(host[i]);
    if (c != '.' && !valid_label_char(c)) return res;
    scratch[i] = c;
  }
  std::string_view h = scratch;
  if (h.ends_with('.')) h.remove_suffix(1);
  if (h.starts_with("www.")) h.remove_prefix(4);
  if (h.empty() || h.front() == '.' || h.find("..") != std::string_view::npos) return res;

  const auto& tld = policy.cctld();
  if (h.size() <= tld.size() + 1 || !h.ends_with(tld) || h[h.size() - tld.size() - 1] != '.') {
    res.error = h == tld ? ErrorCode::MalformedUrl : ErrorCode::OutOfScopeTld;
    return res;
  }

  for (std::size_t k = policy.max_sld_labels(); k >= 2; --k) {
    auto candidate = last_labels(h, k);
    if (candidate.size() == h.size() && count_labels(h) < k) continue;
    if (!policy.is_registered(candidate)) continue;
    if (candidate.size() == h.size()) return res;  // bare SLD, no registrant label
    res.ok = true;
    res.sld = candidate;
    res.third_level = last_labels(h, k + 1);
    return res;
  }

  if (policy.unknown_mode() == UnknownSldMode::Reject) {
    res.error = ErrorCode::UnknownSld;
    return res;
  }
  res.ok = true;
  res.sld = kOtherSld;
  res.third_level = last_labels(h, 2);
  return res;
}

DomainKey parse_domain_key(std::string_view url, const SuffixPolicy& policy) {
  std::string scratch;
  auto res = resolve_url(url, policy, scratch);
  if (!res.ok) {
    throw Error(res.error, std::string(to_string(res.error)) + ": " + std::string(url));
  }
  return DomainKey{policy.cctld(), std::string(res.sld), std::string(res.third_level)};
}

std::string classify_sld(const DomainKey& key, const SuffixPolicy& policy) {
  return std::string(sld_of_domain(key.third_level, policy));
}

std::string_view sld_of_domain(std::string_view third_level, const SuffixPolicy& policy) {
  for (std::size_t k = policy.max_sld_labels(); k >= 2; --k) {
    auto candidate = last_labels(third_level, k);
    if (candidate.size() == third_level.size()) continue;
    if (policy.is_registered(candidate)) return candidate;
  }
  return kOtherSld;
}

std::string canonical_url(const DomainKey& key) { return "http://" + key.third_level + "/"; }

}  // namespace chronoscope
