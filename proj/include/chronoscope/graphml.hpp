#pragma once

#include <string>

#include "chronoscope/domain.hpp"
#include "chronoscope/metrics.hpp"
#include "chronoscope/snapshot.hpp"

namespace chronoscope {

/// GraphML document for network-diagram tools: node attributes `sld` and
/// `group` (when a partition is given), edge attribute `weight`.
std::string to_graphml(const YearSnapshot& snapshot, const SuffixPolicy& policy,
                       const Partition* partition = nullptr);

}  // namespace chronoscope
