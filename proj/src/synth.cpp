#include "chronoscope/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "chronoscope/error.hpp"

namespace chronoscope::synth {
namespace {

constexpr double kMinLightestWeight = 1000.0;
constexpr double kMaxHeaviestWeight = 1e12;

}  // namespace

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void validate(const SynthSpec& spec) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidSpec, why); };
  if (spec.n_nodes < 2) fail("n_nodes must be at least 2");
  if (!(spec.noise_scale >= 0.0) || !std::isfinite(spec.noise_scale)) fail("noise_scale must be >= 0");
  if (!(spec.planted_exponent >= 0.0) || !std::isfinite(spec.planted_exponent)) {
    fail("planted_exponent must be >= 0");
  }
  if (spec.planted_partition) {
    const auto& p = *spec.planted_partition;
    if (p.groups < 1 || p.groups > spec.n_nodes) fail("group count must be in [1, n_nodes]");
    for (double prob : {p.p_intra, p.p_inter}) {
      if (!(prob >= 0.0 && prob <= 1.0)) fail("link probabilities must lie in [0, 1]");
    }
    if (p.p_intra < p.p_inter) fail("p_intra must not be below p_inter");
  }
}

std::vector<std::string> node_names(std::size_t n) {
  const std::size_t width = std::max<std::size_t>(4, std::to_string(n).size());
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    auto digits = std::to_string(i);
    names.push_back("u" + std::string(width - digits.size(), '0') + digits + ".ac.uk");
  }
  return names;
}

Layout parse_layout(std::string_view name) {
  if (name == "sphere") return Layout::FibonacciSphere;
  if (name == "box") return Layout::UniformBox;
  throw Error(ErrorCode::InvalidArgument, "unknown layout '" + std::string(name) + "'");
}

GeoTable gen_geo_points(std::uint64_t seed, std::size_t n, Layout layout, const BoundingBox& box) {
  Rng rng(seed);
  GeoTable geo;
  const auto names = node_names(n);
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < n; ++i) {
    double lat = 0.0, lon = 0.0;
    if (layout == Layout::FibonacciSphere) {
      const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
      lat = std::asin(z) * 180.0 / std::numbers::pi;
      lon = std::remainder(static_cast<double>(i) * golden_angle * 180.0 / std::numbers::pi, 360.0);
    } else {
      lat = box.lat_min + (box.lat_max - box.lat_min) * rng.uniform();
      lon = box.lon_min + (box.lon_max - box.lon_min) * rng.uniform();
    }
    geo[names[i]] = GeoPoint::checked(lat, lon);
  }
  return geo;
}

YearSnapshot gen_gravity_graph(const SynthSpec& spec, const GeoTable& geo) {
  validate(spec);
  if (geo.size() < spec.n_nodes) {
    throw Error(ErrorCode::InvalidSpec, "geo table has " + std::to_string(geo.size()) +
                                            " points, spec needs " + std::to_string(spec.n_nodes));
  }
  const std::size_t n = spec.n_nodes;
  std::vector<std::string> names;
  std::vector<GeoPoint> points;
  for (const auto& [name, p] : geo) {
    if (names.size() == n) break;
    names.push_back(name);
    points.push_back(p);
  }

  Rng rng(spec.seed);
  std::vector<double> kernel(n * n, 0.0);
  double lightest = std::numeric_limits<double>::infinity();
  double heaviest = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = haversine_km(points[i], points[j]);
      if (!(d > 0.0)) throw Error(ErrorCode::InvalidSpec, names[i] + " and " + names[j] + " coincide");
      const double z = rng.normal();
      const double k = std::pow(d, -spec.planted_exponent) * std::exp(spec.noise_scale * z);
      kernel[i * n + j] = k;
      lightest = std::min(lightest, k);
      heaviest = std::max(heaviest, k);
    }
  }
  double scale = kMinLightestWeight / lightest;
  if (heaviest * scale > kMaxHeaviestWeight) scale = kMaxHeaviestWeight / heaviest;

  std::vector<Edge> edges;
  edges.reserve(n * (n - 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double w = std::round(scale * kernel[i * n + j]);
      if (w >= 1.0) edges.push_back(Edge{names[i], names[j], static_cast<std::uint64_t>(w)});
    }
  }
  return YearSnapshot(spec.year, std::move(edges));
}

Partition planted_partition(const SynthSpec& spec) {
  validate(spec);
  if (!spec.planted_partition) throw Error(ErrorCode::InvalidSpec, "spec has no planted partition");
  const auto groups = spec.planted_partition->groups;
  const auto names = node_names(spec.n_nodes);
  Partition p;
  for (std::size_t i = 0; i < names.size(); ++i) {
    p.labels[names[i]] = "g" + std::to_string(i * groups / names.size());
  }
  return p;
}

YearSnapshot gen_partitioned_graph(const SynthSpec& spec) {
  const auto partition = planted_partition(spec);
  const auto& planted = *spec.planted_partition;
  const auto names = node_names(spec.n_nodes);
  Rng rng(spec.seed);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (i == j) continue;
      const bool same = partition.labels.at(names[i]) == partition.labels.at(names[j]);
      const double u = rng.uniform();
      const double z = rng.normal();
      if (u >= (same ? planted.p_intra : planted.p_inter)) continue;
      const double w = std::max(1.0, std::round(std::exp(spec.noise_scale * z)));
      edges.push_back(Edge{names[i], names[j], static_cast<std::uint64_t>(w)});
    }
  }
  return YearSnapshot(spec.year, std::move(edges));
}

}  // namespace chronoscope::synth
