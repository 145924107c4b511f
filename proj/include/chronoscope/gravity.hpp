#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "chronoscope/snapshot.hpp"

namespace chronoscope {

inline constexpr double kEarthRadiusKm = 6371.0088;

struct GeoPoint {
  double latitude = 0.0;   // degrees, [-90, 90]
  double longitude = 0.0;  // degrees, [-180, 180]

  /// Throws InvalidArgument when out of range or non-finite.
  static GeoPoint checked(double latitude, double longitude);
  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

using GeoTable = std::map<std::string, GeoPoint>;

/// Great-circle distance on a sphere of radius kEarthRadiusKm.
double haversine_km(const GeoPoint& p, const GeoPoint& q);

GeoTable read_geo_file(const std::filesystem::path& path);
void write_geo_file(const std::filesystem::path& path, const GeoTable& geo);
std::string geo_table_to_string(const GeoTable& geo);

struct StrengthPair {
  std::string source;
  std::string target;
  double s_ij = 0.0;
  double sigma = 0.0;  // s_ij / (s_i^out * s_j^in)
  double distance_km = 0.0;
};

enum class Symmetrize {
  None,  // each direction is its own data point
  Mean,  // one point per unordered pair, averaging the directions present
};

struct StrengthPairs {
  std::vector<StrengthPair> pairs;  // sorted by (source, target)
  std::size_t excluded = 0;         // candidate pairs failing the positivity conditions
};

/// Normalized strengths on the subgraph induced by `nodes`. Every node needs
/// coordinates (MissingCoordinates otherwise).
StrengthPairs normalized_strengths(const YearSnapshot& snapshot, std::span<const std::string> nodes,
                                   const GeoTable& geo, Symmetrize symmetrize = Symmetrize::None);

struct SeriesPoint {
  double distance_km = 0.0;
  double sigma = 0.0;
};

inline constexpr std::size_t kDefaultWindow = 500;
inline constexpr double kDefaultMinDistanceKm = 20.0;

/// Pairs with d_min_km <= distance <= d_max_km, ascending by distance.
std::vector<SeriesPoint> filtered_points(std::span<const StrengthPair> pairs, double d_min_km,
                                         double d_max_km = std::numeric_limits<double>::infinity());

/// Moving average (stride 1) over `window` consecutive distance-sorted points.
std::vector<SeriesPoint> distance_strength_series(
    std::span<const StrengthPair> pairs, std::size_t window = kDefaultWindow,
    double d_min_km = kDefaultMinDistanceKm,
    double d_max_km = std::numeric_limits<double>::infinity());

struct GravityFit {
  double exponent = 0.0;  // a in sigma ~ d^-a
  double std_error = 0.0;
  double intercept = 0.0;  // ln-space
  double rss = 0.0;
  std::size_t n_points = 0;
  std::size_t window = 0;
  double d_min_km = 0.0;
  double d_max_km = 0.0;
};

/// Ordinary least squares of ln(sigma) on ln(distance); exponent = -slope.
/// window/d_min_km/d_max_km are left for the caller to fill; d_*_km here
/// are the extreme distances of the fitted points.
GravityFit fit_gravity_exponent(std::span<const SeriesPoint> series);

struct GravityOptions {
  std::size_t window = kDefaultWindow;
  double d_min_km = kDefaultMinDistanceKm;
  double d_max_km = std::numeric_limits<double>::infinity();
  bool fit_raw = false;
  Symmetrize symmetrize = Symmetrize::None;
};

struct GravityAnalysis {
  StrengthPairs strengths;
  std::vector<SeriesPoint> series;
  GravityFit fit;
};

/// normalized_strengths -> distance_strength_series -> fit, as one step.
GravityAnalysis analyze_gravity(const YearSnapshot& snapshot, std::span<const std::string> nodes,
                                const GeoTable& geo, const GravityOptions& options = {});

std::string gravity_series_csv(std::span<const SeriesPoint> series);
std::string gravity_fit_csv(const GravityFit& fit, const GravityOptions& options);
/// One row per pair with both endpoints' coordinates and sigma.
std::string geo_links_csv(std::span<const StrengthPair> pairs, const GeoTable& geo);

}  // namespace chronoscope
