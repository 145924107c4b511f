#include "chronoscope/gravity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "chronoscope/digraph.hpp"
#include "chronoscope/error.hpp"
#include "chronoscope/text.hpp"

namespace chronoscope {
namespace {

double radians(double degrees) { return degrees * std::numbers::pi / 180.0; }

const GeoPoint& coordinates(const GeoTable& geo, const std::string& node) {
  auto it = geo.find(node);
  if (it == geo.end()) throw Error(ErrorCode::MissingCoordinates, "no coordinates for " + node);
  return it->second;
}

}  // namespace

GeoPoint GeoPoint::checked(double latitude, double longitude) {
  if (!std::isfinite(latitude) || !std::isfinite(longitude) || latitude < -90.0 || latitude > 90.0 ||
      longitude < -180.0 || longitude > 180.0) {
    throw Error(ErrorCode::InvalidArgument, "coordinates out of range: " + text::format_double(latitude) +
                                                ", " + text::format_double(longitude));
  }
  return GeoPoint{latitude, longitude};
}

double haversine_km(const GeoPoint& p, const GeoPoint& q) {
  const double phi1 = radians(p.latitude);
  const double phi2 = radians(q.latitude);
  const double dphi = std::sin((phi2 - phi1) / 2.0);
  const double dlambda = std::sin(radians(q.longitude - p.longitude) / 2.0);
  const double h = std::clamp(dphi * dphi + std::cos(phi1) * std::cos(phi2) * dlambda * dlambda, 0.0, 1.0);
  // atan2 keeps full precision near antipodes, where asin(sqrt(h)) does not.
  return 2.0 * kEarthRadiusKm * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

GeoTable read_geo_file(const std::filesystem::path& path) {
  GeoTable geo;
  text::for_each_line(path, [&](std::string_view line, std::size_t line_no) {
    if (text::is_comment_or_blank(line)) return;
    auto fields = text::split_tabs(line);
    std::optional<double> lat, lon;
    if (fields.size() == 3) {
      lat = text::parse_double(fields[1]);
      lon = text::parse_double(fields[2]);
    }
    if (!lat || !lon || fields[0].empty()) {
      throw Error(ErrorCode::MalformedLine,
                  "bad geo line " + std::to_string(line_no) + ": '" + std::string(line) + "'");
    }
    geo[std::string(fields[0])] = GeoPoint::checked(*lat, *lon);
  });
  return geo;
}

std::string geo_table_to_string(const GeoTable& geo) {
  std::ostringstream out;
  for (const auto& [node, p] : geo) {
    out << node << '\t' << text::format_double(p.latitude) << '\t' << text::format_double(p.longitude) << '\n';
  }
  return out.str();
}

void write_geo_file(const std::filesystem::path& path, const GeoTable& geo) {
  text::write_file(path, geo_table_to_string(geo));
}

StrengthPairs normalized_strengths(const YearSnapshot& snapshot, std::span<const std::string> nodes,
                                   const GeoTable& geo, Symmetrize symmetrize) {
  const auto g = WeightedDigraph::induced(snapshot, nodes);
  for (const auto& name : g.names()) coordinates(geo, name);

  StrengthPairs out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (const auto& arc : g.out_arcs(i)) {
      const double s_out = g.out_strength(i);
      const double s_in = g.in_strength(arc.node);
      if (!(arc.weight > 0.0 && s_out > 0.0 && s_in > 0.0)) continue;
      const auto& src = g.names()[i];
      const auto& dst = g.names()[arc.node];
      out.pairs.push_back(StrengthPair{src, dst, arc.weight, arc.weight / (s_out * s_in),
                                       haversine_km(coordinates(geo, src), coordinates(geo, dst))});
    }
  }
  const std::size_t n = g.size();
  const std::size_t ordered = n < 2 ? 0 : n * (n - 1);

  if (symmetrize == Symmetrize::None) {
    out.excluded = ordered - out.pairs.size();
    return out;
  }

  std::map<std::pair<std::string, std::string>, std::vector<const StrengthPair*>> by_pair;
  for (const auto& p : out.pairs) {
    auto key = p.source < p.target ? std::pair{p.source, p.target} : std::pair{p.target, p.source};
    by_pair[key].push_back(&p);
  }
  StrengthPairs sym;
  for (const auto& [key, members] : by_pair) {
    StrengthPair merged{key.first, key.second, 0.0, 0.0, members.front()->distance_km};
    for (const auto* p : members) {
      merged.s_ij += p->s_ij;
      merged.sigma += p->sigma;
    }
    const auto count = static_cast<double>(members.size());
    merged.s_ij /= count;
    merged.sigma /= count;
    sym.pairs.push_back(std::move(merged));
  }
  sym.excluded = ordered / 2 - sym.pairs.size();
  return sym;
}

std::vector<SeriesPoint> filtered_points(std::span<const StrengthPair> pairs, double d_min_km,
                                         double d_max_km) {
  std::vector<SeriesPoint> points;
  for (const auto& p : pairs) {
    if (p.distance_km >= d_min_km && p.distance_km <= d_max_km) {
      points.push_back({p.distance_km, p.sigma});
    }
  }
  std::stable_sort(points.begin(), points.end(), [](const SeriesPoint& a, const SeriesPoint& b) {
    return a.distance_km < b.distance_km;
  });
  return points;
}

std::vector<SeriesPoint> distance_strength_series(std::span<const StrengthPair> pairs, std::size_t window,
                                                  double d_min_km, double d_max_km) {
  if (window < 1) throw Error(ErrorCode::InvalidArgument, "window must be at least 1");
  const auto points = filtered_points(pairs, d_min_km, d_max_km);
  if (points.empty() || points.size() < window) {
    throw Error(ErrorCode::InsufficientData, std::to_string(points.size()) +
                                                 " pairs remain after distance filtering; window is " +
                                                 std::to_string(window));
  }
  const double w = static_cast<double>(window);
  std::vector<SeriesPoint> series;
  series.reserve(points.size() - window + 1);
  for (std::size_t start = 0; start + window <= points.size(); ++start) {
    double d = 0.0, s = 0.0;
    for (std::size_t k = start; k < start + window; ++k) {
      d += points[k].distance_km;
      s += points[k].sigma;
    }
    series.push_back({d / w, s / w});
  }
  return series;
}

GravityFit fit_gravity_exponent(std::span<const SeriesPoint> series) {
  if (series.size() < 3) {
    throw Error(ErrorCode::InsufficientData, "gravity fit needs at least 3 points, got " +
                                                 std::to_string(series.size()));
  }
  const auto n = static_cast<double>(series.size());
  std::vector<double> xs, ys;
  xs.reserve(series.size());
  ys.reserve(series.size());
  GravityFit fit;
  fit.d_min_km = series.front().distance_km;
  fit.d_max_km = series.front().distance_km;
  for (const auto& p : series) {
    if (!(p.distance_km > 0.0) || !(p.sigma > 0.0)) {
      throw Error(ErrorCode::NonPositiveValue, "non-positive distance or strength reached the fit");
    }
    xs.push_back(std::log(p.distance_km));
    ys.push_back(std::log(p.sigma));
    fit.d_min_km = std::min(fit.d_min_km, p.distance_km);
    fit.d_max_km = std::max(fit.d_max_km, p.distance_km);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::DegenerateDesign, "all fitted distances are equal");
  const double slope = sxy / sxx;
  fit.intercept = my - slope * mx;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + slope * xs[i]);
    fit.rss += r * r;
  }
  fit.exponent = -slope;
  fit.std_error = std::sqrt(fit.rss / (n - 2.0) / sxx);
  fit.n_points = series.size();
  return fit;
}

GravityAnalysis analyze_gravity(const YearSnapshot& snapshot, std::span<const std::string> nodes,
                                const GeoTable& geo, const GravityOptions& options) {
  GravityAnalysis out;
  out.strengths = normalized_strengths(snapshot, nodes, geo, options.symmetrize);
  out.series = distance_strength_series(out.strengths.pairs, options.window, options.d_min_km,
                                        options.d_max_km);
  if (options.fit_raw) {
    out.fit = fit_gravity_exponent(filtered_points(out.strengths.pairs, options.d_min_km, options.d_max_km));
  } else {
    out.fit = fit_gravity_exponent(out.series);
  }
  out.fit.window = options.fit_raw ? 1 : options.window;
  return out;
}

std::string gravity_series_csv(std::span<const SeriesPoint> series) {
  std::ostringstream out;
  out << "mean_d_km,mean_sigma\n";
  for (const auto& p : series) {
    out << text::format_double(p.distance_km) << ',' << text::format_double(p.sigma) << '\n';
  }
  return out.str();
}

std::string gravity_fit_csv(const GravityFit& fit, const GravityOptions& options) {
  std::ostringstream out;
  out << "a,std_error,n_points,window,d_min,d_max,intercept,rss,fit_input\n"
      << text::format_double(fit.exponent) << ',' << text::format_double(fit.std_error) << ','
      << fit.n_points << ',' << fit.window << ',' << text::format_double(options.d_min_km) << ','
      << text::format_double(options.d_max_km) << ',' << text::format_double(fit.intercept) << ','
      << text::format_double(fit.rss) << ',' << (options.fit_raw ? "raw" : "moving_average") << '\n';
  return out.str();
}

std::string geo_links_csv(std::span<const StrengthPair> pairs, const GeoTable& geo) {
  std::ostringstream out;
  out << "source,target,source_lat,source_lon,target_lat,target_lon,sigma\n";
  for (const auto& p : pairs) {
    const auto& a = coordinates(geo, p.source);
    const auto& b = coordinates(geo, p.target);
    out << p.source << ',' << p.target << ',' << text::format_double(a.latitude) << ','
        << text::format_double(a.longitude) << ',' << text::format_double(b.latitude) << ','
        << text::format_double(b.longitude) << ',' << text::format_double(p.sigma) << '\n';
  }
  return out.str();
}

}  // namespace chronoscope
