#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "chronoscope/gravity.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace chronoscope;

namespace {

StrengthPair sp(double d, double sigma) { return StrengthPair{"a", "b", 1.0, sigma, d}; }

std::vector<SeriesPoint> power_law(double a, double scale, std::size_t n) {
  std::vector<SeriesPoint> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = 20.0 + 15.0 * static_cast<double>(i);
    out.push_back({d, scale * std::pow(d, -a)});
  }
  return out;
}

}  // namespace

TEST_CASE("haversine examples") {
  GeoPoint ox{51.7548, -1.2544}, cam{52.2053, 0.1218};
  CHECK(haversine_km(ox, ox) == 0.0);
  CHECK(haversine_km({0, 0}, {0, 180}) == doctest::Approx(std::numbers::pi * 6371.0088).epsilon(1e-12));
  CHECK(haversine_km({0, 0}, {0, 180}) == doctest::Approx(20015.1).epsilon(1e-5));
  const double expected = oracle::great_circle_km(ox.latitude, ox.longitude, cam.latitude, cam.longitude);
  CHECK(std::abs(haversine_km(ox, cam) - expected) <= 1e-6 * expected);
  CHECK(haversine_km(ox, cam) == doctest::Approx(107.0).epsilon(0.05));
}

TEST_CASE("haversine symmetry and triangle inequality") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
  for (int i = 0; i < 2000; ++i) {
    GeoPoint p{lat(rng), lon(rng)}, q{lat(rng), lon(rng)}, r{lat(rng), lon(rng)};
    CHECK(haversine_km(p, q) == haversine_km(q, p));
    CHECK(haversine_km(p, r) <= haversine_km(p, q) + haversine_km(q, r) + 1e-9);
    const double ref = oracle::great_circle_km(p.latitude, p.longitude, q.latitude, q.longitude);
    CHECK(std::abs(haversine_km(p, q) - ref) <= 1e-6 * std::max(1.0, ref));
    CHECK(haversine_km(p, q) > 0.0);
  }
}

TEST_CASE("GeoPoint range checks") {
  CHECK(GeoPoint::checked(90, -180) == GeoPoint{90, -180});
  CHECK(code_of([] { GeoPoint::checked(91, 0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { GeoPoint::checked(0, 180.5); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { GeoPoint::checked(NAN, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("normalized_strengths") {
  GeoTable geo = {{"a.ac.uk", {51, 0}}, {"b.ac.uk", {52, 0}}, {"c.ac.uk", {53, 0}}};
  YearSnapshot one(2010, {{"a.ac.uk", "b.ac.uk", 4}});
  std::vector<std::string> ab = {"a.ac.uk", "b.ac.uk"};
  auto r = normalized_strengths(one, ab, geo);
  REQUIRE(r.pairs.size() == 1);
  CHECK(r.pairs[0].sigma == 0.25);
  CHECK(r.pairs[0].s_ij == 4.0);
  CHECK(r.pairs[0].distance_km == haversine_km(geo["a.ac.uk"], geo["b.ac.uk"]));
  CHECK(r.excluded == 1);  // b -> a has s_ij = 0

  std::vector<std::string> abx = {"a.ac.uk", "b.ac.uk", "x.ac.uk"};
  CHECK(code_of([&] { normalized_strengths(one, abx, geo); }) == ErrorCode::MissingCoordinates);

  // Edges leaving the node set do not count towards strengths.
  YearSnapshot leaky(2010, {{"a.ac.uk", "b.ac.uk", 4}, {"a.ac.uk", "z.co.uk", 100}});
  CHECK(normalized_strengths(leaky, ab, geo).pairs[0].sigma == 0.25);
}

TEST_CASE("normalized_strengths match a first-principles recomputation") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> lat(50, 58), lon(-5, 1);
  for (int iter = 0; iter < 30; ++iter) {
    auto snap = oracle::random_snapshot(rng, 5, 0.5, 30);
    auto names = snap.nodes();
    GeoTable geo;
    for (const auto& n : names) geo[n] = {lat(rng), lon(rng)};
    auto d = oracle::dense(snap, names);
    auto got = normalized_strengths(snap, names, geo);
    std::size_t k = 0, positive = 0;
    for (std::size_t i = 0; i < names.size(); ++i) {
      double out = 0;
      for (double w : d.w[i]) out += w;
      for (std::size_t j = 0; j < names.size(); ++j) {
        if (d.w[i][j] <= 0) continue;
        double in = 0;
        for (std::size_t u = 0; u < names.size(); ++u) in += d.w[u][j];
        ++positive;
        REQUIRE(k < got.pairs.size());
        CHECK(got.pairs[k].source == names[i]);
        CHECK(got.pairs[k].target == names[j]);
        CHECK(got.pairs[k].sigma == doctest::Approx(d.w[i][j] / (out * in)).epsilon(1e-12));
        ++k;
      }
    }
    CHECK(got.pairs.size() == positive);
    CHECK(got.excluded == names.size() * (names.size() - 1) - positive);

    auto sym = normalized_strengths(snap, names, geo, Symmetrize::Mean);
    for (const auto& p : sym.pairs) CHECK(p.source < p.target);
  }
}

TEST_CASE("symmetrize mean averages both directions") {
  GeoTable geo = {{"a.ac.uk", {51, 0}}, {"b.ac.uk", {52, 0}}};
  YearSnapshot two(2010, {{"a.ac.uk", "b.ac.uk", 4}, {"b.ac.uk", "a.ac.uk", 2}});
  std::vector<std::string> ab = {"a.ac.uk", "b.ac.uk"};
  auto r = normalized_strengths(two, ab, geo, Symmetrize::Mean);
  REQUIRE(r.pairs.size() == 1);
  // sigma_ab = 4/(4*4), sigma_ba = 2/(2*2)
  CHECK(r.pairs[0].sigma == 0.5 * (0.25 + 0.5));
  CHECK(r.excluded == 0);
}

TEST_CASE("distance_strength_series examples") {
  std::vector<StrengthPair> pts = {sp(30, 5), sp(10, 1), sp(20, 3)};
  auto s = distance_strength_series(pts, 2, 0.0);
  REQUIRE(s.size() == 2);
  CHECK(s[0].distance_km == 15);
  CHECK(s[0].sigma == 2);
  CHECK(s[1].distance_km == 25);
  CHECK(s[1].sigma == 4);

  auto identity = distance_strength_series(pts, 1, 0.0);
  REQUIRE(identity.size() == 3);
  CHECK(identity[0].distance_km == 10);
  CHECK(identity[2].sigma == 5);

  // Points below the minimum distance are dropped before windowing.
  auto cut = distance_strength_series(pts, 1, 20.0);
  REQUIRE(cut.size() == 2);
  CHECK(cut[0].distance_km == 20);
  CHECK(distance_strength_series(pts, 1, 0.0, 20.0).size() == 2);

  CHECK(code_of([&] { distance_strength_series(pts, 4, 0.0); }) == ErrorCode::InsufficientData);
  CHECK(code_of([&] { distance_strength_series(pts, 1, 1000.0); }) == ErrorCode::InsufficientData);
  CHECK(code_of([&] { distance_strength_series(pts, 0, 0.0); }) == ErrorCode::InvalidArgument);

  std::mt19937_64 rng(3);
  for (std::size_t window = 1; window < 30; ++window) {
    std::vector<StrengthPair> many;
    for (int i = 0; i < 40; ++i) many.push_back(sp(static_cast<double>(rng() % 200), 1.0));
    const auto kept = filtered_points(many, 20.0).size();
    if (kept < window) continue;
    CHECK(distance_strength_series(many, window, 20.0).size() == kept - window + 1);
  }
}

TEST_CASE("fit_gravity_exponent") {
  auto exact = fit_gravity_exponent(power_law(0.3, 1.0, 50));
  CHECK(std::abs(exact.exponent - 0.3) <= 1e-9);
  CHECK(exact.std_error <= 1e-9);
  CHECK(exact.rss < 1e-18);
  CHECK(exact.n_points == 50);
  CHECK(std::abs(exact.intercept) <= 1e-9);

  auto scaled = fit_gravity_exponent(power_law(0.3, 7.3, 50));
  CHECK(std::abs(scaled.exponent - exact.exponent) <= 1e-12);
  CHECK(scaled.intercept == doctest::Approx(std::log(7.3)).epsilon(1e-9));

  auto two = power_law(0.3, 1.0, 2);
  CHECK(code_of([&] { fit_gravity_exponent(two); }) == ErrorCode::InsufficientData);
  std::vector<SeriesPoint> flat = {{10, 1}, {10, 2}, {10, 3}};
  CHECK(code_of([&] { fit_gravity_exponent(flat); }) == ErrorCode::DegenerateDesign);
  std::vector<SeriesPoint> zero = {{10, 1}, {20, 0}, {30, 3}};
  CHECK(code_of([&] { fit_gravity_exponent(zero); }) == ErrorCode::NonPositiveValue);

  // Standard error against the textbook formula on noisy input.
  std::mt19937_64 rng(6);
  std::normal_distribution<double> z(0, 0.2);
  std::vector<SeriesPoint> noisy;
  for (int i = 1; i <= 40; ++i) noisy.push_back({10.0 * i, std::pow(10.0 * i, -0.5) * std::exp(z(rng))});
  auto fit = fit_gravity_exponent(noisy);
  double mx = 0, my = 0;
  for (const auto& p : noisy) {
    mx += std::log(p.distance_km) / 40;
    my += std::log(p.sigma) / 40;
  }
  double sxx = 0, sxy = 0;
  for (const auto& p : noisy) {
    sxx += std::pow(std::log(p.distance_km) - mx, 2);
    sxy += (std::log(p.distance_km) - mx) * (std::log(p.sigma) - my);
  }
  const double b = sxy / sxx;
  double rss = 0;
  for (const auto& p : noisy) rss += std::pow(std::log(p.sigma) - (my - b * mx) - b * std::log(p.distance_km), 2);
  CHECK(fit.exponent == doctest::Approx(-b).epsilon(1e-12));
  CHECK(fit.std_error == doctest::Approx(std::sqrt(rss / 38 / sxx)).epsilon(1e-9));
  CHECK(fit.std_error > 0);
}

TEST_CASE("geo files and csv") {
  TempDir dir;
  GeoTable geo = {{"ox.ac.uk", {51.7548, -1.2544}}, {"cam.ac.uk", {52.2053, 0.1218}}};
  write_geo_file(dir / "geo.tsv", geo);
  CHECK(read_geo_file(dir / "geo.tsv") == geo);
  std::ofstream(dir / "bad.tsv") << "ox.ac.uk\t51.7\n";
  CHECK(code_of([&] { read_geo_file(dir / "bad.tsv"); }) == ErrorCode::MalformedLine);
  std::ofstream(dir / "range.tsv") << "ox.ac.uk\t99\t0\n";
  CHECK(code_of([&] { read_geo_file(dir / "range.tsv"); }) == ErrorCode::InvalidArgument);

  const std::string header = "source,target,source_lat,source_lon,target_lat,target_lon,sigma\n";
  CHECK(geo_links_csv({}, geo) == header);
  std::vector<StrengthPair> one = {{"ox.ac.uk", "cam.ac.uk", 4, 0.25, 107}};
  CHECK(geo_links_csv(one, geo) == header + "ox.ac.uk,cam.ac.uk,51.7548,-1.2544,52.2053,0.1218,0.25\n");
  std::vector<StrengthPair> missing = {{"ox.ac.uk", "ucl.ac.uk", 4, 0.25, 107}};
  CHECK(code_of([&] { geo_links_csv(missing, geo); }) == ErrorCode::MissingCoordinates);

  std::vector<SeriesPoint> series = {{15, 2}, {25, 4}};
  CHECK(gravity_series_csv(series) == "mean_d_km,mean_sigma\n15,2\n25,4\n");
  GravityFit fit;
  fit.exponent = 0.28;
  fit.std_error = 0.02;
  fit.n_points = 10;
  fit.window = 500;
  CHECK(gravity_fit_csv(fit, GravityOptions{}) ==
        "a,std_error,n_points,window,d_min,d_max,intercept,rss,fit_input\n0.28,0.02,10,500,20,inf,0,0,moving_average\n");
}

TEST_CASE("exponent is invariant under weight scaling") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> lat(50, 58), lon(-5, 1);
  auto snap = oracle::random_snapshot(rng, 40, 0.6, 500);
  auto names = snap.nodes();
  GeoTable geo;
  for (const auto& n : names) geo[n] = {lat(rng), lon(rng)};
  GravityOptions opts;
  opts.window = 50;
  auto base = analyze_gravity(snap, names, geo, opts);
  for (std::uint64_t c : {2u, 10u, 1000u}) {
    auto scaled = analyze_gravity(snap.scaled(c), names, geo, opts);
    CHECK(std::abs(scaled.fit.exponent - base.fit.exponent) < 1e-9);
    CHECK(scaled.fit.intercept == doctest::Approx(base.fit.intercept - std::log(static_cast<double>(c))).epsilon(1e-9));
    opts.fit_raw = true;
    CHECK(std::abs(analyze_gravity(snap.scaled(c), names, geo, opts).fit.exponent -
                   analyze_gravity(snap, names, geo, opts).fit.exponent) < 1e-9);
    opts.fit_raw = false;
  }
}
