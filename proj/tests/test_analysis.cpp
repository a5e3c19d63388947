#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

#include "costreach/analysis.hpp"

using namespace costreach;

namespace {

ValueField radial_field(int points) {
  GridSpec grid({{-1.0, 1.0, points, false}, {-1.0, 1.0, points, false}});
  std::vector<double> values(grid.node_count());
  std::size_t flat = 0;
  for (int i = 0; i < points; ++i)
    for (int j = 0; j < points; ++j, ++flat)
      values[flat] = std::hypot(grid.node_coordinate(0, i), grid.node_coordinate(1, j));
  return ValueField(std::move(grid), std::move(values), {});
}

ValueField smooth_3d_field() {
  GridSpec grid({{-1.0, 1.0, 17, false}, {-1.0, 1.0, 13, false},
                 {0.0, 2.0 * std::numbers::pi, 16, true}});
  std::vector<double> values(grid.node_count());
  std::size_t flat = 0;
  for (int i = 0; i < 17; ++i)
    for (int j = 0; j < 13; ++j)
      for (int k = 0; k < 16; ++k, ++flat) {
        const double x = grid.node_coordinate(0, i);
        const double y = grid.node_coordinate(1, j);
        const double theta = grid.node_coordinate(2, k);
        values[flat] = x * x + 0.5 * y + 0.2 * std::sin(theta);
      }
  return ValueField(std::move(grid), std::move(values), {});
}

}  // namespace

TEST_CASE("membership is the closed sub-level test") {
  const ValueField field = radial_field(41);
  CHECK(member(field, Vec{0.0, 0.0}, 0.0));          // value 0 == threshold counts as inside
  CHECK(member(field, Vec{0.3, 0.0}, 0.5));
  CHECK_FALSE(member(field, Vec{0.9, 0.9}, 0.5));
  CHECK_FALSE(member(field, Vec{0.5, 0.5}, -1.0));   // below the global minimum: empty set
}

TEST_CASE("slicing at a grid plane reproduces the plane's node values") {
  const ValueField field = smooth_3d_field();
  const double theta = field.grid().node_coordinate(2, 8);
  const ValueField plane = slice(field, {{2, theta}});
  REQUIRE(plane.grid().dim_count() == 2);
  CHECK(plane.grid().dim(0).point_count == 17);
  CHECK(plane.grid().dim(1).point_count == 13);
  for (int i = 0; i < 17; ++i)
    for (int j = 0; j < 13; ++j) {
      const std::vector<int> idx2{i, j};
      const std::vector<int> idx3{i, j, 8};
      CHECK(plane.value_at(idx2) == field.value_at(idx3));
    }
}

TEST_CASE("slicing a 2-D field with no fixed dimensions copies it") {
  const ValueField field = radial_field(21);
  const ValueField copy = slice(field, {});
  CHECK(copy.grid() == field.grid());
  CHECK(std::memcmp(copy.values().data(), field.values().data(),
                    field.values().size() * sizeof(double)) == 0);
}

TEST_CASE("slice validates its fixed-dimension map") {
  const ValueField field = smooth_3d_field();
  CHECK_THROWS_AS((void)slice(field, {}), std::invalid_argument);
  CHECK_THROWS_AS((void)slice(field, {{0, 0.0}, {1, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS((void)slice(field, {{0, 5.0}}), std::invalid_argument);  // outside domain
  CHECK_THROWS_AS((void)slice(field, {{7, 0.0}}), std::invalid_argument);
}

TEST_CASE("membership commutes with slicing") {
  const ValueField field = smooth_3d_field();
  const double theta = 1.3;
  const ValueField plane = slice(field, {{2, theta}});
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> x(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec p2{x(rng), x(rng)};
    const Vec p3{p2[0], p2[1], theta};
    CHECK(plane.interpolate(p2) == doctest::Approx(field.interpolate(p3)).epsilon(1e-12));
  }
}

TEST_CASE("contours of a constant field are empty") {
  const GridSpec grid({{0.0, 1.0, 5, false}, {0.0, 1.0, 5, false}});
  const ValueField field(grid, std::vector<double>(25, 2.0), {});
  CHECK(extract_contours(field, 1.0).polylines.empty());
  CHECK(extract_contours(field, 3.0).polylines.empty());
}

TEST_CASE("contour of a radial field approximates the circle") {
  const ValueField field = radial_field(101);
  const double h = field.grid().spacing(0);
  const LevelSetContour contour = extract_contours(field, 0.5);
  REQUIRE_FALSE(contour.polylines.empty());

  std::size_t point_count = 0;
  for (const auto& polyline : contour.polylines) {
    for (const auto& p : polyline) {
      const double radius = std::hypot(p[0], p[1]);
      CHECK(std::abs(radius - 0.5) <= h * std::numbers::sqrt2);
      ++point_count;
    }
  }
  CHECK(point_count >= 40);

  // one closed loop: first and last points coincide
  bool found_loop = false;
  for (const auto& polyline : contour.polylines)
    if (polyline.size() > 10 && polyline.front() == polyline.back()) found_loop = true;
  CHECK(found_loop);
}

TEST_CASE("contour points evaluate to the threshold under interpolation") {
  const ValueField field = radial_field(51);
  const double range = field.max_value() - field.min_value();
  for (const double threshold : {0.3, 0.5, 0.8}) {
    const LevelSetContour contour = extract_contours(field, threshold);
    REQUIRE_FALSE(contour.polylines.empty());
    for (const auto& polyline : contour.polylines)
      for (const auto& p : polyline) {
        const double v = field.interpolate(Vec{p[0], p[1]}, OutOfDomainPolicy::Clamp);
        CHECK(std::abs(v - threshold) <= 1e-6 * range);
      }
  }
}

TEST_CASE("nested thresholds give nested contours") {
  const ValueField field = radial_field(51);
  const LevelSetContour inner = extract_contours(field, 0.3);
  REQUIRE_FALSE(inner.polylines.empty());
  for (const auto& polyline : inner.polylines)
    for (const auto& p : polyline) CHECK(member(field, Vec{p[0], p[1]}, 0.5));
}

TEST_CASE("saddle cells resolve deterministically") {
  const GridSpec grid({{0.0, 1.0, 2, false}, {0.0, 1.0, 2, false}});
  // diagonal corners low: values at (0,0), (0,1), (1,0), (1,1)
  const ValueField field(grid, {0.0, 1.0, 1.0, 0.0}, {});
  const LevelSetContour low = extract_contours(field, 0.25);   // center 0.5 outside
  CHECK(low.polylines.size() == 2);
  const LevelSetContour high = extract_contours(field, 0.75);  // center 0.5 inside
  CHECK(high.polylines.size() == 2);
  const LevelSetContour again = extract_contours(field, 0.25);
  CHECK(to_csv(again) == to_csv(low));
}

TEST_CASE("masks threshold node-wise and nest monotonically") {
  const ValueField field = radial_field(21);
  const MaskField all = mask(field, field.max_value());
  for (const auto v : all.values) CHECK(v == 1);
  const MaskField none = mask(field, field.min_value() - 0.1);
  for (const auto v : none.values) CHECK(v == 0);

  std::mt19937 rng(31);
  std::uniform_real_distribution<double> dist(0.0, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    double a = dist(rng), b = dist(rng);
    if (a > b) std::swap(a, b);
    const MaskField inner = mask(field, a);
    const MaskField outer = mask(field, b);
    for (std::size_t i = 0; i < inner.values.size(); ++i)
      if (inner.values[i]) CHECK(outer.values[i]);
  }
}

TEST_CASE("contour export formats") {
  const ValueField field = radial_field(21);
  const LevelSetContour contour = extract_contours(field, 0.5, {{2, 3.14}});
  const std::string json = to_json(contour);
  CHECK(json.find("\"threshold\": 0.5") != std::string::npos);
  CHECK(json.find("\"2\": 3.14") != std::string::npos);
  const std::string csv = to_csv(contour);
  CHECK(csv.rfind("x,y,polyline_id\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') > 10);
}
