/*
 * Copyright 2026 The gazectx Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <variant>
#include <vector>

#include <gtest/gtest.h>

#include "gazectx/geometry.hpp"
#include "gazectx/oracles.hpp"

namespace gazectx {
namespace {

const CameraModel kCamera{500.0, 640.0, 480.0, 1280.0, 960.0, 60.0};

std::vector<AngularPoint> rect(double w, double h) {
  return {{-w / 2, -h / 2}, {w / 2, -h / 2}, {w / 2, h / 2}, {-w / 2, h / 2}};
}

std::vector<AngularPoint> regular(int n, double r, double phase = 0.0) {
  std::vector<AngularPoint> v;
  for (int k = 0; k < n; ++k) {
    const double t = phase + 2.0 * std::numbers::pi * k / n;
    v.push_back({r * std::cos(t), r * std::sin(t)});
  }
  return v;
}

Pose at(double x, double y, double z) {
  Pose p;
  p.position = Eigen::Vector3d(x, y, z);
  return p;
}

TEST(PixelToAngular, PrincipalPointIsOpticalAxis) {
  const auto p = pixel_to_angular(kCamera, kCamera.cx, kCamera.cy);
  EXPECT_DOUBLE_EQ(p.azimuth_deg, 0.0);
  EXPECT_DOUBLE_EQ(p.elevation_deg, 0.0);
}

TEST(PixelToAngular, OneFocalLengthIs45Degrees) {
  const auto p = pixel_to_angular(kCamera, kCamera.cx + kCamera.focal_length_px, kCamera.cy);
  EXPECT_NEAR(p.azimuth_deg, 45.0, 1e-12);
  EXPECT_DOUBLE_EQ(p.elevation_deg, 0.0);
}

TEST(PixelToAngular, HalfFocalLength) {
  const auto p = pixel_to_angular(kCamera, kCamera.cx + 250.0, kCamera.cy);
  EXPECT_NEAR(p.azimuth_deg, 26.565051, 1e-6);
}

TEST(PixelToAngular, OutOfBoundsNamesCoordinate) {
  try {
    pixel_to_angular(kCamera, 2000.0, 10.0);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("x=2000"), std::string::npos) << e.what();
  }
  EXPECT_THROW(pixel_to_angular(kCamera, 10.0, -1.0), DomainError);
}

TEST(PixelToAngular, RoundTrip) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, kCamera.width), v(0.0, kCamera.height);
  for (int i = 0; i < 1000; ++i) {
    const double px = u(gen), py = v(gen);
    const auto back = angular_to_pixel(kCamera, pixel_to_angular(kCamera, px, py));
    EXPECT_NEAR(back.x(), px, 1e-9);
    EXPECT_NEAR(back.y(), py, 1e-9);
  }
}

TEST(PolygonArea, Examples) {
  EXPECT_NEAR(angular_polygon_area(rect(2.0, 2.0)), 4.0, 1e-12);
  const std::vector<AngularPoint> tri{{0, 0}, {2, 0}, {0, 2}};
  EXPECT_NEAR(angular_polygon_area(tri), 2.0, 1e-12);
  const std::vector<AngularPoint> line{{0, 0}, {1, 1}, {2, 2}};
  EXPECT_NEAR(angular_polygon_area(line), 0.0, 1e-12);
}

TEST(PolygonArea, TooFewVertices) {
  const std::vector<AngularPoint> two{{0, 0}, {1, 0}};
  EXPECT_THROW(angular_polygon_area(two), DegenerateInput);
  EXPECT_THROW(AngularPolygon(ObjectId{1}, two), DegenerateInput);
}

TEST(PolygonArea, OrderInvariance) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> r(0.5, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    // Star-shaped polygon around the origin with random radii.
    std::vector<AngularPoint> v;
    const int n = 5 + trial % 7;
    for (int k = 0; k < n; ++k) {
      const double t = 2.0 * std::numbers::pi * k / n, rr = r(gen);
      v.push_back({rr * std::cos(t), rr * std::sin(t)});
    }
    const double a = angular_polygon_area(v);
    auto rev = v;
    std::reverse(rev.begin(), rev.end());
    EXPECT_NEAR(angular_polygon_area(rev), a, 1e-12);
    auto rot = v;
    std::rotate(rot.begin(), rot.begin() + 2, rot.end());
    EXPECT_NEAR(angular_polygon_area(rot), a, 1e-12);
  }
}

TEST(AreaEquivalentRadius, Examples) {
  EXPECT_NEAR(area_equivalent_radius(std::numbers::pi), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(area_equivalent_radius(0.0), 0.0);
  EXPECT_NEAR(area_equivalent_radius(100.0), 5.6419, 1e-4);
  EXPECT_THROW(area_equivalent_radius(-1.0), DomainError);
}

TEST(MinimalHalfWidth, Examples) {
  EXPECT_NEAR(minimal_half_width(rect(2.0, 2.0)), 1.0, 1e-12);
  EXPECT_NEAR(minimal_half_width(rect(4.0, 2.0)), 1.0, 1e-12);
  EXPECT_NEAR(minimal_half_width(regular(64, 3.0)), 2.9964, 1e-4);
  const std::vector<AngularPoint> two{{0, 0}, {1, 0}};
  EXPECT_THROW(minimal_half_width(two), DegenerateInput);
}

TEST(MinimalHalfWidth, RotationInvariance) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const auto base = rect(5.0, 1.5);
  const double want = minimal_half_width(base);
  for (int i = 0; i < 100; ++i) {
    const double t = angle(gen), c = std::cos(t), s = std::sin(t);
    std::vector<AngularPoint> v;
    for (const auto& p : base)
      v.push_back({c * p.azimuth_deg - s * p.elevation_deg,
                   s * p.azimuth_deg + c * p.elevation_deg});
    EXPECT_NEAR(minimal_half_width(v), want, 1e-6);
  }
}

TEST(MinimalHalfWidth, EllipseBounds) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> ratio(1.0, 10.0);
  constexpr int kN = 256;
  // Polygonization shrinks widths by at most cos(pi/n).
  const double tol = 1.0 - std::cos(std::numbers::pi / kN) + 1e-9;
  for (int i = 0; i < 50; ++i) {
    const double b = 1.0, a = ratio(gen);
    std::vector<AngularPoint> v;
    for (int k = 0; k < kN; ++k) {
      const double t = 2.0 * std::numbers::pi * k / kN;
      v.push_back({a * std::cos(t), b * std::sin(t)});
    }
    const double hw = minimal_half_width(v);
    const double r = area_equivalent_radius(angular_polygon_area(v));
    EXPECT_NEAR(hw, b, tol * a);
    EXPECT_NEAR(r, std::sqrt(a * b), 2.0 * tol * std::sqrt(a * b) + 1e-6);
    EXPECT_LE(hw, r + 1e-9);
  }
}

TEST(ProjectObject, SphereOnAxis) {
  const auto proj = project_object(kCamera, at(0, 0, 1.0), ObjectShape::sphere(0.1));
  ASSERT_TRUE(std::holds_alternative<AngularPolygon>(proj));
  const auto m = VisualSizeMetrics::of(std::get<AngularPolygon>(proj));
  const double want = 5.739;
  EXPECT_NEAR(m.radius_deg, want, 0.02 * want);
  EXPECT_NEAR(m.half_min_width_deg, want, 0.02 * want);
}

TEST(ProjectObject, BoxMatchesRayRaster) {
  const auto proj = project_object(kCamera, at(0, 0, 10.0), ObjectShape::box(1, 1, 1));
  ASSERT_TRUE(std::holds_alternative<AngularPolygon>(proj));
  const double area = angular_polygon_area(std::get<AngularPolygon>(proj));
  const double ref =
      oracle::raster_box_area(at(0, 0, 10.0), Eigen::Vector3d(1, 1, 1), -3.5, 3.5, -3.5, 3.5);
  EXPECT_NEAR(area, ref, 0.02 * ref);
}

TEST(ProjectObject, BehindCameraIsOutOfView) {
  const auto proj = project_object(kCamera, at(0, 0, -2.0), ObjectShape::sphere(0.1));
  EXPECT_TRUE(std::holds_alternative<OutOfView>(proj));
}

TEST(ProjectObject, CameraInsideShape) {
  EXPECT_THROW(project_object(kCamera, at(0, 0, 0.05), ObjectShape::sphere(0.1)),
               DegenerateProjection);
  EXPECT_THROW(project_object(kCamera, at(0, 0, 0.1), ObjectShape::box(1, 1, 1)),
               DegenerateProjection);
}

TEST(ProjectObject, SmallAngleScaling) {
  double prev = std::numeric_limits<double>::infinity();
  for (double d : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    const auto proj = project_object(kCamera, at(0, 0, d), ObjectShape::sphere(0.05));
    const double r = VisualSizeMetrics::of(std::get<AngularPolygon>(proj)).radius_deg;
    EXPECT_LT(r, prev);
    if (std::isfinite(prev) && d >= 4.0) {
      EXPECT_NEAR(prev / r, 2.0, 0.02);
    }
    prev = r;
  }
}

TEST(AngularDistance, Examples) {
  const Eigen::Vector3d x(1, 0, 0), y(0, 1, 0);
  EXPECT_DOUBLE_EQ(angular_distance(x, x), 0.0);
  EXPECT_NEAR(angular_distance(x, y), 90.0, 1e-12);
  EXPECT_NEAR(angular_distance(x, Eigen::Vector3d(1, 1, 0)), 45.0, 1e-12);
  EXPECT_THROW(angular_distance(x, Eigen::Vector3d::Zero()), DomainError);
}

TEST(CameraModel, Check) {
  EXPECT_FALSE(kCamera.check().has_value());
  CameraModel bad = kCamera;
  bad.max_fov_deg = 30.0;  // image corners reach beyond 30 degrees
  EXPECT_TRUE(bad.check().has_value());
}

}  // namespace
}  // namespace gazectx
