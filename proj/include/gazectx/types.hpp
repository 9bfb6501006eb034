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

#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace gazectx {

struct ObjectId {
  std::uint32_t value = 0;
  auto operator<=>(const ObjectId&) const = default;
};

inline std::string to_string(ObjectId id) { return std::to_string(id.value); }

// Rigid pose. The quaternion is stored exactly as given (not renormalized) so
// validation can reject non-unit input and files round-trip bit-exactly.
struct Pose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();

  Eigen::Matrix3d rotation() const {
    return orientation.normalized().toRotationMatrix();
  }

  bool operator==(const Pose& o) const {
    return position == o.position && orientation.coeffs() == o.orientation.coeffs();
  }
};

enum class ShapeKind { kSphere, kBox };

// Sphere: dims = (radius, 0, 0). Box: dims = full side lengths along the
// object's local x, y, z axes. Meters.
struct ObjectShape {
  ShapeKind kind = ShapeKind::kSphere;
  Eigen::Vector3d dims = Eigen::Vector3d::Zero();

  static ObjectShape sphere(double radius) {
    return {ShapeKind::kSphere, Eigen::Vector3d(radius, 0.0, 0.0)};
  }
  static ObjectShape box(double x, double y, double z) {
    return {ShapeKind::kBox, Eigen::Vector3d(x, y, z)};
  }

  double radius() const { return dims.x(); }

  // Radius of the smallest sphere enclosing the shape.
  double bounding_radius() const {
    return kind == ShapeKind::kSphere ? dims.x() : 0.5 * dims.norm();
  }

  bool valid() const {
    if (kind == ShapeKind::kSphere) return dims.x() > 0.0;
    return (dims.array() > 0.0).all();
  }

  bool operator==(const ObjectShape&) const = default;
};

}  // namespace gazectx
