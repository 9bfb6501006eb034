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

// Recording data model and its JSON Lines file format.
//
// Line 1 is a header record, then one frame record per line, then a trailer
// record holding the interaction events:
//
//   {"version":1,"recording_id":..,"sample_rate_hz":..,"camera":{...},
//    "task_label":..,"silhouettes":"computed"|"stored","catalog":[...],
//    "notes":[...]}
//   {"t_ns":..,"device":{"pos":[3],"quat":[w,x,y,z]},"gaze":[3],
//    "objects":[{"id":..,"pos":[3],"quat":[4],"silhouette":[[az,el],..]}],
//    "image":".."}
//   {"interactions":[{"id":..,"start_ns":..,"end_ns":..}]}
//
// "notes", "image" and "silhouette" are optional. Unknown fields are rejected.
// The device frame doubles as the camera frame (+x right, +y down, +z forward)
// and gaze is a unit direction in it.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gazectx/error.hpp"
#include "gazectx/geometry.hpp"
#include "gazectx/types.hpp"

namespace gazectx {

inline constexpr int kRecordingFormatVersion = 1;

struct CatalogEntry {
  ObjectId id;
  std::string name;
  ObjectShape shape;
  bool operator==(const CatalogEntry&) const = default;
};

struct ObjectObservation {
  ObjectId id;
  Pose pose;  // world frame
  std::optional<AngularPolygon> silhouette;
  bool operator==(const ObjectObservation&) const = default;
};

struct Frame {
  std::int64_t t_ns = 0;
  Pose device;
  Eigen::Vector3d gaze = Eigen::Vector3d::UnitZ();
  std::vector<ObjectObservation> objects;
  std::optional<std::string> image;

  const ObjectObservation* find(ObjectId id) const {
    for (const auto& o : objects)
      if (o.id == id) return &o;
    return nullptr;
  }

  bool operator==(const Frame&) const = default;
};

struct InteractionEvent {
  ObjectId id;
  std::int64_t start_ns = 0;
  std::int64_t end_ns = 0;
  bool operator==(const InteractionEvent&) const = default;
};

// Whether frame silhouettes are carried in the file or recomputed from shape
// and pose. A stored silhouette always wins over a recomputed one.
enum class SilhouetteSource { kComputed, kStored };

struct Recording {
  int version = kRecordingFormatVersion;
  std::string recording_id;
  double sample_rate_hz = 30.0;
  CameraModel camera;
  std::string task_label;
  SilhouetteSource silhouettes = SilhouetteSource::kComputed;
  std::vector<CatalogEntry> catalog;
  std::vector<Frame> frames;
  std::vector<InteractionEvent> interactions;
  std::vector<std::string> notes;

  const CatalogEntry* find_entry(ObjectId id) const {
    for (const auto& e : catalog)
      if (e.id == id) return &e;
    return nullptr;
  }

  const CatalogEntry& entry(ObjectId id) const {
    if (const auto* e = find_entry(id)) return *e;
    throw DomainError("object " + to_string(id) + " not in catalog");
  }

  // Index of the frame whose timestamp is closest to t_ns (earlier on ties).
  std::size_t nearest_frame(std::int64_t t_ns) const {
    if (frames.empty()) throw DomainError("recording has no frames");
    auto it = std::lower_bound(
        frames.begin(), frames.end(), t_ns,
        [](const Frame& f, std::int64_t t) { return f.t_ns < t; });
    if (it == frames.begin()) return 0;
    if (it == frames.end()) return frames.size() - 1;
    const auto prev = std::prev(it);
    return (t_ns - prev->t_ns <= it->t_ns - t_ns)
               ? static_cast<std::size_t>(prev - frames.begin())
               : static_cast<std::size_t>(it - frames.begin());
  }

  bool operator==(const Recording&) const = default;
};

// Adapter for external recording sources (e.g. a dataset reader). An adapter
// produces a Recording that passes validate(); see docs/recording_adapter.md.
class RecordingAdapter {
 public:
  virtual ~RecordingAdapter() = default;
  virtual Recording load(const std::string& path) const = 0;
};

// ---------------------------------------------------------------------------
// Per-frame geometry.

// Object pose relative to the device (camera) frame.
inline Pose object_in_camera(const Frame& frame, const ObjectObservation& obs) {
  const Eigen::Quaterniond qd = frame.device.orientation.normalized();
  Pose p;
  p.position = qd.conjugate() * (obs.pose.position - frame.device.position);
  p.orientation = qd.conjugate() * obs.pose.orientation.normalized();
  return p;
}

// Euclidean distance from the device origin to the object's pose position.
inline double object_distance(const Frame& frame, ObjectId id) {
  const auto* obs = frame.find(id);
  if (!obs)
    throw AbsentObservation("object " + to_string(id) + " not observed at t=" +
                            std::to_string(frame.t_ns));
  return (obs->pose.position - frame.device.position).norm();
}

enum class SilhouetteStatus { kAvailable, kOutOfView, kUnavailable };

struct ResolvedSilhouette {
  SilhouetteStatus status = SilhouetteStatus::kUnavailable;
  std::optional<AngularPolygon> polygon;
};

// Stored silhouette when present; otherwise recomputed from the catalog shape
// if the recording declares computed silhouettes.
inline ResolvedSilhouette resolve_silhouette(const Recording& rec,
                                             const Frame& frame,
                                             const ObjectObservation& obs) {
  if (obs.silhouette) return {SilhouetteStatus::kAvailable, obs.silhouette};
  if (rec.silhouettes == SilhouetteSource::kStored) return {};
  const auto* entry = rec.find_entry(obs.id);
  if (!entry) return {};
  try {
    auto proj = project_object(rec.camera, object_in_camera(frame, obs),
                               entry->shape, kDefaultSphereVertices, obs.id);
    if (std::holds_alternative<OutOfView>(proj))
      return {SilhouetteStatus::kOutOfView, std::nullopt};
    return {SilhouetteStatus::kAvailable, std::get<AngularPolygon>(std::move(proj))};
  } catch (const DomainError&) {
    return {};
  }
}

// Field-of-view membership: the object's center direction lies within the
// camera's max_fov_deg.
inline bool object_in_view(const Recording& rec, const Frame& frame,
                           const ObjectObservation& obs) {
  return in_field_of_view(rec.camera, object_in_camera(frame, obs).position);
}

// ---------------------------------------------------------------------------
// Validation.

struct Violation {
  std::string code;      // machine-readable, e.g. "QUAT_NOT_UNIT"
  std::string location;  // e.g. "frame 12", "catalog[3]"
  std::string message;
  bool operator==(const Violation&) const = default;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations)
      : Error(summarize(violations)), violations_(std::move(violations)) {}
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  static std::string summarize(const std::vector<Violation>& v) {
    std::ostringstream out;
    out << v.size() << " violation(s)";
    for (std::size_t i = 0; i < v.size() && i < 5; ++i)
      out << "; " << v[i].code << " @ " << v[i].location << ": " << v[i].message;
    return out.str();
  }
  std::vector<Violation> violations_;
};

inline constexpr double kUnitTolerance = 1e-6;

inline std::vector<Violation> validate(const Recording& rec) {
  std::vector<Violation> out;
  auto add = [&](std::string code, std::string loc, std::string msg) {
    out.push_back({std::move(code), std::move(loc), std::move(msg)});
  };

  if (rec.version != kRecordingFormatVersion)
    add("BAD_VERSION", "header", "version " + std::to_string(rec.version));
  if (auto err = rec.camera.check()) add("CAMERA_INVALID", "camera", *err);
  if (!(rec.sample_rate_hz > 0.0))
    add("BAD_SAMPLE_RATE", "header", "sample_rate_hz must be > 0");

  std::set<ObjectId> ids;
  std::set<std::string> names;
  for (std::size_t i = 0; i < rec.catalog.size(); ++i) {
    const auto& e = rec.catalog[i];
    const std::string loc = "catalog[" + std::to_string(i) + "]";
    if (!ids.insert(e.id).second)
      add("DUPLICATE_ID", loc, "object id " + to_string(e.id));
    if (!names.insert(e.name).second)
      add("DUPLICATE_NAME", loc, "object name '" + e.name + "'");
    if (e.name.empty()) add("EMPTY_NAME", loc, "object name is empty");
    if (!e.shape.valid()) add("NONPOSITIVE_DIM", loc, "shape dimensions must be > 0");
  }

  auto check_quat = [&](const Eigen::Quaterniond& q, const std::string& loc) {
    const double n = q.coeffs().norm();
    if (!(std::abs(n - 1.0) <= kUnitTolerance))
      add("QUAT_NOT_UNIT", loc, "quaternion norm " + std::to_string(n));
  };

  for (std::size_t k = 0; k < rec.frames.size(); ++k) {
    const auto& f = rec.frames[k];
    const std::string loc = "frame " + std::to_string(k);
    if (k > 0 && !(f.t_ns > rec.frames[k - 1].t_ns))
      add("TIMESTAMP_ORDER", loc,
          "t_ns " + std::to_string(f.t_ns) + " does not follow " +
              std::to_string(rec.frames[k - 1].t_ns));
    check_quat(f.device.orientation, loc + " device");
    const double gn = f.gaze.norm();
    if (!(std::abs(gn - 1.0) <= kUnitTolerance))
      add("GAZE_NOT_UNIT", loc, "gaze norm " + std::to_string(gn));
    std::set<ObjectId> seen;
    for (const auto& o : f.objects) {
      const std::string oloc = loc + " object " + to_string(o.id);
      if (!ids.contains(o.id))
        add("UNKNOWN_OBJECT", oloc, "object id not in catalog");
      if (!seen.insert(o.id).second)
        add("DUPLICATE_OBSERVATION", oloc, "object observed twice");
      check_quat(o.pose.orientation, oloc);
      if (o.silhouette && o.silhouette->object_id() != o.id)
        add("SILHOUETTE_ID_MISMATCH", oloc, "silhouette carries another id");
    }
  }

  if (rec.frames.size() >= 2 && rec.sample_rate_hz > 0.0) {
    std::vector<std::int64_t> dt;
    dt.reserve(rec.frames.size() - 1);
    for (std::size_t k = 1; k < rec.frames.size(); ++k)
      dt.push_back(rec.frames[k].t_ns - rec.frames[k - 1].t_ns);
    std::nth_element(dt.begin(), dt.begin() + dt.size() / 2, dt.end());
    const double median = static_cast<double>(dt[dt.size() / 2]);
    const double nominal = 1e9 / rec.sample_rate_hz;
    if (std::abs(median - nominal) > 0.2 * nominal)
      add("SAMPLE_RATE_MISMATCH", "frames",
          "median interval " + std::to_string(median) + " ns vs nominal " +
              std::to_string(nominal) + " ns");
  }

  for (std::size_t i = 0; i < rec.interactions.size(); ++i) {
    const auto& ev = rec.interactions[i];
    const std::string loc = "interactions[" + std::to_string(i) + "]";
    if (!(ev.start_ns < ev.end_ns))
      add("INTERACTION_ORDER", loc, "start_ns must be < end_ns");
    if (!ids.contains(ev.id))
      add("UNKNOWN_OBJECT", loc, "object id " + to_string(ev.id));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization.

namespace detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

class LineError : public InputError {
 public:
  LineError(std::size_t line, const std::string& msg)
      : InputError("line " + std::to_string(line) + ": " + msg) {}
};

inline void check_keys(const json& j, std::initializer_list<std::string_view> required,
                       std::initializer_list<std::string_view> optional,
                       std::size_t line, const std::string& where) {
  if (!j.is_object()) throw LineError(line, where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    const bool known =
        std::find(required.begin(), required.end(), k) != required.end() ||
        std::find(optional.begin(), optional.end(), k) != optional.end();
    if (!known) throw LineError(line, where + ": unknown field '" + k + "'");
  }
  for (auto k : required)
    if (!j.contains(std::string(k)))
      throw LineError(line, where + ": missing field '" + std::string(k) + "'");
}

inline double num(const json& j, std::size_t line, const std::string& where) {
  if (!j.is_number()) throw LineError(line, where + ": expected a number");
  return j.get<double>();
}

inline std::int64_t integer(const json& j, std::size_t line,
                            const std::string& where) {
  if (!j.is_number_integer())
    throw LineError(line, where + ": expected an integer");
  return j.get<std::int64_t>();
}

inline std::string str(const json& j, std::size_t line, const std::string& where) {
  if (!j.is_string()) throw LineError(line, where + ": expected a string");
  return j.get<std::string>();
}

inline std::vector<double> numbers(const json& j, std::size_t n, std::size_t line,
                                   const std::string& where) {
  if (!j.is_array() || j.size() != n)
    throw LineError(line, where + ": expected " + std::to_string(n) + " numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < n; ++i)
    v.push_back(num(j[i], line, where + "[" + std::to_string(i) + "]"));
  return v;
}

inline Eigen::Vector3d vec3(const json& j, std::size_t line, const std::string& where) {
  const auto v = numbers(j, 3, line, where);
  return {v[0], v[1], v[2]};
}

inline Eigen::Quaterniond quat(const json& j, std::size_t line,
                               const std::string& where) {
  const auto v = numbers(j, 4, line, where);
  return Eigen::Quaterniond(v[0], v[1], v[2], v[3]);
}

inline ObjectId object_id(const json& j, std::size_t line, const std::string& where) {
  const auto v = integer(j, line, where);
  if (v < 0 || v > 0xFFFFFFFFll) throw LineError(line, where + ": id out of range");
  return ObjectId{static_cast<std::uint32_t>(v)};
}

inline ordered_json to_json(const Eigen::Vector3d& v) {
  return ordered_json::array({v.x(), v.y(), v.z()});
}

inline ordered_json to_json(const Eigen::Quaterniond& q) {
  return ordered_json::array({q.w(), q.x(), q.y(), q.z()});
}

inline ObjectShape parse_shape(const json& j, std::size_t line,
                               const std::string& where) {
  check_keys(j, {"kind", "dims"}, {}, line, where);
  const auto kind = str(j["kind"], line, where + ".kind");
  if (kind == "sphere") {
    const auto d = numbers(j["dims"], 1, line, where + ".dims");
    return ObjectShape::sphere(d[0]);
  }
  if (kind == "box") {
    const auto d = numbers(j["dims"], 3, line, where + ".dims");
    return ObjectShape::box(d[0], d[1], d[2]);
  }
  throw LineError(line, where + ".kind: unknown shape '" + kind + "'");
}

inline ordered_json shape_json(const ObjectShape& s) {
  ordered_json j;
  if (s.kind == ShapeKind::kSphere) {
    j["kind"] = "sphere";
    j["dims"] = ordered_json::array({s.dims.x()});
  } else {
    j["kind"] = "box";
    j["dims"] = to_json(s.dims);
  }
  return j;
}

inline void parse_header(const json& j, std::size_t line, Recording& rec) {
  check_keys(j,
             {"version", "recording_id", "sample_rate_hz", "camera", "task_label",
              "silhouettes", "catalog"},
             {"notes"}, line, "header");
  rec.version = static_cast<int>(integer(j["version"], line, "version"));
  if (rec.version != kRecordingFormatVersion)
    throw LineError(line, "unsupported format version " +
                              std::to_string(rec.version) + " (expected " +
                              std::to_string(kRecordingFormatVersion) + ")");
  rec.recording_id = str(j["recording_id"], line, "recording_id");
  rec.sample_rate_hz = num(j["sample_rate_hz"], line, "sample_rate_hz");
  rec.task_label = str(j["task_label"], line, "task_label");

  const auto& cam = j["camera"];
  check_keys(cam, {"focal_length_px", "cx", "cy", "width", "height", "max_fov_deg"},
             {}, line, "camera");
  rec.camera.focal_length_px = num(cam["focal_length_px"], line, "camera.focal_length_px");
  rec.camera.cx = num(cam["cx"], line, "camera.cx");
  rec.camera.cy = num(cam["cy"], line, "camera.cy");
  rec.camera.width = num(cam["width"], line, "camera.width");
  rec.camera.height = num(cam["height"], line, "camera.height");
  rec.camera.max_fov_deg = num(cam["max_fov_deg"], line, "camera.max_fov_deg");

  const auto src = str(j["silhouettes"], line, "silhouettes");
  if (src == "computed")
    rec.silhouettes = SilhouetteSource::kComputed;
  else if (src == "stored")
    rec.silhouettes = SilhouetteSource::kStored;
  else
    throw LineError(line, "silhouettes: expected 'computed' or 'stored'");

  const auto& cat = j["catalog"];
  if (!cat.is_array()) throw LineError(line, "catalog: expected an array");
  for (std::size_t i = 0; i < cat.size(); ++i) {
    const std::string where = "catalog[" + std::to_string(i) + "]";
    check_keys(cat[i], {"id", "name", "shape"}, {}, line, where);
    rec.catalog.push_back({object_id(cat[i]["id"], line, where + ".id"),
                           str(cat[i]["name"], line, where + ".name"),
                           parse_shape(cat[i]["shape"], line, where + ".shape")});
  }
  if (j.contains("notes")) {
    const auto& notes = j["notes"];
    if (!notes.is_array()) throw LineError(line, "notes: expected an array");
    for (std::size_t i = 0; i < notes.size(); ++i)
      rec.notes.push_back(str(notes[i], line, "notes[" + std::to_string(i) + "]"));
  }
}

inline Pose parse_pose(const json& j, std::size_t line, const std::string& where) {
  return {vec3(j["pos"], line, where + ".pos"), quat(j["quat"], line, where + ".quat")};
}

inline Frame parse_frame(const json& j, std::size_t line) {
  check_keys(j, {"t_ns", "device", "gaze", "objects"}, {"image"}, line, "frame");
  Frame f;
  f.t_ns = integer(j["t_ns"], line, "t_ns");
  check_keys(j["device"], {"pos", "quat"}, {}, line, "device");
  f.device = parse_pose(j["device"], line, "device");
  f.gaze = vec3(j["gaze"], line, "gaze");
  if (j.contains("image")) f.image = str(j["image"], line, "image");
  const auto& objs = j["objects"];
  if (!objs.is_array()) throw LineError(line, "objects: expected an array");
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const std::string where = "objects[" + std::to_string(i) + "]";
    const auto& o = objs[i];
    check_keys(o, {"id", "pos", "quat"}, {"silhouette"}, line, where);
    ObjectObservation obs;
    obs.id = object_id(o["id"], line, where + ".id");
    obs.pose = parse_pose(o, line, where);
    if (o.contains("silhouette")) {
      const auto& s = o["silhouette"];
      if (!s.is_array()) throw LineError(line, where + ".silhouette: expected an array");
      std::vector<AngularPoint> pts;
      for (std::size_t v = 0; v < s.size(); ++v) {
        const auto p = numbers(s[v], 2, line,
                               where + ".silhouette[" + std::to_string(v) + "]");
        pts.push_back({p[0], p[1]});
      }
      try {
        obs.silhouette.emplace(obs.id, std::move(pts));
      } catch (const DomainError& e) {
        throw LineError(line, where + ".silhouette: " + e.what());
      }
    }
    f.objects.push_back(std::move(obs));
  }
  return f;
}

inline ordered_json header_json(const Recording& rec) {
  ordered_json h;
  h["version"] = rec.version;
  h["recording_id"] = rec.recording_id;
  h["sample_rate_hz"] = rec.sample_rate_hz;
  h["camera"] = {{"focal_length_px", rec.camera.focal_length_px},
                 {"cx", rec.camera.cx},
                 {"cy", rec.camera.cy},
                 {"width", rec.camera.width},
                 {"height", rec.camera.height},
                 {"max_fov_deg", rec.camera.max_fov_deg}};
  h["task_label"] = rec.task_label;
  h["silhouettes"] =
      rec.silhouettes == SilhouetteSource::kStored ? "stored" : "computed";
  auto cat = ordered_json::array();
  for (const auto& e : rec.catalog)
    cat.push_back({{"id", e.id.value}, {"name", e.name}, {"shape", shape_json(e.shape)}});
  h["catalog"] = std::move(cat);
  if (!rec.notes.empty()) h["notes"] = rec.notes;
  return h;
}

inline ordered_json frame_json(const Frame& f) {
  ordered_json j;
  j["t_ns"] = f.t_ns;
  j["device"] = {{"pos", to_json(f.device.position)},
                 {"quat", to_json(f.device.orientation)}};
  j["gaze"] = to_json(f.gaze);
  auto objs = ordered_json::array();
  for (const auto& o : f.objects) {
    ordered_json oj;
    oj["id"] = o.id.value;
    oj["pos"] = to_json(o.pose.position);
    oj["quat"] = to_json(o.pose.orientation);
    if (o.silhouette) {
      auto s = ordered_json::array();
      for (const auto& p : o.silhouette->vertices())
        s.push_back(ordered_json::array({p.azimuth_deg, p.elevation_deg}));
      oj["silhouette"] = std::move(s);
    }
    objs.push_back(std::move(oj));
  }
  j["objects"] = std::move(objs);
  if (f.image) j["image"] = *f.image;
  return j;
}

}  // namespace detail

// Parses without validating invariants; load_recording() adds validation.
inline Recording parse_recording(std::istream& in) {
  using detail::json;
  using detail::LineError;
  Recording rec;
  std::string text;
  std::size_t line = 0;
  bool have_header = false;
  bool have_trailer = false;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r')
      throw LineError(line, "CR line endings are not accepted");
    if (text.empty()) throw LineError(line, "empty line");
    if (have_trailer) throw LineError(line, "record after the trailer");
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw LineError(line, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw LineError(line, "expected a JSON object");
    if (!have_header) {
      detail::parse_header(j, line, rec);
      have_header = true;
    } else if (j.contains("interactions")) {
      detail::check_keys(j, {"interactions"}, {}, line, "trailer");
      const auto& arr = j["interactions"];
      if (!arr.is_array()) throw LineError(line, "interactions: expected an array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string where = "interactions[" + std::to_string(i) + "]";
        detail::check_keys(arr[i], {"id", "start_ns", "end_ns"}, {}, line, where);
        rec.interactions.push_back(
            {detail::object_id(arr[i]["id"], line, where + ".id"),
             detail::integer(arr[i]["start_ns"], line, where + ".start_ns"),
             detail::integer(arr[i]["end_ns"], line, where + ".end_ns")});
      }
      have_trailer = true;
    } else {
      rec.frames.push_back(detail::parse_frame(j, line));
    }
  }
  if (!have_header) throw InputError("empty recording file");
  if (!have_trailer) throw InputError("missing interactions trailer record");
  return rec;
}

inline Recording load_recording(std::istream& in) {
  Recording rec = parse_recording(in);
  if (auto v = validate(rec); !v.empty()) throw ValidationError(std::move(v));
  return rec;
}

inline Recording load_recording(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return load_recording(in);
}

inline void save_recording(const Recording& rec, std::ostream& out) {
  out << detail::header_json(rec).dump() << '\n';
  for (const auto& f : rec.frames) out << detail::frame_json(f).dump() << '\n';
  detail::ordered_json trailer;
  auto arr = detail::ordered_json::array();
  for (const auto& ev : rec.interactions)
    arr.push_back({{"id", ev.id.value}, {"start_ns", ev.start_ns}, {"end_ns", ev.end_ns}});
  trailer["interactions"] = std::move(arr);
  out << trailer.dump() << '\n';
}

inline std::string save_recording(const Recording& rec) {
  std::ostringstream out;
  save_recording(rec, out);
  return out.str();
}

inline void save_recording(const Recording& rec, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  save_recording(rec, out);
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace gazectx
