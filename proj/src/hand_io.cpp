#include "grasp/hand_io.hpp"

#include "grasp/mesh.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace grasp {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw SchemaError(path + ": " + msg);
}

const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing required field");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(path, "expected a finite number");
  return d;
}

double number_field(const json& obj, const std::string& path, const char* key) {
  return number(require(obj, path, key), path + "." + key);
}

double optional_number(const json& obj, const std::string& path, const char* key, double fallback) {
  const auto it = obj.find(key);
  return it == obj.end() ? fallback : number(*it, path + "." + key);
}

int count_field(const json& obj, const std::string& path, const char* key) {
  const json& v = require(obj, path, key);
  if (!v.is_number_integer() || v.get<long>() < 1) fail(path + "." + key, "expected a positive integer");
  return v.get<int>();
}

Vec3 vec3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) fail(path, "expected an array of 3 numbers");
  return {number(v[0], path + "[0]"), number(v[1], path + "[1]"), number(v[2], path + "[2]")};
}

std::string string_field(const json& obj, const std::string& path, const char* key,
                         const std::string& fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_string()) fail(path + "." + key, "expected a string");
  return it->get<std::string>();
}

// {"xyz": [..], "rpy": [..]} or {"xyz": [..], "rotation": [9 numbers, row-major]}
RigidTransform frame_from(const json& obj, const std::string& path, const char* position_key) {
  Vec3 t = Vec3::Zero();
  if (obj.contains(position_key)) t = vec3(obj.at(position_key), path + "." + position_key);
  Mat3 r = Mat3::Identity();
  if (obj.contains("rotation")) {
    const json& m = obj.at("rotation");
    if (!m.is_array() || m.size() != 9) fail(path + ".rotation", "expected 9 numbers (row-major)");
    for (int i = 0; i < 9; ++i) r(i / 3, i % 3) = number(m[i], path + ".rotation[" + std::to_string(i) + "]");
    if (!is_rotation(r, 1e-9)) fail(path + ".rotation", "not a rotation matrix");
  } else if (obj.contains("rpy")) {
    const Vec3 rpy = vec3(obj.at("rpy"), path + ".rpy");
    r = rpy_rotation(rpy.x(), rpy.y(), rpy.z());
  }
  return {r, t};
}

OrientedBoundingBox box_from(const json& obj, const std::string& path) {
  const Vec3 half = vec3(require(obj, path, "half_extents"), path + ".half_extents");
  if (!(half.array() > 0.0).all()) fail(path + ".half_extents", "must be positive");
  return {frame_from(obj, path, "center"), half};
}

SurfacePointCloud explicit_cloud(const json& obj, const std::string& path) {
  const json& pts = require(obj, path, "points");
  const json& nrm = require(obj, path, "normals");
  if (!pts.is_array() || pts.empty()) fail(path + ".points", "expected a non-empty array");
  if (!nrm.is_array() || nrm.size() != pts.size()) {
    fail(path + ".normals", "expected one normal per point");
  }
  std::vector<Vec3> p, n;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    p.push_back(vec3(pts[i], path + ".points[" + std::to_string(i) + "]"));
    n.push_back(vec3(nrm[i], path + ".normals[" + std::to_string(i) + "]"));
    if (n.back().norm() < 1e-12) fail(path + ".normals[" + std::to_string(i) + "]", "zero normal");
  }
  return {std::move(p), std::move(n)};
}

SurfacePointCloud link_cloud(const json& obj, const std::string& path, const OrientedBoundingBox& box) {
  if (obj.contains("box_surface")) {
    const std::string bp = path + ".box_surface";
    const json& spec = obj.at("box_surface");
    const int count = count_field(spec, bp, "count");
    const json& seed = require(spec, bp, "seed");
    if (!seed.is_number_unsigned()) fail(bp + ".seed", "expected a non-negative integer");
    TriangleMesh mesh = make_box_mesh(box.half_extents());
    mesh.transform(box.frame());
    return sample_mesh(mesh, static_cast<std::size_t>(count), seed.get<std::uint64_t>());
  }
  if (obj.contains("points")) return explicit_cloud(obj, path);
  fail(path, "expected 'box_surface' or 'points'/'normals'");
}

// Rings x segments samples of a spherical cap; ring k sits at polar angle
// half_angle * (k + 0.5) / rings from the cap axis.
SurfacePointCloud spherical_cap(const json& spec, const std::string& path) {
  const Vec3 center = vec3(require(spec, path, "center"), path + ".center");
  Vec3 axis = vec3(require(spec, path, "axis"), path + ".axis");
  if (axis.norm() < 1e-12) fail(path + ".axis", "zero axis");
  axis.normalize();
  const double radius = number_field(spec, path, "radius");
  const double half_angle = number_field(spec, path, "half_angle");
  if (!(radius > 0.0)) fail(path + ".radius", "must be positive");
  if (!(half_angle > 0.0 && half_angle <= std::numbers::pi)) fail(path + ".half_angle", "must be in (0, pi]");
  const int rings = count_field(spec, path, "rings");
  const int segments = count_field(spec, path, "segments");

  const Vec3 u = axis.unitOrthogonal();
  const Vec3 v = axis.cross(u);
  std::vector<Vec3> pts, nrm;
  for (int k = 0; k < rings; ++k) {
    const double polar = half_angle * (k + 0.5) / rings;
    for (int s = 0; s < segments; ++s) {
      const double az = 2.0 * std::numbers::pi * s / segments;
      const Vec3 dir = std::cos(polar) * axis + std::sin(polar) * (std::cos(az) * u + std::sin(az) * v);
      pts.push_back(center + radius * dir);
      nrm.push_back(dir);
    }
  }
  return {std::move(pts), std::move(nrm)};
}

SurfacePointCloud patch_from(const json& obj, const std::string& path) {
  if (obj.contains("spherical_cap")) return spherical_cap(obj.at("spherical_cap"), path + ".spherical_cap");
  if (obj.contains("points")) return explicit_cloud(obj, path);
  fail(path, "expected 'spherical_cap' or 'points'/'normals'");
}

Link link_from(const json& obj, const std::string& path, const std::string& fallback_name) {
  Link link;
  link.name = string_field(obj, path, "name", fallback_name);
  link.box = box_from(require(obj, path, "box"), path + ".box");
  link.cloud = link_cloud(require(obj, path, "cloud"), path + ".cloud", link.box);
  return link;
}

RevoluteJoint joint_from(const json& obj, const std::string& path, const std::string& fallback_name) {
  RevoluteJoint j;
  j.name = string_field(obj, path, "name", fallback_name);
  j.origin = obj.contains("origin") ? frame_from(obj.at("origin"), path + ".origin", "xyz")
                                    : RigidTransform::identity();
  Vec3 axis = vec3(require(obj, path, "axis"), path + ".axis");
  if (axis.norm() < 1e-12) fail(path + ".axis", "zero axis");
  j.axis = std::abs(axis.norm() - 1.0) > 4.0 * std::numeric_limits<double>::epsilon() ? Vec3(axis.normalized()) : axis;
  j.q_min = number_field(obj, path, "q_min");
  j.q_max = number_field(obj, path, "q_max");
  if (!(j.q_min < j.q_max)) {
    fail(path, "joint '" + j.name + "': q_min (" + std::to_string(j.q_min) +
                   ") must be less than q_max (" + std::to_string(j.q_max) + ")");
  }
  j.q_mean = optional_number(obj, path, "q_mean", 0.5 * (j.q_min + j.q_max));
  j.alpha = optional_number(obj, path, "alpha", 1.0);
  j.q_open = optional_number(obj, path, "q_open", j.q_min);
  if (j.q_mean < j.q_min || j.q_mean > j.q_max) fail(path + ".q_mean", "outside [q_min, q_max]");
  if (j.q_open < j.q_min || j.q_open > j.q_max) fail(path + ".q_open", "outside [q_min, q_max]");
  if (!(j.alpha > 0.0)) fail(path + ".alpha", "must be positive");
  return j;
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json rotation_json(const Mat3& r) {
  json a = json::array();
  for (int i = 0; i < 9; ++i) a.push_back(r(i / 3, i % 3));
  return a;
}

json cloud_json(const SurfacePointCloud& c) {
  json pts = json::array(), nrm = json::array();
  for (std::size_t i = 0; i < c.size(); ++i) {
    pts.push_back(vec_json(c.point(i)));
    nrm.push_back(vec_json(c.normal(i)));
  }
  return {{"points", pts}, {"normals", nrm}};
}

json link_json(const Link& l) {
  return {{"name", l.name},
          {"box",
           {{"center", vec_json(l.box.frame().translation())},
            {"rotation", rotation_json(l.box.frame().rotation())},
            {"half_extents", vec_json(l.box.half_extents())}}},
          {"cloud", cloud_json(l.cloud)}};
}

}  // namespace

HandModel parse_hand_model(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("$: invalid JSON: ") + e.what());
  }
  const std::string root = "$";
  const json& version = require(doc, root, "format_version");
  if (!version.is_number_integer() || version.get<int>() != kHandFormatVersion) {
    fail("format_version", "unsupported version (expected " + std::to_string(kHandFormatVersion) + ")");
  }
  const std::string name = string_field(doc, root, "name", "hand");
  Link palm = link_from(require(doc, root, "palm"), "palm", "palm");

  const json& fingers_json = require(doc, root, "fingers");
  if (!fingers_json.is_array() || fingers_json.empty()) fail("fingers", "expected a non-empty array");
  std::vector<Finger> fingers;
  for (std::size_t f = 0; f < fingers_json.size(); ++f) {
    const std::string fp = "fingers[" + std::to_string(f) + "]";
    const json& fj = fingers_json[f];
    Finger finger;
    finger.name = string_field(fj, fp, "name", "finger_" + std::to_string(f + 1));
    const json& joints = require(fj, fp, "joints");
    const json& links = require(fj, fp, "links");
    if (!joints.is_array() || joints.empty()) fail(fp + ".joints", "expected a non-empty array");
    if (!links.is_array() || links.size() != joints.size()) {
      fail(fp + ".links", "expected one link per joint");
    }
    for (std::size_t j = 0; j < joints.size(); ++j) {
      const std::string suffix = "[" + std::to_string(j) + "]";
      finger.joints.push_back(joint_from(joints[j], fp + ".joints" + suffix, finger.name + "_j" + std::to_string(j)));
      finger.links.push_back(link_from(links[j], fp + ".links" + suffix, finger.name + "_l" + std::to_string(j)));
    }
    finger.fingertip_patch = patch_from(require(fj, fp, "fingertip"), fp + ".fingertip");
    fingers.push_back(std::move(finger));
  }
  try {
    return HandModel(name, std::move(palm), std::move(fingers));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("$: ") + e.what());
  }
}

HandModel load_hand_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_hand_model(ss.str());
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

std::string hand_model_to_json(const HandModel& model) {
  json doc;
  doc["format_version"] = kHandFormatVersion;
  doc["name"] = model.name();
  doc["palm"] = link_json(model.palm());
  json fingers = json::array();
  for (const auto& finger : model.fingers()) {
    json joints = json::array(), links = json::array();
    for (const auto& j : finger.joints) {
      joints.push_back({{"name", j.name},
                        {"origin",
                         {{"xyz", vec_json(j.origin.translation())},
                          {"rotation", rotation_json(j.origin.rotation())}}},
                        {"axis", vec_json(j.axis)},
                        {"q_min", j.q_min},
                        {"q_max", j.q_max},
                        {"q_mean", j.q_mean},
                        {"alpha", j.alpha},
                        {"q_open", j.q_open}});
    }
    for (const auto& l : finger.links) links.push_back(link_json(l));
    fingers.push_back({{"name", finger.name},
                       {"joints", joints},
                       {"links", links},
                       {"fingertip", cloud_json(finger.fingertip_patch)}});
  }
  doc["fingers"] = fingers;
  return doc.dump(1);
}

void save_hand_model(const std::filesystem::path& path, const HandModel& model) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot write");
  out << hand_model_to_json(model) << '\n';
}

// Three fingers around a square palm. The palm frame has +z pointing out of
// the back of the hand; fingers mount on the z = 0 face and curl toward -z.
// Fingers 1 and 2 (spread, proximal, distal) sit side by side opposite the
// two-joint finger 3. Each fingertip pad is a shallow spherical cap below and
// beyond the thin distal link box, facing 50 degrees forward of the inner
// face; it stands proud of the box so fingertip contact does not register as
// a link collision.
const std::string& default_hand_description() {
  static const std::string text = R"json({
 "format_version": 1,
 "name": "three_finger_default",
 "palm": {
  "name": "palm",
  "box": {"center": [0.0, 0.0, 0.03], "half_extents": [0.04, 0.04, 0.03]},
  "cloud": {"box_surface": {"count": 410, "seed": 11}}
 },
 "fingers": [
  {
   "name": "finger_1",
   "joints": [
    {"name": "f1_spread", "origin": {"xyz": [-0.025, 0.025, 0.0], "rpy": [0.0, 0.0, 3.141592653589793]},
     "axis": [0, 0, 1], "q_min": -0.6, "q_max": 0.6, "q_mean": 0.0, "alpha": 1.0, "q_open": 0.0},
    {"name": "f1_proximal", "origin": {"xyz": [0.0, 0.0, 0.0]},
     "axis": [0, 1, 0], "q_min": 0.0, "q_max": 2.44, "q_mean": 1.22, "alpha": 1.0, "q_open": 0.0},
    {"name": "f1_distal", "origin": {"xyz": [0.07, 0.0, 0.0]},
     "axis": [0, 1, 0], "q_min": 0.0, "q_max": 0.84, "q_mean": 0.42, "alpha": 1.0, "q_open": 0.0}
   ],
   "links": [
    {"name": "f1_knuckle", "box": {"center": [0.0, 0.0, 0.008], "half_extents": [0.012, 0.012, 0.008]},
     "cloud": {"box_surface": {"count": 40, "seed": 21}}},
    {"name": "f1_proximal", "box": {"center": [0.035, 0.0, 0.0], "half_extents": [0.035, 0.01, 0.009]},
     "cloud": {"box_surface": {"count": 120, "seed": 22}}},
    {"name": "f1_distal", "box": {"center": [0.014, 0.0, 0.0], "half_extents": [0.014, 0.004, 0.004]},
     "cloud": {"box_surface": {"count": 100, "seed": 23}}}
   ],
   "fingertip": {"spherical_cap": {"center": [0.034, 0.0, -0.01], "axis": [0.766044443118978, 0, -0.6427876096865394],
                                   "radius": 0.028, "half_angle": 0.3490658503988659, "rings": 6, "segments": 36}}
  },
  {
   "name": "finger_2",
   "joints": [
    {"name": "f2_spread", "origin": {"xyz": [-0.025, -0.025, 0.0], "rpy": [0.0, 0.0, 3.141592653589793]},
     "axis": [0, 0, 1], "q_min": -0.6, "q_max": 0.6, "q_mean": 0.0, "alpha": 1.0, "q_open": 0.0},
    {"name": "f2_proximal", "origin": {"xyz": [0.0, 0.0, 0.0]},
     "axis": [0, 1, 0], "q_min": 0.0, "q_max": 2.44, "q_mean": 1.22, "alpha": 1.0, "q_open": 0.0},
    {"name": "f2_distal", "origin": {"xyz": [0.07, 0.0, 0.0]},
     "axis": [0, 1, 0], "q_min": 0.0, "q_max": 0.84, "q_mean": 0.42, "alpha": 1.0, "q_open": 0.0}
   ],
   "links": [
    {"name": "f2_knuckle", "box": {"center": [0.0, 0.0, 0.008], "half_extents": [0.012, 0.012, 0.008]},
     "cloud": {"box_surface": {"count": 40, "seed": 31}}},
    {"name": "f2_proximal", "box": {"center": [0.035, 0.0, 0.0], "half_extents": [0.035, 0.01, 0.009]},
     "cloud": {"box_surface": {"count": 120, "seed": 32}}},
    {"name": "f2_distal", "box": {"center": [0.014, 0.0, 0.0], "half_extents": [0.014, 0.004, 0.004]},
     "cloud": {"box_surface": {"count": 100, "seed": 33}}}
   ],
   "fingertip": {"spherical_cap": {"center": [0.034, 0.0, -0.01], "axis": [0.766044443118978, 0, -0.6427876096865394],
                                   "radius": 0.028, "half_angle": 0.3490658503988659, "rings": 6, "segments": 36}}
  },
  {
   "name": "finger_3",
   "joints": [
    {"name": "f3_proximal", "origin": {"xyz": [0.025, 0.0, 0.0]},
     "axis": [0, 1, 0], "q_min": 0.0, "q_max": 2.44, "q_mean": 1.22, "alpha": 1.4142135623730951, "q_open": 0.0},
    {"name": "f3_distal", "origin": {"xyz": [0.07, 0.0, 0.0]},
     "axis": [0, 1, 0], "q_min": 0.0, "q_max": 0.84, "q_mean": 0.42, "alpha": 1.4142135623730951, "q_open": 0.0}
   ],
   "links": [
    {"name": "f3_proximal", "box": {"center": [0.035, 0.0, 0.0], "half_extents": [0.035, 0.01, 0.009]},
     "cloud": {"box_surface": {"count": 120, "seed": 41}}},
    {"name": "f3_distal", "box": {"center": [0.014, 0.0, 0.0], "half_extents": [0.014, 0.004, 0.004]},
     "cloud": {"box_surface": {"count": 100, "seed": 42}}}
   ],
   "fingertip": {"spherical_cap": {"center": [0.034, 0.0, -0.01], "axis": [0.766044443118978, 0, -0.6427876096865394],
                                   "radius": 0.028, "half_angle": 0.3490658503988659, "rings": 6, "segments": 36}}
  }
 ]
}
)json";
  return text;
}

HandModel default_hand_model() { return parse_hand_model(default_hand_description()); }

}  // namespace grasp
