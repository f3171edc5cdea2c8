#pragma once

// JSON (de)serialization of robot models and task paths, plus the built-in
// robot fixtures.

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bstar/fixture_data.hpp"
#include "bstar/kinematics.hpp"

namespace bstar {

using Json = nlohmann::json;

namespace detail {

inline Vec3 vec3_from(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw InvalidInput(std::string(what) + " must be a 3-array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline Json vec3_to(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

inline Transform transform_from(const Json& j) {
  return make_transform(vec3_from(j.at("xyz"), "xyz"), vec3_from(j.at("rpy"), "rpy"));
}

inline Json transform_to(const Transform& t) {
  const Mat3 r = t.linear();
  // ZYX extraction matching rpy_to_matrix.
  const double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  const double roll = std::atan2(r(2, 1), r(2, 2));
  const double yaw = std::atan2(r(1, 0), r(0, 0));
  return {{"xyz", vec3_to(t.translation())}, {"rpy", vec3_to(Vec3(roll, pitch, yaw))}};
}

// Runs `fn` translating library-external JSON errors into InvalidInput.
template <typename Fn>
auto guarded(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string(what) + ": " + e.what());
  }
}

}  // namespace detail

inline RobotModel robot_from_json(const Json& j) {
  return detail::guarded("robot model", [&] {
    std::vector<JointSpec> joints;
    for (const auto& jj : j.at("joints")) {
      JointSpec s;
      s.parent_offset = detail::transform_from(jj.at("offset"));
      s.axis = detail::vec3_from(jj.at("axis"), "axis");
      const std::string kind = jj.at("kind").get<std::string>();
      if (kind == "revolute")
        s.kind = JointKind::kRevolute;
      else if (kind == "prismatic")
        s.kind = JointKind::kPrismatic;
      else
        throw InvalidInput("unknown joint kind '" + kind + "'");
      s.lo = jj.at("lo").get<double>();
      s.hi = jj.at("hi").get<double>();
      joints.push_back(s);
    }
    std::vector<CollisionGeom> geoms;
    if (j.contains("collision")) {
      for (const auto& g : j.at("collision")) {
        CollisionGeom cg;
        cg.link_index = g.at("link").get<int>();
        if (g.contains("sphere")) {
          const auto& s = g.at("sphere");
          cg.shape = Sphere{detail::vec3_from(s.at("center"), "center"), s.at("radius").get<double>()};
        } else if (g.contains("capsule")) {
          const auto& c = g.at("capsule");
          cg.shape = Capsule{detail::vec3_from(c.at("p0"), "p0"), detail::vec3_from(c.at("p1"), "p1"),
                             c.at("radius").get<double>()};
        } else {
          throw InvalidInput("collision entry needs a sphere or capsule");
        }
        geoms.push_back(cg);
      }
    }
    std::vector<std::pair<int, int>> ignore;
    if (j.contains("ignore_pairs"))
      for (const auto& p : j.at("ignore_pairs")) ignore.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    const Transform mount =
        j.contains("mount") ? detail::transform_from(j.at("mount")) : Transform::Identity();
    const Transform tool =
        j.contains("tool") ? detail::transform_from(j.at("tool")) : Transform::Identity();
    return RobotModel(j.at("name").get<std::string>(), std::move(joints), std::move(geoms), mount,
                      tool, std::move(ignore));
  });
}

inline Json robot_to_json(const RobotModel& r) {
  Json joints = Json::array();
  for (const auto& s : r.joints()) {
    joints.push_back({{"offset", detail::transform_to(s.parent_offset)},
                      {"axis", detail::vec3_to(s.axis)},
                      {"kind", s.kind == JointKind::kRevolute ? "revolute" : "prismatic"},
                      {"lo", s.lo},
                      {"hi", s.hi}});
  }
  Json geoms = Json::array();
  for (const auto& g : r.collision()) {
    Json e = {{"link", g.link_index}};
    if (const auto* s = std::get_if<Sphere>(&g.shape))
      e["sphere"] = {{"center", detail::vec3_to(s->center)}, {"radius", s->radius}};
    else {
      const auto& c = std::get<Capsule>(g.shape);
      e["capsule"] = {{"p0", detail::vec3_to(c.p0)}, {"p1", detail::vec3_to(c.p1)}, {"radius", c.radius}};
    }
    geoms.push_back(e);
  }
  Json out = {{"name", r.name()},
              {"mount", detail::transform_to(r.mount())},
              {"tool", detail::transform_to(r.tool())},
              {"joints", joints},
              {"collision", geoms}};
  if (!r.ignore_pairs().empty()) {
    Json ip = Json::array();
    for (const auto& [a, b] : r.ignore_pairs()) ip.push_back({a, b});
    out["ignore_pairs"] = ip;
  }
  return out;
}

inline Json parse_json_text(std::string_view text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed ") + what + " JSON: " + e.what());
  }
}

inline Json read_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw InvalidInput(std::string("cannot open ") + what + " file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), what);
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

inline std::vector<std::string> fixture_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, text] : detail::kFixtureJson) ids.emplace_back(id);
  return ids;
}

inline RobotModel load_fixture(std::string_view id) {
  for (const auto& [fid, text] : detail::kFixtureJson)
    if (fid == id) return robot_from_json(parse_json_text(text, "robot fixture"));
  throw InvalidInput("unknown robot id '" + std::string(id) + "'");
}

// Accepts a fixture id or a path to a robot JSON file.
inline RobotModel resolve_robot(const std::string& id_or_path) {
  for (const auto& [fid, text] : detail::kFixtureJson)
    if (fid == id_or_path) return load_fixture(fid);
  if (id_or_path.find('/') == std::string::npos && id_or_path.find(".json") == std::string::npos)
    throw InvalidInput("unknown robot id '" + id_or_path + "'");
  return robot_from_json(read_json_file(id_or_path, "robot"));
}

inline TaskPath task_from_json(const Json& j) {
  return detail::guarded("task", [&] {
    TaskPath t;
    for (const auto& p : j.at("poses"))
      t.poses.emplace_back(detail::vec3_from(p.at("pos"), "pos"), detail::vec3_from(p.at("rotvec"), "rotvec"));
    if (t.poses.empty()) throw InvalidInput("task has no poses");
    return t;
  });
}

inline Json task_to_json(const TaskPath& t) {
  Json poses = Json::array();
  for (const auto& p : t.poses)
    poses.push_back({{"pos", detail::vec3_to(p.position)}, {"rotvec", detail::vec3_to(p.orientation)}});
  return {{"poses", poses}};
}

}  // namespace bstar
