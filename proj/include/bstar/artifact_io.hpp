#pragma once

// JSON (de)serialization of solutions and IK databases.

#include <string>
#include <vector>

#include "bstar/baseline.hpp"
#include "bstar/placement.hpp"
#include "bstar/robot_io.hpp"

namespace bstar {

namespace detail {

inline Json vector_to(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline Eigen::VectorXd vector_from(const Json& j) {
  if (!j.is_array()) throw InvalidInput("expected a number array");
  Eigen::VectorXd v(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) v[k] = j[k].get<double>();
  return v;
}

inline Json base_to(const BaseConfig& b) { return Json::array({b.x, b.y, b.theta}); }

inline BaseConfig base_from(const Json& j) {
  const Vec3 v = vec3_from(j, "base");
  return {v.x(), v.y(), v.z()};
}

}  // namespace detail

inline Json diagnostics_to_json(const Diagnostics& d) {
  return {{"success", d.success},
          {"retries_used", d.retries_used},
          {"outer_iterations", d.outer_iterations},
          {"base_spread_history", d.base_spread_history},
          {"ate_relaxed", d.ate_relaxed},
          {"runtime",
           {{"initialization", d.runtime.initialization},
            {"inner_total", d.runtime.inner_total},
            {"outer_total", d.runtime.outer_total}}},
          {"path_length", d.path_length},
          {"circular_mean_fallback", d.circular_mean_fallback},
          {"inner_iterations", d.inner_iterations},
          {"lp_iterations", d.lp_iterations},
          {"merit_increases", d.merit_increases},
          {"failure", d.failure}};
}

inline Diagnostics diagnostics_from_json(const Json& j) {
  Diagnostics d;
  d.success = j.at("success").get<bool>();
  d.retries_used = j.at("retries_used").get<int>();
  d.outer_iterations = j.at("outer_iterations").get<int>();
  d.base_spread_history = j.at("base_spread_history").get<std::vector<double>>();
  d.ate_relaxed = j.at("ate_relaxed").get<double>();
  const Json& r = j.at("runtime");
  d.runtime.initialization = r.at("initialization").get<double>();
  d.runtime.inner_total = r.at("inner_total").get<double>();
  d.runtime.outer_total = r.at("outer_total").get<double>();
  d.path_length = j.at("path_length").get<double>();
  d.circular_mean_fallback = j.value("circular_mean_fallback", false);
  d.inner_iterations = j.value("inner_iterations", 0);
  d.lp_iterations = j.value("lp_iterations", 0L);
  d.merit_increases = j.value("merit_increases", 0);
  d.failure = j.value("failure", std::string());
  return d;
}

inline Json solution_to_json(const Solution& s) {
  Json joints = Json::array();
  for (const auto& q : s.joints) joints.push_back(detail::vector_to(q));
  return {{"base", detail::base_to(s.base)}, {"joints", joints}, {"diagnostics", diagnostics_to_json(s.diagnostics)}};
}

inline Solution solution_from_json(const Json& j) {
  return detail::guarded("solution", [&] {
    Solution s;
    s.base = detail::base_from(j.at("base"));
    for (const auto& q : j.at("joints")) s.joints.push_back(detail::vector_from(q));
    s.diagnostics = diagnostics_from_json(j.at("diagnostics"));
    return s;
  });
}

inline Json database_to_json(const IKDatabase& db) {
  Json layers = Json::array();
  for (const auto& l : db.per_waypoint) {
    Json entries = Json::array();
    for (const auto& e : l) entries.push_back({{"base", detail::base_to(e.base)}, {"q", detail::vector_to(e.q)}});
    layers.push_back(entries);
  }
  return {{"gamma", db.gamma}, {"layers", layers}};
}

inline IKDatabase database_from_json(const Json& j) {
  return detail::guarded("IK database", [&] {
    IKDatabase db;
    db.gamma = j.at("gamma").get<int>();
    for (const auto& l : j.at("layers")) {
      std::vector<IkEntry> entries;
      for (const auto& e : l) entries.push_back({detail::base_from(e.at("base")), detail::vector_from(e.at("q"))});
      db.per_waypoint.push_back(std::move(entries));
    }
    return db;
  });
}

}  // namespace bstar
