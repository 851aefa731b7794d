/*
 * Copyright (c) 2026, The gridcoh Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridcoh/error.hpp"
#include "gridcoh/swingsim.hpp"

namespace gridcoh {

namespace detail {

inline nlohmann::json read_json_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::format, "cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::format, "'" + path + "': " + e.what());
  }
}

// Machines may be referenced by id string or by zero-based index.
inline std::size_t machine_ref(const nlohmann::json& v, const std::unordered_map<std::string, std::size_t>& ids,
                               std::size_t count)
{
  if (v.is_string()) {
    auto it = ids.find(v.get<std::string>());
    if (it == ids.end()) throw Error(Errc::format, "unknown machine '" + v.get<std::string>() + "'");
    return it->second;
  }
  if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)) {
    auto idx = v.get<std::size_t>();
    if (idx >= count) throw Error(Errc::format, "machine index out of range");
    return idx;
  }
  throw Error(Errc::format, "machine reference must be an id or an index");
}

inline std::unordered_map<std::string, std::size_t> machine_index(const SwingSystem& sys)
{
  std::unordered_map<std::string, std::size_t> ids;
  for (std::size_t i = 0; i < sys.size(); ++i) ids.emplace(sys.machines[i].id, i);
  return ids;
}

}  // namespace detail

/// {machines:[{id,H,D,Pm,E[,delta0][,omega0]}], admittance:[{i,j,G,B}], nominal_hz}
inline SwingSystem swing_system_from_json(const nlohmann::json& j)
{
  try {
    SwingSystem sys;
    sys.nominal_hz = j.value("nominal_hz", 60.0);
    for (const auto& m : j.at("machines")) {
      Machine mc;
      mc.id = m.at("id").get<std::string>();
      mc.H = m.at("H").get<double>();
      mc.D = m.value("D", 0.0);
      mc.Pm = m.at("Pm").get<double>();
      mc.E = m.value("E", 1.0);
      if (m.contains("delta0")) mc.delta0 = m.at("delta0").get<double>();
      mc.omega0 = m.value("omega0", 0.0);
      sys.machines.push_back(mc);
    }
    const std::size_t n = sys.size();
    sys.G = Matrix<double>(n, n, 0.0);
    sys.B = Matrix<double>(n, n, 0.0);
    const auto ids = detail::machine_index(sys);
    for (const auto& e : j.at("admittance")) {
      const auto a = detail::machine_ref(e.at("i"), ids, n);
      const auto b = detail::machine_ref(e.at("j"), ids, n);
      const double g = e.value("G", 0.0);
      const double bb = e.value("B", 0.0);
      sys.G(a, b) = g;
      sys.G(b, a) = g;
      sys.B(a, b) = bb;
      sys.B(b, a) = bb;
    }
    validate(sys);
    return sys;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::format, std::string("swing system: ") + e.what());
  }
}

inline std::vector<FaultEvent> faults_from_json(const nlohmann::json& j, const SwingSystem& sys)
{
  try {
    const auto ids = detail::machine_index(sys);
    std::vector<FaultEvent> out;
    for (const auto& f : j) {
      FaultEvent ev;
      ev.t_start = f.at("t_start").get<double>();
      ev.t_end = f.at("t_end").get<double>();
      ev.i = detail::machine_ref(f.at("i"), ids, sys.size());
      ev.j = detail::machine_ref(f.at("j"), ids, sys.size());
      ev.scale = f.value("scale", 0.0);
      validate(ev, sys.size());
      out.push_back(ev);
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::format, std::string("fault list: ") + e.what());
  }
}

/// {groups:[{buses:[...], f_hz, amplitude, phase_rad}], sigma, trend}
inline GroupSpec group_spec_from_json(const nlohmann::json& j)
{
  try {
    GroupSpec spec;
    spec.sigma = j.value("sigma", 0.0);
    spec.trend = j.value("trend", 0.0);
    for (const auto& g : j.at("groups")) {
      GroupSpec::Group grp;
      grp.buses = g.at("buses").get<std::vector<std::string>>();
      grp.f_hz = g.at("f_hz").get<double>();
      grp.amplitude = g.value("amplitude", 0.1);
      grp.phase = g.value("phase_rad", 0.0);
      spec.groups.push_back(std::move(grp));
    }
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::format, std::string("group spec: ") + e.what());
  }
}

inline SwingSystem load_swing_system(const std::string& path)
{
  return swing_system_from_json(detail::read_json_file(path));
}

inline std::vector<FaultEvent> load_faults(const std::string& path, const SwingSystem& sys)
{
  return faults_from_json(detail::read_json_file(path), sys);
}

inline GroupSpec load_group_spec(const std::string& path) { return group_spec_from_json(detail::read_json_file(path)); }

}  // namespace gridcoh
