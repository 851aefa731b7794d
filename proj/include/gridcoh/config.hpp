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

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "gridcoh/csv.hpp"
#include "gridcoh/error.hpp"
#include "gridcoh/hdbscan.hpp"
#include "gridcoh/spectrum.hpp"
#include "gridcoh/timeseries.hpp"

namespace gridcoh {

/// Which partition the per-window GCI/GSI series is measured against.
enum class IndexPartition { final, window };

struct PipelineConfig {
  struct Inputs {
    std::string angles;
    std::string topology;
    std::string system;
    std::string faults;
    std::string planted;
  } input;

  struct Simulation {
    double dt = 0.01;
    double t_end = 20.0;
  } sim;

  struct Outputs {
    std::string angles;
    std::string similarity;
    std::string index_series;
    std::string report;
    std::string condensed_tree;
    std::string spectrum;
    std::string variation;
  } output;

  WindowSpec window;
  BandSpec band;
  HdbscanParams hdbscan;
  std::size_t baseline_sample = 0;
  std::optional<std::size_t> report_window;  // empty: last window
  IndexPartition index_partition = IndexPartition::final;
  double dt_tolerance = 1e-3;
  std::uint64_t seed = 0;
};

using ConfigMap = std::map<std::string, std::string>;

/// `key = value` lines; `#` starts a comment; blank lines ignored.
inline ConfigMap parse_config(std::istream& in)
{
  ConfigMap out;
  std::string line;
  std::size_t line_no = 0;
  while (csv::read_line(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    std::string_view body = csv::trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw Error(Errc::config, "line " + std::to_string(line_no) + ": expected key = value");
    auto key = csv::trim(body.substr(0, eq));
    auto value = csv::trim(body.substr(eq + 1));
    if (key.empty()) throw Error(Errc::config, "line " + std::to_string(line_no) + ": empty key");
    out[std::string(key)] = std::string(value);
  }
  return out;
}

inline ConfigMap load_config(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::config, "cannot open config '" + path + "'");
  return parse_config(in);
}

namespace detail {

inline double config_double(const std::string& key, const std::string& v)
{
  auto d = csv::parse_double(v);
  if (!d) throw Error(Errc::config, key + ": expected a number, got '" + v + "'");
  return *d;
}

inline std::uint64_t config_uint(const std::string& key, const std::string& v)
{
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
    throw Error(Errc::config, key + ": expected a non-negative integer, got '" + v + "'");
  return out;
}

inline bool config_bool(const std::string& key, const std::string& v)
{
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(Errc::config, key + ": expected true/false, got '" + v + "'");
}

inline bool is_none(const std::string& v) { return v.empty() || v == "none"; }

inline std::string fmt_opt(const std::optional<double>& v) { return v ? csv::format_double(*v) : "none"; }

}  // namespace detail

/// Applies one dotted key. Unknown keys and malformed values are
/// configuration errors.
inline void apply_setting(PipelineConfig& c, const std::string& key, const std::string& v)
{
  using namespace detail;
  if (key == "input.angles") c.input.angles = v;
  else if (key == "input.topology") c.input.topology = v;
  else if (key == "input.system") c.input.system = v;
  else if (key == "input.faults") c.input.faults = v;
  else if (key == "input.planted") c.input.planted = v;
  else if (key == "output.angles") c.output.angles = v;
  else if (key == "output.similarity") c.output.similarity = v;
  else if (key == "output.index_series") c.output.index_series = v;
  else if (key == "output.report") c.output.report = v;
  else if (key == "output.condensed_tree") c.output.condensed_tree = v;
  else if (key == "output.spectrum") c.output.spectrum = v;
  else if (key == "output.variation") c.output.variation = v;
  else if (key == "sim.dt") c.sim.dt = config_double(key, v);
  else if (key == "sim.t_end") c.sim.t_end = config_double(key, v);
  else if (key == "window.length") c.window.length = config_uint(key, v);
  else if (key == "window.stride") c.window.stride = config_uint(key, v);
  else if (key == "band.drop_dc") c.band.drop_dc = config_bool(key, v);
  else if (key == "band.f_lo_hz") c.band.f_lo_hz = is_none(v) ? std::nullopt : std::optional(config_double(key, v));
  else if (key == "band.f_hi_hz") c.band.f_hi_hz = is_none(v) ? std::nullopt : std::optional(config_double(key, v));
  else if (key == "band.max_bins")
    c.band.max_bins = is_none(v) ? std::nullopt : std::optional<std::size_t>(config_uint(key, v));
  else if (key == "hdbscan.m_pts") c.hdbscan.m_pts = config_uint(key, v);
  else if (key == "hdbscan.min_cluster_size") c.hdbscan.min_cluster_size = config_uint(key, v);
  else if (key == "hdbscan.d_floor") c.hdbscan.d_floor = config_double(key, v);
  else if (key == "analysis.baseline_sample") c.baseline_sample = config_uint(key, v);
  else if (key == "analysis.report_window")
    c.report_window = (is_none(v) || v == "last") ? std::nullopt : std::optional<std::size_t>(config_uint(key, v));
  else if (key == "analysis.index_partition") {
    if (v == "final") c.index_partition = IndexPartition::final;
    else if (v == "window") c.index_partition = IndexPartition::window;
    else throw Error(Errc::config, key + ": expected final or window, got '" + v + "'");
  }
  else if (key == "analysis.dt_tolerance") c.dt_tolerance = config_double(key, v);
  else if (key == "seed") c.seed = config_uint(key, v);
  else throw Error(Errc::config, "unknown key '" + key + "'");
}

/// Range checks that do not depend on the data.
inline void validate(const PipelineConfig& c)
{
  if (c.window.length < 2) throw Error(Errc::config, "window.length must be at least 2");
  if (c.window.stride < 1) throw Error(Errc::config, "window.stride must be at least 1");
  if (!(c.sim.dt > 0.0)) throw Error(Errc::config, "sim.dt must be positive");
  if (!(c.sim.t_end > 0.0)) throw Error(Errc::config, "sim.t_end must be positive");
  if (!(c.dt_tolerance >= 0.0)) throw Error(Errc::config, "analysis.dt_tolerance must be non-negative");
  if (c.baseline_sample >= c.window.length) throw Error(Errc::config, "analysis.baseline_sample must lie inside the window");
  if (c.hdbscan.m_pts < 2) throw Error(Errc::config, "hdbscan.m_pts must be at least 2");
  if (c.hdbscan.min_cluster_size < 2) throw Error(Errc::config, "hdbscan.min_cluster_size must be at least 2");
  if (!(c.hdbscan.d_floor > 0.0)) throw Error(Errc::config, "hdbscan.d_floor must be positive");
  try {
    c.band.validate();
  } catch (const Error& e) {
    throw Error(Errc::config, e.what());
  }
}

/// Defaults, then `file`, then `overrides`; later layers win.
inline PipelineConfig merge_config(const ConfigMap& file, const ConfigMap& overrides)
{
  PipelineConfig c;
  for (const auto& [k, v] : file) apply_setting(c, k, v);
  for (const auto& [k, v] : overrides) apply_setting(c, k, v);
  validate(c);
  return c;
}

/// Effective analysis settings as key/value strings. File paths are left
/// out so that runs over the same data compare equal.
inline ConfigMap effective_settings(const PipelineConfig& c)
{
  ConfigMap m;
  m["sim.dt"] = csv::format_double(c.sim.dt);
  m["sim.t_end"] = csv::format_double(c.sim.t_end);
  m["window.length"] = std::to_string(c.window.length);
  m["window.stride"] = std::to_string(c.window.stride);
  m["band.drop_dc"] = c.band.drop_dc ? "true" : "false";
  m["band.f_lo_hz"] = detail::fmt_opt(c.band.f_lo_hz);
  m["band.f_hi_hz"] = detail::fmt_opt(c.band.f_hi_hz);
  m["band.max_bins"] = c.band.max_bins ? std::to_string(*c.band.max_bins) : "none";
  m["hdbscan.m_pts"] = std::to_string(c.hdbscan.m_pts);
  m["hdbscan.min_cluster_size"] = std::to_string(c.hdbscan.min_cluster_size);
  m["hdbscan.d_floor"] = csv::format_double(c.hdbscan.d_floor);
  m["analysis.baseline_sample"] = std::to_string(c.baseline_sample);
  m["analysis.report_window"] = c.report_window ? std::to_string(*c.report_window) : "last";
  m["analysis.index_partition"] = c.index_partition == IndexPartition::final ? "final" : "window";
  m["analysis.dt_tolerance"] = csv::format_double(c.dt_tolerance);
  m["seed"] = std::to_string(c.seed);
  return m;
}

}  // namespace gridcoh
