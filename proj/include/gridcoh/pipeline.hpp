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
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gridcoh/coherency.hpp"
#include "gridcoh/config.hpp"
#include "gridcoh/error.hpp"
#include "gridcoh/hdbscan.hpp"
#include "gridcoh/partition.hpp"
#include "gridcoh/spectrum.hpp"
#include "gridcoh/swingsim.hpp"
#include "gridcoh/swingsim_io.hpp"
#include "gridcoh/timeseries.hpp"

namespace gridcoh {

/// One row of the windowed integrity-index trend.
struct IndexRow {
  std::size_t window = 0;
  double t_start = 0.0;
  std::optional<double> gci;
  std::optional<double> gsi;
  int k = 0;                          // clusters found in this window
  std::size_t noise_pre_assign = 0;   // HDBSCAN noise before assignment
};

struct WindowAnalysis {
  std::size_t index = 0;
  double t_start = 0.0;
  FeatureMatrix features;
  SimilarityMatrix similarity;
  HdbscanResult clustering;
  Partition partition;  // noise assigned, connectivity repaired when a topology is given
};

struct AnalysisResult {
  std::vector<IndexRow> series;
  WindowAnalysis report;  // the configured report window (default: last)
  VariationMatrix variation;
};

namespace detail {

template <typename F>
auto stage(std::size_t window, const char* name, F&& f)
{
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), "window " + std::to_string(window) + ", stage " + name + ": " + e.message());
  }
}

}  // namespace detail

/// angles -> velocities -> features -> similarity -> HDBSCAN -> noise
/// assignment -> connectivity repair, for a single window.
inline WindowAnalysis analyze_window(const AngleTraceSet& window, std::size_t index, const PipelineConfig& config,
                                     const GridTopology* topo)
{
  WindowAnalysis w;
  w.index = index;
  w.t_start = window.meta.t0;
  auto velocities = detail::stage(index, "velocity", [&] { return angular_velocity(window); });
  w.features = detail::stage(index, "features", [&] { return build_feature_matrix(velocities, config.band); });
  w.similarity = detail::stage(index, "similarity", [&] { return similarity_matrix(w.features); });
  w.clustering = detail::stage(index, "hdbscan", [&] { return hdbscan(w.similarity, config.hdbscan); });
  auto assigned = detail::stage(index, "noise", [&] { return assign_noise(w.clustering.clusters, w.similarity); });
  if (topo) {
    assigned = detail::stage(index, "connectivity",
                             [&] { return enforce_island_connectivity(assigned, *topo, w.similarity); });
  }
  w.partition = canonicalize(assigned.labels);
  return w;
}

/// Runs every sliding window. GCI/GSI of each row are measured against the
/// report window's partition, or the row's own with index_partition=window.
inline AnalysisResult analyze(const AngleTraceSet& traces, const PipelineConfig& config,
                              const GridTopology* topo = nullptr)
{
  validate(traces);
  if (topo && topo->bus_ids != traces.bus_ids)
    throw Error(Errc::consistency, "topology and angle data list different buses");

  const auto windows = sliding_windows(traces, config.window);
  const std::size_t report_index = config.report_window.value_or(windows.size() - 1);
  if (report_index >= windows.size())
    throw Error(Errc::config, "analysis.report_window=" + std::to_string(report_index) + " but only " +
                                  std::to_string(windows.size()) + " windows exist");

  std::vector<WindowAnalysis> all;
  all.reserve(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) all.push_back(analyze_window(windows[i], i, config, topo));

  AnalysisResult out;
  const Partition& reference = all[report_index].partition;
  for (const auto& w : all) {
    const Partition& p = config.index_partition == IndexPartition::final ? reference : w.partition;
    auto idx = integrity_indices(w.similarity, p, w.index, w.t_start);
    out.series.push_back(IndexRow{w.index, w.t_start, idx.gci, idx.gsi, w.clustering.clusters.k,
                                  w.clustering.clusters.noise_count()});
  }
  out.variation = detail::stage(report_index, "variation",
                                [&] { return variation_index(windows[report_index], config.baseline_sample); });
  out.report = std::move(all[report_index]);
  return out;
}

inline IslandReport build_report(const AnalysisResult& result, const GridTopology& topo)
{
  const auto& w = result.report;
  auto indices = integrity_indices(w.similarity, w.partition, w.index, w.t_start);
  return island_report(w.partition, topo, w.similarity, indices);
}

/// Simulated angles from input.system (+ input.faults) or input.planted.
inline AngleTraceSet simulate(const PipelineConfig& config)
{
  if (!config.input.system.empty()) {
    auto sys = load_swing_system(config.input.system);
    std::vector<FaultEvent> faults;
    if (!config.input.faults.empty()) faults = load_faults(config.input.faults, sys);
    return integrate_swing(sys, faults, initial_state(sys), config.sim.dt, config.sim.t_end);
  }
  if (!config.input.planted.empty()) {
    auto spec = load_group_spec(config.input.planted);
    return planted_group_signals(spec, config.sim.dt, config.sim.t_end, config.seed);
  }
  throw Error(Errc::config, "simulation needs input.system or input.planted");
}

/// Angle data for the analysis: read from input.angles, or simulated. A
/// simulated set is passed through its CSV text so that a later run over the
/// saved file sees bit-identical values.
inline AngleTraceSet acquire_angles(const PipelineConfig& config)
{
  if (!config.input.angles.empty()) return load_angle_csv(config.input.angles, config.dt_tolerance);
  auto traces = simulate(config);
  std::ostringstream text;
  write_angle_csv(text, traces);
  if (!config.output.angles.empty()) {
    std::ofstream out(config.output.angles, std::ios::binary);
    if (!out) throw Error(Errc::format, "cannot write '" + config.output.angles + "'");
    out << text.str();
  }
  std::istringstream in(text.str());
  return read_angle_csv(in, config.dt_tolerance);
}

}  // namespace gridcoh
