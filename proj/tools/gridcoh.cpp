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

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "gridcoh/gridcoh.hpp"

namespace {

using gridcoh::ConfigMap;
using gridcoh::Errc;
using gridcoh::Error;
using gridcoh::PipelineConfig;

// Shortcut flags and the dotted config keys they set.
const std::vector<std::pair<std::string, std::string>> kFlagKeys = {
    {"--angles", "input.angles"},
    {"--topology", "input.topology"},
    {"--system", "input.system"},
    {"--faults", "input.faults"},
    {"--planted", "input.planted"},
    {"--seed", "seed"},
    {"--dt", "sim.dt"},
    {"--t-end", "sim.t_end"},
    {"--window", "window.length"},
    {"--stride", "window.stride"},
    {"--m-pts", "hdbscan.m_pts"},
    {"--min-cluster-size", "hdbscan.min_cluster_size"},
    {"--report-window", "analysis.report_window"},
    {"--out-angles", "output.angles"},
    {"--out-similarity", "output.similarity"},
    {"--out-index", "output.index_series"},
    {"--out-report", "output.report"},
    {"--out-tree", "output.condensed_tree"},
    {"--out-spectrum", "output.spectrum"},
    {"--out-variation", "output.variation"},
};

struct CommonArgs {
  std::string config_file;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;  // key -> value
};

void add_common(CLI::App* cmd, CommonArgs& args)
{
  cmd->add_option("-c,--config", args.config_file, "key = value configuration file");
  cmd->add_option("--set", args.sets, "override any configuration key (key=value), repeatable");
  for (const auto& [flag, key] : kFlagKeys) cmd->add_option(flag, args.flags[key], "sets " + key);
}

PipelineConfig resolve(const CommonArgs& args)
{
  ConfigMap file;
  if (!args.config_file.empty()) file = gridcoh::load_config(args.config_file);
  ConfigMap overrides;
  for (const auto& [key, value] : args.flags)
    if (!value.empty()) overrides[key] = value;
  for (const auto& s : args.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw Error(Errc::config, "--set expects key=value, got '" + s + "'");
    overrides[std::string(gridcoh::csv::trim(s.substr(0, eq)))] = std::string(gridcoh::csv::trim(s.substr(eq + 1)));
  }
  return gridcoh::merge_config(file, overrides);
}

template <typename Writer>
void emit(const std::string& path, Writer&& write)
{
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::format, "cannot write '" + path + "'");
  write(out);
}

void log_settings(const PipelineConfig& config)
{
  for (const auto& [k, v] : gridcoh::effective_settings(config)) std::cerr << "# " << k << " = " << v << '\n';
}

gridcoh::GridTopology require_topology(const PipelineConfig& config, const gridcoh::AngleTraceSet& traces)
{
  if (config.input.topology.empty()) throw Error(Errc::config, "input.topology is required");
  return gridcoh::load_topology_csv(config.input.topology, traces.bus_ids);
}

void write_analysis(const PipelineConfig& config, const gridcoh::AnalysisResult& result, bool similarity_to_stdout)
{
  const auto& w = result.report;
  if (!config.output.similarity.empty() || similarity_to_stdout)
    emit(config.output.similarity, [&](std::ostream& o) { gridcoh::write_similarity_csv(o, w.similarity); });
  if (!config.output.index_series.empty())
    emit(config.output.index_series, [&](std::ostream& o) { gridcoh::write_index_series_csv(o, result.series); });
  if (!config.output.condensed_tree.empty())
    emit(config.output.condensed_tree, [&](std::ostream& o) {
      o << gridcoh::condensed_tree_to_json(w.clustering.tree, w.similarity.bus_ids).dump(2) << '\n';
    });
  if (!config.output.spectrum.empty())
    emit(config.output.spectrum, [&](std::ostream& o) { gridcoh::write_spectrum_csv(o, w.features); });
  if (!config.output.variation.empty())
    emit(config.output.variation,
         [&](std::ostream& o) { gridcoh::write_variation_csv(o, w.similarity.bus_ids, result.variation); });
}

void write_report(const PipelineConfig& config, const gridcoh::AnalysisResult& result,
                  const gridcoh::GridTopology& topo)
{
  auto report = gridcoh::build_report(result, topo);
  auto json = gridcoh::report_to_json(report, gridcoh::effective_settings(config));
  emit(config.output.report, [&](std::ostream& o) { o << json.dump(2) << '\n'; });
}

int run(int argc, char** argv)
{
  CLI::App app{"Bus coherency detection and network islanding from voltage-angle time series"};
  app.require_subcommand(1);

  CommonArgs sim_args, analyze_args, partition_args, pipeline_args;
  auto* sim = app.add_subcommand("simulate", "swing system or planted group spec -> angle CSV");
  auto* ana = app.add_subcommand("analyze", "angle CSV -> similarity CSV + index-series CSV");
  auto* part = app.add_subcommand("partition", "angle CSV + topology CSV -> island report JSON");
  auto* pipe = app.add_subcommand("pipeline", "simulate or load, analyze and partition in one run");
  add_common(sim, sim_args);
  add_common(ana, analyze_args);
  add_common(part, partition_args);
  add_common(pipe, pipeline_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : gridcoh::exit_code(Errc::config);
  }

  if (sim->parsed()) {
    auto config = resolve(sim_args);
    auto traces = gridcoh::simulate(config);
    emit(config.output.angles, [&](std::ostream& o) { gridcoh::write_angle_csv(o, traces); });
  } else if (ana->parsed()) {
    auto config = resolve(analyze_args);
    if (config.input.angles.empty()) throw Error(Errc::config, "input.angles is required");
    log_settings(config);
    auto traces = gridcoh::load_angle_csv(config.input.angles, config.dt_tolerance);
    std::optional<gridcoh::GridTopology> topo;
    if (!config.input.topology.empty()) topo = gridcoh::load_topology_csv(config.input.topology, traces.bus_ids);
    auto result = gridcoh::analyze(traces, config, topo ? &*topo : nullptr);
    write_analysis(config, result, config.output.index_series.empty());
  } else if (part->parsed()) {
    auto config = resolve(partition_args);
    if (config.input.angles.empty()) throw Error(Errc::config, "input.angles is required");
    auto traces = gridcoh::load_angle_csv(config.input.angles, config.dt_tolerance);
    auto topo = require_topology(config, traces);
    auto result = gridcoh::analyze(traces, config, &topo);
    write_report(config, result, topo);
  } else if (pipe->parsed()) {
    auto config = resolve(pipeline_args);
    auto traces = gridcoh::acquire_angles(config);
    auto topo = require_topology(config, traces);
    auto result = gridcoh::analyze(traces, config, &topo);
    write_analysis(config, result, false);
    write_report(config, result, topo);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "gridcoh: " << e.what() << '\n';
    return gridcoh::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "gridcoh: " << e.what() << '\n';
    return 1;
  }
}
