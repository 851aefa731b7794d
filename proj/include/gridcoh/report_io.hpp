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

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridcoh/config.hpp"
#include "gridcoh/csv.hpp"
#include "gridcoh/hdbscan.hpp"
#include "gridcoh/partition.hpp"
#include "gridcoh/pipeline.hpp"

namespace gridcoh {

using ojson = nlohmann::ordered_json;

namespace detail {

inline ojson opt_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

inline std::string opt_csv(const std::optional<double>& v) { return v ? csv::format_double(*v) : "nan"; }

}  // namespace detail

/// `window,t_start,gci,gsi,k,noise_pre_assign`; undefined indices print as nan.
inline void write_index_series_csv(std::ostream& out, const std::vector<IndexRow>& rows)
{
  out << "window,t_start,gci,gsi,k,noise_pre_assign\n";
  for (const auto& r : rows) {
    out << r.window << ',' << csv::format_double(r.t_start) << ',' << detail::opt_csv(r.gci) << ','
        << detail::opt_csv(r.gsi) << ',' << r.k << ',' << r.noise_pre_assign << '\n';
  }
}

inline ojson report_to_json(const IslandReport& r, const ConfigMap& settings)
{
  ojson j;
  j["window"] = r.indices.window_index;
  j["t_start"] = r.indices.t_start;
  j["k"] = r.islands.size();
  ojson islands = ojson::array();
  for (const auto& isl : r.islands) {
    ojson buses = ojson::array();
    for (auto b : isl.buses) buses.push_back(r.bus_ids[b]);
    islands.push_back(ojson{{"id", isl.id}, {"buses", buses}});
  }
  j["islands"] = islands;
  ojson cut = ojson::array();
  for (const auto& e : r.cutset)
    cut.push_back(ojson{{"a", r.bus_ids[e.a]}, {"b", r.bus_ids[e.b]}, {"line_id", e.line_id}});
  j["cutset"] = cut;
  j["gci"] = detail::opt_json(r.indices.gci);
  j["gsi"] = detail::opt_json(r.indices.gsi);
  ojson degenerate = ojson::array();
  for (auto b : r.degenerate_buses) degenerate.push_back(r.bus_ids[b]);
  j["degenerate_buses"] = degenerate;
  ojson internal = ojson::array();
  for (const auto& v : r.internal_similarity) internal.push_back(detail::opt_json(v));
  j["per_island_internal_similarity"] = internal;
  ojson cfg = ojson::object();
  for (const auto& [k, v] : settings) cfg[k] = v;
  j["config"] = cfg;
  return j;
}

inline ojson condensed_tree_to_json(const CondensedTree& tree, const std::vector<std::string>& bus_ids)
{
  ojson nodes = ojson::array();
  for (const auto& c : tree.clusters) {
    ojson deps = ojson::array();
    for (const auto& d : c.departures) deps.push_back(ojson{{"bus", bus_ids[d.bus]}, {"lambda", d.lambda}});
    nodes.push_back(ojson{{"id", c.id},
                          {"parent", c.parent < 0 ? ojson(nullptr) : ojson(c.parent)},
                          {"lambda_birth", c.lambda_birth},
                          {"lambda_death", c.lambda_death},
                          {"stability", c.stability},
                          {"size", c.size},
                          {"children", c.children},
                          {"departures", deps}});
  }
  return ojson{{"clusters", nodes}};
}

}  // namespace gridcoh
