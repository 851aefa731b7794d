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

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "gridcoh/coherency.hpp"
#include "gridcoh/csv.hpp"
#include "gridcoh/error.hpp"
#include "gridcoh/labels.hpp"

namespace gridcoh {

struct TopoEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  std::string line_id;

  friend bool operator==(const TopoEdge&, const TopoEdge&) = default;
};

/// Undirected, connected transmission graph over the same buses as the
/// angle data.
struct GridTopology {
  std::vector<std::string> bus_ids;
  std::vector<TopoEdge> edges;

  std::vector<std::vector<std::size_t>> adjacency() const
  {
    std::vector<std::vector<std::size_t>> adj(bus_ids.size());
    for (const auto& e : edges) {
      adj[e.a].push_back(e.b);
      adj[e.b].push_back(e.a);
    }
    for (auto& nbrs : adj) {
      std::sort(nbrs.begin(), nbrs.end());
      nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
    return adj;
  }
};

namespace detail {

/// Connected components of the subgraph induced by `keep`, each sorted, in
/// order of smallest member.
template <typename Keep>
std::vector<std::vector<std::size_t>> components(const std::vector<std::vector<std::size_t>>& adj, Keep keep)
{
  const std::size_t n = adj.size();
  std::vector<char> seen(n, 0);
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s] || !keep(s)) continue;
    out.emplace_back();
    seen[s] = 1;
    stack.assign(1, s);
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      out.back().push_back(u);
      for (auto v : adj[u])
        if (!seen[v] && keep(v)) {
          seen[v] = 1;
          stack.push_back(v);
        }
    }
    std::sort(out.back().begin(), out.back().end());
  }
  return out;
}

}  // namespace detail

inline void validate(const GridTopology& topo)
{
  const std::size_t n = topo.bus_ids.size();
  for (const auto& e : topo.edges) {
    if (e.a >= n || e.b >= n) throw Error(Errc::format, "topology edge endpoint out of range");
    if (e.a == e.b) throw Error(Errc::format, "topology self-loop at bus '" + topo.bus_ids[e.a] + "'");
  }
  if (n > 0 && detail::components(topo.adjacency(), [](std::size_t) { return true; }).size() != 1)
    throw Error(Errc::structural, "topology is not connected");
}

/// Parses `bus_a,bus_b[,line_id]` rows; bus names resolve against `bus_ids`.
inline GridTopology read_topology_csv(std::istream& in, const std::vector<std::string>& bus_ids)
{
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < bus_ids.size(); ++i) index.emplace(bus_ids[i], i);

  std::string line;
  if (!csv::read_line(in, line)) throw Error(Errc::format, "empty topology file");
  auto header = csv::split(line);
  if (header.size() < 2 || header.size() > 3 || header[0] != "bus_a" || header[1] != "bus_b" ||
      (header.size() == 3 && header[2] != "line_id"))
    throw Error(Errc::format, "topology header must be bus_a,bus_b[,line_id]");

  GridTopology topo;
  topo.bus_ids = bus_ids;
  std::size_t line_no = 1;
  while (csv::read_line(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    auto f = csv::split(line);
    if (f.size() != header.size())
      throw Error(Errc::format, "topology line " + std::to_string(line_no) + " has " + std::to_string(f.size()) +
                                    " fields");
    auto ia = index.find(f[0]);
    auto ib = index.find(f[1]);
    if (ia == index.end() || ib == index.end())
      throw Error(Errc::format, "topology line " + std::to_string(line_no) + " names an unknown bus");
    topo.edges.push_back(TopoEdge{ia->second, ib->second, f.size() == 3 ? f[2] : std::string{}});
  }
  validate(topo);
  return topo;
}

inline GridTopology load_topology_csv(const std::string& path, const std::vector<std::string>& bus_ids)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::format, "cannot open '" + path + "'");
  return read_topology_csv(in, bus_ids);
}

/// Makes every cluster a connected subgraph of the grid. Each cluster keeps
/// its initially largest component (ties: smallest bus index) as an anchor;
/// any other component moves as a unit to the adjacent cluster with the
/// largest summed similarity across the shared boundary edges (ties: lower
/// id). Anchor buses never change label.
inline Partition enforce_island_connectivity(const Partition& partition, const GridTopology& topo,
                                             const SimilarityMatrix& s)
{
  const std::size_t n = topo.bus_ids.size();
  if (partition.labels.size() != n || s.size() != n)
    throw Error(Errc::consistency, "partition, topology and similarity disagree on bus count");
  for (int l : partition.labels)
    if (l < 0 || l >= partition.k) throw Error(Errc::consistency, "partition must cover every bus");

  const auto adj = topo.adjacency();
  Partition out = partition;
  std::vector<int>& label = out.labels;

  std::vector<char> anchor(n, 0);
  for (int c = 0; c < out.k; ++c) {
    auto comps = detail::components(adj, [&](std::size_t v) { return label[v] == c; });
    if (comps.empty()) continue;
    // components() orders by smallest member, so the first maximum wins ties.
    auto largest = std::max_element(comps.begin(), comps.end(),
                                    [](const auto& x, const auto& y) { return x.size() < y.size(); });
    for (auto v : *largest) anchor[v] = 1;
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (int c = 0; c < out.k; ++c) {
      auto comps = detail::components(adj, [&](std::size_t v) { return label[v] == c; });
      if (comps.size() < 2) continue;
      for (const auto& comp : comps) {
        bool anchored = std::any_of(comp.begin(), comp.end(), [&](std::size_t v) { return anchor[v] != 0; });
        if (anchored) continue;
        std::map<int, double> boundary;
        for (auto u : comp)
          for (auto v : adj[u])
            if (label[v] != c) boundary[label[v]] += s.values(u, v);
        if (boundary.empty()) continue;
        int target = boundary.begin()->first;
        double best = boundary.begin()->second;
        for (const auto& [cluster, weight] : boundary)
          if (weight > best) {
            best = weight;
            target = cluster;
          }
        for (auto u : comp) label[u] = target;
        changed = true;
      }
    }
  }
  return out;
}

/// Edges whose endpoints lie in different islands, normalised to a < b and
/// sorted by (a, b).
inline std::vector<TopoEdge> cutset(const Partition& partition, const GridTopology& topo)
{
  if (partition.labels.size() != topo.bus_ids.size())
    throw Error(Errc::consistency, "partition size differs from topology");
  std::vector<TopoEdge> out;
  for (const auto& e : topo.edges) {
    if (partition.labels[e.a] == partition.labels[e.b]) continue;
    out.push_back(TopoEdge{std::min(e.a, e.b), std::max(e.a, e.b), e.line_id});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const TopoEdge& x, const TopoEdge& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  return out;
}

/// True when every cluster induces a connected subgraph.
inline bool islands_connected(const Partition& partition, const GridTopology& topo)
{
  const auto adj = topo.adjacency();
  for (int c = 0; c < partition.k; ++c) {
    auto comps = detail::components(adj, [&](std::size_t v) { return partition.labels[v] == c; });
    if (comps.size() > 1) return false;
  }
  return true;
}

struct Island {
  int id = 0;
  std::vector<std::size_t> buses;
};

struct IslandReport {
  std::vector<std::string> bus_ids;
  std::vector<Island> islands;
  std::vector<TopoEdge> cutset;
  IntegrityIndices indices;
  std::vector<std::optional<double>> internal_similarity;  // per island; empty for singletons
  std::vector<std::size_t> degenerate_buses;
};

inline IslandReport island_report(const Partition& partition, const GridTopology& topo, const SimilarityMatrix& s,
                                  const IntegrityIndices& indices)
{
  if (topo.bus_ids != s.bus_ids || partition.labels.size() != s.size())
    throw Error(Errc::consistency, "report inputs describe different bus sets");
  auto check = integrity_indices(s, partition, indices.window_index, indices.t_start);
  if (check.gci != indices.gci || check.gsi != indices.gsi)
    throw Error(Errc::consistency, "supplied GCI/GSI differ from the partition's indices");
  if (!islands_connected(partition, topo)) throw Error(Errc::consistency, "an island is not connected");

  IslandReport r;
  r.bus_ids = s.bus_ids;
  r.indices = indices;
  r.degenerate_buses = s.degenerate_buses;
  r.cutset = cutset(partition, topo);
  auto groups = members(partition);
  for (std::size_t c = 0; c < groups.size(); ++c) {
    r.islands.push_back(Island{static_cast<int>(c), groups[c]});
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t x = 0; x < groups[c].size(); ++x)
      for (std::size_t y = x + 1; y < groups[c].size(); ++y) {
        sum += s.values(groups[c][x], groups[c][y]);
        ++count;
      }
    r.internal_similarity.push_back(count ? std::optional<double>(sum / static_cast<double>(count)) : std::nullopt);
  }
  return r;
}

}  // namespace gridcoh
