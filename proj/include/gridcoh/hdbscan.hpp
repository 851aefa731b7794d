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
#include <limits>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "gridcoh/coherency.hpp"
#include "gridcoh/error.hpp"
#include "gridcoh/labels.hpp"
#include "gridcoh/matrix.hpp"

namespace gridcoh {

/// Symmetric dissimilarities in [0, 1] with a zero diagonal. The triangle
/// inequality is not assumed anywhere.
struct DistanceMatrix {
  Matrix<double> values;

  std::size_t size() const { return values.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return values(i, j); }
};

struct HdbscanParams {
  std::size_t m_pts = 4;             // self-inclusive neighbourhood size
  std::size_t min_cluster_size = 3;
  double d_floor = 1e-12;            // guards lambda = 1/d at zero distance

  void validate(std::size_t n) const
  {
    if (m_pts < 2) throw Error(Errc::parameter, "m_pts must be at least 2");
    if (min_cluster_size < 2) throw Error(Errc::parameter, "min_cluster_size must be at least 2");
    if (!(d_floor > 0.0)) throw Error(Errc::parameter, "d_floor must be positive");
    if (m_pts > n)
      throw Error(Errc::parameter, "m_pts=" + std::to_string(m_pts) + " exceeds bus count " + std::to_string(n));
    if (min_cluster_size > n)
      throw Error(Errc::parameter,
                  "min_cluster_size=" + std::to_string(min_cluster_size) + " exceeds bus count " + std::to_string(n));
  }
};

struct MstEdge {
  std::size_t a = 0;  // a < b
  std::size_t b = 0;
  double weight = 0.0;

  friend bool operator==(const MstEdge&, const MstEdge&) = default;
};

/// Total order used for every tie-break on edges: (weight, min end, max end).
inline bool edge_less(const MstEdge& x, const MstEdge& y)
{
  return std::tie(x.weight, x.a, x.b) < std::tie(y.weight, y.a, y.b);
}

/// Single-linkage merge. Leaves are buses 0..n-1; the node created by merge
/// i has id n + i.
struct Merge {
  std::size_t a = 0;
  std::size_t b = 0;
  double distance = 0.0;
  std::size_t size = 0;
};

struct Dendrogram {
  std::size_t leaf_count = 0;
  std::vector<Merge> merges;

  std::size_t node_size(std::size_t node) const { return node < leaf_count ? 1 : merges[node - leaf_count].size; }
};

struct Departure {
  std::size_t bus = 0;
  double lambda = 0.0;
};

struct CondensedCluster {
  std::size_t id = 0;
  int parent = -1;
  double lambda_birth = 0.0;
  double lambda_death = 0.0;
  double stability = 0.0;
  std::size_t size = 0;
  std::vector<std::size_t> children;
  std::vector<Departure> departures;
};

/// clusters[0] is the root; children always carry larger ids than parents.
struct CondensedTree {
  std::size_t leaf_count = 0;
  std::vector<CondensedCluster> clusters;
};

inline DistanceMatrix similarity_to_distance(const SimilarityMatrix& s)
{
  const std::size_t n = s.size();
  DistanceMatrix d{Matrix<double>(n, n, 0.0)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) d.values(i, j) = 1.0 - s.values(i, j);
  return d;
}

/// m_pts-th smallest entry of each row, counting the zero self-distance.
inline std::vector<double> core_distances(const DistanceMatrix& d, const HdbscanParams& params)
{
  const std::size_t n = d.size();
  if (params.m_pts > n)
    throw Error(Errc::parameter, "m_pts=" + std::to_string(params.m_pts) + " exceeds bus count " + std::to_string(n));
  if (params.m_pts < 1) throw Error(Errc::parameter, "m_pts must be positive");
  std::vector<double> core(n);
  std::vector<double> row(n);
  for (std::size_t p = 0; p < n; ++p) {
    auto src = d.values.row(p);
    std::copy(src.begin(), src.end(), row.begin());
    row[p] = 0.0;
    auto nth = row.begin() + static_cast<std::ptrdiff_t>(params.m_pts - 1);
    std::nth_element(row.begin(), nth, row.end());
    core[p] = *nth;
  }
  return core;
}

inline DistanceMatrix mutual_reachability(const DistanceMatrix& d, const std::vector<double>& core)
{
  const std::size_t n = d.size();
  if (core.size() != n) throw Error(Errc::consistency, "core distance count differs from matrix size");
  DistanceMatrix mr{Matrix<double>(n, n, 0.0)};
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b) mr.values(a, b) = std::max({core[a], core[b], d.values(a, b)});
  return mr;
}

/// Dense Prim. Comparing candidate edges under edge_less makes the tree
/// unique even when weights tie. Output is sorted by edge_less.
inline std::vector<MstEdge> minimum_spanning_tree(const DistanceMatrix& mr)
{
  const std::size_t n = mr.size();
  if (n < 2) throw Error(Errc::parameter, "spanning tree needs at least two points");

  std::vector<char> in_tree(n, 0);
  std::vector<MstEdge> best(n);
  auto candidate = [&](std::size_t u, std::size_t v) {
    return MstEdge{std::min(u, v), std::max(u, v), mr.values(u, v)};
  };
  in_tree[0] = 1;
  for (std::size_t v = 1; v < n; ++v) best[v] = candidate(0, v);

  std::vector<MstEdge> edges;
  edges.reserve(n - 1);
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t pick = n;
    for (std::size_t v = 0; v < n; ++v)
      if (!in_tree[v] && (pick == n || edge_less(best[v], best[pick]))) pick = v;
    in_tree[pick] = 1;
    edges.push_back(best[pick]);
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      auto c = candidate(pick, v);
      if (edge_less(c, best[v])) best[v] = c;
    }
  }
  std::sort(edges.begin(), edges.end(), edge_less);
  return edges;
}

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

  std::size_t find(std::size_t x)
  {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  /// Returns the surviving root, or the common root when already joined.
  std::size_t unite(std::size_t a, std::size_t b)
  {
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

/// Single-linkage dendrogram from a spanning tree, merging in edge_less order.
inline Dendrogram build_hierarchy(std::vector<MstEdge> mst, std::size_t n)
{
  if (n < 2) throw Error(Errc::structural, "hierarchy needs at least two points");
  if (mst.size() != n - 1)
    throw Error(Errc::structural, "spanning tree over " + std::to_string(n) + " points needs " +
                                      std::to_string(n - 1) + " edges, got " + std::to_string(mst.size()));
  std::sort(mst.begin(), mst.end(), edge_less);

  Dendrogram out;
  out.leaf_count = n;
  detail::DisjointSets sets(n);
  std::vector<std::size_t> node_of(n);
  std::iota(node_of.begin(), node_of.end(), std::size_t{0});
  std::vector<std::size_t> size_of(n, 1);

  for (const auto& e : mst) {
    if (e.a >= n || e.b >= n || e.a == e.b) throw Error(Errc::structural, "spanning tree edge out of range");
    const std::size_t ra = sets.find(e.a);
    const std::size_t rb = sets.find(e.b);
    if (ra == rb) throw Error(Errc::structural, "edge list contains a cycle");
    const std::size_t merged_size = size_of[ra] + size_of[rb];
    out.merges.push_back(Merge{node_of[ra], node_of[rb], e.weight, merged_size});
    const std::size_t root = sets.unite(ra, rb);
    node_of[root] = n + out.merges.size() - 1;
    size_of[root] = merged_size;
  }
  return out;
}

namespace detail {

inline void collect_leaves(const Dendrogram& d, std::size_t node, std::vector<std::size_t>& out)
{
  std::vector<std::size_t> stack{node};
  while (!stack.empty()) {
    std::size_t x = stack.back();
    stack.pop_back();
    if (x < d.leaf_count) {
      out.push_back(x);
    } else {
      const auto& m = d.merges[x - d.leaf_count];
      stack.push_back(m.b);
      stack.push_back(m.a);
    }
  }
}

}  // namespace detail

namespace detail {

// Components that join at an internal node's level: merges at exactly the
// same distance are folded together, which makes the result independent of
// the order in which tied edges were merged.
inline void level_children(const Dendrogram& d, std::size_t node, std::vector<std::size_t>& out)
{
  out.clear();
  const std::size_t n = d.leaf_count;
  const double level = d.merges[node - n].distance;
  std::vector<std::size_t> stack{node};
  while (!stack.empty()) {
    std::size_t x = stack.back();
    stack.pop_back();
    if (x >= n && (x == node || d.merges[x - n].distance == level)) {
      stack.push_back(d.merges[x - n].b);
      stack.push_back(d.merges[x - n].a);
    } else {
      out.push_back(x);
    }
  }
}

}  // namespace detail

/// Walks the dendrogram top-down with lambda = 1/max(distance, d_floor).
/// At each level a cluster falls apart into the components joined there.
/// Two or more components with at least min_cluster_size points become child
/// clusters; smaller components leave as point departures at that lambda.
inline CondensedTree condense_tree(const Dendrogram& dendro, const HdbscanParams& params)
{
  if (params.min_cluster_size < 2) throw Error(Errc::parameter, "min_cluster_size must be at least 2");
  const std::size_t n = dendro.leaf_count;
  if (n < 2 || dendro.merges.size() != n - 1) throw Error(Errc::structural, "incomplete dendrogram");

  std::vector<std::size_t> min_leaf(2 * n - 1);
  std::iota(min_leaf.begin(), min_leaf.begin() + static_cast<std::ptrdiff_t>(n), std::size_t{0});
  for (std::size_t i = 0; i < dendro.merges.size(); ++i)
    min_leaf[n + i] = std::min(min_leaf[dendro.merges[i].a], min_leaf[dendro.merges[i].b]);

  CondensedTree tree;
  tree.leaf_count = n;
  tree.clusters.push_back(CondensedCluster{0, -1, 0.0, 0.0, 0.0, n, {}, {}});

  std::vector<std::pair<std::size_t, std::size_t>> stack{{2 * n - 2, 0}};
  std::vector<std::size_t> kids, big, leaves;
  while (!stack.empty()) {
    auto [node, cluster] = stack.back();
    stack.pop_back();
    const double lambda = 1.0 / std::max(dendro.merges[node - n].distance, params.d_floor);
    detail::level_children(dendro, node, kids);
    std::sort(kids.begin(), kids.end(), [&](std::size_t x, std::size_t y) { return min_leaf[x] < min_leaf[y]; });

    big.clear();
    for (auto k : kids) {
      if (dendro.node_size(k) >= params.min_cluster_size) {
        big.push_back(k);
        continue;
      }
      leaves.clear();
      detail::collect_leaves(dendro, k, leaves);
      for (auto p : leaves) tree.clusters[cluster].departures.push_back(Departure{p, lambda});
    }

    if (big.size() == 1) {
      stack.emplace_back(big[0], cluster);
    } else if (big.size() > 1) {
      tree.clusters[cluster].lambda_death = lambda;
      for (auto k : big) {
        const std::size_t id = tree.clusters.size();
        tree.clusters.push_back(
            CondensedCluster{id, static_cast<int>(cluster), lambda, lambda, 0.0, dendro.node_size(k), {}, {}});
        tree.clusters[cluster].children.push_back(id);
      }
      const auto& ids = tree.clusters[cluster].children;
      for (std::size_t i = big.size(); i-- > 0;) stack.emplace_back(big[i], ids[i]);
    }
  }

  for (auto& c : tree.clusters) {
    std::sort(c.departures.begin(), c.departures.end(), [](const Departure& x, const Departure& y) {
      return std::tie(x.lambda, x.bus) < std::tie(y.lambda, y.bus);
    });
    double stability = 0.0;
    double last = c.lambda_birth;
    for (const auto& d : c.departures) {
      stability += d.lambda - c.lambda_birth;
      last = std::max(last, d.lambda);
    }
    if (!c.children.empty()) {
      std::size_t child_points = 0;
      for (auto k : c.children) child_points += tree.clusters[k].size;
      stability += static_cast<double>(child_points) * (c.lambda_death - c.lambda_birth);
    } else {
      c.lambda_death = last;
    }
    c.stability = stability;
  }
  return tree;
}

namespace detail {

inline void subtree_points(const CondensedTree& tree, std::size_t cluster, std::vector<std::size_t>& out)
{
  std::vector<std::size_t> stack{cluster};
  while (!stack.empty()) {
    const auto& c = tree.clusters[stack.back()];
    stack.pop_back();
    for (const auto& d : c.departures) out.push_back(d.bus);
    for (auto k : c.children) stack.push_back(k);
  }
}

}  // namespace detail

/// Flags the clusters chosen by excess-of-mass selection. The root takes
/// part in the comparison like any other cluster.
inline std::vector<char> select_clusters(const CondensedTree& tree)
{
  const std::size_t nc = tree.clusters.size();
  std::vector<char> selected(nc, 0);
  std::vector<double> best(nc, 0.0);
  for (std::size_t c = nc; c-- > 0;) {
    const auto& node = tree.clusters[c];
    if (node.children.empty()) {
      selected[c] = 1;
      best[c] = node.stability;
      continue;
    }
    std::vector<double> parts;
    for (auto k : node.children) parts.push_back(best[k]);
    std::sort(parts.begin(), parts.end());  // summation order independent of child ids
    const double below = std::accumulate(parts.begin(), parts.end(), 0.0);
    if (node.stability > below) {
      selected[c] = 1;
      best[c] = node.stability;
      std::vector<std::size_t> stack(node.children.begin(), node.children.end());
      while (!stack.empty()) {
        std::size_t x = stack.back();
        stack.pop_back();
        selected[x] = 0;
        for (auto k : tree.clusters[x].children) stack.push_back(k);
      }
    } else {
      best[c] = below;
    }
  }
  return selected;
}

/// Flat clustering from the condensed tree. Points that left the hierarchy
/// before reaching a selected cluster are noise.
inline Partition extract_clusters(const CondensedTree& tree)
{
  const std::size_t n = tree.leaf_count;
  if (tree.clusters.size() <= 1) return Partition{std::vector<int>(n, 0), 1};

  const auto selected = select_clusters(tree);
  std::vector<int> raw(n, kNoise);
  std::vector<std::size_t> points;
  int next = 0;
  for (std::size_t c = 0; c < tree.clusters.size(); ++c) {
    if (!selected[c]) continue;
    points.clear();
    detail::subtree_points(tree, c, points);
    for (auto p : points) raw[p] = next;
    ++next;
  }
  return canonicalize(raw);
}

/// Clusters of the dendrogram cut at `eps`, restricted to points whose core
/// distance is within eps; everything else is noise.
inline Partition flat_cut(const Dendrogram& dendro, const std::vector<double>& core, double eps)
{
  const std::size_t n = dendro.leaf_count;
  detail::DisjointSets sets(2 * n);
  for (std::size_t i = 0; i < dendro.merges.size(); ++i) {
    const auto& m = dendro.merges[i];
    if (m.distance <= eps) {
      sets.unite(m.a, n + i);
      sets.unite(m.b, n + i);
    }
  }
  std::vector<int> raw(n, kNoise);
  for (std::size_t p = 0; p < n; ++p)
    if (core[p] <= eps) raw[p] = static_cast<int>(sets.find(p));
  return canonicalize(raw);
}

/// DBSCAN* at a fixed radius on raw distances: core points have at least
/// m_pts neighbours within eps (self included), clusters are the connected
/// components of core points under d <= eps, and there are no border points.
inline Partition dbscan_star_cut(const DistanceMatrix& d, double eps, const HdbscanParams& params)
{
  if (!(eps > 0.0)) throw Error(Errc::parameter, "eps must be positive");
  const std::size_t n = d.size();
  std::vector<char> is_core(n, 0);
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t count = 0;
    for (std::size_t q = 0; q < n; ++q)
      if (q == p || d.values(p, q) <= eps) ++count;
    is_core[p] = count >= params.m_pts;
  }
  std::vector<int> raw(n, kNoise);
  int next = 0;
  std::vector<std::size_t> queue;
  for (std::size_t s = 0; s < n; ++s) {
    if (!is_core[s] || raw[s] != kNoise) continue;
    raw[s] = next;
    queue.assign(1, s);
    while (!queue.empty()) {
      std::size_t p = queue.back();
      queue.pop_back();
      for (std::size_t q = 0; q < n; ++q) {
        if (is_core[q] && raw[q] == kNoise && d.values(p, q) <= eps) {
          raw[q] = next;
          queue.push_back(q);
        }
      }
    }
    ++next;
  }
  return canonicalize(raw);
}

/// Moves every noise bus into the cluster with the highest mean similarity
/// to its members (ties to the lower id). With no clusters at all, every bus
/// lands in cluster 0.
inline Partition assign_noise(const Partition& partition, const SimilarityMatrix& s)
{
  if (partition.labels.size() != s.size()) throw Error(Errc::consistency, "partition size differs from similarity");
  if (partition.k == 0) return Partition{std::vector<int>(partition.labels.size(), 0), 1};

  const auto groups = members(partition);
  Partition out = partition;
  for (std::size_t i = 0; i < partition.labels.size(); ++i) {
    if (partition.labels[i] != kNoise) continue;
    int best = 0;
    double best_mean = -1.0;
    for (std::size_t c = 0; c < groups.size(); ++c) {
      if (groups[c].empty()) continue;
      double sum = 0.0;
      for (auto j : groups[c]) sum += s.values(i, j);
      const double mean = sum / static_cast<double>(groups[c].size());
      if (mean > best_mean) {
        best_mean = mean;
        best = static_cast<int>(c);
      }
    }
    out.labels[i] = best;
  }
  return out;
}

/// Every intermediate of one clustering run, kept for reporting.
struct HdbscanResult {
  DistanceMatrix distances;
  std::vector<double> core;
  DistanceMatrix reachability;
  std::vector<MstEdge> mst;
  Dendrogram dendrogram;
  CondensedTree tree;
  Partition clusters;  // may contain noise
};

inline HdbscanResult hdbscan(const SimilarityMatrix& s, const HdbscanParams& params)
{
  params.validate(s.size());
  HdbscanResult r;
  r.distances = similarity_to_distance(s);
  r.core = core_distances(r.distances, params);
  r.reachability = mutual_reachability(r.distances, r.core);
  r.mst = minimum_spanning_tree(r.reachability);
  r.dendrogram = build_hierarchy(r.mst, s.size());
  r.tree = condense_tree(r.dendrogram, params);
  r.clusters = extract_clusters(r.tree);
  return r;
}

}  // namespace gridcoh
