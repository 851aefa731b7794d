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

// Reference implementations used only by the tests. Each one follows the
// textbook definition as literally as possible and shares no code with the
// library beyond plain data types.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <numbers>
#include <queue>
#include <random>
#include <vector>

#include "gridcoh/gridcoh.hpp"

namespace oracle {

using cplxl = std::complex<long double>;

/// Direct O(N^2) DFT sum in long double with the angle reduced exactly.
inline std::vector<cplxl> dft_sum(const std::vector<double>& x)
{
  const std::size_t n = x.size();
  std::vector<cplxl> out(n);
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  std::vector<cplxl> root(n);
  for (std::size_t r = 0; r < n; ++r) {
    const long double ang = -two_pi * static_cast<long double>(r) / static_cast<long double>(n);
    root[r] = cplxl(std::cos(ang), std::sin(ang));
  }
  for (std::size_t f = 0; f < n; ++f) {
    cplxl acc = 0.0L;
    for (std::size_t k = 0; k < n; ++k) acc += static_cast<long double>(x[k]) * root[(f * k) % n];
    out[f] = acc;
  }
  return out;
}

/// Largest |a_f - b_f| relative to the largest |b_f| (or 1 for a zero spectrum).
template <typename A, typename B>
double max_rel_error(const A& a, const B& b)
{
  long double scale = 0.0L, err = 0.0L;
  for (std::size_t i = 0; i < b.size(); ++i) {
    scale = std::max(scale, static_cast<long double>(std::abs(cplxl(b[i]))));
    err = std::max(err, static_cast<long double>(std::abs(cplxl(a[i]) - cplxl(b[i]))));
  }
  return static_cast<double>(err / std::max(scale, 1.0L));
}

/// Pearson correlation written out from scratch, conjugating y.
inline std::complex<double> pearson(const std::vector<std::complex<double>>& x,
                                    const std::vector<std::complex<double>>& y)
{
  const std::size_t n = x.size();
  cplxl mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += cplxl(x[i]);
    my += cplxl(y[i]);
  }
  mx /= static_cast<long double>(n);
  my /= static_cast<long double>(n);
  cplxl num = 0;
  long double ex = 0, ey = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cplxl a = cplxl(x[i]) - mx, b = cplxl(y[i]) - my;
    num += a * std::conj(b);
    ex += std::norm(a);
    ey += std::norm(b);
  }
  cplxl r = num / std::sqrt(ex * ey);
  return {static_cast<double>(r.real()), static_cast<double>(r.imag())};
}

/// Mean of S over unordered pairs selected by `take(label_i, label_j)`.
template <typename Take>
std::optional<double> pair_mean(const gridcoh::Matrix<double>& s, const std::vector<int>& labels, Take take)
{
  double sum = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = 0; j < labels.size(); ++j)
      if (i < j && take(labels[i], labels[j])) {
        sum += s(i, j);
        ++count;
      }
  if (!count) return std::nullopt;
  return sum / static_cast<double>(count);
}

/// m-th smallest entry of each row by full sort.
inline std::vector<double> core_by_sort(const gridcoh::Matrix<double>& d, std::size_t m)
{
  std::vector<double> out;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    std::vector<double> row(d.row(i).begin(), d.row(i).end());
    std::sort(row.begin(), row.end());
    out.push_back(row[m - 1]);
  }
  return out;
}

/// Kruskal over all edges sorted by weight; returns the total weight.
inline double kruskal_weight(const gridcoh::Matrix<double>& w)
{
  const std::size_t n = w.rows();
  struct E {
    double w;
    std::size_t a, b;
  };
  std::vector<E> edges;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) edges.push_back({w(a, b), a, b});
  std::sort(edges.begin(), edges.end(), [](const E& x, const E& y) { return x.w < y.w; });
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x];
    return x;
  };
  double total = 0;
  for (const auto& e : edges) {
    auto ra = find(e.a), rb = find(e.b);
    if (ra == rb) continue;
    parent[ra] = rb;
    total += e.w;
  }
  return total;
}

/// Component id per vertex (BFS, ids in order of smallest member) over the
/// vertices with keep[v]; others get -1.
inline std::vector<int> components(const std::vector<std::vector<std::size_t>>& adj, const std::vector<bool>& keep)
{
  std::vector<int> comp(adj.size(), -1);
  int next = 0;
  for (std::size_t s = 0; s < adj.size(); ++s) {
    if (!keep[s] || comp[s] != -1) continue;
    std::queue<std::size_t> q;
    q.push(s);
    comp[s] = next;
    while (!q.empty()) {
      auto u = q.front();
      q.pop();
      for (auto v : adj[u])
        if (keep[v] && comp[v] == -1) {
          comp[v] = next;
          q.push(v);
        }
    }
    ++next;
  }
  return comp;
}

/// DBSCAN* straight from the definitions: a core point has at least m points
/// (itself included) within eps; clusters are the components of core points
/// joined when their distance is at most eps; everything else is noise.
inline std::vector<int> dbscan_star(const gridcoh::Matrix<double>& d, double eps, std::size_t m)
{
  const std::size_t n = d.rows();
  std::vector<bool> core(n);
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t count = 0;
    for (std::size_t q = 0; q < n; ++q) count += d(p, q) <= eps;
    core[p] = count >= m;
  }
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      if (p != q && d(p, q) <= eps) adj[p].push_back(q);
  return components(adj, core);
}

/// Adjusted Rand index from the contingency table; noise labels count as
/// one ordinary label.
inline double ari(const std::vector<int>& a, const std::vector<int>& b)
{
  const std::size_t n = a.size();
  std::map<std::pair<int, int>, long long> table;
  std::map<int, long long> ra, rb;
  for (std::size_t i = 0; i < n; ++i) {
    ++table[{a[i], b[i]}];
    ++ra[a[i]];
    ++rb[b[i]];
  }
  auto c2 = [](long long x) { return static_cast<double>(x) * static_cast<double>(x - 1) / 2.0; };
  double sum_ij = 0, sum_a = 0, sum_b = 0;
  for (auto& [k, v] : table) sum_ij += c2(v);
  for (auto& [k, v] : ra) sum_a += c2(v);
  for (auto& [k, v] : rb) sum_b += c2(v);
  const double total = c2(static_cast<long long>(n));
  const double expected = sum_a * sum_b / total;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (sum_ij - expected) / (max_index - expected);
}

/// Random symmetric matrix with zero diagonal and entries in [lo, hi).
inline gridcoh::Matrix<double> random_symmetric(std::size_t n, std::mt19937_64& rng, double lo = 0.0,
                                                double hi = 1.0)
{
  std::uniform_real_distribution<double> u(lo, hi);
  gridcoh::Matrix<double> m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m(i, j) = m(j, i) = u(rng);
  return m;
}

inline std::vector<std::string> bus_names(std::size_t n, const std::string& prefix = "b")
{
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

/// Similarity matrix with planted groups: within-group entries drawn from
/// [within_lo, 1], cross-group entries from [0, cross_hi].
inline gridcoh::SimilarityMatrix planted_similarity(const std::vector<int>& groups, std::mt19937_64& rng,
                                                    double within_lo = 0.9, double cross_hi = 0.3)
{
  const std::size_t n = groups.size();
  std::uniform_real_distribution<double> within(within_lo, 1.0), cross(0.0, cross_hi);
  gridcoh::SimilarityMatrix s{bus_names(n), gridcoh::Matrix<double>(n, n, 1.0), {}};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      s.values(i, j) = s.values(j, i) = groups[i] == groups[j] ? within(rng) : cross(rng);
  return s;
}

/// Random group labels 0..k-1 over n items, every group at least min_size.
inline std::vector<int> random_groups(std::size_t n, int k, std::size_t min_size, std::mt19937_64& rng)
{
  std::vector<int> labels;
  for (int g = 0; g < k; ++g)
    for (std::size_t i = 0; i < min_size; ++i) labels.push_back(g);
  std::uniform_int_distribution<int> pick(0, k - 1);
  while (labels.size() < n) labels.push_back(pick(rng));
  std::shuffle(labels.begin(), labels.end(), rng);
  return labels;
}

}  // namespace oracle
