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
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "gridcoh/csv.hpp"
#include "gridcoh/error.hpp"
#include "gridcoh/labels.hpp"
#include "gridcoh/matrix.hpp"
#include "gridcoh/spectrum.hpp"

namespace gridcoh {

/// Clamped real Pearson similarity between buses: symmetric, unit diagonal,
/// entries in [0, 1].
struct SimilarityMatrix {
  std::vector<std::string> bus_ids;
  Matrix<double> values;
  std::vector<std::size_t> degenerate_buses;

  std::size_t size() const { return bus_ids.size(); }
};

/// Group coherency (GCI) and separation (GSI) of one window. Either index is
/// empty when the partition has no pair of the required kind.
struct IntegrityIndices {
  std::optional<double> gci;
  std::optional<double> gsi;
  std::size_t window_index = 0;
  double t_start = 0.0;
};

// Centered energy at or below this fraction of the raw energy is treated as zero.
inline constexpr double kDegenerateRelEnergy = 1e-20;

namespace detail {

inline double centered_energy(std::span<const cplx> x, cplx mean)
{
  double e = 0.0;
  for (const auto& v : x) e += std::norm(v - mean);
  return e;
}

inline cplx mean_of(std::span<const cplx> x)
{
  cplx s{};
  for (const auto& v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline bool is_degenerate(std::span<const cplx> x)
{
  double raw = 0.0;
  for (const auto& v : x) raw += std::norm(v);
  const double centered = centered_energy(x, mean_of(x));
  return !(centered > 0.0) || centered <= kDegenerateRelEnergy * raw;
}

}  // namespace detail

/// Complex Pearson coefficient; the second argument is conjugated, so
/// complex_pearson(x, y) == conj(complex_pearson(y, x)).
inline cplx complex_pearson(std::span<const cplx> x, std::span<const cplx> y)
{
  if (x.size() != y.size()) throw Error(Errc::parameter, "pearson inputs differ in length");
  if (x.size() < 2) throw Error(Errc::parameter, "pearson needs at least two entries");
  if (detail::is_degenerate(x) || detail::is_degenerate(y))
    throw Error(Errc::degenerate_signal, "zero centered energy");

  const cplx mx = detail::mean_of(x);
  const cplx my = detail::mean_of(y);
  cplx num{};
  double ex = 0.0;
  double ey = 0.0;
  for (std::size_t f = 0; f < x.size(); ++f) {
    const cplx a = x[f] - mx;
    const cplx b = y[f] - my;
    num += a * std::conj(b);
    ex += std::norm(a);
    ey += std::norm(b);
  }
  return num / std::sqrt(ex * ey);
}

/// True when a feature row carries no usable band content: either its
/// centered energy vanishes or the band holds a negligible share of the
/// row's total spectral energy.
inline bool degenerate_row(std::span<const cplx> row, double total_energy)
{
  if (detail::is_degenerate(row)) return true;
  double band = 0.0;
  for (const auto& v : row) band += std::norm(v);
  return band <= kDegenerateRelEnergy * total_energy;
}

/// S[i][j] = max(0, Re r_ij) off the diagonal, 1 on it. Degenerate rows get
/// 0 against every other bus and are listed in degenerate_buses.
inline SimilarityMatrix similarity_matrix(const FeatureMatrix& features)
{
  const std::size_t nb = features.rows.rows();
  if (nb < 2) throw Error(Errc::parameter, "similarity needs at least two buses");

  SimilarityMatrix out;
  out.bus_ids = features.bus_ids;
  out.values = Matrix<double>(nb, nb, 0.0);

  std::vector<char> degenerate(nb, 0);
  for (std::size_t i = 0; i < nb; ++i) {
    const double total = i < features.total_energy.size() ? features.total_energy[i] : 0.0;
    if (degenerate_row(features.rows.row(i), total)) {
      degenerate[i] = 1;
      out.degenerate_buses.push_back(i);
    }
  }

  for (std::size_t i = 0; i < nb; ++i) {
    out.values(i, i) = 1.0;
    for (std::size_t j = i + 1; j < nb; ++j) {
      double s = 0.0;
      if (!degenerate[i] && !degenerate[j]) {
        const double re = complex_pearson(features.rows.row(i), features.rows.row(j)).real();
        s = std::clamp(re, 0.0, 1.0);
      }
      out.values(i, j) = s;
      out.values(j, i) = s;
    }
  }
  return out;
}

namespace detail {

inline void check_cover(const SimilarityMatrix& s, const Partition& p)
{
  if (p.labels.size() != s.size()) throw Error(Errc::consistency, "partition size differs from similarity matrix");
  for (int l : p.labels)
    if (l < 0 || l >= p.k) throw Error(Errc::consistency, "partition has unassigned or out-of-range labels");
}

template <typename Pred>
std::optional<double> mean_pairs(const SimilarityMatrix& s, const Partition& p, Pred keep)
{
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      if (keep(p.labels[i], p.labels[j])) {
        sum += s.values(i, j);
        ++count;
      }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

}  // namespace detail

/// Mean similarity over unordered within-group pairs (self-pairs excluded).
inline double group_coherency_index(const SimilarityMatrix& s, const Partition& p)
{
  detail::check_cover(s, p);
  auto v = detail::mean_pairs(s, p, [](int a, int b) { return a == b; });
  if (!v) throw Error(Errc::undefined_index, "GCI needs at least one within-group pair");
  return *v;
}

/// Mean similarity over unordered cross-group pairs. Lower means the groups
/// are better separated.
inline double group_separation_index(const SimilarityMatrix& s, const Partition& p)
{
  detail::check_cover(s, p);
  auto v = detail::mean_pairs(s, p, [](int a, int b) { return a != b; });
  if (!v) throw Error(Errc::undefined_index, "GSI needs at least two groups");
  return *v;
}

/// Both indices, leaving undefined ones empty instead of throwing.
inline IntegrityIndices integrity_indices(const SimilarityMatrix& s, const Partition& p, std::size_t window_index = 0,
                                          double t_start = 0.0)
{
  detail::check_cover(s, p);
  IntegrityIndices out;
  out.gci = detail::mean_pairs(s, p, [](int a, int b) { return a == b; });
  out.gsi = detail::mean_pairs(s, p, [](int a, int b) { return a != b; });
  out.window_index = window_index;
  out.t_start = t_start;
  return out;
}

/// Bus ids as the first row and column, 17 significant digits per cell.
inline void write_similarity_csv(std::ostream& out, const SimilarityMatrix& s)
{
  out << "bus";
  for (const auto& id : s.bus_ids) out << ',' << id;
  out << '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << s.bus_ids[i];
    for (std::size_t j = 0; j < s.size(); ++j) out << ',' << csv::format_double(s.values(i, j));
    out << '\n';
  }
}

}  // namespace gridcoh
