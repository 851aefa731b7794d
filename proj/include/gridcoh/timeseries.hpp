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
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "gridcoh/csv.hpp"
#include "gridcoh/error.hpp"
#include "gridcoh/matrix.hpp"

namespace gridcoh {

struct SamplingMeta {
  double dt = 0.0;  // seconds per sample
  double t0 = 0.0;  // seconds
  std::size_t count = 0;

  double duration() const { return count < 2 ? 0.0 : static_cast<double>(count - 1) * dt; }
};

/// Uniformly sampled, already-unwrapped bus voltage angles in radians.
/// One row per bus.
struct AngleTraceSet {
  std::vector<std::string> bus_ids;
  Matrix<double> angles;
  SamplingMeta meta;

  std::size_t bus_count() const { return bus_ids.size(); }
  std::size_t sample_count() const { return angles.cols(); }
};

/// Backward-difference angular velocities, rad/s. meta.count is N-1 and
/// meta.t0 is the time of the second angle sample.
struct VelocityTraceSet {
  std::vector<std::string> bus_ids;
  Matrix<double> velocities;
  SamplingMeta meta;
};

/// Pairwise integrated angle-deviation difference, rad*s. Antisymmetric.
struct VariationMatrix {
  Matrix<double> values;
};

struct WindowSpec {
  std::size_t length = 200;
  std::size_t stride = 50;
};

namespace detail {

inline void check_unique(const std::vector<std::string>& ids)
{
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (id.empty()) throw Error(Errc::format, "empty bus id");
    if (!seen.insert(id).second) throw Error(Errc::format, "duplicate bus id '" + id + "'");
  }
}

}  // namespace detail

/// Checks the AngleTraceSet invariants; throws Errc::format on violation.
inline void validate(const AngleTraceSet& traces)
{
  detail::check_unique(traces.bus_ids);
  if (traces.angles.rows() != traces.bus_ids.size())
    throw Error(Errc::format, "angle rows do not match bus count");
  if (traces.meta.count != traces.angles.cols())
    throw Error(Errc::format, "sample count does not match angle columns");
  if (!(traces.meta.dt > 0.0) || !std::isfinite(traces.meta.dt))
    throw Error(Errc::format, "dt must be positive and finite");
  for (double v : traces.angles.data())
    if (!std::isfinite(v)) throw Error(Errc::format, "non-finite angle value");
}

/// Parses the angle CSV format: header `t,<bus>,...` then numeric rows.
/// dt is the median successive time delta; any delta deviating from it by
/// more than `tolerance` (relative) is rejected.
inline AngleTraceSet read_angle_csv(std::istream& in, double tolerance)
{
  std::string line;
  if (!csv::read_line(in, line)) throw Error(Errc::format, "empty angle file");
  // Tolerate a UTF-8 byte order mark.
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  auto header = csv::split(line);
  if (header.size() < 2) throw Error(Errc::format, "header needs a time column and at least one bus");

  AngleTraceSet out;
  out.bus_ids.assign(header.begin() + 1, header.end());
  detail::check_unique(out.bus_ids);
  const std::size_t nb = out.bus_ids.size();

  std::vector<double> times;
  std::vector<std::vector<double>> columns(nb);
  std::size_t line_no = 1;
  while (csv::read_line(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    auto fields = csv::split(line);
    if (fields.size() != nb + 1)
      throw Error(Errc::format, "line " + std::to_string(line_no) + ": expected " +
                                    std::to_string(nb + 1) + " fields, got " + std::to_string(fields.size()));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      auto v = csv::parse_double(fields[c]);
      if (!v || !std::isfinite(*v))
        throw Error(Errc::format, "line " + std::to_string(line_no) + ": bad number '" + fields[c] + "'");
      if (c == 0)
        times.push_back(*v);
      else
        columns[c - 1].push_back(*v);
    }
  }
  if (times.size() < 2) throw Error(Errc::insufficient_samples, "need at least two samples");

  std::vector<double> deltas(times.size() - 1);
  for (std::size_t k = 0; k + 1 < times.size(); ++k) deltas[k] = times[k + 1] - times[k];
  std::vector<double> sorted = deltas;
  auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
  std::nth_element(sorted.begin(), mid, sorted.end());
  double dt = *mid;
  if (sorted.size() % 2 == 0) {
    double lower = *std::max_element(sorted.begin(), mid);
    dt = 0.5 * (dt + lower);
  }
  if (!(dt > 0.0)) throw Error(Errc::non_uniform_sampling, "time column is not increasing");
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (std::abs(deltas[k] - dt) / dt > tolerance)
      throw Error(Errc::non_uniform_sampling, "sample " + std::to_string(k + 1) + " deviates from dt=" +
                                                  csv::format_double(dt));
  }

  out.meta = SamplingMeta{dt, times.front(), times.size()};
  out.angles = Matrix<double>(nb, times.size());
  for (std::size_t b = 0; b < nb; ++b) std::copy(columns[b].begin(), columns[b].end(), out.angles.row(b).begin());
  return out;
}

inline AngleTraceSet load_angle_csv(const std::string& path, double tolerance = 1e-3)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::format, "cannot open '" + path + "'");
  return read_angle_csv(in, tolerance);
}

/// Writes LF-terminated rows with 17 significant digits; times are t0 + k*dt.
inline void write_angle_csv(std::ostream& out, const AngleTraceSet& traces)
{
  out << 't';
  for (const auto& id : traces.bus_ids) out << ',' << id;
  out << '\n';
  for (std::size_t k = 0; k < traces.sample_count(); ++k) {
    out << csv::format_double(traces.meta.t0 + static_cast<double>(k) * traces.meta.dt);
    for (std::size_t b = 0; b < traces.bus_count(); ++b) out << ',' << csv::format_double(traces.angles(b, k));
    out << '\n';
  }
}

inline void save_angle_csv(const std::string& path, const AngleTraceSet& traces)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::format, "cannot write '" + path + "'");
  write_angle_csv(out, traces);
}

inline VelocityTraceSet angular_velocity(const AngleTraceSet& traces)
{
  const std::size_t n = traces.sample_count();
  if (n < 2) throw Error(Errc::insufficient_samples, "angular velocity needs at least two samples");
  VelocityTraceSet out;
  out.bus_ids = traces.bus_ids;
  out.velocities = Matrix<double>(traces.bus_count(), n - 1);
  const double dt = traces.meta.dt;
  for (std::size_t b = 0; b < traces.bus_count(); ++b) {
    auto theta = traces.angles.row(b);
    auto omega = out.velocities.row(b);
    for (std::size_t k = 0; k + 1 < n; ++k) omega[k] = (theta[k + 1] - theta[k]) / dt;
  }
  out.meta = SamplingMeta{dt, traces.meta.t0 + dt, n - 1};
  return out;
}

/// Right rectangle-rule integral over (t0, t0 + T] of the difference between
/// per-bus angle deviations, each measured from `baseline_sample`.
inline VariationMatrix variation_index(const AngleTraceSet& traces, std::size_t baseline_sample = 0)
{
  const std::size_t nb = traces.bus_count();
  const std::size_t n = traces.sample_count();
  if (baseline_sample >= n)
    throw Error(Errc::parameter, "baseline sample " + std::to_string(baseline_sample) + " out of range");

  Matrix<double> dev(nb, n);
  for (std::size_t b = 0; b < nb; ++b) {
    const double base = traces.angles(b, baseline_sample);
    for (std::size_t k = 0; k < n; ++k) dev(b, k) = traces.angles(b, k) - base;
  }

  VariationMatrix out{Matrix<double>(nb, nb, 0.0)};
  const double dt = traces.meta.dt;
  for (std::size_t i = 0; i < nb; ++i) {
    for (std::size_t j = i + 1; j < nb; ++j) {
      double sum = 0.0;
      for (std::size_t k = 1; k < n; ++k) sum += dev(i, k) - dev(j, k);
      out.values(i, j) = sum * dt;
      out.values(j, i) = -out.values(i, j);
    }
  }
  return out;
}

/// Sub-traces starting at 0, stride, 2*stride, ... while they fit.
inline std::vector<AngleTraceSet> sliding_windows(const AngleTraceSet& traces, const WindowSpec& spec)
{
  const std::size_t n = traces.sample_count();
  if (spec.length < 2) throw Error(Errc::parameter, "window length must be at least 2");
  if (spec.stride < 1) throw Error(Errc::parameter, "window stride must be at least 1");
  if (spec.length > n)
    throw Error(Errc::window_too_long,
                "window of " + std::to_string(spec.length) + " samples exceeds " + std::to_string(n));

  std::vector<AngleTraceSet> out;
  for (std::size_t offset = 0; offset + spec.length <= n; offset += spec.stride) {
    AngleTraceSet w;
    w.bus_ids = traces.bus_ids;
    w.angles = Matrix<double>(traces.bus_count(), spec.length);
    for (std::size_t b = 0; b < traces.bus_count(); ++b) {
      auto src = traces.angles.row(b).subspan(offset, spec.length);
      std::copy(src.begin(), src.end(), w.angles.row(b).begin());
    }
    w.meta = SamplingMeta{traces.meta.dt, traces.meta.t0 + static_cast<double>(offset) * traces.meta.dt, spec.length};
    out.push_back(std::move(w));
  }
  return out;
}

/// Writes an antisymmetric variation matrix with bus ids on both axes.
inline void write_variation_csv(std::ostream& out, const std::vector<std::string>& bus_ids, const VariationMatrix& v)
{
  out << "bus";
  for (const auto& id : bus_ids) out << ',' << id;
  out << '\n';
  for (std::size_t i = 0; i < bus_ids.size(); ++i) {
    out << bus_ids[i];
    for (std::size_t j = 0; j < bus_ids.size(); ++j) out << ',' << csv::format_double(v.values(i, j));
    out << '\n';
  }
}

}  // namespace gridcoh
