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

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "gridcoh/csv.hpp"
#include "gridcoh/error.hpp"
#include "gridcoh/matrix.hpp"
#include "gridcoh/timeseries.hpp"

namespace gridcoh {

using cplx = std::complex<double>;

struct ComplexSpectrum {
  std::vector<cplx> bins;
  double bin_width_hz = 0.0;
};

/// Which DFT bins become coherency features. Only the lower half-spectrum
/// (bin index <= N/2) is eligible.
struct BandSpec {
  bool drop_dc = true;
  std::optional<double> f_lo_hz = 0.1;
  std::optional<double> f_hi_hz = 2.5;
  std::optional<std::size_t> max_bins;

  void validate() const
  {
    if (f_lo_hz && f_hi_hz && !(*f_lo_hz < *f_hi_hz))
      throw Error(Errc::parameter, "band f_lo must be below f_hi");
    if (max_bins && *max_bins < 1) throw Error(Errc::parameter, "band max_bins must be at least 1");
  }
};

struct FeatureMatrix {
  std::vector<std::string> bus_ids;
  Matrix<cplx> rows;               // N_B x n
  std::vector<std::size_t> bin_index;
  std::vector<double> freq_hz;
  std::vector<double> total_energy;  // per bus, sum over every DFT bin of |X_f|^2
  BandSpec band;
  double dt = 0.0;
};

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Twiddle factors e^{-j 2 pi k / n} for k in [0, n).
inline std::vector<cplx> twiddles(std::size_t n)
{
  std::vector<cplx> w(n);
  for (std::size_t k = 0; k < n; ++k)
    w[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
  return w;
}

inline void fft_radix2(std::vector<cplx>& a)
{
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const auto w = twiddles(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t step = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        cplx u = a[i + k];
        cplx v = a[i + k + len / 2] * w[k * step];
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

inline std::vector<cplx> dft_direct(std::span<const double> x)
{
  const std::size_t n = x.size();
  const auto w = twiddles(n);
  std::vector<cplx> out(n);
  for (std::size_t f = 0; f < n; ++f) {
    cplx acc{};
    std::size_t idx = 0;  // (f * k) mod n
    for (std::size_t k = 0; k < n; ++k) {
      acc += x[k] * w[idx];
      idx += f;
      if (idx >= n) idx -= n;
    }
    out[f] = acc;
  }
  return out;
}

}  // namespace detail

/// Full N-point DFT, X[f] = sum_k x[k] e^{-j 2 pi f k / N}. Radix-2 FFT for
/// power-of-two lengths, direct summation otherwise.
inline ComplexSpectrum dft(std::span<const double> signal, double dt = 1.0)
{
  const std::size_t n = signal.size();
  if (n == 0) throw Error(Errc::insufficient_samples, "dft of an empty signal");
  ComplexSpectrum out;
  out.bin_width_hz = 1.0 / (static_cast<double>(n) * dt);
  if (detail::is_pow2(n)) {
    out.bins.assign(signal.begin(), signal.end());
    detail::fft_radix2(out.bins);
  } else {
    out.bins = detail::dft_direct(signal);
  }
  return out;
}

/// Bin indices selected by `band` for an n-point transform at spacing dt.
inline std::vector<std::size_t> select_bins(std::size_t n, double dt, const BandSpec& band)
{
  band.validate();
  const double width = 1.0 / (static_cast<double>(n) * dt);
  std::vector<std::size_t> out;
  for (std::size_t f = band.drop_dc ? 1 : 0; f <= n / 2; ++f) {
    const double hz = static_cast<double>(f) * width;
    if (band.f_lo_hz && hz < *band.f_lo_hz) continue;
    if (band.f_hi_hz && hz > *band.f_hi_hz) continue;
    out.push_back(f);
    if (band.max_bins && out.size() == *band.max_bins) break;
  }
  return out;
}

/// Per-bus DFT of the velocity rows restricted to `band`.
inline FeatureMatrix build_feature_matrix(const VelocityTraceSet& velocities, const BandSpec& band = {})
{
  const std::size_t n = velocities.velocities.cols();
  if (n < 4) throw Error(Errc::insufficient_samples, "feature extraction needs at least 4 velocity samples");
  const double dt = velocities.meta.dt;
  auto bins = select_bins(n, dt, band);
  if (bins.size() < 2)
    throw Error(Errc::band_too_narrow, "band selects " + std::to_string(bins.size()) + " bins, need at least 2");

  FeatureMatrix out;
  out.bus_ids = velocities.bus_ids;
  out.band = band;
  out.dt = dt;
  out.bin_index = bins;
  const double width = 1.0 / (static_cast<double>(n) * dt);
  for (auto f : bins) out.freq_hz.push_back(static_cast<double>(f) * width);

  const std::size_t nb = velocities.velocities.rows();
  out.rows = Matrix<cplx>(nb, bins.size());
  out.total_energy.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    auto spec = dft(velocities.velocities.row(b), dt);
    double energy = 0.0;
    for (const auto& c : spec.bins) energy += std::norm(c);
    out.total_energy[b] = energy;
    for (std::size_t i = 0; i < bins.size(); ++i) out.rows(b, i) = spec.bins[bins[i]];
  }
  return out;
}

/// Debug dump: `bus_id,f_hz,mag,phase_rad`, one line per retained bin.
inline void write_spectrum_csv(std::ostream& out, const FeatureMatrix& features)
{
  out << "bus_id,f_hz,mag,phase_rad\n";
  for (std::size_t b = 0; b < features.bus_ids.size(); ++b) {
    for (std::size_t i = 0; i < features.freq_hz.size(); ++i) {
      const auto& c = features.rows(b, i);
      out << features.bus_ids[b] << ',' << csv::format_double(features.freq_hz[i]) << ','
          << csv::format_double(std::abs(c)) << ',' << csv::format_double(std::arg(c)) << '\n';
    }
  }
}

}  // namespace gridcoh
