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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "expect_error.hpp"
#include "gridcoh/spectrum.hpp"
#include "oracles.hpp"

using namespace gridcoh;

namespace {

std::vector<double> random_signal(std::size_t n, std::mt19937_64& rng)
{
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

VelocityTraceSet velocities(const std::vector<std::vector<double>>& rows, double dt)
{
  VelocityTraceSet v;
  v.bus_ids = oracle::bus_names(rows.size());
  v.velocities = Matrix<double>(rows.size(), rows.front().size());
  for (std::size_t b = 0; b < rows.size(); ++b)
    for (std::size_t k = 0; k < rows[b].size(); ++k) v.velocities(b, k) = rows[b][k];
  v.meta = SamplingMeta{dt, 0.0, rows.front().size()};
  return v;
}

}  // namespace

TEST(Dft, ConstantSignal)
{
  std::vector<double> x{1, 1, 1, 1};
  auto s = dft(x);
  EXPECT_NEAR(std::abs(s.bins[0] - cplx(4, 0)), 0.0, 1e-15);
  for (int f = 1; f < 4; ++f) EXPECT_NEAR(std::abs(s.bins[f]), 0.0, 1e-15);
}

TEST(Dft, UnitImpulse)
{
  for (std::size_t n : {4u, 5u, 12u}) {
    std::vector<double> x(n, 0.0);
    x[0] = 1.0;
    auto s = dft(x);
    for (auto& b : s.bins) EXPECT_NEAR(std::abs(b - cplx(1, 0)), 0.0, 1e-15);
  }
}

TEST(Dft, BinWidth)
{
  std::vector<double> x(200, 0.0);
  EXPECT_DOUBLE_EQ(dft(x, 0.01).bin_width_hz, 0.5);
  EXPECT_EQ(dft(x, 0.01).bins.size(), 200u);
}

TEST(Dft, EmptyInputIsAnError)
{
  EXPECT_ERRC(dft(std::vector<double>{}), Errc::insufficient_samples);
}

TEST(Dft, MatchesDirectSumOracle)
{
  std::mt19937_64 rng(64);
  // Power-of-two (FFT path) and general lengths (direct path).
  for (std::size_t n : {1u, 2u, 3u, 7u, 64u, 100u, 127u, 128u, 199u, 256u, 1000u, 1024u}) {
    auto x = random_signal(n, rng);
    EXPECT_LE(oracle::max_rel_error(dft(x).bins, oracle::dft_sum(x)), 1e-9) << "n=" << n;
  }
}

TEST(Dft, ParsevalUpTo4096)
{
  std::mt19937_64 rng(4096);
  for (std::size_t n : {16u, 300u, 1023u, 2048u, 4096u}) {
    auto x = random_signal(n, rng);
    long double time = 0, freq = 0;
    for (double v : x) time += static_cast<long double>(v) * v;
    for (auto& c : dft(x).bins) freq += std::norm(c);
    EXPECT_NEAR(static_cast<double>(freq / n / time), 1.0, 1e-9) << "n=" << n;
  }
}

TEST(Dft, Linearity)
{
  std::mt19937_64 rng(3);
  for (std::size_t n : {64u, 90u}) {
    auto x = random_signal(n, rng), y = random_signal(n, rng);
    const double a = 2.5, b = -0.75;
    std::vector<double> z(n);
    for (std::size_t k = 0; k < n; ++k) z[k] = a * x[k] + b * y[k];
    auto X = dft(x).bins, Y = dft(y).bins, Z = dft(z).bins;
    std::vector<cplx> combo(n);
    for (std::size_t f = 0; f < n; ++f) combo[f] = a * X[f] + b * Y[f];
    EXPECT_LE(oracle::max_rel_error(Z, combo), 1e-9);
  }
}

TEST(SelectBins, HalfSpectrumDcAndBand)
{
  BandSpec all{false, std::nullopt, std::nullopt, std::nullopt};
  EXPECT_EQ(select_bins(8, 1.0, all), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  all.drop_dc = true;
  EXPECT_EQ(select_bins(9, 1.0, all), (std::vector<std::size_t>{1, 2, 3, 4}));
  // N=200 at dt=0.01: 0.5 Hz per bin, 0.1..2.5 Hz keeps bins 1..5.
  EXPECT_EQ(select_bins(200, 0.01, BandSpec{}), (std::vector<std::size_t>{1, 2, 3, 4, 5}));
  BandSpec capped;
  capped.max_bins = 3;
  EXPECT_EQ(select_bins(200, 0.01, capped), (std::vector<std::size_t>{1, 2, 3}));
}

TEST(BandSpec, Validation)
{
  BandSpec b;
  b.f_lo_hz = 3.0;
  EXPECT_ERRC(b.validate(), Errc::parameter);
  b = BandSpec{};
  b.max_bins = 0;
  EXPECT_ERRC(b.validate(), Errc::parameter);
}

TEST(FeatureMatrix, ShapeContract)
{
  std::mt19937_64 rng(5);
  std::vector<std::vector<double>> rows;
  for (int b = 0; b < 3; ++b) rows.push_back(random_signal(64, rng));
  BandSpec band{true, std::nullopt, std::nullopt, 16};
  auto fm = build_feature_matrix(velocities(rows, 0.01), band);
  EXPECT_EQ(fm.rows.rows(), 3u);
  EXPECT_EQ(fm.rows.cols(), 16u);
  EXPECT_EQ(fm.bin_index.front(), 1u);
  EXPECT_EQ(fm.bin_index.back(), 16u);
  EXPECT_DOUBLE_EQ(fm.freq_hz[1], 2.0 / 0.64);
}

TEST(FeatureMatrix, ConstantVelocityGivesZeroRows)
{
  auto fm = build_feature_matrix(velocities({{2, 2, 2, 2, 2, 2, 2, 2}, {-1, -1, -1, -1, -1, -1, -1, -1}}, 0.1),
                                 BandSpec{true, std::nullopt, std::nullopt, std::nullopt});
  for (const auto& c : fm.rows.data()) EXPECT_LT(std::abs(c), 1e-14);
  EXPECT_NEAR(fm.total_energy[0], 4.0 * 64.0, 1e-9);
}

TEST(FeatureMatrix, ShiftedCopiesShareMagnitudes)
{
  std::mt19937_64 rng(9);
  const std::size_t n = 90;
  auto x = random_signal(n, rng);
  std::vector<double> y(n);
  for (std::size_t k = 0; k < n; ++k) y[k] = x[(k + 13) % n];
  BandSpec band{true, std::nullopt, std::nullopt, std::nullopt};
  auto fm = build_feature_matrix(velocities({x, y}, 0.02), band);
  auto ox = oracle::dft_sum(x);
  for (std::size_t i = 0; i < fm.rows.cols(); ++i) {
    const double ref = static_cast<double>(std::abs(ox[fm.bin_index[i]]));
    EXPECT_NEAR(std::abs(fm.rows(0, i)), ref, 1e-9 * std::max(ref, 1.0));
    EXPECT_NEAR(std::abs(fm.rows(1, i)), ref, 1e-9 * std::max(ref, 1.0));
  }
}

TEST(FeatureMatrix, RowsEqualRecomputedBandRestrictedDft)
{
  std::mt19937_64 rng(12);
  std::vector<std::vector<double>> rows;
  for (int b = 0; b < 4; ++b) rows.push_back(random_signal(199, rng));
  auto fm = build_feature_matrix(velocities(rows, 0.01));
  for (std::size_t b = 0; b < 4; ++b) {
    auto full = dft(rows[b], 0.01).bins;
    for (std::size_t i = 0; i < fm.bin_index.size(); ++i) {
      EXPECT_EQ(fm.rows(b, i), full[fm.bin_index[i]]);
      EXPECT_LE(fm.freq_hz[i], 2.5);
      EXPECT_GE(fm.freq_hz[i], 0.1);
    }
  }
}

TEST(FeatureMatrix, Errors)
{
  EXPECT_ERRC(build_feature_matrix(velocities({{1, 2, 3}}, 0.1)), Errc::insufficient_samples);
  // 1 s of data: 1 Hz bins, only 1 and 2 Hz fall in 0.1..2.5, but cap at one.
  BandSpec one;
  one.max_bins = 1;
  std::vector<double> x(100, 0.0);
  EXPECT_ERRC(build_feature_matrix(velocities({x}, 0.01), one), Errc::band_too_narrow);
  // Band that excludes every eligible bin.
  BandSpec high{true, 40.0, 45.0, std::nullopt};
  EXPECT_ERRC(build_feature_matrix(velocities({x}, 0.1), high), Errc::band_too_narrow);
}

TEST(SpectrumCsv, HeaderAndRows)
{
  std::vector<double> x{0, 1, 0, -1, 0, 1, 0, -1};
  auto fm = build_feature_matrix(velocities({x}, 1.0), BandSpec{true, std::nullopt, std::nullopt, std::nullopt});
  std::ostringstream out;
  write_spectrum_csv(out, fm);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "bus_id,f_hz,mag,phase_rad");
  std::size_t count = 0;
  while (std::getline(in, line)) ++count;
  EXPECT_EQ(count, fm.bin_index.size());
}
