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
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "gridcoh/error.hpp"
#include "gridcoh/matrix.hpp"
#include "gridcoh/timeseries.hpp"

namespace gridcoh {

struct Machine {
  std::string id;
  double H = 1.0;   // inertia constant, s
  double D = 0.0;   // damping, pu
  double Pm = 0.0;  // mechanical power, pu
  double E = 1.0;   // internal EMF magnitude, pu
  std::optional<double> delta0;  // initial rotor angle, rad
  double omega0 = 0.0;           // initial speed deviation, rad/s
};

/// Classical machines behind a reduced network. G and B are the symmetric
/// real and imaginary parts of the reduced admittance matrix.
struct SwingSystem {
  std::vector<Machine> machines;
  Matrix<double> G;
  Matrix<double> B;
  double nominal_hz = 60.0;

  std::size_t size() const { return machines.size(); }
  double omega_sync() const { return 2.0 * std::numbers::pi * nominal_hz; }
};

/// Scales admittance entry (i, j) and its mirror by `scale` while
/// t_start <= t < t_end. scale 0 opens the branch.
struct FaultEvent {
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  double scale = 0.0;
};

struct SwingState {
  std::vector<double> delta;  // rad
  std::vector<double> omega;  // rad/s deviation from synchronous speed
};

inline void validate(const SwingSystem& sys)
{
  const std::size_t m = sys.size();
  if (m == 0) throw Error(Errc::format, "swing system has no machines");
  if (sys.G.rows() != m || sys.G.cols() != m || sys.B.rows() != m || sys.B.cols() != m)
    throw Error(Errc::format, "admittance matrix size differs from machine count");
  if (!(sys.nominal_hz > 0.0)) throw Error(Errc::format, "nominal frequency must be positive");
  std::unordered_set<std::string> ids;
  for (const auto& mc : sys.machines) {
    if (!ids.insert(mc.id).second) throw Error(Errc::format, "duplicate machine id '" + mc.id + "'");
    if (!(mc.H > 0.0)) throw Error(Errc::format, "machine '" + mc.id + "' needs H > 0");
    if (!std::isfinite(mc.D) || !std::isfinite(mc.Pm) || !std::isfinite(mc.E) || !std::isfinite(mc.omega0))
      throw Error(Errc::format, "machine '" + mc.id + "' has non-finite parameters");
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (!std::isfinite(sys.G(i, j)) || !std::isfinite(sys.B(i, j)))
        throw Error(Errc::format, "non-finite admittance entry");
      if (sys.G(i, j) != sys.G(j, i) || sys.B(i, j) != sys.B(j, i))
        throw Error(Errc::format, "admittance matrix is not symmetric");
    }
}

inline void validate(const FaultEvent& f, std::size_t machine_count)
{
  if (!(f.t_start < f.t_end)) throw Error(Errc::format, "fault needs t_start < t_end");
  if (!(f.scale >= 0.0)) throw Error(Errc::format, "fault scale must be non-negative");
  if (f.i >= machine_count || f.j >= machine_count) throw Error(Errc::format, "fault targets an unknown machine");
}

/// P_e,i = sum_j E_i E_j (B_ij sin(d_i - d_j) + G_ij cos(d_i - d_j)).
inline std::vector<double> electrical_power(const SwingSystem& sys, const std::vector<double>& delta,
                                            const Matrix<double>& g, const Matrix<double>& b)
{
  const std::size_t m = sys.size();
  std::vector<double> pe(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double d = delta[i] - delta[j];
      acc += sys.machines[i].E * sys.machines[j].E * (b(i, j) * std::sin(d) + g(i, j) * std::cos(d));
    }
    pe[i] = acc;
  }
  return pe;
}

inline std::vector<double> electrical_power(const SwingSystem& sys, const std::vector<double>& delta)
{
  return electrical_power(sys, delta, sys.G, sys.B);
}

/// Rotor angles with zero speed at which P_e equals P_m for every machine.
/// Machine 0 is the angle reference (its delta0, or 0). Newton iteration on
/// the remaining machines; fails when the reference machine stays
/// unbalanced, i.e. the system has no equilibrium.
inline SwingState steady_state(const SwingSystem& sys, double tolerance = 1e-12, int max_iter = 200)
{
  validate(sys);
  const std::size_t m = sys.size();
  SwingState st{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
  st.delta[0] = sys.machines[0].delta0.value_or(0.0);
  for (std::size_t i = 1; i < m; ++i) st.delta[i] = sys.machines[i].delta0.value_or(st.delta[0]);
  if (m == 1) {
    if (std::abs(sys.machines[0].Pm - electrical_power(sys, st.delta)[0]) > 1e-9)
      throw Error(Errc::integration_diverged, "single machine is not balanced");
    return st;
  }

  const auto n = static_cast<Eigen::Index>(m - 1);
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    const auto pe = electrical_power(sys, st.delta);
    Eigen::VectorXd residual(n);
    for (std::size_t i = 1; i < m; ++i) residual(static_cast<Eigen::Index>(i - 1)) = sys.machines[i].Pm - pe[i];
    if (residual.lpNorm<Eigen::Infinity>() < tolerance) {
      converged = true;
      break;
    }
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 1; i < m; ++i) {
      for (std::size_t k = 0; k < m; ++k) {
        if (k == i) continue;
        const double d = st.delta[i] - st.delta[k];
        const double ee = sys.machines[i].E * sys.machines[k].E;
        const double dpe = ee * (sys.B(i, k) * std::cos(d) - sys.G(i, k) * std::sin(d));
        jac(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(i - 1)) += dpe;
        if (k > 0) jac(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(k - 1)) -= dpe;
      }
    }
    // Newton step: jac = dPe/d(delta), solve jac * step = Pm - Pe.
    Eigen::VectorXd step = jac.fullPivLu().solve(residual);
    if (!step.allFinite()) break;
    const double largest = step.lpNorm<Eigen::Infinity>();
    if (largest > 0.5) step *= 0.5 / largest;
    for (std::size_t i = 1; i < m; ++i) st.delta[i] += step(static_cast<Eigen::Index>(i - 1));
  }
  const auto pe = electrical_power(sys, st.delta);
  if (!converged || std::abs(sys.machines[0].Pm - pe[0]) > 1e-8)
    throw Error(Errc::integration_diverged, "no power-balance equilibrium found");
  return st;
}

/// Initial state from the machine records: equilibrium angles unless every
/// machine gives delta0, plus the configured omega0 offsets.
inline SwingState initial_state(const SwingSystem& sys)
{
  bool all_given = true;
  for (const auto& mc : sys.machines) all_given = all_given && mc.delta0.has_value();
  SwingState st;
  if (all_given) {
    for (const auto& mc : sys.machines) st.delta.push_back(*mc.delta0);
  } else {
    st.delta = steady_state(sys).delta;
  }
  for (const auto& mc : sys.machines) st.omega.push_back(mc.omega0);
  return st;
}

/// Fixed-step classical RK4 integration of
///   d(delta)/dt = omega
///   (2H/omega_s) d(omega)/dt = Pm - D omega - Pe(delta).
/// The admittance used for a step is the one in force at the step's start
/// time. Output rows are machine internal angles sampled every dt from t=0.
inline AngleTraceSet integrate_swing(const SwingSystem& sys, const std::vector<FaultEvent>& faults,
                                     const SwingState& initial, double dt, double t_end)
{
  validate(sys);
  const std::size_t m = sys.size();
  for (const auto& f : faults) validate(f, m);
  if (!(dt > 0.0) || dt > 0.02) throw Error(Errc::parameter, "integration step must be in (0, 0.02] s");
  if (!(t_end > 0.0)) throw Error(Errc::parameter, "t_end must be positive");
  if (initial.delta.size() != m || initial.omega.size() != m)
    throw Error(Errc::parameter, "initial state size differs from machine count");
  for (std::size_t i = 0; i < m; ++i)
    if (!std::isfinite(initial.delta[i]) || !std::isfinite(initial.omega[i]))
      throw Error(Errc::parameter, "initial state is not finite");

  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  const double ws = sys.omega_sync();

  AngleTraceSet out;
  for (const auto& mc : sys.machines) out.bus_ids.push_back(mc.id);
  out.angles = Matrix<double>(m, steps + 1);
  out.meta = SamplingMeta{dt, 0.0, steps + 1};

  std::vector<double> delta = initial.delta;
  std::vector<double> omega = initial.omega;
  for (std::size_t i = 0; i < m; ++i) out.angles(i, 0) = delta[i];

  Matrix<double> g = sys.G;
  Matrix<double> b = sys.B;
  std::vector<double> k1d(m), k1w(m), k2d(m), k2w(m), k3d(m), k3w(m), k4d(m), k4w(m), td(m), tw(m);

  auto rates = [&](const std::vector<double>& d, const std::vector<double>& w, std::vector<double>& dd,
                   std::vector<double>& dw) {
    const auto pe = electrical_power(sys, d, g, b);
    for (std::size_t i = 0; i < m; ++i) {
      const auto& mc = sys.machines[i];
      dd[i] = w[i];
      dw[i] = ws / (2.0 * mc.H) * (mc.Pm - mc.D * w[i] - pe[i]);
    }
  };

  for (std::size_t step = 0; step < steps; ++step) {
    const double t = static_cast<double>(step) * dt;
    g = sys.G;
    b = sys.B;
    for (const auto& f : faults) {
      const double slack = 1e-9 * dt;
      if (f.t_start <= t + slack && t + slack < f.t_end) {
        g(f.i, f.j) *= f.scale;
        b(f.i, f.j) *= f.scale;
        if (f.i != f.j) {
          g(f.j, f.i) *= f.scale;
          b(f.j, f.i) *= f.scale;
        }
      }
    }

    rates(delta, omega, k1d, k1w);
    for (std::size_t i = 0; i < m; ++i) {
      td[i] = delta[i] + 0.5 * dt * k1d[i];
      tw[i] = omega[i] + 0.5 * dt * k1w[i];
    }
    rates(td, tw, k2d, k2w);
    for (std::size_t i = 0; i < m; ++i) {
      td[i] = delta[i] + 0.5 * dt * k2d[i];
      tw[i] = omega[i] + 0.5 * dt * k2w[i];
    }
    rates(td, tw, k3d, k3w);
    for (std::size_t i = 0; i < m; ++i) {
      td[i] = delta[i] + dt * k3d[i];
      tw[i] = omega[i] + dt * k3w[i];
    }
    rates(td, tw, k4d, k4w);
    for (std::size_t i = 0; i < m; ++i) {
      delta[i] += dt / 6.0 * (k1d[i] + 2.0 * k2d[i] + 2.0 * k3d[i] + k4d[i]);
      omega[i] += dt / 6.0 * (k1w[i] + 2.0 * k2w[i] + 2.0 * k3w[i] + k4w[i]);
      if (!std::isfinite(delta[i]) || !std::isfinite(omega[i]))
        throw Error(Errc::integration_diverged,
                    "state of machine '" + sys.machines[i].id + "' became non-finite at t=" + std::to_string(t + dt));
      out.angles(i, step + 1) = delta[i];
    }
  }
  return out;
}

/// Synthetic coherent groups: every bus of a group shares the same sinusoid,
/// on top of a common linear trend, plus independent Gaussian jitter.
struct GroupSpec {
  struct Group {
    std::vector<std::string> buses;
    double f_hz = 1.0;
    double amplitude = 0.1;  // rad
    double phase = 0.0;      // rad
  };
  std::vector<Group> groups;
  double sigma = 0.0;  // rad
  double trend = 0.0;  // rad/s

  void validate() const
  {
    if (groups.empty()) throw Error(Errc::format, "group spec has no groups");
    if (!(sigma >= 0.0)) throw Error(Errc::format, "jitter sigma must be non-negative");
    std::unordered_set<std::string> seen;
    for (const auto& g : groups) {
      if (!(g.f_hz > 0.0)) throw Error(Errc::format, "group frequency must be positive");
      for (const auto& b : g.buses)
        if (!seen.insert(b).second) throw Error(Errc::format, "bus '" + b + "' appears in two groups");
    }
  }
};

/// theta_i(t) = trend t + a_g sin(2 pi f_g t + phi_g) + jitter_i(t), buses in
/// group order. Same seed, same traces.
inline AngleTraceSet planted_group_signals(const GroupSpec& spec, double dt, double t_end, std::uint64_t seed)
{
  spec.validate();
  if (!(dt > 0.0) || !(t_end > 0.0)) throw Error(Errc::parameter, "dt and t_end must be positive");
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  std::size_t nb = 0;
  for (const auto& g : spec.groups) nb += g.buses.size();

  AngleTraceSet out;
  out.angles = Matrix<double>(nb, steps + 1);
  out.meta = SamplingMeta{dt, 0.0, steps + 1};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  std::size_t row = 0;
  for (const auto& g : spec.groups) {
    for (const auto& bus : g.buses) {
      out.bus_ids.push_back(bus);
      for (std::size_t k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        double v = spec.trend * t + g.amplitude * std::sin(2.0 * std::numbers::pi * g.f_hz * t + g.phase);
        if (spec.sigma > 0.0) v += spec.sigma * noise(rng);
        out.angles(row, k) = v;
      }
      ++row;
    }
  }
  return out;
}

}  // namespace gridcoh
