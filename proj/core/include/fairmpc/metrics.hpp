#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fairmpc/model.hpp"
#include "fairmpc/sim.hpp"

namespace fairmpc {

/// (sum a_i)^2 / (N sum a_i^2) with a_i = ||u^i||_1; all-zero inputs give 1.
[[nodiscard]] double jain(const Vector & u, int num_systems);
[[nodiscard]] bool all_inputs_zero(const Vector & u);
/// (N jain - 1) / (N - 1), and 1 for a single system.
[[nodiscard]] double scaled_jain(const Vector & u, int num_systems);

/// exp(-(1/N) sum_i ||e^i - mean e||_2) with e^i = x_s^i - x^i.
[[nodiscard]] double equity_instant(const Vector & x, const Vector & x_s, int num_systems);

/// exp(-(1/|G|) sum_{i in G} ||x_s^i - x^i||_2); an empty group means all systems.
[[nodiscard]] double tracking_instant(
  const Vector & x, const Vector & x_s, int num_systems, const std::vector<int> & group = {});

enum class TrackingVariant { Averaged, Terminal, TailAveraged };

struct TrackingSpec
{
  TrackingVariant variant = TrackingVariant::Terminal;
  /// first step included by TailAveraged
  int tail_start = 0;
};

[[nodiscard]] std::string to_string(const TrackingSpec & spec);

[[nodiscard]] double equality_index(const SimulationTrace & trace);
[[nodiscard]] double equity_index(const SimulationTrace & trace);
[[nodiscard]] double tracking_index(
  const SimulationTrace & trace, const TrackingSpec & spec = {}, const std::vector<int> & group = {});

struct SettlingResult
{
  std::vector<int> tau;
  double h_tau = 1.0;
};

/// tau^i is the first step within alpha_pct percent of the initial error (T-1 if never).
[[nodiscard]] SettlingResult settling_index(const SimulationTrace & trace, double alpha_pct);

/// exp(-||x_s^i - x_{T-1}^i||_2)
[[nodiscard]] double individual_index(const SimulationTrace & trace, int system);

struct KpiReport
{
  TrackingSpec h_s_spec;
  double h_s = 0.0;
  double alpha_pct = 10.0;
  double h_tau = 0.0;
  std::vector<int> tau;
  double h_u = 0.0;
  double h_e = 0.0;
  std::vector<double> h_s_individual;
  std::vector<double> jain_series;
  std::vector<double> equity_series;
  /// steps whose applied input was all zero, where the Jain index is set to 1
  int zero_input_steps = 0;
};

/// Throws std::invalid_argument on an empty trace.
[[nodiscard]] KpiReport compute_kpis(const SimulationTrace & trace, const TrackingSpec & spec = {}, double alpha_pct = 10.0);

}  // namespace fairmpc
