#pragma once

#include <string>
#include <vector>

#include "fairmpc/model.hpp"

namespace fairmpc {

struct PresetInfo
{
  std::string name;
  std::string description;
};

[[nodiscard]] std::vector<PresetInfo> list_presets();

/// Throws std::invalid_argument for an unknown name.
[[nodiscard]] Scenario make_preset(const std::string & name);

/// Scalar plants x+ = a x + b u sharing one budget, all with Q = 1 and the given raw weights.
[[nodiscard]] Scenario make_scalar_ensemble(const std::vector<double> & a, const std::vector<double> & b,
  const std::vector<double> & x0, const std::vector<double> & xs, double u_bar);

/// Planar double integrator with input gains b = (b1, b2) and target position p_s.
[[nodiscard]] LtiSystem motion_system(double b1, double b2);

}  // namespace fairmpc
