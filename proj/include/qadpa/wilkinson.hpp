#pragma once

#include <vector>

#include "qadpa/netlist.hpp"

namespace qadpa {

// Port numbering is fixed: port 1 = combined/common, port 2 = main path,
// port 3 = auxiliary path. k_squared = P_port3/P_port2 at the design split.
struct wilkinson_design {
  double z0_system_ohm;
  double k_squared;
  double branch2_z0_ohm;  // quarter-wave branch toward port 2
  double branch3_z0_ohm;  // quarter-wave branch toward port 3
  double bridge_resistor_ohm;
  double output_transformer2_z0_ohm;
  double output_transformer3_z0_ohm;
  bool output_transformers = true;
  double f0_hz;
};

// Standard unequal-split synthesis. power_ratio_2_over_3 = P2/P3; values
// above 1 simply make port 2 the stronger side, the formulas hold either way.
wilkinson_design design_wilkinson(double z0_system_ohm,
                                  double power_ratio_2_over_3, double f0_hz);

struct wilkinson_netlist_options {
  bool include_bridge = true;  // false isolates the bridge's contribution
  bool lumped = false;         // realize each line as its pi equivalent
};

netlist to_netlist(const wilkinson_design& d);
netlist to_netlist(const wilkinson_design& d, const wilkinson_netlist_options& opt);

// angle(S21) - angle(S31) per frequency, both branches unwrapped, degrees.
std::vector<double> terminal_phase_difference(const wilkinson_design& d,
                                              const std::vector<double>& freqs_hz);

}  // namespace qadpa
