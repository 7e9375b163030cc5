#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qadpa/netlist.hpp"
#include "qadpa/rf.hpp"

namespace qadpa {

struct solve_failure {
  double f_hz;
  std::string message;
};

struct solve_report {
  // S-parameters for the frequencies that solved, in grid order. Empty when
  // every point failed.
  std::optional<sparam_block> sparams;
  std::vector<double> condition;  // per solved point, 1/rcond of the MNA matrix
  std::vector<solve_failure> failures;
  bool ill_conditioned = false;  // any condition estimate above 1e12
};

// Node-admittance matrix with the ground row/column eliminated. Node order
// follows the netlist declaration order. Throws singularity_error when an
// ideal line sits at a multiple of 180 degrees at this frequency.
Eigen::MatrixXcd stamp_admittance(const netlist& nl, double f_hz);

// Port S-parameters by unit-excitation solves against the terminated MNA
// system; a singular frequency point is recorded and the sweep continues.
solve_report solve_sparams(const netlist& nl, const std::vector<double>& freqs_hz);

}  // namespace qadpa
