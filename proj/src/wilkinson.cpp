#include "qadpa/wilkinson.hpp"

#include <cmath>
#include <string>

#include "qadpa/errors.hpp"
#include "qadpa/matching.hpp"
#include "qadpa/solver.hpp"

namespace qadpa {

wilkinson_design design_wilkinson(double z0_system_ohm,
                                  double power_ratio_2_over_3, double f0_hz) {
  if (!(z0_system_ohm > 0.0))
    throw validation_error("system impedance must be positive");
  if (!(power_ratio_2_over_3 > 0.0))
    throw validation_error("power ratio must be positive");
  if (!(f0_hz > 0.0)) throw validation_error("f0 must be positive");

  double k2 = 1.0 / power_ratio_2_over_3;
  double k = std::sqrt(k2);
  wilkinson_design d;
  d.z0_system_ohm = z0_system_ohm;
  d.k_squared = k2;
  d.branch3_z0_ohm = z0_system_ohm * std::sqrt((1.0 + k2) / (k2 * k));
  d.branch2_z0_ohm = z0_system_ohm * std::sqrt(k * (1.0 + k2));
  d.bridge_resistor_ohm = z0_system_ohm * (k + 1.0 / k);
  d.output_transformer2_z0_ohm = z0_system_ohm * std::sqrt(k);
  d.output_transformer3_z0_ohm = z0_system_ohm / std::sqrt(k);
  d.f0_hz = f0_hz;
  return d;
}

namespace {

// Quarter-wave line, either as an ideal TL element or expanded into its
// lumped pi equivalent.
void add_quarter_wave(netlist& nl, const std::string& name,
                      const std::string& n1, const std::string& n2, double z0,
                      double f0_hz, bool lumped) {
  tline_section sec = make_tline_section(z0, 90.0, f0_hz);
  if (!lumped) {
    nl.add_tline(name, n1, n2, sec);
    return;
  }
  pi_equivalent_result pi = pi_equivalent(sec);
  nl.add_capacitor(name + "_c1", n1, netlist::ground, pi.c_shunt_farad);
  nl.add_inductor(name + "_l", n1, n2, pi.l_series_henry);
  nl.add_capacitor(name + "_c2", n2, netlist::ground, pi.c_shunt_farad);
}

}  // namespace

netlist to_netlist(const wilkinson_design& d) {
  return to_netlist(d, wilkinson_netlist_options{});
}

netlist to_netlist(const wilkinson_design& d, const wilkinson_netlist_options& opt) {
  netlist nl;
  nl.add_node("in");
  nl.add_node("j2");
  nl.add_node("j3");
  add_quarter_wave(nl, "branch2", "in", "j2", d.branch2_z0_ohm, d.f0_hz,
                   opt.lumped);
  add_quarter_wave(nl, "branch3", "in", "j3", d.branch3_z0_ohm, d.f0_hz,
                   opt.lumped);
  if (opt.include_bridge)
    nl.add_resistor("bridge", "j2", "j3", d.bridge_resistor_ohm);

  std::string port2_node = "j2";
  std::string port3_node = "j3";
  if (d.output_transformers) {
    nl.add_node("p2");
    nl.add_node("p3");
    add_quarter_wave(nl, "xfmr2", "j2", "p2", d.output_transformer2_z0_ohm,
                     d.f0_hz, opt.lumped);
    add_quarter_wave(nl, "xfmr3", "j3", "p3", d.output_transformer3_z0_ohm,
                     d.f0_hz, opt.lumped);
    port2_node = "p2";
    port3_node = "p3";
  }
  nl.add_port(1, "in", d.z0_system_ohm);
  nl.add_port(2, port2_node, d.z0_system_ohm);
  nl.add_port(3, port3_node, d.z0_system_ohm);
  return nl;
}

std::vector<double> terminal_phase_difference(const wilkinson_design& d,
                                              const std::vector<double>& freqs_hz) {
  solve_report report = solve_sparams(to_netlist(d), freqs_hz);
  if (!report.sparams || !report.failures.empty())
    throw numerical_error("combiner sweep failed at some frequency points");
  const sparam_block& block = *report.sparams;

  auto unwrap = [&](std::size_t row) {
    std::vector<double> phase(block.points());
    double prev_raw = 0.0;
    for (std::size_t i = 0; i < block.points(); ++i) {
      double raw = rad_to_deg(std::arg(block.s(i, row, 0)));
      if (i == 0) {
        phase[0] = raw;
      } else {
        double step = raw - prev_raw;
        while (step > 180.0) step -= 360.0;
        while (step <= -180.0) step += 360.0;
        phase[i] = phase[i - 1] + step;
      }
      prev_raw = raw;
    }
    return phase;
  };

  std::vector<double> s21 = unwrap(1);
  std::vector<double> s31 = unwrap(2);
  std::vector<double> diff(block.points());
  for (std::size_t i = 0; i < block.points(); ++i) diff[i] = s21[i] - s31[i];
  return diff;
}

}  // namespace qadpa
