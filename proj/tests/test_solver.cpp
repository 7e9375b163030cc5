#include <gtest/gtest.h>

#include <Eigen/SVD>
#include <cmath>
#include <random>

#include "qadpa/errors.hpp"
#include "qadpa/netlist.hpp"
#include "qadpa/rf.hpp"
#include "qadpa/solver.hpp"

using namespace qadpa;

namespace {

netlist series_element_between_ports(element_kind kind, double value) {
  netlist nl;
  nl.add_node("in");
  nl.add_node("out");
  if (kind == element_kind::resistor)
    nl.add_resistor("x1", "in", "out", value);
  else if (kind == element_kind::inductor)
    nl.add_inductor("x1", "in", "out", value);
  else
    nl.add_capacitor("x1", "in", "out", value);
  nl.add_port(1, "in", 50.0);
  nl.add_port(2, "out", 50.0);
  return nl;
}

}  // namespace

TEST(netlist_structure, rejects_undeclared_nodes) {
  netlist nl;
  nl.add_node("a");
  EXPECT_THROW(nl.add_resistor("r1", "a", "b", 50.0), validation_error);
}

TEST(netlist_structure, rejects_nonpositive_values) {
  netlist nl;
  nl.add_node("a");
  EXPECT_THROW(nl.add_resistor("r1", "a", "0", 0.0), validation_error);
  EXPECT_THROW(nl.add_capacitor("c1", "a", "0", -1e-12), validation_error);
}

TEST(netlist_structure, rejects_duplicate_and_noncontiguous_ports) {
  netlist nl;
  nl.add_node("a");
  nl.add_resistor("r1", "a", "0", 50.0);
  nl.add_port(1, "a", 50.0);
  EXPECT_THROW(nl.add_port(1, "a", 50.0), validation_error);
  netlist nl2;
  nl2.add_node("a");
  nl2.add_resistor("r1", "a", "0", 50.0);
  nl2.add_port(2, "a", 50.0);
  EXPECT_THROW(nl2.validate(), validation_error);
}

TEST(netlist_structure, detects_floating_ports) {
  netlist nl;
  nl.add_node("a");
  nl.add_node("b");
  nl.add_resistor("r1", "a", "0", 50.0);
  nl.add_port(1, "a", 50.0);
  nl.add_port(2, "b", 50.0);
  // port 2's termination edge alone does not reach the rest of the circuit
  EXPECT_EQ(nl.disconnected_ports(), std::vector<int>{2});
}

TEST(netlist_structure, series_element_between_ports_is_grounded_by_terminations) {
  const auto nl = series_element_between_ports(element_kind::resistor, 50.0);
  EXPECT_TRUE(nl.disconnected_ports().empty());
  EXPECT_NO_THROW(nl.validate());
}

TEST(mna_stamping, single_resistor_admittance) {
  netlist nl;
  nl.add_node("a");
  nl.add_node("b");
  nl.add_resistor("r1", "a", "b", 100.0);
  nl.add_port(1, "a", 50.0);
  nl.add_port(2, "b", 50.0);
  const auto y = stamp_admittance(nl, 8e9);
  ASSERT_EQ(y.rows(), 2);
  EXPECT_NEAR(std::abs(y(0, 0) - complex(0.01, 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(y(0, 1) + complex(0.01, 0.0)), 0.0, 1e-15);
}

TEST(mna_solve, series_resistor_s_parameters) {
  const auto nl = series_element_between_ports(element_kind::resistor, 50.0);
  const auto report = solve_sparams(nl, {8e9});
  ASSERT_TRUE(report.sparams.has_value());
  ASSERT_TRUE(report.failures.empty());
  EXPECT_NEAR(std::abs(report.sparams->s(0, 0, 0) - complex(1.0 / 3.0, 0.0)), 0.0,
              1e-12);
  EXPECT_NEAR(std::abs(report.sparams->s(0, 1, 0) - complex(2.0 / 3.0, 0.0)), 0.0,
              1e-12);
}

TEST(mna_solve, quarter_wave_matches_unequal_references) {
  // Z0 = sqrt(25*50) matches a 25-ohm port to a 50-ohm port at f0
  netlist nl;
  nl.add_node("in");
  nl.add_node("out");
  nl.add_tline("t1", "in", "out", make_tline_section(std::sqrt(1250.0), 90.0, 8e9));
  nl.add_port(1, "in", 25.0);
  nl.add_port(2, "out", 50.0);
  const auto report = solve_sparams(nl, {8e9});
  ASSERT_TRUE(report.sparams.has_value());
  EXPECT_LT(std::abs(report.sparams->s(0, 0, 0)), 1e-9);
  EXPECT_NEAR(std::abs(report.sparams->s(0, 1, 0)), 1.0, 1e-9);
}

TEST(mna_solve, loaded_line_input_impedance_cross_check) {
  // one-port: 25-ohm 90-degree line at 8 GHz loaded by 50 ohms, read at 7.6 GHz
  netlist nl;
  nl.add_node("in");
  nl.add_node("mid");
  nl.add_tline("t1", "in", "mid", make_tline_section(25.0, 90.0, 8e9));
  nl.add_resistor("rl", "mid", "0", 50.0);
  nl.add_port(1, "in", 50.0);
  const auto report = solve_sparams(nl, {7.6e9});
  ASSERT_TRUE(report.sparams.has_value());
  const complex s11 = report.sparams->s(0, 0, 0);
  const complex zin_mna = 50.0 * (1.0 + s11) / (1.0 - s11);
  const complex zin_formula = tline_input_impedance(
      make_tline_section(25.0, 90.0, 8e9), termination(complex(50.0, 0.0)), 7.6e9);
  EXPECT_NEAR(std::abs(zin_mna - zin_formula), 0.0, 1e-9 * std::abs(zin_formula));
}

TEST(mna_solve, half_wave_singularity_is_recorded_not_fatal) {
  // theta = 180 degrees at 16 GHz: cot and csc blow up, the point is skipped
  netlist nl;
  nl.add_node("in");
  nl.add_node("out");
  nl.add_tline("t1", "in", "out", make_tline_section(50.0, 90.0, 8e9));
  nl.add_port(1, "in", 50.0);
  nl.add_port(2, "out", 50.0);
  const auto report = solve_sparams(nl, {8e9, 16e9, 24e9});
  ASSERT_TRUE(report.sparams.has_value());
  EXPECT_EQ(report.sparams->points(), 2u);
  ASSERT_EQ(report.failures.size(), 1u);
  EXPECT_EQ(report.failures[0].f_hz, 16e9);
}

TEST(mna_solve, near_short_between_ports_flags_conditioning) {
  const auto nl = series_element_between_ports(element_kind::resistor, 1e-13);
  const auto report = solve_sparams(nl, {8e9});
  ASSERT_TRUE(report.sparams.has_value());
  EXPECT_TRUE(report.ill_conditioned);
}

TEST(mna_solve, random_chains_agree_with_abcd_cascade) {
  // smaller copy of the acceptance sweep: 20 random 2-port ladders
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> n_elements(1, 6), kind_pick(0, 3),
      orient_pick(0, 1);
  std::uniform_real_distribution<double> rv(5.0, 500.0), lv(0.05e-9, 5e-9),
      cv(0.02e-12, 2e-12), zv(15.0, 110.0), th(10.0, 170.0), zref(20.0, 100.0);

  for (int trial = 0; trial < 20; ++trial) {
    netlist nl;
    std::vector<two_port> chain;
    const double f = 8e9;
    nl.add_node("n0");
    std::string prev = "n0";
    int made = 0;
    const int want = n_elements(rng);
    for (int e = 0; e < want; ++e) {
      const int kind = kind_pick(rng);
      const bool shunt = orient_pick(rng) == 1;
      const std::string name = "e" + std::to_string(e);
      if (kind == 3) {
        // lines are series-only two-ports here
        const auto sec = make_tline_section(zv(rng), th(rng), 8e9);
        const std::string next = "n" + std::to_string(++made);
        nl.add_node(next);
        nl.add_tline(name, prev, next, sec);
        chain.push_back(tline_two_port(sec, f));
        prev = next;
      } else if (shunt) {
        if (kind == 0) {
          const double v = rv(rng);
          nl.add_resistor(name, prev, "0", v);
          chain.push_back(shunt_resistor(v, f));
        } else if (kind == 1) {
          const double v = lv(rng);
          nl.add_inductor(name, prev, "0", v);
          chain.push_back(shunt_inductor(v, f));
        } else {
          const double v = cv(rng);
          nl.add_capacitor(name, prev, "0", v);
          chain.push_back(shunt_capacitor(v, f));
        }
      } else {
        const std::string next = "n" + std::to_string(++made);
        nl.add_node(next);
        if (kind == 0) {
          const double v = rv(rng);
          nl.add_resistor(name, prev, next, v);
          chain.push_back(series_resistor(v, f));
        } else if (kind == 1) {
          const double v = lv(rng);
          nl.add_inductor(name, prev, next, v);
          chain.push_back(series_inductor(v, f));
        } else {
          const double v = cv(rng);
          nl.add_capacitor(name, prev, next, v);
          chain.push_back(series_capacitor(v, f));
        }
        prev = next;
      }
    }
    if (chain.empty()) continue;
    const double z1 = zref(rng), z2 = zref(rng);
    nl.add_port(1, "n0", z1);
    nl.add_port(2, prev, z2);

    const auto report = solve_sparams(nl, {f});
    ASSERT_TRUE(report.sparams.has_value());
    ASSERT_TRUE(report.failures.empty());
    const auto s_ref = abcd_to_s(cascade(chain), z1, z2);
    EXPECT_NEAR(std::abs(report.sparams->s(0, 0, 0) - s_ref.s11), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(report.sparams->s(0, 0, 1) - s_ref.s12), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(report.sparams->s(0, 1, 0) - s_ref.s21), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(report.sparams->s(0, 1, 1) - s_ref.s22), 0.0, 1e-9);
  }
}

TEST(mna_solve, unterminated_validation_failures_surface) {
  netlist nl;
  nl.add_node("a");
  nl.add_resistor("r1", "a", "0", 50.0);
  EXPECT_THROW(solve_sparams(nl, {8e9}), validation_error);
}
