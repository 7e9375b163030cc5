#include "qadpa/solver.hpp"

#include <cmath>
#include <map>

#include <Eigen/LU>

#include "qadpa/errors.hpp"

namespace qadpa {

namespace {

constexpr complex j1(0.0, 1.0);

std::map<std::string, Eigen::Index> node_indices(const netlist& nl) {
  std::map<std::string, Eigen::Index> idx;
  Eigen::Index next = 0;
  for (const auto& n : nl.nodes()) idx[n] = next++;
  return idx;
}

// Adds y between two nodes; ground rows/columns are dropped.
void stamp_pair(Eigen::MatrixXcd& y_mat,
                const std::map<std::string, Eigen::Index>& idx,
                const std::string& n1, const std::string& n2, complex y) {
  bool g1 = (n1 == netlist::ground);
  bool g2 = (n2 == netlist::ground);
  if (!g1) y_mat(idx.at(n1), idx.at(n1)) += y;
  if (!g2) y_mat(idx.at(n2), idx.at(n2)) += y;
  if (!g1 && !g2) {
    y_mat(idx.at(n1), idx.at(n2)) -= y;
    y_mat(idx.at(n2), idx.at(n1)) -= y;
  }
}

// Two-port Y stamp with explicit ground reference:
// I1 = y11 V1 + y12 V2, I2 = y12 V1 + y11 V2.
void stamp_two_port_y(Eigen::MatrixXcd& y_mat,
                      const std::map<std::string, Eigen::Index>& idx,
                      const std::string& n1, const std::string& n2, complex y11,
                      complex y12) {
  bool g1 = (n1 == netlist::ground);
  bool g2 = (n2 == netlist::ground);
  if (!g1) y_mat(idx.at(n1), idx.at(n1)) += y11;
  if (!g2) y_mat(idx.at(n2), idx.at(n2)) += y11;
  if (!g1 && !g2) {
    y_mat(idx.at(n1), idx.at(n2)) += y12;
    y_mat(idx.at(n2), idx.at(n1)) += y12;
  }
}

}  // namespace

Eigen::MatrixXcd stamp_admittance(const netlist& nl, double f_hz) {
  if (!(std::isfinite(f_hz) && f_hz > 0.0))
    throw validation_error("frequency must be positive");
  auto idx = node_indices(nl);
  Eigen::Index n = static_cast<Eigen::Index>(nl.nodes().size());
  Eigen::MatrixXcd y_mat = Eigen::MatrixXcd::Zero(n, n);
  double w = 2.0 * pi * f_hz;

  for (const auto& e : nl.elements()) {
    switch (e.kind) {
      case element_kind::resistor:
        stamp_pair(y_mat, idx, e.node1, e.node2, complex(1.0 / e.value, 0.0));
        break;
      case element_kind::inductor:
        stamp_pair(y_mat, idx, e.node1, e.node2, -j1 / (w * e.value));
        break;
      case element_kind::capacitor:
        stamp_pair(y_mat, idx, e.node1, e.node2, j1 * (w * e.value));
        break;
      case element_kind::tline: {
        double theta = deg_to_rad(e.line.theta_deg(f_hz));
        double s = std::sin(theta);
        double c = std::cos(theta);
        if (std::abs(s) < 1e-9)
          throw singularity_error("line '" + e.name +
                                  "' at a multiple of 180 degrees");
        complex y11 = -j1 * c / (s * e.line.z0_ohm);
        complex y12 = j1 / (e.line.z0_ohm * s);
        stamp_two_port_y(y_mat, idx, e.node1, e.node2, y11, y12);
        break;
      }
    }
  }
  return y_mat;
}

solve_report solve_sparams(const netlist& nl, const std::vector<double>& freqs_hz) {
  nl.validate();
  if (freqs_hz.empty()) throw validation_error("empty frequency list");

  auto idx = node_indices(nl);
  auto ports = nl.ports();
  std::sort(ports.begin(), ports.end(),
            [](const netlist_port& a, const netlist_port& b) {
              return a.number < b.number;
            });
  const Eigen::Index n_nodes = static_cast<Eigen::Index>(nl.nodes().size());
  const Eigen::Index n_ports = static_cast<Eigen::Index>(ports.size());

  auto voltage_at = [&](const Eigen::MatrixXcd& v_mat, const std::string& node,
                        Eigen::Index col) -> complex {
    if (node == netlist::ground) return 0.0;
    return v_mat(idx.at(node), col);
  };

  solve_report report;
  std::vector<double> solved_freqs;
  std::vector<Eigen::MatrixXcd> solved_s;

  for (double f : freqs_hz) {
    Eigen::MatrixXcd y_mat;
    try {
      y_mat = stamp_admittance(nl, f);
    } catch (const error& e) {
      report.failures.push_back({f, e.what()});
      continue;
    }

    for (const auto& p : ports)
      stamp_pair(y_mat, idx, p.node, p.ref_node, complex(1.0 / p.zref_ohm, 0.0));

    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(n_nodes, n_ports);
    for (Eigen::Index k = 0; k < n_ports; ++k) {
      double inject = 2.0 / std::sqrt(ports[k].zref_ohm);
      if (ports[k].node != netlist::ground)
        rhs(idx.at(ports[k].node), k) += inject;
      if (ports[k].ref_node != netlist::ground)
        rhs(idx.at(ports[k].ref_node), k) -= inject;
    }

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(y_mat);
    double rcond = lu.rcond();
    Eigen::MatrixXcd v_mat = lu.solve(rhs);
    if (!(rcond > 0.0) || !v_mat.allFinite()) {
      report.failures.push_back({f, "singular node system"});
      continue;
    }

    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n_ports, n_ports);
    for (Eigen::Index col = 0; col < n_ports; ++col) {
      for (Eigen::Index row = 0; row < n_ports; ++row) {
        complex v = voltage_at(v_mat, ports[row].node, col) -
                    voltage_at(v_mat, ports[row].ref_node, col);
        s(row, col) = v / std::sqrt(ports[row].zref_ohm);
        if (row == col) s(row, col) -= 1.0;
      }
    }
    solved_freqs.push_back(f);
    solved_s.push_back(std::move(s));
    report.condition.push_back(1.0 / rcond);
    if (1.0 / rcond > 1e12) report.ill_conditioned = true;
  }

  if (!solved_freqs.empty()) {
    std::vector<double> zrefs;
    for (const auto& p : ports) zrefs.push_back(p.zref_ohm);
    sparam_block block(static_cast<std::size_t>(n_ports), solved_freqs, zrefs);
    for (std::size_t i = 0; i < solved_s.size(); ++i) block.at(i) = solved_s[i];
    report.sparams = std::move(block);
  }
  return report;
}

}  // namespace qadpa
