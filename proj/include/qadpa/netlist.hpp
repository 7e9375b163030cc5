#pragma once

#include <string>
#include <vector>

#include "qadpa/rf.hpp"

namespace qadpa {

enum class element_kind { resistor, inductor, capacitor, tline };

struct netlist_element {
  element_kind kind;
  std::string name;
  std::string node1, node2;
  double value = 0.0;    // ohms, henries or farads for R/L/C
  tline_section line{};  // tline elements only
};

struct netlist_port {
  int number = 0;  // 1-based, contiguous
  std::string node;
  std::string ref_node;  // ground unless stated otherwise
  double zref_ohm = 50.0;
};

// Ground is the node named "0" and is always present.
class netlist {
 public:
  static const std::string ground;

  void add_node(const std::string& name);
  bool has_node(const std::string& name) const;

  void add_resistor(const std::string& name, const std::string& n1,
                    const std::string& n2, double ohm);
  void add_inductor(const std::string& name, const std::string& n1,
                    const std::string& n2, double henry);
  void add_capacitor(const std::string& name, const std::string& n1,
                     const std::string& n2, double farad);
  void add_tline(const std::string& name, const std::string& n1,
                 const std::string& n2, const tline_section& sec);
  void add_port(int number, const std::string& node, double zref_ohm,
                const std::string& ref_node = ground);

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<netlist_element>& elements() const { return elements_; }
  const std::vector<netlist_port>& ports() const { return ports_; }

  // Checks the structural invariants: declared nodes, contiguous 1-based
  // ports, positive references, and that every port node reaches ground
  // through element edges or the terminations of the other ports.
  void validate() const;

  // Port numbers whose nodes do not reach ground; empty when connected.
  // A port's own termination is excluded from the reachability walk, since
  // it always touches ground and would mask a floating probe.
  std::vector<int> disconnected_ports() const;

 private:
  void require_known_node(const std::string& name) const;

  std::vector<std::string> nodes_;  // declaration order, ground excluded
  std::vector<netlist_element> elements_;
  std::vector<netlist_port> ports_;
};

}  // namespace qadpa
