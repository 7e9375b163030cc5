#include "qadpa/netlist.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "qadpa/errors.hpp"

namespace qadpa {

const std::string netlist::ground = "0";

void netlist::add_node(const std::string& name) {
  if (name.empty()) throw validation_error("node name must not be empty");
  if (name == ground || has_node(name)) return;
  nodes_.push_back(name);
}

bool netlist::has_node(const std::string& name) const {
  return name == ground ||
         std::find(nodes_.begin(), nodes_.end(), name) != nodes_.end();
}

void netlist::require_known_node(const std::string& name) const {
  if (!has_node(name))
    throw validation_error("element references undeclared node '" + name + "'");
}

void netlist::add_resistor(const std::string& name, const std::string& n1,
                           const std::string& n2, double ohm) {
  require_known_node(n1);
  require_known_node(n2);
  if (!(std::isfinite(ohm) && ohm > 0.0))
    throw validation_error("resistor '" + name + "' needs a positive value");
  elements_.push_back({element_kind::resistor, name, n1, n2, ohm, {}});
}

void netlist::add_inductor(const std::string& name, const std::string& n1,
                           const std::string& n2, double henry) {
  require_known_node(n1);
  require_known_node(n2);
  if (!(std::isfinite(henry) && henry > 0.0))
    throw validation_error("inductor '" + name + "' needs a positive value");
  elements_.push_back({element_kind::inductor, name, n1, n2, henry, {}});
}

void netlist::add_capacitor(const std::string& name, const std::string& n1,
                            const std::string& n2, double farad) {
  require_known_node(n1);
  require_known_node(n2);
  if (!(std::isfinite(farad) && farad > 0.0))
    throw validation_error("capacitor '" + name + "' needs a positive value");
  elements_.push_back({element_kind::capacitor, name, n1, n2, farad, {}});
}

void netlist::add_tline(const std::string& name, const std::string& n1,
                        const std::string& n2, const tline_section& sec) {
  require_known_node(n1);
  require_known_node(n2);
  make_tline_section(sec.z0_ohm, sec.theta0_deg, sec.f0_hz);  // validates
  elements_.push_back({element_kind::tline, name, n1, n2, 0.0, sec});
}

void netlist::add_port(int number, const std::string& node, double zref_ohm,
                       const std::string& ref_node) {
  require_known_node(node);
  require_known_node(ref_node);
  if (number < 1) throw validation_error("port numbers are 1-based");
  if (!(std::isfinite(zref_ohm) && zref_ohm > 0.0))
    throw validation_error("port reference impedance must be positive");
  for (const auto& p : ports_)
    if (p.number == number)
      throw validation_error("duplicate port number " + std::to_string(number));
  ports_.push_back({number, node, ref_node, zref_ohm});
}

void netlist::validate() const {
  if (ports_.empty()) throw validation_error("netlist declares no ports");

  std::set<int> numbers;
  for (const auto& p : ports_) numbers.insert(p.number);
  for (int want = 1; want <= static_cast<int>(ports_.size()); ++want)
    if (!numbers.count(want))
      throw validation_error("port numbers must be contiguous from 1; missing " +
                             std::to_string(want));

  const auto floating = disconnected_ports();
  if (!floating.empty())
    throw validation_error("port " + std::to_string(floating.front()) +
                           " is not connected to ground");
}

std::vector<int> netlist::disconnected_ports() const {
  // A port must reach ground through element edges, ideal-line ground
  // returns, or the terminations of the other ports. Its own termination
  // always touches ground and proves nothing, so it is excluded; this is
  // stricter than bare matrix solvability and catches ports that measure
  // an empty branch.
  std::vector<int> floating;
  for (const auto& probe : ports_) {
    std::map<std::string, std::string> parent;
    parent[ground] = ground;
    for (const auto& n : nodes_) parent[n] = n;
    auto find = [&parent](std::string x) {
      while (parent[x] != x) x = parent[x];
      return x;
    };
    auto unite = [&](const std::string& a, const std::string& b) {
      parent[find(a)] = find(b);
    };
    for (const auto& e : elements_) {
      unite(e.node1, e.node2);
      if (e.kind == element_kind::tline) {
        unite(e.node1, ground);
        unite(e.node2, ground);
      }
    }
    for (const auto& p : ports_)
      if (p.number != probe.number) unite(p.node, p.ref_node);
    if (find(probe.node) != find(ground)) floating.push_back(probe.number);
  }
  std::sort(floating.begin(), floating.end());
  return floating;
}

}  // namespace qadpa
