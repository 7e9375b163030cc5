#pragma once

#include <string>
#include <vector>

#include "qadpa/doherty.hpp"
#include "qadpa/netlist.hpp"
#include "qadpa/rf.hpp"

namespace qadpa {

// Writes content to path via a temp file in the same directory plus rename,
// so readers never observe a partial file.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

// ---- netlist text -------------------------------------------------------
//
// Line-oriented, '#' comments, case-insensitive keywords:
//   node <name>
//   R|L|C <name> <node1> <node2> <value+unit>     units ohm | nH pH | pF fF
//   TL <name> <node1> <node2> <z0_ohm> <theta_deg> <f0_ghz>
//   PORT <n> <node> <zref_ohm>
// Ground is the node "0" and needs no declaration. Values are scaled by
// rewriting the decimal exponent before conversion, so parse -> serialize ->
// parse is exact.

netlist parse_netlist(const std::string& text);
netlist read_netlist_file(const std::string& path);
std::string serialize_netlist(const netlist& nl);

// ---- Touchstone ---------------------------------------------------------
//
// Version-1 style: one option line `# GHz S <RI|MA> R <zref>`, then one row
// per frequency holding the frequency and the matrix entries row-major
// (S11 S12 ... S21 ...), two numbers per entry. Requires a uniform port
// reference. RI files round-trip byte-identically.

enum class touchstone_format { ri, ma };

std::string touchstone_text(const sparam_block& block,
                            touchstone_format fmt = touchstone_format::ri);
void write_touchstone(const sparam_block& block, const std::string& path,
                      touchstone_format fmt = touchstone_format::ri);
sparam_block parse_touchstone(const std::string& text);
sparam_block read_touchstone(const std::string& path);

// ---- CSV ----------------------------------------------------------------

std::string csv_text(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// ---- behavioral-chain config --------------------------------------------
//
// `key = value` lines with '#' comments. Keys: main_gain_db, main_psat_dbm,
// main_knee, main_dc_w (optional), the aux_* counterparts, split_main_low,
// split_main_high, split_center_dbm, split_width_db, combiner_k2,
// phase_offset_deg, pin_start_dbm, pin_stop_dbm, pin_points.

struct doherty_config {
  doherty_chain chain;
  double pin_start_dbm = 0.0;
  double pin_stop_dbm = 0.0;
  int pin_points = 0;

  std::vector<double> pin_grid() const;
};

doherty_config parse_doherty_config(const std::string& text);
doherty_config read_doherty_config(const std::string& path);

}  // namespace qadpa
