#include "qadpa/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "qadpa/errors.hpp"

namespace qadpa {

namespace {

// Scaled decimal conversion. Unit prefixes and the GHz frequency column are
// applied by rewriting the decimal exponent of the text, not by multiplying
// the converted double, so every value survives parse -> serialize -> parse
// bit-exactly and suffers only the single unavoidable decimal-to-binary
// rounding.

bool numeric_charset(const std::string& s) {
  if (s.empty()) return false;
  for (char ch : s)
    if (!(std::isdigit(static_cast<unsigned char>(ch)) || ch == '.' ||
          ch == '+' || ch == '-' || ch == 'e' || ch == 'E'))
      return false;
  return true;
}

std::optional<double> parse_scaled(const std::string& token, int shift) {
  if (!numeric_charset(token)) return std::nullopt;
  std::string mantissa = token;
  long exponent = 0;
  const auto epos = token.find_first_of("eE");
  if (epos != std::string::npos) {
    mantissa = token.substr(0, epos);
    const std::string etext = token.substr(epos + 1);
    if (etext.empty()) return std::nullopt;
    char* end = nullptr;
    exponent = std::strtol(etext.c_str(), &end, 10);
    if (end != etext.c_str() + etext.size()) return std::nullopt;
  }
  if (mantissa.empty()) return std::nullopt;
  const std::string rebuilt =
      mantissa + "e" + std::to_string(exponent + shift);
  char* end = nullptr;
  const double v = std::strtod(rebuilt.c_str(), &end);
  if (end != rebuilt.c_str() + rebuilt.size()) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

std::string format_scaled(double v, int shift) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  const std::string text = buf;
  const auto epos = text.find_first_of("eE");
  std::string mantissa = text.substr(0, epos);
  const long exponent = std::strtol(text.c_str() + epos + 1, nullptr, 10) + shift;
  if (mantissa.find('.') != std::string::npos) {
    mantissa.erase(mantissa.find_last_not_of('0') + 1);
    if (mantissa.back() == '.') mantissa.pop_back();
  }
  if (exponent == 0) return mantissa;
  return mantissa + "e" + std::to_string(exponent);
}

std::string format_plain(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string lowercase(std::string s) {
  for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string strip_comment(const std::string& line, char marker) {
  const auto pos = line.find(marker);
  return pos == std::string::npos ? line : line.substr(0, pos);
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

}  // namespace

void atomic_write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw validation_error("cannot open '" + tmp + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw validation_error("failed writing '" + tmp + "'");
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw validation_error("cannot move temp file onto '" + path + "'");
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---- netlist text ---------------------------------------------------------

namespace {

struct unit_info {
  int shift;  // decimal exponent added when parsing a value in this unit
  element_kind kind;
};

const std::map<std::string, unit_info>& value_units() {
  static const std::map<std::string, unit_info> units = {
      {"ohm", {0, element_kind::resistor}},
      {"nh", {-9, element_kind::inductor}},
      {"ph", {-12, element_kind::inductor}},
      {"pf", {-12, element_kind::capacitor}},
      {"ff", {-15, element_kind::capacitor}},
  };
  return units;
}

// Splits e.g. "110fF" into the numeric prefix and the unit suffix.
void split_unit(const std::string& token, std::string& number, std::string& unit) {
  std::size_t i = 0;
  while (i < token.size()) {
    const char ch = token[i];
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.' || ch == '+' ||
        ch == '-' || ch == 'e' || ch == 'E') {
      // 'e' starts the unit when not followed by a digit or sign
      if ((ch == 'e' || ch == 'E') &&
          (i + 1 >= token.size() ||
           (!std::isdigit(static_cast<unsigned char>(token[i + 1])) &&
            token[i + 1] != '+' && token[i + 1] != '-')))
        break;
      ++i;
    } else {
      break;
    }
  }
  number = token.substr(0, i);
  unit = token.substr(i);
}

double parse_element_value(const std::vector<std::string>& tokens,
                           std::size_t first, element_kind kind, int line) {
  std::string joined;
  for (std::size_t i = first; i < tokens.size(); ++i) joined += tokens[i];
  std::string number, unit;
  split_unit(joined, number, unit);
  if (unit.empty())
    throw parse_error("value needs a unit (ohm, nH, pH, pF, fF)", line);
  const auto it = value_units().find(lowercase(unit));
  if (it == value_units().end())
    throw parse_error("unknown unit '" + unit + "'", line);
  if (it->second.kind != kind)
    throw parse_error("unit '" + unit + "' does not fit this element type", line);
  const auto v = parse_scaled(number, it->second.shift);
  if (!v) throw parse_error("bad numeric value '" + number + "'", line);
  return *v;
}

double parse_bare(const std::string& token, int shift, const char* what, int line) {
  const auto v = parse_scaled(token, shift);
  if (!v)
    throw parse_error("bad " + std::string(what) + " '" + token + "'", line);
  return *v;
}

}  // namespace

netlist parse_netlist(const std::string& text) {
  netlist nl;
  std::vector<std::pair<int, int>> port_lines;  // port number -> line
  const auto lines = split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const int line = static_cast<int>(li) + 1;
    const auto tokens = tokenize(strip_comment(lines[li], '#'));
    if (tokens.empty()) continue;
    const std::string kw = lowercase(tokens[0]);
    try {
      if (kw == "node") {
        if (tokens.size() < 2) throw parse_error("node line needs a name", line);
        for (std::size_t i = 1; i < tokens.size(); ++i) nl.add_node(tokens[i]);
      } else if (kw == "r" || kw == "l" || kw == "c") {
        if (tokens.size() < 5)
          throw parse_error("expected <name> <node1> <node2> <value+unit>", line);
        const element_kind kind = kw == "r"   ? element_kind::resistor
                                  : kw == "l" ? element_kind::inductor
                                              : element_kind::capacitor;
        const double value = parse_element_value(tokens, 4, kind, line);
        if (kind == element_kind::resistor)
          nl.add_resistor(tokens[1], tokens[2], tokens[3], value);
        else if (kind == element_kind::inductor)
          nl.add_inductor(tokens[1], tokens[2], tokens[3], value);
        else
          nl.add_capacitor(tokens[1], tokens[2], tokens[3], value);
      } else if (kw == "tl") {
        if (tokens.size() != 7)
          throw parse_error(
              "expected <name> <node1> <node2> <z0_ohm> <theta_deg> <f0_ghz>", line);
        const double z0 = parse_bare(tokens[4], 0, "characteristic impedance", line);
        const double theta = parse_bare(tokens[5], 0, "electrical length", line);
        std::string number = tokens[6], unit;
        split_unit(tokens[6], number, unit);
        if (!unit.empty() && lowercase(unit) != "ghz")
          throw parse_error("line frequency takes GHz", line);
        const double f0 = parse_bare(number, 9, "reference frequency", line);
        nl.add_tline(tokens[1], tokens[2], tokens[3],
                     tline_section{z0, theta, f0});
      } else if (kw == "port") {
        if (tokens.size() != 4)
          throw parse_error("expected <number> <node> <zref_ohm>", line);
        char* end = nullptr;
        const long number = std::strtol(tokens[1].c_str(), &end, 10);
        if (end != tokens[1].c_str() + tokens[1].size())
          throw parse_error("bad port number '" + tokens[1] + "'", line);
        std::string zref_text = tokens[3], unit;
        split_unit(tokens[3], zref_text, unit);
        if (!unit.empty() && lowercase(unit) != "ohm")
          throw parse_error("port reference takes ohms", line);
        const double zref = parse_bare(zref_text, 0, "port reference", line);
        nl.add_port(static_cast<int>(number), tokens[2], zref);
        port_lines.emplace_back(static_cast<int>(number), line);
      } else {
        throw parse_error("unknown directive '" + tokens[0] + "'", line);
      }
    } catch (const parse_error&) {
      throw;
    } catch (const validation_error& e) {
      throw parse_error(e.what(), line);
    }
  }

  const auto floating = nl.disconnected_ports();
  if (!floating.empty()) {
    int at = 0;
    for (const auto& [number, line] : port_lines)
      if (number == floating.front()) at = line;
    throw parse_error(
        "port " + std::to_string(floating.front()) + " is not connected to ground",
        at);
  }
  nl.validate();
  return nl;
}

netlist read_netlist_file(const std::string& path) {
  return parse_netlist(read_text_file(path));
}

std::string serialize_netlist(const netlist& nl) {
  std::ostringstream out;
  for (const auto& n : nl.nodes()) out << "node " << n << "\n";
  for (const auto& e : nl.elements()) {
    switch (e.kind) {
      case element_kind::resistor:
        out << "R " << e.name << " " << e.node1 << " " << e.node2 << " "
            << format_scaled(e.value, 0) << "ohm\n";
        break;
      case element_kind::inductor:
        out << "L " << e.name << " " << e.node1 << " " << e.node2 << " "
            << format_scaled(e.value, 9) << "nH\n";
        break;
      case element_kind::capacitor:
        out << "C " << e.name << " " << e.node1 << " " << e.node2 << " "
            << format_scaled(e.value, 12) << "pF\n";
        break;
      case element_kind::tline:
        out << "TL " << e.name << " " << e.node1 << " " << e.node2 << " "
            << format_plain(e.line.z0_ohm) << " " << format_plain(e.line.theta0_deg)
            << " " << format_scaled(e.line.f0_hz, -9) << "\n";
        break;
    }
  }
  for (const auto& p : nl.ports())
    out << "PORT " << p.number << " " << p.node << " " << format_plain(p.zref_ohm)
        << "\n";
  return out.str();
}

// ---- Touchstone -----------------------------------------------------------

std::string touchstone_text(const sparam_block& block, touchstone_format fmt) {
  const auto& zrefs = block.zrefs_ohm();
  for (double z : zrefs)
    if (z != zrefs.front())
      throw validation_error(
          "touchstone needs a uniform port reference impedance");

  std::ostringstream out;
  out << "# GHz S " << (fmt == touchstone_format::ri ? "RI" : "MA") << " R "
      << format_plain(zrefs.front()) << "\n";
  const std::size_t n = block.ports();
  for (std::size_t fi = 0; fi < block.points(); ++fi) {
    out << format_scaled(block.freqs_hz()[fi], -9);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        const complex s = block.s(fi, r, c);
        if (fmt == touchstone_format::ri)
          out << " " << format_plain(s.real()) << " " << format_plain(s.imag());
        else
          out << " " << format_plain(std::abs(s)) << " "
              << format_plain(rad_to_deg(std::arg(s)));
      }
    }
    out << "\n";
  }
  return out.str();
}

void write_touchstone(const sparam_block& block, const std::string& path,
                      touchstone_format fmt) {
  atomic_write_file(path, touchstone_text(block, fmt));
}

sparam_block parse_touchstone(const std::string& text) {
  const auto lines = split_lines(text);
  int freq_shift = 9;
  bool saw_option = false;
  bool magnitude_angle = false;
  double zref = 50.0;

  std::vector<double> freqs;
  std::vector<std::vector<complex>> rows;
  std::size_t ports = 0;

  for (std::size_t li = 0; li < lines.size(); ++li) {
    const int line = static_cast<int>(li) + 1;
    const std::string body = strip_comment(lines[li], '!');
    const auto tokens = tokenize(body);
    if (tokens.empty()) continue;

    if (tokens[0] == "#") {
      if (saw_option) throw parse_error("duplicate option line", line);
      if (tokens.size() != 6 || lowercase(tokens[2]) != "s" ||
          lowercase(tokens[4]) != "r")
        throw parse_error("option line must read '# <unit> S <RI|MA> R <zref>'",
                          line);
      const std::string unit = lowercase(tokens[1]);
      if (unit == "ghz")
        freq_shift = 9;
      else if (unit == "mhz")
        freq_shift = 6;
      else if (unit == "khz")
        freq_shift = 3;
      else if (unit == "hz")
        freq_shift = 0;
      else
        throw parse_error("unknown frequency unit '" + tokens[1] + "'", line);
      const std::string f = lowercase(tokens[3]);
      if (f == "ri")
        magnitude_angle = false;
      else if (f == "ma")
        magnitude_angle = true;
      else
        throw parse_error("unsupported data format '" + tokens[3] + "'", line);
      const auto z = parse_scaled(tokens[5], 0);
      if (!z || *z <= 0.0)
        throw parse_error("bad reference impedance '" + tokens[5] + "'", line);
      zref = *z;
      saw_option = true;
      continue;
    }

    if (!saw_option)
      throw parse_error("data before the option line", line);

    if (ports == 0) {
      // 1 + 2 n^2 numbers per row
      std::size_t n = 1;
      while (1 + 2 * n * n < tokens.size()) ++n;
      if (1 + 2 * n * n != tokens.size())
        throw parse_error("row has " + std::to_string(tokens.size()) +
                              " fields, not 1 + 2*n^2",
                          line);
      ports = n;
    }
    if (tokens.size() != 1 + 2 * ports * ports)
      throw parse_error("row width changed mid-file", line);

    const auto f = parse_scaled(tokens[0], freq_shift);
    if (!f || *f <= 0.0)
      throw parse_error("bad frequency '" + tokens[0] + "'", line);
    if (!freqs.empty() && *f <= freqs.back())
      throw parse_error("frequencies must be strictly increasing", line);
    freqs.push_back(*f);

    std::vector<complex> entries;
    entries.reserve(ports * ports);
    for (std::size_t i = 1; i < tokens.size(); i += 2) {
      const auto a = parse_scaled(tokens[i], 0);
      const auto b = parse_scaled(tokens[i + 1], 0);
      if (!a || !b) throw parse_error("bad matrix entry", line);
      entries.push_back(magnitude_angle ? std::polar(*a, deg_to_rad(*b))
                                        : complex(*a, *b));
    }
    rows.push_back(std::move(entries));
  }

  if (!saw_option) throw parse_error("missing option line", 1);
  if (rows.empty()) throw parse_error("no data rows", 1);

  sparam_block block(ports, freqs, std::vector<double>(ports, zref));
  for (std::size_t fi = 0; fi < rows.size(); ++fi)
    for (std::size_t r = 0; r < ports; ++r)
      for (std::size_t c = 0; c < ports; ++c)
        block.at(fi)(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            rows[fi][r * ports + c];
  return block;
}

sparam_block read_touchstone(const std::string& path) {
  return parse_touchstone(read_text_file(path));
}

// ---- CSV ------------------------------------------------------------------

std::string csv_text(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  if (header.empty()) throw validation_error("csv needs a header");
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << "\n";
  char buf[40];
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw validation_error("csv row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.10g", row[i]);
      out << (i ? "," : "") << buf;
    }
    out << "\n";
  }
  return out.str();
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  atomic_write_file(path, csv_text(header, rows));
}

// ---- behavioral-chain config ----------------------------------------------

std::vector<double> doherty_config::pin_grid() const {
  std::vector<double> grid(static_cast<std::size_t>(pin_points));
  for (int i = 0; i < pin_points; ++i)
    grid[static_cast<std::size_t>(i)] =
        pin_start_dbm +
        (pin_stop_dbm - pin_start_dbm) * i / (pin_points - 1);
  grid.back() = pin_stop_dbm;
  return grid;
}

doherty_config parse_doherty_config(const std::string& text) {
  static const std::vector<std::string> known = {
      "main_gain_db",  "main_psat_dbm",    "main_knee",       "main_dc_w",
      "aux_gain_db",   "aux_psat_dbm",     "aux_knee",        "aux_dc_w",
      "split_main_low", "split_main_high", "split_center_dbm", "split_width_db",
      "combiner_k2",   "phase_offset_deg", "pin_start_dbm",   "pin_stop_dbm",
      "pin_points"};

  std::map<std::string, double> values;
  const auto lines = split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const int line = static_cast<int>(li) + 1;
    const std::string body = strip_comment(lines[li], '#');
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      if (!tokenize(body).empty())
        throw parse_error("expected 'key = value'", line);
      continue;
    }
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = lowercase(trim(body.substr(0, eq)));
    const std::string value = trim(body.substr(eq + 1));
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw parse_error("unknown key '" + key + "'", line);
    if (values.count(key)) throw parse_error("duplicate key '" + key + "'", line);
    const auto v = parse_scaled(value, 0);
    if (!v) throw parse_error("bad value '" + value + "'", line);
    values[key] = *v;
  }

  auto require = [&](const std::string& key) {
    const auto it = values.find(key);
    if (it == values.end())
      throw validation_error("config is missing required key '" + key + "'");
    return it->second;
  };

  doherty_config cfg;
  cfg.chain.main.small_signal_gain_db = require("main_gain_db");
  cfg.chain.main.p_sat_dbm = require("main_psat_dbm");
  cfg.chain.main.knee_sharpness = require("main_knee");
  if (values.count("main_dc_w")) cfg.chain.main.dc_power_w = values["main_dc_w"];
  cfg.chain.aux.small_signal_gain_db = require("aux_gain_db");
  cfg.chain.aux.p_sat_dbm = require("aux_psat_dbm");
  cfg.chain.aux.knee_sharpness = require("aux_knee");
  if (values.count("aux_dc_w")) cfg.chain.aux.dc_power_w = values["aux_dc_w"];
  cfg.chain.split.main_fraction_low = require("split_main_low");
  cfg.chain.split.main_fraction_high = require("split_main_high");
  cfg.chain.split.transition_center_dbm = require("split_center_dbm");
  cfg.chain.split.transition_width_db = require("split_width_db");
  cfg.chain.combiner_ratio_k2 = require("combiner_k2");
  cfg.chain.phase_offset_deg = require("phase_offset_deg");
  cfg.pin_start_dbm = require("pin_start_dbm");
  cfg.pin_stop_dbm = require("pin_stop_dbm");
  const double points = require("pin_points");
  if (!(points >= 2.0) || points != std::floor(points) || points > 1e6)
    throw validation_error("pin_points must be an integer >= 2");
  cfg.pin_points = static_cast<int>(points);
  if (!(cfg.pin_start_dbm < cfg.pin_stop_dbm))
    throw validation_error("pin_start_dbm must be below pin_stop_dbm");
  return cfg;
}

doherty_config read_doherty_config(const std::string& path) {
  return parse_doherty_config(read_text_file(path));
}

}  // namespace qadpa
