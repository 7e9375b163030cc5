#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "qadpa/errors.hpp"

namespace qadpa {

using complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / pi; }

// Wraps an angle in degrees to [0, 360).
double wrap_deg(double deg);

// Signed circular difference a - b in degrees, result in (-180, 180].
double circular_diff_deg(double a, double b);

// Gamma = (z - zref)/(z + zref).
complex reflection_coefficient(complex z, double zref_ohm);

// A termination is a finite impedance or an ideal open/short, kept as flags
// so no infinities enter the arithmetic.
class termination {
 public:
  termination(complex z) : kind_(kind::finite), z_(z) {}
  termination(double r) : termination(complex(r, 0.0)) {}
  static termination open() { return termination(kind::open); }
  static termination short_circuit() { return termination(kind::shorted); }

  bool is_open() const { return kind_ == kind::open; }
  bool is_short() const { return kind_ == kind::shorted; }
  bool is_finite() const { return kind_ == kind::finite; }
  complex z() const;  // finite terminations only

 private:
  enum class kind { finite, open, shorted };
  explicit termination(kind k) : kind_(k), z_(0.0) {}
  kind kind_;
  complex z_;
};

complex reflection_coefficient(const termination& load, double zref_ohm);

// Ideal lossless line. Electrical length scales linearly with frequency:
// theta(f) = theta0 * f/f0.
struct tline_section {
  double z0_ohm = 50.0;
  double theta0_deg = 90.0;
  double f0_hz = 8e9;

  double theta_deg(double f_hz) const;
};

tline_section make_tline_section(double z0_ohm, double theta0_deg, double f0_hz);

// Zin = Z0 (ZL cos(theta) + j Z0 sin(theta)) / (Z0 cos(theta) + j ZL sin(theta)),
// the sin/cos form of the tangent formula, well defined at theta = 90 degrees.
complex tline_input_impedance(const tline_section& sec, const termination& load,
                              double f_hz);

// Chain (ABCD) matrix of a two-port at a single frequency.
struct two_port {
  complex a, b, c, d;
  double f_hz;

  complex det() const { return a * d - b * c; }
  // Input impedance with the output terminated in zl.
  complex input_impedance(complex zl) const;
};

two_port identity_two_port(double f_hz);
two_port series_impedance(complex z, double f_hz);
two_port shunt_admittance(complex y, double f_hz);
two_port series_resistor(double r_ohm, double f_hz);
two_port series_inductor(double l_henry, double f_hz);
two_port series_capacitor(double c_farad, double f_hz);
two_port shunt_resistor(double r_ohm, double f_hz);
two_port shunt_inductor(double l_henry, double f_hz);
two_port shunt_capacitor(double c_farad, double f_hz);
two_port tline_two_port(const tline_section& sec, double f_hz);

// Cascade in port-1-to-port-2 order; frequencies must match.
two_port cascade(const two_port& first, const two_port& second);
two_port cascade(const std::vector<two_port>& sections);
inline two_port operator*(const two_port& lhs, const two_port& rhs) {
  return cascade(lhs, rhs);
}

// 2-port scattering parameters at one frequency.
struct sparams {
  complex s11, s12, s21, s22;
};

sparams abcd_to_s(const two_port& tp, double zref1_ohm, double zref2_ohm);
two_port s_to_abcd(const sparams& s, double zref1_ohm, double zref2_ohm,
                   double f_hz);

// N-port S-parameters over a strictly increasing frequency grid with
// per-port real reference impedances.
class sparam_block {
 public:
  sparam_block(std::size_t ports, std::vector<double> freqs_hz,
               std::vector<double> zrefs_ohm);

  std::size_t ports() const { return ports_; }
  std::size_t points() const { return freqs_hz_.size(); }
  const std::vector<double>& freqs_hz() const { return freqs_hz_; }
  const std::vector<double>& zrefs_ohm() const { return zrefs_ohm_; }

  Eigen::MatrixXcd& at(std::size_t fi) { return data_[fi]; }
  const Eigen::MatrixXcd& at(std::size_t fi) const { return data_[fi]; }
  complex s(std::size_t fi, std::size_t row, std::size_t col) const;

 private:
  std::size_t ports_;
  std::vector<double> freqs_hz_;
  std::vector<double> zrefs_ohm_;
  std::vector<Eigen::MatrixXcd> data_;
};

struct sweep_metrics_result {
  // Widest contiguous region with 20 log10|S11| <= threshold. Zero when the
  // whole sweep sits above threshold.
  double fractional_bandwidth_pct = 0.0;
  double band_lo_hz = 0.0;
  double band_hi_hz = 0.0;
  std::vector<double> return_loss_db;       // 20 log10 |S11| per point
  std::vector<double> insertion_phase_deg;  // unwrapped angle(S21); empty for 1-ports
};

// The unwrap assumes the grid is fine enough that S21 phase moves < 180
// degrees per step.
sweep_metrics_result sweep_metrics(const sparam_block& block, double threshold_db);

}  // namespace qadpa
