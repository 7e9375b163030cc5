#include "qadpa/rf.hpp"

#include <cmath>
#include <string>

namespace qadpa {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw validation_error(what);
}

void require_frequency(double f_hz) {
  require(std::isfinite(f_hz) && f_hz > 0.0, "frequency must be positive");
}

void require_section(const tline_section& sec) {
  require(std::isfinite(sec.z0_ohm) && sec.z0_ohm > 0.0,
          "tline z0 must be positive");
  require(sec.theta0_deg > 0.0 && sec.theta0_deg < 180.0,
          "tline theta0 must lie in (0, 180) degrees");
  require_frequency(sec.f0_hz);
}

void require_same_frequency(const two_port& lhs, const two_port& rhs) {
  double scale = std::max(std::abs(lhs.f_hz), std::abs(rhs.f_hz));
  if (std::abs(lhs.f_hz - rhs.f_hz) > 1e-12 * scale)
    throw validation_error("cascade requires matching frequencies");
}

}  // namespace

double wrap_deg(double deg) {
  double w = std::fmod(deg, 360.0);
  if (w < 0.0) w += 360.0;
  return w;
}

double circular_diff_deg(double a, double b) {
  double d = std::fmod(a - b, 360.0);
  if (d <= -180.0) d += 360.0;
  if (d > 180.0) d -= 360.0;
  return d;
}

complex reflection_coefficient(complex z, double zref_ohm) {
  require(zref_ohm > 0.0, "reference impedance must be positive");
  require(std::isfinite(z.real()) && std::isfinite(z.imag()),
          "impedance must be finite");
  complex den = z + zref_ohm;
  if (std::abs(den) < 1e-12 * (std::abs(z) + zref_ohm))
    throw singularity_error("reflection coefficient singular at z = -zref");
  return (z - zref_ohm) / den;
}

complex reflection_coefficient(const termination& load, double zref_ohm) {
  require(zref_ohm > 0.0, "reference impedance must be positive");
  if (load.is_open()) return complex(1.0, 0.0);
  if (load.is_short()) return complex(-1.0, 0.0);
  return reflection_coefficient(load.z(), zref_ohm);
}

complex termination::z() const {
  if (kind_ != kind::finite)
    throw validation_error("open/short termination has no finite impedance");
  return z_;
}

double tline_section::theta_deg(double f_hz) const {
  return theta0_deg * f_hz / f0_hz;
}

tline_section make_tline_section(double z0_ohm, double theta0_deg, double f0_hz) {
  tline_section sec{z0_ohm, theta0_deg, f0_hz};
  require_section(sec);
  return sec;
}

complex tline_input_impedance(const tline_section& sec, const termination& load,
                              double f_hz) {
  require_section(sec);
  require_frequency(f_hz);

  double theta = deg_to_rad(sec.theta_deg(f_hz));
  double s = std::sin(theta);
  double c = std::cos(theta);
  double z0 = sec.z0_ohm;

  // |sin| and |cos| double as distance-in-radians guards near the
  // singular angles (n*180 and odd multiples of 90 degrees).
  if (load.is_open()) {
    if (std::abs(s) < 1e-9)
      throw singularity_error("open line at a multiple of 180 degrees");
    return complex(0.0, -z0 * c / s);
  }
  if (load.is_short()) {
    if (std::abs(c) < 1e-9)
      throw singularity_error("shorted quarter-wave line has unbounded Zin");
    return complex(0.0, z0 * s / c);
  }

  complex zl = load.z();
  complex num = zl * c + complex(0.0, 1.0) * z0 * s;
  complex den = z0 * c + complex(0.0, 1.0) * zl * s;
  if (std::abs(den) < 1e-9 * (z0 + std::abs(zl)))
    throw singularity_error("line input impedance unbounded (reactive resonance)");
  return z0 * num / den;
}

complex two_port::input_impedance(complex zl) const {
  complex den = c * zl + d;
  if (std::abs(den) < 1e-12 * (std::abs(c * zl) + std::abs(d)))
    throw singularity_error("two-port input impedance unbounded");
  return (a * zl + b) / den;
}

two_port identity_two_port(double f_hz) {
  require_frequency(f_hz);
  return {1.0, 0.0, 0.0, 1.0, f_hz};
}

two_port series_impedance(complex z, double f_hz) {
  require_frequency(f_hz);
  require(std::isfinite(z.real()) && std::isfinite(z.imag()),
          "series impedance must be finite");
  return {1.0, z, 0.0, 1.0, f_hz};
}

two_port shunt_admittance(complex y, double f_hz) {
  require_frequency(f_hz);
  require(std::isfinite(y.real()) && std::isfinite(y.imag()),
          "shunt admittance must be finite");
  return {1.0, 0.0, y, 1.0, f_hz};
}

two_port series_resistor(double r_ohm, double f_hz) {
  require(r_ohm > 0.0, "resistance must be positive");
  return series_impedance(complex(r_ohm, 0.0), f_hz);
}

two_port series_inductor(double l_henry, double f_hz) {
  require(l_henry > 0.0, "inductance must be positive");
  double w = 2.0 * pi * f_hz;
  return series_impedance(complex(0.0, w * l_henry), f_hz);
}

two_port series_capacitor(double c_farad, double f_hz) {
  require(c_farad > 0.0, "capacitance must be positive");
  double w = 2.0 * pi * f_hz;
  return series_impedance(complex(0.0, -1.0 / (w * c_farad)), f_hz);
}

two_port shunt_resistor(double r_ohm, double f_hz) {
  require(r_ohm > 0.0, "resistance must be positive");
  return shunt_admittance(complex(1.0 / r_ohm, 0.0), f_hz);
}

two_port shunt_inductor(double l_henry, double f_hz) {
  require(l_henry > 0.0, "inductance must be positive");
  double w = 2.0 * pi * f_hz;
  return shunt_admittance(complex(0.0, -1.0 / (w * l_henry)), f_hz);
}

two_port shunt_capacitor(double c_farad, double f_hz) {
  require(c_farad > 0.0, "capacitance must be positive");
  double w = 2.0 * pi * f_hz;
  return shunt_admittance(complex(0.0, w * c_farad), f_hz);
}

two_port tline_two_port(const tline_section& sec, double f_hz) {
  require_section(sec);
  require_frequency(f_hz);
  double theta = deg_to_rad(sec.theta_deg(f_hz));
  double s = std::sin(theta);
  double c = std::cos(theta);
  return {complex(c, 0.0), complex(0.0, sec.z0_ohm * s),
          complex(0.0, s / sec.z0_ohm), complex(c, 0.0), f_hz};
}

two_port cascade(const two_port& first, const two_port& second) {
  require_same_frequency(first, second);
  return {first.a * second.a + first.b * second.c,
          first.a * second.b + first.b * second.d,
          first.c * second.a + first.d * second.c,
          first.c * second.b + first.d * second.d, first.f_hz};
}

two_port cascade(const std::vector<two_port>& sections) {
  require(!sections.empty(), "cascade of an empty section list");
  two_port acc = sections.front();
  for (std::size_t i = 1; i < sections.size(); ++i) acc = cascade(acc, sections[i]);
  return acc;
}

sparams abcd_to_s(const two_port& tp, double zref1_ohm, double zref2_ohm) {
  require(zref1_ohm > 0.0 && zref2_ohm > 0.0,
          "reference impedances must be positive");
  complex a = tp.a, b = tp.b, c = tp.c, d = tp.d;
  double z1 = zref1_ohm, z2 = zref2_ohm;
  complex den = a * z2 + b + c * z1 * z2 + d * z1;
  double scale = std::abs(a * z2) + std::abs(b) + std::abs(c * z1 * z2) +
                 std::abs(d * z1);
  if (std::abs(den) < 1e-12 * scale)
    throw singularity_error("chain-to-scattering conversion denominator vanished");
  double root = std::sqrt(z1 * z2);
  return {(a * z2 + b - c * z1 * z2 - d * z1) / den,
          2.0 * (a * d - b * c) * root / den,
          2.0 * root / den,
          (-a * z2 + b - c * z1 * z2 + d * z1) / den};
}

two_port s_to_abcd(const sparams& s, double zref1_ohm, double zref2_ohm,
                   double f_hz) {
  require(zref1_ohm > 0.0 && zref2_ohm > 0.0,
          "reference impedances must be positive");
  require_frequency(f_hz);
  if (std::abs(s.s21) < 1e-300)
    throw singularity_error("zero transmission has no chain representation");
  complex den = 2.0 * s.s21;
  double z1 = zref1_ohm, z2 = zref2_ohm;
  complex a = ((1.0 + s.s11) * (1.0 - s.s22) + s.s12 * s.s21) / den *
              std::sqrt(z1 / z2);
  complex b = ((1.0 + s.s11) * (1.0 + s.s22) - s.s12 * s.s21) / den *
              std::sqrt(z1 * z2);
  complex c = ((1.0 - s.s11) * (1.0 - s.s22) - s.s12 * s.s21) / den /
              std::sqrt(z1 * z2);
  complex d = ((1.0 - s.s11) * (1.0 + s.s22) + s.s12 * s.s21) / den *
              std::sqrt(z2 / z1);
  return {a, b, c, d, f_hz};
}

sparam_block::sparam_block(std::size_t ports, std::vector<double> freqs_hz,
                           std::vector<double> zrefs_ohm)
    : ports_(ports), freqs_hz_(std::move(freqs_hz)), zrefs_ohm_(std::move(zrefs_ohm)) {
  require(ports_ >= 1, "S-parameter block needs at least one port");
  require(!freqs_hz_.empty(), "S-parameter block needs at least one frequency");
  for (std::size_t i = 0; i < freqs_hz_.size(); ++i) {
    require(std::isfinite(freqs_hz_[i]) && freqs_hz_[i] > 0.0,
            "frequencies must be positive");
    if (i > 0)
      require(freqs_hz_[i] > freqs_hz_[i - 1],
              "frequency grid must be strictly increasing");
  }
  require(zrefs_ohm_.size() == ports_, "one reference impedance per port");
  for (double z : zrefs_ohm_)
    require(std::isfinite(z) && z > 0.0, "reference impedances must be positive");
  data_.assign(freqs_hz_.size(), Eigen::MatrixXcd::Zero(ports_, ports_));
}

complex sparam_block::s(std::size_t fi, std::size_t row, std::size_t col) const {
  return data_[fi](static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
}

sweep_metrics_result sweep_metrics(const sparam_block& block, double threshold_db) {
  sweep_metrics_result out;
  const std::size_t n = block.points();
  out.return_loss_db.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double mag = std::abs(block.s(i, 0, 0));
    out.return_loss_db[i] = 20.0 * std::log10(std::max(mag, 1e-300));
  }

  // Widest contiguous run at or below threshold.
  std::size_t best_lo = 0, best_hi = 0;
  bool found = false;
  std::size_t i = 0;
  while (i < n) {
    if (out.return_loss_db[i] <= threshold_db) {
      std::size_t j = i;
      while (j + 1 < n && out.return_loss_db[j + 1] <= threshold_db) ++j;
      double width = block.freqs_hz()[j] - block.freqs_hz()[i];
      if (!found || width > block.freqs_hz()[best_hi] - block.freqs_hz()[best_lo]) {
        best_lo = i;
        best_hi = j;
        found = true;
      }
      i = j + 1;
    } else {
      ++i;
    }
  }
  if (found && best_hi > best_lo) {
    out.band_lo_hz = block.freqs_hz()[best_lo];
    out.band_hi_hz = block.freqs_hz()[best_hi];
    double center = 0.5 * (out.band_lo_hz + out.band_hi_hz);
    out.fractional_bandwidth_pct = (out.band_hi_hz - out.band_lo_hz) / center * 100.0;
  }

  if (block.ports() >= 2) {
    out.insertion_phase_deg.resize(n);
    double prev_raw = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      double raw = rad_to_deg(std::arg(block.s(k, 1, 0)));
      if (k == 0) {
        out.insertion_phase_deg[0] = raw;
      } else {
        double step = raw - prev_raw;
        while (step > 180.0) step -= 360.0;
        while (step <= -180.0) step += 360.0;
        out.insertion_phase_deg[k] = out.insertion_phase_deg[k - 1] + step;
      }
      prev_raw = raw;
    }
  }
  return out;
}

}  // namespace qadpa
