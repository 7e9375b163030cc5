#include "qadpa/doherty.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>

#include "qadpa/errors.hpp"

namespace qadpa {

double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

double watts_to_dbm(double watts) {
  if (!(watts > 0.0)) throw validation_error("power must be positive to express in dBm");
  return 10.0 * std::log10(watts / 1e-3);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double lin) {
  if (!(lin > 0.0)) throw validation_error("ratio must be positive to express in dB");
  return 10.0 * std::log10(lin);
}

double backoff_from_delta(const size_ratio& r) {
  if (!(r.delta >= 0.0) || !std::isfinite(r.delta))
    throw validation_error("size ratio delta must be finite and non-negative");
  return -10.0 * std::log10(1.0 + r.delta * r.delta);
}

size_ratio delta_from_backoff(double obo_db) {
  if (!std::isfinite(obo_db) || obo_db < 0.0)
    throw validation_error("back-off must be finite and non-negative dB");
  return size_ratio{std::sqrt(std::pow(10.0, obo_db / 10.0) - 1.0)};
}

double combine(double p_main_w, double p_aux_w, double phase_offset_deg,
               double design_ratio_k2) {
  if (!(p_main_w >= 0.0) || !(p_aux_w >= 0.0))
    throw validation_error("combiner input powers must be non-negative");
  if (!(design_ratio_k2 > 0.0))
    throw validation_error("combiner design ratio must be positive");
  const double c2 = 1.0 / std::sqrt(1.0 + design_ratio_k2);
  const double c3 = std::sqrt(design_ratio_k2) / std::sqrt(1.0 + design_ratio_k2);
  const complex sum = c2 * std::sqrt(p_main_w) +
                      c3 * std::sqrt(p_aux_w) *
                          std::exp(complex(0.0, deg_to_rad(phase_offset_deg)));
  return std::norm(sum);
}

double path_output_watts(const path_model& m, double p_in_w) {
  if (!(p_in_w >= 0.0)) throw validation_error("path input power must be non-negative");
  if (!(m.knee_sharpness > 0.0)) throw validation_error("knee sharpness must be positive");
  const double g = db_to_linear(m.small_signal_gain_db);
  const double psat = dbm_to_watts(m.p_sat_dbm);
  const double linear = g * p_in_w;
  if (linear == 0.0) return 0.0;
  const double s2 = 2.0 * m.knee_sharpness;
  // (1 + x^s2)^(-1/s2) in log space to stay finite deep in saturation
  const double t = std::log1p(std::pow(linear / psat, s2));
  return linear * std::exp(-t / s2);
}

double split_function::main_fraction(double pin_dbm) const {
  if (!(transition_width_db > 0.0))
    throw validation_error("split transition width must be positive");
  for (double f : {main_fraction_low, main_fraction_high})
    if (!(f >= 0.0 && f <= 1.0))
      throw validation_error("split fractions must lie in [0, 1]");
  const double x = (pin_dbm - transition_center_dbm) / transition_width_db;
  const double sig = 1.0 / (1.0 + std::exp(-x));
  return main_fraction_low + (main_fraction_high - main_fraction_low) * sig;
}

chain_curves chain_response(const doherty_chain& chain,
                            const std::vector<double>& pin_dbm) {
  if (pin_dbm.empty()) throw validation_error("drive grid must be non-empty");
  for (std::size_t i = 1; i < pin_dbm.size(); ++i)
    if (!(pin_dbm[i] > pin_dbm[i - 1]))
      throw validation_error("drive grid must be strictly increasing");

  chain_curves out;
  out.pin_dbm = pin_dbm;
  const std::size_t n = pin_dbm.size();
  out.pout_dbm.resize(n);
  out.gain_db.resize(n);
  out.main_fraction.resize(n);
  out.p_main_in_dbm.resize(n);
  out.p_aux_in_dbm.resize(n);
  out.p_main_out_dbm.resize(n);
  out.p_aux_out_dbm.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const double pin_w = dbm_to_watts(pin_dbm[i]);
    const double fm = chain.split.main_fraction(pin_dbm[i]);
    if (!(fm > 0.0 && fm < 1.0))
      throw validation_error("split must keep both paths driven");
    const double pm_in = fm * pin_w;
    const double pa_in = (1.0 - fm) * pin_w;
    const double pm_out = path_output_watts(chain.main, pm_in);
    const double pa_out = path_output_watts(chain.aux, pa_in);
    const double pout_w = combine(pm_out, pa_out, chain.phase_offset_deg,
                                  chain.combiner_ratio_k2);
    out.main_fraction[i] = fm;
    out.p_main_in_dbm[i] = watts_to_dbm(pm_in);
    out.p_aux_in_dbm[i] = watts_to_dbm(pa_in);
    out.p_main_out_dbm[i] = watts_to_dbm(pm_out);
    out.p_aux_out_dbm[i] = watts_to_dbm(pa_out);
    out.pout_dbm[i] = watts_to_dbm(pout_w);
    out.gain_db[i] = out.pout_dbm[i] - pin_dbm[i];
  }
  return out;
}

chain_metrics metrics(const chain_curves& curves, const doherty_chain& chain,
                      double aux_share_threshold) {
  if (curves.pin_dbm.empty()) throw validation_error("curves are empty");
  if (!(aux_share_threshold > 0.0 && aux_share_threshold < 1.0))
    throw validation_error("aux share threshold must lie in (0, 1)");

  chain_metrics m;
  m.small_signal_gain_db = curves.gain_db.front();
  m.peak_pout_dbm = *std::max_element(curves.pout_dbm.begin(), curves.pout_dbm.end());
  m.compression_db = 0.0;
  for (double g : curves.gain_db)
    m.compression_db = std::max(m.compression_db, m.small_signal_gain_db - g);

  // Aux share of the summed path output powers; the crossing drive is found
  // by linear interpolation between grid points.
  const std::size_t n = curves.pin_dbm.size();
  std::vector<double> share(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pm = dbm_to_watts(curves.p_main_out_dbm[i]);
    const double pa = dbm_to_watts(curves.p_aux_out_dbm[i]);
    share[i] = pa / (pm + pa);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (share[i] < aux_share_threshold && share[i + 1] >= aux_share_threshold) {
      const double t = (aux_share_threshold - share[i]) / (share[i + 1] - share[i]);
      const double pout_cross =
          curves.pout_dbm[i] + t * (curves.pout_dbm[i + 1] - curves.pout_dbm[i]);
      m.opbo_db = m.peak_pout_dbm - pout_cross;
      break;
    }
  }

  if (chain.main.dc_power_w && chain.aux.dc_power_w) {
    const double pdc = *chain.main.dc_power_w + *chain.aux.dc_power_w;
    if (!(pdc > 0.0)) throw validation_error("dc power must be positive");
    std::vector<double> eff(n);
    for (std::size_t i = 0; i < n; ++i)
      eff[i] = dbm_to_watts(curves.pout_dbm[i]) / pdc;
    m.drain_efficiency = std::move(eff);
  }
  return m;
}

namespace {

double clip(double x, double level) { return std::clamp(x, -level, level); }

struct fftw_real_buffer {
  double* p = nullptr;
  explicit fftw_real_buffer(std::size_t n)
      : p(static_cast<double*>(fftw_malloc(sizeof(double) * n))) {
    if (!p) throw numerical_error("fftw_malloc failed");
  }
  ~fftw_real_buffer() { fftw_free(p); }
  fftw_real_buffer(const fftw_real_buffer&) = delete;
  fftw_real_buffer& operator=(const fftw_real_buffer&) = delete;
};

struct fftw_complex_buffer {
  fftw_complex* p = nullptr;
  explicit fftw_complex_buffer(std::size_t n)
      : p(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
    if (!p) throw numerical_error("fftw_malloc failed");
  }
  ~fftw_complex_buffer() { fftw_free(p); }
  fftw_complex_buffer(const fftw_complex_buffer&) = delete;
  fftw_complex_buffer& operator=(const fftw_complex_buffer&) = delete;
};

}  // namespace

harmonic_result harmonic_cascade(const std::vector<stage_clipper>& stages,
                                 double drive_amplitude_v, std::size_t n_periods,
                                 std::size_t samples_per_period) {
  if (stages.empty()) throw validation_error("stage chain must be non-empty");
  for (const auto& st : stages) {
    if (!(st.gain > 0.0)) throw validation_error("stage gain must be positive");
    if (!(st.clip_level_v > 0.0)) throw validation_error("stage clip level must be positive");
  }
  if (!(drive_amplitude_v > 0.0))
    throw validation_error("drive amplitude must be positive");
  if (n_periods == 0) throw validation_error("need at least one period");
  if (samples_per_period < 64 ||
      (samples_per_period & (samples_per_period - 1)) != 0)
    throw validation_error("samples per period must be a power of two >= 64");

  const std::size_t n = n_periods * samples_per_period;
  fftw_real_buffer time(n);
  fftw_complex_buffer freq(n / 2 + 1);

  for (std::size_t i = 0; i < n; ++i) {
    double v = drive_amplitude_v *
               std::sin(2.0 * pi * static_cast<double>(i % samples_per_period) /
                        static_cast<double>(samples_per_period));
    for (const auto& st : stages) v = clip(st.gain * v, st.clip_level_v);
    time.p[i] = v;
  }

  double mean_square = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean_square += time.p[i] * time.p[i];
  mean_square /= static_cast<double>(n);
  if (mean_square <= 0.0)
    throw numerical_error("degenerate output signal, nothing to analyze");

  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), time.p, freq.p,
                                        FFTW_ESTIMATE);
  if (!plan) throw numerical_error("fftw plan creation failed");
  // planning with FFTW_ESTIMATE preserves the input buffer
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  const std::size_t n_bins = n / 2 + 1;
  auto amplitude = [&](std::size_t k) {
    const complex x(freq.p[k][0], freq.p[k][1]);
    const double scale = (k == 0 || k == n / 2) ? 1.0 : 2.0;
    return scale * std::abs(x) / static_cast<double>(n);
  };

  // mean square = dc^2 + sum over positive bins of a_k^2 / 2 (+ Nyquist)
  double bin_power = 0.0;
  for (std::size_t k = 0; k < n_bins; ++k) {
    const double a = amplitude(k);
    bin_power += (k == 0 || k == n / 2) ? a * a : 0.5 * a * a;
  }

  harmonic_result r;
  r.time_mean_square = mean_square;
  r.bin_power_sum = bin_power;
  const std::size_t k1 = n_periods;
  if (3 * k1 >= n_bins) throw numerical_error("grid too coarse for third harmonic");
  r.fundamental_v = amplitude(k1);
  r.h2_v = amplitude(2 * k1);
  r.h3_v = amplitude(3 * k1);
  if (!(r.fundamental_v > 0.0))
    throw numerical_error("no fundamental content in output signal");
  const double floor_v = 1e-300;
  r.h2_dbc = 20.0 * std::log10(std::max(r.h2_v, floor_v) / r.fundamental_v);
  r.h3_dbc = 20.0 * std::log10(std::max(r.h3_v, floor_v) / r.fundamental_v);
  return r;
}

std::vector<biasing_case> biasing_study_cases() {
  // Two stages of voltage gain 2 each. Drive 0.6 V reaches 1.2 V after
  // stage 1 and 2.4 V after stage 2 when unclipped; the clip placement
  // then controls how much distortion each stage contributes.
  return {
      {"first_stage_clips", {{2.0, 1.0}, {2.0, 10.0}}},
      {"balanced_headroom", {{2.0, 1.8}, {2.0, 1.8}}},
      {"second_stage_clips", {{2.0, 10.0}, {2.0, 1.0}}},
  };
}

}  // namespace qadpa
