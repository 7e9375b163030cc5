#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qadpa/rf.hpp"

namespace qadpa {

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);
double linear_to_db(double lin);

struct size_ratio {
  double delta = 0.0;  // PA_aux / PA_main device size ratio, >= 0
};

// -10 log10(1 + delta^2), always <= 0.
double backoff_from_delta(const size_ratio& r);

// delta = sqrt(10^(obo/10) - 1); inverse of backoff_from_delta.
size_ratio delta_from_backoff(double obo_db);

// Ideal matched lossless combiner with design ratio K^2 = p_aux/p_main:
// output = |c2 sqrt(pm) + c3 sqrt(pa) e^{j dphi}|^2 with c2 = 1/sqrt(1+K^2),
// c3 = K/sqrt(1+K^2). Design-ratio in-phase inputs combine without loss;
// the remainder is dissipated in the bridge.
double combine(double p_main_w, double p_aux_w, double phase_offset_deg,
               double design_ratio_k2);

struct path_model {
  double small_signal_gain_db = 0.0;
  double p_sat_dbm = 30.0;
  double knee_sharpness = 2.0;  // > 0; larger is a harder knee
  std::optional<double> dc_power_w;
};

// Smooth limiter, linear-unit powers:
// p_out = G p_in (1 + (G p_in / p_sat)^(2s))^(-1/(2s)).
double path_output_watts(const path_model& m, double p_in_w);

// Logistic transition of the main path's input power share, main-heavy at
// low drive per the architecture.
struct split_function {
  double main_fraction_low = 0.9;
  double main_fraction_high = 0.1;
  double transition_center_dbm = 10.0;
  double transition_width_db = 2.5;

  double main_fraction(double pin_dbm) const;
};

struct doherty_chain {
  split_function split;
  path_model main;
  path_model aux;
  double combiner_ratio_k2 = 1.0;
  double phase_offset_deg = 0.0;
};

struct chain_curves {
  std::vector<double> pin_dbm;
  std::vector<double> pout_dbm;
  std::vector<double> gain_db;
  std::vector<double> main_fraction;
  std::vector<double> p_main_in_dbm, p_aux_in_dbm;
  std::vector<double> p_main_out_dbm, p_aux_out_dbm;
};

chain_curves chain_response(const doherty_chain& chain,
                            const std::vector<double>& pin_dbm);

struct chain_metrics {
  double small_signal_gain_db = 0.0;  // gain at the lowest grid point
  double peak_pout_dbm = 0.0;
  double compression_db = 0.0;  // max(small-signal gain - gain)
  // Back-off from peak at the drive where the aux path first contributes
  // aux_share_threshold of the summed path output power.
  std::optional<double> opbo_db;
  std::optional<std::vector<double>> drain_efficiency;  // per grid point
};

inline constexpr double default_aux_share_threshold = 0.10;

chain_metrics metrics(const chain_curves& curves, const doherty_chain& chain,
                      double aux_share_threshold = default_aux_share_threshold);

// One amplifier stage for the biasing study: linear gain then symmetric hard
// clip at +/- clip_level.
struct stage_clipper {
  double gain = 1.0;          // linear voltage gain, > 0
  double clip_level_v = 1.0;  // > 0
};

struct harmonic_result {
  double fundamental_v = 0.0;  // output amplitude at the drive frequency
  double h2_v = 0.0;
  double h3_v = 0.0;
  double h2_dbc = 0.0;
  double h3_dbc = 0.0;
  // Parseval bookkeeping: total spectral power vs time-domain mean square.
  double bin_power_sum = 0.0;
  double time_mean_square = 0.0;

  double h23_power() const { return 0.5 * (h2_v * h2_v + h3_v * h3_v); }
};

// Drives a sine through the stage chain and DFTs an integer number of
// periods. samples_per_period must be a power of two >= 64.
harmonic_result harmonic_cascade(const std::vector<stage_clipper>& stages,
                                 double drive_amplitude_v, std::size_t n_periods,
                                 std::size_t samples_per_period);

// Documented representative biasing study: two stages of equal gain with the
// clipping placed in stage 1, allocated evenly (equal levels, only the output
// stage engages at the study drive), or placed in stage 2. At
// biasing_study_drive_v the harmonic output power is ordered
// first < balanced < second.
struct biasing_case {
  std::string name;
  std::vector<stage_clipper> stages;
};

inline constexpr double biasing_study_drive_v = 0.6;

std::vector<biasing_case> biasing_study_cases();

}  // namespace qadpa
