#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qadpa/rf.hpp"

namespace qadpa {

struct match_spec {
  complex z_source;            // impedance the network must present
  double z_intermediate_ohm;   // junction impedance between the two sections
  double z_target_ohm;         // system side
  double f0_hz;
  double band_lo_hz;
  double band_hi_hz;
  double phase_target_deg;     // insertion phase lag to realize, [0, 360)
  bool conjugate_mode = false; // match conj(z_source) instead
};

struct ga_config {
  std::size_t population = 200;
  std::size_t generations = 300;
  std::size_t tournament = 3;
  std::size_t elites = 2;
  double crossover_rate = 0.9;
  double mutation_sigma = 0.05;  // fraction of each parameter's range
  double penalty_weight = 10.0;
  std::uint64_t seed = 1;
  // The lower impedance bound must admit thin high-current lines: the
  // canonical complex-to-25-ohm first section lands near 14.4 ohms.
  double z0_min_ohm = 10.0;
  double z0_max_ohm = 110.0;
  double theta_min_deg = 5.0;
  double theta_max_deg = 175.0;
};

// Candidate layout: {Z_o1, theta_1, Z_o2, theta_2}; section 1 faces z_source.
using match_params = std::array<double, 4>;

// Returned instead of an exception when tan(theta) sits inside the 1e-9 rad
// guard band, so optimizers can traverse the singularity.
inline constexpr double objective_singular_penalty = 1e30;

// Feasibility thresholds for the best-effort flag on synthesis results.
inline constexpr double feasible_gamma_max = 0.1;
inline constexpr double feasible_phase_err_deg = 5.0;

// Sum of squared magnitudes of the two cross-multiplied section residuals:
// r1 = Zo1 (z_int + j Zo1 tan t1) - z_src (Zo1 + j z_int tan t1)
// r2 = Zo2 (z_tgt + j Zo2 tan t2) - z_int (Zo2 + j z_tgt tan t2)
// Zero exactly when both section input-impedance equations hold.
double objective_eq4(const match_params& params, const match_spec& spec);

// GA fitness: objective normalized by |z_src|^2 z0_max^2, plus
// penalty_weight * (phase error / 180)^2.
double match_fitness(const match_params& params, const match_spec& spec,
                     const ga_config& cfg);

// Insertion phase lag of the two-section cascade at f0: -angle(S21) wrapped
// to [0, 360), with S21 referenced to z_target on both ports.
double cascade_phase_lag_deg(const match_params& params, const match_spec& spec);

// Full scoring of one candidate. Selection is feasibility-first: any
// candidate meeting the gamma and phase thresholds outranks every candidate
// that does not; feasible ones compare by the penalized fitness, infeasible
// ones by constraint violation. selection_key encodes that ordering in one
// scalar so the optimizer and the grid-search oracle rank identically.
struct match_eval {
  double objective = 0.0;
  double fitness = 0.0;        // normalized objective + phase penalty
  double gamma_mag = 0.0;      // |mismatch| of the presented impedance at f0
  double phase_err_deg = 0.0;  // wrapped distance to the phase target
  double violation = 0.0;      // 0 when feasible
  bool feasible = false;
  double selection_key = 0.0;
};

match_eval evaluate_match_candidate(const match_params& params,
                                    const match_spec& spec, const ga_config& cfg);

struct match_result {
  tline_section section1, section2;  // section 1 faces z_source
  complex residual_r1, residual_r2;
  double objective = 0.0;           // |r1|^2 + |r2|^2
  double penalized_fitness = 0.0;
  double achieved_phase_deg = 0.0;  // insertion lag at f0
  complex gamma_at_f0;  // mismatch of the presented impedance vs the wanted source
  bool feasible = false;
  std::vector<double> band_freqs_hz;        // 101-point grid across the band
  std::vector<double> band_return_loss_db;  // 20 log10 |gamma(f)|
};

// Elitist tournament GA over (Zo1, t1, Zo2, t2) ranking candidates by
// evaluate_match_candidate's selection key (feasibility-first). Mutation runs
// at mutation_sigma for the first half of the generations, then cools
// geometrically so elites can polish the residuals to numerical depth.
// Deterministic for a given (spec, cfg).
match_result synthesize_two_section(const match_spec& spec, const ga_config& cfg);

// Quarter-wave transformer between two real impedances.
tline_section quarter_wave(double z_load_ohm, double z_target_ohm, double f0_hz);

// Lumped pi equivalent of one line section at f0: shunt C, series L, shunt C.
struct pi_equivalent_result {
  double l_series_henry;
  double c_shunt_farad;  // each side
  double f0_hz;
};

pi_equivalent_result pi_equivalent(const tline_section& sec);

// Inverse of the pi shunt-capacitor formula: theta = 2 atan(w0 z0 c), degrees.
double theta_from_shunt_c(double c_farad, double z0_ohm, double f0_hz);

}  // namespace qadpa
