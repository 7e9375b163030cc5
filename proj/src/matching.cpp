#include "qadpa/matching.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qadpa/errors.hpp"

namespace qadpa {

namespace {

constexpr complex j1(0.0, 1.0);

void require(bool ok, const std::string& what) {
  if (!ok) throw validation_error(what);
}

void require_spec(const match_spec& spec) {
  require(std::abs(spec.z_source) > 0.0, "z_source must be nonzero");
  require(spec.z_source.real() >= 0.0, "z_source must be passive");
  require(spec.z_intermediate_ohm > 0.0 && spec.z_target_ohm > 0.0,
          "intermediate and target impedances must be positive");
  require(spec.f0_hz > 0.0, "f0 must be positive");
  require(spec.band_lo_hz < spec.f0_hz && spec.f0_hz < spec.band_hi_hz,
          "band must bracket f0");
  require(spec.phase_target_deg >= 0.0 && spec.phase_target_deg < 360.0,
          "phase target must lie in [0, 360)");
}

void require_cfg(const ga_config& cfg) {
  require(cfg.population >= 2, "population must be at least 2");
  require(cfg.generations >= 1, "need at least one generation");
  require(cfg.tournament >= 1 && cfg.tournament <= cfg.population,
          "tournament size out of range");
  require(cfg.elites < cfg.population, "elite count must be below population");
  require(cfg.crossover_rate >= 0.0 && cfg.crossover_rate <= 1.0,
          "crossover rate must lie in [0,1]");
  require(cfg.mutation_sigma > 0.0, "mutation sigma must be positive");
  require(cfg.penalty_weight >= 0.0, "penalty weight must be non-negative");
  require(cfg.z0_min_ohm > 0.0 && cfg.z0_min_ohm < cfg.z0_max_ohm,
          "z0 bounds degenerate");
  require(cfg.theta_min_deg > 0.0 && cfg.theta_min_deg < cfg.theta_max_deg &&
              cfg.theta_max_deg < 180.0,
          "theta bounds degenerate");
}

// tan via sin/cos with the documented 1e-9 rad guard around odd multiples
// of 90 degrees; reports failure through the ok flag.
bool guarded_tan(double theta_deg, double& out) {
  double theta = deg_to_rad(theta_deg);
  double c = std::cos(theta);
  if (std::abs(c) < 1e-9) return false;
  out = std::sin(theta) / c;
  return true;
}

complex wanted_source(const match_spec& spec) {
  return spec.conjugate_mode ? std::conj(spec.z_source) : spec.z_source;
}

complex section_residual(double z0, double tan_theta, complex z_in, double z_out) {
  // Cross-multiplied form of z_in = Z0 (z_out + j Z0 t)/(Z0 + j z_out t).
  return z0 * (z_out + j1 * z0 * tan_theta) -
         z_in * (z0 + j1 * z_out * tan_theta);
}

complex presented_impedance(const match_params& p, const match_spec& spec,
                            double f_hz) {
  tline_section sec1{p[0], p[1], spec.f0_hz};
  tline_section sec2{p[2], p[3], spec.f0_hz};
  complex mid = tline_input_impedance(sec2, termination(spec.z_target_ohm), f_hz);
  return tline_input_impedance(sec1, termination(mid), f_hz);
}

complex generalized_gamma(complex z, complex zref) {
  return (z - zref) / (z + zref);
}

}  // namespace

double objective_eq4(const match_params& params, const match_spec& spec) {
  require_spec(spec);
  double t1, t2;
  if (!guarded_tan(params[1], t1) || !guarded_tan(params[3], t2))
    return objective_singular_penalty;
  complex r1 = section_residual(params[0], t1, wanted_source(spec),
                                spec.z_intermediate_ohm);
  complex r2 = section_residual(params[2], t2, complex(spec.z_intermediate_ohm),
                                spec.z_target_ohm);
  return std::norm(r1) + std::norm(r2);
}

double cascade_phase_lag_deg(const match_params& params, const match_spec& spec) {
  tline_section sec1{params[0], params[1], spec.f0_hz};
  tline_section sec2{params[2], params[3], spec.f0_hz};
  two_port chain =
      cascade(tline_two_port(sec1, spec.f0_hz), tline_two_port(sec2, spec.f0_hz));
  sparams s = abcd_to_s(chain, spec.z_target_ohm, spec.z_target_ohm);
  return wrap_deg(-rad_to_deg(std::arg(s.s21)));
}

double match_fitness(const match_params& params, const match_spec& spec,
                     const ga_config& cfg) {
  double scale = std::norm(spec.z_source) * cfg.z0_max_ohm * cfg.z0_max_ohm;
  double objective = objective_eq4(params, spec) / scale;
  double phase_err =
      circular_diff_deg(cascade_phase_lag_deg(params, spec), spec.phase_target_deg);
  double phase_norm = phase_err / 180.0;
  return objective + cfg.penalty_weight * phase_norm * phase_norm;
}

match_eval evaluate_match_candidate(const match_params& params,
                                    const match_spec& spec,
                                    const ga_config& cfg) {
  match_eval ev;
  ev.objective = objective_eq4(params, spec);
  double scale = std::norm(spec.z_source) * cfg.z0_max_ohm * cfg.z0_max_ohm;
  double phase_err = circular_diff_deg(cascade_phase_lag_deg(params, spec),
                                       spec.phase_target_deg);
  double phase_norm = phase_err / 180.0;
  ev.fitness =
      ev.objective / scale + cfg.penalty_weight * phase_norm * phase_norm;
  ev.phase_err_deg = std::abs(phase_err);
  ev.gamma_mag = std::abs(generalized_gamma(
      presented_impedance(params, spec, spec.f0_hz), wanted_source(spec)));
  ev.violation =
      std::max(0.0, (ev.gamma_mag - feasible_gamma_max) / feasible_gamma_max) +
      std::max(0.0, (ev.phase_err_deg - feasible_phase_err_deg) /
                        feasible_phase_err_deg);
  ev.feasible = ev.violation == 0.0;
  // The offset sits above any reachable fitness (the objective is capped by
  // the singular sentinel), so every feasible candidate outranks every
  // infeasible one and infeasible candidates compare by violation alone.
  ev.selection_key = ev.feasible ? ev.fitness : 1e30 * (1.0 + ev.violation);
  return ev;
}

match_result synthesize_two_section(const match_spec& spec, const ga_config& cfg) {
  require_spec(spec);
  require_cfg(cfg);

  const std::array<double, 4> lo = {cfg.z0_min_ohm, cfg.theta_min_deg,
                                    cfg.z0_min_ohm, cfg.theta_min_deg};
  const std::array<double, 4> hi = {cfg.z0_max_ohm, cfg.theta_max_deg,
                                    cfg.z0_max_ohm, cfg.theta_max_deg};
  std::array<double, 4> range;
  for (int g = 0; g < 4; ++g) range[g] = hi[g] - lo[g];

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<match_params> pop(cfg.population);
  for (auto& ind : pop)
    for (int g = 0; g < 4; ++g) ind[g] = lo[g] + unit(rng) * range[g];

  // Feasibility-first ranking: feasible candidates compare by fitness,
  // infeasible ones by constraint violation, and feasible always wins.
  auto key_of = [&](const match_params& p) {
    return evaluate_match_candidate(p, spec, cfg).selection_key;
  };
  std::vector<double> fit(cfg.population);
  for (std::size_t i = 0; i < cfg.population; ++i) fit[i] = key_of(pop[i]);

  std::vector<std::size_t> order(cfg.population);
  auto rank = [&] {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fit[a] < fit[b]; });
  };

  auto tournament_pick = [&]() -> const match_params& {
    std::size_t best = static_cast<std::size_t>(unit(rng) * cfg.population);
    if (best >= cfg.population) best = cfg.population - 1;
    for (std::size_t t = 1; t < cfg.tournament; ++t) {
      std::size_t k = static_cast<std::size_t>(unit(rng) * cfg.population);
      if (k >= cfg.population) k = cfg.population - 1;
      if (fit[k] < fit[best]) best = k;
    }
    return pop[best];
  };

  // Exploration at the configured sigma for the first half, then geometric
  // cooling so the elites converge to the residual zero set.
  const std::size_t anneal_start = cfg.generations / 2;
  const double anneal_decay = 0.82;
  double sigma_scale = 1.0;

  for (std::size_t gen = 0; gen < cfg.generations; ++gen) {
    if (gen >= anneal_start)
      sigma_scale = std::max(sigma_scale * anneal_decay, 1e-14);
    rank();

    std::vector<match_params> next;
    next.reserve(cfg.population);
    for (std::size_t e = 0; e < cfg.elites; ++e) next.push_back(pop[order[e]]);

    while (next.size() < cfg.population) {
      match_params child;
      const match_params& p1 = tournament_pick();
      const match_params& p2 = tournament_pick();
      if (unit(rng) < cfg.crossover_rate) {
        double alpha = unit(rng);
        for (int g = 0; g < 4; ++g)
          child[g] = alpha * p1[g] + (1.0 - alpha) * p2[g];
      } else {
        child = p1;
      }
      for (int g = 0; g < 4; ++g) {
        child[g] += gauss(rng) * cfg.mutation_sigma * sigma_scale * range[g];
        child[g] = std::clamp(child[g], lo[g], hi[g]);
      }
      next.push_back(child);
    }

    pop = std::move(next);
    for (std::size_t i = 0; i < cfg.population; ++i) fit[i] = key_of(pop[i]);
  }

  rank();
  const match_params best = pop[order[0]];
  const match_eval best_eval = evaluate_match_candidate(best, spec, cfg);

  match_result out;
  out.section1 = make_tline_section(best[0], best[1], spec.f0_hz);
  out.section2 = make_tline_section(best[2], best[3], spec.f0_hz);
  out.penalized_fitness = best_eval.fitness;
  out.objective = best_eval.objective;

  double t1 = 0.0, t2 = 0.0;
  complex zw = wanted_source(spec);
  if (guarded_tan(best[1], t1))
    out.residual_r1 = section_residual(best[0], t1, zw, spec.z_intermediate_ohm);
  if (guarded_tan(best[3], t2))
    out.residual_r2 = section_residual(best[2], t2,
                                       complex(spec.z_intermediate_ohm),
                                       spec.z_target_ohm);

  out.achieved_phase_deg = cascade_phase_lag_deg(best, spec);
  out.gamma_at_f0 =
      generalized_gamma(presented_impedance(best, spec, spec.f0_hz), zw);

  out.feasible = best_eval.feasible;

  const std::size_t n_band = 101;
  out.band_freqs_hz.resize(n_band);
  out.band_return_loss_db.resize(n_band);
  for (std::size_t i = 0; i < n_band; ++i) {
    double f = spec.band_lo_hz +
               (spec.band_hi_hz - spec.band_lo_hz) * static_cast<double>(i) /
                   static_cast<double>(n_band - 1);
    out.band_freqs_hz[i] = f;
    complex gamma = generalized_gamma(presented_impedance(best, spec, f), zw);
    out.band_return_loss_db[i] =
        20.0 * std::log10(std::max(std::abs(gamma), 1e-300));
  }
  return out;
}

tline_section quarter_wave(double z_load_ohm, double z_target_ohm, double f0_hz) {
  require(z_load_ohm > 0.0 && z_target_ohm > 0.0,
          "quarter-wave matching needs positive real impedances");
  return make_tline_section(std::sqrt(z_load_ohm * z_target_ohm), 90.0, f0_hz);
}

pi_equivalent_result pi_equivalent(const tline_section& sec) {
  make_tline_section(sec.z0_ohm, sec.theta0_deg, sec.f0_hz);  // validates range
  double w0 = 2.0 * pi * sec.f0_hz;
  double theta = deg_to_rad(sec.theta0_deg);
  return {sec.z0_ohm * std::sin(theta) / w0,
          std::tan(theta / 2.0) / (w0 * sec.z0_ohm), sec.f0_hz};
}

double theta_from_shunt_c(double c_farad, double z0_ohm, double f0_hz) {
  require(c_farad > 0.0, "capacitance must be positive");
  require(z0_ohm > 0.0, "z0 must be positive");
  require(f0_hz > 0.0, "f0 must be positive");
  double w0 = 2.0 * pi * f0_hz;
  return rad_to_deg(2.0 * std::atan(w0 * z0_ohm * c_farad));
}

}  // namespace qadpa
