#include "qadpa/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qadpa/doherty.hpp"
#include "qadpa/errors.hpp"
#include "qadpa/io.hpp"
#include "qadpa/matching.hpp"
#include "qadpa/rf.hpp"
#include "qadpa/solver.hpp"
#include "qadpa/wilkinson.hpp"

namespace qadpa {

namespace {

double parse_double_strict(const std::string& text, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v))
    throw validation_error(std::string("bad ") + what + " '" + text + "'");
  return v;
}

// "re,im" or a bare real
complex parse_complex_pair(const std::string& text, const char* what) {
  const auto comma = text.find(',');
  if (comma == std::string::npos)
    return complex(parse_double_strict(text, what), 0.0);
  return complex(parse_double_strict(text.substr(0, comma), what),
                 parse_double_strict(text.substr(comma + 1), what));
}

std::pair<double, double> parse_range_pair(const std::string& text,
                                           const char* what) {
  const auto comma = text.find(',');
  if (comma == std::string::npos)
    throw validation_error(std::string(what) + " needs the form lo,hi");
  return {parse_double_strict(text.substr(0, comma), what),
          parse_double_strict(text.substr(comma + 1), what)};
}

std::uint64_t effective_seed(std::uint64_t flag_seed) {
  const char* env = std::getenv("QADPA_SEED");
  if (!env || !*env) return flag_seed;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (end != env + std::string(env).size())
    throw validation_error("QADPA_SEED must be an unsigned integer");
  return static_cast<std::uint64_t>(v);
}

std::vector<double> linspace(double lo, double hi, int points) {
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  grid.back() = hi;
  return grid;
}

void print_kv(const char* key, double value) {
  std::printf("%s = %.10g\n", key, value);
}

// ---- subcommand actions ---------------------------------------------------

struct analyze_options {
  std::string netlist_path, out_path, format = "ri";
  double fstart = 0.0, fstop = 0.0;
  int points = 0;
};

void run_analyze(const analyze_options& o) {
  const netlist nl = read_netlist_file(o.netlist_path);
  std::vector<double> grid;
  if (o.points < 1) throw validation_error("--points must be >= 1");
  if (o.points == 1) {
    if (o.fstop != o.fstart)
      throw validation_error("a single-point sweep needs --fstart == --fstop");
    grid = {o.fstart};
  } else {
    if (!(o.fstop > o.fstart))
      throw validation_error("--fstop must be above --fstart");
    grid = linspace(o.fstart, o.fstop, o.points);
  }

  const solve_report report = solve_sparams(nl, grid);
  if (!report.failures.empty()) {
    for (const auto& f : report.failures)
      std::fprintf(stderr, "f = %.10g Hz: %s\n", f.f_hz, f.message.c_str());
    throw numerical_error("sweep failed at " +
                          std::to_string(report.failures.size()) +
                          " frequency point(s)");
  }
  if (report.ill_conditioned)
    std::fprintf(stderr,
                 "warning: MNA system condition estimate above 1e12; "
                 "results may be inaccurate\n");
  const touchstone_format fmt = o.format == "ma" ? touchstone_format::ma
                                                 : touchstone_format::ri;
  write_touchstone(*report.sparams, o.out_path, fmt);
}

struct synth_match_options {
  std::string zsrc_text, band_text, out_path;
  double zint = 0.0, ztgt = 0.0, f0 = 0.0, phase = 120.0;
  std::uint64_t seed = 1;
  bool conjugate = false;
};

void run_synth_match(const synth_match_options& o) {
  match_spec spec;
  spec.z_source = parse_complex_pair(o.zsrc_text, "--zsrc");
  spec.z_intermediate_ohm = o.zint;
  spec.z_target_ohm = o.ztgt;
  spec.f0_hz = o.f0;
  if (o.band_text.empty()) {
    spec.band_lo_hz = 0.95 * o.f0;
    spec.band_hi_hz = 1.05 * o.f0;
  } else {
    const auto [lo, hi] = parse_range_pair(o.band_text, "--band");
    spec.band_lo_hz = lo;
    spec.band_hi_hz = hi;
  }
  spec.phase_target_deg = o.phase;
  spec.conjugate_mode = o.conjugate;

  ga_config cfg;
  cfg.seed = effective_seed(o.seed);

  const match_result r = synthesize_two_section(spec, cfg);

  nlohmann::ordered_json j;
  j["spec"] = {{"z_source_re", spec.z_source.real()},
               {"z_source_im", spec.z_source.imag()},
               {"z_intermediate_ohm", spec.z_intermediate_ohm},
               {"z_target_ohm", spec.z_target_ohm},
               {"f0_hz", spec.f0_hz},
               {"band_lo_hz", spec.band_lo_hz},
               {"band_hi_hz", spec.band_hi_hz},
               {"phase_target_deg", spec.phase_target_deg},
               {"conjugate", spec.conjugate_mode}};
  j["seed"] = cfg.seed;
  j["sections"] = nlohmann::ordered_json::array();
  for (const auto& sec : {r.section1, r.section2})
    j["sections"].push_back({{"z0_ohm", sec.z0_ohm},
                             {"theta0_deg", sec.theta0_deg},
                             {"f0_hz", sec.f0_hz}});
  j["residuals"] = {{"r1_re", r.residual_r1.real()},
                    {"r1_im", r.residual_r1.imag()},
                    {"r2_re", r.residual_r2.real()},
                    {"r2_im", r.residual_r2.imag()}};
  j["objective"] = r.objective;
  j["penalized_fitness"] = r.penalized_fitness;
  j["achieved_phase_deg"] = r.achieved_phase_deg;
  j["phase_error_deg"] =
      circular_diff_deg(r.achieved_phase_deg, spec.phase_target_deg);
  j["gamma_mag_at_f0"] = std::abs(r.gamma_at_f0);
  j["feasible"] = r.feasible;
  j["band"] = {{"freqs_hz", r.band_freqs_hz},
               {"return_loss_db", r.band_return_loss_db}};
  atomic_write_file(o.out_path, j.dump(2) + "\n");

  print_kv("z01_ohm", r.section1.z0_ohm);
  print_kv("theta1_deg", r.section1.theta0_deg);
  print_kv("z02_ohm", r.section2.z0_ohm);
  print_kv("theta2_deg", r.section2.theta0_deg);
  print_kv("objective", r.objective);
  print_kv("achieved_phase_deg", r.achieved_phase_deg);
  print_kv("gamma_mag_at_f0", std::abs(r.gamma_at_f0));
  std::printf("feasible = %s\n", r.feasible ? "yes" : "no");
}

struct synth_wilkinson_options {
  std::string out_path;
  double z0 = 50.0, ratio = 0.0, f0 = 0.0;
  bool lumped = false, no_bridge = false;
};

void run_synth_wilkinson(const synth_wilkinson_options& o) {
  const wilkinson_design d = design_wilkinson(o.z0, o.ratio, o.f0);
  wilkinson_netlist_options opt;
  opt.include_bridge = !o.no_bridge;
  opt.lumped = o.lumped;
  atomic_write_file(o.out_path, serialize_netlist(to_netlist(d, opt)));
  print_kv("k_squared", d.k_squared);
  print_kv("branch2_z0_ohm", d.branch2_z0_ohm);
  print_kv("branch3_z0_ohm", d.branch3_z0_ohm);
  print_kv("bridge_resistor_ohm", d.bridge_resistor_ohm);
  print_kv("output_transformer2_z0_ohm", d.output_transformer2_z0_ohm);
  print_kv("output_transformer3_z0_ohm", d.output_transformer3_z0_ohm);
}

struct pi_equiv_options {
  double z0 = 0.0, f0 = 0.0;
  std::optional<double> theta_deg;
  std::optional<double> cap_ff;
};

void run_pi_equiv(const pi_equiv_options& o) {
  if (o.theta_deg) {
    const auto pi_net = pi_equivalent(make_tline_section(o.z0, *o.theta_deg, o.f0));
    print_kv("l_nh", pi_net.l_series_henry * 1e9);
    print_kv("c_pf", pi_net.c_shunt_farad * 1e12);
  } else {
    print_kv("theta_deg", theta_from_shunt_c(*o.cap_ff * 1e-15, o.z0, o.f0));
  }
}

struct doherty_curves_options {
  std::string config_path, out_path;
  double aux_share = default_aux_share_threshold;
};

void run_doherty_curves(const doherty_curves_options& o) {
  const doherty_config cfg = read_doherty_config(o.config_path);
  const chain_curves curves = chain_response(cfg.chain, cfg.pin_grid());
  std::vector<std::vector<double>> rows(curves.pin_dbm.size());
  for (std::size_t i = 0; i < curves.pin_dbm.size(); ++i)
    rows[i] = {curves.pin_dbm[i], curves.pout_dbm[i], curves.gain_db[i]};
  write_csv(o.out_path, {"pin_dbm", "pout_dbm", "gain_db"}, rows);

  const chain_metrics m = metrics(curves, cfg.chain, o.aux_share);
  std::printf("small_signal_gain_db = %.4f\n", m.small_signal_gain_db);
  std::printf("peak_pout_dbm = %.4f\n", m.peak_pout_dbm);
  std::printf("compression_db = %.4f\n", m.compression_db);
  if (m.opbo_db)
    std::printf("opbo_db = %.4f\n", *m.opbo_db);
  else
    std::printf("opbo_db = n/a\n");
  if (m.drain_efficiency) {
    std::size_t peak = 0;
    for (std::size_t i = 0; i < curves.pout_dbm.size(); ++i)
      if (curves.pout_dbm[i] > curves.pout_dbm[peak]) peak = i;
    std::printf("drain_efficiency_at_peak = %.4f\n", (*m.drain_efficiency)[peak]);
  }
}

struct harmonics_options {
  std::string stages_text, out_path;
  double drive = 0.0;
  int periods = 16, samples = 1024;
};

std::vector<stage_clipper> parse_stage_list(const std::string& text) {
  std::vector<stage_clipper> stages;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    const std::string item = text.substr(pos, next - pos);
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw validation_error("stage '" + item + "' needs the form gain:clip");
    stages.push_back(
        {parse_double_strict(item.substr(0, colon), "stage gain"),
         parse_double_strict(item.substr(colon + 1), "stage clip level")});
    pos = next + 1;
    if (next == text.size()) break;
  }
  return stages;
}

void run_harmonics(const harmonics_options& o) {
  if (o.periods < 1) throw validation_error("--periods must be >= 1");
  if (o.samples < 1) throw validation_error("--samples must be >= 1");
  const harmonic_result r = harmonic_cascade(
      parse_stage_list(o.stages_text), o.drive,
      static_cast<std::size_t>(o.periods), static_cast<std::size_t>(o.samples));
  write_csv(o.out_path, {"harmonic", "amplitude_v", "dbc"},
            {{1.0, r.fundamental_v, 0.0},
             {2.0, r.h2_v, r.h2_dbc},
             {3.0, r.h3_v, r.h3_dbc}});
}

struct backoff_options {
  std::optional<double> delta;
  std::optional<double> obo;
};

void run_backoff(const backoff_options& o) {
  if (o.delta)
    std::printf("%.4f dB\n", backoff_from_delta(size_ratio{*o.delta}));
  else
    std::printf("%.4f\n", delta_from_backoff(*o.obo).delta);
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{
      "Synthesis and verification toolkit for asymmetric power-combining "
      "networks and two-path amplifier behavior"};
  app.require_subcommand(1);

  auto analyze = std::make_shared<analyze_options>();
  auto* analyze_cmd = app.add_subcommand(
      "analyze", "Solve a netlist over a frequency sweep into a Touchstone file");
  analyze_cmd->add_option("netlist", analyze->netlist_path, "netlist file")
      ->required();
  analyze_cmd->add_option("--fstart", analyze->fstart, "sweep start, Hz")->required();
  analyze_cmd->add_option("--fstop", analyze->fstop, "sweep stop, Hz")->required();
  analyze_cmd->add_option("--points", analyze->points, "sweep points")->required();
  analyze_cmd->add_option("--out", analyze->out_path, "output .sNp path")->required();
  analyze_cmd
      ->add_option("--format", analyze->format, "data format: ri or ma")
      ->check(CLI::IsMember({"ri", "ma"}));
  analyze_cmd->callback([analyze] { run_analyze(*analyze); });

  auto match = std::make_shared<synth_match_options>();
  auto* match_cmd = app.add_subcommand(
      "synth-match",
      "Synthesize a two-section matching network with a phase constraint");
  match_cmd->add_option("--zsrc", match->zsrc_text, "source impedance re,im ohms")
      ->required();
  match_cmd->add_option("--zint", match->zint, "intermediate impedance, ohms")
      ->required();
  match_cmd->add_option("--ztgt", match->ztgt, "target impedance, ohms")->required();
  match_cmd->add_option("--f0", match->f0, "design frequency, Hz")->required();
  match_cmd->add_option("--band", match->band_text,
                        "evaluation band lo,hi in Hz (default f0 +/- 5%)");
  match_cmd->add_option("--phase", match->phase, "insertion phase lag target, deg");
  match_cmd->add_option("--seed", match->seed, "optimizer seed");
  match_cmd->add_flag("--conjugate", match->conjugate,
                      "match the conjugate of --zsrc");
  match_cmd->add_option("--out", match->out_path, "output JSON path")->required();
  match_cmd->callback([match] { run_synth_match(*match); });

  auto wilkinson = std::make_shared<synth_wilkinson_options>();
  auto* wilkinson_cmd = app.add_subcommand(
      "synth-wilkinson", "Design an equal or unequal split divider netlist");
  wilkinson_cmd->add_option("--z0", wilkinson->z0, "system impedance, ohms");
  wilkinson_cmd
      ->add_option("--ratio", wilkinson->ratio, "output power ratio P2/P3")
      ->required();
  wilkinson_cmd->add_option("--f0", wilkinson->f0, "design frequency, Hz")
      ->required();
  wilkinson_cmd
      ->add_option("--out-netlist", wilkinson->out_path, "output netlist path")
      ->required();
  wilkinson_cmd->add_flag("--lumped", wilkinson->lumped,
                          "realize lines as lumped pi equivalents");
  wilkinson_cmd->add_flag("--no-bridge", wilkinson->no_bridge,
                          "omit the isolation bridge resistor");
  wilkinson_cmd->callback([wilkinson] { run_synth_wilkinson(*wilkinson); });

  auto pi_opts = std::make_shared<pi_equiv_options>();
  auto* pi_cmd = app.add_subcommand(
      "pi-equiv", "Convert a line section to its lumped pi equivalent and back");
  pi_cmd->add_option("--z0", pi_opts->z0, "characteristic impedance, ohms")
      ->required();
  pi_cmd->add_option("--f0", pi_opts->f0, "design frequency, Hz")->required();
  auto* pi_mode = pi_cmd->add_option_group("mode");
  pi_mode->add_option("--theta", pi_opts->theta_deg, "electrical length, deg");
  pi_mode->add_option("--cap-ff", pi_opts->cap_ff,
                      "shunt capacitance, fF (solves for theta)");
  pi_mode->require_option(1);
  pi_cmd->callback([pi_opts] { run_pi_equiv(*pi_opts); });

  auto curves = std::make_shared<doherty_curves_options>();
  auto* curves_cmd = app.add_subcommand(
      "doherty-curves", "Evaluate a two-path chain config into a CSV sweep");
  curves_cmd->add_option("--config", curves->config_path, "chain config file")
      ->required();
  curves_cmd->add_option("--out", curves->out_path, "output CSV path")->required();
  curves_cmd->add_option("--aux-share", curves->aux_share,
                         "aux share threshold for the back-off metric");
  curves_cmd->callback([curves] { run_doherty_curves(*curves); });

  auto harm = std::make_shared<harmonics_options>();
  auto* harm_cmd = app.add_subcommand(
      "harmonics", "Harmonic content of a clipping stage cascade");
  harm_cmd
      ->add_option("--stages", harm->stages_text,
                   "comma list of gain:clip stage pairs")
      ->required();
  harm_cmd->add_option("--drive", harm->drive, "drive amplitude, volts")
      ->required();
  harm_cmd->add_option("--out", harm->out_path, "output CSV path")->required();
  harm_cmd->add_option("--periods", harm->periods, "analysis periods");
  harm_cmd->add_option("--samples", harm->samples, "samples per period");
  harm_cmd->callback([harm] { run_harmonics(*harm); });

  auto back = std::make_shared<backoff_options>();
  auto* back_cmd = app.add_subcommand(
      "backoff", "Size ratio to back-off conversion and its inverse");
  auto* back_mode = back_cmd->add_option_group("mode");
  back_mode->add_option("--delta", back->delta, "size ratio");
  back_mode->add_option("--obo", back->obo, "back-off, dB (solves for delta)");
  back_mode->require_option(1);
  back_cmd->callback([back] { run_backoff(*back); });

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.get_name() << ": " << e.what() << "\n";
    std::cerr << app.help();
    return 2;
  } catch (const parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace qadpa
