// ddscope command-line tool: pulse-sequence construction, filter-function and
// coherence curves, Monte-Carlo dephasing simulation, and the inverse-problem
// fits (fringes, lifetime, global visibility, PSD decomposition, B-field
// calibration).  One command per process; all commands are deterministic
// given their flags and seed.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "ddscope/coherence.hpp"
#include "ddscope/datasets.hpp"
#include "ddscope/errors.hpp"
#include "ddscope/filter_function.hpp"
#include "ddscope/fit_models.hpp"
#include "ddscope/monte_carlo.hpp"
#include "ddscope/noise_spectrum.hpp"
#include "ddscope/noise_synthesis.hpp"
#include "ddscope/pulse_sequence.hpp"
#include "ddscope/rng.hpp"
#include "ddscope/welch.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumerical = 4;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class OutputFile {
 public:
  explicit OutputFile(const std::string& path) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

// "cpmg:N", "uhrig:N", "ramsey", or "file:PATH"; T_s is ignored for file:
ddscope::PulseSequence make_sequence(const std::string& spec, double total_time) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = (colon == std::string::npos) ? "" : spec.substr(colon + 1);
  if (kind == "ramsey") return ddscope::make_ramsey(total_time);
  if (kind == "file") return ddscope::load_sequence_file(arg);
  int n = 0;
  try {
    n = std::stoi(arg);
  } catch (const std::exception&) {
    throw std::invalid_argument("sequence spec '" + spec + "': bad pulse count");
  }
  if (kind == "cpmg") return ddscope::make_cpmg(n, total_time);
  if (kind == "uhrig") return ddscope::make_uhrig(n, total_time);
  throw std::invalid_argument("unknown sequence kind '" + kind +
                              "' (expected cpmg:N, uhrig:N, ramsey, or file:PATH)");
}

std::vector<double> linear_grid(double lo, double hi, int steps) {
  if (steps < 1 || !(hi >= lo)) throw std::invalid_argument("bad T grid");
  std::vector<double> g(static_cast<std::size_t>(steps));
  if (steps == 1) {
    g[0] = lo;
    return g;
  }
  for (int i = 0; i < steps; ++i) {
    g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (steps - 1);
  }
  return g;
}

json fit_to_json(const ddscope::FitResult& fit) {
  json j;
  json params = json::object();
  json sigmas = json::object();
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    params[fit.names[i]] = fit.params[static_cast<Eigen::Index>(i)];
    sigmas[fit.names[i]] = fit.sigma(fit.names[i]);
  }
  j["params"] = params;
  j["sigma"] = sigmas;
  j["residual_norm"] = fit.residual_norm;
  j["n_iterations"] = fit.n_iterations;
  j["converged"] = fit.converged;
  return j;
}

void write_json(const json& j, const std::string& path) {
  OutputFile out(path);
  out.stream() << j.dump(2) << "\n";
}

// --- subcommand implementations ---------------------------------------------

struct SequenceArgs {
  std::string family = "cpmg";
  int n = 1;
  double total_time = 1.0;
  std::string out = "-";
};

int cmd_sequence(const SequenceArgs& args) {
  ddscope::PulseSequence seq = args.family == "cpmg"   ? ddscope::make_cpmg(args.n, args.total_time)
                               : args.family == "uhrig" ? ddscope::make_uhrig(args.n, args.total_time)
                                                        : ddscope::make_ramsey(args.total_time);
  OutputFile out(args.out);
  ddscope::save_sequence_file(seq, out.stream());
  return 0;
}

struct FilterArgs {
  std::string sequence = "cpmg:1";
  double total_time = 1.0;
  double omega_min = 0.0;
  double omega_max = 0.0;
  int steps = 500;
  std::string variant = "all";
  int k_max = -1;
  std::string out = "-";
};

int cmd_filter(const FilterArgs& args) {
  const ddscope::PulseSequence seq = make_sequence(args.sequence, args.total_time);
  const double T = seq.total_time();
  const bool cpmg = seq.family() == ddscope::SequenceFamily::Cpmg && seq.pulse_count() >= 1;
  std::vector<std::string> variants;
  if (args.variant == "all") {
    variants = {"exact"};
    if (cpmg) {
      variants.push_back("closed");
      variants.push_back("sinc");
    }
  } else {
    variants = {args.variant};
  }
  const int k_max = args.k_max >= 0 ? args.k_max : ddscope::sinc_default_k_max();
  OutputFile out(args.out);
  out.stream() << "omega_rad_per_s,g,variant\n";
  for (const auto& variant : variants) {
    if (variant != "exact" && !cpmg) {
      throw std::invalid_argument("variant '" + variant + "' needs a CPMG sequence");
    }
    for (double omega : linear_grid(args.omega_min, args.omega_max, args.steps)) {
      double g = 0.0;
      if (variant == "exact") {
        g = ddscope::filter_exact(seq, omega);
      } else if (variant == "closed") {
        g = ddscope::filter_cpmg_closed(seq.pulse_count(), omega * T);
      } else if (variant == "sinc") {
        g = ddscope::filter_cpmg_sinc(seq.pulse_count(), omega * T, k_max);
      } else {
        throw std::invalid_argument("unknown filter variant '" + variant + "'");
      }
      out.stream() << fmt(omega) << "," << fmt(g) << "," << variant << "\n";
    }
  }
  return 0;
}

struct CoherenceArgs {
  std::string spectrum;
  std::string sequence = "cpmg:1";
  double t_min = 1e-3;
  double t_max = 1.0;
  int t_steps = 50;
  double omega_min = 0.0;
  std::string out = "-";
};

int cmd_coherence(const CoherenceArgs& args) {
  const ddscope::NoiseSpectrum spectrum = ddscope::parse_spectrum(args.spectrum);
  ddscope::ChiOptions options;
  options.omega_min = args.omega_min;
  OutputFile out(args.out);
  out.stream() << "T_s,chi,visibility\n";
  for (double T : linear_grid(args.t_min, args.t_max, args.t_steps)) {
    const auto seq = make_sequence(args.sequence, T);
    const auto r = ddscope::chi_numeric(spectrum, seq, options);
    out.stream() << fmt(T) << "," << fmt(r.chi) << "," << fmt(r.visibility) << "\n";
  }
  return 0;
}

struct SimulateArgs {
  std::string spectrum;
  std::string sequence = "cpmg:1";
  double t_min = 1e-3;
  double t_max = 1.0;
  int t_steps = 10;
  std::size_t n_traj = 1000;
  std::uint64_t seed = 12345;
  std::string out = "-";
};

int cmd_simulate(const SimulateArgs& args) {
  const ddscope::NoiseSpectrum spectrum = ddscope::parse_spectrum(args.spectrum);
  OutputFile out(args.out);
  out.stream() << "T_s,V_mc,stderr,V_analytic\n";
  std::uint64_t stream = 0;
  for (double T : linear_grid(args.t_min, args.t_max, args.t_steps)) {
    const auto seq = make_sequence(args.sequence, T);
    const auto mc = ddscope::mc_visibility(spectrum, seq, args.n_traj,
                                           ddscope::derive_stream_seed(args.seed, stream++));
    const auto chi = ddscope::chi_numeric(spectrum, seq);
    out.stream() << fmt(T) << "," << fmt(mc.visibility_mean) << "," << fmt(mc.std_error)
                 << "," << fmt(chi.visibility) << "\n";
  }
  return 0;
}

struct FringeArgs {
  std::string in;
  bool normalize = false;
  double n_cs0 = 0.0;
  double tau_lt = 0.0;
  std::string out = "-";
};

int cmd_fit_fringe(const FringeArgs& args) {
  auto grouped = ddscope::group_fringes(ddscope::load_fringes_csv(args.in));
  json results = json::array();
  for (auto& [n, ds] : grouped) {
    ddscope::VisibilityDataset dataset = ds;
    if (args.normalize) {
      dataset.n_cs0 = args.n_cs0;
      dataset.lifetime_tau = args.tau_lt;
      dataset = ddscope::normalize_fringes(dataset);
    }
    for (const auto& scan : dataset.fringes) {
      const auto fit = ddscope::fit_fringe(scan.points);
      json entry;
      entry["n_pulses"] = n;
      entry["T_s"] = scan.total_time;
      entry["a"] = fit.fit.params[0];
      entry["c"] = fit.fit.params[1];
      entry["phi_deg"] = fit.fit.params[2];
      entry["V"] = fit.visibility;
      entry["V_err"] = fit.sigma_v;
      entry["degenerate"] = fit.degenerate;
      entry["converged"] = fit.fit.converged;
      results.push_back(entry);
    }
  }
  write_json(results, args.out);
  return 0;
}

struct LifetimeArgs {
  std::string in;
  std::string out = "-";
};

int cmd_fit_lifetime(const LifetimeArgs& args) {
  const auto fit = ddscope::fit_lifetime(ddscope::load_lifetime_csv(args.in));
  write_json(fit_to_json(fit), args.out);
  return fit.converged ? 0 : kExitNumerical;
}

struct FitVisibilityArgs {
  std::string fringes;
  std::string lifetime_csv;
  double n_cs0 = 0.0;
  double tau_lt = 0.0;
  bool no_normalize = false;
  double s0_init = 0.0;
  double alpha_init = 1.0;
  std::string out = "-";
};

int cmd_fit_visibility(const FitVisibilityArgs& args) {
  auto grouped = ddscope::group_fringes(ddscope::load_fringes_csv(args.fringes));
  double tau_lt = args.tau_lt;
  if (!args.lifetime_csv.empty()) {
    const auto lt = ddscope::fit_lifetime(ddscope::load_lifetime_csv(args.lifetime_csv));
    if (!lt.converged) throw ddscope::bracket_error("lifetime fit did not converge");
    tau_lt = lt.param("tau_lt_s");
  }
  std::vector<ddscope::VisibilityDataset> datasets;
  for (auto& [n, ds] : grouped) {
    ddscope::VisibilityDataset dataset = ds;
    if (!args.no_normalize) {
      dataset.n_cs0 = args.n_cs0;
      dataset.lifetime_tau = tau_lt;
      dataset = ddscope::normalize_fringes(dataset);
    }
    for (const auto& scan : dataset.fringes) {
      const auto fit = ddscope::fit_fringe(scan.points);
      dataset.visibilities.push_back(
          {scan.total_time, fit.visibility, fit.sigma_v > 0.0 ? fit.sigma_v : 1e-3});
    }
    datasets.push_back(std::move(dataset));
  }

  ddscope::GlobalVisibilityInit init;
  init.s0 = args.s0_init;
  init.alpha = args.alpha_init;
  const auto global = ddscope::global_visibility_fit(datasets, init);

  json j = fit_to_json(global.fit);
  json per_n = json::array();
  const ddscope::NoiseSpectrum fitted(ddscope::PowerLaw{global.s0, global.alpha});
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    json entry;
    const int n = global.n_pulses[i];
    entry["n_pulses"] = n;
    entry["V0"] = global.fit.params[2 + 2 * static_cast<Eigen::Index>(i)];
    entry["b"] = global.fit.params[3 + 2 * static_cast<Eigen::Index>(i)];
    try {
      entry["tau_c_s"] = ddscope::tau_c_numeric(fitted, n, {1e-5, 20.0});
    } catch (const ddscope::bracket_error&) {
      entry["tau_c_s"] = nullptr;
    }
    per_n.push_back(entry);
  }
  j["datasets"] = per_n;
  write_json(j, args.out);
  return global.fit.converged ? 0 : kExitNumerical;
}

struct PsdArgs {
  std::string in;
  std::size_t segment = 4096;
  double overlap = 0.5;
  std::string window = "hann";
  std::string out = "-";
};

int cmd_psd(const PsdArgs& args) {
  const auto ts = ddscope::load_timeseries_csv(args.in);
  const auto window = args.window == "rect" ? ddscope::PsdWindow::Rect : ddscope::PsdWindow::Hann;
  const auto psd = ddscope::welch_psd(ts, args.segment, args.overlap, window);
  OutputFile out(args.out);
  out.stream() << "omega_rad_per_s,psd\n";
  for (std::size_t k = 0; k < psd.omega.size(); ++k) {
    out.stream() << fmt(psd.omega[k]) << "," << fmt(psd.value[k]) << "\n";
  }
  return 0;
}

struct FitPsdArgs {
  std::string in;
  std::string timeseries;
  std::size_t segment = 4096;
  double overlap = 0.5;
  std::size_t skip_bins = 4;
  std::string out = "-";
};

int cmd_fit_psd(const FitPsdArgs& args) {
  std::vector<double> omega, value;
  if (!args.timeseries.empty()) {
    const auto ts = ddscope::load_timeseries_csv(args.timeseries);
    const auto psd = ddscope::welch_psd(ts, args.segment, args.overlap, ddscope::PsdWindow::Hann);
    // lowest bins carry window leakage of steep spectra
    const std::size_t skip = std::min(args.skip_bins + 1, psd.omega.size());
    omega.assign(psd.omega.begin() + static_cast<std::ptrdiff_t>(skip), psd.omega.end());
    value.assign(psd.value.begin() + static_cast<std::ptrdiff_t>(skip), psd.value.end());
  } else {
    std::ifstream in(args.in);
    if (!in) throw ddscope::parse_error("cannot open '" + args.in + "'", 0, 0);
    std::string line;
    if (!std::getline(in, line) || line != "omega_rad_per_s,psd") {
      throw ddscope::parse_error("expected header 'omega_rad_per_s,psd'", 1, 1);
    }
    std::size_t row = 1;
    while (std::getline(in, line)) {
      ++row;
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) {
        throw ddscope::parse_error("expected two columns", row, 1);
      }
      try {
        omega.push_back(std::stod(line.substr(0, comma)));
        value.push_back(std::stod(line.substr(comma + 1)));
      } catch (const std::exception&) {
        throw ddscope::parse_error("non-numeric cell", row, 1);
      }
    }
  }
  const auto fit = ddscope::fit_psd_powerlaw_white(omega, value);
  write_json(fit_to_json(fit), args.out);
  return fit.converged ? 0 : kExitNumerical;
}

struct CalibrateBArgs {
  std::string in;
  double omega_r = 0.0;
  double tau = 0.0;
  std::string out = "-";
};

int cmd_calibrate_b(const CalibrateBArgs& args) {
  std::ifstream in(args.in);
  if (!in) throw ddscope::parse_error("cannot open '" + args.in + "'", 0, 0);
  std::string line;
  if (!std::getline(in, line) || line != "B_coil_mG,atoms,atoms_err") {
    throw ddscope::parse_error("expected header 'B_coil_mG,atoms,atoms_err'", 1, 1);
  }
  ddscope::DataSeries data;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c)) {
      throw ddscope::parse_error("expected three columns", row, 1);
    }
    try {
      data.x.push_back(std::stod(a));
      data.y.push_back(std::stod(b));
      data.sigma.push_back(std::stod(c));
    } catch (const std::exception&) {
      throw ddscope::parse_error("non-numeric cell", row, 1);
    }
    if (!(data.sigma.back() > 0.0)) {
      throw ddscope::parse_error("atoms_err must be > 0", row, 3);
    }
  }
  const auto fit = ddscope::fit_bfield_spectrum(data, args.omega_r, args.tau);
  write_json(fit_to_json(fit), args.out);
  return fit.converged ? 0 : kExitNumerical;
}

struct ReproduceArgs {
  std::string outdir = "reproduce_out";
  std::uint64_t seed = 12345;
  std::size_t n_traj = 2000;
};

// Desk-scale pipeline: synthesize per-N visibility data from the power-law
// coherence model, run the shared-(S0, alpha) fit, extract coherence times,
// and emit filter curves plus a Monte-Carlo cross-check.
int cmd_reproduce(const ReproduceArgs& args) {
  namespace fs = std::filesystem;
  fs::create_directories(args.outdir);
  const auto path = [&](const char* name) { return (fs::path(args.outdir) / name).string(); };

  const double s0_true = 1288.0;
  const double alpha_true = 0.89;
  const std::vector<int> n_list = {0, 1, 2, 4, 6, 8, 10};
  const ddscope::NoiseSpectrum truth(ddscope::PowerLaw{s0_true, alpha_true});

  ddscope::PowerLawChiModel chi_model(1e-7);
  std::mt19937_64 rng(ddscope::splitmix64(args.seed));
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sigma_v = 0.03;

  std::vector<ddscope::VisibilityDataset> datasets;
  {
    std::ofstream data_csv(path("visibility_data.csv"));
    data_csv << "n_pulses,T_s,V,V_err\n";
    for (std::size_t i = 0; i < n_list.size(); ++i) {
      const int n = n_list[i];
      const double v0 = 0.92 + 0.01 * static_cast<double>(i);
      const double b = 0.02 + 0.005 * static_cast<double>(i);
      const double tau_c = ddscope::tau_c_numeric(truth, n, {1e-5, 5.0});
      ddscope::VisibilityDataset ds;
      ds.n_pulses = n;
      for (double frac = 0.25; frac <= 2.0 + 1e-9; frac += 0.175) {
        const double T = frac * tau_c;
        const double chi = chi_model.chi(s0_true, alpha_true, n, T);
        const double v = v0 * std::exp(-chi) + b + sigma_v * gauss(rng);
        ds.visibilities.push_back({T, v, sigma_v});
        data_csv << n << "," << fmt(T) << "," << fmt(v) << "," << fmt(sigma_v) << "\n";
      }
      datasets.push_back(std::move(ds));
    }
  }

  std::cerr << "reproduce: global visibility fit over " << datasets.size() << " datasets\n";
  const auto global = ddscope::global_visibility_fit(datasets);
  write_json(fit_to_json(global.fit), path("global_fit.json"));

  const ddscope::NoiseSpectrum fitted(ddscope::PowerLaw{global.s0, global.alpha});
  {
    std::ofstream tau_csv(path("tau_c.csv"));
    tau_csv << "n_pulses,tau_c_s,tau_c_analytic_s\n";
    for (int n : n_list) {
      const double tc = ddscope::tau_c_numeric(fitted, n, {1e-5, 20.0});
      if (n >= 1) {
        tau_csv << n << "," << fmt(tc) << ","
                << fmt(ddscope::tau_c_analytic(global.s0, global.alpha, n)) << "\n";
      } else {
        tau_csv << n << "," << fmt(tc) << ",\n";
      }
    }
  }

  {
    std::ofstream filt_csv(path("filter_functions.csv"));
    filt_csv << "n_pulses,omega_rad_per_s,g\n";
    const double T = 0.05;
    for (int n : {1, 2, 6, 10}) {
      const auto seq = ddscope::make_cpmg(n, T);
      for (double f_hz = 5.0; f_hz <= 2000.0 + 1e-9; f_hz += 5.0) {
        const double omega = 2.0 * M_PI * f_hz;
        filt_csv << n << "," << fmt(omega) << "," << fmt(ddscope::filter_exact(seq, omega))
                 << "\n";
      }
    }
  }

  {
    std::ofstream mc_csv(path("mc_check.csv"));
    mc_csv << "n_pulses,T_s,V_mc,stderr,V_quadrature\n";
    std::uint64_t stream = 0;
    for (int n : {1, 4, 10}) {
      const double tau_c = ddscope::tau_c_numeric(truth, n, {1e-5, 5.0});
      for (double frac : {0.5, 1.0, 1.5}) {
        const double T = frac * tau_c;
        const auto seq = ddscope::make_cpmg(n, T);
        std::cerr << "reproduce: MC N=" << n << " T=" << T << "\n";
        const auto mc = ddscope::mc_visibility(truth, seq, args.n_traj,
                                               ddscope::derive_stream_seed(args.seed, ++stream));
        const auto chi = ddscope::chi_numeric(truth, seq);
        mc_csv << n << "," << fmt(T) << "," << fmt(mc.visibility_mean) << ","
               << fmt(mc.std_error) << "," << fmt(chi.visibility) << "\n";
      }
    }
  }

  std::cerr << "reproduce: S0 = " << global.s0 << ", alpha = " << global.alpha << "\n";
  return global.fit.converged ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Qubit dephasing under dynamical decoupling: filter functions, coherence "
               "integrals, colored-noise Monte Carlo, and noise-spectrum estimation"};
  app.require_subcommand(1);
  app.set_config("--config");

  SequenceArgs seq_args;
  auto* seq_cmd = app.add_subcommand("sequence", "Emit pulse times of a named sequence");
  seq_cmd->add_option("--family", seq_args.family, "Sequence family")
      ->check(CLI::IsMember({"cpmg", "uhrig", "ramsey"}));
  seq_cmd->add_option("--n", seq_args.n, "Number of pi-pulses")->check(CLI::NonNegativeNumber);
  seq_cmd->add_option("--T_s", seq_args.total_time, "Total sequence length (s)")
      ->check(CLI::PositiveNumber);
  seq_cmd->add_option("--out", seq_args.out, "Output path ('-' = stdout)");

  FilterArgs filter_args;
  auto* filter_cmd = app.add_subcommand("filter", "Evaluate filter functions on a frequency grid");
  filter_cmd->add_option("--sequence", filter_args.sequence, "cpmg:N | uhrig:N | ramsey | file:PATH");
  filter_cmd->add_option("--T_s", filter_args.total_time, "Sequence length (s)")
      ->check(CLI::PositiveNumber);
  filter_cmd->add_option("--omega-min_rad_per_s", filter_args.omega_min)->check(CLI::NonNegativeNumber);
  filter_cmd->add_option("--omega-max_rad_per_s", filter_args.omega_max)->required();
  filter_cmd->add_option("--steps", filter_args.steps)->check(CLI::PositiveNumber);
  filter_cmd->add_option("--variant", filter_args.variant)
      ->check(CLI::IsMember({"exact", "closed", "sinc", "all"}));
  filter_cmd->add_option("--kmax", filter_args.k_max, "sinc series terms (-1 = auto)");
  filter_cmd->add_option("--out", filter_args.out);

  CoherenceArgs coh_args;
  auto* coh_cmd = app.add_subcommand("coherence", "chi(T) and visibility over a T grid");
  coh_cmd->add_option("--spectrum", coh_args.spectrum, "e.g. powerlaw:1288,0.89")->required();
  coh_cmd->add_option("--sequence", coh_args.sequence);
  coh_cmd->add_option("--tmin_s", coh_args.t_min)->check(CLI::PositiveNumber);
  coh_cmd->add_option("--tmax_s", coh_args.t_max)->check(CLI::PositiveNumber);
  coh_cmd->add_option("--tsteps", coh_args.t_steps)->check(CLI::PositiveNumber);
  coh_cmd->add_option("--omega-min_rad_per_s", coh_args.omega_min,
                      "Explicit infrared cutoff (0 = none)")
      ->check(CLI::NonNegativeNumber);
  coh_cmd->add_option("--out", coh_args.out);

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo visibility vs quadrature");
  sim_cmd->add_option("--spectrum", sim_args.spectrum)->required();
  sim_cmd->add_option("--sequence", sim_args.sequence);
  sim_cmd->add_option("--tmin_s", sim_args.t_min)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--tmax_s", sim_args.t_max)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--tsteps", sim_args.t_steps)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--ntraj", sim_args.n_traj)->check(CLI::Range(std::size_t{100}, std::size_t{10000000}));
  sim_cmd->add_option("--seed", sim_args.seed);
  sim_cmd->add_option("--out", sim_args.out);

  FringeArgs fringe_args;
  auto* fringe_cmd = app.add_subcommand("fit-fringe", "Fit sinusoidal fringes per (N, T)");
  fringe_cmd->add_option("--in", fringe_args.in, "fringes.csv")->required();
  fringe_cmd->add_flag("--normalize", fringe_args.normalize, "Divide by N_Cs,0 exp(-T/tau_LT)");
  fringe_cmd->add_option("--ncs0", fringe_args.n_cs0);
  fringe_cmd->add_option("--tau-lt_s", fringe_args.tau_lt);
  fringe_cmd->add_option("--out", fringe_args.out);

  LifetimeArgs lt_args;
  auto* lt_cmd = app.add_subcommand("fit-lifetime", "Fit N0 exp(-T/tau_LT)");
  lt_cmd->add_option("--in", lt_args.in, "lifetime.csv")->required();
  lt_cmd->add_option("--out", lt_args.out);

  FitVisibilityArgs vis_args;
  auto* vis_cmd = app.add_subcommand(
      "fit-visibility", "Full pipeline: fringes -> visibilities -> global (S0, alpha) fit");
  vis_cmd->add_option("--fringes", vis_args.fringes, "fringes.csv")->required();
  vis_cmd->add_option("--lifetime", vis_args.lifetime_csv, "lifetime.csv (fits tau_LT)");
  vis_cmd->add_option("--ncs0", vis_args.n_cs0);
  vis_cmd->add_option("--tau-lt_s", vis_args.tau_lt);
  vis_cmd->add_flag("--no-normalize", vis_args.no_normalize);
  vis_cmd->add_option("--s0-init", vis_args.s0_init);
  vis_cmd->add_option("--alpha-init", vis_args.alpha_init);
  vis_cmd->add_option("--out", vis_args.out);

  PsdArgs psd_args;
  auto* psd_cmd = app.add_subcommand("psd", "Welch PSD of a time series");
  psd_cmd->add_option("--in", psd_args.in, "timeseries.csv")->required();
  psd_cmd->add_option("--segment", psd_args.segment, "Segment length (power of two)");
  psd_cmd->add_option("--overlap", psd_args.overlap)->check(CLI::Range(0.0, 0.999));
  psd_cmd->add_option("--window", psd_args.window)->check(CLI::IsMember({"hann", "rect"}));
  psd_cmd->add_option("--out", psd_args.out);

  FitPsdArgs fpsd_args;
  auto* fpsd_cmd = app.add_subcommand("fit-psd", "Fit S_PLN/omega^alpha + S_WN to a PSD");
  fpsd_cmd->add_option("--in", fpsd_args.in, "CSV omega_rad_per_s,psd");
  fpsd_cmd->add_option("--timeseries", fpsd_args.timeseries, "timeseries.csv (Welch first)");
  fpsd_cmd->add_option("--segment", fpsd_args.segment);
  fpsd_cmd->add_option("--overlap", fpsd_args.overlap)->check(CLI::Range(0.0, 0.999));
  fpsd_cmd->add_option("--skip-bins", fpsd_args.skip_bins,
                       "Lowest Welch bins dropped before the fit (leakage guard)");
  fpsd_cmd->add_option("--out", fpsd_args.out);

  CalibrateBArgs cb_args;
  auto* cb_cmd = app.add_subcommand("calibrate-b", "Magnetic-field resonance from a coil scan");
  cb_cmd->add_option("--in", cb_args.in, "CSV B_coil_mG,atoms,atoms_err")->required();
  cb_cmd->add_option("--omega-r_rad_per_s", cb_args.omega_r, "Rabi frequency (rad/s)")->required();
  cb_cmd->add_option("--tau_s", cb_args.tau, "Pulse duration (s)")->required();
  cb_cmd->add_option("--out", cb_args.out);

  ReproduceArgs rep_args;
  auto* rep_cmd = app.add_subcommand(
      "reproduce", "Synthetic end-to-end run: data generation, global fit, tau_c table, MC check");
  rep_cmd->add_option("--outdir", rep_args.outdir);
  rep_cmd->add_option("--seed", rep_args.seed);
  rep_cmd->add_option("--ntraj", rep_args.n_traj)->check(CLI::Range(std::size_t{100}, std::size_t{1000000}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*seq_cmd) return cmd_sequence(seq_args);
    if (*filter_cmd) return cmd_filter(filter_args);
    if (*coh_cmd) return cmd_coherence(coh_args);
    if (*sim_cmd) return cmd_simulate(sim_args);
    if (*fringe_cmd) return cmd_fit_fringe(fringe_args);
    if (*lt_cmd) return cmd_fit_lifetime(lt_args);
    if (*vis_cmd) return cmd_fit_visibility(vis_args);
    if (*psd_cmd) return cmd_psd(psd_args);
    if (*fpsd_cmd) return cmd_fit_psd(fpsd_args);
    if (*cb_cmd) return cmd_calibrate_b(cb_args);
    if (*rep_cmd) return cmd_reproduce(rep_args);
  } catch (const ddscope::bracket_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ddscope::degenerate_fit_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ddscope::parse_error& e) {
    std::cerr << "data validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "data validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "data validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
