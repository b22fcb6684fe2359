#pragma once

#include <optional>
#include <vector>

#include "ddscope/coherence.hpp"
#include "ddscope/least_squares.hpp"

namespace ddscope {

// One point of a Ramsey phase scan.
struct FringePoint {
  double phase_deg;
  double population;
  double sigma;
};

struct FringeScan {
  double total_time;
  std::vector<FringePoint> points;
};

struct VisibilityPoint {
  double total_time;
  double visibility;
  double sigma;
};

// Per-N collection of fringe scans and/or fitted visibilities, with the
// normalization calibration (trap lifetime and reference atom number).
struct VisibilityDataset {
  int n_pulses = 0;
  std::vector<FringeScan> fringes;
  std::vector<VisibilityPoint> visibilities;
  double lifetime_tau = 0.0;  // seconds; 0 = not calibrated
  double n_cs0 = 0.0;         // atoms; 0 = not calibrated
};

// Generic (x, y, sigma) samples; empty sigma means unweighted.
struct DataSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> sigma;
};

// --- spectroscopy / population models -------------------------------------

// Fourier-limited square-pulse line shape
//   y = A (Omega_R/Omega)^2 sin^2(Omega tau / 2) + C,
//   Omega^2 = 4 pi^2 (dnu - dnu_res)^2 + Omega_R^2.
double mw_spectrum_model(double detuning_hz, double amplitude, double offset,
                         double detuning_res_hz, double omega_r, double tau);

// Fits {A, C, dnu_res} with Omega_R and tau fixed from independent
// measurements.  x = detuning (Hz).
FitResult fit_mw_spectrum(const DataSeries& data, double omega_r, double tau);

// Ramsey population y = A/2 [1 - cos(2 pi |dnu| T) exp(-(T/tau_c)^2)] + C.
double ramsey_population_model(double total_time, double amplitude, double offset,
                               double detuning_hz, double tau_c);

// Fits {A, C, dnu, tau_c}; x = sequence length (s).
FitResult fit_ramsey_population(const DataSeries& data,
                                std::optional<Eigen::Vector4d> init = std::nullopt);

// --- fringes ----------------------------------------------------------------

// P = a sin^2(pi (Phi - phase)/360 deg) + c, phases in degrees end to end.
double fringe_model(double phase_deg, double amplitude, double offset, double phi_deg);

struct FringeFitResult {
  FitResult fit;          // parameters a, c, phi_deg
  double visibility = 0.0;
  double sigma_v = 0.0;   // propagated from the (a, c) covariance block
  bool degenerate = false;
};

// Fits a sinusoidal fringe and returns V = a/(a + 2c).  Needs >= 5 points
// spanning >= 180 degrees.  A flat fringe yields V = 0 with the degenerate
// flag set instead of an error.
FringeFitResult fit_fringe(const std::vector<FringePoint>& points);

// Divides every population and sigma by N_Cs,0 exp(-T/tau_LT).
VisibilityDataset normalize_fringes(const VisibilityDataset& raw);

// Exponential decay y = N0 exp(-T/tau); x = sequence length (s).  A
// non-decaying input drives tau to its upper bound and clears `converged`.
FitResult fit_lifetime(const DataSeries& data);

// --- global visibility fit ---------------------------------------------------

struct GlobalVisibilityInit {
  double s0 = 0.0;     // 0 = automatic
  double alpha = 1.0;
};

struct GlobalVisibilityFit {
  FitResult fit;  // parameters: S0, alpha, then V0[N], b[N] per dataset
  double s0 = 0.0;
  double alpha = 0.0;
  std::vector<int> n_pulses;  // dataset order used for the per-dataset params
};

// Shared-(S0, alpha) fit of V(T) = V0_i exp(-chi_{N_i}(T)) + b_i across the
// datasets, with chi computed from the exact per-N filter function.  Every
// dataset needs >= 3 visibility points.
GlobalVisibilityFit global_visibility_fit(const std::vector<VisibilityDataset>& datasets,
                                          const GlobalVisibilityInit& init = {},
                                          double quad_rel_tol = 1e-6);

// --- PSD decomposition -------------------------------------------------------

// Fits S(omega) = S_PLN/omega^alpha + S_WN to a PSD estimate with
// log-residuals on log-spaced rebinned points.  Parameters: S_PLN,
// alpha_tilde, S_WN.
FitResult fit_psd_powerlaw_white(const std::vector<double>& omega,
                                 const std::vector<double>& psd);

// --- magnetic-field calibration ---------------------------------------------

// Same line shape as fit_mw_spectrum with detuning
// Delta = 2 pi (B - B_res) * 0.7 MHz/G; fields in milligauss.
double bfield_spectrum_model(double b_coil_mg, double amplitude, double offset,
                             double b_res_mg, double omega_r, double tau);

FitResult fit_bfield_spectrum(const DataSeries& data, double omega_r, double tau);

}  // namespace ddscope
