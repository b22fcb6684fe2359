#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "ddscope/filter_function.hpp"
#include "ddscope/noise_spectrum.hpp"
#include "ddscope/pulse_sequence.hpp"

namespace ddscope {

struct CoherenceResult {
  double chi = 0.0;
  double visibility = 1.0;  // exp(-chi)
  double quadrature_error_estimate = 0.0;
};

struct ChiOptions {
  // Target relative accuracy of chi; the returned error estimate is held
  // below max(rel_tol * chi, abs_tol).
  double rel_tol = 1e-7;
  double abs_tol = 1e-14;
  // Explicit infrared cutoff (rad/s).  0 keeps the improper integral from
  // omega = 0; a positive value integrates from omega_min instead, which is
  // what a finite-length noise record effectively does.
  double omega_min = 0.0;
};

// Coherence integral chi(T) = T^2/(2 pi) int_0^inf S(w) g(w, T) dw by
// adaptive quadrature in u = w T: a tanh-sinh panel absorbs the soft
// singularity at u -> 0, Gauss-Kronrod panels aligned with the filter peaks
// cover the oscillatory middle, and the high-frequency tail beyond the last
// panel is added analytically from the oscillation-averaged envelope
// <g> = (2 + 4N)/u^2 with a conservative share charged to the error estimate.
CoherenceResult chi_numeric(const NoiseSpectrum& spectrum, const PulseSequence& seq,
                            const ChiOptions& options = {});

// Large-N closed form chi_N(T) = (T / tau_c)^(1+alpha).
double chi_analytic_cpmg(double s0, double alpha, int n_pulses, double T);

// tau_1 = {4 S0 pi^(-2-alpha) [1 - 2^(-2-alpha)] zeta(2+alpha)}^(-1/(1+alpha))
double tau1_analytic(double s0, double alpha);

// tau_c = N^(alpha/(1+alpha)) tau_1
double tau_c_analytic(double s0, double alpha, int n_pulses);

// Root of chi(T) = 1 inside [t_lo, t_hi] by bisection/secant; requires the
// bracket to straddle the root (throws bracket_error otherwise).
double solve_chi_equals_one(const std::function<double(double)>& chi_of_total_time,
                            double t_lo, double t_hi, double rel_tol = 1e-6);

// Coherence time exp(-chi_N(tau_c)) = 1/e for an N-CPMG sequence over the
// given spectrum.
double tau_c_numeric(const NoiseSpectrum& spectrum, int n_pulses,
                     std::pair<double, double> t_bracket, const ChiOptions& options = {});

// Visibility-dip times T_k = (2k+1) N pi / omega0, k = 0..k_max, where the
// filter peak sweeps through a spectral resonance at omega0.
std::vector<double> dip_times(double omega0, int n_pulses, int k_max);

// Power-law fast path: for S = S0/w^alpha the coherence integral factorizes,
//   chi(T) = S0 T^(1+alpha) I(alpha) / (2 pi),
//   I(alpha) = int_0^inf u^-alpha g(u) du,
// so a T-grid or a shared-(S0, alpha) fit needs one shape integral per
// (sequence, alpha).  This class memoizes I over exact (N, alpha) keys.
class PowerLawChiModel {
 public:
  explicit PowerLawChiModel(double quad_rel_tol = 1e-6);

  double chi(double s0, double alpha, int n_pulses, double T);
  double shape_integral(double alpha, int n_pulses);

 private:
  double quad_rel_tol_;
  std::map<std::pair<int, std::uint64_t>, double> cache_;
};

}  // namespace ddscope
