#pragma once

#include <vector>

#include "ddscope/pulse_sequence.hpp"

namespace ddscope {

enum class FilterVariant { ExactSum, ClosedForm, SincApprox };

std::string to_string(FilterVariant variant);

// Evaluates the dimensionless filter g(u), u = omega*T, of a fixed pulse
// sequence.  The filter is the squared modulus
//
//   g_N(u) = |1 + (-1)^{1+N} e^{iu} + 2 sum_j (-1)^j e^{iu t_j/T}|^2 / u^2,
//
// evaluated through one of three routes:
//  - a cancellation-safe term-by-term sum (any sequence),
//  - the geometric-series closed form (CPMG only, O(1) per call), with
//    removable singularities at u = (2k+1) N pi handled by offset
//    evaluation plus Richardson extrapolation,
//  - a shared Taylor series below u < 5e-2 where both direct routes lose
//    precision to cancellation.
class FilterEvaluator {
 public:
  enum class Mode { Auto, ExactSum };

  explicit FilterEvaluator(const PulseSequence& seq, Mode mode = Mode::Auto);

  // g(u) for u >= 0.
  double operator()(double u) const;

  int pulse_count() const { return n_; }
  bool uses_closed_form() const { return closed_; }

 private:
  double eval_series(double u) const;
  double eval_direct(double u) const;
  double eval_closed_raw(double u) const;
  double eval_closed(double u) const;

  std::vector<double> phases_;  // normalized pulse fractions incl. endpoints 0, 1
  std::vector<double> amps_;    // matching amplitudes; sum is exactly zero
  std::vector<long double> phases_ld_;  // refinement path; analytic for CPMG
  double moments_[10];          // M_k = sum_m amp_m * phase_m^k, k = 0..9
  int n_ = 0;
  bool closed_ = false;
};

// Exact-sum filter of an arbitrary sequence at angular frequency omega.
double filter_exact(const PulseSequence& seq, double omega);

// Geometric-series closed form of the N-CPMG filter as a function of
// u = omega*T.  Requires N >= 1.
double filter_cpmg_closed(int n_pulses, double u);

// Truncated sinc-series approximation
//   g_N(u) ~= sum_{k=0}^{k_max} 4/((2k+1)pi)^2 sinc^2((u - (2k+1) N pi)/2).
// The omitted tail is bounded by 4/((2k_max+3) pi)^2.
double filter_cpmg_sinc(int n_pulses, double u, int k_max);

// Smallest k_max whose tail bound drops below 1e-6.
int sinc_default_k_max();

// Filter peak positions omega_k = (2k+1) N pi / T for k = 0..k_max.
std::vector<double> peak_frequencies(int n_pulses, double total_time, int k_max);

}  // namespace ddscope
