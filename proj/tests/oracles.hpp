// Test-only oracles, kept independent of the library's quadrature path.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "ddscope/pulse_sequence.hpp"

namespace oracle {

// For a power-law spectrum S = S0/w^alpha with alpha < 1, the coherence
// integral has an exact pairwise closed form.  Writing the filter numerator
// as F(u) = sum_m a_m e^{i u phi_m} with sum_m a_m = 0,
//
//   |F(u)|^2 = -2 sum_{m<l} a_m a_l [1 - cos(u (phi_m - phi_l))],
//
// so the shape integral I = int_0^inf u^-alpha |F(u)|^2/u^2 du reduces
// termwise to the tabulated integral
//
//   K(alpha) = int_0^inf (1 - cos v) v^(-2-alpha) dv
//            = -Gamma(-1-alpha) cos(pi (1+alpha)/2),
//
//   I = -2 K(alpha) sum_{m<l} a_m a_l |phi_m - phi_l|^(1+alpha).
//
// Each pair term converges only for alpha < 1, which covers the regime used
// throughout the tests.
inline double pairwise_k(double alpha) {
  return -std::tgamma(-1.0 - alpha) * std::cos(M_PI * (1.0 + alpha) / 2.0);
}

inline double pairwise_shape_integral(double alpha, const ddscope::PulseSequence& seq) {
  const double T = seq.total_time();
  const int n = seq.pulse_count();
  std::vector<double> phi{0.0, 1.0};
  std::vector<double> amp{1.0, (n % 2 == 0) ? -1.0 : 1.0};
  double sign = -1.0;
  for (double t : seq.pulse_times()) {
    phi.push_back(t / T);
    amp.push_back(2.0 * sign);
    sign = -sign;
  }
  double pair_sum = 0.0;
  for (std::size_t m = 0; m < phi.size(); ++m) {
    for (std::size_t l = m + 1; l < phi.size(); ++l) {
      pair_sum += amp[m] * amp[l] * std::pow(std::abs(phi[m] - phi[l]), 1.0 + alpha);
    }
  }
  return -2.0 * pairwise_k(alpha) * pair_sum;
}

inline double pairwise_chi(double s0, double alpha, const ddscope::PulseSequence& seq) {
  return s0 * std::pow(seq.total_time(), 1.0 + alpha) / (2.0 * M_PI) *
         pairwise_shape_integral(alpha, seq);
}

inline double pairwise_tau_c(double s0, double alpha, int n_pulses) {
  const auto seq = ddscope::make_cpmg(n_pulses, 1.0);
  const double shape = pairwise_shape_integral(alpha, seq);
  return std::pow(2.0 * M_PI / (s0 * shape), 1.0 / (1.0 + alpha));
}

// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Coherence times for S0 = 1288 s^(1-alpha), alpha = 0.89, evaluated from
// the pairwise closed form at 25-digit precision and frozen here.
struct TauCReference {
  int n;
  double tau_c;
};
inline constexpr TauCReference kTauCExact[] = {
    {0, 0.01760951885}, {1, 0.06735202691}, {2, 0.08773243527}, {4, 0.1190354127},
    {6, 0.1430412029},  {8, 0.1632018321},  {10, 0.1808918815},
};

inline constexpr double kZeta289 = 1.225389080351019;       // zeta(2.89)
inline constexpr double kTau1Reference = 0.0606425013729;       // tau_1(1288, 0.89)
inline constexpr double kTauCAnalytic10 = 0.1793397573;     // N^{alpha/(1+alpha)} tau_1, N = 10

}  // namespace oracle
