#pragma once

#include <string>
#include <variant>
#include <vector>

namespace ddscope {

class NoiseSpectrum;

// S(omega) = s0 / |omega|^alpha
struct PowerLaw {
  double s0;
  double alpha;
};

// S(omega) = s_pln / omega^alpha_tilde + s_wn
struct PowerLawPlusWhite {
  double s_pln;
  double alpha_tilde;
  double s_wn;
};

// S(omega) = s1 exp(-(omega - omega0)^2 / (2 delta_omega^2))
struct GaussianResonance {
  double s1;
  double omega0;
  double delta_omega;
};

// Samples on an ascending omega grid, interpolated linearly in log-log and
// extrapolated with the boundary power laws.
struct Tabulated {
  std::vector<double> omega;
  std::vector<double> value;
};

struct SpectrumSum {
  std::vector<NoiseSpectrum> components;
};

// Two-sided spectral density S(omega) of the dephasing noise, evaluated at
// omega > 0.  The two-sided convention matches the coherence integral
// chi = T^2/(2 pi) int_0^inf S(w) g(w,T) dw and the time-domain identity
// Var(beta) = (1/2pi) int_-inf^inf S(w) dw.
class NoiseSpectrum {
 public:
  using Node = std::variant<PowerLaw, PowerLawPlusWhite, GaussianResonance,
                            Tabulated, SpectrumSum>;

  NoiseSpectrum(PowerLaw p);                // NOLINT(google-explicit-constructor)
  NoiseSpectrum(PowerLawPlusWhite p);       // NOLINT
  NoiseSpectrum(GaussianResonance p);       // NOLINT
  NoiseSpectrum(Tabulated p);               // NOLINT
  NoiseSpectrum(SpectrumSum p);             // NOLINT

  double operator()(double omega) const;

  // Power-counting exponent p with S ~ omega^p as omega -> 0; used for the
  // per-sequence integrability checks of the coherence integral.
  double infrared_exponent() const;

  // int_{omega_s}^inf S(omega) / omega^2 domega; analytic per variant except
  // the Gaussian resonance, which is integrated numerically over its support.
  double tail_integral_over_omega2(double omega_s) const;

  // Frequencies around which the spectrum has sharp structure (resonance
  // centers and widths); quadrature inserts breakpoints there.
  std::vector<double> feature_breakpoints() const;

  const Node& node() const { return node_; }

 private:
  Node node_;
};

// S(omega) for omega > 0; throws std::invalid_argument for omega <= 0 (the
// power-law variants diverge at zero).
double spectrum_eval(const NoiseSpectrum& spectrum, double omega);

// Inline grammar used by the CLI and config files:
//   powerlaw:S0,ALPHA
//   powerlaw-white:S_PLN,ALPHA,S_WN
//   resonance:S1,OMEGA0_RAD_PER_S,DELTA_OMEGA_RAD_PER_S
//   white:S_WN
//   file:PATH                  (CSV omega_rad_per_s,S)
// Components joined with '+' are summed.
NoiseSpectrum parse_spectrum(const std::string& text);

}  // namespace ddscope
