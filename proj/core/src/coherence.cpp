#include "ddscope/coherence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "ddscope/errors.hpp"
#include "ddscope/quadrature.hpp"
#include "ddscope/zeta.hpp"

namespace ddscope {
namespace {

constexpr double kTwoPi = 2.0 * M_PI;

struct UQuad {
  double value = 0.0;
  double error = 0.0;
};

// Block-aligned panel edges over (lo, hi]; blocks are centered on the CPMG
// filter peaks (edges at even multiples of N pi).  Falls back to geometric
// edges when a linear partition would explode, e.g. a resonance far above
// the filter's first peaks.
std::vector<double> make_edges(double lo, double hi, double block,
                               const std::vector<double>& features) {
  std::vector<double> edges;
  edges.push_back(lo);
  const double n_blocks = (hi - lo) / block;
  if (n_blocks <= 20000.0) {
    for (double e = std::ceil(lo / block + 1e-12) * block; e < hi; e += block) {
      if (e > lo) edges.push_back(e);
    }
  } else {
    for (double e = std::ceil(lo / block + 1e-12) * block; e < hi && edges.size() < 80;
         e += block) {
      if (e > lo) edges.push_back(e);
    }
    for (double e = edges.back() * 2.0; e < hi; e *= 2.0) edges.push_back(e);
  }
  for (double f : features) {
    if (f > lo && f < hi) edges.push_back(f);
  }
  edges.push_back(hi);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

// int_{u_min}^inf h(u) du for h = S(u/T) g(u): tanh-sinh head panel for the
// u -> 0 endpoint, Gauss-Kronrod panels aligned with the filter peaks, then
// doubling extensions until the analytic envelope tail (added to the result,
// a quarter of it charged to the error) fits the tolerance budget.
template <typename H, typename TailFn>
UQuad integrate_u_space(H&& h, TailFn&& tail_fn, int n_pulses, bool cpmg_blocks,
                        double u_min, std::vector<double> features, double rel_tol,
                        double abs_tol) {
  const double block = (cpmg_blocks && n_pulses >= 1) ? kTwoPi * n_pulses : kTwoPi;
  UQuad out;

  double gk_start = u_min;
  if (u_min <= 0.0) {
    const double head_end = std::min(M_PI / 2.0, block / 8.0);
    auto head = integrate_tanh_sinh(h, 0.0, head_end, 0.25 * rel_tol);
    out.value += head.value;
    out.error += head.error;
    gk_start = head_end;
  }

  double u_span = 64.0 * block;
  if (!features.empty()) u_span = std::max(u_span, 1.25 * features.back());
  u_span = std::ceil(u_span / block) * block;
  if (u_span < gk_start + 4.0 * block) {
    u_span = std::ceil((gk_start + 4.0 * block) / block) * block;
  }

  auto main = integrate_adaptive(h, make_edges(gk_start, u_span, block, features),
                                 abs_tol, 0.5 * rel_tol);
  out.value += main.value;
  out.error += main.error;

  double u_split = u_span;
  double tail = tail_fn(u_split);
  for (int round = 0; round < 40; ++round) {
    if (0.25 * tail <= std::max(0.5 * rel_tol * (std::abs(out.value) + tail), abs_tol)) break;
    const double next = 2.0 * u_split;
    auto ext = integrate_adaptive(
        h, make_edges(u_split, next, block, features),
        std::max(abs_tol, 0.25 * rel_tol * std::abs(out.value)), 0.5 * rel_tol);
    out.value += ext.value;
    out.error += ext.error;
    u_split = next;
    tail = tail_fn(u_split);
  }
  out.value += tail;
  out.error += 0.25 * tail;
  return out;
}

// Power-law shape integral I(alpha) = int_{u_min}^inf u^-alpha g(u) du.
UQuad powerlaw_shape_integral(double alpha, const PulseSequence& seq, double u_min,
                              double rel_tol) {
  FilterEvaluator g(seq);
  const int n = seq.pulse_count();
  const double envelope = 2.0 + 4.0 * n;
  return integrate_u_space(
      [&](double u) { return std::pow(u, -alpha) * g(u); },
      [&](double u_s) { return envelope * std::pow(u_s, -1.0 - alpha) / (1.0 + alpha); },
      n, g.uses_closed_form(), u_min, {}, rel_tol, 1e-16);
}

void check_integrability(double ir_exponent, int n_pulses) {
  // integrand ~ S(w) near w -> 0 for N = 0 and ~ w^2 S(w) for N >= 1
  const double limit = (n_pulses == 0) ? -1.0 : -3.0;
  if (ir_exponent <= limit) {
    throw std::domain_error(
        "chi_numeric: coherence integral diverges at the omega -> 0 endpoint "
        "(spectrum ~ omega^" + std::to_string(ir_exponent) + " needs exponent > " +
        std::to_string(limit) + " for N = " + std::to_string(n_pulses) +
        "); pass an explicit omega_min cutoff to override");
  }
}

// Splits a spectrum into white weight (handled via the Parseval identity
// int_0^inf g(u) du = pi, i.e. chi_white = S_WN T / 2) and parts that go
// through quadrature.
void flatten_spectrum(const NoiseSpectrum& spectrum, double& white,
                      std::vector<NoiseSpectrum>& parts) {
  if (const auto* sum = std::get_if<SpectrumSum>(&spectrum.node())) {
    for (const auto& c : sum->components) flatten_spectrum(c, white, parts);
    return;
  }
  if (const auto* plw = std::get_if<PowerLawPlusWhite>(&spectrum.node())) {
    white += plw->s_wn;
    if (plw->s_pln > 0.0) parts.push_back(NoiseSpectrum(PowerLaw{plw->s_pln, plw->alpha_tilde}));
    return;
  }
  parts.push_back(spectrum);
}

}  // namespace

CoherenceResult chi_numeric(const NoiseSpectrum& spectrum, const PulseSequence& seq,
                            const ChiOptions& options) {
  const double T = seq.total_time();
  const int n = seq.pulse_count();
  const double u_min = options.omega_min > 0.0 ? options.omega_min * T : 0.0;
  if (u_min <= 0.0) check_integrability(spectrum.infrared_exponent(), n);

  double white = 0.0;
  std::vector<NoiseSpectrum> parts;
  flatten_spectrum(spectrum, white, parts);

  double chi = 0.0;
  double err = 0.0;

  if (white > 0.0) {
    chi += white * T / 2.0;
    if (u_min > 0.0) {
      // subtract the cut infrared portion int_0^{u_min} g(u) du
      FilterEvaluator g(seq);
      auto head = integrate_tanh_sinh([&](double u) { return g(u); }, 0.0,
                                      std::min(u_min, M_PI / 2.0), 0.1 * options.rel_tol);
      double cut = head.value;
      double cut_err = head.error;
      if (u_min > M_PI / 2.0) {
        auto rest = integrate_adaptive([&](double u) { return g(u); },
                                       make_edges(M_PI / 2.0, u_min, kTwoPi, {}), 1e-16,
                                       0.5 * options.rel_tol);
        cut += rest.value;
        cut_err += rest.error;
      }
      chi -= white * (T / kTwoPi) * cut;
      err += white * (T / kTwoPi) * cut_err;
    }
  }

  for (const auto& part : parts) {
    if (const auto* pl = std::get_if<PowerLaw>(&part.node())) {
      auto shape = powerlaw_shape_integral(pl->alpha, seq, u_min, options.rel_tol);
      const double factor = pl->s0 * std::pow(T, 1.0 + pl->alpha) / kTwoPi;
      chi += factor * shape.value;
      err += factor * shape.error;
      continue;
    }
    FilterEvaluator g(seq);
    const double envelope = 2.0 + 4.0 * n;
    std::vector<double> features;
    for (double f : part.feature_breakpoints()) features.push_back(f * T);
    auto integral = integrate_u_space(
        [&](double u) { return part(u / T) * g(u); },
        [&](double u_s) { return (envelope / T) * part.tail_integral_over_omega2(u_s / T); },
        n, g.uses_closed_form(), u_min, std::move(features), options.rel_tol,
        options.abs_tol * kTwoPi / T);
    chi += (T / kTwoPi) * integral.value;
    err += (T / kTwoPi) * integral.error;
  }

  CoherenceResult result;
  result.chi = chi;
  result.visibility = std::exp(-chi);
  result.quadrature_error_estimate = err;
  return result;
}

double chi_analytic_cpmg(double s0, double alpha, int n_pulses, double T) {
  return std::pow(T / tau_c_analytic(s0, alpha, n_pulses), 1.0 + alpha);
}

double tau1_analytic(double s0, double alpha) {
  if (!(s0 > 0.0)) throw std::invalid_argument("tau1_analytic: S0 must be > 0");
  if (!(alpha > 0.0)) throw std::invalid_argument("tau1_analytic: alpha must be > 0");
  const double bracket = 4.0 * s0 * std::pow(M_PI, -2.0 - alpha) *
                         (1.0 - std::pow(2.0, -2.0 - alpha)) * riemann_zeta(2.0 + alpha);
  return std::pow(bracket, -1.0 / (1.0 + alpha));
}

double tau_c_analytic(double s0, double alpha, int n_pulses) {
  if (n_pulses < 1) throw std::invalid_argument("tau_c_analytic: requires N >= 1");
  return std::pow(n_pulses, alpha / (1.0 + alpha)) * tau1_analytic(s0, alpha);
}

double solve_chi_equals_one(const std::function<double(double)>& chi_of_total_time,
                            double t_lo, double t_hi, double rel_tol) {
  if (!(t_lo > 0.0) || !(t_hi > t_lo)) {
    throw std::invalid_argument("solve_chi_equals_one: need 0 < t_lo < t_hi");
  }
  double f_lo = chi_of_total_time(t_lo) - 1.0;
  double f_hi = chi_of_total_time(t_hi) - 1.0;
  if (f_lo == 0.0) return t_lo;
  if (f_hi == 0.0) return t_hi;
  if (f_lo * f_hi > 0.0) {
    throw bracket_error("solve_chi_equals_one: bracket does not straddle chi = 1");
  }
  double lo = t_lo, hi = t_hi;
  for (int iter = 0; iter < 200; ++iter) {
    // secant candidate, safeguarded by the bracket midpoint
    double mid = lo + (hi - lo) * (-f_lo) / (f_hi - f_lo);
    const double spread = hi - lo;
    if (!(mid > lo + 0.01 * spread) || !(mid < hi - 0.01 * spread)) {
      mid = 0.5 * (lo + hi);
    }
    const double f_mid = chi_of_total_time(mid) - 1.0;
    if (f_mid == 0.0) return mid;
    if (f_lo * f_mid < 0.0) {
      hi = mid;
      f_hi = f_mid;
    } else {
      lo = mid;
      f_lo = f_mid;
    }
    if ((hi - lo) <= rel_tol * 0.5 * (hi + lo)) break;
  }
  return 0.5 * (lo + hi);
}

double tau_c_numeric(const NoiseSpectrum& spectrum, int n_pulses,
                     std::pair<double, double> t_bracket, const ChiOptions& options) {
  if (n_pulses < 0) throw std::invalid_argument("tau_c_numeric: N must be >= 0");
  auto chi_of_T = [&](double T) {
    return chi_numeric(spectrum, make_cpmg(n_pulses, T), options).chi;
  };
  return solve_chi_equals_one(chi_of_T, t_bracket.first, t_bracket.second);
}

std::vector<double> dip_times(double omega0, int n_pulses, int k_max) {
  if (!(omega0 > 0.0)) throw std::invalid_argument("dip_times: omega0 must be > 0");
  if (n_pulses < 1) throw std::invalid_argument("dip_times: requires N >= 1");
  if (k_max < 0) throw std::invalid_argument("dip_times: k_max must be >= 0");
  std::vector<double> times(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) {
    times[static_cast<std::size_t>(k)] = (2.0 * k + 1.0) * n_pulses * M_PI / omega0;
  }
  return times;
}

PowerLawChiModel::PowerLawChiModel(double quad_rel_tol) : quad_rel_tol_(quad_rel_tol) {}

double PowerLawChiModel::shape_integral(double alpha, int n_pulses) {
  const auto key = std::make_pair(n_pulses, std::bit_cast<std::uint64_t>(alpha));
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  if (!(alpha > 0.0)) throw std::invalid_argument("PowerLawChiModel: alpha must be > 0");
  if (alpha >= (n_pulses == 0 ? 1.0 : 3.0)) {
    throw std::domain_error(
        "PowerLawChiModel: shape integral diverges at the u -> 0 endpoint (alpha >= " +
        std::string(n_pulses == 0 ? "1 for N = 0" : "3 for N >= 1") + ")");
  }
  const double value =
      powerlaw_shape_integral(alpha, make_cpmg(n_pulses, 1.0), 0.0, quad_rel_tol_).value;
  cache_.emplace(key, value);
  return value;
}

double PowerLawChiModel::chi(double s0, double alpha, int n_pulses, double T) {
  return s0 * std::pow(T, 1.0 + alpha) / kTwoPi * shape_integral(alpha, n_pulses);
}

}  // namespace ddscope
