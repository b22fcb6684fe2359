#include "ddscope/filter_function.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace ddscope {
namespace {

// Below this u both direct evaluations cancel catastrophically; the Taylor
// series with moments through M_9 is accurate to ~1e-13 relative here.
constexpr double kSeriesThreshold = 5e-2;

// Filter values below this are recomputed with long-double trigonometry:
// double-rounded pulse phases alone already shift near-zero filter values by
// ~2e-16 N u / sqrt(g), so the closed-form/exact-sum agreement needs the
// extended-precision path well before rounding noise dominates.
constexpr double kRefineBelow = 1e-8;

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace

std::string to_string(FilterVariant variant) {
  switch (variant) {
    case FilterVariant::ExactSum: return "exact";
    case FilterVariant::ClosedForm: return "closed";
    case FilterVariant::SincApprox: return "sinc";
  }
  return "unknown";
}

FilterEvaluator::FilterEvaluator(const PulseSequence& seq, Mode mode) {
  const double T = seq.total_time();
  n_ = seq.pulse_count();
  closed_ = (mode == Mode::Auto && seq.family() == SequenceFamily::Cpmg && n_ >= 1);

  // F(u) = sum_m amp_m e^{i u phase_m}; the amplitudes sum to zero for any N,
  // which the small-u series and the cancellation-safe direct form rely on.
  phases_.reserve(static_cast<std::size_t>(n_) + 2);
  amps_.reserve(static_cast<std::size_t>(n_) + 2);
  phases_.push_back(0.0);
  amps_.push_back(1.0);
  phases_.push_back(1.0);
  amps_.push_back((n_ % 2 == 0) ? -1.0 : 1.0);  // (-1)^{1+N}
  double sign = -1.0;
  for (double t : seq.pulse_times()) {
    phases_.push_back(t / T);
    amps_.push_back(2.0 * sign);
    sign = -sign;
  }

  // Extended-precision phases for the near-zero refinement path.  For CPMG
  // sequences the analytic fractions (2j-1)/(2N) are used directly, so both
  // filter routes see identical phases beyond double rounding.
  phases_ld_.resize(phases_.size());
  phases_ld_[0] = 0.0L;
  phases_ld_[1] = 1.0L;
  const bool cpmg_times = seq.family() == SequenceFamily::Cpmg;
  for (std::size_t i = 2; i < phases_.size(); ++i) {
    if (cpmg_times) {
      phases_ld_[i] = static_cast<long double>(2 * (i - 1) - 1) /
                      static_cast<long double>(2 * n_);
    } else {
      phases_ld_[i] = static_cast<long double>(seq.pulse_times()[i - 2]) /
                      static_cast<long double>(T);
    }
  }

  for (int k = 0; k <= 9; ++k) {
    double m = 0.0;
    for (std::size_t i = 0; i < phases_.size(); ++i) {
      m += amps_[i] * std::pow(phases_[i], k);
    }
    moments_[k] = m;
  }
  moments_[0] = 0.0;  // exactly zero analytically
}

double FilterEvaluator::operator()(double u) const {
  if (!(u >= 0.0)) throw std::invalid_argument("FilterEvaluator: u must be >= 0");
  if (u < kSeriesThreshold) return eval_series(u);
  return closed_ ? eval_closed(u) : eval_direct(u);
}

// F(u)/u = sum_{k>=1} i^k M_k u^{k-1} / k!
double FilterEvaluator::eval_series(double u) const {
  std::complex<double> z(0.0, 0.0);
  double upow = 1.0;       // u^{k-1}
  double factorial = 1.0;  // k!
  std::complex<double> ipow(0.0, 1.0);
  for (int k = 1; k <= 9; ++k) {
    factorial *= k;
    z += ipow * (moments_[k] * upow / factorial);
    upow *= u;
    ipow *= std::complex<double>(0.0, 1.0);
  }
  return std::norm(z);
}

// F(u) = sum_m amp_m (e^{i u phase_m} - 1); the subtracted constant uses
// sum amp = 0 and keeps the real part in the well-conditioned -2 sin^2 form.
// Near the isolated zeros of F the double-precision result is pure rounding
// noise, so values below kRefineBelow are recomputed in extended precision;
// that keeps the closed-form/exact-sum agreement within 1e-9 relative all the
// way down to the 1e-15 floor.
double FilterEvaluator::eval_direct(double u) const {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < phases_.size(); ++i) {
    const double arg = u * phases_[i];
    const double s = std::sin(0.5 * arg);
    re += amps_[i] * (-2.0 * s * s);
    im += amps_[i] * std::sin(arg);
  }
  const double g = (re * re + im * im) / (u * u);
  if (g >= kRefineBelow) return g;
  long double re_l = 0.0L;
  long double im_l = 0.0L;
  const long double u_l = u;
  for (std::size_t i = 0; i < phases_.size(); ++i) {
    const long double arg = u_l * phases_ld_[i];
    const long double s = sinl(0.5L * arg);
    re_l += static_cast<long double>(amps_[i]) * (-2.0L * s * s);
    im_l += static_cast<long double>(amps_[i]) * sinl(arg);
  }
  return static_cast<double>((re_l * re_l + im_l * im_l) / (u_l * u_l));
}

double FilterEvaluator::eval_closed_raw(double u) const {
  const double n = static_cast<double>(n_);
  const std::complex<double> eiu(std::cos(u), std::sin(u));
  const std::complex<double> half(std::cos(u / (2.0 * n)), std::sin(u / (2.0 * n)));
  const std::complex<double> den = half * half + 1.0;
  const double sn = (n_ % 2 == 0) ? 1.0 : -1.0;  // (-1)^N
  const std::complex<double> num = sn * eiu - 1.0;
  const std::complex<double> f = 1.0 - sn * eiu + 2.0 * half * (num / den);
  const double g = std::norm(f) / (u * u);
  if (g >= kRefineBelow) return g;
  const long double u_l = u;
  const long double n_l = n;
  const std::complex<long double> eiu_l(cosl(u_l), sinl(u_l));
  const std::complex<long double> half_l(cosl(u_l / (2.0L * n_l)), sinl(u_l / (2.0L * n_l)));
  const std::complex<long double> den_l = half_l * half_l + 1.0L;
  const long double sn_l = sn;
  const std::complex<long double> f_l =
      1.0L - sn_l * eiu_l + 2.0L * half_l * ((sn_l * eiu_l - 1.0L) / den_l);
  return static_cast<double>(std::norm(f_l) / (u_l * u_l));
}

double FilterEvaluator::eval_closed(double u) const {
  // Distance from u to the nearest removable singularity (2k+1) N pi,
  // measured where the denominator phase u/N crosses an odd multiple of pi.
  const double n = static_cast<double>(n_);
  const double phi = u / n;
  const double m = std::round((phi - M_PI) / (2.0 * M_PI));
  const double dist = std::abs(phi - (2.0 * m + 1.0) * M_PI) * n;
  const double h = 1e-7 * std::max(n, u);
  if (dist > 64.0 * h) return eval_closed_raw(u);
  const double a1 = 0.5 * (eval_closed_raw(u - h) + eval_closed_raw(u + h));
  const double a2 = 0.5 * (eval_closed_raw(u - 2.0 * h) + eval_closed_raw(u + 2.0 * h));
  return (4.0 * a1 - a2) / 3.0;
}

double filter_exact(const PulseSequence& seq, double omega) {
  if (!(omega >= 0.0)) throw std::invalid_argument("filter_exact: omega must be >= 0");
  FilterEvaluator eval(seq, FilterEvaluator::Mode::ExactSum);
  return eval(omega * seq.total_time());
}

double filter_cpmg_closed(int n_pulses, double u) {
  if (n_pulses < 1) {
    throw std::invalid_argument("filter_cpmg_closed: requires N >= 1 (Ramsey has no closed form)");
  }
  if (!(u >= 0.0)) throw std::invalid_argument("filter_cpmg_closed: u must be >= 0");
  // Total time is arbitrary here: the CPMG filter depends on u only.
  FilterEvaluator eval(make_cpmg(n_pulses, 1.0));
  return eval(u);
}

double filter_cpmg_sinc(int n_pulses, double u, int k_max) {
  if (n_pulses < 1) throw std::invalid_argument("filter_cpmg_sinc: requires N >= 1");
  if (k_max < 0) throw std::invalid_argument("filter_cpmg_sinc: k_max must be >= 0");
  double sum = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    const double odd = 2.0 * k + 1.0;
    const double s = sinc(0.5 * (u - odd * n_pulses * M_PI));
    sum += 4.0 / (odd * odd * M_PI * M_PI) * s * s;
  }
  return sum;
}

int sinc_default_k_max() {
  int k = 0;
  while (4.0 / std::pow((2.0 * k + 3.0) * M_PI, 2) >= 1e-6) ++k;
  return k;
}

std::vector<double> peak_frequencies(int n_pulses, double total_time, int k_max) {
  if (n_pulses < 1) throw std::invalid_argument("peak_frequencies: requires N >= 1");
  if (!(total_time > 0.0)) throw std::invalid_argument("peak_frequencies: requires T > 0");
  if (k_max < 0) throw std::invalid_argument("peak_frequencies: k_max must be >= 0");
  std::vector<double> peaks(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) {
    peaks[static_cast<std::size_t>(k)] = (2.0 * k + 1.0) * n_pulses * M_PI / total_time;
  }
  return peaks;
}

}  // namespace ddscope
