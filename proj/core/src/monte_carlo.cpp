#include "ddscope/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ddscope/noise_synthesis.hpp"
#include "ddscope/rng.hpp"

namespace ddscope {
namespace {

// Order-independent pairwise sum.
double pairwise_sum(const double* data, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

}  // namespace

double accumulate_phase(const TimeSeries& noise, const PulseSequence& seq) {
  const double T = seq.total_time();
  if (noise.samples.size() < 2 || !(noise.dt > 0.0)) {
    throw std::invalid_argument("accumulate_phase: noise record needs >= 2 samples");
  }
  if (noise.duration() < T * (1.0 - 1e-12)) {
    throw std::invalid_argument("accumulate_phase: noise record shorter than the sequence");
  }
  const double dt = noise.dt;
  const auto& beta = noise.samples;
  const auto value_at = [&](double t) {
    std::size_t i = static_cast<std::size_t>(t / dt);
    if (i + 1 >= beta.size()) i = beta.size() - 2;
    const double frac = t / dt - static_cast<double>(i);
    return beta[i] + (beta[i + 1] - beta[i]) * frac;
  };

  // segment boundaries: 0, pulse times, T; sign on segment j is (-1)^j
  double phi = 0.0;
  double seg_start = 0.0;
  double sign = 1.0;
  const auto& pulses = seq.pulse_times();
  for (std::size_t j = 0; j <= pulses.size(); ++j) {
    const double seg_end = (j < pulses.size()) ? pulses[j] : T;
    double x = seg_start;
    double bx = value_at(x);
    // advance over whole sample intervals inside the segment
    for (std::size_t i = static_cast<std::size_t>(x / dt) + 1;
         static_cast<double>(i) * dt < seg_end; ++i) {
      const double g = static_cast<double>(i) * dt;
      const double bg = beta[i];
      phi += sign * (g - x) * 0.5 * (bx + bg);
      x = g;
      bx = bg;
    }
    const double be = value_at(seg_end);
    phi += sign * (seg_end - x) * 0.5 * (bx + be);
    seg_start = seg_end;
    sign = -sign;
  }
  return phi;
}

void mc_default_record(const PulseSequence& seq, double& dt, std::size_t& n_samples) {
  const double T = seq.total_time();
  const int n_eff = std::max(seq.pulse_count(), 1);
  dt = T / (64.0 * static_cast<double>(n_eff));
  std::size_t n = 64;
  while (static_cast<double>(n) * dt < 20.0 * T) n *= 2;
  n_samples = n;
}

McEstimate mc_visibility(const NoiseSpectrum& spectrum, const PulseSequence& seq,
                         std::size_t n_trajectories, std::uint64_t seed,
                         const McOptions& options) {
  if (n_trajectories < 100) {
    throw std::invalid_argument("mc_visibility: need >= 100 trajectories");
  }
  double dt = options.dt;
  std::size_t n = options.n_samples;
  if (dt <= 0.0 || n == 0) {
    double auto_dt;
    std::size_t auto_n;
    mc_default_record(seq, auto_dt, auto_n);
    if (dt <= 0.0) dt = auto_dt;
    if (n == 0) {
      n = 64;
      while (static_cast<double>(n) * dt < 20.0 * seq.total_time()) n *= 2;
    }
  }

  std::vector<double> cosines(n_trajectories);
  for (std::size_t i = 0; i < n_trajectories; ++i) {
    const TimeSeries record = generate_noise(spectrum, dt, n, derive_stream_seed(seed, i));
    cosines[i] = std::cos(accumulate_phase(record, seq));
  }

  const double mean = pairwise_sum(cosines.data(), n_trajectories) /
                      static_cast<double>(n_trajectories);
  std::vector<double> sq(n_trajectories);
  for (std::size_t i = 0; i < n_trajectories; ++i) {
    const double d = cosines[i] - mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq.data(), n_trajectories) /
                     static_cast<double>(n_trajectories - 1);

  McEstimate est;
  est.visibility_mean = mean;
  est.std_error = std::sqrt(var / static_cast<double>(n_trajectories));
  est.n_trajectories = n_trajectories;
  est.seed = seed;
  return est;
}

}  // namespace ddscope
