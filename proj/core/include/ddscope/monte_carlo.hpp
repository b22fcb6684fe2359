#pragma once

#include <cstdint>

#include "ddscope/noise_spectrum.hpp"
#include "ddscope/pulse_sequence.hpp"
#include "ddscope/time_series.hpp"

namespace ddscope {

// Dephasing phase phi = int_0^T beta(t) cos(Phi(t)) dt: trapezoidal
// integration of the linearly interpolated record, with segments split
// exactly at the pulse times so the toggling sign is never straddled.
double accumulate_phase(const TimeSeries& noise, const PulseSequence& seq);

struct McEstimate {
  double visibility_mean = 0.0;
  double std_error = 0.0;
  std::size_t n_trajectories = 0;
  std::uint64_t seed = 0;
};

struct McOptions {
  // Noise-record resolution; 0 picks dt = T / (64 max(N,1)) so the filter
  // peaks sit far below Nyquist.
  double dt = 0.0;
  // Record length; 0 picks the smallest power of two covering 20 T, putting
  // the synthesis infrared cutoff 2 pi/(n dt) at 1/(20 T).
  std::size_t n_samples = 0;
};

// Visibility estimate <cos phi> over independent noise trajectories.
// Per-trajectory seeds derive deterministically from the master seed; the
// estimator accumulates via pairwise summation, so the result is independent
// of any evaluation order.
McEstimate mc_visibility(const NoiseSpectrum& spectrum, const PulseSequence& seq,
                         std::size_t n_trajectories, std::uint64_t seed,
                         const McOptions& options = {});

// Record geometry mc_visibility would use for this sequence.
void mc_default_record(const PulseSequence& seq, double& dt, std::size_t& n_samples);

}  // namespace ddscope
