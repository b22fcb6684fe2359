#pragma once

#include <cstdint>

#include "ddscope/noise_spectrum.hpp"
#include "ddscope/time_series.hpp"

namespace ddscope {

// Synthesizes a stationary Gaussian record whose two-sided PSD matches the
// spectrum: independent complex Gaussian bin amplitudes with variance
// n S(omega_k) / dt, Hermitian symmetry, inverse FFT (1/n convention).  The
// DC bin is zeroed, which enforces <beta> = 0 and regularizes the power-law
// divergence below the lowest representable frequency 2 pi/(n dt).
//
// n must be a power of two >= 64.  Identical (spectrum, dt, n, seed) inputs
// produce bit-identical records.
TimeSeries generate_noise(const NoiseSpectrum& spectrum, double dt, std::size_t n,
                          std::uint64_t seed);

}  // namespace ddscope
