#pragma once

#include <cstddef>
#include <vector>

#include "ddscope/time_series.hpp"

namespace ddscope {

enum class PsdWindow { Hann, Rect };

struct PsdEstimate {
  std::vector<double> omega;  // rad/s, k = 0 .. segment_len/2
  std::vector<double> value;  // two-sided density on the one-sided grid
};

// Welch averaged-periodogram PSD of a uniformly sampled record.
//
// Convention: the returned values estimate the two-sided spectral density
// S(omega), reported on the one-sided grid omega_k = 2 pi k/(L dt).  With
// this normalization, sum_k psd_k * d_omega over the full symmetric band
// equals 2 pi times the signal variance, and a record synthesized from a
// spectrum S round-trips to psd ~= S.  White noise of variance v gives the
// flat level v * dt.
PsdEstimate welch_psd(const TimeSeries& ts, std::size_t segment_len,
                      double overlap_fraction, PsdWindow window);

}  // namespace ddscope
