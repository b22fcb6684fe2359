#pragma once

#include <cstddef>
#include <vector>

namespace ddscope {

// Uniformly sampled real signal: sample m sits at t = m * dt.
struct TimeSeries {
  double dt = 0.0;
  std::vector<double> samples;

  double duration() const {
    return samples.empty() ? 0.0 : dt * static_cast<double>(samples.size() - 1);
  }
};

}  // namespace ddscope
