#include "ddscope/welch.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace ddscope {
namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

class R2cPlanCache {
 public:
  static R2cPlanCache& instance() {
    static R2cPlanCache cache;
    return cache;
  }

  void execute(std::size_t n, double* in, fftw_complex* out) {
    fftw_plan plan = nullptr;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = plans_.find(n);
      if (it == plans_.end()) {
        double* tmp_in = static_cast<double*>(fftw_malloc(sizeof(double) * n));
        fftw_complex* tmp_out =
            static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), tmp_in, tmp_out, FFTW_ESTIMATE);
        fftw_free(tmp_in);
        fftw_free(tmp_out);
        plans_.emplace(n, plan);
      } else {
        plan = it->second;
      }
    }
    fftw_execute_dft_r2c(plan, in, out);
  }

 private:
  R2cPlanCache() = default;
  std::mutex mutex_;
  std::map<std::size_t, fftw_plan> plans_;
};

}  // namespace

PsdEstimate welch_psd(const TimeSeries& ts, std::size_t segment_len,
                      double overlap_fraction, PsdWindow window) {
  const std::size_t n = ts.samples.size();
  if (!is_power_of_two(segment_len)) {
    throw std::invalid_argument("welch_psd: segment_len must be a power of two");
  }
  if (segment_len > n) {
    throw std::invalid_argument("welch_psd: segment longer than the time series");
  }
  if (!(overlap_fraction >= 0.0) || !(overlap_fraction < 1.0)) {
    throw std::invalid_argument("welch_psd: overlap_fraction must be in [0, 1)");
  }
  if (!(ts.dt > 0.0)) throw std::invalid_argument("welch_psd: dt must be > 0");

  const std::size_t L = segment_len;
  const std::size_t hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround((1.0 - overlap_fraction) * static_cast<double>(L))));

  // periodic Hann; w^2 sum normalizes the window power
  std::vector<double> w(L, 1.0);
  if (window == PsdWindow::Hann) {
    for (std::size_t m = 0; m < L; ++m) {
      w[m] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(m) / static_cast<double>(L)));
    }
  }
  double w2 = 0.0;
  for (double x : w) w2 += x * x;

  const std::size_t n_bins = L / 2 + 1;
  std::vector<double> acc(n_bins, 0.0);
  double* seg = static_cast<double*>(fftw_malloc(sizeof(double) * L));
  fftw_complex* seg_fft = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_bins));

  std::size_t n_segments = 0;
  for (std::size_t start = 0; start + L <= n; start += hop) {
    for (std::size_t m = 0; m < L; ++m) seg[m] = ts.samples[start + m] * w[m];
    R2cPlanCache::instance().execute(L, seg, seg_fft);
    for (std::size_t k = 0; k < n_bins; ++k) {
      acc[k] += seg_fft[k][0] * seg_fft[k][0] + seg_fft[k][1] * seg_fft[k][1];
    }
    ++n_segments;
  }
  fftw_free(seg);
  fftw_free(seg_fft);

  PsdEstimate psd;
  psd.omega.resize(n_bins);
  psd.value.resize(n_bins);
  const double d_omega = 2.0 * M_PI / (static_cast<double>(L) * ts.dt);
  const double norm = ts.dt / (static_cast<double>(n_segments) * w2);
  for (std::size_t k = 0; k < n_bins; ++k) {
    psd.omega[k] = d_omega * static_cast<double>(k);
    psd.value[k] = acc[k] * norm;
  }
  return psd;
}

}  // namespace ddscope
