#include "ddscope/noise_synthesis.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>

namespace ddscope {
namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// FFTW plan creation is not thread-safe; plans are cached per length and
// executed via the new-array interface.
class C2rPlanCache {
 public:
  static C2rPlanCache& instance() {
    static C2rPlanCache cache;
    return cache;
  }

  void execute(std::size_t n, fftw_complex* in, double* out) {
    fftw_plan plan = nullptr;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = plans_.find(n);
      if (it == plans_.end()) {
        // plan with dedicated buffers so caller arrays are not clobbered
        fftw_complex* tmp_in =
            static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
        double* tmp_out = static_cast<double*>(fftw_malloc(sizeof(double) * n));
        plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), tmp_in, tmp_out,
                                    FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
        fftw_free(tmp_in);
        fftw_free(tmp_out);
        plans_.emplace(n, plan);
      } else {
        plan = it->second;
      }
    }
    fftw_execute_dft_c2r(plan, in, out);
  }

 private:
  C2rPlanCache() = default;
  std::mutex mutex_;
  std::map<std::size_t, fftw_plan> plans_;
};

}  // namespace

TimeSeries generate_noise(const NoiseSpectrum& spectrum, double dt, std::size_t n,
                          std::uint64_t seed) {
  if (!(dt > 0.0)) throw std::invalid_argument("generate_noise: dt must be > 0");
  if (!is_power_of_two(n) || n < 64) {
    throw std::invalid_argument("generate_noise: n must be a power of two >= 64");
  }

  const std::size_t n_bins = n / 2 + 1;
  fftw_complex* bins = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_bins));
  double* out = static_cast<double*>(fftw_malloc(sizeof(double) * n));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double d_omega = 2.0 * M_PI / (static_cast<double>(n) * dt);

  bins[0][0] = 0.0;  // DC zeroed: <beta> = 0
  bins[0][1] = 0.0;
  // interior bins: E|B_k|^2 = S(w_k)/(n dt) under the unnormalized c2r
  // transform (equivalently sqrt(n S/dt) with an explicit 1/n inverse)
  for (std::size_t k = 1; k < n / 2; ++k) {
    const double sigma = std::sqrt(spectrum(d_omega * static_cast<double>(k)) /
                                   (static_cast<double>(n) * dt));
    const double x = gauss(rng);
    const double y = gauss(rng);
    bins[k][0] = sigma * x * M_SQRT1_2;
    bins[k][1] = sigma * y * M_SQRT1_2;
  }
  // Nyquist bin is real under Hermitian symmetry
  {
    const double sigma = std::sqrt(spectrum(d_omega * static_cast<double>(n / 2)) /
                                   (static_cast<double>(n) * dt));
    bins[n / 2][0] = sigma * gauss(rng);
    bins[n / 2][1] = 0.0;
  }

  C2rPlanCache::instance().execute(n, bins, out);

  TimeSeries series;
  series.dt = dt;
  series.samples.assign(out, out + n);
  fftw_free(bins);
  fftw_free(out);
  return series;
}

}  // namespace ddscope
