#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numeric>
#include <random>

#include "ddscope/noise_synthesis.hpp"
#include "ddscope/welch.hpp"
#include "oracles.hpp"

using namespace ddscope;

TEST_SUITE("noise") {

TEST_CASE("synthesis is deterministic in the seed") {
  const NoiseSpectrum s(PowerLaw{100.0, 0.89});
  const auto a = generate_noise(s, 1e-3, 1024, 42);
  const auto b = generate_noise(s, 1e-3, 1024, 42);
  const auto c = generate_noise(s, 1e-3, 1024, 43);
  REQUIRE(a.samples.size() == 1024);
  CHECK(a.samples == b.samples);
  CHECK(a.samples != c.samples);
}

TEST_CASE("record length must be a power of two") {
  const NoiseSpectrum s(PowerLaw{1.0, 0.5});
  CHECK_THROWS_AS(generate_noise(s, 1e-3, 1000, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_noise(s, 1e-3, 32, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_noise(s, 0.0, 1024, 1), std::invalid_argument);
}

TEST_CASE("sample mean vanishes with the zeroed DC bin") {
  const NoiseSpectrum s(PowerLaw{50.0, 0.89});
  const auto ts = generate_noise(s, 1e-3, 1 << 14, 7);
  const double mean = std::accumulate(ts.samples.begin(), ts.samples.end(), 0.0) /
                      static_cast<double>(ts.samples.size());
  double var = 0.0;
  for (double x : ts.samples) var += (x - mean) * (x - mean);
  var /= static_cast<double>(ts.samples.size() - 1);
  CHECK(std::abs(mean) <= 5.0 * std::sqrt(var / static_cast<double>(ts.samples.size())));
}

TEST_CASE("white synthesis round-trips through the Welch estimate") {
  const double s_wn = 2.5;
  const double dt = 1e-4;
  const NoiseSpectrum s(PowerLawPlusWhite{0.0, 1.0, s_wn});
  const auto ts = generate_noise(s, dt, 1 << 18, 99);

  // variance of the band-limited record: (1/2pi) * S * (2pi/dt)
  double var = 0.0;
  for (double x : ts.samples) var += x * x;
  var /= static_cast<double>(ts.samples.size());
  CHECK(var == doctest::Approx(s_wn / dt).epsilon(0.05));

  const auto psd = welch_psd(ts, 1 << 12, 0.5, PsdWindow::Hann);
  // flat at S_WN over the mid-band
  double level = 0.0;
  std::size_t count = 0;
  for (std::size_t k = psd.omega.size() / 8; k < psd.omega.size() / 2; ++k) {
    level += psd.value[k];
    ++count;
  }
  level /= static_cast<double>(count);
  CHECK(level == doctest::Approx(s_wn).epsilon(0.10));
}

TEST_CASE("power-law synthesis reproduces its slope") {
  const NoiseSpectrum s(PowerLaw{1.0, 0.89});
  const double dt = 1e-3;
  const auto ts = generate_noise(s, dt, 1 << 20, 2024);
  const auto psd = welch_psd(ts, 1 << 12, 0.5, PsdWindow::Hann);
  // fit the slope over two decades away from the leakage-dominated bottom bins
  std::vector<double> w, v;
  for (std::size_t k = 0; k < psd.omega.size(); ++k) {
    if (psd.omega[k] >= 20.0 && psd.omega[k] <= 2000.0) {
      w.push_back(psd.omega[k]);
      v.push_back(psd.value[k]);
    }
  }
  REQUIRE(w.size() > 100);
  CHECK(oracle::loglog_slope(w, v) == doctest::Approx(-0.89).epsilon(0.056));
}

TEST_CASE("welch normalization: unit-variance white noise sits at dt") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  TimeSeries ts;
  ts.dt = 2e-3;
  ts.samples.resize(1 << 17);
  for (auto& x : ts.samples) x = gauss(rng);
  const auto psd = welch_psd(ts, 1 << 10, 0.5, PsdWindow::Hann);
  double level = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 4; k < psd.omega.size() - 1; ++k) {
    level += psd.value[k];
    ++count;
  }
  level /= static_cast<double>(count);
  CHECK(level == doctest::Approx(ts.dt).epsilon(0.10));

  // full-band integral identity: sum over the symmetric band = 2 pi variance
  double var = 0.0;
  for (double x : ts.samples) var += x * x;
  var /= static_cast<double>(ts.samples.size());
  const double d_omega = psd.omega[1] - psd.omega[0];
  double integral = psd.value.front() + psd.value.back();
  for (std::size_t k = 1; k + 1 < psd.value.size(); ++k) integral += 2.0 * psd.value[k];
  integral *= d_omega;
  CHECK(integral == doctest::Approx(2.0 * M_PI * var).epsilon(0.05));
}

TEST_CASE("welch resolves a pure tone in the right bin") {
  TimeSeries ts;
  ts.dt = 1e-3;
  const std::size_t n = 1 << 14;
  const std::size_t L = 1 << 10;
  // place the tone exactly on bin 100 of the segment grid
  const double omega_s = 2.0 * M_PI * 100.0 / (static_cast<double>(L) * ts.dt);
  ts.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ts.samples[i] = std::sin(omega_s * static_cast<double>(i) * ts.dt);
  }
  const auto psd = welch_psd(ts, L, 0.5, PsdWindow::Hann);
  std::size_t peak = 0;
  for (std::size_t k = 1; k < psd.value.size(); ++k) {
    if (psd.value[k] > psd.value[peak]) peak = k;
  }
  CHECK(psd.omega[peak] == doctest::Approx(omega_s).epsilon(1e-12));
}

TEST_CASE("welch argument validation") {
  TimeSeries ts;
  ts.dt = 1e-3;
  ts.samples.assign(512, 0.0);
  CHECK_THROWS_AS(welch_psd(ts, 1024, 0.5, PsdWindow::Hann), std::invalid_argument);
  CHECK_THROWS_AS(welch_psd(ts, 100, 0.5, PsdWindow::Hann), std::invalid_argument);
  CHECK_THROWS_AS(welch_psd(ts, 256, 1.0, PsdWindow::Hann), std::invalid_argument);
}

}  // TEST_SUITE
