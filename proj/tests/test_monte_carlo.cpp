#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ddscope/coherence.hpp"
#include "ddscope/monte_carlo.hpp"
#include "oracles.hpp"

using namespace ddscope;

TEST_SUITE("monte_carlo") {

TEST_CASE("phase of a constant record") {
  TimeSeries constant;
  constant.dt = 1e-3;
  constant.samples.assign(2049, 3.7);

  SUBCASE("ramsey accumulates b T") {
    const auto seq = make_ramsey(1.0);
    CHECK(accumulate_phase(constant, seq) == doctest::Approx(3.7).epsilon(1e-13));
  }
  SUBCASE("echo cancels a static detuning") {
    const auto seq = make_cpmg(1, 1.0);
    CHECK(std::abs(accumulate_phase(constant, seq)) < 1e-13);
  }
  SUBCASE("any CPMG cancels a static detuning") {
    for (int n : {2, 3, 8}) {
      CHECK(std::abs(accumulate_phase(constant, make_cpmg(n, 1.0))) < 1e-12);
    }
  }
  SUBCASE("pulses off the sample grid still cancel exactly") {
    const auto seq = make_cpmg(3, 0.9991);
    CHECK(std::abs(accumulate_phase(constant, seq)) < 1e-12);
  }
  SUBCASE("record shorter than the sequence") {
    const auto seq = make_cpmg(1, 5.0);
    CHECK_THROWS_AS(accumulate_phase(constant, seq), std::invalid_argument);
  }
}

TEST_CASE("linear record integrates exactly under the trapezoid rule") {
  TimeSeries ramp;
  ramp.dt = 0.01;
  ramp.samples.resize(301);
  for (std::size_t i = 0; i < ramp.samples.size(); ++i) {
    ramp.samples[i] = 2.0 * static_cast<double>(i) * ramp.dt;
  }
  // int_0^T 2t dt = T^2
  CHECK(accumulate_phase(ramp, make_ramsey(2.0)) == doctest::Approx(4.0).epsilon(1e-12));
  // echo: int_0^{T/2} 2t - int_{T/2}^T 2t = -T^2/2
  CHECK(accumulate_phase(ramp, make_cpmg(1, 2.0)) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("zero spectrum gives unit visibility with zero error") {
  const NoiseSpectrum zero(PowerLawPlusWhite{0.0, 1.0, 0.0});
  const auto est = mc_visibility(zero, make_cpmg(1, 0.05), 200, 1);
  CHECK(est.visibility_mean == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(est.std_error == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(est.n_trajectories == 200);
}

TEST_CASE("trajectory count precondition") {
  const NoiseSpectrum s(PowerLaw{1.0, 0.5});
  CHECK_THROWS_AS(mc_visibility(s, make_cpmg(1, 0.05), 99, 1), std::invalid_argument);
}

TEST_CASE("echo visibility at tau_c is 1/e") {
  const NoiseSpectrum s(PowerLaw{1288.0, 0.89});
  const double tau_c = oracle::pairwise_tau_c(1288.0, 0.89, 1);
  const auto est = mc_visibility(s, make_cpmg(1, tau_c), 2000, 71);
  CHECK(std::abs(est.visibility_mean - std::exp(-1.0)) <= 3.0 * est.std_error);
}

TEST_CASE("monte carlo agrees with the coherence integral") {
  // the central cross-module identity <cos phi> = exp(-chi)
  const NoiseSpectrum s(PowerLaw{1288.0, 0.89});
  for (int n : {1, 4, 10}) {
    const double tau_c = oracle::pairwise_tau_c(1288.0, 0.89, n);
    for (double frac : {0.6, 1.2}) {
      const auto seq = make_cpmg(n, frac * tau_c);
      const auto est = mc_visibility(s, seq, 1000, 1234 + n);
      const auto chi = chi_numeric(s, seq);
      const double deviation = std::abs(est.visibility_mean - chi.visibility);
      CHECK(deviation <= 3.0 * (est.std_error + chi.quadrature_error_estimate));
    }
  }
}

TEST_CASE("monte carlo matches the cutoff coherence integral for a bare Ramsey sequence") {
  // the N = 0 integrand piles up at omega -> 0, so the record length sets an
  // infrared cutoff; compare against chi evaluated with the matched cutoff
  // at half the bin spacing (midpoint correspondence of the discrete bins)
  const NoiseSpectrum s(PowerLaw{1288.0, 0.89});
  const double T = 0.016;
  const auto seq = make_ramsey(T);
  McOptions opt;
  opt.dt = T / 64.0;
  std::size_t n = 64;
  while (static_cast<double>(n) * opt.dt < 80.0 * T) n *= 2;
  opt.n_samples = n;

  ChiOptions chi_opt;
  chi_opt.omega_min = M_PI / (static_cast<double>(n) * opt.dt);
  const auto chi = chi_numeric(s, seq, chi_opt);
  const auto est = mc_visibility(s, seq, 1500, 4242, opt);
  CHECK(std::abs(est.visibility_mean - chi.visibility) <= 3.0 * est.std_error);
}

TEST_CASE("resonance dip suppresses visibility at the aligned sequence length") {
  const double omega0 = 2.0 * M_PI * 100.0;
  const NoiseSpectrum res(GaussianResonance{40.0, omega0, 0.02 * omega0});
  const auto at_dip = mc_visibility(res, make_cpmg(8, 0.120), 400, 9);
  const auto off_dip = mc_visibility(res, make_cpmg(8, 0.090), 400, 9);
  CHECK(at_dip.visibility_mean < off_dip.visibility_mean);
}

TEST_CASE("reproducible from the master seed alone") {
  const NoiseSpectrum s(PowerLaw{100.0, 0.89});
  const auto a = mc_visibility(s, make_cpmg(2, 0.05), 150, 77);
  const auto b = mc_visibility(s, make_cpmg(2, 0.05), 150, 77);
  CHECK(a.visibility_mean == b.visibility_mean);
  CHECK(a.std_error == b.std_error);
}

}  // TEST_SUITE
