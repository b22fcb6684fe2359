#include <doctest.h>

#include <cmath>
#include <vector>

#include "ddscope/coherence.hpp"
#include "ddscope/errors.hpp"
#include "oracles.hpp"

using namespace ddscope;

namespace {
const NoiseSpectrum kReferenceSpectrum(PowerLaw{1288.0, 0.89});
}

TEST_SUITE("coherence") {

TEST_CASE("quadrature agrees with the pairwise closed form") {
  // independent oracle: exact pairwise Gamma-function form, valid alpha < 1
  for (int n : {0, 1, 2, 3, 5, 8, 10}) {
    for (double alpha : {0.3, 0.89}) {
      const auto seq = make_cpmg(n, 0.1);
      const auto result = chi_numeric(NoiseSpectrum(PowerLaw{500.0, alpha}), seq);
      const double expected = oracle::pairwise_chi(500.0, alpha, seq);
      CHECK(result.chi == doctest::Approx(expected).epsilon(1e-6));
      CHECK(result.quadrature_error_estimate <= 1e-6 * std::max(result.chi, 1.0));
      CHECK(result.visibility == doctest::Approx(std::exp(-result.chi)));
    }
  }
  // uhrig and custom sequences go through the exact-sum filter path
  const auto useq = make_uhrig(5, 0.1);
  const auto uresult = chi_numeric(NoiseSpectrum(PowerLaw{500.0, 0.89}), useq);
  CHECK(uresult.chi == doctest::Approx(oracle::pairwise_chi(500.0, 0.89, useq)).epsilon(1e-6));
}

TEST_CASE("chi vanishes as T^2-like power for short sequences") {
  const auto r = chi_numeric(kReferenceSpectrum, make_cpmg(4, 1e-7));
  CHECK(r.chi < 1e-9);
  CHECK(r.visibility == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("integrability validation names the divergent endpoint") {
  SUBCASE("N = 0 needs alpha < 1") {
    CHECK_THROWS_AS(chi_numeric(NoiseSpectrum(PowerLaw{1.0, 1.0}), make_ramsey(0.01)),
                    std::domain_error);
    CHECK_THROWS_WITH_AS(chi_numeric(NoiseSpectrum(PowerLaw{1.0, 1.2}), make_ramsey(0.01)),
                         doctest::Contains("omega -> 0"), std::domain_error);
  }
  SUBCASE("N >= 1 needs alpha < 3") {
    CHECK_THROWS_AS(chi_numeric(NoiseSpectrum(PowerLaw{1.0, 3.0}), make_cpmg(2, 0.01)),
                    std::domain_error);
    CHECK_NOTHROW(chi_numeric(NoiseSpectrum(PowerLaw{1.0, 1.2}), make_cpmg(2, 0.01)));
  }
  SUBCASE("an explicit infrared cutoff lifts the restriction") {
    ChiOptions opt;
    opt.omega_min = 10.0;
    CHECK_NOTHROW(chi_numeric(NoiseSpectrum(PowerLaw{1.0, 1.2}), make_ramsey(0.01), opt));
  }
}

TEST_CASE("infrared cutoff reduces chi monotonically") {
  const auto seq = make_ramsey(0.01);
  const NoiseSpectrum s(PowerLaw{1288.0, 0.89});
  const double full = chi_numeric(s, seq).chi;
  ChiOptions opt;
  opt.omega_min = 2.0 * M_PI / (20.0 * 0.01);
  const double cut = chi_numeric(s, seq, opt).chi;
  CHECK(cut < full);
  CHECK(cut > 0.0);
}

TEST_CASE("white-noise coherence is S_WN T / 2 for any sequence") {
  // Parseval: int_0^inf g(u) du = pi independent of the pulse pattern
  const NoiseSpectrum white(PowerLawPlusWhite{0.0, 1.0, 3.0});
  for (int n : {0, 1, 4}) {
    const auto r = chi_numeric(white, make_cpmg(n, 0.2));
    CHECK(r.chi == doctest::Approx(3.0 * 0.2 / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("reference coherence times from quadrature") {
  SUBCASE("N = 0") {
    const double tau = tau_c_numeric(kReferenceSpectrum, 0, {1e-4, 1.0});
    CHECK(tau == doctest::Approx(oracle::kTauCExact[0].tau_c).epsilon(2e-5));
    CHECK(std::abs(tau - 16.2e-3) / 16.2e-3 < 0.15);
  }
  SUBCASE("N = 10") {
    const double tau = tau_c_numeric(kReferenceSpectrum, 10, {1e-3, 1.0});
    CHECK(tau == doctest::Approx(oracle::kTauCExact[6].tau_c).epsilon(2e-5));
    CHECK(std::abs(tau - 178e-3) / 178e-3 < 0.05);
  }
}

TEST_CASE("chi is nondecreasing in T for power-law spectra") {
  for (int n = 0; n <= 10; ++n) {
    double prev = 0.0;
    for (double T = 0.01; T <= 0.41; T += 0.08) {
      const double chi = chi_numeric(kReferenceSpectrum, make_cpmg(n, T)).chi;
      CHECK(chi >= prev);
      prev = chi;
    }
  }
}

TEST_CASE("more pulses decouple better at fixed T") {
  const double T = 0.1;
  double prev = chi_numeric(kReferenceSpectrum, make_cpmg(1, T)).chi;
  for (int n : {2, 4, 8}) {
    const double chi = chi_numeric(kReferenceSpectrum, make_cpmg(n, T)).chi;
    CHECK(chi < prev);
    prev = chi;
  }
}

TEST_CASE("visibility stays in (0, 1]") {
  for (int n : {0, 2, 8}) {
    for (double T : {1e-4, 0.05, 0.5}) {
      const auto r = chi_numeric(kReferenceSpectrum, make_cpmg(n, T));
      CHECK(r.visibility > 0.0);
      CHECK(r.visibility <= 1.0);
    }
  }
}

TEST_CASE("analytic coherence-time law") {
  SUBCASE("chi at T = tau_c is one") {
    CHECK(chi_analytic_cpmg(1288.0, 0.89, 10, tau_c_analytic(1288.0, 0.89, 10)) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("decay exponent is 1 + alpha") {
    // chi(kT)/chi(T) = k^{1+alpha}
    const double ratio = chi_analytic_cpmg(1288.0, 0.89, 4, 0.2) /
                         chi_analytic_cpmg(1288.0, 0.89, 4, 0.1);
    CHECK(ratio == doctest::Approx(std::pow(2.0, 1.89)).epsilon(1e-12));
  }
  SUBCASE("N = 10 at T = 178 ms sits near chi = 1") {
    CHECK(chi_analytic_cpmg(1288.0, 0.89, 10, 0.178) == doctest::Approx(1.0).epsilon(0.05));
  }
}

TEST_CASE("tau_1 closed form") {
  SUBCASE("reference parameters") {
    CHECK(tau1_analytic(1288.0, 0.89) == doctest::Approx(oracle::kTau1Reference).epsilon(1e-9));
    CHECK(tau1_analytic(1288.0, 0.89) == doctest::Approx(0.06).epsilon(0.02));
  }
  SUBCASE("amplitude scaling tau1(c S0) = c^(-1/(1+alpha)) tau1(S0)") {
    for (double c : {0.5, 2.0, 17.0}) {
      CHECK(tau1_analytic(c * 7.0, 0.6) ==
            doctest::Approx(std::pow(c, -1.0 / 1.6) * tau1_analytic(7.0, 0.6)).epsilon(1e-12));
    }
  }
  SUBCASE("alpha = 2, S0 = 1 evaluates to 24^(1/3)") {
    CHECK(std::abs(tau1_analytic(1.0, 2.0) - std::cbrt(24.0)) < 1e-8);
  }
}

TEST_CASE("tau_c_analytic grows as N^(alpha/(1+alpha))") {
  CHECK(tau_c_analytic(1288.0, 0.89, 1) == doctest::Approx(tau1_analytic(1288.0, 0.89)));
  CHECK(tau_c_analytic(1288.0, 0.89, 10) ==
        doctest::Approx(oracle::kTauCAnalytic10).epsilon(1e-9));
  std::vector<double> ns, taus;
  for (int n = 1; n <= 10; ++n) {
    ns.push_back(n);
    taus.push_back(tau_c_analytic(1288.0, 0.89, n));
  }
  CHECK(oracle::loglog_slope(ns, taus) == doctest::Approx(0.89 / 1.89).epsilon(1e-10));
  double prev = 0.0;
  for (double t : taus) {
    CHECK(t > prev);
    prev = t;
  }
}

TEST_CASE("root finder") {
  SUBCASE("returns the analytic root exactly on its own surrogate") {
    const double tau = 0.123;
    auto chi_fn = [&](double T) { return std::pow(T / tau, 1.89); };
    CHECK(solve_chi_equals_one(chi_fn, 1e-3, 1.0, 1e-10) ==
          doctest::Approx(tau).epsilon(1e-9));
  }
  SUBCASE("bracket must straddle") {
    auto chi_fn = [](double T) { return T; };  // chi < 1 on the whole bracket
    CHECK_THROWS_AS(solve_chi_equals_one(chi_fn, 1e-3, 0.5), bracket_error);
  }
}

TEST_CASE("numeric and analytic coherence times converge with N") {
  const double gap2 = std::abs(tau_c_numeric(kReferenceSpectrum, 2, {1e-3, 1.0}) -
                               tau_c_analytic(1288.0, 0.89, 2)) /
                      tau_c_numeric(kReferenceSpectrum, 2, {1e-3, 1.0});
  const double gap10 = std::abs(tau_c_numeric(kReferenceSpectrum, 10, {1e-3, 1.0}) -
                                tau_c_analytic(1288.0, 0.89, 10)) /
                       tau_c_numeric(kReferenceSpectrum, 10, {1e-3, 1.0});
  CHECK(gap10 < gap2);
  CHECK(gap10 < 0.05);
}

TEST_CASE("dip times") {
  const double omega0 = 2.0 * M_PI * 100.0;
  const auto dips = dip_times(omega0, 8, 2);
  REQUIRE(dips.size() == 3);
  CHECK(dips[1] == doctest::Approx(0.120).epsilon(1e-12));
  CHECK(dips[2] == doctest::Approx(0.200).epsilon(1e-12));
  CHECK(dips[2] / dips[1] == doctest::Approx(5.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(dip_times(-1.0, 8, 2), std::invalid_argument);
  CHECK_THROWS_AS(dip_times(omega0, 0, 2), std::invalid_argument);
}

TEST_CASE("resonance dips appear where the filter peak crosses omega0") {
  // narrow resonance, Delta omega / omega0 = 0.02: local maxima of chi over T
  // must sit within 2% of the predicted dip times
  const double omega0 = 2.0 * M_PI * 100.0;
  const NoiseSpectrum res(GaussianResonance{50.0, omega0, 0.02 * omega0});
  auto chi_at = [&](double T) { return chi_numeric(res, make_cpmg(8, T)).chi; };
  for (double t_dip : {0.120, 0.200}) {
    double best_t = 0.0;
    double best_chi = -1.0;
    for (double T = 0.9 * t_dip; T <= 1.1 * t_dip; T += t_dip / 400.0) {
      const double chi = chi_at(T);
      if (chi > best_chi) {
        best_chi = chi;
        best_t = T;
      }
    }
    CHECK(std::abs(best_t - t_dip) / t_dip < 0.02);
  }
}

TEST_CASE("error estimate brackets the actual tolerance gap") {
  // tightening rel_tol must move chi by less than the looser error estimate
  for (int n : {0, 4}) {
    const auto seq = make_cpmg(n, 0.12);
    ChiOptions loose;
    loose.rel_tol = 1e-6;
    ChiOptions tight;
    tight.rel_tol = 1e-9;
    const auto a = chi_numeric(kReferenceSpectrum, seq, loose);
    const auto b = chi_numeric(kReferenceSpectrum, seq, tight);
    CHECK(std::abs(a.chi - b.chi) <= 3.0 * a.quadrature_error_estimate);
    CHECK(b.quadrature_error_estimate < a.quadrature_error_estimate);
  }
}

TEST_CASE("chi is additive over spectrum components") {
  const auto seq = make_cpmg(8, 0.12);
  const NoiseSpectrum pl(PowerLaw{500.0, 0.89});
  const NoiseSpectrum res(GaussianResonance{30.0, 628.3, 12.6});
  SpectrumSum sum;
  sum.components = {pl, res};
  const double combined = chi_numeric(NoiseSpectrum(std::move(sum)), seq).chi;
  const double parts = chi_numeric(pl, seq).chi + chi_numeric(res, seq).chi;
  CHECK(combined == doctest::Approx(parts).epsilon(1e-9));
}

TEST_CASE("tabulated spectrum reproduces the power law it samples") {
  Tabulated tab;
  for (double w = 1e-3; w <= 1e7; w *= 2.0) {
    tab.omega.push_back(w);
    tab.value.push_back(1288.0 * std::pow(w, -0.89));
  }
  const auto seq = make_cpmg(4, 0.1);
  const double chi_tab = chi_numeric(NoiseSpectrum(std::move(tab)), seq).chi;
  const double chi_pl = chi_numeric(kReferenceSpectrum, seq).chi;
  CHECK(chi_tab == doctest::Approx(chi_pl).epsilon(1e-5));
}

TEST_CASE("power-law chi model matches chi_numeric and caches shapes") {
  PowerLawChiModel model(1e-7);
  for (int n : {0, 1, 6}) {
    const double direct = chi_numeric(kReferenceSpectrum, make_cpmg(n, 0.07)).chi;
    CHECK(model.chi(1288.0, 0.89, n, 0.07) == doctest::Approx(direct).epsilon(1e-9));
  }
  // T-scaling comes for free from the cached shape integral
  const double c1 = model.chi(1288.0, 0.89, 4, 0.05);
  const double c2 = model.chi(1288.0, 0.89, 4, 0.10);
  CHECK(c2 / c1 == doctest::Approx(std::pow(2.0, 1.89)).epsilon(1e-12));
  CHECK_THROWS_AS(model.shape_integral(1.2, 0), std::domain_error);
}

}  // TEST_SUITE
