#include "ddscope/fit_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "ddscope/errors.hpp"

namespace ddscope {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd weights_or_ones(const DataSeries& data) {
  const std::size_t n = data.x.size();
  if (data.y.size() != n) throw std::invalid_argument("DataSeries: x/y size mismatch");
  Eigen::VectorXd w(n);
  if (data.sigma.empty()) {
    w.setOnes();
  } else {
    if (data.sigma.size() != n) throw std::invalid_argument("DataSeries: sigma size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      if (!(data.sigma[i] > 0.0)) throw std::invalid_argument("DataSeries: sigma must be > 0");
      w[static_cast<Eigen::Index>(i)] = 1.0 / data.sigma[i];
    }
  }
  return w;
}

}  // namespace

double mw_spectrum_model(double detuning_hz, double amplitude, double offset,
                         double detuning_res_hz, double omega_r, double tau) {
  const double d = detuning_hz - detuning_res_hz;
  const double omega_sq = 4.0 * M_PI * M_PI * d * d + omega_r * omega_r;
  const double omega = std::sqrt(omega_sq);
  const double s = std::sin(0.5 * omega * tau);
  return amplitude * (omega_r * omega_r / omega_sq) * s * s + offset;
}

FitResult fit_mw_spectrum(const DataSeries& data, double omega_r, double tau) {
  if (data.x.size() < 3) {
    throw std::invalid_argument("fit_mw_spectrum: need at least as many points as parameters");
  }
  const Eigen::VectorXd w = weights_or_ones(data);
  const auto [min_it, max_it] = std::minmax_element(data.y.begin(), data.y.end());
  const double transfer = std::pow(std::sin(0.5 * omega_r * tau), 2);
  Eigen::VectorXd init(3);
  init << (*max_it - *min_it) / std::max(transfer, 0.1), *min_it,
      data.x[static_cast<std::size_t>(std::max_element(data.y.begin(), data.y.end()) -
                                      data.y.begin())];
  auto residuals = [&, w](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(data.x.size()));
    for (std::size_t i = 0; i < data.x.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      r[k] = (mw_spectrum_model(data.x[i], p[0], p[1], p[2], omega_r, tau) - data.y[i]) * w[k];
    }
    return r;
  };
  return lm_least_squares(residuals, init, {"A", "C", "dnu_res_hz"});
}

double ramsey_population_model(double total_time, double amplitude, double offset,
                               double detuning_hz, double tau_c) {
  const double envelope = std::exp(-std::pow(total_time / tau_c, 2));
  return 0.5 * amplitude *
             (1.0 - std::cos(2.0 * M_PI * std::abs(detuning_hz) * total_time) * envelope) +
         offset;
}

FitResult fit_ramsey_population(const DataSeries& data, std::optional<Eigen::Vector4d> init) {
  if (data.x.size() < 5) throw std::invalid_argument("fit_ramsey_population: too few points");
  const Eigen::VectorXd w = weights_or_ones(data);
  Eigen::VectorXd p0(4);
  if (init) {
    p0 = *init;
  } else {
    const auto [min_it, max_it] = std::minmax_element(data.y.begin(), data.y.end());
    const double span = *std::max_element(data.x.begin(), data.x.end());
    // crude frequency seed from the mean crossing count
    const double mid = 0.5 * (*min_it + *max_it);
    int crossings = 0;
    for (std::size_t i = 1; i < data.y.size(); ++i) {
      if ((data.y[i] - mid) * (data.y[i - 1] - mid) < 0.0) ++crossings;
    }
    const double freq = std::max(0.5 * crossings / span, 1.0 / span);
    p0 << (*max_it - *min_it), *min_it, freq, 0.5 * span;
  }
  auto residuals = [&, w](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(data.x.size()));
    for (std::size_t i = 0; i < data.x.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      r[k] = (ramsey_population_model(data.x[i], p[0], p[1], p[2], p[3]) - data.y[i]) * w[k];
    }
    return r;
  };
  Eigen::VectorXd lo(4), hi(4);
  lo << -kInf, -kInf, 0.0, 1e-12;
  hi << kInf, kInf, kInf, kInf;
  return lm_least_squares(residuals, p0, lo, hi, {"A", "C", "dnu_hz", "tau_c_s"});
}

double fringe_model(double phase_deg, double amplitude, double offset, double phi_deg) {
  const double s = std::sin(M_PI / 360.0 * (phi_deg - phase_deg));
  return amplitude * s * s + offset;
}

FringeFitResult fit_fringe(const std::vector<FringePoint>& points) {
  if (points.size() < 5) throw std::invalid_argument("fit_fringe: need >= 5 points");
  double lo_ph = points.front().phase_deg, hi_ph = lo_ph;
  for (const auto& pt : points) {
    lo_ph = std::min(lo_ph, pt.phase_deg);
    hi_ph = std::max(hi_ph, pt.phase_deg);
    if (!(pt.sigma > 0.0)) throw std::invalid_argument("fit_fringe: sigma must be > 0");
  }
  if (hi_ph - lo_ph < 180.0) {
    throw std::invalid_argument("fit_fringe: phase scan must span >= 180 degrees");
  }

  auto minmax = std::minmax_element(points.begin(), points.end(),
                                    [](const FringePoint& a, const FringePoint& b) {
                                      return a.population < b.population;
                                    });
  Eigen::VectorXd init(3);
  init << std::max(minmax.second->population - minmax.first->population, 0.0),
      std::max(minmax.first->population, 0.0),
      // population peaks where the squared sine reaches one
      minmax.second->phase_deg + 180.0;
  auto residuals = [&points](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& pt = points[i];
      r[static_cast<Eigen::Index>(i)] =
          (fringe_model(pt.phase_deg, p[0], p[1], p[2]) - pt.population) / pt.sigma;
    }
    return r;
  };
  Eigen::VectorXd lo(3), hi(3);
  lo << 0.0, 0.0, -kInf;
  hi << kInf, kInf, kInf;

  FringeFitResult out;
  try {
    out.fit = lm_least_squares(residuals, init, lo, hi, {"a", "c", "phi_deg"});
  } catch (const degenerate_fit_error&) {
    out.degenerate = true;
    out.fit.names = {"a", "c", "phi_deg"};
    out.fit.params = init;
    out.fit.covariance = Eigen::MatrixXd::Zero(3, 3);
    out.fit.converged = false;
    out.visibility = 0.0;
    out.sigma_v = 0.0;
    return out;
  }

  // wrap the fitted phase into (-180, 180]
  double phi = out.fit.params[2];
  phi = phi - 360.0 * std::floor((phi + 180.0) / 360.0);
  if (phi <= -180.0) phi += 360.0;
  out.fit.params[2] = phi;

  const double a = out.fit.params[0];
  const double c = out.fit.params[1];
  const double denom = a + 2.0 * c;
  if (!(denom > 0.0)) {
    out.degenerate = true;
    out.visibility = 0.0;
    out.sigma_v = 0.0;
    return out;
  }
  out.visibility = a / denom;
  // V = a/(a+2c): dV/da = 2c/(a+2c)^2, dV/dc = -2a/(a+2c)^2
  Eigen::Vector3d grad(2.0 * c / (denom * denom), -2.0 * a / (denom * denom), 0.0);
  const double var = grad.transpose() * out.fit.covariance * grad;
  out.sigma_v = var > 0.0 ? std::sqrt(var) : 0.0;
  return out;
}

VisibilityDataset normalize_fringes(const VisibilityDataset& raw) {
  if (!(raw.n_cs0 > 0.0) || !(raw.lifetime_tau > 0.0)) {
    throw std::invalid_argument(
        "normalize_fringes: requires calibration fields n_cs0 > 0 and lifetime_tau > 0");
  }
  VisibilityDataset out = raw;
  for (auto& scan : out.fringes) {
    const double divisor = raw.n_cs0 * std::exp(-scan.total_time / raw.lifetime_tau);
    for (auto& pt : scan.points) {
      pt.population /= divisor;
      pt.sigma /= divisor;
    }
  }
  return out;
}

FitResult fit_lifetime(const DataSeries& data) {
  if (data.x.size() < 2) throw std::invalid_argument("fit_lifetime: need >= 2 points");
  const Eigen::VectorXd w = weights_or_ones(data);
  const double span = *std::max_element(data.x.begin(), data.x.end());
  const double tau_cap = 100.0 * std::max(span, 1e-12);

  // log-linear seed; falls back to the cap for flat or rising data
  double tau0 = tau_cap;
  {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < data.x.size(); ++i) {
      if (data.y[i] <= 0.0) continue;
      const double ly = std::log(data.y[i]);
      sx += data.x[i];
      sy += ly;
      sxx += data.x[i] * data.x[i];
      sxy += data.x[i] * ly;
      ++n_pos;
    }
    if (n_pos >= 2) {
      const double denom = n_pos * sxx - sx * sx;
      if (denom > 0.0) {
        const double slope = (n_pos * sxy - sx * sy) / denom;
        if (slope < -1e-12) tau0 = std::min(-1.0 / slope, tau_cap);
      }
    }
  }
  Eigen::VectorXd init(2);
  init << std::max(data.y.front(), 1e-12), tau0;
  auto residuals = [&, w](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(data.x.size()));
    for (std::size_t i = 0; i < data.x.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      r[k] = (p[0] * std::exp(-data.x[i] / p[1]) - data.y[i]) * w[k];
    }
    return r;
  };
  Eigen::VectorXd lo(2), hi(2);
  lo << 0.0, 1e-12;
  hi << kInf, tau_cap;
  FitResult result = lm_least_squares(residuals, init, lo, hi, {"N0", "tau_lt_s"});
  if (result.params[1] >= 0.999 * tau_cap) result.converged = false;
  return result;
}

GlobalVisibilityFit global_visibility_fit(const std::vector<VisibilityDataset>& datasets,
                                          const GlobalVisibilityInit& init,
                                          double quad_rel_tol) {
  if (datasets.empty()) throw std::invalid_argument("global_visibility_fit: no datasets");
  bool has_ramsey = false;
  for (const auto& ds : datasets) {
    if (ds.visibilities.size() < 3) {
      throw std::invalid_argument(
          "global_visibility_fit: every dataset needs >= 3 visibility points (N = " +
          std::to_string(ds.n_pulses) + " has " + std::to_string(ds.visibilities.size()) + ")");
    }
    if (ds.n_pulses == 0) has_ramsey = true;
  }

  const std::size_t n_ds = datasets.size();
  const Eigen::Index n_par = 2 + 2 * static_cast<Eigen::Index>(n_ds);
  Eigen::VectorXd p0(n_par), lo(n_par), hi(n_par);
  std::vector<std::string> names(static_cast<std::size_t>(n_par));
  names[0] = "S0";
  names[1] = "alpha";
  // an N = 0 dataset caps alpha below one, where its coherence integral
  // stays infrared-convergent
  const double alpha_hi = has_ramsey ? 0.999 : 2.999;
  lo[0] = 1e-12;
  hi[0] = kInf;
  lo[1] = 0.02;
  hi[1] = alpha_hi;

  std::vector<int> n_pulses(n_ds);
  for (std::size_t i = 0; i < n_ds; ++i) {
    const auto& vis = datasets[i].visibilities;
    n_pulses[i] = datasets[i].n_pulses;
    const auto k = 2 + 2 * static_cast<Eigen::Index>(i);
    names[static_cast<std::size_t>(k)] = "V0[" + std::to_string(datasets[i].n_pulses) + "]";
    names[static_cast<std::size_t>(k) + 1] = "b[" + std::to_string(datasets[i].n_pulses) + "]";
    p0[k] = std::clamp(vis.front().visibility, 0.1, 1.5);
    p0[k + 1] = std::clamp(vis.back().visibility, -0.4, 0.4);
    lo[k] = 0.0;
    hi[k] = 2.0;
    lo[k + 1] = -0.5;
    hi[k + 1] = 0.5;
  }

  auto model = std::make_shared<PowerLawChiModel>(quad_rel_tol);
  const double alpha0 = std::clamp(init.alpha, 0.05, alpha_hi);
  double s0_init = init.s0;
  if (!(s0_init > 0.0)) {
    // match the earliest visibility point of the largest-N dataset
    std::size_t pick = 0;
    for (std::size_t i = 1; i < n_ds; ++i) {
      if (datasets[i].n_pulses > datasets[pick].n_pulses) pick = i;
    }
    const auto& vis = datasets[pick].visibilities;
    const auto k = 2 + 2 * static_cast<Eigen::Index>(pick);
    const double v_rel =
        std::clamp((vis.front().visibility - p0[k + 1]) / std::max(p0[k], 1e-6), 0.02, 0.98);
    const double chi_target = -std::log(v_rel);
    const double shape = model->shape_integral(alpha0, datasets[pick].n_pulses);
    s0_init = 2.0 * M_PI * std::max(chi_target, 1e-3) /
              (std::pow(vis.front().total_time, 1.0 + alpha0) * shape);
    if (!(s0_init > 0.0) || !std::isfinite(s0_init)) s0_init = 1.0;
  }
  p0[0] = s0_init;
  p0[1] = alpha0;

  auto residuals = [datasets, n_pulses, model](const Eigen::VectorXd& p) {
    Eigen::Index total = 0;
    for (const auto& ds : datasets) total += static_cast<Eigen::Index>(ds.visibilities.size());
    Eigen::VectorXd r(total);
    Eigen::Index k = 0;
    for (std::size_t i = 0; i < datasets.size(); ++i) {
      const double v0 = p[2 + 2 * static_cast<Eigen::Index>(i)];
      const double b = p[3 + 2 * static_cast<Eigen::Index>(i)];
      for (const auto& pt : datasets[i].visibilities) {
        const double chi = model->chi(p[0], p[1], n_pulses[i], pt.total_time);
        const double v = v0 * std::exp(-chi) + b;
        const double sigma = pt.sigma > 0.0 ? pt.sigma : 1.0;
        r[k++] = (v - pt.visibility) / sigma;
      }
    }
    return r;
  };

  GlobalVisibilityFit out;
  out.fit = lm_least_squares(residuals, p0, lo, hi, names);
  out.s0 = out.fit.params[0];
  out.alpha = out.fit.params[1];
  out.n_pulses = std::move(n_pulses);
  return out;
}

FitResult fit_psd_powerlaw_white(const std::vector<double>& omega,
                                 const std::vector<double>& psd) {
  if (omega.size() != psd.size() || omega.size() < 8) {
    throw std::invalid_argument("fit_psd_powerlaw_white: need matching arrays with >= 8 bins");
  }
  // log-spaced rebinning over the positive-frequency bins
  std::vector<double> wpos, vpos;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (omega[i] > 0.0) {
      if (!(psd[i] > 0.0)) {
        throw std::invalid_argument("fit_psd_powerlaw_white: PSD values must be > 0");
      }
      wpos.push_back(omega[i]);
      vpos.push_back(psd[i]);
    }
  }
  if (wpos.size() < 8) throw std::invalid_argument("fit_psd_powerlaw_white: too few bins");
  constexpr int kBinsPerDecade = 16;
  const double w_lo = wpos.front();
  const double w_hi = wpos.back();
  const double step = std::pow(10.0, 1.0 / kBinsPerDecade);
  std::vector<double> bw, bv;
  std::size_t i = 0;
  for (double edge = w_lo; edge < w_hi * (1.0 + 1e-12) && i < wpos.size(); edge *= step) {
    const double next = edge * step;
    double sum_logw = 0.0, sum_v = 0.0;
    std::size_t count = 0;
    while (i < wpos.size() && wpos[i] < next) {
      sum_logw += std::log(wpos[i]);
      sum_v += vpos[i];
      ++count;
      ++i;
    }
    if (count > 0) {
      bw.push_back(std::exp(sum_logw / static_cast<double>(count)));
      bv.push_back(sum_v / static_cast<double>(count));
    }
  }
  if (bv.size() < 4) throw std::invalid_argument("fit_psd_powerlaw_white: spectrum too narrow");

  // seeds: white level from the top decade floor, slope from the low decades
  const double s_wn0 = *std::min_element(bv.end() - std::max<std::size_t>(bv.size() / 4, 1),
                                         bv.end());
  const std::size_t q = std::max<std::size_t>(bv.size() / 3, 1);
  double alpha0 = std::log(bv.front() / bv[q]) / std::log(bw[q] / bw.front());
  alpha0 = std::clamp(alpha0, 0.1, 2.5);
  double s_pln0 = std::max((bv.front() - s_wn0), bv.front() * 0.1) * std::pow(bw.front(), alpha0);

  Eigen::VectorXd p0(3), lo(3), hi(3);
  p0 << s_pln0, alpha0, std::max(s_wn0 * 0.5, 1e-30);
  lo << 1e-30, 0.01, 0.0;
  hi << kInf, 3.0, kInf;
  auto residuals = [bw, bv](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(bw.size()));
    for (std::size_t k = 0; k < bw.size(); ++k) {
      const double m = p[0] * std::pow(bw[k], -p[1]) + p[2];
      r[static_cast<Eigen::Index>(k)] = std::log(std::max(m, 1e-300)) - std::log(bv[k]);
    }
    return r;
  };
  return lm_least_squares(residuals, p0, lo, hi, {"S_PLN", "alpha_tilde", "S_WN"});
}

double bfield_spectrum_model(double b_coil_mg, double amplitude, double offset,
                             double b_res_mg, double omega_r, double tau) {
  // 0.7 MHz/G = 700 Hz/mG
  const double delta = 2.0 * M_PI * (b_coil_mg - b_res_mg) * 700.0;
  const double omega_sq = delta * delta + omega_r * omega_r;
  const double s = std::sin(0.5 * std::sqrt(omega_sq) * tau);
  return amplitude * (omega_r * omega_r / omega_sq) * s * s + offset;
}

FitResult fit_bfield_spectrum(const DataSeries& data, double omega_r, double tau) {
  if (data.x.size() < 3) throw std::invalid_argument("fit_bfield_spectrum: too few points");
  const Eigen::VectorXd w = weights_or_ones(data);
  const auto [min_it, max_it] = std::minmax_element(data.y.begin(), data.y.end());
  Eigen::VectorXd init(3);
  init << (*max_it - *min_it), *min_it,
      data.x[static_cast<std::size_t>(std::max_element(data.y.begin(), data.y.end()) -
                                      data.y.begin())];
  auto residuals = [&, w](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(data.x.size()));
    for (std::size_t i = 0; i < data.x.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      r[k] = (bfield_spectrum_model(data.x[i], p[0], p[1], p[2], omega_r, tau) - data.y[i]) * w[k];
    }
    return r;
  };
  return lm_least_squares(residuals, init, {"A", "C", "B_res_mG"});
}

}  // namespace ddscope
