#include "ddscope/noise_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ddscope/errors.hpp"
#include "ddscope/quadrature.hpp"

namespace ddscope {
namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Piecewise power-law segment integral of S/omega^2 over [a, b], with
// S(w) = s_ref (w/w_ref)^p.
double powerlaw_tail_segment(double s_ref, double w_ref, double p, double a, double b) {
  // int w^{p-2} dw = w^{p-1}/(p-1), or log for p == 1
  const double scale = s_ref * std::pow(w_ref, -p);
  if (std::abs(p - 1.0) < 1e-12) return scale * std::log(b / a);
  return scale * (std::pow(b, p - 1.0) - std::pow(a, p - 1.0)) / (p - 1.0);
}

}  // namespace

NoiseSpectrum::NoiseSpectrum(PowerLaw p) : node_(p) {
  require(p.s0 > 0.0 && std::isfinite(p.s0), "PowerLaw: S0 must be > 0");
  require(p.alpha > 0.0 && std::isfinite(p.alpha), "PowerLaw: alpha must be > 0");
}

NoiseSpectrum::NoiseSpectrum(PowerLawPlusWhite p) : node_(p) {
  require(p.s_pln >= 0.0 && std::isfinite(p.s_pln), "PowerLawPlusWhite: S_PLN must be >= 0");
  require(p.s_wn >= 0.0 && std::isfinite(p.s_wn), "PowerLawPlusWhite: S_WN must be >= 0");
  if (p.s_pln > 0.0) {
    require(p.alpha_tilde > 0.0, "PowerLawPlusWhite: alpha_tilde must be > 0");
  }
}

NoiseSpectrum::NoiseSpectrum(GaussianResonance p) : node_(p) {
  require(p.s1 > 0.0 && std::isfinite(p.s1), "GaussianResonance: S1 must be > 0");
  require(p.omega0 > 0.0, "GaussianResonance: omega0 must be > 0");
  require(p.delta_omega > 0.0, "GaussianResonance: delta_omega must be > 0");
}

NoiseSpectrum::NoiseSpectrum(Tabulated p) : node_(std::move(p)) {
  const auto& t = std::get<Tabulated>(node_);
  require(t.omega.size() == t.value.size() && t.omega.size() >= 2,
          "Tabulated: need matching omega/value arrays with >= 2 samples");
  double prev = 0.0;
  for (double w : t.omega) {
    require(w > prev, "Tabulated: omega grid must be positive and ascending");
    prev = w;
  }
  for (double v : t.value) {
    require(v > 0.0, "Tabulated: values must be > 0 for log-log interpolation");
  }
}

NoiseSpectrum::NoiseSpectrum(SpectrumSum p) : node_(std::move(p)) {
  require(!std::get<SpectrumSum>(node_).components.empty(),
          "SpectrumSum: needs at least one component");
}

double NoiseSpectrum::operator()(double omega) const {
  return std::visit(
      [omega](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PowerLaw>) {
          return s.s0 / std::pow(std::abs(omega), s.alpha);
        } else if constexpr (std::is_same_v<T, PowerLawPlusWhite>) {
          double v = s.s_wn;
          if (s.s_pln > 0.0) v += s.s_pln / std::pow(omega, s.alpha_tilde);
          return v;
        } else if constexpr (std::is_same_v<T, GaussianResonance>) {
          const double d = (omega - s.omega0) / s.delta_omega;
          return s.s1 * std::exp(-0.5 * d * d);
        } else if constexpr (std::is_same_v<T, Tabulated>) {
          const auto& w = s.omega;
          const auto& v = s.value;
          std::size_t hi = std::lower_bound(w.begin(), w.end(), omega) - w.begin();
          if (hi == 0) hi = 1;
          if (hi == w.size()) hi = w.size() - 1;
          const std::size_t lo = hi - 1;
          const double p = std::log(v[hi] / v[lo]) / std::log(w[hi] / w[lo]);
          return v[lo] * std::pow(omega / w[lo], p);
        } else {
          double sum = 0.0;
          for (const auto& c : s.components) sum += c(omega);
          return sum;
        }
      },
      node_);
}

double NoiseSpectrum::infrared_exponent() const {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PowerLaw>) {
          return -s.alpha;
        } else if constexpr (std::is_same_v<T, PowerLawPlusWhite>) {
          return s.s_pln > 0.0 ? -s.alpha_tilde : 0.0;
        } else if constexpr (std::is_same_v<T, GaussianResonance>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, Tabulated>) {
          return std::log(s.value[1] / s.value[0]) / std::log(s.omega[1] / s.omega[0]);
        } else {
          double p = 0.0;
          for (const auto& c : s.components) p = std::min(p, c.infrared_exponent());
          return p;
        }
      },
      node_);
}

double NoiseSpectrum::tail_integral_over_omega2(double omega_s) const {
  require(omega_s > 0.0, "tail_integral_over_omega2: omega_s must be > 0");
  return std::visit(
      [omega_s, this](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PowerLaw>) {
          return s.s0 * std::pow(omega_s, -1.0 - s.alpha) / (1.0 + s.alpha);
        } else if constexpr (std::is_same_v<T, PowerLawPlusWhite>) {
          double v = s.s_wn / omega_s;
          if (s.s_pln > 0.0) {
            v += s.s_pln * std::pow(omega_s, -1.0 - s.alpha_tilde) / (1.0 + s.alpha_tilde);
          }
          return v;
        } else if constexpr (std::is_same_v<T, GaussianResonance>) {
          const double hi = s.omega0 + 10.0 * s.delta_omega;
          if (omega_s >= hi) return (*this)(omega_s) / omega_s;  // exponentially small
          auto r = integrate_adaptive(
              [&](double w) { return (*this)(w) / (w * w); },
              {omega_s, std::max(omega_s, s.omega0), hi}, 0.0, 1e-10);
          return r.value;
        } else if constexpr (std::is_same_v<T, Tabulated>) {
          const auto& w = s.omega;
          const auto& v = s.value;
          const std::size_t n = w.size();
          double total = 0.0;
          // extrapolated low side, interior segments, extrapolated high tail
          const double p_lo = std::log(v[1] / v[0]) / std::log(w[1] / w[0]);
          const double p_hi = std::log(v[n - 1] / v[n - 2]) / std::log(w[n - 1] / w[n - 2]);
          if (omega_s < w[0]) {
            total += powerlaw_tail_segment(v[0], w[0], p_lo, omega_s, w[0]);
          }
          for (std::size_t i = 0; i + 1 < n; ++i) {
            const double a = std::max(omega_s, w[i]);
            const double b = w[i + 1];
            if (b <= a) continue;
            const double p = std::log(v[i + 1] / v[i]) / std::log(w[i + 1] / w[i]);
            total += powerlaw_tail_segment(v[i], w[i], p, a, b);
          }
          if (p_hi >= 1.0) {
            throw std::domain_error(
                "Tabulated spectrum: high-frequency slope >= +1, tail integral diverges");
          }
          const double a = std::max(omega_s, w[n - 1]);
          total += v[n - 1] * std::pow(w[n - 1], -p_hi) * std::pow(a, p_hi - 1.0) / (1.0 - p_hi);
          return total;
        } else {
          double sum = 0.0;
          for (const auto& c : s.components) sum += c.tail_integral_over_omega2(omega_s);
          return sum;
        }
      },
      node_);
}

std::vector<double> NoiseSpectrum::feature_breakpoints() const {
  std::vector<double> pts;
  std::visit(
      [&pts](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, GaussianResonance>) {
          for (double k : {-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0}) {
            const double w = s.omega0 + k * s.delta_omega;
            if (w > 0.0) pts.push_back(w);
          }
        } else if constexpr (std::is_same_v<T, SpectrumSum>) {
          for (const auto& c : s.components) {
            auto sub = c.feature_breakpoints();
            pts.insert(pts.end(), sub.begin(), sub.end());
          }
        }
      },
      node_);
  std::sort(pts.begin(), pts.end());
  return pts;
}

double spectrum_eval(const NoiseSpectrum& spectrum, double omega) {
  if (!(omega > 0.0)) {
    throw std::invalid_argument("spectrum_eval: omega must be > 0 (power laws diverge at 0)");
  }
  return spectrum(omega);
}

namespace {

NoiseSpectrum load_tabulated_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open spectrum file '" + path + "'", 0, 0);
  std::string line;
  if (!std::getline(in, line) || line != "omega_rad_per_s,S") {
    throw parse_error("expected header 'omega_rad_per_s,S'", 1, 1);
  }
  Tabulated tab;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b)) {
      throw parse_error("expected two comma-separated columns", row, 1);
    }
    try {
      tab.omega.push_back(std::stod(a));
    } catch (const std::exception&) {
      throw parse_error("non-numeric omega", row, 1);
    }
    try {
      tab.value.push_back(std::stod(b));
    } catch (const std::exception&) {
      throw parse_error("non-numeric spectrum value", row, 2);
    }
  }
  return NoiseSpectrum(std::move(tab));
}

std::vector<double> parse_args(const std::string& args, std::size_t expected,
                               const std::string& what) {
  std::vector<double> out;
  std::istringstream ss(args);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::invalid_argument("parse_spectrum: bad number '" + tok + "' in " + what);
    }
  }
  if (out.size() != expected) {
    throw std::invalid_argument("parse_spectrum: " + what + " takes " +
                                std::to_string(expected) + " comma-separated values");
  }
  return out;
}

NoiseSpectrum parse_component(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string args = (colon == std::string::npos) ? "" : text.substr(colon + 1);
  if (kind == "powerlaw") {
    auto v = parse_args(args, 2, "powerlaw");
    return NoiseSpectrum(PowerLaw{v[0], v[1]});
  }
  if (kind == "powerlaw-white") {
    auto v = parse_args(args, 3, "powerlaw-white");
    return NoiseSpectrum(PowerLawPlusWhite{v[0], v[1], v[2]});
  }
  if (kind == "resonance") {
    auto v = parse_args(args, 3, "resonance");
    return NoiseSpectrum(GaussianResonance{v[0], v[1], v[2]});
  }
  if (kind == "white") {
    auto v = parse_args(args, 1, "white");
    return NoiseSpectrum(PowerLawPlusWhite{0.0, 1.0, v[0]});
  }
  if (kind == "file") {
    return load_tabulated_csv(args);
  }
  throw std::invalid_argument("parse_spectrum: unknown spectrum kind '" + kind + "'");
}

}  // namespace

NoiseSpectrum parse_spectrum(const std::string& text) {
  // split on '+' separators, but not the '+' of an exponent like 1e+3
  std::vector<std::string> parts;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '+' && !cur.empty() &&
        !(cur.back() == 'e' || cur.back() == 'E')) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  if (parts.empty()) throw std::invalid_argument("parse_spectrum: empty spectrum string");
  if (parts.size() == 1) return parse_component(parts[0]);
  SpectrumSum sum;
  for (const auto& p : parts) sum.components.push_back(parse_component(p));
  return NoiseSpectrum(std::move(sum));
}

}  // namespace ddscope
