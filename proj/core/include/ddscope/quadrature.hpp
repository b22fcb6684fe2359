#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <vector>

namespace ddscope {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
};

namespace detail {

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule
// (QUADPACK dqk15 constants).
inline constexpr double kGk15Nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kGk15WeightsK[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGk15WeightsG[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
void gk15_panel(F&& f, double a, double b, double& value, double& error) {
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  const double fc = f(c);
  double resk = kGk15WeightsK[7] * fc;
  double resg = kGk15WeightsG[3] * fc;
  double fv[7];
  for (int i = 0; i < 7; ++i) {
    const double dx = r * kGk15Nodes[i];
    const double fsum = f(c - dx) + f(c + dx);
    fv[i] = fsum;
    resk += kGk15WeightsK[i] * fsum;
  }
  for (int i = 0; i < 3; ++i) resg += kGk15WeightsG[i] * fv[2 * i + 1];
  value = resk * r;
  error = std::abs((resk - resg) * r);
}

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration over an initial partition.
// Panels are refined worst-error-first until the summed error estimate drops
// below max(abs_tol, rel_tol * |integral|) or the panel budget is exhausted.
template <typename F>
QuadratureResult integrate_adaptive(F&& f, const std::vector<double>& breakpoints,
                                    double abs_tol, double rel_tol,
                                    std::size_t max_panels = 400000) {
  if (breakpoints.size() < 2) {
    throw std::invalid_argument("integrate_adaptive: need >= 2 breakpoints");
  }
  QuadratureResult result;
  std::priority_queue<detail::Panel> queue;
  double total = 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    if (!(b > a)) continue;
    detail::Panel p{a, b, 0.0, 0.0};
    detail::gk15_panel(f, a, b, p.value, p.error);
    result.evaluations += 15;
    total += p.value;
    err += p.error;
    queue.push(p);
  }
  std::size_t n_panels = queue.size();
  while (!queue.empty() && n_panels < max_panels &&
         err > std::max(abs_tol, rel_tol * std::abs(total))) {
    const detail::Panel worst = queue.top();
    queue.pop();
    if (worst.b - worst.a <= std::max(std::abs(worst.a), 1.0) * 4e-16) {
      // cannot subdivide further in double precision; accept its estimate
      err -= worst.error;
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    detail::Panel left{worst.a, mid, 0.0, 0.0};
    detail::Panel right{mid, worst.b, 0.0, 0.0};
    detail::gk15_panel(f, left.a, left.b, left.value, left.error);
    detail::gk15_panel(f, right.a, right.b, right.value, right.error);
    result.evaluations += 30;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++n_panels;
  }
  result.value = total;
  result.error = err;
  return result;
}

// Tanh-sinh (double-exponential) quadrature on [a, b] for integrands with an
// integrable algebraic singularity at either endpoint.  Abscissae are formed
// as offsets from the endpoints, so clustering near the singularity survives
// in double precision.  The integrand is never evaluated at a or b; non-finite
// values at interior nodes are treated as zero (their weights are already
// double-exponentially small).
template <typename F>
QuadratureResult integrate_tanh_sinh(F&& f, double a, double b, double rel_tol,
                                     int max_level = 11) {
  QuadratureResult result;
  if (!(b > a)) return result;
  const double width = b - a;
  const double t_max = 6.5;  // offsets underflow well before this

  // node_sum accumulates w(t_j) * [f(a + off_j) + f(b - off_j)] over all
  // levels; the integral at spacing h is h * width * node_sum.
  double node_sum = (M_PI / 4.0) * f(a + 0.5 * width);  // t = 0, (1-tanh(0))/2 = 1/2
  result.evaluations = 1;
  double h = 1.0;
  double integral = h * width * node_sum;
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    const int stride = (level == 1) ? 1 : 2;
    const int j0 = 1;
    for (int j = j0; j * h <= t_max; j += stride) {
      if (level > 1 && j % 2 == 0) continue;
      const double t = j * h;
      const double s = std::sinh(t);
      const double cosh_ps = std::cosh(M_PI / 2.0 * s);
      // d/dt of (1 + tanh(pi/2 sinh t))/2
      const double w = (M_PI / 4.0) * std::cosh(t) / (cosh_ps * cosh_ps);
      if (w < 1e-310) break;
      const double off = width / (1.0 + std::exp(M_PI * s));  // width*(1-tanh)/2
      const double x_lo = a + off;
      const double x_hi = b - off;
      double flo = (x_lo > a) ? f(x_lo) : 0.0;
      double fhi = (x_hi < b) ? f(x_hi) : 0.0;
      if (!std::isfinite(flo)) flo = 0.0;
      if (!std::isfinite(fhi)) fhi = 0.0;
      node_sum += w * (flo + fhi);
      result.evaluations += 2;
    }
    const double next = h * width * node_sum;
    const double change = std::abs(next - integral);
    integral = next;
    if (level >= 3 && change <= rel_tol * std::abs(integral)) {
      result.error = change;
      result.value = integral;
      return result;
    }
    result.error = change;
  }
  result.value = integral;
  return result;
}

}  // namespace ddscope
