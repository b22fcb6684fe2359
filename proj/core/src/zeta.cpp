#include "ddscope/zeta.hpp"

#include <cmath>
#include <stdexcept>

namespace ddscope {

double riemann_zeta(double s) {
  if (!(s > 1.0)) throw std::domain_error("riemann_zeta: defined here for s > 1 only");

  // zeta(s) = sum_{n<N} n^-s + N^{1-s}/(s-1) + N^-s/2
  //           + s N^{-s-1}/12 - s(s+1)(s+2) N^{-s-3}/720
  //           + s(s+1)(s+2)(s+3)(s+4) N^{-s-5}/30240 - ...
  // N = 1000 puts the first omitted term below 1e-24 for all s > 1.
  constexpr int kCutoff = 1000;
  double sum = 0.0;
  for (int n = kCutoff - 1; n >= 1; --n) sum += std::pow(n, -s);

  const double ninv = 1.0 / kCutoff;
  const double npow = std::pow(kCutoff, -s);
  double tail = npow * kCutoff / (s - 1.0) + 0.5 * npow;
  tail += s * npow * ninv / 12.0;
  tail -= s * (s + 1.0) * (s + 2.0) * npow * ninv * ninv * ninv / 720.0;
  tail += s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * npow * std::pow(ninv, 5) / 30240.0;
  return sum + tail;
}

}  // namespace ddscope
