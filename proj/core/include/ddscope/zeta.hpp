#pragma once

namespace ddscope {

// Riemann zeta(s) for real s > 1, via direct summation with Euler-Maclaurin
// tail corrections.  Accurate to better than 1e-12 relative over the range
// used here (throws std::domain_error for s <= 1).
double riemann_zeta(double s);

}  // namespace ddscope
